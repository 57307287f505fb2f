//! Optimality certificates for a given flow: an improving di-circuit of the
//! residual digraph under lexicographic level costs, or a potential-vector
//! proving that none exists.

use serde::{Deserialize, Serialize};

use crate::bellman_ford::{scalar_shortest, shortest_from_virtual_root, LexVec};
use crate::error::{FlowError, Result};
use crate::graph::{build_aux_digraph, check_flow, AuxDigraph, Direction, FlowProblem, IntegralFlow};

/// Cost of a residual arc in terms of the level unit vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ArcLevel {
    Zero,
    Plus(usize),
    Minus(usize),
}

/// Distinct focus levels `gamma_1 > ... > gamma_k` and the cost of each
/// residual arc: `+e_i` for a forward focus arc with `z* = gamma_i`, `-e_i`
/// for a backward one, zero otherwise. `z*` is `z(e)` on forward arcs and
/// `z(e) - 1` on backward arcs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelCost {
    pub levels: Vec<i64>,
    pub arc_cost: Vec<ArcLevel>,
}

impl LevelCost {
    pub fn dim(&self) -> usize {
        self.levels.len()
    }

    pub fn vector(&self, arc: usize) -> LexVec {
        let k = self.dim();
        match self.arc_cost[arc] {
            ArcLevel::Zero => LexVec::zero(k),
            ArcLevel::Plus(i) => LexVec::unit(k, i, 1),
            ArcLevel::Minus(i) => LexVec::unit(k, i, -1),
        }
    }

    /// Component `i` of every arc cost.
    pub fn component(&self, i: usize) -> Vec<i64> {
        self.arc_cost
            .iter()
            .map(|c| match *c {
                ArcLevel::Plus(j) if j == i => 1,
                ArcLevel::Minus(j) if j == i => -1,
                _ => 0,
            })
            .collect()
    }

    pub fn circuit_cost(&self, circuit: &[usize]) -> LexVec {
        circuit.iter().fold(LexVec::zero(self.dim()), |acc, &a| &acc + &self.vector(a))
    }
}

fn star_value(aux: &AuxDigraph, z: &IntegralFlow, arc: usize) -> i64 {
    let a = &aux.arcs[arc];
    match a.direction {
        Direction::Forward => z.values[a.origin],
        Direction::Backward => z.values[a.origin] - 1,
    }
}

pub fn build_level_cost(problem: &FlowProblem, z: &IntegralFlow) -> (AuxDigraph, LevelCost) {
    let aux = build_aux_digraph(problem, z);
    let mut levels: Vec<i64> =
        (0..aux.arcs.len()).filter(|&a| aux.arcs[a].in_focus).map(|a| star_value(&aux, z, a)).collect();
    levels.sort_unstable_by(|a, b| b.cmp(a));
    levels.dedup();
    let arc_cost = (0..aux.arcs.len())
        .map(|a| {
            let arc = &aux.arcs[a];
            if !arc.in_focus {
                return ArcLevel::Zero;
            }
            let value = star_value(&aux, z, a);
            let i = levels.iter().position(|&g| g == value).expect("level was collected");
            match arc.direction {
                Direction::Forward => ArcLevel::Plus(i),
                Direction::Backward => ArcLevel::Minus(i),
            }
        })
        .collect();
    (aux, LevelCost { levels, arc_cost })
}

fn arc_pairs(aux: &AuxDigraph) -> Vec<(usize, usize)> {
    aux.arcs.iter().map(|a| (a.tail, a.head)).collect()
}

/// A residual di-circuit of lexicographically negative cost, as arc
/// indices of `aux` in traversal order.
pub fn find_improving_dicircuit(aux: &AuxDigraph, cost: &LevelCost) -> Option<Vec<usize>> {
    let k = cost.dim();
    shortest_from_virtual_root(aux.node_count, &arc_pairs(aux), |a| cost.vector(a), LexVec::zero(k), |x, y| x + y).err()
}

/// One unit along a residual di-circuit: `+1` on forward arcs, `-1` on
/// backward arcs.
pub fn apply_dicircuit(z: &IntegralFlow, aux: &AuxDigraph, circuit: &[usize]) -> IntegralFlow {
    let mut values = z.values.clone();
    for &a in circuit {
        let arc = &aux.arcs[a];
        match arc.direction {
            Direction::Forward => values[arc.origin] += 1,
            Direction::Backward => values[arc.origin] -= 1,
        }
    }
    IntegralFlow::new(values)
}

/// Node potentials in `Z^k`, one vector per node.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PotentialVector {
    pub values: Vec<Vec<i64>>,
}

impl PotentialVector {
    /// `pi(v) - pi(u) <= c(uv)` lexicographically on every arc.
    pub fn is_feasible(&self, aux: &AuxDigraph, cost: &LevelCost) -> bool {
        self.values.len() == aux.node_count
            && self.values.iter().all(|p| p.len() == cost.dim())
            && aux.arcs.iter().enumerate().all(|(a, arc)| {
                let diff: Vec<i64> =
                    self.values[arc.head].iter().zip(&self.values[arc.tail]).map(|(h, t)| h - t).collect();
                LexVec(diff) <= cost.vector(a)
            })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PotentialOutcome {
    Potential(PotentialVector),
    ImprovingCircuit(Vec<usize>),
}

/// Builds a feasible potential-vector one component at a time: component
/// `i` is a shortest-path potential for the `i`-th cost component on the
/// arcs tight in every earlier component. A negative circuit there is
/// lexicographically negative overall and is returned instead.
pub fn build_potential_vector(aux: &AuxDigraph, cost: &LevelCost) -> PotentialOutcome {
    let n = aux.node_count;
    let mut active: Vec<usize> = (0..aux.arcs.len()).collect();
    let mut components: Vec<Vec<i64>> = Vec::with_capacity(cost.dim());
    for i in 0..cost.dim() {
        let full = cost.component(i);
        let arcs: Vec<(usize, usize)> = active.iter().map(|&a| (aux.arcs[a].tail, aux.arcs[a].head)).collect();
        let costs: Vec<i64> = active.iter().map(|&a| full[a]).collect();
        match scalar_shortest(n, &arcs, &costs) {
            Err(cycle) => return PotentialOutcome::ImprovingCircuit(cycle.into_iter().map(|j| active[j]).collect()),
            Ok(pi) => {
                active.retain(|&a| pi[aux.arcs[a].head] - pi[aux.arcs[a].tail] == full[a]);
                components.push(pi);
            }
        }
    }
    let values = (0..n).map(|v| components.iter().map(|c| c[v]).collect()).collect();
    PotentialOutcome::Potential(PotentialVector { values })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DecminVerdict {
    /// Decreasingly minimal, with the levels and a feasible potential.
    Decmin { levels: Vec<i64>, potential: PotentialVector },
    /// Not decreasingly minimal; the circuit improves the flow.
    Improvable { circuit: Vec<usize>, improved: IntegralFlow },
}

/// Checks whether a feasible flow is decreasingly minimal on the focus
/// edges and returns the matching certificate.
pub fn is_decmin(problem: &FlowProblem, z: &IntegralFlow) -> Result<(AuxDigraph, DecminVerdict)> {
    problem.validate()?;
    if !check_flow(problem, z).is_valid() {
        return Err(FlowError::InvalidProblem("flow is not a feasible m-flow".into()));
    }
    let (aux, cost) = build_level_cost(problem, z);
    let verdict = match build_potential_vector(&aux, &cost) {
        PotentialOutcome::Potential(potential) => {
            if !potential.is_feasible(&aux, &cost) {
                return Err(FlowError::InternalCertificateFailure("potential-vector is infeasible".into()));
            }
            DecminVerdict::Decmin { levels: cost.levels.clone(), potential }
        }
        PotentialOutcome::ImprovingCircuit(circuit) => {
            if !cost.circuit_cost(&circuit).is_negative() {
                return Err(FlowError::InternalCertificateFailure("circuit does not improve".into()));
            }
            let improved = apply_dicircuit(z, &aux, &circuit);
            DecminVerdict::Improvable { circuit, improved }
        }
    };
    Ok((aux, verdict))
}

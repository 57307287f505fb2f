//! Flows saturating as few edges of a set `L` as possible, together with a
//! dual chain certifying optimality.
//!
//! Every `e` in `L` gets a parallel copy `e'` with bounds `[0, 1]` and cost
//! 1, while `e` itself keeps `[f(e), g(e) - 1]` at cost 0. A minimum-cost
//! flow of the extended problem pulls back to an `L`-upper-minimizer
//! (`x(e) = x1(e) + x1(e')`), and the level sets of optimal node potentials
//! form the chain.

use serde::{Deserialize, Serialize};

use crate::error::{FlowError, Result};
use crate::ext::{ext_sum, ExtInt, Fin};
use crate::graph::{Digraph, EdgeId, FlowProblem, IntegralFlow, NodeSet};
use crate::mincost::{min_cost_mflow, residual_potentials, CostedResidual};

/// The base problem extended with one unit-capacity, unit-cost copy of
/// every level edge.
#[derive(Debug, Clone)]
pub struct ParallelCopyProblem {
    pub base: FlowProblem,
    pub level: Vec<EdgeId>,
    /// Extended problem; copies are appended after the base edges, in the
    /// order of `level`.
    pub extended: FlowProblem,
}

impl ParallelCopyProblem {
    pub fn new(base: &FlowProblem, level: &[EdgeId]) -> Result<Self> {
        let mut seen = vec![false; base.edge_count()];
        for &e in level {
            if e >= base.edge_count() || seen[e] {
                return Err(FlowError::InvalidProblem(format!("bad level edge {e}")));
            }
            seen[e] = true;
            let (f, g) = (base.lower[e], base.upper[e]);
            if !f.is_finite() || !g.is_finite() || f >= g {
                return Err(FlowError::InvalidProblem(format!("level edge {e} needs finite bounds with f < g")));
            }
        }
        let m = base.edge_count();
        let mut edges = base.graph.edges().to_vec();
        let mut lower = base.lower.clone();
        let mut upper = base.upper.clone();
        let mut cost = vec![0i64; m];
        for &e in level {
            edges.push(base.graph.edges()[e]);
            upper[e] = upper[e].add_int(-1)?;
            lower.push(Fin(0));
            upper.push(Fin(1));
            cost.push(1);
        }
        let graph = Digraph::new(base.node_count(), edges)?;
        let focus = vec![false; graph.edge_count()];
        let extended = FlowProblem::new(graph, lower, upper, base.supply.clone(), focus)?.with_cost(cost)?;
        Ok(ParallelCopyProblem { base: base.clone(), level: level.to_vec(), extended })
    }

    /// `x(e) = x1(e) + x1(e')` on level edges, `x1(e)` elsewhere.
    pub fn pull_back(&self, x1: &IntegralFlow) -> IntegralFlow {
        let m = self.base.edge_count();
        let mut values = x1.values[..m].to_vec();
        for (i, &e) in self.level.iter().enumerate() {
            values[e] += x1.values[m + i];
        }
        IntegralFlow::new(values)
    }
}

/// Strictly nested node sets `V1 ⊃ V2 ⊃ ... ⊃ Vq`, each non-empty and
/// proper.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Chain {
    pub sets: Vec<NodeSet>,
}

impl Chain {
    pub fn empty() -> Self {
        Chain { sets: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn is_valid(&self, node_count: usize) -> bool {
        self.sets.iter().all(|s| s.node_count() == node_count && !s.is_empty() && !s.is_full())
            && self.sets.windows(2).all(|w| w[1].is_subset_of(&w[0]) && w[1] != w[0])
    }

    /// Number of chain members entered by `e`.
    pub fn entered(&self, graph: &Digraph, e: EdgeId) -> usize {
        self.sets.iter().filter(|s| graph.enters(e, s)).count()
    }

    /// Number of chain members left by `e`.
    pub fn left(&self, graph: &Digraph, e: EdgeId) -> usize {
        self.sets.iter().filter(|s| graph.leaves(e, s)).count()
    }

    pub fn member_lists(&self) -> Vec<Vec<usize>> {
        self.sets.iter().map(NodeSet::members).collect()
    }
}

/// Chain value `rho_L(C) - sum over Z in C of (rho_g(Z) - delta_f(Z) - m~(Z))`,
/// where `rho_L(C)` counts level edges entering at least one member.
pub fn chain_dual_value(problem: &FlowProblem, level: &[bool], chain: &Chain) -> Result<ExtInt> {
    let covered =
        (0..problem.edge_count()).filter(|&e| level[e] && chain.entered(&problem.graph, e) > 0).count() as i64;
    let mut terms = vec![Fin(covered)];
    for set in &chain.sets {
        terms.push(problem.deficiency(set)?);
    }
    ext_sum(terms)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Criterion {
    O1,
    O2,
    O3,
    O4,
    O5,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriterionViolation {
    pub criterion: Criterion,
    pub edge: EdgeId,
}

/// Check the five optimality criteria of an `L`-upper-minimizer against a
/// chain. An empty result means every criterion holds.
///
/// - O1: `z = f` on edges leaving a member.
/// - O2: `z = g` on non-level edges entering a member.
/// - O3: `g - 1 <= z <= g` on level edges entering exactly one member.
/// - O4: `z = g` on level edges entering two or more members.
/// - O5: `f <= z <= g - 1` on level edges neither entering nor leaving.
pub fn verify_o1_o5(
    problem: &FlowProblem,
    level: &[bool],
    flow: &IntegralFlow,
    chain: &Chain,
) -> Vec<CriterionViolation> {
    let graph = &problem.graph;
    let mut violations = Vec::new();
    for (e, &in_level) in level.iter().enumerate() {
        let z = Fin(flow.values[e]);
        let (f, g) = (problem.lower[e], problem.upper[e]);
        let entered = chain.entered(graph, e);
        let left = chain.left(graph, e);
        let g_minus = g.add_int(-1).unwrap_or(g);
        let violated = if left > 0 {
            (z != f).then_some(Criterion::O1)
        } else if !in_level {
            (entered > 0 && z != g).then_some(Criterion::O2)
        } else if entered == 1 {
            (z < g_minus || z > g).then_some(Criterion::O3)
        } else if entered >= 2 {
            (z != g).then_some(Criterion::O4)
        } else {
            (z < f || z > g_minus).then_some(Criterion::O5)
        };
        if let Some(criterion) = violated {
            violations.push(CriterionViolation { criterion, edge: e });
        }
    }
    violations
}

/// Chain of level sets of optimal node potentials for the extended problem.
///
/// Potentials are shortest distances in the optimal residual graph. The
/// orientation is confirmed against complementary slackness (`y(v) - y(u) <
/// c(e)` forces `x1(e) = f1(e)`, `> c(e)` forces `x1(e) = g1(e)`), and the
/// negated potentials are tried if that fails.
pub fn extract_chain_from_duals(pcp: &ParallelCopyProblem, x1: &IntegralFlow) -> Result<Chain> {
    let ext = &pcp.extended;
    let cost = ext.cost.as_ref().expect("extended problem carries costs");
    let residual = CostedResidual::of_flow(ext, x1, cost)?;
    let pi = residual_potentials(&residual)?;
    let negated: Vec<i64> = pi.iter().map(|&v| -v).collect();
    let y = [pi, negated]
        .into_iter()
        .find(|y| complementary_slackness_holds(ext, cost, x1, y))
        .ok_or_else(|| FlowError::InternalCertificateFailure("no potential orientation satisfies slackness".into()))?;
    Ok(chain_from_levels(&y))
}

pub(crate) fn complementary_slackness_holds(problem: &FlowProblem, cost: &[i64], x1: &IntegralFlow, y: &[i64]) -> bool {
    problem.graph.edges().iter().enumerate().all(|(e, &(u, v))| {
        let slope = y[v] - y[u];
        let value = Fin(x1.values[e]);
        (slope >= cost[e] || value == problem.lower[e]) && (slope <= cost[e] || value == problem.upper[e])
    })
}

/// `Vi = {v : y(v) >= y_i}` for each distinct value `y_i` above the minimum.
pub fn chain_from_levels(y: &[i64]) -> Chain {
    let Some(&min) = y.iter().min() else {
        return Chain::empty();
    };
    let mut values: Vec<i64> = y.iter().copied().filter(|&v| v > min).collect();
    values.sort_unstable();
    values.dedup();
    let sets = values.into_iter().map(|level| NodeSet::from_mask(y.iter().map(|&v| v >= level).collect())).collect();
    Chain { sets }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UpperMinimizer {
    pub flow: IntegralFlow,
    pub chain: Chain,
    pub saturated_count: usize,
}

/// Flow with the fewest `g`-saturated edges among `level`, plus a chain
/// meeting O1-O5 whose dual value equals that count. Both properties are
/// checked before returning.
pub fn solve_upper_minimizer(problem: &FlowProblem, level: &[EdgeId]) -> Result<UpperMinimizer> {
    let pcp = ParallelCopyProblem::new(problem, level)?;
    let x1 = min_cost_mflow(&pcp.extended)?;
    let chain = extract_chain_from_duals(&pcp, &x1)?;
    let flow = pcp.pull_back(&x1);
    let mut level_mask = vec![false; problem.edge_count()];
    for &e in level {
        level_mask[e] = true;
    }
    let saturated_count = level.iter().filter(|&&e| Fin(flow.values[e]) == problem.upper[e]).count();

    if !chain.is_valid(problem.node_count()) {
        return Err(FlowError::InternalCertificateFailure("chain is not strictly nested".into()));
    }
    let violations = verify_o1_o5(problem, &level_mask, &flow, &chain);
    if !violations.is_empty() {
        return Err(FlowError::InternalCertificateFailure(format!("optimality criteria fail: {violations:?}")));
    }
    let dual = chain_dual_value(problem, &level_mask, &chain)?;
    if dual != Fin(saturated_count as i64) {
        return Err(FlowError::InternalCertificateFailure(format!(
            "saturated count {saturated_count} differs from chain value {dual}"
        )));
    }
    Ok(UpperMinimizer { flow, chain, saturated_count })
}

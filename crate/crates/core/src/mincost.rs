//! Minimum-cost feasible m-flows by negative di-circuit cancelling, and
//! integer potentials on a conservative residual graph.

use crate::bellman_ford::scalar_shortest;
use crate::error::{FlowError, Result};
use crate::ext::{ExtInt, Fin, PosInf};
use crate::graph::{Direction, EdgeId, FlowProblem, IntegralFlow, NodeId};
use crate::maxflow::{find_feasible_mflow, Feasibility};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidualArc {
    pub tail: NodeId,
    pub head: NodeId,
    pub capacity: ExtInt,
    pub cost: i64,
    pub origin: EdgeId,
    pub direction: Direction,
}

/// Residual graph of a flow: forward arcs cost `c(e)`, backward arcs
/// `-c(e)`. Only arcs with positive residual capacity are present.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostedResidual {
    pub node_count: usize,
    pub arcs: Vec<ResidualArc>,
}

impl CostedResidual {
    pub fn new(node_count: usize, arcs: Vec<ResidualArc>) -> Self {
        CostedResidual { node_count, arcs }
    }

    pub fn of_flow(problem: &FlowProblem, z: &IntegralFlow, cost: &[i64]) -> Result<Self> {
        let mut arcs = Vec::new();
        for (e, &(u, v)) in problem.graph.edges().iter().enumerate() {
            let value = Fin(z.values[e]);
            let up = problem.upper[e].checked_sub(value)?;
            if up > Fin(0) {
                arcs.push(ResidualArc {
                    tail: u,
                    head: v,
                    capacity: up,
                    cost: cost[e],
                    origin: e,
                    direction: Direction::Forward,
                });
            }
            let down = value.checked_sub(problem.lower[e])?;
            if down > Fin(0) {
                arcs.push(ResidualArc {
                    tail: v,
                    head: u,
                    capacity: down,
                    cost: -cost[e],
                    origin: e,
                    direction: Direction::Backward,
                });
            }
        }
        Ok(CostedResidual { node_count: problem.node_count(), arcs })
    }

    fn endpoints(&self) -> Vec<(usize, usize)> {
        self.arcs.iter().map(|a| (a.tail, a.head)).collect()
    }

    fn costs(&self) -> Vec<i64> {
        self.arcs.iter().map(|a| a.cost).collect()
    }

    pub fn circuit_cost(&self, circuit: &[usize]) -> i64 {
        circuit.iter().map(|&a| self.arcs[a].cost).sum()
    }
}

/// A di-circuit (arc indices, in order) of negative total cost, if any.
pub fn find_negative_dicircuit(residual: &CostedResidual) -> Option<Vec<usize>> {
    scalar_shortest(residual.node_count, &residual.endpoints(), &residual.costs()).err()
}

/// Integer potential `pi` with `pi(head) - pi(tail) <= cost` on every arc:
/// shortest distances from a virtual root joined to every node at cost 0.
pub fn residual_potentials(residual: &CostedResidual) -> Result<Vec<i64>> {
    scalar_shortest(residual.node_count, &residual.endpoints(), &residual.costs()).map_err(FlowError::NegativeCycle)
}

/// Minimum `sum c(e) z(e)` over integral feasible m-flows, using the
/// problem's cost (zero when absent).
///
/// Starts from any feasible flow and cancels the first negative residual
/// di-circuit found until none remains.
pub fn min_cost_mflow(problem: &FlowProblem) -> Result<IntegralFlow> {
    let cost = problem.cost.clone().unwrap_or_else(|| vec![0; problem.edge_count()]);
    let mut z = match find_feasible_mflow(problem)? {
        Feasibility::Flow(z) => z,
        Feasibility::Violated(cert) => return Err(FlowError::Infeasible(cert)),
    };
    loop {
        let residual = CostedResidual::of_flow(problem, &z, &cost)?;
        let Some(circuit) = find_negative_dicircuit(&residual) else {
            return Ok(z);
        };
        let amount = circuit.iter().map(|&a| residual.arcs[a].capacity).min().expect("circuit is non-empty");
        let amount = match amount {
            Fin(v) => v,
            PosInf => return Err(FlowError::UnboundedCost),
            _ => unreachable!("residual capacities are positive"),
        };
        for &a in &circuit {
            let arc = &residual.arcs[a];
            let delta = match arc.direction {
                Direction::Forward => amount,
                Direction::Backward => -amount,
            };
            z.values[arc.origin] = z.values[arc.origin].checked_add(delta).ok_or(FlowError::Overflow)?;
        }
    }
}

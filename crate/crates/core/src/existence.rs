//! Existence of decreasingly minimal flows under infinite bounds, and
//! finite replacement bounds on the focus edges.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{FlowError, Result};
use crate::ext::{ext_sum, ExtInt, Fin, NegInf, PosInf};
use crate::graph::{boundary_sums, EdgeId, FlowProblem, IntegralFlow, NodeId, NodeSet};
use crate::maxflow::{find_feasible_mflow, Feasibility};

/// Arc of the unboundedness digraph: a copy of an edge with `f = -inf`, or
/// the reversal of a non-focus edge with `g = +inf`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct InfinityArc {
    pub tail: NodeId,
    pub head: NodeId,
    pub origin: EdgeId,
    pub reversed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InfinityGraph {
    pub node_count: usize,
    pub arcs: Vec<InfinityArc>,
}

impl InfinityGraph {
    pub fn new(problem: &FlowProblem) -> Self {
        let mut arcs = Vec::new();
        for (e, &(u, v)) in problem.graph.edges().iter().enumerate() {
            if problem.lower[e] == NegInf {
                arcs.push(InfinityArc { tail: u, head: v, origin: e, reversed: false });
            }
            if !problem.focus[e] && problem.upper[e] == PosInf {
                arcs.push(InfinityArc { tail: v, head: u, origin: e, reversed: true });
            }
        }
        InfinityGraph { node_count: problem.node_count(), arcs }
    }

    /// Breadth-first search from `from`; returns reached nodes and the arc
    /// used to reach each one.
    fn search(&self, from: NodeId) -> (NodeSet, Vec<Option<usize>>) {
        let mut reached = NodeSet::empty(self.node_count);
        let mut via = vec![None; self.node_count];
        reached.insert(from);
        let mut queue = VecDeque::from([from]);
        while let Some(u) = queue.pop_front() {
            for (a, arc) in self.arcs.iter().enumerate() {
                if arc.tail == u && !reached.contains(arc.head) {
                    reached.insert(arc.head);
                    via[arc.head] = Some(a);
                    queue.push_back(arc.head);
                }
            }
        }
        (reached, via)
    }

    pub fn reachable_from(&self, from: NodeId) -> NodeSet {
        self.search(from).0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Existence {
    Exists,
    /// A di-circuit of the unboundedness digraph through a focus edge.
    NoDecMin(Vec<InfinityArc>),
}

/// Decides whether a decreasingly minimal flow exists: it does unless the
/// unboundedness digraph has a di-circuit through a focus edge. Only focus
/// edges with `f = -inf` can put a focus arc on such a circuit.
pub fn exists_decmin(problem: &FlowProblem) -> Result<Existence> {
    if let Feasibility::Violated(cert) = find_feasible_mflow(problem)? {
        return Err(FlowError::Infeasible(cert));
    }
    let graph = InfinityGraph::new(problem);
    for (a, arc) in graph.arcs.iter().enumerate() {
        if arc.reversed || !problem.focus[arc.origin] {
            continue;
        }
        let (_, via) = graph.search(arc.head);
        if arc.head != arc.tail && via[arc.tail].is_none() {
            continue;
        }
        let mut path = Vec::new();
        let mut v = arc.tail;
        while v != arc.head {
            let step = via[v].expect("on the search tree");
            path.push(graph.arcs[step]);
            v = graph.arcs[step].tail;
        }
        path.reverse();
        let mut circuit = vec![graph.arcs[a]];
        circuit.extend(path);
        return Ok(Existence::NoDecMin(circuit));
    }
    Ok(Existence::Exists)
}

/// Unit shift along an unboundedness circuit: `-1` on copied edges, `+1`
/// on reversed ones. The result is feasible and decreasingly smaller on the
/// focus edges whenever the circuit meets them.
pub fn shift_along(z: &IntegralFlow, circuit: &[InfinityArc]) -> IntegralFlow {
    let mut values = z.values.clone();
    for arc in circuit {
        values[arc.origin] += if arc.reversed { 1 } else { -1 };
    }
    IntegralFlow::new(values)
}

/// Equivalent problem with finite bounds on every focus edge and the same
/// decreasingly minimal flows.
///
/// Infinite upper bounds on `F` are clamped at the largest focus value of
/// some feasible flow. An infinite lower bound on `e = ts` in `F` becomes
/// `m~(S) - (rho_g(S) - g(e)) + delta_f(S)` where `S` is the set reachable
/// from `s` in the unboundedness digraph.
pub fn finitize_bounds(problem: &FlowProblem) -> Result<FlowProblem> {
    if problem.bounds_finite_on_focus() {
        return Ok(problem.clone());
    }
    if let Existence::NoDecMin(circuit) = exists_decmin(problem)? {
        return Err(FlowError::NoDecMin(circuit));
    }
    let focus = problem.focus_edges();
    let mut upper = problem.upper.clone();
    if focus.iter().any(|&e| upper[e] == PosInf) {
        let z = match find_feasible_mflow(problem)? {
            Feasibility::Flow(z) => z,
            Feasibility::Violated(cert) => return Err(FlowError::Infeasible(cert)),
        };
        let top = focus.iter().map(|&e| z.values[e]).max().expect("focus is non-empty");
        for &e in &focus {
            upper[e] = upper[e].min(Fin(top));
        }
    }
    let clamped = problem.with_bounds(problem.lower.clone(), upper.clone());
    let graph = InfinityGraph::new(&clamped);
    let mut reach_cache: HashMap<NodeId, NodeSet> = HashMap::new();
    let mut lower = problem.lower.clone();
    for &e in &focus {
        if lower[e] != NegInf {
            continue;
        }
        let head = clamped.graph.head(e);
        let reach = reach_cache.entry(head).or_insert_with(|| graph.reachable_from(head));
        let (rho_g, _) = boundary_sums(&clamped.graph, &clamped.upper, reach)?;
        let (_, delta_f) = boundary_sums(&clamped.graph, &clamped.lower, reach)?;
        let bound = ext_sum([Fin(clamped.supply_of(reach)?), -rho_g, clamped.upper[e], delta_f])?;
        if !bound.is_finite() {
            return Err(FlowError::InternalCertificateFailure(format!("lower bound for edge {e} is not finite")));
        }
        lower[e] = bound;
    }
    let finite = problem.with_bounds(lower, upper);
    finite.validate()?;
    Ok(finite)
}

/// Largest value on the focus edges; used when reporting.
pub fn focus_max(problem: &FlowProblem, z: &IntegralFlow) -> Option<ExtInt> {
    problem.focus_edges().into_iter().map(|e| Fin(z.values[e])).max()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{check_flow, decmin_compare, Digraph};

    fn triangle(lower: ExtInt) -> FlowProblem {
        let g = Digraph::new(3, vec![(0, 1), (1, 2), (2, 0)]).unwrap();
        FlowProblem::new(g, vec![NegInf, NegInf, lower], vec![Fin(0); 3], vec![0; 3], vec![true; 3]).unwrap()
    }

    #[test]
    fn triangle_has_no_decmin() {
        let p = triangle(NegInf);
        let Existence::NoDecMin(circuit) = exists_decmin(&p).unwrap() else {
            panic!("expected a witness");
        };
        assert_eq!(circuit.len(), 3);
        let z = IntegralFlow::zero(3);
        let shifted = shift_along(&z, &circuit);
        assert!(check_flow(&p, &shifted).is_valid());
        assert_eq!(
            decmin_compare(&shifted.focus_profile(&p.focus), &z.focus_profile(&p.focus)),
            Ok(std::cmp::Ordering::Less)
        );
        assert!(matches!(finitize_bounds(&p), Err(FlowError::NoDecMin(_))));
    }

    #[test]
    fn one_finite_lower_bound_flips_existence() {
        let p = triangle(Fin(-2));
        assert_eq!(exists_decmin(&p).unwrap(), Existence::Exists);
        let finite = finitize_bounds(&p).unwrap();
        assert!(finite.bounds_finite_on_focus());
        // Every edge carries the same circulation value, at least -2.
        assert_eq!(finite.lower, vec![Fin(-2); 3]);
        assert_eq!(finitize_bounds(&finite).unwrap(), finite);
    }

    #[test]
    fn finite_bounds_are_left_alone() {
        let g = Digraph::new(2, vec![(0, 1)]).unwrap();
        let p = FlowProblem::new(g, vec![Fin(0)], vec![Fin(3)], vec![-1, 1], vec![true]).unwrap();
        assert_eq!(exists_decmin(&p).unwrap(), Existence::Exists);
        assert_eq!(finitize_bounds(&p).unwrap(), p);
    }

    #[test]
    fn infinite_upper_on_focus_is_clamped() {
        let g = Digraph::new(2, vec![(0, 1), (0, 1)]).unwrap();
        let p = FlowProblem::new(g, vec![Fin(0), Fin(0)], vec![PosInf, Fin(1)], vec![-3, 3], vec![true, true]).unwrap();
        let finite = finitize_bounds(&p).unwrap();
        assert!(finite.upper[0].is_finite());
        assert!(finite.upper[0] >= Fin(2));
    }

    #[test]
    fn focus_self_loop_with_free_lower_bound() {
        let g = Digraph::new(1, vec![(0, 0)]).unwrap();
        let p = FlowProblem::new(g, vec![NegInf], vec![Fin(4)], vec![0], vec![true]).unwrap();
        assert!(matches!(exists_decmin(&p).unwrap(), Existence::NoDecMin(c) if c.len() == 1));
    }
}

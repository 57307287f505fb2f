//! Shortest-augmenting-path max-flow, Hoffman feasibility and the cut
//! subroutine used by the Newton-Dinkelbach search.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{FlowError, Result};
use crate::ext::{ExtInt, Fin, NegInf, PosInf};
use crate::graph::{Digraph, FlowProblem, IntegralFlow, NodeId, NodeSet};

#[derive(Debug, Clone)]
struct NetArc {
    to: usize,
    residual: ExtInt,
}

/// Residual network with paired arcs: arc `i ^ 1` is the reverse of arc `i`.
#[derive(Debug, Clone)]
pub(crate) struct Network {
    arcs: Vec<NetArc>,
    adjacency: Vec<Vec<usize>>,
}

impl Network {
    pub(crate) fn new(node_count: usize) -> Self {
        Network { arcs: Vec::new(), adjacency: vec![Vec::new(); node_count] }
    }

    /// Adds `u -> v` with the given capacity and returns its arc index.
    pub(crate) fn add_arc(&mut self, u: usize, v: usize, capacity: ExtInt) -> usize {
        let id = self.arcs.len();
        self.arcs.push(NetArc { to: v, residual: capacity });
        self.arcs.push(NetArc { to: u, residual: Fin(0) });
        self.adjacency[u].push(id);
        self.adjacency[v].push(id + 1);
        id
    }

    /// Units pushed along arc `id` so far.
    pub(crate) fn pushed(&self, id: usize) -> i64 {
        self.arcs[id ^ 1].residual.finite().expect("reverse residual is finite")
    }

    fn bfs(&self, s: usize) -> Vec<Option<usize>> {
        let mut parent = vec![None; self.adjacency.len()];
        let mut seen = vec![false; self.adjacency.len()];
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &a in &self.adjacency[u] {
                let arc = &self.arcs[a];
                if arc.residual > Fin(0) && !seen[arc.to] {
                    seen[arc.to] = true;
                    parent[arc.to] = Some(a);
                    queue.push_back(arc.to);
                }
            }
        }
        parent
    }

    /// Edmonds-Karp. Stops with `PosInf` as soon as an augmenting path of
    /// unbounded capacity is found.
    pub(crate) fn max_flow(&mut self, s: usize, t: usize) -> Result<ExtInt> {
        let mut value: i64 = 0;
        loop {
            let parent = self.bfs(s);
            if parent[t].is_none() {
                return Ok(Fin(value));
            }
            let mut path = Vec::new();
            let mut v = t;
            while v != s {
                let a = parent[v].expect("on path");
                path.push(a);
                v = self.arcs[a ^ 1].to;
            }
            let bottleneck = path.iter().map(|&a| self.arcs[a].residual).min().expect("non-empty path");
            let amount = match bottleneck {
                Fin(b) => b,
                _ => return Ok(PosInf),
            };
            for &a in &path {
                self.arcs[a].residual = self.arcs[a].residual.add_int(-amount)?;
                self.arcs[a ^ 1].residual = self.arcs[a ^ 1].residual.add_int(amount)?;
            }
            value = value.checked_add(amount).ok_or(FlowError::Overflow)?;
        }
    }

    /// Nodes reachable from `s` along arcs of positive residual capacity.
    pub(crate) fn reachable(&self, s: usize) -> Vec<bool> {
        let parent = self.bfs(s);
        (0..self.adjacency.len()).map(|v| v == s || parent[v].is_some()).collect()
    }

    /// Nodes from which `t` is reachable along arcs of positive residual
    /// capacity.
    pub(crate) fn reaching(&self, t: usize) -> Vec<bool> {
        let mut seen = vec![false; self.adjacency.len()];
        seen[t] = true;
        let mut queue = VecDeque::from([t]);
        while let Some(w) = queue.pop_front() {
            for &a in &self.adjacency[w] {
                let u = self.arcs[a].to;
                if self.arcs[a ^ 1].residual > Fin(0) && !seen[u] {
                    seen[u] = true;
                    queue.push_back(u);
                }
            }
        }
        seen
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaxFlow {
    pub value: ExtInt,
    /// Units on each input edge. All zero when the value is `PosInf`.
    pub flow: Vec<i64>,
    /// Source side of a minimum cut: nodes reachable from `s` in the final
    /// residual network.
    pub cut: NodeSet,
}

pub fn max_flow(graph: &Digraph, capacity: &[ExtInt], s: NodeId, t: NodeId) -> Result<MaxFlow> {
    if capacity.len() != graph.edge_count() {
        return Err(FlowError::SizeMismatch { left: capacity.len(), right: graph.edge_count() });
    }
    if s == t || s >= graph.node_count() || t >= graph.node_count() {
        return Err(FlowError::InvalidProblem("source and sink must be distinct nodes".into()));
    }
    if let Some(e) = capacity.iter().position(|&c| c < Fin(0)) {
        return Err(FlowError::InvalidProblem(format!("edge {e} has negative capacity")));
    }
    let mut net = Network::new(graph.node_count());
    let ids: Vec<usize> = graph.edges().iter().zip(capacity).map(|(&(u, v), &c)| net.add_arc(u, v, c)).collect();
    let value = net.max_flow(s, t)?;
    let cut = NodeSet::from_mask(net.reachable(s));
    let flow = if value == PosInf { vec![0; ids.len()] } else { ids.iter().map(|&a| net.pushed(a)).collect() };
    Ok(MaxFlow { value, flow, cut })
}

/// A node set together with its Hoffman deficiency
/// `m~(Z) - rho_g(Z) + delta_f(Z)`; positive deficiency certifies
/// infeasibility.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutCertificate {
    pub set: Vec<NodeId>,
    pub deficiency: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Feasibility {
    Flow(IntegralFlow),
    Violated(CutCertificate),
}

struct FeasibilityRun {
    net: Network,
    base: Vec<i64>,
    forward: Vec<usize>,
    backward: Vec<usize>,
    demand_total: i64,
    pushed: i64,
}

/// Base value of an edge: `f` when finite, else `g` when finite, else 0.
fn base_value(lower: ExtInt, upper: ExtInt) -> i64 {
    match (lower, upper) {
        (Fin(f), _) => f,
        (NegInf, Fin(g)) => g,
        _ => 0,
    }
}

/// Super-source/super-sink reduction: each edge becomes a forward arc of
/// capacity `g - b` and a backward arc of capacity `b - f` around its base
/// value `b`; infinite bounds give infinite capacities.
fn run_feasibility(problem: &FlowProblem) -> Result<FeasibilityRun> {
    let n = problem.node_count();
    let (source, sink) = (n, n + 1);
    let mut net = Network::new(n + 2);
    let mut base = Vec::with_capacity(problem.edge_count());
    let mut forward = Vec::with_capacity(problem.edge_count());
    let mut backward = Vec::with_capacity(problem.edge_count());
    let mut demand: Vec<i64> = problem.supply.clone();
    for (e, &(u, v)) in problem.graph.edges().iter().enumerate() {
        let (f, g) = (problem.lower[e], problem.upper[e]);
        let b = base_value(f, g);
        base.push(b);
        forward.push(net.add_arc(u, v, g.add_int(-b)?));
        backward.push(net.add_arc(v, u, Fin(b).checked_sub(f)?));
        demand[v] = demand[v].checked_sub(b).ok_or(FlowError::Overflow)?;
        demand[u] = demand[u].checked_add(b).ok_or(FlowError::Overflow)?;
    }
    let mut demand_total: i64 = 0;
    for (v, &d) in demand.iter().enumerate() {
        if d < 0 {
            net.add_arc(source, v, Fin(-d));
            demand_total = demand_total.checked_add(-d).ok_or(FlowError::Overflow)?;
        } else if d > 0 {
            net.add_arc(v, sink, Fin(d));
        }
    }
    let pushed = net.max_flow(source, sink)?.finite().expect("source arcs are finite, so the max flow is finite");
    Ok(FeasibilityRun { net, base, forward, backward, demand_total, pushed })
}

fn violated_set(problem: &FlowProblem, run: &FeasibilityRun) -> Result<CutCertificate> {
    let n = problem.node_count();
    let reach = run.net.reaching(n + 1);
    let set = NodeSet::from_mask(reach[..n].to_vec());
    let deficiency = run.demand_total - run.pushed;
    debug_assert_eq!(problem.deficiency(&set), Ok(Fin(deficiency)));
    Ok(CutCertificate { set: set.members(), deficiency })
}

/// Integral `(f, g)`-bounded m-flow, or a set violating the Hoffman
/// condition with maximum deficiency.
pub fn find_feasible_mflow(problem: &FlowProblem) -> Result<Feasibility> {
    if problem.supply.iter().sum::<i64>() != 0 {
        return Err(FlowError::InvalidProblem("supplies must sum to zero".into()));
    }
    let run = run_feasibility(problem)?;
    if run.pushed < run.demand_total {
        return Ok(Feasibility::Violated(violated_set(problem, &run)?));
    }
    let values = (0..problem.edge_count())
        .map(|e| run.base[e] + run.net.pushed(run.forward[e]) - run.net.pushed(run.backward[e]))
        .collect();
    Ok(Feasibility::Flow(IntegralFlow::new(values)))
}

/// A set maximizing the Hoffman deficiency. The empty set has deficiency 0,
/// so the maximum is never negative; it is 0 exactly when the problem is
/// feasible. The returned set is the inclusion-minimal maximizer: the nodes
/// that can still reach the super-sink after a maximum flow. It is empty
/// exactly when the problem is feasible.
pub fn most_violating_set(problem: &FlowProblem) -> Result<CutCertificate> {
    let run = run_feasibility(problem)?;
    violated_set(problem, &run)
}

/// Minimizes `mu * rho_L(Z) + rho_{g'}(Z) - delta_f(Z) - m~(Z)` over node
/// sets, returning a minimizer and the minimum (never positive).
///
/// This is the negated Hoffman deficiency under the raised upper bound
/// `g' + mu * chi_L`, so one feasibility run answers it.
pub fn nd_cut_subroutine(
    problem: &FlowProblem,
    level: &[bool],
    g_prime: &[ExtInt],
    mu: i64,
) -> Result<(NodeSet, ExtInt)> {
    if mu < 0 {
        return Err(FlowError::InvalidProblem("mu must be non-negative".into()));
    }
    let raised = g_prime
        .iter()
        .zip(level)
        .map(|(&g, &in_level)| if in_level { g.add_int(mu) } else { Ok(g) })
        .collect::<Result<Vec<_>>>()?;
    if let Some(e) = (0..raised.len()).find(|&e| raised[e] < problem.lower[e]) {
        return Err(FlowError::InvalidProblem(format!("g' is below f on edge {e}")));
    }
    let shifted = problem.with_bounds(problem.lower.clone(), raised);
    let cert = most_violating_set(&shifted)?;
    let set = NodeSet::from_members(problem.node_count(), cert.set);
    Ok((set, Fin(-cert.deficiency)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::check_flow;
    use crate::graph::fixtures::*;

    #[test]
    fn parallel_edges_add_up() {
        let g = Digraph::new(2, vec![(0, 1), (0, 1)]).unwrap();
        let res = max_flow(&g, &[Fin(1), Fin(2)], 0, 1).unwrap();
        assert_eq!(res.value, Fin(3));
        assert_eq!(res.flow, vec![1, 2]);
        assert_eq!(res.cut.members(), vec![0]);
    }

    #[test]
    fn infinite_tail_does_not_matter() {
        let g = Digraph::new(3, vec![(0, 1), (1, 2)]).unwrap();
        let res = max_flow(&g, &[Fin(1), PosInf], 0, 2).unwrap();
        assert_eq!(res.value, Fin(1));
        assert_eq!(res.cut.members(), vec![0]);
    }

    #[test]
    fn unbounded_path() {
        let g = Digraph::new(3, vec![(0, 1), (1, 2)]).unwrap();
        let res = max_flow(&g, &[PosInf, PosInf], 0, 2).unwrap();
        assert_eq!(res.value, PosInf);
        assert!(res.cut.contains(2));
    }

    #[test]
    fn unit_diamond() {
        let p = diamond();
        let res = max_flow(&p.graph, &[Fin(1); 4], 0, 3).unwrap();
        assert_eq!(res.value, Fin(2));
    }

    #[test]
    fn zero_problem_is_feasible_with_zero_flow() {
        let g = Digraph::new(3, vec![(0, 1), (1, 2), (2, 0)]).unwrap();
        let p = FlowProblem::new(g, vec![Fin(0); 3], vec![Fin(0); 3], vec![0; 3], vec![true; 3]).unwrap();
        assert_eq!(find_feasible_mflow(&p).unwrap(), Feasibility::Flow(IntegralFlow::zero(3)));
    }

    #[test]
    fn single_edge_infeasible() {
        let p = single_edge(0, 1, 2);
        let expected = CutCertificate { set: vec![1], deficiency: 1 };
        assert_eq!(find_feasible_mflow(&p).unwrap(), Feasibility::Violated(expected.clone()));
        assert_eq!(most_violating_set(&p).unwrap(), expected);
    }

    #[test]
    fn diamond_feasible() {
        let p = diamond();
        match find_feasible_mflow(&p).unwrap() {
            Feasibility::Flow(z) => assert!(check_flow(&p, &z).is_valid()),
            other => panic!("expected a flow, got {other:?}"),
        }
        assert_eq!(most_violating_set(&p).unwrap(), CutCertificate { set: vec![], deficiency: 0 });
    }

    #[test]
    fn infinite_bounds_feasibility() {
        // Circulation on a triangle with f = -inf, g = 0.
        let g = Digraph::new(3, vec![(0, 1), (1, 2), (2, 0)]).unwrap();
        let p = FlowProblem::new(g, vec![NegInf; 3], vec![Fin(0); 3], vec![0; 3], vec![true; 3]).unwrap();
        match find_feasible_mflow(&p).unwrap() {
            Feasibility::Flow(z) => assert!(check_flow(&p, &z).is_valid()),
            other => panic!("expected a flow, got {other:?}"),
        }
        // Pushing 2 units through an edge with f = -inf, g = 1 is impossible.
        let g = Digraph::new(2, vec![(0, 1)]).unwrap();
        let p = FlowProblem::new(g, vec![NegInf], vec![Fin(1)], vec![-2, 2], vec![true]).unwrap();
        assert_eq!(
            find_feasible_mflow(&p).unwrap(),
            Feasibility::Violated(CutCertificate { set: vec![1], deficiency: 1 })
        );
    }

    #[test]
    fn nd_cut_examples() {
        let p = single_edge(0, 0, 2);
        let (set, value) = nd_cut_subroutine(&p, &[true], &[Fin(0)], 1).unwrap();
        assert_eq!(value, Fin(-1));
        assert_eq!(set.members(), vec![1]);
        let (set, value) = nd_cut_subroutine(&p, &[true], &[Fin(0)], 5).unwrap();
        assert_eq!(value, Fin(0));
        assert!(set.is_empty());
    }
}

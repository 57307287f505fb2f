//! Brute-force ground truth for small instances: every integral feasible
//! flow is enumerated and the answers are read off directly.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{FlowError, Result};
use crate::ext::{ExtInt, Fin, NegInf, PosInf};
use crate::graph::{decmin_compare, EdgeId, FlowProblem, IntegralFlow, NodeSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleLimits {
    pub max_edges: usize,
    pub max_box_width: i64,
    pub max_enumerations: u64,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits { max_edges: 10, max_box_width: 4, max_enumerations: 10_000_000 }
    }
}

fn finite_bounds(problem: &FlowProblem, limits: &OracleLimits) -> Result<(Vec<i64>, Vec<i64>)> {
    let m = problem.edge_count();
    if m > limits.max_edges {
        return Err(FlowError::LimitExceeded(format!("{m} edges exceed max_edges = {}", limits.max_edges)));
    }
    let mut lower = Vec::with_capacity(m);
    let mut upper = Vec::with_capacity(m);
    let mut count: u64 = 1;
    for e in 0..m {
        let (Some(f), Some(g)) = (problem.lower[e].finite(), problem.upper[e].finite()) else {
            return Err(FlowError::InfiniteBounds);
        };
        let width = g - f;
        if width > limits.max_box_width {
            return Err(FlowError::LimitExceeded(format!(
                "edge {e} has width {width} > max_box_width = {}",
                limits.max_box_width
            )));
        }
        let choices = (width.max(-1) + 1) as u64;
        count = count.saturating_mul(choices.max(1));
        if count > limits.max_enumerations {
            return Err(FlowError::LimitExceeded(format!(
                "box size exceeds max_enumerations = {}",
                limits.max_enumerations
            )));
        }
        lower.push(f);
        upper.push(g);
    }
    Ok((lower, upper))
}

struct Enumerator<'a> {
    problem: &'a FlowProblem,
    lower: Vec<i64>,
    upper: Vec<i64>,
    order: Vec<EdgeId>,
    /// Nodes whose last incident edge is the edge at this position.
    closing: Vec<Vec<usize>>,
    values: Vec<i64>,
    net_inflow: Vec<i64>,
    out: Vec<IntegralFlow>,
}

impl Enumerator<'_> {
    fn run(&mut self, pos: usize) {
        if pos == self.order.len() {
            self.out.push(IntegralFlow::new(self.values.clone()));
            return;
        }
        let e = self.order[pos];
        let (u, v) = self.problem.graph.edges()[e];
        for x in self.lower[e]..=self.upper[e] {
            self.values[e] = x;
            self.net_inflow[v] += x;
            self.net_inflow[u] -= x;
            if self.closing[pos].iter().all(|&w| self.net_inflow[w] == self.problem.supply[w]) {
                self.run(pos + 1);
            }
            self.net_inflow[v] -= x;
            self.net_inflow[u] += x;
        }
    }
}

fn enumerate_in_order(problem: &FlowProblem, limits: &OracleLimits, order: Vec<EdgeId>) -> Result<Vec<IntegralFlow>> {
    let (lower, upper) = finite_bounds(problem, limits)?;
    let n = problem.node_count();
    let mut last: Vec<Option<usize>> = vec![None; n];
    for (pos, &e) in order.iter().enumerate() {
        let (u, v) = problem.graph.edges()[e];
        last[u] = Some(pos);
        last[v] = Some(pos);
    }
    if (0..n).any(|v| last[v].is_none() && problem.supply[v] != 0) {
        return Ok(Vec::new());
    }
    let mut closing = vec![Vec::new(); order.len()];
    for (v, pos) in last.iter().enumerate() {
        if let Some(pos) = *pos {
            closing[pos].push(v);
        }
    }
    let mut en = Enumerator {
        problem,
        lower,
        upper,
        closing,
        values: vec![0; order.len()],
        net_inflow: vec![0; n],
        out: Vec::new(),
        order,
    };
    en.run(0);
    Ok(en.out)
}

/// All integral feasible m-flows, in lexicographic order of edge values.
pub fn enumerate_flows(problem: &FlowProblem, limits: &OracleLimits) -> Result<Vec<IntegralFlow>> {
    enumerate_in_order(problem, limits, (0..problem.edge_count()).collect())
}

/// Same set, assigned in reverse edge order and then sorted.
pub fn enumerate_flows_reversed(problem: &FlowProblem, limits: &OracleLimits) -> Result<Vec<IntegralFlow>> {
    let mut flows = enumerate_in_order(problem, limits, (0..problem.edge_count()).rev().collect())?;
    flows.sort_by(|a, b| a.values.cmp(&b.values));
    Ok(flows)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleOptimum {
    /// Sorted decreasingly for dec-min, increasingly for inc-max; `None`
    /// when no feasible flow exists.
    pub profile: Option<Vec<i64>>,
    pub flows: Vec<IntegralFlow>,
}

fn best_by<K: Ord>(flows: Vec<IntegralFlow>, key: impl Fn(&IntegralFlow) -> K) -> (Option<K>, Vec<IntegralFlow>) {
    let mut best: Option<K> = None;
    let mut winners = Vec::new();
    for z in flows {
        let k = key(&z);
        match best.as_ref().map(|b| k.cmp(b)) {
            Some(Ordering::Greater) => {}
            Some(Ordering::Equal) => winners.push(z),
            _ => {
                best = Some(k);
                winners = vec![z];
            }
        }
    }
    (best, winners)
}

pub fn oracle_decmin(problem: &FlowProblem, limits: &OracleLimits) -> Result<OracleOptimum> {
    let flows = enumerate_flows(problem, limits)?;
    let (profile, flows) = best_by(flows, |z| z.focus_profile(&problem.focus));
    Ok(OracleOptimum { profile, flows })
}

/// Lexicographically largest sorted-increasing focus profile.
pub fn oracle_incmax(problem: &FlowProblem, limits: &OracleLimits) -> Result<OracleOptimum> {
    let flows = enumerate_flows(problem, limits)?;
    let (key, flows) = best_by(flows, |z| {
        let mut p = z.focus_profile(&problem.focus);
        p.reverse();
        std::cmp::Reverse(p)
    });
    Ok(OracleOptimum { profile: key.map(|k| k.0), flows })
}

/// Is `z` decreasingly minimal among `flows`?
pub fn is_decmin_among(problem: &FlowProblem, z: &IntegralFlow, flows: &[IntegralFlow]) -> bool {
    let own = z.focus_profile(&problem.focus);
    flows.iter().all(|w| decmin_compare(&w.focus_profile(&problem.focus), &own) != Ok(Ordering::Less))
}

/// Smallest achievable maximum over the focus edges; `None` for an empty
/// focus set or an infeasible problem.
pub fn oracle_beta(problem: &FlowProblem, limits: &OracleLimits) -> Result<Option<i64>> {
    let flows = enumerate_flows(problem, limits)?;
    Ok(flows.iter().filter_map(|z| z.focus_profile(&problem.focus).first().copied()).min())
}

/// Smallest number of level edges at their upper bound.
pub fn oracle_min_saturated(problem: &FlowProblem, level: &[EdgeId], limits: &OracleLimits) -> Result<Option<usize>> {
    let flows = enumerate_flows(problem, limits)?;
    Ok(flows.iter().map(|z| level.iter().filter(|&&e| Fin(z.values[e]) == problem.upper[e]).count()).min())
}

/// Minimum cost over the decreasingly minimal flows.
pub fn oracle_cheapest_decmin(problem: &FlowProblem, limits: &OracleLimits) -> Result<Option<i64>> {
    let zero = vec![0; problem.edge_count()];
    let cost = problem.cost.as_deref().unwrap_or(&zero);
    let optimum = oracle_decmin(problem, limits)?;
    Ok(optimum.flows.iter().map(|z| z.cost(cost)).min())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleViolation {
    pub deficiency: ExtInt,
    /// Every subset attaining the maximum deficiency.
    pub sets: Vec<NodeSet>,
}

/// Maximum Hoffman deficiency over all `2^n` node subsets.
pub fn oracle_most_violating(problem: &FlowProblem) -> Result<OracleViolation> {
    let n = problem.node_count();
    if n > 20 {
        return Err(FlowError::LimitExceeded(format!("{n} nodes are too many for subset enumeration")));
    }
    let mut best = NegInf;
    let mut sets = Vec::new();
    for bits in 0..(1u64 << n) {
        let set = NodeSet::from_bits(n, bits);
        let d = problem.deficiency(&set)?;
        match d.cmp(&best) {
            Ordering::Greater => {
                best = d;
                sets = vec![set];
            }
            Ordering::Equal => sets.push(set),
            Ordering::Less => {}
        }
    }
    Ok(OracleViolation { deficiency: best, sets })
}

/// Replaces infinite bounds by `-window` and `window`. Used to probe
/// problems with infinite bounds at a few window sizes.
pub fn windowed(problem: &FlowProblem, window: i64) -> FlowProblem {
    let clip = |b: ExtInt| match b {
        NegInf => Fin(-window),
        PosInf => Fin(window),
        x => x,
    };
    problem
        .with_bounds(problem.lower.iter().map(|&b| clip(b)).collect(), problem.upper.iter().map(|&b| clip(b)).collect())
}

/// Window sizes used for infinite-bound cross-checks.
pub fn window_pair(base: i64) -> (i64, i64) {
    (base, 2 * base + 3)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;

    #[test]
    fn single_edge_is_forced() {
        let flows = enumerate_flows(&single_edge(0, 2, 1), &OracleLimits::default()).unwrap();
        assert_eq!(flows, vec![IntegralFlow::new(vec![1])]);
    }

    #[test]
    fn diamond_has_three_flows() {
        let flows = enumerate_flows(&diamond(), &OracleLimits::default()).unwrap();
        let values: Vec<Vec<i64>> = flows.iter().map(|z| z.values.clone()).collect();
        assert_eq!(values, vec![vec![0, 2, 0, 2], vec![1, 1, 1, 1], vec![2, 0, 2, 0]]);
        assert_eq!(enumerate_flows_reversed(&diamond(), &OracleLimits::default()).unwrap(), flows);
    }

    #[test]
    fn infeasible_gives_nothing() {
        assert!(enumerate_flows(&single_edge(0, 1, 2), &OracleLimits::default()).unwrap().is_empty());
        let opt = oracle_decmin(&single_edge(0, 1, 2), &OracleLimits::default()).unwrap();
        assert_eq!(opt.profile, None);
    }

    #[test]
    fn decmin_profiles() {
        let limits = OracleLimits::default();
        let opt = oracle_decmin(&asym(), &limits).unwrap();
        assert_eq!(opt.profile, Some(vec![2, 1]));
        assert_eq!(opt.flows, vec![IntegralFlow::new(vec![2, 1, 3])]);
        let opt = oracle_decmin(&diamond(), &limits).unwrap();
        assert_eq!(opt.profile, Some(vec![1, 1, 1, 1]));
        let empty = diamond().with_focus(vec![false; 4]);
        let opt = oracle_decmin(&empty, &limits).unwrap();
        assert_eq!(opt.profile, Some(vec![]));
        assert_eq!(opt.flows.len(), 3);
    }

    #[test]
    fn incmax_and_beta() {
        let limits = OracleLimits::default();
        assert_eq!(oracle_incmax(&diamond(), &limits).unwrap().profile, Some(vec![1, 1, 1, 1]));
        assert_eq!(oracle_incmax(&asym(), &limits).unwrap().profile, Some(vec![1, 2]));
        assert_eq!(oracle_beta(&asym(), &limits).unwrap(), Some(2));
        assert_eq!(oracle_beta(&diamond(), &limits).unwrap(), Some(1));
    }

    #[test]
    fn saturation_and_cost() {
        let limits = OracleLimits::default();
        let clamped = asym().with_bounds(asym().lower, vec![Fin(2), Fin(1), Fin(4)]);
        assert_eq!(oracle_min_saturated(&clamped, &[0], &limits).unwrap(), Some(1));
        let costed = diamond().with_cost(vec![5, 0, 0, 0]).unwrap();
        assert_eq!(oracle_cheapest_decmin(&costed, &limits).unwrap(), Some(5));
    }

    #[test]
    fn caps_are_enforced() {
        let wide = single_edge(0, 9, 1);
        assert!(matches!(enumerate_flows(&wide, &OracleLimits::default()), Err(FlowError::LimitExceeded(_))));
        let open = single_edge(0, 1, 1).with_bounds(vec![NegInf], vec![Fin(1)]);
        assert_eq!(enumerate_flows(&open, &OracleLimits::default()), Err(FlowError::InfiniteBounds));
        let tight = OracleLimits { max_enumerations: 2, ..OracleLimits::default() };
        assert!(matches!(enumerate_flows(&diamond(), &tight), Err(FlowError::LimitExceeded(_))));
    }

    #[test]
    fn brute_force_violation() {
        let v = oracle_most_violating(&single_edge(0, 1, 2)).unwrap();
        assert_eq!(v.deficiency, Fin(1));
        assert!(v.sets.contains(&NodeSet::from_members(2, [1])));
        let v = oracle_most_violating(&diamond()).unwrap();
        assert_eq!(v.deficiency, Fin(0));
    }

    #[test]
    fn windows() {
        assert_eq!(window_pair(3), (3, 9));
        let p = windowed(&single_edge(0, 1, 1).with_bounds(vec![NegInf], vec![PosInf]), 3);
        assert_eq!((p.lower[0], p.upper[0]), (Fin(-3), Fin(3)));
    }
}

//! Ceiling-based Newton-Dinkelbach search for the smallest good integer
//! `mu`, and the computation of the smallest achievable maximum flow value
//! on the focus edges.

use serde::{Deserialize, Serialize};

use crate::error::{FlowError, Result};
use crate::ext::{ExtInt, Fin};
use crate::graph::{entering_count, EdgeId, FlowProblem, NodeSet};
use crate::maxflow::{find_feasible_mflow, nd_cut_subroutine, Feasibility};

/// A maximizer of `p(X) - mu * b(X)` as reported by the oracle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NdCandidate {
    pub set: Vec<usize>,
    pub p: ExtInt,
    pub b: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NdStep {
    pub mu: i64,
    pub set: Vec<usize>,
    pub b: i64,
    pub p: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NdTrace {
    pub iterations: Vec<NdStep>,
    pub mu_min: i64,
}

impl NdTrace {
    /// `mu` strictly increases, `b` strictly decreases and the number of
    /// iterations is at most the largest `b` seen (itself at most `m_bound`).
    pub fn invariants_hold(&self, m_bound: i64) -> bool {
        let steps = &self.iterations;
        let mu_increasing =
            steps.windows(2).all(|w| w[0].mu < w[1].mu) && steps.last().is_none_or(|s| s.mu < self.mu_min);
        let b_decreasing = steps.windows(2).all(|w| w[0].b > w[1].b);
        let max_b = steps.iter().map(|s| s.b).max().unwrap_or(0);
        mu_increasing && b_decreasing && (steps.len() as i64) <= max_b && max_b <= m_bound
    }
}

fn ceil_div(p: i64, b: i64) -> i64 {
    debug_assert!(b > 0);
    let q = p.div_euclid(b);
    if p.rem_euclid(b) == 0 {
        q
    } else {
        q + 1
    }
}

/// Smallest integer `mu` with `mu * b(X) >= p(X)` for every `X`, given an
/// oracle returning a maximizer of `p(X) - mu * b(X)` for `mu >= 0`.
///
/// Requires `p(X) <= 0` whenever `b(X) = 0` and `mu = 0` to be bad.
pub fn nd_min_good_mu<O>(mut oracle: O, m_bound: i64) -> Result<(i64, NdTrace)>
where
    O: FnMut(i64) -> Result<NdCandidate>,
{
    let mut mu = 0;
    let mut candidate = oracle(mu)?;
    let mut iterations = Vec::new();
    let gain = |c: &NdCandidate, mu: i64| -> Result<Option<i64>> {
        match c.p {
            Fin(p) => Ok(Some(p - mu * c.b)),
            ExtInt::NegInf => Ok(None),
            ExtInt::PosInf => Err(FlowError::AssumptionViolated("p(X) is +inf".into())),
        }
    };
    if gain(&candidate, mu)?.is_none_or(|g| g <= 0) {
        return Err(FlowError::AssumptionViolated("mu = 0 is already good".into()));
    }
    loop {
        let p = candidate.p.finite().expect("bad mu has a finite maximizer");
        if candidate.b <= 0 {
            return Err(FlowError::AssumptionViolated("a set with b(X) = 0 has p(X) > 0, so no good mu exists".into()));
        }
        iterations.push(NdStep { mu, set: candidate.set.clone(), b: candidate.b, p });
        if iterations.len() as i64 > m_bound {
            return Err(FlowError::AssumptionViolated(format!("more than {m_bound} iterations")));
        }
        let next = ceil_div(p, candidate.b);
        candidate = oracle(next)?;
        mu = next;
        if gain(&candidate, mu)?.is_none_or(|g| g <= 0) {
            return Ok((mu, NdTrace { iterations, mu_min: mu }));
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BetaResult {
    /// Smallest achievable maximum over the remaining focus edges; `None`
    /// when every focus edge became tight during the cascade.
    pub beta: Option<i64>,
    /// Upper bounds with the focus edges clamped at `beta`.
    pub clamped_upper: Vec<ExtInt>,
    /// Focus edges whose clamped upper bound equals `beta`.
    pub level: Vec<EdgeId>,
    /// Focus edges dropped because their bounds became equal.
    pub removed_tight_edges: Vec<EdgeId>,
    /// Focus mask after the tight edges are removed.
    pub focus: Vec<bool>,
    /// Number of whole-level drops performed before the search.
    pub cascade_steps: usize,
    pub trace: Option<NdTrace>,
}

fn is_feasible(problem: &FlowProblem) -> Result<bool> {
    Ok(matches!(find_feasible_mflow(problem)?, Feasibility::Flow(_)))
}

/// Smallest `beta` such that clamping `g` at `beta` on the focus edges keeps
/// the problem feasible.
///
/// The top level `g1` is first dropped to `max(f1, g2)` while that stays
/// feasible (whole levels merge or edges become tight and leave the focus).
/// When a drop fails, the Newton-Dinkelbach search finds the smallest lift
/// `mu` above `max(f1, g2)`.
pub fn compute_beta(problem: &FlowProblem) -> Result<BetaResult> {
    if !problem.bounds_finite_on_focus() {
        return Err(FlowError::InvalidProblem("bounds must be finite on the focus edges".into()));
    }
    if let Feasibility::Violated(cert) = find_feasible_mflow(problem)? {
        return Err(FlowError::Infeasible(cert));
    }
    let m = problem.edge_count();
    let mut upper = problem.upper.clone();
    let mut focus = problem.focus.clone();
    let mut removed_tight_edges = Vec::new();
    let mut cascade_steps = 0;
    loop {
        for e in 0..m {
            if focus[e] && problem.lower[e] == upper[e] {
                focus[e] = false;
                removed_tight_edges.push(e);
            }
        }
        let focus_edges: Vec<EdgeId> = (0..m).filter(|&e| focus[e]).collect();
        if focus_edges.is_empty() {
            return Ok(BetaResult {
                beta: None,
                clamped_upper: upper,
                level: Vec::new(),
                removed_tight_edges,
                focus,
                cascade_steps,
                trace: None,
            });
        }
        let fin = |v: ExtInt| v.finite().expect("finite on focus");
        let g1 = focus_edges.iter().map(|&e| fin(upper[e])).max().expect("non-empty");
        let f1 = focus_edges.iter().map(|&e| fin(problem.lower[e])).max().expect("non-empty");
        let g2 = focus_edges.iter().map(|&e| fin(upper[e])).filter(|&g| g < g1).max();
        let level: Vec<EdgeId> = focus_edges.iter().copied().filter(|&e| upper[e] == Fin(g1)).collect();
        let beta1 = g2.map_or(f1, |g2| g2.max(f1));
        debug_assert!(beta1 < g1);

        let mut dropped = upper.clone();
        for &e in &level {
            dropped[e] = Fin(beta1);
        }
        let trial = problem.with_bounds(problem.lower.clone(), dropped.clone());
        if is_feasible(&trial)? {
            upper = dropped;
            cascade_steps += 1;
            continue;
        }

        let mut level_mask = vec![false; m];
        for &e in &level {
            level_mask[e] = true;
        }
        let m_bound = m as i64;
        let oracle = |mu: i64| -> Result<NdCandidate> {
            let (set, value) = nd_cut_subroutine(&trial, &level_mask, &dropped, mu)?;
            let p = trial.deficiency(&set)?;
            let b = entering_count(&trial.graph, &level_mask, &set) as i64;
            debug_assert_eq!(p.add_int(-mu * b).ok(), Some(-value));
            Ok(NdCandidate { set: set.members(), p, b })
        };
        let (mu_min, trace) = nd_min_good_mu(oracle, m_bound)?;
        if !trace.invariants_hold(level.len() as i64) {
            return Err(FlowError::InternalCertificateFailure(
                "Newton-Dinkelbach trace breaks its monotonicity bounds".into(),
            ));
        }
        let beta = beta1 + mu_min;
        let mut clamped_upper = upper;
        for &e in &level {
            clamped_upper[e] = Fin(beta);
        }
        return Ok(BetaResult {
            beta: Some(beta),
            clamped_upper,
            level,
            removed_tight_edges,
            focus,
            cascade_steps,
            trace: Some(trace),
        });
    }
}

/// Evaluate a set function given as a table over subsets of a small ground
/// set; used by tests and the CLI oracle.
pub fn table_oracle<'a>(
    ground: usize,
    p: &'a dyn Fn(&NodeSet) -> ExtInt,
    b: &'a dyn Fn(&NodeSet) -> i64,
) -> impl FnMut(i64) -> Result<NdCandidate> + 'a {
    move |mu| {
        let mut best: Option<(i64, NdCandidate)> = None;
        for bits in 0..(1u64 << ground) {
            let set = NodeSet::from_bits(ground, bits);
            let Fin(pv) = p(&set) else { continue };
            let bv = b(&set);
            let value = pv - mu * bv;
            if best.as_ref().is_none_or(|(v, _)| value > *v) {
                best = Some((value, NdCandidate { set: set.members(), p: Fin(pv), b: bv }));
            }
        }
        Ok(best.expect("the empty set is always evaluated").1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;
    use crate::graph::{Digraph, NodeSet};

    fn two_element_p(set: &NodeSet) -> ExtInt {
        match (set.contains(0), set.contains(1)) {
            (false, false) => Fin(0),
            (true, false) => Fin(3),
            (true, true) => Fin(4),
            (false, true) => Fin(-10),
        }
    }

    fn two_element_b(set: &NodeSet) -> i64 {
        match (set.contains(0), set.contains(1)) {
            (false, false) => 0,
            (true, false) => 2,
            (true, true) => 4,
            (false, true) => 1,
        }
    }

    #[test]
    fn two_element_ground_set() {
        let (mu, trace) = nd_min_good_mu(table_oracle(2, &two_element_p, &two_element_b), 4).unwrap();
        assert_eq!(mu, 2);
        assert_eq!(trace.iterations.iter().map(|s| s.mu).collect::<Vec<_>>(), vec![0, 1]);
        assert_eq!(trace.iterations.iter().map(|s| s.b).collect::<Vec<_>>(), vec![4, 2]);
        assert!(trace.invariants_hold(4));
    }

    #[test]
    fn single_relevant_set() {
        let p = |s: &NodeSet| if s.contains(0) { Fin(1) } else { Fin(0) };
        let b = |s: &NodeSet| if s.contains(0) { 1 } else { 0 };
        let (mu, trace) = nd_min_good_mu(table_oracle(1, &p, &b), 1).unwrap();
        assert_eq!(mu, 1);
        assert_eq!(trace.iterations.len(), 1);
    }

    #[test]
    fn assumptions_are_checked() {
        let p = |_: &NodeSet| Fin(0);
        let b = |_: &NodeSet| 1;
        assert!(matches!(nd_min_good_mu(table_oracle(1, &p, &b), 1), Err(FlowError::AssumptionViolated(_))));
        let p = |s: &NodeSet| if s.contains(0) { Fin(2) } else { Fin(0) };
        let b = |_: &NodeSet| 0;
        assert!(matches!(nd_min_good_mu(table_oracle(1, &p, &b), 1), Err(FlowError::AssumptionViolated(_))));
    }

    #[test]
    fn ceil_div_rounds_up() {
        assert_eq!(ceil_div(3, 2), 2);
        assert_eq!(ceil_div(4, 4), 1);
        assert_eq!(ceil_div(-3, 2), -1);
    }

    #[test]
    fn beta_on_asym() {
        let res = compute_beta(&asym()).unwrap();
        assert_eq!(res.beta, Some(2));
        assert_eq!(res.level, vec![0]);
        assert_eq!(res.clamped_upper[0], Fin(2));
    }

    #[test]
    fn beta_on_diamond() {
        let res = compute_beta(&diamond()).unwrap();
        assert_eq!(res.beta, Some(1));
    }

    #[test]
    fn tight_focus_edge_is_removed() {
        let p = single_edge(1, 1, 1);
        let res = compute_beta(&p).unwrap();
        assert_eq!(res.beta, None);
        assert_eq!(res.removed_tight_edges, vec![0]);

        // A tight focus edge next to a free one: beta only covers the free one.
        let g = Digraph::new(2, vec![(0, 1), (0, 1)]).unwrap();
        let p = FlowProblem::new(g, vec![Fin(3), Fin(0)], vec![Fin(3), Fin(5)], vec![-4, 4], vec![true, true]).unwrap();
        let res = compute_beta(&p).unwrap();
        assert_eq!(res.removed_tight_edges, vec![0]);
        assert_eq!(res.beta, Some(1));
    }
}

//! The reduction loop producing the narrow box `(f*, g*)` whose integral
//! m-flows are exactly the decreasingly minimal ones on the focus edges.

use serde::{Deserialize, Serialize};

use crate::error::{FlowError, Result};
use crate::existence::finitize_bounds;
use crate::ext::{ExtInt, Fin};
use crate::graph::{EdgeId, FlowProblem, IntegralFlow};
use crate::maxflow::{find_feasible_mflow, Feasibility};
use crate::mincost::min_cost_mflow;
use crate::newton_dinkelbach::{compute_beta, NdTrace};
use crate::upper_minimizer::{solve_upper_minimizer, Chain};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NarrowBox {
    pub f_star: Vec<ExtInt>,
    pub g_star: Vec<ExtInt>,
}

impl NarrowBox {
    pub fn contains(&self, z: &IntegralFlow) -> bool {
        z.within(&self.f_star, &self.g_star)
    }

    /// `0 <= g* - f* <= 1` with finite ends on every focus edge.
    pub fn is_narrow_on(&self, focus: &[bool]) -> bool {
        (0..focus.len()).filter(|&e| focus[e]).all(|e| match (self.f_star[e], self.g_star[e]) {
            (Fin(f), Fin(g)) => (0..=1).contains(&(g - f)),
            _ => false,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundBounds {
    pub lower: Vec<ExtInt>,
    pub upper: Vec<ExtInt>,
    /// Level edges entering at least one chain member.
    pub fixed_level: Vec<EdgeId>,
}

/// One pass of the reduction loop.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionRound {
    pub beta: i64,
    pub level: Vec<EdgeId>,
    pub chain: Chain,
    /// Bounds handed to the upper-minimizer (upper already clamped at beta).
    pub lower_in: Vec<ExtInt>,
    pub upper_in: Vec<ExtInt>,
    pub saturated_count: usize,
    /// Flow attaining `saturated_count`.
    pub minimizer_flow: IntegralFlow,
    pub f_prime: Vec<ExtInt>,
    pub g_prime: Vec<ExtInt>,
    pub fixed_level: Vec<EdgeId>,
    pub focus_next: Vec<bool>,
    pub removed_tight_edges: Vec<EdgeId>,
    pub trace: Option<NdTrace>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoxComputation {
    pub bounds: NarrowBox,
    pub rounds: Vec<ReductionRound>,
    /// Focus edges removed as tight, with the index of the round in which
    /// they were removed (the number of completed rounds at that point).
    pub tight_removals: Vec<(EdgeId, usize)>,
    /// The problem the loop started from, after any finitization.
    pub start: FlowProblem,
}

/// New bounds from a level value `beta`, the level set and a chain.
///
/// Level edges: `(beta, beta)` when entering two or more members, `(beta -
/// 1, beta)` when entering exactly one, `(f, f)` when leaving one, and `(f,
/// beta - 1)` otherwise. Other edges: `(g, g)` when entering a member, `(f,
/// f)` when leaving one, unchanged otherwise.
pub fn apply_round_bounds(problem: &FlowProblem, beta: i64, level: &[bool], chain: &Chain) -> Result<RoundBounds> {
    let m = problem.edge_count();
    let mut lower = problem.lower.clone();
    let mut upper = problem.upper.clone();
    let mut fixed_level = Vec::new();
    for e in 0..m {
        let (f, g) = (problem.lower[e], problem.upper[e]);
        let entered = chain.entered(&problem.graph, e);
        let left = chain.left(&problem.graph, e);
        let (nf, ng) = if level[e] {
            if entered > 0 {
                fixed_level.push(e);
            }
            match (entered, left) {
                (2.., _) => (Fin(beta), Fin(beta)),
                (1, _) => (Fin(beta - 1), Fin(beta)),
                (0, 1..) => (f, f),
                _ => (f, Fin(beta - 1)),
            }
        } else if entered > 0 {
            (g, g)
        } else if left > 0 {
            (f, f)
        } else {
            (f, g)
        };
        if (entered > 0 || left > 0) && !(nf.is_finite() && ng.is_finite()) {
            return Err(FlowError::InternalCertificateFailure(format!(
                "edge {e} crosses the chain but has an infinite bound"
            )));
        }
        lower[e] = nf;
        upper[e] = ng;
    }
    Ok(RoundBounds { lower, upper, fixed_level })
}

/// Computes `(f*, g*)` by repeated rounds: drop tight focus edges, find the
/// smallest achievable maximum `beta`, clamp, compute the saturation-minimal
/// chain for the level `{e in F : g(e) = beta}`, fix the level edges that
/// enter the chain and continue with the rest of `F`.
///
/// Infinite focus bounds are finitized first; if no decreasingly minimal
/// flow exists this fails with `NoDecMin`.
pub fn narrow_box(problem: &FlowProblem) -> Result<BoxComputation> {
    problem.validate()?;
    let start = if problem.bounds_finite_on_focus() {
        if let Feasibility::Violated(cert) = find_feasible_mflow(problem)? {
            return Err(FlowError::Infeasible(cert));
        }
        problem.clone()
    } else {
        finitize_bounds(problem)?
    };
    let m = start.edge_count();
    let mut current = start.clone();
    let mut rounds = Vec::new();
    let mut tight_removals = Vec::new();
    loop {
        let beta_result = compute_beta(&current)?;
        tight_removals.extend(beta_result.removed_tight_edges.iter().map(|&e| (e, rounds.len())));
        current.upper = beta_result.clamped_upper.clone();
        current.focus = beta_result.focus.clone();
        let Some(beta) = beta_result.beta else {
            break;
        };
        let level = beta_result.level.clone();
        let mut level_mask = vec![false; m];
        for &e in &level {
            level_mask[e] = true;
        }
        let minimizer = solve_upper_minimizer(&current, &level)?;
        if minimizer.saturated_count == 0 {
            return Err(FlowError::InternalCertificateFailure(format!(
                "beta = {beta} is not minimal: a flow avoids it on every level edge"
            )));
        }
        let bounds = apply_round_bounds(&current, beta, &level_mask, &minimizer.chain)?;
        if bounds.fixed_level.is_empty() {
            return Err(FlowError::InternalCertificateFailure("no level edge enters the chain".into()));
        }
        let mut focus_next = current.focus.clone();
        for &e in &bounds.fixed_level {
            focus_next[e] = false;
        }
        rounds.push(ReductionRound {
            beta,
            level,
            chain: minimizer.chain,
            lower_in: current.lower.clone(),
            upper_in: current.upper.clone(),
            saturated_count: minimizer.saturated_count,
            minimizer_flow: minimizer.flow,
            f_prime: bounds.lower.clone(),
            g_prime: bounds.upper.clone(),
            fixed_level: bounds.fixed_level,
            focus_next: focus_next.clone(),
            removed_tight_edges: beta_result.removed_tight_edges,
            trace: beta_result.trace,
        });
        current.lower = bounds.lower;
        current.upper = bounds.upper;
        current.focus = focus_next;
    }
    let bounds = NarrowBox { f_star: current.lower, g_star: current.upper };
    if !bounds.is_narrow_on(&problem.focus) {
        return Err(FlowError::InternalCertificateFailure("box is not narrow on F".into()));
    }
    Ok(BoxComputation { bounds, rounds, tight_removals, start })
}

fn box_problem(problem: &FlowProblem, bounds: &NarrowBox) -> FlowProblem {
    problem.with_bounds(bounds.f_star.clone(), bounds.g_star.clone())
}

/// Some integral m-flow that is decreasingly minimal on the focus edges.
pub fn decmin_flow(problem: &FlowProblem) -> Result<IntegralFlow> {
    let computation = narrow_box(problem)?;
    match find_feasible_mflow(&box_problem(problem, &computation.bounds))? {
        Feasibility::Flow(z) => Ok(z),
        Feasibility::Violated(cert) => Err(FlowError::Infeasible(cert)),
    }
}

/// Cheapest decreasingly minimal flow for the problem's costs (zero when
/// absent): a minimum-cost flow inside the narrow box.
pub fn cheapest_decmin_flow(problem: &FlowProblem) -> Result<IntegralFlow> {
    let computation = narrow_box(problem)?;
    min_cost_mflow(&box_problem(problem, &computation.bounds))
}

/// Increasingly maximal flow on the focus edges: the negation of a
/// decreasingly minimal flow of the negated problem.
pub fn incmax_flow(problem: &FlowProblem) -> Result<IntegralFlow> {
    Ok(decmin_flow(&problem.negated())?.negated())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;
    use crate::graph::{check_flow, Digraph, NodeSet};

    #[test]
    fn empty_focus_keeps_bounds() {
        let p = diamond().with_focus(vec![false; 4]);
        let res = narrow_box(&p).unwrap();
        assert_eq!(res.bounds.f_star, p.lower);
        assert_eq!(res.bounds.g_star, p.upper);
        assert!(res.rounds.is_empty());
    }

    #[test]
    fn asym_box_pins_the_flow() {
        let p = asym();
        let res = narrow_box(&p).unwrap();
        assert!(res.bounds.is_narrow_on(&p.focus));
        assert!(res.bounds.contains(&IntegralFlow::new(vec![2, 1, 3])));
        assert!(!res.bounds.contains(&IntegralFlow::new(vec![3, 0, 3])));
        assert_eq!(decmin_flow(&p).unwrap().values, vec![2, 1, 3]);
    }

    #[test]
    fn diamond_profile() {
        let p = diamond();
        let z = decmin_flow(&p).unwrap();
        assert_eq!(z.focus_profile(&p.focus), vec![1, 1, 1, 1]);
        let z = incmax_flow(&p).unwrap();
        assert_eq!(z.focus_profile(&p.focus), vec![1, 1, 1, 1]);
    }

    #[test]
    fn zero_supply_unit_boxes_give_zero_flow() {
        let g = Digraph::new(3, vec![(0, 1), (1, 2), (2, 0), (0, 2)]).unwrap();
        let p = FlowProblem::new(g, vec![Fin(0); 4], vec![Fin(1); 4], vec![0; 3], vec![true; 4]).unwrap();
        assert_eq!(decmin_flow(&p).unwrap(), IntegralFlow::zero(4));
    }

    #[test]
    fn cheapest_on_diamond() {
        let p = diamond().with_cost(vec![5, 0, 0, 0]).unwrap();
        let z = cheapest_decmin_flow(&p).unwrap();
        assert!(check_flow(&p, &z).is_valid());
        assert_eq!(z.values, vec![1, 1, 1, 1]);
        let p = asym().with_cost(vec![-3, 3, 1]).unwrap();
        assert_eq!(cheapest_decmin_flow(&p).unwrap().values, vec![2, 1, 3]);
    }

    #[test]
    fn round_bounds_cases() {
        // Path 0 -> 1 -> 2 with chain {1, 2} ⊃ {2}.
        let g = Digraph::new(3, vec![(0, 1), (1, 2), (0, 2), (2, 0)]).unwrap();
        let p = FlowProblem::new(
            g,
            vec![Fin(0); 4],
            vec![Fin(3), Fin(3), Fin(3), Fin(5)],
            vec![0; 3],
            vec![true, true, true, false],
        )
        .unwrap();
        let chain = Chain { sets: vec![NodeSet::from_members(3, [1, 2]), NodeSet::from_members(3, [2])] };
        let level = vec![true, true, true, false];
        let rb = apply_round_bounds(&p, 3, &level, &chain).unwrap();
        // e0 enters V1 only, e1 enters V2 only, e2 enters both, e3 leaves both.
        assert_eq!(rb.lower, vec![Fin(2), Fin(2), Fin(3), Fin(0)]);
        assert_eq!(rb.upper, vec![Fin(3), Fin(3), Fin(3), Fin(0)]);
        assert_eq!(rb.fixed_level, vec![0, 1, 2]);

        let rb = apply_round_bounds(&p, 3, &level, &Chain::empty()).unwrap();
        assert_eq!(rb.upper, vec![Fin(2), Fin(2), Fin(2), Fin(5)]);
        assert!(rb.fixed_level.is_empty());
    }
}

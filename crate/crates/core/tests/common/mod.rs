//! Seeded random instances for the integration suites.
#![allow(dead_code)]

use fairflow::{Digraph, ExtInt, Fin, FlowProblem, IntegralFlow, NegInf, PosInf};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, Copy)]
pub struct Shape {
    pub max_nodes: usize,
    pub max_edges: usize,
    pub max_width: i64,
}

pub const SMALL: Shape = Shape { max_nodes: 5, max_edges: 8, max_width: 3 };

fn random_focus<R: Rng>(rng: &mut R, m: usize) -> Vec<bool> {
    match rng.gen_range(0..10) {
        0 => vec![false; m],
        1 => vec![true; m],
        _ => (0..m).map(|_| rng.gen_bool(0.6)).collect(),
    }
}

fn random_edges<R: Rng>(rng: &mut R, n: usize, m: usize) -> Vec<(usize, usize)> {
    (0..m)
        .map(|_| {
            let u = rng.gen_range(0..n);
            let mut v = rng.gen_range(0..n);
            // Loops are allowed but rare.
            if v == u && rng.gen_bool(0.8) {
                v = (u + 1 + rng.gen_range(0..n - 1)) % n;
            }
            (u, v)
        })
        .collect()
}

fn supply_of(n: usize, edges: &[(usize, usize)], z: &[i64]) -> Vec<i64> {
    let mut supply = vec![0; n];
    for (&(u, v), &x) in edges.iter().zip(z) {
        supply[v] += x;
        supply[u] -= x;
    }
    supply
}

/// Feasible instance with finite bounds: the supply is read off a random
/// flow inside the box.
pub fn feasible_instance<R: Rng>(rng: &mut R, shape: Shape) -> FlowProblem {
    let n = rng.gen_range(2..=shape.max_nodes);
    let m = rng.gen_range(1..=shape.max_edges);
    let edges = random_edges(rng, n, m);
    let lower: Vec<i64> = (0..m).map(|_| rng.gen_range(-2..=2)).collect();
    let upper: Vec<i64> = lower.iter().map(|&f| f + rng.gen_range(0..=shape.max_width)).collect();
    let z: Vec<i64> = lower.iter().zip(&upper).map(|(&f, &g)| rng.gen_range(f..=g)).collect();
    let supply = supply_of(n, &edges, &z);
    let focus = random_focus(rng, m);
    FlowProblem::new(
        Digraph::new(n, edges).unwrap(),
        lower.into_iter().map(Fin).collect(),
        upper.into_iter().map(Fin).collect(),
        supply,
        focus,
    )
    .unwrap()
}

pub fn with_random_costs<R: Rng>(rng: &mut R, problem: FlowProblem) -> FlowProblem {
    let costs = (0..problem.edge_count()).map(|_| rng.gen_range(-3..=3)).collect();
    problem.with_cost(costs).unwrap()
}

/// Instance that may be infeasible: arbitrary supply summing to zero and
/// occasional infinite bounds.
pub fn arbitrary_instance<R: Rng>(rng: &mut R, max_nodes: usize, max_edges: usize) -> FlowProblem {
    let n = rng.gen_range(1..=max_nodes);
    let m = rng.gen_range(0..=max_edges);
    let edges = if n == 1 { vec![(0, 0); m] } else { random_edges(rng, n, m) };
    let mut lower = Vec::with_capacity(m);
    let mut upper = Vec::with_capacity(m);
    for _ in 0..m {
        let f = rng.gen_range(-2..=2);
        let g = f + rng.gen_range(0..=3);
        lower.push(if rng.gen_bool(0.1) { NegInf } else { Fin(f) });
        upper.push(if rng.gen_bool(0.1) { PosInf } else { Fin(g) });
    }
    let mut supply: Vec<i64> = (0..n).map(|_| rng.gen_range(-3..=3)).collect();
    let total: i64 = supply.iter().sum();
    supply[0] -= total;
    let focus = random_focus(rng, m);
    FlowProblem::new(Digraph::new(n, edges).unwrap(), lower, upper, supply, focus).unwrap()
}

/// Feasible instance where some bounds are infinite. Finite values stay
/// in `[-1, 2]` so a feasible flow lies inside small windows.
pub fn infinite_instance<R: Rng>(rng: &mut R) -> FlowProblem {
    let n = rng.gen_range(2..=4);
    let m = rng.gen_range(2..=5);
    let edges = random_edges(rng, n, m);
    let mut lower = Vec::with_capacity(m);
    let mut upper = Vec::with_capacity(m);
    let mut z = Vec::with_capacity(m);
    let mut infinite = 0;
    for _ in 0..m {
        let f = rng.gen_range(-1..=0);
        let g = f + rng.gen_range(0..=2);
        z.push(rng.gen_range(f..=g));
        let open_low = infinite < 2 && rng.gen_bool(0.3);
        infinite += open_low as usize;
        let open_high = infinite < 2 && rng.gen_bool(0.3);
        infinite += open_high as usize;
        lower.push(if open_low { NegInf } else { Fin(f) });
        upper.push(if open_high { PosInf } else { Fin(g) });
    }
    let supply = supply_of(n, &edges, &z);
    let focus = random_focus(rng, m);
    FlowProblem::new(Digraph::new(n, edges).unwrap(), lower, upper, supply, focus).unwrap()
}

/// The 3-cycle with `f = -inf`, `g = 0`, `m = 0` and every edge in focus.
pub fn triangle() -> FlowProblem {
    FlowProblem::new(
        Digraph::new(3, vec![(0, 1), (1, 2), (2, 0)]).unwrap(),
        vec![NegInf; 3],
        vec![Fin(0); 3],
        vec![0; 3],
        vec![true; 3],
    )
    .unwrap()
}

pub fn values(flows: &[IntegralFlow]) -> Vec<Vec<i64>> {
    let mut v: Vec<Vec<i64>> = flows.iter().map(|z| z.values.clone()).collect();
    v.sort();
    v
}

pub fn ext(v: &[i64]) -> Vec<ExtInt> {
    v.iter().map(|&x| Fin(x)).collect()
}

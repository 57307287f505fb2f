//! Label-correcting shortest paths over an ordered abelian group, with
//! negative di-circuit extraction from predecessor links.

use std::cmp::Ordering;
use std::ops::Add;

/// Lexicographically ordered integer vector. `Ord` on `Vec` is already
/// lexicographic; this adds componentwise addition.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LexVec(pub Vec<i64>);

impl LexVec {
    pub fn zero(dim: usize) -> Self {
        LexVec(vec![0; dim])
    }

    pub fn unit(dim: usize, index: usize, sign: i64) -> Self {
        let mut v = vec![0; dim];
        v[index] = sign;
        LexVec(v)
    }

    pub fn is_negative(&self) -> bool {
        self.0.iter().find(|&&x| x != 0).is_some_and(|&x| x < 0)
    }
}

impl Add for &LexVec {
    type Output = LexVec;

    fn add(self, rhs: &LexVec) -> LexVec {
        LexVec(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

/// Shortest distances from a virtual root joined to every node by a zero
/// arc. Returns the distances, or the arc indices of a negative di-circuit
/// (in traversal order) when one exists.
///
/// Passes scan arcs in index order, so the output is deterministic.
pub fn shortest_from_virtual_root<C, F, A>(
    node_count: usize,
    arcs: &[(usize, usize)],
    cost: F,
    zero: C,
    add: A,
) -> Result<Vec<C>, Vec<usize>>
where
    C: Clone + Ord,
    F: Fn(usize) -> C,
    A: Fn(&C, &C) -> C,
{
    let mut dist = vec![zero; node_count];
    let mut pred: Vec<Option<usize>> = vec![None; node_count];
    // With the virtual root, shortest paths use at most node_count - 1 real
    // arcs; a relaxation in pass node_count proves a negative circuit.
    for pass in 0..=node_count {
        let mut last_relaxed = None;
        for (a, &(u, v)) in arcs.iter().enumerate() {
            let candidate = add(&dist[u], &cost(a));
            if candidate.cmp(&dist[v]) == Ordering::Less {
                dist[v] = candidate;
                pred[v] = Some(a);
                last_relaxed = Some(v);
            }
        }
        match last_relaxed {
            None => return Ok(dist),
            Some(v) if pass == node_count => return Err(extract_cycle(arcs, &pred, v)),
            Some(_) => {}
        }
    }
    unreachable!("loop returns on its final pass")
}

fn extract_cycle(arcs: &[(usize, usize)], pred: &[Option<usize>], start: usize) -> Vec<usize> {
    let n = pred.len();
    let mut v = start;
    for _ in 0..n {
        v = arcs[pred[v].expect("relaxed node has a predecessor")].0;
    }
    let anchor = v;
    let mut cycle = Vec::new();
    loop {
        let a = pred[v].expect("cycle node has a predecessor");
        cycle.push(a);
        v = arcs[a].0;
        if v == anchor {
            break;
        }
    }
    cycle.reverse();
    cycle
}

/// Scalar convenience wrapper.
pub fn scalar_shortest(node_count: usize, arcs: &[(usize, usize)], cost: &[i64]) -> Result<Vec<i64>, Vec<usize>> {
    shortest_from_virtual_root(node_count, arcs, |a| cost[a], 0i64, |x, y| x + y)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn is_circuit(arcs: &[(usize, usize)], cycle: &[usize]) -> bool {
        !cycle.is_empty() && cycle.iter().zip(cycle.iter().cycle().skip(1)).all(|(&a, &b)| arcs[a].1 == arcs[b].0)
    }

    #[test]
    fn distances_without_cycles() {
        let arcs = [(0, 1), (1, 2), (0, 2)];
        let dist = scalar_shortest(3, &arcs, &[-1, -1, 5]).unwrap();
        assert_eq!(dist, vec![0, -1, -2]);
    }

    #[test]
    fn finds_two_cycle() {
        let arcs = [(0, 1), (1, 0)];
        let cycle = scalar_shortest(2, &arcs, &[1, -2]).unwrap_err();
        assert!(is_circuit(&arcs, &cycle));
        let mut sorted = cycle.clone();
        sorted.sort();
        assert_eq!(sorted, vec![0, 1]);
    }

    #[test]
    fn finds_cycle_behind_a_tail() {
        let arcs = [(0, 1), (1, 2), (2, 3), (3, 1)];
        let cost = [0, 1, 1, -3];
        let cycle = scalar_shortest(4, &arcs, &cost).unwrap_err();
        assert!(is_circuit(&arcs, &cycle));
        assert!(cycle.iter().map(|&a| cost[a]).sum::<i64>() < 0);
    }

    #[test]
    fn lexicographic_labels() {
        // Cycle 0->1->0 with costs (1,-5) and (-1, 0): total (0,-5) < 0.
        let arcs = [(0, 1), (1, 0)];
        let costs = [LexVec(vec![1, -5]), LexVec(vec![-1, 0])];
        let res = shortest_from_virtual_root(2, &arcs, |a| costs[a].clone(), LexVec::zero(2), |x, y| x + y);
        assert!(res.is_err());
        // Costs (1,-5) and (-1, 6): total (0, 1) >= 0.
        let costs = [LexVec(vec![1, -5]), LexVec(vec![-1, 6])];
        let res = shortest_from_virtual_root(2, &arcs, |a| costs[a].clone(), LexVec::zero(2), |x, y| x + y);
        assert!(res.is_ok());
    }

    #[test]
    fn lexvec_sign() {
        assert!(LexVec(vec![0, -1, 5]).is_negative());
        assert!(!LexVec(vec![0, 0]).is_negative());
        assert!(!LexVec(vec![1, -9]).is_negative());
    }
}

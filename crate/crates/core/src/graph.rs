//! Digraphs, bounded flow problems, boundary functionals and the residual
//! (auxiliary) digraph of a feasible flow.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{FlowError, Result};
use crate::ext::{ext_sum, ExtInt, Fin, NegInf, PosInf};

pub type NodeId = usize;
pub type EdgeId = usize;

/// Directed multigraph. Parallel edges and self-loops are distinct edges.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Digraph {
    node_count: usize,
    edges: Vec<(NodeId, NodeId)>,
}

impl Digraph {
    pub fn new(node_count: usize, edges: Vec<(NodeId, NodeId)>) -> Result<Self> {
        if node_count == 0 {
            return Err(FlowError::InvalidProblem("digraph needs at least one node".into()));
        }
        if let Some((i, _)) = edges.iter().enumerate().find(|(_, &(u, v))| u >= node_count || v >= node_count) {
            return Err(FlowError::InvalidProblem(format!("edge {i} has an endpoint outside 0..{node_count}")));
        }
        Ok(Digraph { node_count, edges })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    pub fn tail(&self, e: EdgeId) -> NodeId {
        self.edges[e].0
    }

    pub fn head(&self, e: EdgeId) -> NodeId {
        self.edges[e].1
    }

    /// Does `e` enter `set` (head inside, tail outside)?
    pub fn enters(&self, e: EdgeId, set: &NodeSet) -> bool {
        let (u, v) = self.edges[e];
        !set.contains(u) && set.contains(v)
    }

    pub fn leaves(&self, e: EdgeId, set: &NodeSet) -> bool {
        let (u, v) = self.edges[e];
        set.contains(u) && !set.contains(v)
    }

    pub fn entering<'a>(&'a self, set: &'a NodeSet) -> impl Iterator<Item = EdgeId> + 'a {
        (0..self.edges.len()).filter(move |&e| self.enters(e, set))
    }

    pub fn leaving<'a>(&'a self, set: &'a NodeSet) -> impl Iterator<Item = EdgeId> + 'a {
        (0..self.edges.len()).filter(move |&e| self.leaves(e, set))
    }
}

/// A subset of the nodes, stored as a membership mask.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeSet {
    mask: Vec<bool>,
}

impl NodeSet {
    pub fn empty(node_count: usize) -> Self {
        NodeSet { mask: vec![false; node_count] }
    }

    pub fn full(node_count: usize) -> Self {
        NodeSet { mask: vec![true; node_count] }
    }

    pub fn from_mask(mask: Vec<bool>) -> Self {
        NodeSet { mask }
    }

    pub fn from_members<I: IntoIterator<Item = NodeId>>(node_count: usize, members: I) -> Self {
        let mut set = NodeSet::empty(node_count);
        for v in members {
            set.mask[v] = true;
        }
        set
    }

    /// The subset encoded by the low `node_count` bits of `bits`.
    pub fn from_bits(node_count: usize, bits: u64) -> Self {
        NodeSet { mask: (0..node_count).map(|v| bits >> v & 1 == 1).collect() }
    }

    pub fn node_count(&self) -> usize {
        self.mask.len()
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.mask[v]
    }

    pub fn insert(&mut self, v: NodeId) {
        self.mask[v] = true;
    }

    pub fn len(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.mask.iter().any(|&b| b)
    }

    pub fn is_full(&self) -> bool {
        self.mask.iter().all(|&b| b)
    }

    pub fn members(&self) -> Vec<NodeId> {
        (0..self.mask.len()).filter(|&v| self.mask[v]).collect()
    }

    pub fn complement(&self) -> NodeSet {
        NodeSet { mask: self.mask.iter().map(|b| !b).collect() }
    }

    pub fn is_subset_of(&self, other: &NodeSet) -> bool {
        self.mask.iter().zip(&other.mask).all(|(&a, &b)| !a || b)
    }
}

/// Digraph with bounds `lower <= x <= upper`, node supplies `m` (net inflow
/// required at each node), a focus edge set `F` and optional integer costs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowProblem {
    pub graph: Digraph,
    pub lower: Vec<ExtInt>,
    pub upper: Vec<ExtInt>,
    pub supply: Vec<i64>,
    pub focus: Vec<bool>,
    pub cost: Option<Vec<i64>>,
}

impl FlowProblem {
    pub fn new(
        graph: Digraph,
        lower: Vec<ExtInt>,
        upper: Vec<ExtInt>,
        supply: Vec<i64>,
        focus: Vec<bool>,
    ) -> Result<Self> {
        let problem = FlowProblem { graph, lower, upper, supply, focus, cost: None };
        problem.validate()?;
        Ok(problem)
    }

    pub fn with_cost(mut self, cost: Vec<i64>) -> Result<Self> {
        if cost.len() != self.edge_count() {
            return Err(FlowError::SizeMismatch { left: cost.len(), right: self.edge_count() });
        }
        self.cost = Some(cost);
        Ok(self)
    }

    /// Same digraph, supplies, focus and costs with new bounds.
    pub fn with_bounds(&self, lower: Vec<ExtInt>, upper: Vec<ExtInt>) -> FlowProblem {
        FlowProblem { lower, upper, ..self.clone() }
    }

    pub fn with_focus(&self, focus: Vec<bool>) -> FlowProblem {
        FlowProblem { focus, ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.edge_count();
        for (name, len) in [("lower", self.lower.len()), ("upper", self.upper.len()), ("focus", self.focus.len())] {
            if len != m {
                return Err(FlowError::InvalidProblem(format!("{name} has {len} entries for {m} edges")));
            }
        }
        if self.supply.len() != self.node_count() {
            return Err(FlowError::InvalidProblem(format!(
                "supply has {} entries for {} nodes",
                self.supply.len(),
                self.node_count()
            )));
        }
        for e in 0..m {
            if self.lower[e] == PosInf || self.upper[e] == NegInf {
                return Err(FlowError::InvalidProblem(format!("edge {e} has an impossible bound")));
            }
            if self.lower[e] > self.upper[e] {
                return Err(FlowError::InvalidProblem(format!("edge {e} has lower > upper")));
            }
        }
        let total = self.supply.iter().try_fold(0i64, |acc, &v| acc.checked_add(v)).ok_or(FlowError::Overflow)?;
        if total != 0 {
            return Err(FlowError::InvalidProblem(format!("supplies sum to {total}, not 0")));
        }
        Ok(())
    }

    pub fn node_count(&self) -> usize {
        self.graph.node_count()
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }

    pub fn focus_edges(&self) -> Vec<EdgeId> {
        (0..self.edge_count()).filter(|&e| self.focus[e]).collect()
    }

    pub fn is_tight(&self, e: EdgeId) -> bool {
        self.lower[e] == self.upper[e]
    }

    pub fn bounds_finite_on_focus(&self) -> bool {
        self.focus_edges().into_iter().all(|e| self.lower[e].is_finite() && self.upper[e].is_finite())
    }

    /// `m~(Z)`, total supply of a node set.
    pub fn supply_of(&self, set: &NodeSet) -> Result<i64> {
        set.members().into_iter().try_fold(0i64, |acc, v| acc.checked_add(self.supply[v])).ok_or(FlowError::Overflow)
    }

    /// Hoffman deficiency `m~(Z) - rho_g(Z) + delta_f(Z)`; positive iff `Z`
    /// violates the Hoffman condition.
    pub fn deficiency(&self, set: &NodeSet) -> Result<ExtInt> {
        let (rho_g, _) = boundary_sums(&self.graph, &self.upper, set)?;
        let (_, delta_f) = boundary_sums(&self.graph, &self.lower, set)?;
        ext_sum([Fin(self.supply_of(set)?), -rho_g, delta_f])
    }

    /// Problem with every edge value negated: `(-g, -f)` bounds and `-m`.
    pub fn negated(&self) -> FlowProblem {
        FlowProblem {
            graph: self.graph.clone(),
            lower: self.upper.iter().map(|&b| -b).collect(),
            upper: self.lower.iter().map(|&b| -b).collect(),
            supply: self.supply.iter().map(|&v| -v).collect(),
            focus: self.focus.clone(),
            cost: self.cost.as_ref().map(|c| c.iter().map(|&v| -v).collect()),
        }
    }
}

/// Integer value on every edge.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IntegralFlow {
    pub values: Vec<i64>,
}

impl IntegralFlow {
    pub fn new(values: Vec<i64>) -> Self {
        IntegralFlow { values }
    }

    pub fn zero(edge_count: usize) -> Self {
        IntegralFlow { values: vec![0; edge_count] }
    }

    pub fn as_ext(&self) -> Vec<ExtInt> {
        self.values.iter().map(|&v| Fin(v)).collect()
    }

    /// Values on the focus edges, sorted decreasingly.
    pub fn focus_profile(&self, focus: &[bool]) -> Vec<i64> {
        let mut profile: Vec<i64> = self.values.iter().zip(focus).filter(|(_, &inf)| inf).map(|(&v, _)| v).collect();
        profile.sort_unstable_by(|a, b| b.cmp(a));
        profile
    }

    pub fn cost(&self, cost: &[i64]) -> i64 {
        self.values.iter().zip(cost).map(|(&v, &c)| v * c).sum()
    }

    pub fn negated(&self) -> IntegralFlow {
        IntegralFlow { values: self.values.iter().map(|&v| -v).collect() }
    }

    /// Does the flow lie in the box `[lower, upper]`?
    pub fn within(&self, lower: &[ExtInt], upper: &[ExtInt]) -> bool {
        self.values.iter().enumerate().all(|(e, &v)| lower[e] <= Fin(v) && Fin(v) <= upper[e])
    }
}

/// Total value on edges entering and leaving `set`: `(rho(Z), delta(Z))`.
/// Self-loops never cross a cut.
pub fn boundary_sums(graph: &Digraph, values: &[ExtInt], set: &NodeSet) -> Result<(ExtInt, ExtInt)> {
    let inflow = ext_sum(graph.entering(set).map(|e| values[e]))?;
    let outflow = ext_sum(graph.leaving(set).map(|e| values[e]))?;
    Ok((inflow, outflow))
}

/// Number of edges of `subset` entering `set`.
pub fn entering_count(graph: &Digraph, subset: &[bool], set: &NodeSet) -> usize {
    graph.entering(set).filter(|&e| subset[e]).count()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FlowViolation {
    Length { expected: usize, found: usize },
    Bound { edge: EdgeId, value: i64 },
    Conservation { node: NodeId, net_inflow: i64, required: i64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FlowCheck {
    Valid,
    Violation(FlowViolation),
}

impl FlowCheck {
    pub fn is_valid(&self) -> bool {
        matches!(self, FlowCheck::Valid)
    }
}

/// Check bounds (edges in id order) and then conservation (nodes in id
/// order), reporting the first violation.
pub fn check_flow(problem: &FlowProblem, z: &IntegralFlow) -> FlowCheck {
    let m = problem.edge_count();
    if z.values.len() != m {
        return FlowCheck::Violation(FlowViolation::Length { expected: m, found: z.values.len() });
    }
    for e in 0..m {
        let v = Fin(z.values[e]);
        if v < problem.lower[e] || v > problem.upper[e] {
            return FlowCheck::Violation(FlowViolation::Bound { edge: e, value: z.values[e] });
        }
    }
    let mut net = vec![0i128; problem.node_count()];
    for (e, &(u, v)) in problem.graph.edges().iter().enumerate() {
        net[v] += z.values[e] as i128;
        net[u] -= z.values[e] as i128;
    }
    for (node, &required) in problem.supply.iter().enumerate() {
        if net[node] != required as i128 {
            return FlowCheck::Violation(FlowViolation::Conservation {
                node,
                net_inflow: net[node].clamp(i64::MIN as i128, i64::MAX as i128) as i64,
                required,
            });
        }
    }
    FlowCheck::Valid
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Backward,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuxArc {
    pub tail: NodeId,
    pub head: NodeId,
    pub direction: Direction,
    pub origin: EdgeId,
    pub in_focus: bool,
}

/// Residual digraph of a feasible flow: forward arc `uv` where `z < g`,
/// backward arc `vu` where `z > f`. Arcs are listed per origin edge in id
/// order, forward before backward.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuxDigraph {
    pub node_count: usize,
    pub arcs: Vec<AuxArc>,
}

impl AuxDigraph {
    pub fn focus_forward(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.arcs.len()).filter(|&a| self.arcs[a].in_focus && self.arcs[a].direction == Direction::Forward)
    }

    pub fn focus_backward(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.arcs.len()).filter(|&a| self.arcs[a].in_focus && self.arcs[a].direction == Direction::Backward)
    }
}

pub fn build_aux_digraph(problem: &FlowProblem, z: &IntegralFlow) -> AuxDigraph {
    let mut arcs = Vec::new();
    for (e, &(u, v)) in problem.graph.edges().iter().enumerate() {
        let value = Fin(z.values[e]);
        let in_focus = problem.focus[e];
        if value < problem.upper[e] {
            arcs.push(AuxArc { tail: u, head: v, direction: Direction::Forward, origin: e, in_focus });
        }
        if value > problem.lower[e] {
            arcs.push(AuxArc { tail: v, head: u, direction: Direction::Backward, origin: e, in_focus });
        }
    }
    AuxDigraph { node_count: problem.node_count(), arcs }
}

/// Compare two multisets in decreasing-sorted lexicographic order. `Less`
/// means `a` is decreasingly smaller.
pub fn decmin_compare(a: &[i64], b: &[i64]) -> Result<Ordering> {
    if a.len() != b.len() {
        return Err(FlowError::SizeMismatch { left: a.len(), right: b.len() });
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_unstable_by(|x, y| y.cmp(x));
    b.sort_unstable_by(|x, y| y.cmp(x));
    Ok(a.cmp(&b))
}

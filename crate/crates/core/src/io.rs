//! JSON problem files, result documents and the per-round CSV report.

use serde::{Deserialize, Serialize};

use crate::decmin::BoxComputation;
use crate::error::{FlowError, Result};
use crate::existence::InfinityArc;
use crate::ext::{ExtInt, NegInf, PosInf};
use crate::graph::{AuxArc, Digraph, FlowProblem, IntegralFlow};
use crate::newton_dinkelbach::NdTrace;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeSpec {
    pub tail: usize,
    pub head: usize,
    pub lower: ExtInt,
    pub upper: ExtInt,
    #[serde(rename = "inF")]
    pub in_focus: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cost: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProblemFile {
    pub nodes: usize,
    pub supply: Vec<i64>,
    pub edges: Vec<EdgeSpec>,
}

fn bad(field: String, message: impl std::fmt::Display) -> FlowError {
    FlowError::InvalidProblem(format!("{field}: {message}"))
}

impl ProblemFile {
    pub fn parse(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|err| {
            let path = err.path().to_string();
            bad(if path == "." { "document".into() } else { path }, err.into_inner())
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("problem files always serialize")
    }

    /// Checks the file and builds the problem; errors name the first bad
    /// field.
    pub fn to_problem(&self) -> Result<FlowProblem> {
        let n = self.nodes;
        if self.supply.len() != n {
            return Err(bad("supply".into(), format!("expected {n} entries, found {}", self.supply.len())));
        }
        for (i, e) in self.edges.iter().enumerate() {
            if e.tail >= n {
                return Err(bad(format!("edges[{i}].tail"), format!("node {} out of range", e.tail)));
            }
            if e.head >= n {
                return Err(bad(format!("edges[{i}].head"), format!("node {} out of range", e.head)));
            }
            if e.lower == PosInf {
                return Err(bad(format!("edges[{i}].lower"), "\"+inf\" is not a lower bound"));
            }
            if e.upper == NegInf {
                return Err(bad(format!("edges[{i}].upper"), "\"-inf\" is not an upper bound"));
            }
            if e.lower > e.upper {
                return Err(bad(format!("edges[{i}].lower"), "exceeds the upper bound"));
            }
        }
        let total = self.supply.iter().try_fold(0i64, |acc, &m| acc.checked_add(m)).ok_or(FlowError::Overflow)?;
        if total != 0 {
            return Err(bad("supply".into(), format!("sums to {total}, expected 0")));
        }
        let graph = Digraph::new(n, self.edges.iter().map(|e| (e.tail, e.head)).collect())?;
        let problem = FlowProblem::new(
            graph,
            self.edges.iter().map(|e| e.lower).collect(),
            self.edges.iter().map(|e| e.upper).collect(),
            self.supply.clone(),
            self.edges.iter().map(|e| e.in_focus).collect(),
        )?;
        if self.edges.iter().any(|e| e.cost.is_some()) {
            problem.with_cost(self.edges.iter().map(|e| e.cost.unwrap_or(0)).collect())
        } else {
            Ok(problem)
        }
    }

    pub fn from_problem(problem: &FlowProblem) -> Self {
        let edges = problem
            .graph
            .edges()
            .iter()
            .enumerate()
            .map(|(e, &(tail, head))| EdgeSpec {
                tail,
                head,
                lower: problem.lower[e],
                upper: problem.upper[e],
                in_focus: problem.focus[e],
                cost: problem.cost.as_ref().map(|c| c[e]),
            })
            .collect();
        ProblemFile { nodes: problem.node_count(), supply: problem.supply.clone(), edges }
    }
}

pub fn parse_problem(text: &str) -> Result<FlowProblem> {
    ProblemFile::parse(text)?.to_problem()
}

/// A flow file: `{"values": [...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlowFile {
    pub values: Vec<i64>,
}

pub fn parse_flow(text: &str) -> Result<IntegralFlow> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let file: FlowFile = serde_path_to_error::deserialize(de).map_err(|err| {
        let path = err.path().to_string();
        bad(if path == "." { "document".into() } else { path }, err.into_inner())
    })?;
    Ok(IntegralFlow::new(file.values))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    #[default]
    Ok,
    Infeasible,
    NoDecmin,
    Error,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundSummary {
    pub round: usize,
    pub beta: i64,
    pub level: Vec<usize>,
    pub fixed_level: Vec<usize>,
    pub chain: Vec<Vec<usize>>,
    pub saturated_count: usize,
    pub focus_remaining: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<NdTrace>,
}

pub fn round_summaries(computation: &BoxComputation, with_trace: bool) -> Vec<RoundSummary> {
    computation
        .rounds
        .iter()
        .enumerate()
        .map(|(i, r)| RoundSummary {
            round: i + 1,
            beta: r.beta,
            level: r.level.clone(),
            fixed_level: r.fixed_level.clone(),
            chain: r.chain.member_lists(),
            saturated_count: r.saturated_count,
            focus_remaining: r.focus_next.iter().filter(|&&b| b).count(),
            trace: if with_trace { r.trace.clone() } else { None },
        })
        .collect()
}

/// CSV with one line per round: `round,beta,L,L_prime,F_remaining,chain_depth`.
pub fn round_report_csv(computation: &BoxComputation) -> String {
    let mut out = String::from("round,beta,L,L_prime,F_remaining,chain_depth\n");
    for (i, r) in computation.rounds.iter().enumerate() {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            i + 1,
            r.beta,
            r.level.len(),
            r.fixed_level.len(),
            r.focus_next.iter().filter(|&&b| b).count(),
            r.chain.len()
        ));
    }
    out
}

/// Command output. Only the fields relevant to a command are present.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(default)]
pub struct ResultFile {
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<i64>>,
    #[serde(rename = "F_profile_sorted_desc", skip_serializing_if = "Option::is_none")]
    pub focus_profile: Option<Vec<i64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cost: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f_star: Option<Vec<ExtInt>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g_star: Option<Vec<ExtInt>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decmin: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub potential: Option<Vec<Vec<i64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub levels: Option<Vec<i64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub improving_circuit: Option<Vec<AuxArc>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violating_set: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub deficiency: Option<ExtInt>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub level: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_circuit: Option<Vec<InfinityArc>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub profile: Option<Vec<i64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub flows: Option<Vec<Vec<i64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rounds: Option<Vec<RoundSummary>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<NdTrace>,
}

impl ResultFile {
    pub fn ok() -> Self {
        ResultFile::default()
    }

    pub fn with_status(status: Status, message: impl Into<String>) -> Self {
        ResultFile { status, message: Some(message.into()), ..ResultFile::default() }
    }

    /// Flow values and the sorted focus profile.
    pub fn with_flow(mut self, problem: &FlowProblem, z: &IntegralFlow) -> Self {
        self.focus_profile = Some(z.focus_profile(&problem.focus));
        self.values = Some(z.values.clone());
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("results always serialize")
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| FlowError::InvalidProblem(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ext::Fin;
    use crate::graph::fixtures::*;

    const ASYM: &str = r#"{
        "nodes": 3,
        "supply": [-3, 0, 3],
        "edges": [
            {"tail": 0, "head": 1, "lower": 0, "upper": 3, "inF": true},
            {"tail": 0, "head": 1, "lower": 0, "upper": 1, "inF": true},
            {"tail": 1, "head": 2, "lower": "-inf", "upper": "+inf", "inF": false}
        ]
    }"#;

    #[test]
    fn parses_infinities() {
        let p = parse_problem(ASYM).unwrap();
        assert_eq!(p.lower, vec![Fin(0), Fin(0), NegInf]);
        assert_eq!(p.upper, vec![Fin(3), Fin(1), PosInf]);
        assert_eq!(p.focus, vec![true, true, false]);
        assert_eq!(p.cost, None);
    }

    #[test]
    fn problem_round_trip() {
        for p in [asym(), diamond().with_cost(vec![1, -2, 0, 3]).unwrap()] {
            let text = ProblemFile::from_problem(&p).to_json();
            assert_eq!(parse_problem(&text).unwrap(), p);
        }
    }

    #[test]
    fn errors_name_the_field() {
        let msg = |text: &str| match parse_problem(text) {
            Err(FlowError::InvalidProblem(m)) => m,
            other => panic!("unexpected {other:?}"),
        };
        let text = ASYM.replace("\"upper\": 1", "\"upper\": \"lots\"");
        assert!(msg(&text).starts_with("edges[1].upper"), "{}", msg(&text));
        let text = ASYM.replace("\"upper\": 3", "\"upper\": \"-inf\"");
        assert!(msg(&text).starts_with("edges[0].upper"));
        let text = ASYM.replace("\"lower\": 0, \"upper\": 1", "\"lower\": \"+inf\", \"upper\": 1");
        assert!(msg(&text).starts_with("edges[1].lower"));
        let text = ASYM.replace("\"head\": 2", "\"head\": 7");
        assert!(msg(&text).starts_with("edges[2].head"));
        let text = ASYM.replace("[-3, 0, 3]", "[-3, 0, 2]");
        assert!(msg(&text).starts_with("supply"));
        let text = ASYM.replace("\"inF\": false", "\"inF\": 3");
        assert!(msg(&text).starts_with("edges[2].inF"));
        assert!(msg("{\"nodes\": 1,").starts_with("document") || msg("{\"nodes\": 1,").contains("EOF"));
    }

    #[test]
    fn result_round_trip() {
        let p = asym();
        let mut r = ResultFile::ok().with_flow(&p, &IntegralFlow::new(vec![2, 1, 3]));
        r.f_star = Some(vec![NegInf, Fin(1)]);
        r.g_star = Some(vec![PosInf, Fin(2)]);
        r.deficiency = Some(Fin(-4));
        let text = r.to_json();
        assert!(text.contains("\"F_profile_sorted_desc\""));
        assert!(text.contains("\"-inf\""));
        assert_eq!(ResultFile::parse(&text).unwrap(), r);
        let err = ResultFile::with_status(Status::NoDecmin, "circuit");
        assert!(err.to_json().contains("\"no-decmin\""));
    }

    #[test]
    fn flow_file() {
        assert_eq!(parse_flow("{\"values\": [1, 2]}").unwrap().values, vec![1, 2]);
        assert!(parse_flow("{\"values\": [1, \"x\"]}").is_err());
    }
}

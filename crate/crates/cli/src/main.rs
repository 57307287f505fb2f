use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use fairflow::certificates::{is_decmin, DecminVerdict};
use fairflow::decmin::{cheapest_decmin_flow, decmin_flow, incmax_flow, narrow_box};
use fairflow::existence::{exists_decmin, Existence};
use fairflow::io::{parse_flow, parse_problem, round_report_csv, round_summaries, ResultFile, Status};
use fairflow::maxflow::{find_feasible_mflow, most_violating_set, Feasibility};
use fairflow::newton_dinkelbach::compute_beta;
use fairflow::oracle::{
    enumerate_flows, oracle_beta, oracle_cheapest_decmin, oracle_decmin, oracle_incmax, oracle_most_violating,
    OracleLimits,
};
use fairflow::{Fin, FlowError, FlowProblem};

/// Decreasingly minimal integral flows on a focus edge set.
#[derive(Parser)]
#[command(name = "fairflow", version)]
struct Cli {
    /// Include search traces and reduction rounds in the output.
    #[arg(long, global = true)]
    trace: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Input {
    /// Problem file (JSON).
    #[arg(value_name = "PATH", required_unless_present = "input")]
    path: Option<PathBuf>,
    #[arg(long, value_name = "PATH", conflicts_with = "path")]
    input: Option<PathBuf>,
}

impl Input {
    fn path(&self) -> &Path {
        self.input.as_deref().or(self.path.as_deref()).expect("clap requires one of them")
    }
}

#[derive(Subcommand)]
enum Command {
    /// Find a feasible flow or a violating node set.
    Feasible(Input),
    /// Node set of maximum deficiency (inclusion-minimal).
    ViolatingSet(Input),
    /// Smallest achievable maximum value on the focus edges.
    Beta(Input),
    /// Bounds whose integral flows are exactly the dec-min flows.
    NarrowBox(Input),
    /// A flow whose sorted focus values are lexicographically smallest.
    Decmin(Input),
    /// Cheapest dec-min flow for the edge costs.
    CheapestDecmin(Input),
    /// A flow whose increasingly sorted focus values are largest.
    Incmax(Input),
    /// Decide whether a dec-min flow exists under infinite bounds.
    Exists(Input),
    /// Check a flow for dec-minimality and print the certificate.
    Verify {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_name = "PATH")]
        flow: PathBuf,
    },
    /// Brute-force answers for small instances.
    Oracle {
        op: OracleOp,
        #[command(flatten)]
        input: Input,
        /// Enumeration caps: max_edges, max_box_width, max_enumerations.
        #[arg(long = "limits", value_name = "K=V")]
        limits: Vec<String>,
    },
    /// Per-round reduction summary as CSV.
    Report(Input),
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleOp {
    Enumerate,
    Decmin,
    Incmax,
    Beta,
    Cheapest,
    ViolatingSet,
}

enum Output {
    Json(Box<ResultFile>),
    Text(String),
}

fn read(path: &Path) -> Result<String, FlowError> {
    std::fs::read_to_string(path).map_err(|e| FlowError::InvalidProblem(format!("{}: {e}", path.display())))
}

fn load(input: &Input) -> Result<FlowProblem, FlowError> {
    parse_problem(&read(input.path())?)
}

fn parse_limits(pairs: &[String]) -> Result<OracleLimits, FlowError> {
    let mut limits = OracleLimits::default();
    for pair in pairs {
        let bad = || FlowError::InvalidProblem(format!("--limits: cannot read {pair:?}"));
        let (key, value) = pair.split_once('=').ok_or_else(bad)?;
        match key.trim() {
            "max_edges" => limits.max_edges = value.trim().parse().map_err(|_| bad())?,
            "max_box_width" => limits.max_box_width = value.trim().parse().map_err(|_| bad())?,
            "max_enumerations" => limits.max_enumerations = value.trim().parse().map_err(|_| bad())?,
            _ => return Err(FlowError::InvalidProblem(format!("--limits: unknown key {key:?}"))),
        }
    }
    Ok(limits)
}

fn run(command: &Command, trace: bool) -> Result<Output, FlowError> {
    let result = match command {
        Command::Feasible(input) => {
            let p = load(input)?;
            match find_feasible_mflow(&p)? {
                Feasibility::Flow(z) => ResultFile::ok().with_flow(&p, &z),
                Feasibility::Violated(cert) => return Err(FlowError::Infeasible(cert)),
            }
        }
        Command::ViolatingSet(input) => {
            let cert = most_violating_set(&load(input)?)?;
            ResultFile { violating_set: Some(cert.set), deficiency: Some(Fin(cert.deficiency)), ..ResultFile::ok() }
        }
        Command::Beta(input) => {
            let p = load(input)?;
            if !p.bounds_finite_on_focus() {
                return Err(FlowError::InfiniteBounds);
            }
            let b = compute_beta(&p)?;
            ResultFile {
                beta: b.beta,
                level: Some(b.level),
                trace: if trace { b.trace } else { None },
                ..ResultFile::ok()
            }
        }
        Command::NarrowBox(input) => {
            let computation = narrow_box(&load(input)?)?;
            ResultFile {
                f_star: Some(computation.bounds.f_star.clone()),
                g_star: Some(computation.bounds.g_star.clone()),
                rounds: trace.then(|| round_summaries(&computation, true)),
                ..ResultFile::ok()
            }
        }
        Command::Decmin(input) => {
            let p = load(input)?;
            let z = decmin_flow(&p)?;
            let mut r = ResultFile::ok().with_flow(&p, &z);
            if trace {
                r.rounds = Some(round_summaries(&narrow_box(&p)?, true));
            }
            r
        }
        Command::CheapestDecmin(input) => {
            let p = load(input)?;
            let z = cheapest_decmin_flow(&p)?;
            let cost = p.cost.as_ref().map_or(0, |c| z.cost(c));
            ResultFile { cost: Some(cost), ..ResultFile::ok().with_flow(&p, &z) }
        }
        Command::Incmax(input) => {
            let p = load(input)?;
            let z = incmax_flow(&p)?;
            ResultFile::ok().with_flow(&p, &z)
        }
        Command::Exists(input) => match exists_decmin(&load(input)?)? {
            Existence::Exists => ResultFile::ok(),
            Existence::NoDecMin(circuit) => return Err(FlowError::NoDecMin(circuit)),
        },
        Command::Verify { input, flow } => {
            let p = load(input)?;
            let z = parse_flow(&read(flow)?)?;
            if z.values.len() != p.edge_count() {
                return Err(FlowError::InvalidProblem(format!(
                    "values: expected {} entries, found {}",
                    p.edge_count(),
                    z.values.len()
                )));
            }
            let (aux, verdict) = is_decmin(&p, &z)?;
            match verdict {
                DecminVerdict::Decmin { levels, potential } => ResultFile {
                    decmin: Some(true),
                    levels: Some(levels),
                    potential: Some(potential.values),
                    ..ResultFile::ok().with_flow(&p, &z)
                },
                DecminVerdict::Improvable { circuit, .. } => ResultFile {
                    decmin: Some(false),
                    improving_circuit: Some(circuit.iter().map(|&a| aux.arcs[a].clone()).collect()),
                    ..ResultFile::ok().with_flow(&p, &z)
                },
            }
        }
        Command::Oracle { op, input, limits } => {
            let p = load(input)?;
            let limits = parse_limits(limits)?;
            match op {
                OracleOp::Enumerate => {
                    let flows = enumerate_flows(&p, &limits)?;
                    ResultFile {
                        count: Some(flows.len()),
                        flows: Some(flows.into_iter().map(|z| z.values).collect()),
                        ..ResultFile::ok()
                    }
                }
                OracleOp::Decmin | OracleOp::Incmax => {
                    let optimum = match op {
                        OracleOp::Decmin => oracle_decmin(&p, &limits)?,
                        _ => oracle_incmax(&p, &limits)?,
                    };
                    let Some(profile) = optimum.profile else {
                        return Ok(Output::Json(Box::new(ResultFile::with_status(
                            Status::Infeasible,
                            "no feasible flow",
                        ))));
                    };
                    ResultFile {
                        profile: Some(profile),
                        count: Some(optimum.flows.len()),
                        flows: Some(optimum.flows.into_iter().map(|z| z.values).collect()),
                        ..ResultFile::ok()
                    }
                }
                OracleOp::Beta => ResultFile { beta: oracle_beta(&p, &limits)?, ..ResultFile::ok() },
                OracleOp::Cheapest => ResultFile { cost: oracle_cheapest_decmin(&p, &limits)?, ..ResultFile::ok() },
                OracleOp::ViolatingSet => {
                    let v = oracle_most_violating(&p)?;
                    ResultFile {
                        deficiency: Some(v.deficiency),
                        count: Some(v.sets.len()),
                        violating_set: v.sets.first().map(|s| s.members()),
                        ..ResultFile::ok()
                    }
                }
            }
        }
        Command::Report(input) => return Ok(Output::Text(round_report_csv(&narrow_box(&load(input)?)?))),
    };
    Ok(Output::Json(Box::new(result)))
}

fn failure(err: FlowError) -> (ResultFile, u8) {
    match err {
        FlowError::Infeasible(cert) => {
            let mut r = ResultFile::with_status(Status::Infeasible, "no feasible flow");
            r.violating_set = Some(cert.set);
            r.deficiency = Some(Fin(cert.deficiency));
            (r, 1)
        }
        FlowError::NoDecMin(circuit) => {
            let mut r = ResultFile::with_status(Status::NoDecmin, "unbounded di-circuit through a focus edge");
            r.witness_circuit = Some(circuit);
            (r, 1)
        }
        other => (ResultFile::with_status(Status::Error, other.to_string()), 2),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (output, code) = match run(&cli.command, cli.trace) {
        Ok(Output::Text(text)) => {
            print!("{text}");
            return ExitCode::SUCCESS;
        }
        Ok(Output::Json(r)) => {
            let code = if r.status == Status::Ok { 0 } else { 1 };
            (*r, code)
        }
        Err(err) => {
            eprintln!("fairflow: {err}");
            failure(err)
        }
    };
    println!("{}", output.to_json());
    ExitCode::from(code)
}

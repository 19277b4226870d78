//! The `cfgflow` command line.

use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use crate::dag::Dag;
use crate::dot;
use crate::error::{Error, Result};
use crate::flow::{check_flow, Flow};
use crate::game::{equal_split_coefficients, flow_method_value, marginalist_value, Game};
use crate::io::{
    error_json, parse_flow, parse_model, payoff_json, product_flow_json, q_json, Model,
};
use crate::product::{Hypercube, ProductDigraph};
use crate::rational::{format_q, frac, Q};
use crate::reduction::{check_reduction_condition, induced_value, reachable_system};
use crate::set_system::{classify, count_paths, uniform_path_flow};
use crate::two_step::{
    check_coalitional_anonymity, check_flow_proportionality, check_intracoalitional_anonymity,
    check_null_flow_nonrelevant, compose_two_step_flow, AxiomCheck,
};
use crate::values::{
    audit_value, az_flow, az_value, power_set_shapley_flow, shapley_hypercube_flow, two_step_value,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Build,
    Value,
    Check,
    Reduce,
    ExportDot,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Az,
    TwoStep,
    FlowFile,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Axiom {
    Unitary,
    Efficiency,
    NullAgent,
    Linearity,
    NullFlow,
    Proportionality,
    IntracoalitionalAnonymity,
    CoalitionalAnonymity,
}

impl Axiom {
    fn name(self) -> &'static str {
        match self {
            Axiom::Unitary => "unitary",
            Axiom::Efficiency => "efficiency",
            Axiom::NullAgent => "null-agent",
            Axiom::Linearity => "linearity",
            Axiom::NullFlow => "null-flow",
            Axiom::Proportionality => "proportionality",
            Axiom::IntracoalitionalAnonymity => "intracoalitional-anonymity",
            Axiom::CoalitionalAnonymity => "coalitional-anonymity",
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "cfgflow",
    version,
    about = "Flow methods for games with coalition configurations"
)]
pub struct Args {
    #[arg(value_enum)]
    pub command: Command,
    /// Instance file (JSON).
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long, value_enum)]
    pub method: Option<Method>,
    /// Flow file (JSON); implies `--method flow-file`.
    #[arg(long)]
    pub flow: Option<PathBuf>,
    /// Write the result here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, value_delimiter = ',')]
    pub axioms: Vec<Axiom>,
    /// For export-dot: product, hypercube, reachable or factor:<block>.
    #[arg(long, default_value = "product")]
    pub graph: String,
    /// Seed for the random sample games of `check`.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 20)]
    pub samples: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::AxiomViolated(_) | Error::ConditionViolated(_) => 2,
        _ => 1,
    }
}

/// Parse `argv` (including the program name) and run.
pub fn run_from<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Args::try_parse_from(argv) {
        Ok(args) => run(&args),
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let text = e.render().to_string();
            if code == 0 {
                Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                let err = json!({ "error": { "kind": "UsageError", "message": text } });
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: format!("{err:#}\n"),
                }
            }
        }
    }
}

pub fn run(args: &Args) -> Outcome {
    let result = std::panic::catch_unwind(|| execute(args));
    let (code, text) = match result {
        Ok(Ok((code, text))) => (code, text),
        Ok(Err(e)) => {
            return Outcome {
                code: exit_code(&e),
                stdout: String::new(),
                stderr: format!("{:#}\n", error_json(&e)),
            }
        }
        Err(_) => {
            let err = json!({ "error": { "kind": "Internal", "message": "internal error" } });
            return Outcome {
                code: 3,
                stdout: String::new(),
                stderr: format!("{err:#}\n"),
            };
        }
    };
    match &args.out {
        Some(path) => match std::fs::write(path, &text) {
            Ok(()) => Outcome {
                code,
                stdout: String::new(),
                stderr: String::new(),
            },
            Err(e) => {
                let err = json!({ "error": { "kind": "Internal", "message": e.to_string() } });
                Outcome {
                    code: 3,
                    stdout: String::new(),
                    stderr: format!("{err:#}\n"),
                }
            }
        },
        None => Outcome {
            code,
            stdout: text,
            stderr: String::new(),
        },
    }
}

fn read(path: &PathBuf) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Validation {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn execute(args: &Args) -> Result<(i32, String)> {
    let model = parse_model(&read(&args.instance)?)?;
    match args.command {
        Command::Build => Ok((0, render(build_report(&model.pd)))),
        Command::Value => value_cmd(args, &model).map(|v| (0, render(v))),
        Command::Check => check_cmd(args, &model).map(|(c, v)| (c, render(v))),
        Command::Reduce => reduce_cmd(args, &model).map(|(c, v)| (c, render(v))),
        Command::ExportDot => dot_cmd(args, &model).map(|t| (0, t)),
    }
}

fn render(v: Value) -> String {
    format!("{v:#}\n")
}

fn build_report(pd: &ProductDigraph) -> Value {
    let factors: Vec<Value> = (0..pd.m())
        .map(|q| {
            let d = pd.factor(q);
            let k = classify(d.system());
            json!({
                "block": q + 1,
                "ground": d.system().ground().to_string(),
                "vertices": d.vertex_count(),
                "edges": d.edge_count(),
                "maximal_paths": count_paths(d).total_maximal.to_string(),
                "regular": k.is_regular,
                "convex_geometry": k.is_convex_geometry,
                "augmenting": k.is_augmenting,
                "power_set": d.system().is_power_set(),
            })
        })
        .collect();
    let agents: Vec<Value> = (1..=pd.n())
        .map(|i| {
            let sub = pd.agent_subdigraph(i).expect("agent in range");
            json!({
                "agent": i,
                "edges": sub.edges.len(),
                "vertices": sub.vertices.len(),
                "components": sub.components(pd).len(),
            })
        })
        .collect();
    let relevant_vertices = (0..pd.vertex_count())
        .filter(|&v| pd.is_relevant_vertex(v))
        .count();
    json!({
        "command": "build",
        "n": pd.n(),
        "blocks": pd.m(),
        "vertices": pd.vertex_count(),
        "edges": pd.edge_count(),
        "relevant_vertices": relevant_vertices,
        "relevant_edges": pd.relevant_edges().len(),
        "factors": factors,
        "agents": agents,
    })
}

fn all_power_sets(pd: &ProductDigraph) -> bool {
    (0..pd.m()).all(|q| pd.system(q).is_power_set())
}

fn resolve_method(args: &Args, default: Method) -> Result<Method> {
    match (args.method, &args.flow) {
        (Some(Method::FlowFile), None) => Err(Error::Validation {
            path: "--flow".into(),
            message: "method flow-file needs --flow".into(),
        }),
        (Some(m), _) => Ok(m),
        (None, Some(_)) => Ok(Method::FlowFile),
        (None, None) => Ok(default),
    }
}

fn method_name(m: Method) -> &'static str {
    match m {
        Method::Az => "az",
        Method::TwoStep => "two-step",
        Method::FlowFile => "flow-file",
    }
}

fn two_step_parts(pd: &ProductDigraph) -> Result<(Flow, Vec<Flow>)> {
    let h = Hypercube::new(pd.m())?;
    Ok((
        shapley_hypercube_flow(&h),
        pd.factors().iter().map(uniform_path_flow).collect(),
    ))
}

fn method_flow(args: &Args, pd: &ProductDigraph, m: Method) -> Result<Flow> {
    match m {
        Method::Az => az_flow(pd),
        Method::TwoStep => {
            let (lm, ff) = two_step_parts(pd)?;
            compose_two_step_flow(pd, &lm, &ff)
        }
        Method::FlowFile => {
            let path = args.flow.as_ref().expect("checked by resolve_method");
            parse_flow(&read(path)?, pd)
        }
    }
}

fn require_game(model: &Model) -> Result<&Game> {
    model.game.as_ref().ok_or_else(|| Error::Validation {
        path: "game".into(),
        message: "instance has no game".into(),
    })
}

fn value_cmd(args: &Args, model: &Model) -> Result<Value> {
    let pd = &model.pd;
    let g = require_game(model)?;
    let method = resolve_method(args, Method::TwoStep)?;
    let (pay, flow) = match method {
        Method::Az => (az_value(pd, g)?, az_flow(pd)?),
        Method::TwoStep => {
            let (lm, ff) = two_step_parts(pd)?;
            (
                two_step_value(pd, g, &lm, &ff)?,
                compose_two_step_flow(pd, &lm, &ff)?,
            )
        }
        Method::FlowFile => {
            let f = method_flow(args, pd, method)?;
            (flow_method_value(pd, g, &f)?, f)
        }
    };
    Ok(json!({
        "command": "value",
        "method": method_name(method),
        "payoffs": payoff_json(&pay),
        "total": q_json(&pay.total()),
        "grand_worth": q_json(&g.worth[pd.top()]),
        "flow": product_flow_json(pd, &flow),
    }))
}

fn random_games(pd: &ProductDigraph, seed: u64, count: usize) -> Vec<Game> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let worth: Vec<Q> = (0..pd.vertex_count())
                .map(|v| {
                    if v == 0 {
                        frac(0, 1)
                    } else {
                        frac(rng.gen_range(-9..=9), rng.gen_range(1..=4))
                    }
                })
                .collect();
            Game { worth }
        })
        .collect()
}

fn axiom_json(c: &AxiomCheck, pd: &ProductDigraph) -> Value {
    match &c.witness {
        None => json!({ "holds": true }),
        Some(w) => {
            let edges: Vec<String> = w
                .edges
                .iter()
                .map(|&e| {
                    format!(
                        "{} -> {}",
                        pd.profile(pd.edge(e).tail),
                        pd.profile(pd.edge(e).head)
                    )
                })
                .collect();
            json!({ "holds": false, "witness": { "detail": w.detail, "edges": edges } })
        }
    }
}

fn check_cmd(args: &Args, model: &Model) -> Result<(i32, Value)> {
    let pd = &model.pd;
    let method = resolve_method(args, Method::TwoStep)?;
    let flow = method_flow(args, pd, method)?;
    let axioms: Vec<Axiom> = if args.axioms.is_empty() {
        let mut all = vec![
            Axiom::Unitary,
            Axiom::Efficiency,
            Axiom::NullAgent,
            Axiom::Linearity,
            Axiom::NullFlow,
            Axiom::Proportionality,
        ];
        if all_power_sets(pd) {
            all.extend([
                Axiom::IntracoalitionalAnonymity,
                Axiom::CoalitionalAnonymity,
            ]);
        }
        all
    } else {
        args.axioms.clone()
    };
    let needs_audit = axioms
        .iter()
        .any(|a| matches!(a, Axiom::Efficiency | Axiom::NullAgent | Axiom::Linearity));
    let audit = if needs_audit {
        let mut sample = random_games(pd, args.seed, args.samples);
        if let Some(g) = &model.game {
            sample.insert(0, g.clone());
        }
        let coeffs = equal_split_coefficients(pd, &flow);
        Some(audit_value(
            pd,
            |g| marginalist_value(pd, g, &coeffs),
            &sample,
        )?)
    } else {
        None
    };
    let mut out = Map::new();
    let mut all_hold = true;
    for a in axioms {
        let entry = match a {
            Axiom::Unitary => {
                let r = check_flow(pd, &flow)?;
                json!({
                    "holds": r.is_unitary,
                    "value": format_q(&r.value),
                    "violations": r.violations.iter().map(|&v| pd.profile(v).to_string()).collect::<Vec<_>>(),
                })
            }
            Axiom::Efficiency | Axiom::NullAgent | Axiom::Linearity => {
                let r = audit.as_ref().expect("audit computed");
                let (holds, witness) = match a {
                    Axiom::Efficiency => (r.efficiency, &r.efficiency_witness),
                    Axiom::NullAgent => (r.null_agent, &r.null_agent_witness),
                    _ => (r.linearity, &r.linearity_witness),
                };
                json!({ "holds": holds, "witness": witness, "games_checked": r.games_checked })
            }
            Axiom::NullFlow => axiom_json(&check_null_flow_nonrelevant(pd, &flow)?, pd),
            Axiom::Proportionality => axiom_json(&check_flow_proportionality(pd, &flow)?, pd),
            Axiom::IntracoalitionalAnonymity => {
                axiom_json(&check_intracoalitional_anonymity(pd, &flow)?, pd)
            }
            Axiom::CoalitionalAnonymity => axiom_json(&check_coalitional_anonymity(pd, &flow)?, pd),
        };
        all_hold &= entry["holds"] == json!(true);
        out.insert(a.name().to_string(), entry);
    }
    let report = json!({
        "command": "check",
        "method": method_name(method),
        "all_hold": all_hold,
        "axioms": Value::Object(out),
    });
    Ok((if all_hold { 0 } else { 2 }, report))
}

fn reduce_cmd(args: &Args, model: &Model) -> Result<(i32, Value)> {
    let pd = &model.pd;
    let rs = reachable_system(pd);
    let cond = check_reduction_condition(pd);
    let edge_str = |e: usize| {
        format!(
            "{} -> {}",
            pd.profile(pd.edge(e).tail),
            pd.profile(pd.edge(e).head)
        )
    };
    let star: Vec<Value> = rs
        .star_pairs()
        .iter()
        .zip(&rs.witness)
        .map(|((a, b), &w)| json!({ "from": a.to_string(), "to": b.to_string(), "witness": edge_str(w) }))
        .collect();
    let covering: Vec<Value> = rs
        .covering_pairs()
        .iter()
        .map(|(a, b)| json!({ "from": a.to_string(), "to": b.to_string() }))
        .collect();
    let mut star_sorted = rs.star_pairs();
    star_sorted.sort();
    let mut cov_sorted = rs.covering_pairs();
    cov_sorted.sort();
    let mut report = json!({
        "command": "reduce",
        "reachable_count": rs.coalitions.len(),
        "reachable": rs.coalitions.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        "star_edges": star,
        "covering_edges": covering,
        "star_equals_covering": star_sorted == cov_sorted,
        "condition": {
            "holds": cond.holds,
            "counterexample": cond.counterexample.map(edge_str),
            "violations": cond.violations.iter().map(|&e| edge_str(e)).collect::<Vec<_>>(),
        },
    });
    if !cond.holds {
        return Ok((2, report));
    }
    if let Some(v0) = &model.coalition_game {
        let default = if all_power_sets(pd) {
            Method::Az
        } else {
            Method::TwoStep
        };
        let method = resolve_method(args, default)?;
        let flow = method_flow(args, pd, method)?;
        let iv = induced_value(pd, &flow, v0)?;
        let sf: Vec<Value> = iv
            .system
            .star_pairs()
            .iter()
            .zip(&iv.star_flow.weights)
            .map(|((a, b), w)| json!({ "from": a.to_string(), "to": b.to_string(), "weight": format_q(w) }))
            .collect();
        report["method"] = json!(method_name(method));
        report["payoffs"] = payoff_json(&iv.pay);
        report["total"] = q_json(&iv.pay.total());
        report["star_flow"] = Value::Array(sf);
    }
    Ok((0, report))
}

fn dot_cmd(args: &Args, model: &Model) -> Result<String> {
    let pd = &model.pd;
    let labeled = args.method.is_some() || args.flow.is_some();
    let graph = args.graph.as_str();
    if graph == "product" {
        let flow = if labeled {
            Some(method_flow(
                args,
                pd,
                resolve_method(args, Method::TwoStep)?,
            )?)
        } else {
            None
        };
        return Ok(dot::product_dot(pd, flow.as_ref()));
    }
    if args.flow.is_some() {
        return Err(Error::Validation {
            path: "--flow".into(),
            message: "flow files label the product digraph only".into(),
        });
    }
    if graph == "hypercube" {
        let h = Hypercube::new(pd.m())?;
        let flow = labeled.then(|| shapley_hypercube_flow(&h));
        return Ok(dot::hypercube_dot(&h, flow.as_ref()));
    }
    if graph == "reachable" {
        let rs = reachable_system(pd);
        let flow = if labeled {
            let f = method_flow(args, pd, resolve_method(args, Method::TwoStep)?)?;
            let mut star = Flow::zero(rs.star_edges.len());
            for (e, pe) in pd.edges().iter().enumerate() {
                let (a, b) = (rs.vertex_map[pe.tail], rs.vertex_map[pe.head]);
                if a != b {
                    star.weights[rs.star_edges.binary_search(&(a, b)).unwrap()] += &f.weights[e];
                }
            }
            Some(star)
        } else {
            None
        };
        return Ok(dot::star_dot(&rs, flow.as_ref()));
    }
    if let Some(q) = graph.strip_prefix("factor:") {
        let q: usize = q
            .parse()
            .ok()
            .filter(|&q| q >= 1 && q <= pd.m())
            .ok_or_else(|| Error::Validation {
                path: "--graph".into(),
                message: format!("no block {q}"),
            })?;
        let d = pd.factor(q - 1);
        let flow = match args.method {
            None => None,
            Some(Method::Az) => Some(power_set_shapley_flow(pd, q - 1)?),
            Some(_) => Some(uniform_path_flow(d)),
        };
        return Ok(dot::covering_dot(d, flow.as_ref()));
    }
    Err(Error::Validation {
        path: "--graph".into(),
        message: format!("unknown graph {graph:?}"),
    })
}

//! `valmono`: command-line driver for the valuation and monomialization engine.

mod input;
mod selftest;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use valmono_core::algebra::{fmt_uni, parse_rf, rf_to_json, uni_to_json, Exp};
use valmono_core::blowup::{divide_monomials, principalize, trace_dot, trace_jsonl, trace_lines, Frame};
use valmono_core::orchestrator::MasterState;
use valmono_core::puiseux::puiseux_package;
use valmono_core::successors::{
    check_limit_successor, is_optimal, next_successor, verify_immediate_successor, LowerLattice,
};
use valmono_core::Error;

use input::{load_spec, parse_exps, parse_uni, parse_uni_list, read_source};

#[derive(Parser)]
#[command(name = "valmono", version, about = "Exact valuations, key polynomials and monomializing blow-ups")]
struct Cli {
    /// Seed for every randomized check.
    #[arg(long, global = true, default_value_t = 20_240_601)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
    Dot,
}

#[derive(Args)]
struct SpecArg {
    /// Spec file, inline JSON, or one of `weights`, `keyed`, `augmented`, `limit`.
    #[arg(long)]
    spec: String,
}

#[derive(Args)]
struct TraceArgs {
    /// Write the blow-up trace as JSON lines.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Write the blow-up trace as a DOT graph.
    #[arg(long)]
    dot: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Value of a polynomial.
    Eval {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long)]
        poly: String,
    },
    /// Largest normalized derivative drop.
    Epsilon {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long)]
        poly: String,
    },
    /// Truncated value of a polynomial at a key.
    Truncate {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long)]
        key: String,
        #[arg(long)]
        poly: String,
    },
    /// Successor construction and checks.
    Successor {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long)]
        key: String,
        #[arg(long)]
        candidate: Option<String>,
        #[arg(long, group = "mode")]
        next: bool,
        #[arg(long, group = "mode")]
        verify: bool,
        #[arg(long, group = "mode")]
        optimal: bool,
        #[arg(long = "limit-check", group = "mode")]
        limit_check: bool,
    },
    /// Blow up until one monomial divides the other.
    Divide {
        #[command(flatten)]
        spec: SpecArg,
        /// Exponents such as `1,0,2`.
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
        #[command(flatten)]
        out: TraceArgs,
    },
    /// Blow up until a monomial ideal is principal.
    Principalize {
        #[command(flatten)]
        spec: SpecArg,
        /// Generators separated by `;`, e.g. `2,0,0;0,3,0`.
        #[arg(long)]
        gens: String,
        #[command(flatten)]
        out: TraceArgs,
    },
    /// Apply framed blow-ups along the given centers.
    BlowupStep {
        #[command(flatten)]
        spec: SpecArg,
        /// Parameter indices, e.g. `0,2`; repeat for several steps.
        #[arg(long, required = true)]
        center: Vec<String>,
        #[command(flatten)]
        out: TraceArgs,
    },
    /// Monomialize a binomial key by a package of blow-ups.
    Puiseux {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long)]
        key: String,
        /// Start from the frame of a saved state.
        #[arg(long)]
        frame: Option<PathBuf>,
        #[command(flatten)]
        out: TraceArgs,
    },
    /// Monomialize one polynomial.
    Monomialize {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long)]
        poly: String,
        #[arg(long, default_value_t = 10_000)]
        budget: usize,
        /// Successor to use at a limit point; repeatable.
        #[arg(long = "limit-key")]
        limit_keys: Vec<String>,
        /// Extra element to monomialize alongside the keys; repeatable.
        #[arg(long = "target")]
        targets: Vec<String>,
        /// Resume from a saved state instead of the spec's fresh frame.
        #[arg(long)]
        resume: Option<PathBuf>,
        /// Save the state, also on failure.
        #[arg(long)]
        state: Option<PathBuf>,
        #[command(flatten)]
        out: TraceArgs,
    },
    /// Monomialize several polynomials and make the least one divide the rest.
    Uniformize {
        #[command(flatten)]
        spec: SpecArg,
        /// JSON list, file, or `;`-separated expressions.
        #[arg(long)]
        polys: String,
        #[arg(long, default_value_t = 10_000)]
        budget: usize,
        #[arg(long)]
        state: Option<PathBuf>,
        #[command(flatten)]
        out: TraceArgs,
    },
    /// Run the golden suite.
    Selftest,
}

/// Failure classes mapped to exit codes.
pub enum Failure {
    Input(String),
    Uncertified(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_) | Error::UnknownVariable(_) | Error::NotPolynomial(_) | Error::Serde(_) | Error::InvalidSpec(_) => {
                Failure::Input(e.to_string())
            }
            other => Failure::Uncertified(other.to_string()),
        }
    }
}

type Outcome = Result<Value, Failure>;

fn write_traces(frame: &Frame, out: &TraceArgs, dot: &mut Option<String>) -> Result<(), Failure> {
    *dot = Some(trace_dot(frame));
    if let Some(p) = &out.trace {
        fs::write(p, trace_jsonl(frame)).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))?;
    }
    if let Some(p) = &out.dot {
        fs::write(p, trace_dot(frame)).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))?;
    }
    Ok(())
}

fn save_state(st: &MasterState, path: &Option<PathBuf>) -> Result<(), Failure> {
    if let Some(p) = path {
        let text = serde_json::to_string_pretty(&st.to_json()).expect("state serializes");
        fs::write(p, text).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))?;
    }
    Ok(())
}

/// Print a line; a closed pipe is not an error.
pub fn emit(text: &str) {
    use std::io::Write;
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn certified(ok: bool, report: Value, what: &str) -> Outcome {
    if ok {
        Ok(report)
    } else {
        emit(&serde_json::to_string_pretty(&report).expect("report serializes"));
        Err(Failure::Uncertified(format!("{what} does not hold")))
    }
}

fn run(cli: &Cli, dot: &mut Option<String>) -> Outcome {
    match &cli.command {
        Command::Eval { spec, poly } => {
            let spec = load_spec(&spec.spec)?;
            let p = parse_uni(&spec, poly)?;
            Ok(json!({ "value": spec.value_uni(&p)?.to_string() }))
        }
        Command::Epsilon { spec, poly } => {
            let spec = load_spec(&spec.spec)?;
            let p = parse_uni(&spec, poly)?;
            let r = spec.epsilon(&p)?;
            Ok(serde_json::to_value(&r).expect("report serializes"))
        }
        Command::Truncate { spec, key, poly } => {
            let spec = load_spec(&spec.spec)?;
            let q = parse_uni(&spec, key)?;
            let p = parse_uni(&spec, poly)?;
            let r = spec.truncated_value(&q, &p)?;
            Ok(json!({
                "value": r.value.to_string(),
                "argmin": r.argmin,
                "delta": r.delta,
                "term_values": r.term_values.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
                "expansion": r.expansion.iter().map(uni_to_json).collect::<Vec<_>>(),
            }))
        }
        Command::Successor { spec, key, candidate, next, verify, optimal, limit_check } => {
            let spec = load_spec(&spec.spec)?;
            let q = parse_uni(&spec, key)?;
            let cand = || -> Result<_, Failure> {
                let c = candidate.as_ref().ok_or_else(|| Failure::Input("--candidate is required".into()))?;
                parse_uni(&spec, c)
            };
            let lower = LowerLattice::new(&spec, q.var(), std::slice::from_ref(&q), q.deg())?;
            if *verify {
                let r = verify_immediate_successor(&spec, &q, &cand()?, &lower)?;
                certified(r.holds, r.to_json(), "immediate successor")
            } else if *optimal {
                let r = is_optimal(&spec, &q, &cand()?)?;
                certified(r.optimal, json!({ "optimal": r.optimal, "optimalized": fmt_uni(&r.optimalized) }), "optimality")
            } else if *limit_check {
                let r = check_limit_successor(&spec, &q, &cand()?)?;
                let report = json!({
                    "holds": r.holds,
                    "delta": r.delta,
                    "argmin": r.argmin,
                    "truncated_value": r.truncated_value.to_string(),
                    "value": r.value.to_string(),
                });
                certified(r.holds && r.delta == 1, report, "limit successor condition")
            } else {
                let _ = next;
                let (p, cert) = next_successor(&spec, &q, std::slice::from_ref(&q), &lower)?;
                Ok(json!({ "successor": fmt_uni(&p), "certificate": cert.to_json() }))
            }
        }
        Command::Divide { spec, a, b, out } => {
            let spec = load_spec(&spec.spec)?;
            let mut frame = Frame::new(spec)?;
            let (a, b) = (parse_exps(a, frame.len())?, parse_exps(b, frame.len())?);
            let r = divide_monomials(&mut frame, &a, &b)?;
            write_traces(&frame, out, dot)?;
            Ok(json!({
                "first": r.first,
                "second": r.second,
                "first_divides": r.first_divides(),
                "taus": r.taus,
                "params": frame.params().as_ref(),
                "trace": trace_lines(&frame),
            }))
        }
        Command::Principalize { spec, gens, out } => {
            let spec = load_spec(&spec.spec)?;
            let mut frame = Frame::new(spec)?;
            let gens: Vec<Exp> = gens.split(';').map(|g| parse_exps(g, frame.len())).collect::<Result<_, _>>()?;
            let r = principalize(&mut frame, &gens)?;
            write_traces(&frame, out, dot)?;
            Ok(json!({
                "generator": r.generator,
                "transforms": r.transforms,
                "origin": r.origin,
                "params": frame.params().as_ref(),
                "trace": trace_lines(&frame),
            }))
        }
        Command::BlowupStep { spec, center, out } => {
            let spec = load_spec(&spec.spec)?;
            let mut frame = Frame::new(spec)?;
            for c in center {
                let idx: Vec<usize> = c
                    .split(',')
                    .map(|s| s.trim().parse::<usize>().map_err(|e| Failure::Input(format!("center `{c}`: {e}"))))
                    .collect::<Result<_, _>>()?;
                frame.blowup(&idx)?;
            }
            write_traces(&frame, out, dot)?;
            Ok(json!({
                "params": frame.params().as_ref(),
                "values": frame.values().iter().map(|v| v.to_string()).collect::<Vec<_>>(),
                "forward": frame.forward().iter().map(rf_to_json).collect::<Vec<_>>(),
                "trace": trace_lines(&frame),
            }))
        }
        Command::Puiseux { spec, key, frame, out } => {
            let (spec, mut fr) = match frame {
                Some(p) => {
                    let st = MasterState::from_json(&serde_json::from_str(&read_source(&p.to_string_lossy())?).map_err(Error::from)?)?;
                    (st.spec().as_ref().clone(), st.frame().clone())
                }
                None => {
                    let s = load_spec(&spec.spec)?;
                    let f = Frame::new(s.clone())?;
                    (s, f)
                }
            };
            let q = parse_uni(&spec, key)?;
            let r = puiseux_package(&mut fr, &q)?;
            write_traces(&fr, out, dot)?;
            Ok(json!({
                "gamma": r.gamma,
                "delta": r.delta,
                "new_param": fr.params()[r.trace.new_slot],
                "monomial": r.monomial,
                "unit": rf_to_json(&r.unit),
                "ratio_unit": rf_to_json(&r.ratio_unit),
                "ratio_residue": r.ratio_residue.to_string(),
                "gcds": r.trace.gcds,
                "originals": r.originals.iter().map(|c| c.to_json()).collect::<Vec<_>>(),
                "trace": trace_lines(&fr),
            }))
        }
        Command::Monomialize { spec, poly, budget, limit_keys, targets, resume, state, out } => {
            let mut st = match resume {
                Some(p) => {
                    let mut st = MasterState::from_json(&serde_json::from_str(&read_source(&p.to_string_lossy())?).map_err(Error::from)?)?;
                    st.set_budget(*budget);
                    st
                }
                None => MasterState::new(load_spec(&spec.spec)?, *budget)?,
            };
            let spec = st.spec().clone();
            for k in limit_keys {
                st.push_limit_key(parse_uni(&spec, k)?);
            }
            for t in targets {
                st.push_target(parse_rf(t, spec.vars())?);
            }
            let f = parse_uni(&spec, poly)?;
            let r = st.monomialize(&f);
            save_state(&st, state)?;
            write_traces(st.frame(), out, dot)?;
            let cert = r?;
            Ok(json!({
                "certificate": cert.to_json(),
                "value": spec.value_uni(&f)?.to_string(),
                "chain": st.chain().to_json(),
                "blowups": st.frame().blowups(),
                "rounds": st.rounds(),
                "targets": st.target_certificates().iter().map(|c| c.to_json()).collect::<Vec<_>>(),
                "log": st.log(),
            }))
        }
        Command::Uniformize { spec, polys, budget, state, out } => {
            let spec = load_spec(&spec.spec)?;
            let fs = parse_uni_list(&spec, polys)?;
            let mut st = MasterState::new(spec, *budget)?;
            let r = st.embedded_uniformize(&fs);
            save_state(&st, state)?;
            write_traces(st.frame(), out, dot)?;
            let u = r?;
            Ok(json!({
                "order": u.order,
                "first_divides_all": u.first_divides_all(),
                "certificates": u.certificates.iter().map(|c| c.to_json()).collect::<Vec<_>>(),
                "blowups": st.frame().blowups(),
            }))
        }
        Command::Selftest => selftest::run(cli.seed),
    }
}

fn render(v: &Value, format: Format) -> String {
    match format {
        Format::Json | Format::Dot => serde_json::to_string_pretty(v).expect("value serializes"),
        Format::Text => match v {
            Value::Object(m) => m
                .iter()
                .map(|(k, x)| match x {
                    Value::String(s) => format!("{k}: {s}"),
                    other => format!("{k}: {other}"),
                })
                .collect::<Vec<_>>()
                .join("\n"),
            other => other.to_string(),
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut dot = None;
    match run(&cli, &mut dot) {
        Ok(v) => {
            if let (Format::Dot, Some(d)) = (cli.format, &dot) {
                emit(d.trim_end());
                return ExitCode::SUCCESS;
            }
            emit(&render(&v, cli.format));
            ExitCode::SUCCESS
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Uncertified(msg)) => {
            eprintln!("not certified: {msg}");
            ExitCode::from(3)
        }
    }
}

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use piterm::impure::{check_impure, ImpureEnv};
use piterm::infer::{infer as infer_lpi, InferMode};
use piterm::lambda::{check_stlc, encode as encode_lambda, parse_lambda};
use piterm::semantics::{certified_run, explore, Bounds, ExecutionReport};
use piterm::syntax::{parse_env, EnvDecl};
use piterm::typing::{derive, CheckMode, TypeEnv};
use piterm::{parse_process, Name, Process};

use crate::report::{Report, Verdict};
use crate::{CheckArgs, EncodeArgs, InferArgs, RunArgs};

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_process(path: &Path) -> Result<Process> {
    let text = read(path)?;
    parse_process(&text).with_context(|| format!("in {}", path.display()))
}

fn load_decls(path: &Path) -> Result<Vec<EnvDecl>> {
    let text = read(path)?;
    parse_env(&text).with_context(|| format!("in {}", path.display()))
}

/// The explicit environment file, else `FILE.env` when it exists.
fn env_path(file: &Path, explicit: Option<&PathBuf>) -> Option<PathBuf> {
    if let Some(p) = explicit {
        return Some(p.clone());
    }
    let sibling = file.with_extension("env");
    sibling.exists().then_some(sibling)
}

pub fn check(command: String, args: &CheckArgs) -> Result<Report> {
    let p = load_process(&args.file)?;
    let decls = match env_path(&args.file, args.env.as_ref()) {
        Some(path) => load_decls(&path)?,
        None => Vec::new(),
    };
    if args.impure {
        let env = ImpureEnv::from_decls(&decls)?;
        return Ok(match check_impure(&env, &p) {
            Ok(w) => {
                let mut r = Report::new(command, Verdict::Accepted);
                r.weight = Some(w);
                r.environment = Some(env.to_string());
                r
            }
            Err(e) => {
                let mut r = Report::new(command, Verdict::Rejected);
                r.diagnose(e.code(), e.message, Some(e.location));
                r
            }
        });
    }
    let env = TypeEnv::from_decls(&decls)?;
    let mode = if args.ds {
        CheckMode::SharpOnly
    } else {
        CheckMode::Subtyping
    };
    Ok(match derive(&env, &p, mode) {
        Ok(t) => {
            let mut r = Report::new(command, Verdict::Accepted);
            r.weight = Some(t.weight);
            r.section("measure", t.measure.to_string());
            r
        }
        Err(e) => {
            let mut r = Report::new(command, Verdict::Rejected);
            r.diagnose(e.code(), e.message, Some(e.location));
            r
        }
    })
}

pub fn infer(command: String, args: &InferArgs) -> Result<Report> {
    let p = load_process(&args.file)?;
    let mode = if args.ds_equality {
        InferMode::DsEquality
    } else {
        InferMode::Flexible
    };
    Ok(match infer_lpi(&p, mode) {
        Ok(inf) => {
            let mut r = Report::new(command, Verdict::Accepted);
            if args.dump_graph {
                r.section("graph", inf.graph.dump());
            }
            if !piterm::subst::restricted_names(&inf.process).is_empty() {
                r.section("annotated", inf.process.to_string());
            }
            r.environment = Some(inf.env.to_string());
            r.weight = Some(inf.weight);
            r
        }
        Err(e) => {
            let mut r = Report::new(command, Verdict::Rejected);
            r.diagnose(e.code(), e.to_string(), None);
            r
        }
    })
}

fn exploration(r: &mut Report, run: &ExecutionReport, trace: bool) {
    r.verdict = match &run.verdict {
        piterm::semantics::Verdict::Terminated => Verdict::Terminated,
        piterm::semantics::Verdict::BoundExceeded => Verdict::BoundExceeded,
        piterm::semantics::Verdict::Diverges { cycle } => {
            r.section("cycle", cycle.join("\n"));
            r.diagnose("DIV", "a reachable state can reach itself", None);
            Verdict::Diverges
        }
    };
    r.steps = Some(run.steps());
    r.section(
        "exploration",
        format!("states {}\nmax depth {}", run.states.len(), run.max_depth),
    );
    if trace || run.measure_trace.is_some() {
        r.measure_trace = Some(run.trace_lines());
    }
}

pub fn run(command: String, args: &RunArgs) -> Result<Report> {
    let p = load_process(&args.file)?;
    let bounds = Bounds {
        max_states: args.max_states,
        max_depth: args.max_depth,
    };
    let mut r = Report::new(command, Verdict::Terminated);
    match &args.certify {
        None => exploration(&mut r, &explore(&p, bounds), args.trace),
        Some(path) => {
            let env = TypeEnv::from_decls(&load_decls(path)?)?;
            match certified_run(&env, &p, bounds) {
                Ok(run) => exploration(&mut r, &run, true),
                Err(e) => {
                    r.verdict = Verdict::Rejected;
                    r.diagnose(
                        "CERT",
                        e.reason.clone(),
                        Some(format!("{} --> {}", e.parent, e.child)),
                    );
                }
            }
        }
    }
    Ok(r)
}

pub fn encode(command: String, args: &EncodeArgs) -> Result<Report> {
    let text = read(&args.file)?;
    let prog = parse_lambda(&text).with_context(|| format!("in {}", args.file.display()))?;
    let ty = match check_stlc(&prog.context, &prog.term) {
        Ok(ty) => ty,
        Err(e) => {
            let mut r = Report::new(command, Verdict::Rejected);
            r.diagnose("LAM", e.0, Some(prog.term.to_string()));
            return Ok(r);
        }
    };
    let p = encode_lambda(&prog.term, &Name::global(&args.channel));
    let mut r = Report::new(command, Verdict::Accepted);
    r.section("type", ty.to_string());
    r.section("process", p.to_string());
    if args.infer {
        match infer_lpi(&p, InferMode::Flexible) {
            Ok(inf) => {
                r.environment = Some(inf.env.to_string());
                r.weight = Some(inf.weight);
            }
            Err(e) => {
                r.verdict = Verdict::Rejected;
                r.diagnose(e.code(), e.to_string(), None);
            }
        }
    } else if args.run {
        let bounds = Bounds {
            max_states: args.max_states,
            ..Bounds::default()
        };
        exploration(&mut r, &explore(&p, bounds), false);
    }
    Ok(r)
}

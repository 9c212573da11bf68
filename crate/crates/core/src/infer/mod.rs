//! Type inference for the localised calculus, where received names are
//! only ever used for output.
//!
//! Simple types are inferred first. Levels are then found on a graph whose
//! nodes are names and payload positions and whose edges are `>=` and `>`
//! constraints between them.

mod graph;
mod simple;

pub use graph::{assign_levels, build_graph, Edge, EdgeKind, LevelGraph, Node, NodePath};
pub use simple::{infer_simple, locality_check, received_names, SimpleEnv, SimpleType};

use std::collections::HashSet;

use crate::name::Name;
use crate::subst::{free_names_in_order, restricted_names};
use crate::syntax::{Capability, Process, Type};
use crate::typing::{check, TypeEnv, TypeError, Weight};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InferError {
    #[error("received name `{0}` is used as an input subject")]
    NotLocalised(String),
    #[error("simple types do not unify: {0}")]
    UnificationFailure(String),
    #[error("recursive type required: {0}")]
    OccursCheckFailure(String),
    #[error("level constraints form a cycle through a strict edge: {}", cycle.join(" -> "))]
    CyclicLevelConstraint { cycle: Vec<String> },
    #[error("inferred typing rejected by the checker: {0}")]
    Internal(TypeError),
}

impl InferError {
    pub fn code(&self) -> &'static str {
        match self {
            InferError::NotLocalised(_) => "LOC",
            InferError::UnificationFailure(_) => "UNI",
            InferError::OccursCheckFailure(_) => "OCC",
            InferError::CyclicLevelConstraint { .. } => "CYC",
            InferError::Internal(_) => "INT",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InferMode {
    Flexible,
    /// Every `>=` constraint becomes an equality, as when levels are part of
    /// types that must match exactly.
    DsEquality,
}

#[derive(Debug, Clone)]
pub struct Inferred {
    /// Types of the free names.
    pub env: TypeEnv,
    /// The input process with every restriction annotated.
    pub process: Process,
    pub simple: SimpleEnv,
    /// The constraint graph, with levels filled in.
    pub graph: LevelGraph,
    pub weight: Weight,
}

/// Types of the free names and annotated restrictions of `p`.
///
/// A name gets `#` when it is restricted or used as an input subject and
/// `o` otherwise; every type it carries gets `o`. Type variables left by
/// simple inference become `o[Unit]` at the level of their node.
pub fn reconstruct(p: &Process, env: &SimpleEnv, g: &LevelGraph) -> (TypeEnv, Process) {
    let restricted: HashSet<Name> = restricted_names(p).into_iter().collect();
    let inputs = input_subjects(p);
    let type_of = |n: &Name| -> Type {
        let cap = if restricted.contains(n) || inputs.contains(n) {
            Capability::Sharp
        } else {
            Capability::Out
        };
        let st = env.get(n).cloned().unwrap_or(SimpleType::Unit);
        build_type(g, &(n.clone(), Vec::new()), &st, cap)
    };
    let mut gamma = TypeEnv::new();
    for n in free_names_in_order(p) {
        gamma.set(n.clone(), type_of(&n));
    }
    (gamma, annotate(p, &type_of))
}

fn build_type(g: &LevelGraph, path: &NodePath, st: &SimpleType, cap: Capability) -> Type {
    let level = g.level_of(path).unwrap_or(0);
    match st {
        SimpleType::Unit => Type::Unit,
        SimpleType::Nat => Type::Nat,
        SimpleType::Var(_) => Type::chan(cap, level, vec![Type::Unit]),
        SimpleType::Chan(ps) => {
            let payload = ps
                .iter()
                .enumerate()
                .map(|(i, p)| {
                    let mut child = path.clone();
                    child.1.push(i);
                    build_type(g, &child, p, Capability::Out)
                })
                .collect();
            Type::chan(cap, level, payload)
        }
    }
}

fn input_subjects(p: &Process) -> HashSet<Name> {
    fn go(p: &Process, out: &mut HashSet<Name>) {
        match p {
            Process::Nil | Process::Out { .. } => {}
            Process::Par(l, r) => {
                go(l, out);
                go(r, out);
            }
            Process::Res { body, .. } => go(body, out),
            Process::In { subject, body, .. } | Process::RepIn { subject, body, .. } => {
                out.insert(subject.clone());
                go(body, out);
            }
        }
    }
    let mut out = HashSet::new();
    go(p, &mut out);
    out
}

fn annotate(p: &Process, type_of: &dyn Fn(&Name) -> Type) -> Process {
    match p {
        Process::Nil | Process::Out { .. } => p.clone(),
        Process::Par(l, r) => Process::par(annotate(l, type_of), annotate(r, type_of)),
        Process::Res {
            name, kind, body, ..
        } => Process::Res {
            name: name.clone(),
            annotation: Some(type_of(name)),
            kind: *kind,
            body: Box::new(annotate(body, type_of)),
        },
        Process::In {
            subject,
            params,
            body,
        } => Process::input(subject, params.clone(), annotate(body, type_of)),
        Process::RepIn {
            subject,
            params,
            body,
        } => Process::rep_input(subject, params.clone(), annotate(body, type_of)),
    }
}

/// Infers a typing of `p` with least levels, and checks it.
pub fn infer(p: &Process, mode: InferMode) -> Result<Inferred, InferError> {
    let simple = infer_simple(p)?;
    if let Some(x) = simple::non_local_name(p) {
        return Err(InferError::NotLocalised(x.display().to_string()));
    }
    let mut graph = build_graph(p, &simple);
    if mode == InferMode::DsEquality {
        graph.equalize();
    }
    let levels = assign_levels(&graph)?;
    graph.levels = Some(levels);
    let (env, process) = reconstruct(p, &simple, &graph);
    let weight = check(&env, &process).map_err(InferError::Internal)?;
    Ok(Inferred {
        env,
        process,
        simple,
        graph,
        weight,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_process, parse_type};

    fn ty(s: &str) -> Type {
        parse_type(s).unwrap()
    }

    #[test]
    fn example_four_two() {
        let p = parse_process("!c(z).b<z> | a<c> | a<b>").unwrap();
        let r = infer(&p, InferMode::Flexible).unwrap();
        assert_eq!(r.env.lookup("b"), Some(&ty("o0[o0[Unit]]")));
        assert_eq!(r.env.lookup("c"), Some(&ty("#1[o0[Unit]]")));
        assert_eq!(r.env.lookup("a"), Some(&ty("o0[o1[o0[Unit]]]")));
    }

    #[test]
    fn single_output() {
        let r = infer(&parse_process("a<*>").unwrap(), InferMode::Flexible).unwrap();
        assert_eq!(r.env.lookup("a"), Some(&ty("o0[Unit]")));
        assert_eq!(r.weight, 0);
    }

    #[test]
    fn failures() {
        let code = |s: &str| {
            infer(&parse_process(s).unwrap(), InferMode::Flexible)
                .unwrap_err()
                .code()
        };
        assert_eq!(code("a(x).x(y).0"), "LOC");
        assert_eq!(code("a<a>"), "OCC");
        assert_eq!(code("!a(x).a<x>"), "CYC");
        assert_eq!(code("!a(x).b<x> | !b(y).a<y>"), "CYC");
        assert_eq!(
            code("(new u)(!u(x).x<*> | (new v)(!v().u<t> | u<v>))"),
            "CYC"
        );
    }

    #[test]
    fn restrictions_are_annotated() {
        let p = parse_process("new b. (!b().c<*> | b<*>)").unwrap();
        let r = infer(&p, InferMode::Flexible).unwrap();
        let Process::Res { annotation, .. } = &r.process else {
            panic!()
        };
        assert_eq!(annotation.as_ref(), Some(&ty("#1[Unit]")));
        assert_eq!(r.env.lookup("c"), Some(&ty("o0[Unit]")));
    }

    #[test]
    fn equality_mode_loses_level_flexibility() {
        // Two servers of different levels sent on one channel.
        let src = "a<p> | a<q> | !p(z).q<z> | !q(w).0";
        let p = parse_process(src).unwrap();
        assert!(infer(&p, InferMode::Flexible).is_ok());
        assert_eq!(infer(&p, InferMode::DsEquality).unwrap_err().code(), "CYC");
    }
}

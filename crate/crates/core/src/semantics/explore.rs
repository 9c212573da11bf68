use std::collections::HashMap;

use rayon::prelude::*;

use super::normal::{normalize, NormalProcess};
use super::successors;
use crate::syntax::Process;
use crate::typing::{derive, multiset_greater, CheckMode, Measure, TypeEnv};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bounds {
    pub max_states: usize,
    pub max_depth: usize,
}

impl Default for Bounds {
    fn default() -> Bounds {
        Bounds {
            max_states: 100_000,
            max_depth: 100_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    /// Every path reaches a stuck state.
    Terminated,
    /// Exploration was cut short by a bound before reaching a verdict.
    BoundExceeded,
    /// A reachable state that can reach itself again; the cycle is listed
    /// from that state back to it.
    Diverges { cycle: Vec<String> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeCertificate {
    pub parent: usize,
    pub child: usize,
    pub before: Measure,
    pub after: Measure,
}

#[derive(Debug, Clone)]
pub struct ExecutionReport {
    pub verdict: Verdict,
    /// Reachable states in discovery order; index 0 is the initial state.
    pub states: Vec<NormalProcess>,
    /// Reduction edges between state indices, in exploration order.
    pub edges: Vec<(usize, usize)>,
    pub max_depth: usize,
    pub measure_trace: Option<Vec<EdgeCertificate>>,
}

impl ExecutionReport {
    pub fn steps(&self) -> usize {
        self.edges.len()
    }

    /// One line per edge, with the measures when the run was certified.
    pub fn trace_lines(&self) -> Vec<String> {
        let text = |i: usize| self.states[i].to_string();
        match &self.measure_trace {
            Some(certs) => certs
                .iter()
                .enumerate()
                .map(|(n, c)| {
                    format!(
                        "STEP {}: {} --> {} ; measure {} > {}",
                        n + 1,
                        text(c.parent),
                        text(c.child),
                        c.before,
                        c.after
                    )
                })
                .collect(),
            None => self
                .edges
                .iter()
                .enumerate()
                .map(|(n, &(p, c))| format!("STEP {}: {} --> {}", n + 1, text(p), text(c)))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("certification failed at `{parent}` --> `{child}`: {reason}")]
pub struct CertificationFailure {
    pub parent: String,
    pub child: String,
    pub reason: String,
}

/// Breadth-first exploration of the reduction graph of `p`.
///
/// Successors of a whole layer are computed in parallel and merged in
/// frontier order, so the report does not depend on scheduling.
pub fn explore(p: &Process, bounds: Bounds) -> ExecutionReport {
    let root = normalize(p);
    let mut index: HashMap<String, usize> = HashMap::new();
    index.insert(root.key().to_string(), 0);
    let mut states = vec![root];
    let mut succ: Vec<Vec<usize>> = vec![Vec::new()];
    let mut edges = Vec::new();
    let mut truncated = false;
    let mut frontier = vec![0usize];
    let mut depth = 0;

    while !frontier.is_empty() {
        let layer: Vec<Vec<NormalProcess>> = frontier
            .par_iter()
            .map(|&i| successors(&states[i]))
            .collect();
        if depth >= bounds.max_depth {
            truncated |= layer.iter().any(|s| !s.is_empty());
            break;
        }
        let mut next = Vec::new();
        for (&i, children) in frontier.iter().zip(layer) {
            for child in children {
                let j = match index.get(child.key()) {
                    Some(&j) => j,
                    None if states.len() >= bounds.max_states => {
                        truncated = true;
                        continue;
                    }
                    None => {
                        let j = states.len();
                        index.insert(child.key().to_string(), j);
                        states.push(child);
                        succ.push(Vec::new());
                        next.push(j);
                        j
                    }
                };
                succ[i].push(j);
                edges.push((i, j));
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
        depth += 1;
    }

    let verdict = match find_cycle(&succ) {
        Some(cycle) => Verdict::Diverges {
            cycle: cycle.into_iter().map(|i| states[i].to_string()).collect(),
        },
        None if truncated => Verdict::BoundExceeded,
        None => Verdict::Terminated,
    };
    ExecutionReport {
        verdict,
        states,
        edges,
        max_depth: depth,
        measure_trace: None,
    }
}

/// A cycle in the graph, as a list of nodes whose first and last entries
/// coincide.
fn find_cycle(succ: &[Vec<usize>]) -> Option<Vec<usize>> {
    #[derive(Clone, Copy, PartialEq)]
    enum Colour {
        White,
        Grey,
        Black,
    }
    let mut colour = vec![Colour::White; succ.len()];
    for start in 0..succ.len() {
        if colour[start] != Colour::White {
            continue;
        }
        // Stack of (node, next successor position).
        let mut stack = vec![(start, 0usize)];
        colour[start] = Colour::Grey;
        while let Some(top) = stack.last_mut() {
            let v = top.0;
            if top.1 < succ[v].len() {
                let w = succ[v][top.1];
                top.1 += 1;
                match colour[w] {
                    Colour::White => {
                        colour[w] = Colour::Grey;
                        stack.push((w, 0));
                    }
                    Colour::Grey => {
                        let from = stack.iter().position(|&(u, _)| u == w).unwrap();
                        let mut cycle: Vec<usize> = stack[from..].iter().map(|&(u, _)| u).collect();
                        cycle.push(w);
                        return Some(cycle);
                    }
                    Colour::Black => {}
                }
            } else {
                colour[v] = Colour::Black;
                stack.pop();
            }
        }
    }
    None
}

/// Explores `p` and checks that the measure under `env` strictly decreases
/// along every reduction edge.
pub fn certified_run(
    env: &TypeEnv,
    p: &Process,
    bounds: Bounds,
) -> Result<ExecutionReport, CertificationFailure> {
    let mut report = explore(p, bounds);
    let measures: Vec<Result<Measure, String>> = report
        .states
        .par_iter()
        .map(|s| {
            derive(env, &s.to_process(), CheckMode::Subtyping)
                .map(|t| t.measure)
                .map_err(|e| e.to_string())
        })
        .collect();
    let text = |i: usize| report.states[i].to_string();
    if let Err(e) = &measures[0] {
        return Err(CertificationFailure {
            parent: text(0),
            child: text(0),
            reason: format!("initial state is not typable: {e}"),
        });
    }
    let mut certs = Vec::with_capacity(report.edges.len());
    for &(i, j) in &report.edges {
        let before = measures[i].clone().expect("parents are checked first");
        let after = match &measures[j] {
            Ok(m) => m.clone(),
            Err(e) => {
                return Err(CertificationFailure {
                    parent: text(i),
                    child: text(j),
                    reason: format!("successor is not typable: {e}"),
                })
            }
        };
        if !multiset_greater(&before, &after) {
            return Err(CertificationFailure {
                parent: text(i),
                child: text(j),
                reason: format!("measure {before} does not exceed {after}"),
            });
        }
        certs.push(EdgeCertificate {
            parent: i,
            child: j,
            before,
            after,
        });
    }
    if let Verdict::Diverges { cycle } = &report.verdict {
        return Err(CertificationFailure {
            parent: cycle[0].clone(),
            child: cycle[1].clone(),
            reason: "typed process revisits a state".to_string(),
        });
    }
    report.measure_trace = Some(certs);
    Ok(report)
}

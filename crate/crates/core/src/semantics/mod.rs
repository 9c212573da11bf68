//! Reduction semantics: structural congruence, one-step reduction and
//! bounded exhaustive exploration.

mod explore;
mod normal;

pub use explore::{
    certified_run, explore, Bounds, CertificationFailure, EdgeCertificate, ExecutionReport, Verdict,
};
pub(crate) use normal::next_permutation;
pub use normal::{congruent, normalize, NormalProcess, Restriction};

use std::collections::HashSet;

use crate::subst::substitute_many;
use crate::syntax::{Process, Value};

/// All one-step successors of `p`, normalised and deduplicated up to
/// congruence.
pub fn step(p: &Process) -> Vec<Process> {
    successors(&normalize(p))
        .into_iter()
        .map(|n| n.to_process())
        .collect()
}

/// Successors of a normal form, sorted by key.
pub fn successors(state: &NormalProcess) -> Vec<NormalProcess> {
    let comps = &state.components;
    let mut out: Vec<NormalProcess> = Vec::new();
    let mut seen = HashSet::new();
    for (i, msg) in comps.iter().enumerate() {
        let Process::Out { subject, payload } = msg else {
            continue;
        };
        for (j, recv) in comps.iter().enumerate() {
            let (params, body, replicated) = match recv {
                Process::In {
                    subject: s,
                    params,
                    body,
                } if s == subject => (params, body, false),
                Process::RepIn {
                    subject: s,
                    params,
                    body,
                } if s == subject => (params, body, true),
                _ => continue,
            };
            let Some(reduct) = communicate(params, body, payload) else {
                continue;
            };
            let rest = comps
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != i && (replicated || k != j))
                .map(|(_, c)| c.clone());
            let mut next = Process::par_all(rest.chain(std::iter::once(reduct)));
            for r in state.restrictions.iter().rev() {
                next = Process::Res {
                    name: r.name.clone(),
                    annotation: r.annotation.clone(),
                    kind: r.kind,
                    body: Box::new(next),
                };
            }
            let n = normalize(&next);
            if seen.insert(n.key().to_string()) {
                out.push(n);
            }
        }
    }
    out.sort_by(|a, b| a.key().cmp(b.key()));
    out
}

/// The continuation `body` with the message substituted for `params`;
/// `None` when the arities do not fit.
fn communicate(params: &[crate::name::Name], body: &Process, payload: &[Value]) -> Option<Process> {
    let values: Vec<Value> = if params.is_empty() && payload == [Value::Star] {
        Vec::new()
    } else if params.len() == payload.len() {
        payload.iter().map(Value::evaluate).collect()
    } else {
        return None;
    };
    let subst: Vec<_> = params.iter().cloned().zip(values).collect();
    // A sort error cannot arise from a name, and arithmetic in subject
    // position is stuck rather than a reduction.
    substitute_many(body, &subst).ok()
}

//! Free names, capture-avoiding substitution and α-equivalence.

use std::collections::{BTreeSet, HashMap, HashSet};

use crate::name::Name;
use crate::syntax::{Process, Value};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("sort error: `{value}` cannot replace `{name}` in subject position")]
pub struct SortError {
    pub name: String,
    pub value: String,
}

pub fn free_names(p: &Process) -> BTreeSet<Name> {
    free_names_in_order(p).into_iter().collect()
}

/// Free names in order of first occurrence, without repetition.
pub fn free_names_in_order(p: &Process) -> Vec<Name> {
    fn go(p: &Process, bound: &mut Vec<Name>, seen: &mut HashSet<Name>, out: &mut Vec<Name>) {
        let mut visit = |n: &Name, bound: &Vec<Name>, out: &mut Vec<Name>| {
            if !bound.contains(n) && seen.insert(n.clone()) {
                out.push(n.clone());
            }
        };
        match p {
            Process::Nil => {}
            Process::Par(l, r) => {
                go(l, bound, seen, out);
                go(r, bound, seen, out);
            }
            Process::Out { subject, payload } => {
                visit(subject, bound, out);
                let mut names = Vec::new();
                for v in payload {
                    v.free_names_into(&mut names);
                }
                for n in &names {
                    visit(n, bound, out);
                }
            }
            Process::Res { name, body, .. } => {
                bound.push(name.clone());
                go(body, bound, seen, out);
                bound.pop();
            }
            Process::In {
                subject,
                params,
                body,
            }
            | Process::RepIn {
                subject,
                params,
                body,
            } => {
                visit(subject, bound, out);
                let mark = bound.len();
                bound.extend(params.iter().cloned());
                go(body, bound, seen, out);
                bound.truncate(mark);
            }
        }
    }
    let mut out = Vec::new();
    go(p, &mut Vec::new(), &mut HashSet::new(), &mut out);
    out
}

/// Binders in pre-order: restrictions and input parameters.
pub fn bound_names_in_order(p: &Process) -> Vec<Name> {
    fn go(p: &Process, out: &mut Vec<Name>) {
        match p {
            Process::Nil | Process::Out { .. } => {}
            Process::Par(l, r) => {
                go(l, out);
                go(r, out);
            }
            Process::Res { name, body, .. } => {
                out.push(name.clone());
                go(body, out);
            }
            Process::In { params, body, .. } | Process::RepIn { params, body, .. } => {
                out.extend(params.iter().cloned());
                go(body, out);
            }
        }
    }
    let mut out = Vec::new();
    go(p, &mut out);
    out
}

/// Names bound by restriction anywhere in `p`.
pub fn restricted_names(p: &Process) -> Vec<Name> {
    fn go(p: &Process, out: &mut Vec<Name>) {
        match p {
            Process::Nil | Process::Out { .. } => {}
            Process::Par(l, r) => {
                go(l, out);
                go(r, out);
            }
            Process::Res { name, body, .. } => {
                out.push(name.clone());
                go(body, out);
            }
            Process::In { body, .. } | Process::RepIn { body, .. } => go(body, out),
        }
    }
    let mut out = Vec::new();
    go(p, &mut out);
    out
}

/// True when all binders are pairwise distinct and distinct from the free
/// names.
pub fn is_barendregt(p: &Process) -> bool {
    let bound = bound_names_in_order(p);
    let mut seen: HashSet<Name> = free_names(p).into_iter().collect();
    bound.into_iter().all(|n| seen.insert(n))
}

/// `p[v/x]`, with every binder of the result renamed apart.
pub fn substitute(p: &Process, x: &Name, v: &Value) -> Result<Process, SortError> {
    substitute_many(p, &[(x.clone(), v.clone())])
}

/// Simultaneous substitution. Every binder in the result is fresh, so the
/// result satisfies the Barendregt convention whenever `p` did, and no free
/// name of a substituted value can be captured.
pub fn substitute_many(p: &Process, subst: &[(Name, Value)]) -> Result<Process, SortError> {
    let map: HashMap<Name, Value> = subst.iter().cloned().collect();
    rename(p, &map)
}

/// Renames every binder of `p` to a fresh name.
pub fn refresh(p: &Process) -> Process {
    rename(p, &HashMap::new()).expect("renaming to names never fails")
}

fn rename(p: &Process, map: &HashMap<Name, Value>) -> Result<Process, SortError> {
    let subject = |n: &Name, map: &HashMap<Name, Value>| -> Result<Name, SortError> {
        match map.get(n) {
            None => Ok(n.clone()),
            Some(Value::Name(m)) => Ok(m.clone()),
            Some(other) => Err(SortError {
                name: n.display().to_string(),
                value: format!("{other:?}"),
            }),
        }
    };
    Ok(match p {
        Process::Nil => Process::Nil,
        Process::Par(l, r) => Process::par(rename(l, map)?, rename(r, map)?),
        Process::Out {
            subject: s,
            payload,
        } => Process::Out {
            subject: subject(s, map)?,
            payload: payload.iter().map(|v| rename_value(v, map)).collect(),
        },
        Process::Res {
            name,
            annotation,
            kind,
            body,
        } => {
            let fresh = name.refresh();
            let mut inner = map.clone();
            inner.insert(name.clone(), Value::Name(fresh.clone()));
            Process::Res {
                name: fresh,
                annotation: annotation.clone(),
                kind: *kind,
                body: Box::new(rename(body, &inner)?),
            }
        }
        Process::In {
            subject: s,
            params,
            body,
        }
        | Process::RepIn {
            subject: s,
            params,
            body,
        } => {
            let s = subject(s, map)?;
            let fresh: Vec<Name> = params.iter().map(Name::refresh).collect();
            let mut inner = map.clone();
            for (old, new) in params.iter().zip(&fresh) {
                inner.insert(old.clone(), Value::Name(new.clone()));
            }
            let body = Box::new(rename(body, &inner)?);
            if matches!(p, Process::In { .. }) {
                Process::In {
                    subject: s,
                    params: fresh,
                    body,
                }
            } else {
                Process::RepIn {
                    subject: s,
                    params: fresh,
                    body,
                }
            }
        }
    })
}

fn rename_value(v: &Value, map: &HashMap<Name, Value>) -> Value {
    match v {
        Value::Name(n) => map.get(n).cloned().unwrap_or_else(|| v.clone()),
        Value::Add(l, r) => Value::Add(
            Box::new(rename_value(l, map)),
            Box::new(rename_value(r, map)),
        ),
        Value::Mul(l, r) => Value::Mul(
            Box::new(rename_value(l, map)),
            Box::new(rename_value(r, map)),
        ),
        Value::Star | Value::Nat(_) => v.clone(),
    }
}

/// Syntactic equality up to renaming of bound names.
pub fn alpha_eq(p: &Process, q: &Process) -> bool {
    fn names_eq(a: &Name, b: &Name, env: &[(Name, Name)]) -> bool {
        for (x, y) in env.iter().rev() {
            if x == a || y == b {
                return x == a && y == b;
            }
        }
        a == b
    }
    fn values_eq(a: &Value, b: &Value, env: &[(Name, Name)]) -> bool {
        match (a, b) {
            (Value::Star, Value::Star) => true,
            (Value::Nat(x), Value::Nat(y)) => x == y,
            (Value::Name(x), Value::Name(y)) => names_eq(x, y, env),
            (Value::Add(a1, a2), Value::Add(b1, b2)) | (Value::Mul(a1, a2), Value::Mul(b1, b2)) => {
                values_eq(a1, b1, env) && values_eq(a2, b2, env)
            }
            _ => false,
        }
    }
    fn go(p: &Process, q: &Process, env: &mut Vec<(Name, Name)>) -> bool {
        match (p, q) {
            (Process::Nil, Process::Nil) => true,
            (Process::Par(a, b), Process::Par(c, d)) => go(a, c, env) && go(b, d, env),
            (
                Process::Out {
                    subject: s1,
                    payload: v1,
                },
                Process::Out {
                    subject: s2,
                    payload: v2,
                },
            ) => {
                names_eq(s1, s2, env)
                    && v1.len() == v2.len()
                    && v1.iter().zip(v2).all(|(a, b)| values_eq(a, b, env))
            }
            (
                Process::Res {
                    name: n1,
                    annotation: t1,
                    kind: k1,
                    body: b1,
                },
                Process::Res {
                    name: n2,
                    annotation: t2,
                    kind: k2,
                    body: b2,
                },
            ) => {
                if t1 != t2 || k1 != k2 {
                    return false;
                }
                env.push((n1.clone(), n2.clone()));
                let r = go(b1, b2, env);
                env.pop();
                r
            }
            (
                Process::In {
                    subject: s1,
                    params: x1,
                    body: b1,
                },
                Process::In {
                    subject: s2,
                    params: x2,
                    body: b2,
                },
            )
            | (
                Process::RepIn {
                    subject: s1,
                    params: x1,
                    body: b1,
                },
                Process::RepIn {
                    subject: s2,
                    params: x2,
                    body: b2,
                },
            ) => {
                if !names_eq(s1, s2, env) || x1.len() != x2.len() {
                    return false;
                }
                let mark = env.len();
                env.extend(x1.iter().cloned().zip(x2.iter().cloned()));
                let r = go(b1, b2, env);
                env.truncate(mark);
                r
            }
            _ => false,
        }
    }
    go(p, q, &mut Vec::new())
}

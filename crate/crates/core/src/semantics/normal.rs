use std::collections::HashSet;
use std::fmt;

use crate::name::Name;
use crate::subst::free_names;
use crate::syntax::{Process, ResKind, Type, Value};

/// Past this many candidate numberings of restricted names with equal
/// signatures the canonical key falls back to a single numbering. Keys stay sound (equal keys still mean
/// congruent processes) but congruent processes may then get distinct keys.
const MAX_ORDERINGS: usize = 720;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Restriction {
    pub name: Name,
    pub annotation: Option<Type>,
    pub kind: ResKind,
}

/// A process with every top-level restriction hoisted, unused restrictions
/// dropped, no `0` components, and components in canonical order. Bodies of
/// prefixes are normalised the same way.
#[derive(Debug, Clone)]
pub struct NormalProcess {
    pub restrictions: Vec<Restriction>,
    pub components: Vec<Process>,
    key: String,
}

impl NormalProcess {
    /// Identifies the congruence class: two processes are structurally
    /// congruent exactly when their keys are equal.
    pub fn key(&self) -> &str {
        &self.key
    }

    pub fn to_process(&self) -> Process {
        let mut p = Process::par_all(self.components.iter().cloned());
        for r in self.restrictions.iter().rev() {
            p = Process::Res {
                name: r.name.clone(),
                annotation: r.annotation.clone(),
                kind: r.kind,
                body: Box::new(p),
            };
        }
        p
    }

    pub fn is_nil(&self) -> bool {
        self.components.is_empty()
    }
}

impl PartialEq for NormalProcess {
    fn eq(&self, other: &Self) -> bool {
        self.key == other.key
    }
}

impl Eq for NormalProcess {}

impl fmt::Display for NormalProcess {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_process())
    }
}

pub fn normalize(p: &Process) -> NormalProcess {
    let mut ctx = Vec::new();
    let c = canon(p, &mut ctx, 0);
    NormalProcess {
        restrictions: c.restrictions,
        components: c.components,
        key: c.key,
    }
}

/// Structural congruence.
pub fn congruent(p: &Process, q: &Process) -> bool {
    normalize(p).key == normalize(q).key
}

struct Canon {
    key: String,
    restrictions: Vec<Restriction>,
    components: Vec<Process>,
}

fn flatten<'p>(p: &'p Process, res: &mut Vec<Restriction>, threads: &mut Vec<&'p Process>) {
    match p {
        Process::Nil => {}
        Process::Par(l, r) => {
            flatten(l, res, threads);
            flatten(r, res, threads);
        }
        Process::Res {
            name,
            annotation,
            kind,
            body,
        } => {
            res.push(Restriction {
                name: name.clone(),
                annotation: annotation.clone(),
                kind: *kind,
            });
            flatten(body, res, threads);
        }
        thread => threads.push(thread),
    }
}

/// `ctx` labels the names bound by enclosing prefixes and restrictions.
fn canon(p: &Process, ctx: &mut Vec<(Name, String)>, depth: usize) -> Canon {
    let mut all_res = Vec::new();
    let mut threads = Vec::new();
    flatten(p, &mut all_res, &mut threads);

    let thread_names: Vec<HashSet<Name>> = threads
        .iter()
        .map(|t| free_names(t).into_iter().collect())
        .collect();
    let restrictions: Vec<Restriction> = all_res
        .into_iter()
        .filter(|r| thread_names.iter().any(|s| s.contains(&r.name)))
        .collect();

    // Keys that do not tell restricted names apart give each name a signature
    // that survives renaming. Only names with equal signatures need their
    // relative numbering searched.
    let mark = ctx.len();
    for r in &restrictions {
        ctx.push((r.name.clone(), format!("ν{depth}")));
    }
    let blind: Vec<String> = threads
        .iter()
        .map(|t| thread_canon(t, ctx, depth).0)
        .collect();
    ctx.truncate(mark);
    let mut signed: Vec<(String, Restriction)> = restrictions
        .into_iter()
        .map(|r| {
            let mut keys: Vec<&str> = blind
                .iter()
                .zip(&thread_names)
                .filter(|(_, s)| s.contains(&r.name))
                .map(|(k, _)| k.as_str())
                .collect();
            keys.sort_unstable();
            let head = format!(
                "{:?}{:?}|",
                r.kind,
                r.annotation.as_ref().map(Type::to_string)
            );
            (head + &keys.join("|"), r)
        })
        .collect();
    signed.sort_by(|a, b| a.0.cmp(&b.0));

    let mut groups: Vec<Vec<usize>> = Vec::new();
    for i in 0..signed.len() {
        if i > 0 && signed[i - 1].0 == signed[i].0 {
            groups.last_mut().unwrap().push(i);
        } else {
            groups.push(vec![i]);
        }
    }
    let count = groups.iter().fold(1usize, |acc, g| {
        (2..=g.len()).fold(acc, |a, k| a.saturating_mul(k))
    });
    let search = count <= MAX_ORDERINGS;
    let signed: Vec<Restriction> = signed.into_iter().map(|(_, r)| r).collect();

    let mut best: Option<(String, Vec<Restriction>, Vec<Process>)> = None;
    let mut current: Vec<Vec<usize>> = groups.clone();
    loop {
        let numbering: Vec<Restriction> = current
            .iter()
            .flatten()
            .map(|&i| signed[i].clone())
            .collect();
        let candidate = labelled(&threads, &numbering, ctx, depth);
        if best.as_ref().is_none_or(|b| candidate.0 < b.0) {
            best = Some(candidate);
        }
        if !search {
            break;
        }
        // Advance the odometer of per-group permutations.
        let mut advanced = false;
        for cur in current.iter_mut() {
            if next_permutation(cur) {
                advanced = true;
                break;
            }
        }
        if !advanced {
            break;
        }
    }
    let (key, restrictions, components) = best.expect("at least one numbering");
    Canon {
        key,
        restrictions,
        components,
    }
}

/// Key and normalised components with the restricted names numbered in the
/// order given.
fn labelled(
    threads: &[&Process],
    ordered: &[Restriction],
    ctx: &mut Vec<(Name, String)>,
    depth: usize,
) -> (String, Vec<Restriction>, Vec<Process>) {
    let mark = ctx.len();
    for (i, r) in ordered.iter().enumerate() {
        ctx.push((r.name.clone(), format!("ν{depth}.{i}")));
    }
    let mut parts: Vec<(String, Process)> = threads
        .iter()
        .map(|t| thread_canon(t, ctx, depth))
        .collect();
    ctx.truncate(mark);
    parts.sort_by(|a, b| a.0.cmp(&b.0));

    let mut key = String::new();
    for r in ordered {
        key.push_str("new");
        if r.kind == ResKind::Functional {
            key.push_str(" fun");
        }
        if let Some(t) = &r.annotation {
            key.push_str(&format!(":{t}"));
        }
        key.push(';');
    }
    let mut components = Vec::with_capacity(parts.len());
    for (i, (k, p)) in parts.into_iter().enumerate() {
        if i > 0 {
            key.push_str(" | ");
        }
        key.push_str(&k);
        components.push(p);
    }
    (key, ordered.to_vec(), components)
}

fn label(n: &Name, ctx: &[(Name, String)]) -> String {
    match ctx.iter().rev().find(|(m, _)| m == n) {
        Some((_, l)) => l.clone(),
        None => format!("{}#{}", n.display(), n.id()),
    }
}

fn value_key(v: &Value, ctx: &[(Name, String)], out: &mut String) {
    match v {
        Value::Star => out.push('*'),
        Value::Nat(k) => out.push_str(&k.to_string()),
        Value::Name(n) => out.push_str(&label(n, ctx)),
        Value::Add(l, r) | Value::Mul(l, r) => {
            out.push_str(if matches!(v, Value::Add(..)) {
                "(+ "
            } else {
                "(* "
            });
            value_key(l, ctx, out);
            out.push(' ');
            value_key(r, ctx, out);
            out.push(')');
        }
    }
}

/// Key of a single output or input-prefixed thread, and the thread with its
/// body normalised.
fn thread_canon(t: &Process, ctx: &mut Vec<(Name, String)>, depth: usize) -> (String, Process) {
    match t {
        Process::Out { subject, payload } => {
            let mut k = label(subject, ctx);
            k.push('<');
            for (i, v) in payload.iter().enumerate() {
                if i > 0 {
                    k.push(',');
                }
                value_key(v, ctx, &mut k);
            }
            k.push('>');
            (k, t.clone())
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
            let replicated = matches!(t, Process::RepIn { .. });
            let mut k = String::new();
            if replicated {
                k.push('!');
            }
            k.push_str(&label(subject, ctx));
            k.push_str(&format!("/{}.{{", params.len()));
            let mark = ctx.len();
            for x in params {
                let l = format!("${}", ctx.len());
                ctx.push((x.clone(), l));
            }
            let inner = canon(body, ctx, depth + 1);
            ctx.truncate(mark);
            k.push_str(&inner.key);
            k.push('}');
            let body = NormalProcess {
                restrictions: inner.restrictions,
                components: inner.components,
                key: String::new(),
            }
            .to_process();
            let p = if replicated {
                Process::rep_input(subject, params.clone(), body)
            } else {
                Process::input(subject, params.clone(), body)
            };
            (k, p)
        }
        _ => unreachable!("threads are outputs or inputs"),
    }
}

/// Lexicographic successor; false (and `v` reset to sorted) after the last
/// permutation.
pub(crate) fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        v.reverse();
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

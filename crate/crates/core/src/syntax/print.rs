use std::collections::{HashMap, HashSet};
use std::fmt::Write;

use super::{Process, ResKind, Value};
use crate::name::Name;
use crate::subst::{bound_names_in_order, free_names_in_order};

/// How names are spelled when printing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NamePolicy {
    /// Source spellings, with a numeric suffix wherever two distinct names
    /// would otherwise print the same. The output parses back to an
    /// α-equivalent term.
    Readable,
    /// Bound names become `_0, _1, ...` in binding order and free names carry
    /// their identity, so α-equivalent terms print identically.
    Canonical,
}

pub fn print_process_with(p: &Process, policy: NamePolicy) -> String {
    let names = match policy {
        NamePolicy::Readable => readable_names(p),
        NamePolicy::Canonical => canonical_names(p),
    };
    let mut out = String::new();
    Printer { names: &names }.process(p, &mut out, false);
    out
}

pub(crate) fn readable_names(p: &Process) -> HashMap<Name, String> {
    let mut used: HashSet<String> = HashSet::new();
    let mut names = HashMap::new();
    let mut assign = |n: Name, names: &mut HashMap<Name, String>| {
        if names.contains_key(&n) {
            return;
        }
        let base = n.display().to_string();
        let mut spelling = base.clone();
        let mut k = 1;
        while used.contains(&spelling) {
            spelling = format!("{base}_{k}");
            k += 1;
        }
        used.insert(spelling.clone());
        names.insert(n, spelling);
    };
    for n in free_names_in_order(p) {
        assign(n, &mut names);
    }
    for n in bound_names_in_order(p) {
        assign(n, &mut names);
    }
    names
}

fn canonical_names(p: &Process) -> HashMap<Name, String> {
    let mut names = HashMap::new();
    for n in free_names_in_order(p) {
        let s = format!("{}#{}", n.display(), n.id());
        names.insert(n, s);
    }
    for (i, n) in bound_names_in_order(p).into_iter().enumerate() {
        names.entry(n).or_insert_with(|| format!("_{i}"));
    }
    names
}

struct Printer<'a> {
    names: &'a HashMap<Name, String>,
}

impl Printer<'_> {
    fn name(&self, n: &Name, out: &mut String) {
        match self.names.get(n) {
            Some(s) => out.push_str(s),
            None => out.push_str(n.display()),
        }
    }

    fn names(&self, ns: &[Name], out: &mut String) {
        for (i, n) in ns.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            self.name(n, out);
        }
    }

    /// `nested` is true when `p` sits in a position where a bare `|` would
    /// bind wrongly.
    fn process(&self, p: &Process, out: &mut String, nested: bool) {
        match p {
            Process::Nil => out.push('0'),
            Process::Par(l, r) => {
                if nested {
                    out.push('(');
                }
                self.process(l, out, false);
                out.push_str(" | ");
                self.process(r, out, true);
                if nested {
                    out.push(')');
                }
            }
            Process::Out { subject, payload } => {
                self.name(subject, out);
                out.push('<');
                for (i, v) in payload.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    self.value(v, out, 0);
                }
                out.push('>');
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
                if matches!(p, Process::RepIn { .. }) {
                    out.push('!');
                }
                self.name(subject, out);
                out.push('(');
                self.names(params, out);
                out.push_str(").");
                self.process(body, out, true);
            }
            Process::Res { .. } => {
                out.push_str("(new ");
                let mut cur = p;
                let mut first = true;
                while let Process::Res {
                    name,
                    annotation,
                    kind,
                    body,
                } = cur
                {
                    if !first {
                        out.push_str(", ");
                    }
                    first = false;
                    self.name(name, out);
                    if *kind == ResKind::Functional {
                        out.push_str(" fun");
                    }
                    if let Some(t) = annotation {
                        let _ = write!(out, ":{t}");
                    }
                    cur = body;
                }
                out.push(')');
                if !matches!(cur, Process::Par(..)) {
                    out.push(' ');
                }
                self.process(cur, out, true);
            }
        }
    }

    /// `prec`: 0 top, 1 operand of `+`, 2 operand of `*`.
    fn value(&self, v: &Value, out: &mut String, prec: u8) {
        match v {
            Value::Star => out.push('*'),
            Value::Nat(n) => {
                let _ = write!(out, "{n}");
            }
            Value::Name(n) => self.name(n, out),
            Value::Add(l, r) => {
                if prec > 0 {
                    out.push('(');
                }
                self.value(l, out, 0);
                out.push_str(" + ");
                self.value(r, out, 1);
                if prec > 0 {
                    out.push(')');
                }
            }
            Value::Mul(l, r) => {
                if prec > 1 {
                    out.push('(');
                }
                self.value(l, out, 1);
                out.push_str(" * ");
                self.value(r, out, 2);
                if prec > 1 {
                    out.push(')');
                }
            }
        }
    }
}

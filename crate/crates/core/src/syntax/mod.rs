//! Abstract syntax of the asynchronous polyadic π-calculus and its types.

mod lexer;
mod parser;
mod print;

pub(crate) use lexer::Tok;
pub(crate) use parser::Cursor;
pub use parser::{parse_env, parse_process, parse_type, EnvDecl};
pub(crate) use print::readable_names;
pub use print::{print_process_with, NamePolicy};

use std::fmt;

use crate::name::Name;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("syntax error at {line}:{column}: {message}")]
pub struct SyntaxError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Value {
    /// The unit constant `*`.
    Star,
    Name(Name),
    Nat(u64),
    Add(Box<Value>, Box<Value>),
    Mul(Box<Value>, Box<Value>),
}

impl Value {
    pub fn name(n: &Name) -> Value {
        Value::Name(n.clone())
    }

    pub fn as_name(&self) -> Option<&Name> {
        match self {
            Value::Name(n) => Some(n),
            _ => None,
        }
    }

    pub fn free_names_into(&self, out: &mut Vec<Name>) {
        match self {
            Value::Star | Value::Nat(_) => {}
            Value::Name(n) => out.push(n.clone()),
            Value::Add(l, r) | Value::Mul(l, r) => {
                l.free_names_into(out);
                r.free_names_into(out);
            }
        }
    }

    /// Folds closed arithmetic down to a literal. Sub-expressions that mention
    /// names, or that would overflow, are left as they are.
    pub fn evaluate(&self) -> Value {
        match self {
            Value::Add(l, r) | Value::Mul(l, r) => {
                let (l, r) = (l.evaluate(), r.evaluate());
                if let (Value::Nat(a), Value::Nat(b)) = (&l, &r) {
                    let folded = match self {
                        Value::Add(..) => a.checked_add(*b),
                        _ => a.checked_mul(*b),
                    };
                    if let Some(n) = folded {
                        return Value::Nat(n);
                    }
                }
                match self {
                    Value::Add(..) => Value::Add(Box::new(l), Box::new(r)),
                    _ => Value::Mul(Box::new(l), Box::new(r)),
                }
            }
            other => other.clone(),
        }
    }
}

/// Whether a restricted name is treated as functional or imperative by the
/// impure type system. The base system ignores the distinction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub enum ResKind {
    #[default]
    Imperative,
    Functional,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Process {
    Nil,
    Par(Box<Process>, Box<Process>),
    Out {
        subject: Name,
        payload: Vec<Value>,
    },
    Res {
        name: Name,
        annotation: Option<Type>,
        kind: ResKind,
        body: Box<Process>,
    },
    In {
        subject: Name,
        params: Vec<Name>,
        body: Box<Process>,
    },
    RepIn {
        subject: Name,
        params: Vec<Name>,
        body: Box<Process>,
    },
}

impl Process {
    pub fn par(l: Process, r: Process) -> Process {
        Process::Par(Box::new(l), Box::new(r))
    }

    /// Left-nested parallel composition of `procs`, as the parser builds
    /// it; `Nil` when empty.
    pub fn par_all<I: IntoIterator<Item = Process>>(procs: I) -> Process {
        procs
            .into_iter()
            .reduce(Process::par)
            .unwrap_or(Process::Nil)
    }

    pub fn out(subject: &Name, payload: Vec<Value>) -> Process {
        Process::Out {
            subject: subject.clone(),
            payload,
        }
    }

    pub fn input(subject: &Name, params: Vec<Name>, body: Process) -> Process {
        Process::In {
            subject: subject.clone(),
            params,
            body: Box::new(body),
        }
    }

    pub fn rep_input(subject: &Name, params: Vec<Name>, body: Process) -> Process {
        Process::RepIn {
            subject: subject.clone(),
            params,
            body: Box::new(body),
        }
    }

    pub fn res(name: &Name, annotation: Option<Type>, body: Process) -> Process {
        Process::Res {
            name: name.clone(),
            annotation,
            kind: ResKind::Imperative,
            body: Box::new(body),
        }
    }

    pub fn res_fun(name: &Name, annotation: Option<Type>, body: Process) -> Process {
        Process::Res {
            name: name.clone(),
            annotation,
            kind: ResKind::Functional,
            body: Box::new(body),
        }
    }

    /// Flattens nested parallel compositions into their components.
    pub fn components(&self) -> Vec<&Process> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(p) = stack.pop() {
            match p {
                Process::Par(l, r) => {
                    stack.push(r);
                    stack.push(l);
                }
                other => out.push(other),
            }
        }
        out
    }

    /// Number of prefixes and messages, a rough size measure.
    pub fn size(&self) -> usize {
        match self {
            Process::Nil => 0,
            Process::Par(l, r) => l.size() + r.size(),
            Process::Out { .. } => 1,
            Process::Res { body, .. } => body.size(),
            Process::In { body, .. } | Process::RepIn { body, .. } => 1 + body.size(),
        }
    }
}

impl fmt::Display for Process {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_process_with(self, NamePolicy::Readable))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Capability {
    /// Both input and output (`#`).
    Sharp,
    In,
    Out,
}

impl Capability {
    pub fn allows_input(self) -> bool {
        matches!(self, Capability::Sharp | Capability::In)
    }

    pub fn allows_output(self) -> bool {
        matches!(self, Capability::Sharp | Capability::Out)
    }

    fn sigil(self) -> char {
        match self {
            Capability::Sharp => '#',
            Capability::In => 'i',
            Capability::Out => 'o',
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Type {
    Unit,
    Nat,
    Chan {
        cap: Capability,
        level: u32,
        payload: Vec<Type>,
    },
    /// Unification variable, only ever seen inside inference.
    Var(u32),
}

impl Type {
    pub fn chan(cap: Capability, level: u32, payload: Vec<Type>) -> Type {
        Type::Chan {
            cap,
            level,
            payload,
        }
    }

    pub fn sharp(level: u32, payload: Vec<Type>) -> Type {
        Type::chan(Capability::Sharp, level, payload)
    }

    pub fn output(level: u32, payload: Vec<Type>) -> Type {
        Type::chan(Capability::Out, level, payload)
    }

    pub fn input(level: u32, payload: Vec<Type>) -> Type {
        Type::chan(Capability::In, level, payload)
    }

    pub fn level(&self) -> Option<u32> {
        match self {
            Type::Chan { level, .. } => Some(*level),
            _ => None,
        }
    }

    pub fn is_channel(&self) -> bool {
        matches!(self, Type::Chan { .. })
    }

    /// Nesting depth; base types have depth 1.
    pub fn depth(&self) -> usize {
        match self {
            Type::Chan { payload, .. } => 1 + payload.iter().map(Type::depth).max().unwrap_or(0),
            _ => 1,
        }
    }

    pub fn has_vars(&self) -> bool {
        match self {
            Type::Var(_) => true,
            Type::Chan { payload, .. } => payload.iter().any(Type::has_vars),
            _ => false,
        }
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Unit => f.write_str("Unit"),
            Type::Nat => f.write_str("Nat"),
            Type::Var(v) => write!(f, "'t{v}"),
            Type::Chan {
                cap,
                level,
                payload,
            } => {
                write!(f, "{}{}[", cap.sigil(), level)?;
                for (i, t) in payload.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{t}")?;
                }
                f.write_str("]")
            }
        }
    }
}

/// Matches a prefix of arity `arity` against a channel payload. A nullary
/// prefix stands for the exchange of a single unit value, so it fits both
/// `[]` and `[Unit]`.
pub fn payload_for_arity(payload: &[Type], arity: usize) -> Option<&[Type]> {
    if payload.len() == arity {
        Some(payload)
    } else if arity == 0 && payload == [Type::Unit] {
        Some(&[])
    } else {
        None
    }
}

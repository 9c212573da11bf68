//! The level-based type system: subtyping, weights and the termination
//! measure.

mod env;
mod measure;
mod subtype;

pub(crate) use env::Scope;
pub use env::{DuplicateBinding, TypeEnv};
pub use measure::{multiset_greater, Measure};
pub use subtype::subtype;

use std::fmt;

use crate::name::Name;
use crate::syntax::{Capability, Process, Type, Value};

/// Upper bound on the levels of the unguarded outputs of a process.
pub type Weight = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ErrorKind {
    Capability,
    PayloadMismatch,
    LevelViolation,
    UnboundName,
    MissingAnnotation,
    FunctionalInputNotIsolated,
}

impl ErrorKind {
    /// Stable short code used in diagnostics and machine output.
    pub fn code(self) -> &'static str {
        match self {
            ErrorKind::Capability => "CAP",
            ErrorKind::PayloadMismatch => "PAY",
            ErrorKind::LevelViolation => "LVL",
            ErrorKind::UnboundName => "UNB",
            ErrorKind::MissingAnnotation => "ANN",
            ErrorKind::FunctionalInputNotIsolated => "FUN",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct TypeError {
    pub kind: ErrorKind,
    pub message: String,
    /// The offending subterm, printed.
    pub location: String,
}

impl TypeError {
    pub(crate) fn new(kind: ErrorKind, message: impl Into<String>, at: &Process) -> TypeError {
        TypeError {
            kind,
            message: message.into(),
            location: at.to_string(),
        }
    }

    pub fn code(&self) -> &'static str {
        self.kind.code()
    }
}

impl fmt::Display for TypeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {} in `{}`",
            self.code(),
            self.message,
            self.location
        )
    }
}

/// Weight and measure of a typed process.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Typing {
    pub weight: Weight,
    pub measure: Measure,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckMode {
    /// Capabilities and subtyping.
    Subtyping,
    /// `#` types only, matched by equality.
    SharpOnly,
}

/// Minimal type of a value.
pub fn value_type(env: &TypeEnv, v: &Value) -> Result<Type, TypeError> {
    value_type_in(&Scope::new(env), v, &Process::Nil)
}

pub(crate) fn value_type_in(scope: &Scope, v: &Value, at: &Process) -> Result<Type, TypeError> {
    match v {
        Value::Star => Ok(Type::Unit),
        Value::Nat(_) => Ok(Type::Nat),
        Value::Name(n) => lookup(scope, n, at).cloned(),
        Value::Add(l, r) | Value::Mul(l, r) => {
            for side in [l, r] {
                let t = value_type_in(scope, side, at)?;
                if t != Type::Nat {
                    return Err(TypeError::new(
                        ErrorKind::PayloadMismatch,
                        format!("arithmetic over a value of type {t}"),
                        at,
                    ));
                }
            }
            Ok(Type::Nat)
        }
    }
}

pub(crate) fn lookup<'s>(scope: &'s Scope, n: &Name, at: &Process) -> Result<&'s Type, TypeError> {
    scope.get(n).ok_or_else(|| {
        TypeError::new(
            ErrorKind::UnboundName,
            format!("`{}` has no type", n.display()),
            at,
        )
    })
}

/// Minimal weight of `p` under `env`.
pub fn check(env: &TypeEnv, p: &Process) -> Result<Weight, TypeError> {
    derive(env, p, CheckMode::Subtyping).map(|t| t.weight)
}

/// Like [`check`], restricted to `#` types and without subtyping.
pub fn check_ds(env: &TypeEnv, p: &Process) -> Result<Weight, TypeError> {
    derive(env, p, CheckMode::SharpOnly).map(|t| t.weight)
}

/// Multiset of the declared levels of the outputs of `p` that are not under
/// a replication.
pub fn measure(env: &TypeEnv, p: &Process) -> Result<Measure, TypeError> {
    derive(env, p, CheckMode::Subtyping).map(|t| t.measure)
}

/// Weight and measure in one pass.
pub fn derive(env: &TypeEnv, p: &Process, mode: CheckMode) -> Result<Typing, TypeError> {
    let mut scope = Scope::new(env);
    Checker { mode }.process(&mut scope, p)
}

struct Checker {
    mode: CheckMode,
}

impl Checker {
    fn process(&self, scope: &mut Scope, p: &Process) -> Result<Typing, TypeError> {
        match p {
            Process::Nil => Ok(Typing {
                weight: 0,
                measure: Measure::new(),
            }),
            Process::Par(l, r) => {
                let mut a = self.process(scope, l)?;
                let b = self.process(scope, r)?;
                a.weight = a.weight.max(b.weight);
                a.measure.extend(&b.measure);
                Ok(a)
            }
            Process::Res {
                name,
                annotation,
                body,
                ..
            } => {
                let t = restriction_type(name, annotation.as_ref(), p)?;
                let mark = scope.mark();
                scope.push(name.clone(), t);
                let r = self.process(scope, body);
                scope.reset(mark);
                r
            }
            Process::Out { subject, payload } => {
                let (level, carried) = self.channel(scope, subject, Capability::Out, p)?;
                check_payload(scope, &carried, payload, self.mode, p)?;
                Ok(Typing {
                    weight: level,
                    measure: Measure::singleton(level),
                })
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
                let (level, carried) = self.channel(scope, subject, Capability::In, p)?;
                let Some(carried) = crate::syntax::payload_for_arity(&carried, params.len()) else {
                    return Err(arity_error(subject, carried.len(), params.len(), p));
                };
                let mark = scope.mark();
                for (x, t) in params.iter().zip(carried) {
                    scope.push(x.clone(), t.clone());
                }
                let inner = self.process(scope, body);
                scope.reset(mark);
                let inner = inner?;
                if matches!(p, Process::In { .. }) {
                    return Ok(inner);
                }
                if level <= inner.weight {
                    return Err(TypeError::new(
                        ErrorKind::LevelViolation,
                        format!(
                            "replicated input on `{}` at level {level} guards a body of weight {}",
                            subject.display(),
                            inner.weight
                        ),
                        p,
                    ));
                }
                Ok(Typing {
                    weight: 0,
                    measure: Measure::new(),
                })
            }
        }
    }

    /// Level and payload of `subject`, which must allow `use_`.
    fn channel(
        &self,
        scope: &Scope,
        subject: &Name,
        use_: Capability,
        at: &Process,
    ) -> Result<(u32, Vec<Type>), TypeError> {
        let t = lookup(scope, subject, at)?;
        let Type::Chan {
            cap,
            level,
            payload,
        } = t
        else {
            return Err(TypeError::new(
                ErrorKind::Capability,
                format!("`{}` has type {t}, not a channel type", subject.display()),
                at,
            ));
        };
        let allowed = match self.mode {
            CheckMode::SharpOnly => *cap == Capability::Sharp,
            CheckMode::Subtyping if use_ == Capability::Out => cap.allows_output(),
            CheckMode::Subtyping => cap.allows_input(),
        };
        if !allowed {
            let what = if use_ == Capability::Out {
                "output"
            } else {
                "input"
            };
            return Err(TypeError::new(
                ErrorKind::Capability,
                format!("`{}` : {t} cannot be used for {what}", subject.display()),
                at,
            ));
        }
        Ok((*level, payload.clone()))
    }
}

pub(crate) fn restriction_type(
    name: &Name,
    annotation: Option<&Type>,
    at: &Process,
) -> Result<Type, TypeError> {
    match annotation {
        Some(t) if !t.has_vars() => Ok(t.clone()),
        _ => Err(TypeError::new(
            ErrorKind::MissingAnnotation,
            format!(
                "restriction of `{}` needs a closed type annotation",
                name.display()
            ),
            at,
        )),
    }
}

pub(crate) fn arity_error(subject: &Name, expected: usize, got: usize, at: &Process) -> TypeError {
    TypeError::new(
        ErrorKind::PayloadMismatch,
        format!(
            "`{}` carries {expected} value(s) but {got} are used",
            subject.display()
        ),
        at,
    )
}

/// Checks the values sent on a channel against the channel's payload.
pub(crate) fn check_payload(
    scope: &Scope,
    carried: &[Type],
    values: &[Value],
    mode: CheckMode,
    at: &Process,
) -> Result<(), TypeError> {
    // `a<>` sends a unit value, which also fits a channel with empty payload.
    if carried.is_empty() && values == [Value::Star] {
        return Ok(());
    }
    if carried.len() != values.len() {
        let Process::Out { subject, .. } = at else {
            unreachable!("payloads are only checked at outputs")
        };
        return Err(arity_error(subject, carried.len(), values.len(), at));
    }
    for (v, expected) in values.iter().zip(carried) {
        let actual = value_type_in(scope, v, at)?;
        let ok = match mode {
            CheckMode::Subtyping => subtype(&actual, expected),
            CheckMode::SharpOnly => actual == *expected,
        };
        if !ok {
            return Err(TypeError::new(
                ErrorKind::PayloadMismatch,
                format!("value of type {actual} sent where {expected} is expected"),
                at,
            ));
        }
    }
    Ok(())
}

//! Simply-typed λ-calculus and its parallel call-by-value encoding into the
//! localised π-calculus.

mod encode;
mod parser;

pub use encode::{encode, encode_typed, functional_typing};
pub use parser::{parse_lambda, parse_lambda_type, LambdaProgram};

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::name::Name;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LambdaTerm {
    Var(Name),
    Abs(Name, Box<LambdaTerm>),
    App(Box<LambdaTerm>, Box<LambdaTerm>),
}

impl LambdaTerm {
    pub fn var(x: &Name) -> LambdaTerm {
        LambdaTerm::Var(x.clone())
    }

    pub fn abs(x: &Name, body: LambdaTerm) -> LambdaTerm {
        LambdaTerm::Abs(x.clone(), Box::new(body))
    }

    pub fn app(m: LambdaTerm, n: LambdaTerm) -> LambdaTerm {
        LambdaTerm::App(Box::new(m), Box::new(n))
    }

    pub fn size(&self) -> usize {
        match self {
            LambdaTerm::Var(_) => 1,
            LambdaTerm::Abs(_, m) => 1 + m.size(),
            LambdaTerm::App(m, n) => 1 + m.size() + n.size(),
        }
    }

    /// Free variables in order of first occurrence.
    pub fn free_vars(&self) -> Vec<Name> {
        fn go(m: &LambdaTerm, bound: &mut Vec<Name>, out: &mut Vec<Name>) {
            match m {
                LambdaTerm::Var(x) => {
                    if !bound.contains(x) && !out.contains(x) {
                        out.push(x.clone());
                    }
                }
                LambdaTerm::Abs(x, body) => {
                    bound.push(x.clone());
                    go(body, bound, out);
                    bound.pop();
                }
                LambdaTerm::App(a, b) => {
                    go(a, bound, out);
                    go(b, bound, out);
                }
            }
        }
        let mut out = Vec::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }
}

impl fmt::Display for LambdaTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LambdaTerm::Var(x) => f.write_str(x.display()),
            LambdaTerm::Abs(x, body) => write!(f, "\\{}. {body}", x.display()),
            LambdaTerm::App(m, n) => {
                match **m {
                    LambdaTerm::Abs(..) => write!(f, "({m})")?,
                    _ => write!(f, "{m}")?,
                }
                match **n {
                    LambdaTerm::Var(_) => write!(f, " {n}"),
                    _ => write!(f, " ({n})"),
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum LambdaType {
    Base(String),
    Arrow(Box<LambdaType>, Box<LambdaType>),
    /// Unification variable; only in inferred types.
    Var(u32),
}

impl LambdaType {
    pub fn base(s: &str) -> LambdaType {
        LambdaType::Base(s.to_string())
    }

    pub fn arrow(a: LambdaType, b: LambdaType) -> LambdaType {
        LambdaType::Arrow(Box::new(a), Box::new(b))
    }

    fn occurs(&self, v: u32) -> bool {
        match self {
            LambdaType::Var(w) => *w == v,
            LambdaType::Arrow(a, b) => a.occurs(v) || b.occurs(v),
            LambdaType::Base(_) => false,
        }
    }
}

impl fmt::Display for LambdaType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LambdaType::Base(s) => f.write_str(s),
            LambdaType::Var(v) => write!(f, "'{}", var_letter(*v)),
            LambdaType::Arrow(a, b) => match **a {
                LambdaType::Arrow(..) => write!(f, "({a}) -> {b}"),
                _ => write!(f, "{a} -> {b}"),
            },
        }
    }
}

fn var_letter(v: u32) -> String {
    let letter = char::from(b'a' + (v % 26) as u8);
    if v < 26 {
        letter.to_string()
    } else {
        format!("{letter}{}", v / 26)
    }
}

/// Typing context for free λ-variables.
pub type LambdaContext = BTreeMap<Name, LambdaType>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("ill-typed λ-term: {0}")]
pub struct IllTypedLambda(pub String);

#[derive(Default)]
struct Unifier {
    bound: Vec<Option<LambdaType>>,
}

impl Unifier {
    fn fresh(&mut self) -> LambdaType {
        self.bound.push(None);
        LambdaType::Var(self.bound.len() as u32 - 1)
    }

    fn resolve(&self, t: &LambdaType) -> LambdaType {
        match t {
            LambdaType::Var(v) => match &self.bound[*v as usize] {
                Some(u) => self.resolve(u),
                None => t.clone(),
            },
            LambdaType::Arrow(a, b) => LambdaType::arrow(self.resolve(a), self.resolve(b)),
            LambdaType::Base(_) => t.clone(),
        }
    }

    fn unify(&mut self, a: &LambdaType, b: &LambdaType) -> Result<(), IllTypedLambda> {
        let (a, b) = (self.resolve(a), self.resolve(b));
        match (&a, &b) {
            (LambdaType::Var(v), LambdaType::Var(w)) if v == w => Ok(()),
            (LambdaType::Var(v), t) | (t, LambdaType::Var(v)) => {
                if t.occurs(*v) {
                    return Err(IllTypedLambda(format!(
                        "{} = {t} would need an infinite type",
                        LambdaType::Var(*v)
                    )));
                }
                self.bound[*v as usize] = Some(t.clone());
                Ok(())
            }
            (LambdaType::Base(x), LambdaType::Base(y)) if x == y => Ok(()),
            (LambdaType::Arrow(a1, b1), LambdaType::Arrow(a2, b2)) => {
                self.unify(a1, a2)?;
                self.unify(b1, b2)
            }
            _ => Err(IllTypedLambda(format!("cannot match {a} with {b}"))),
        }
    }
}

/// Principal type of `m` under `delta`, whose types are taken as given.
pub fn check_stlc(delta: &LambdaContext, m: &LambdaTerm) -> Result<LambdaType, IllTypedLambda> {
    fn go(
        u: &mut Unifier,
        delta: &LambdaContext,
        local: &mut Vec<(Name, LambdaType)>,
        m: &LambdaTerm,
    ) -> Result<LambdaType, IllTypedLambda> {
        match m {
            LambdaTerm::Var(x) => local
                .iter()
                .rev()
                .find(|(y, _)| y == x)
                .map(|(_, t)| t.clone())
                .or_else(|| delta.get(x).cloned())
                .ok_or_else(|| IllTypedLambda(format!("`{}` is not declared", x.display()))),
            LambdaTerm::Abs(x, body) => {
                let a = u.fresh();
                local.push((x.clone(), a.clone()));
                let b = go(u, delta, local, body);
                local.pop();
                Ok(LambdaType::arrow(a, b?))
            }
            LambdaTerm::App(f, a) => {
                let tf = go(u, delta, local, f)?;
                let ta = go(u, delta, local, a)?;
                let r = u.fresh();
                u.unify(&tf, &LambdaType::arrow(ta, r.clone()))
                    .map_err(|e| IllTypedLambda(format!("in `{m}`: {}", e.0)))?;
                Ok(r)
            }
        }
    }
    let mut u = Unifier::default();
    let t = go(&mut u, delta, &mut Vec::new(), m)?;
    Ok(renumber(&u.resolve(&t), &mut HashMap::new()))
}

fn renumber(t: &LambdaType, map: &mut HashMap<u32, u32>) -> LambdaType {
    match t {
        LambdaType::Var(v) => {
            let next = map.len() as u32;
            LambdaType::Var(*map.entry(*v).or_insert(next))
        }
        LambdaType::Arrow(a, b) => {
            let a = renumber(a, map);
            LambdaType::arrow(a, renumber(b, map))
        }
        LambdaType::Base(_) => t.clone(),
    }
}

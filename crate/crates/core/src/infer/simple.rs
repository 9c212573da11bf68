use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use crate::name::Name;
use crate::subst::free_names_in_order;
use crate::syntax::{Process, Type, Value};

use super::InferError;

/// A type without capabilities or levels.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SimpleType {
    Unit,
    Nat,
    Chan(Vec<SimpleType>),
    Var(u32),
}

impl SimpleType {
    pub fn is_channel(&self) -> bool {
        matches!(self, SimpleType::Chan(_))
    }

    fn occurs(&self, v: u32) -> bool {
        match self {
            SimpleType::Var(w) => *w == v,
            SimpleType::Chan(ps) => ps.iter().any(|p| p.occurs(v)),
            _ => false,
        }
    }

    /// The shape of a checker type.
    pub fn skeleton(t: &Type) -> SimpleType {
        match t {
            Type::Unit => SimpleType::Unit,
            Type::Nat => SimpleType::Nat,
            Type::Var(v) => SimpleType::Var(*v),
            Type::Chan { payload, .. } => {
                SimpleType::Chan(payload.iter().map(SimpleType::skeleton).collect())
            }
        }
    }
}

impl fmt::Display for SimpleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimpleType::Unit => f.write_str("Unit"),
            SimpleType::Nat => f.write_str("Nat"),
            SimpleType::Var(v) => write!(f, "'t{v}"),
            SimpleType::Chan(ps) => {
                f.write_str("ch[")?;
                for (i, p) in ps.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{p}")?;
                }
                f.write_str("]")
            }
        }
    }
}

/// Most general simple types of every name of a process, free or bound.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SimpleEnv {
    types: BTreeMap<Name, SimpleType>,
}

impl SimpleEnv {
    pub fn get(&self, n: &Name) -> Option<&SimpleType> {
        self.types.get(n)
    }

    /// Type of the free name spelled `spelling`.
    pub fn lookup(&self, spelling: &str) -> Option<&SimpleType> {
        self.get(&Name::global(spelling))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Name, &SimpleType)> {
        self.types.iter()
    }
}

impl fmt::Display for SimpleEnv {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut v: Vec<_> = self.types.iter().collect();
        v.sort_by(|a, b| a.0.display().cmp(b.0.display()).then(a.0.cmp(b.0)));
        for (n, t) in v {
            writeln!(f, "{n} : {t}")?;
        }
        Ok(())
    }
}

#[derive(Default)]
struct Unifier {
    bound: Vec<Option<SimpleType>>,
}

impl Unifier {
    fn fresh(&mut self) -> SimpleType {
        self.bound.push(None);
        SimpleType::Var(self.bound.len() as u32 - 1)
    }

    fn shallow(&self, t: &SimpleType) -> SimpleType {
        let mut t = t.clone();
        while let SimpleType::Var(v) = t {
            match &self.bound[v as usize] {
                Some(u) => t = u.clone(),
                None => break,
            }
        }
        t
    }

    fn resolve(&self, t: &SimpleType) -> SimpleType {
        match self.shallow(t) {
            SimpleType::Chan(ps) => SimpleType::Chan(ps.iter().map(|p| self.resolve(p)).collect()),
            other => other,
        }
    }

    fn unify(&mut self, a: &SimpleType, b: &SimpleType) -> Result<(), InferError> {
        let (a, b) = (self.shallow(a), self.shallow(b));
        match (&a, &b) {
            (SimpleType::Var(v), SimpleType::Var(w)) if v == w => Ok(()),
            (SimpleType::Var(v), t) | (t, SimpleType::Var(v)) => {
                let full = self.resolve(t);
                if full.occurs(*v) {
                    return Err(InferError::OccursCheckFailure(format!(
                        "'t{v} = {full} has no finite solution"
                    )));
                }
                self.bound[*v as usize] = Some(full);
                Ok(())
            }
            (SimpleType::Unit, SimpleType::Unit) | (SimpleType::Nat, SimpleType::Nat) => Ok(()),
            (SimpleType::Chan(ps), SimpleType::Chan(qs)) => {
                if ps.len() != qs.len() {
                    return Err(InferError::UnificationFailure(format!(
                        "channel used with {} and with {} value(s)",
                        ps.len(),
                        qs.len()
                    )));
                }
                for (p, q) in ps.iter().zip(qs) {
                    self.unify(p, q)?;
                }
                Ok(())
            }
            _ => Err(InferError::UnificationFailure(format!(
                "cannot unify {} with {}",
                self.resolve(&a),
                self.resolve(&b)
            ))),
        }
    }
}

struct Collector {
    u: Unifier,
    vars: HashMap<Name, SimpleType>,
}

impl Collector {
    fn var(&mut self, n: &Name) -> SimpleType {
        if let Some(t) = self.vars.get(n) {
            return t.clone();
        }
        let t = self.u.fresh();
        self.vars.insert(n.clone(), t.clone());
        t
    }

    fn value(&mut self, v: &Value) -> Result<SimpleType, InferError> {
        Ok(match v {
            Value::Star => SimpleType::Unit,
            Value::Nat(_) => SimpleType::Nat,
            Value::Name(n) => self.var(n),
            Value::Add(l, r) | Value::Mul(l, r) => {
                for side in [l, r] {
                    let t = self.value(side)?;
                    self.u.unify(&t, &SimpleType::Nat)?;
                }
                SimpleType::Nat
            }
        })
    }

    /// A channel carrying `payload`; the empty payload stands for one unit
    /// value.
    fn channel(payload: Vec<SimpleType>) -> SimpleType {
        if payload.is_empty() {
            SimpleType::Chan(vec![SimpleType::Unit])
        } else {
            SimpleType::Chan(payload)
        }
    }

    fn process(&mut self, p: &Process) -> Result<(), InferError> {
        match p {
            Process::Nil => Ok(()),
            Process::Par(l, r) => {
                self.process(l)?;
                self.process(r)
            }
            Process::Res {
                name,
                annotation,
                body,
                ..
            } => {
                let t = self.var(name);
                if let Some(a) = annotation.as_ref().filter(|a| !a.has_vars()) {
                    self.u.unify(&t, &SimpleType::skeleton(a))?;
                }
                self.process(body)
            }
            Process::Out { subject, payload } => {
                let payload: Vec<SimpleType> = payload
                    .iter()
                    .map(|v| self.value(v))
                    .collect::<Result<_, _>>()?;
                let t = self.var(subject);
                self.u.unify(&t, &Collector::channel(payload))
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
                let ps: Vec<SimpleType> = params.iter().map(|x| self.var(x)).collect();
                let t = self.var(subject);
                self.u.unify(&t, &Collector::channel(ps))?;
                self.process(body)
            }
        }
    }
}

/// Most general simple typing of `p`, by first-order unification.
pub fn infer_simple(p: &Process) -> Result<SimpleEnv, InferError> {
    let mut c = Collector {
        u: Unifier::default(),
        vars: HashMap::new(),
    };
    for n in free_names_in_order(p) {
        c.var(&n);
    }
    c.process(p)?;

    // Renumber residual variables from 0 in order of first appearance.
    let mut names: Vec<(&Name, &SimpleType)> = c.vars.iter().collect();
    names.sort_by_key(|(n, _)| n.id());
    let mut renumber: HashMap<u32, u32> = HashMap::new();
    let mut types = BTreeMap::new();
    for (n, t) in names {
        let t = rename_vars(&c.u.resolve(t), &mut renumber);
        types.insert(n.clone(), t);
    }
    Ok(SimpleEnv { types })
}

fn rename_vars(t: &SimpleType, map: &mut HashMap<u32, u32>) -> SimpleType {
    match t {
        SimpleType::Var(v) => {
            let next = map.len() as u32;
            SimpleType::Var(*map.entry(*v).or_insert(next))
        }
        SimpleType::Chan(ps) => SimpleType::Chan(ps.iter().map(|p| rename_vars(p, map)).collect()),
        other => other.clone(),
    }
}

/// Names bound by input prefixes, with the subject that binds them and
/// their position.
pub fn received_names(p: &Process) -> HashMap<Name, (Name, usize)> {
    fn go(p: &Process, out: &mut HashMap<Name, (Name, usize)>) {
        match p {
            Process::Nil | Process::Out { .. } => {}
            Process::Par(l, r) => {
                go(l, out);
                go(r, out);
            }
            Process::Res { body, .. } => go(body, out),
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
                for (i, x) in params.iter().enumerate() {
                    out.insert(x.clone(), (subject.clone(), i));
                }
                go(body, out);
            }
        }
    }
    let mut out = HashMap::new();
    go(p, &mut out);
    out
}

/// The first received name used as an input subject, if any.
pub(crate) fn non_local_name(p: &Process) -> Option<Name> {
    fn go(p: &Process, received: &HashSet<Name>) -> Option<Name> {
        match p {
            Process::Nil | Process::Out { .. } => None,
            Process::Par(l, r) => go(l, received).or_else(|| go(r, received)),
            Process::Res { body, .. } => go(body, received),
            Process::In { subject, body, .. } | Process::RepIn { subject, body, .. } => {
                if received.contains(subject) {
                    Some(subject.clone())
                } else {
                    go(body, received)
                }
            }
        }
    }
    let received: HashSet<Name> = received_names(p).into_keys().collect();
    go(p, &received)
}

/// True when no received name is used as the subject of an input.
pub fn locality_check(p: &Process) -> bool {
    non_local_name(p).is_none()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_process;

    fn simple(s: &str) -> Result<SimpleEnv, InferError> {
        infer_simple(&parse_process(s).unwrap())
    }

    fn ch(ps: Vec<SimpleType>) -> SimpleType {
        SimpleType::Chan(ps)
    }

    #[test]
    fn inner_channel() {
        let p = parse_process("a(x).x<*>").unwrap();
        let env = infer_simple(&p).unwrap();
        assert_eq!(env.lookup("a"), Some(&ch(vec![ch(vec![SimpleType::Unit])])));
        let Process::In { params, .. } = &p else {
            panic!()
        };
        assert_eq!(env.get(&params[0]), Some(&ch(vec![SimpleType::Unit])));
    }

    #[test]
    fn self_carrying_channel_fails_occurs_check() {
        assert!(matches!(
            simple("a<a>"),
            Err(InferError::OccursCheckFailure(_))
        ));
    }

    #[test]
    fn names_sent_on_the_same_channel_are_unified() {
        let env = simple("a<p> | a<q> | !p(z).q<z>").unwrap();
        assert_eq!(env.lookup("p"), env.lookup("q"));
        let Some(SimpleType::Chan(ps)) = env.lookup("p") else {
            panic!()
        };
        assert!(matches!(ps[0], SimpleType::Var(_)));
    }

    #[test]
    fn clashes() {
        assert!(matches!(
            simple("a<*> | a<3>"),
            Err(InferError::UnificationFailure(_))
        ));
        assert!(matches!(
            simple("a<b> | a<b,b>"),
            Err(InferError::UnificationFailure(_))
        ));
        assert!(matches!(
            simple("a<n + b> | b<*>"),
            Err(InferError::UnificationFailure(_))
        ));
        assert!(simple("a<> | a().0").is_ok());
    }

    #[test]
    fn locality() {
        assert!(!locality_check(&parse_process("a(x).x(y).0").unwrap()));
        assert!(locality_check(&parse_process("a(x).x<*>").unwrap()));
        assert!(!locality_check(&parse_process("!a(x).!x(y).0").unwrap()));
    }
}

//! Typing for the impure calculus, where functional names follow the
//! discipline of encoded functions and imperative names are controlled by
//! levels.
//!
//! The judgement isolates at most one functional name. Only the isolated
//! name may be the subject of a replicated input; every other functional
//! name in scope can be used for output only.

use std::collections::BTreeSet;
use std::fmt;

use crate::name::Name;
use crate::semantics::{normalize, NormalProcess};
use crate::syntax::{payload_for_arity, Capability, EnvDecl, Process, ResKind, Type};
use crate::typing::{
    arity_error, check_payload, lookup, restriction_type, CheckMode, DuplicateBinding, ErrorKind,
    Scope, TypeEnv, TypeError, Weight,
};

/// The isolated functional name and its output type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Isolated {
    Dummy,
    Name {
        name: Name,
        level: u32,
        payload: Vec<Type>,
    },
}

impl Isolated {
    fn is(&self, n: &Name) -> bool {
        matches!(self, Isolated::Name { name, .. } if name == n)
    }

    fn binding(&self) -> Option<(Name, Type)> {
        match self {
            Isolated::Dummy => None,
            Isolated::Name {
                name,
                level,
                payload,
            } => Some((name.clone(), Type::output(*level, payload.clone()))),
        }
    }

    fn of(name: &Name, ty: &Type) -> Option<Isolated> {
        match ty {
            Type::Chan { level, payload, .. } => Some(Isolated::Name {
                name: name.clone(),
                level: *level,
                payload: payload.clone(),
            }),
            _ => None,
        }
    }
}

impl fmt::Display for Isolated {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.binding() {
            None => f.write_str("-"),
            Some((n, t)) => write!(f, "{} : {t}", n.display()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImpureEnv {
    /// Imperative names, and functional names usable for output.
    pub gamma: TypeEnv,
    pub isolated: Isolated,
    /// Functional names of `gamma`.
    pub functional: BTreeSet<Name>,
}

impl ImpureEnv {
    pub fn new(gamma: TypeEnv) -> ImpureEnv {
        ImpureEnv {
            gamma,
            isolated: Isolated::Dummy,
            functional: BTreeSet::new(),
        }
    }

    /// The first `fun` declaration becomes the isolated name. Later `fun`
    /// declarations are functional names kept in `gamma` at output type.
    pub fn from_decls(decls: &[EnvDecl]) -> Result<ImpureEnv, DuplicateBinding> {
        let mut env = ImpureEnv::new(TypeEnv::new());
        for d in decls {
            let name = Name::global(&d.name);
            if !d.functional {
                env.gamma.insert(name, d.ty.clone())?;
                continue;
            }
            if env.isolated == Isolated::Dummy {
                if let Some(iso) = Isolated::of(&name, &d.ty) {
                    env.isolated = iso;
                    continue;
                }
            }
            let ty = match &d.ty {
                Type::Chan { level, payload, .. } => Type::output(*level, payload.clone()),
                other => other.clone(),
            };
            env.gamma.insert(name.clone(), ty)?;
            env.functional.insert(name);
        }
        Ok(env)
    }
}

impl fmt::Display for ImpureEnv {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.gamma)?;
        writeln!(f, "isolated {}", self.isolated)
    }
}

/// Minimal weight of `p` in the impure system.
pub fn check_impure(env: &ImpureEnv, p: &Process) -> Result<Weight, TypeError> {
    let mut scope = Scope::new(&env.gamma);
    let mut c = ImpureChecker {
        functional: env.functional.clone(),
    };
    if let Isolated::Name { name, .. } = &env.isolated {
        c.functional.insert(name.clone());
    }
    c.process(&mut scope, &env.isolated, p)
}

struct ImpureChecker {
    functional: BTreeSet<Name>,
}

impl ImpureChecker {
    fn process(
        &mut self,
        scope: &mut Scope,
        iso: &Isolated,
        p: &Process,
    ) -> Result<Weight, TypeError> {
        match p {
            Process::Nil => Ok(0),
            Process::Par(l, r) => {
                let a = self.process(scope, iso, l)?;
                let b = self.process(scope, iso, r)?;
                Ok(a.max(b))
            }
            Process::Out { subject, payload } => {
                let mark = scope.mark();
                if let Some((f, t)) = iso.binding() {
                    scope.push(f, t);
                }
                let r = channel(scope, subject, Capability::Out, p).and_then(|(level, carried)| {
                    check_payload(scope, &carried, payload, CheckMode::Subtyping, p)?;
                    Ok(level)
                });
                scope.reset(mark);
                r
            }
            Process::Res {
                name,
                annotation,
                kind: ResKind::Imperative,
                body,
            } => {
                let t = restriction_type(name, annotation.as_ref(), p)?;
                let mark = scope.mark();
                scope.push(name.clone(), t);
                let r = self.process(scope, iso, body);
                scope.reset(mark);
                r
            }
            Process::Res {
                name,
                annotation,
                kind: ResKind::Functional,
                body,
            } => {
                let t = restriction_type(name, annotation.as_ref(), p)?;
                let Some(inner) = Isolated::of(name, &t) else {
                    return Err(TypeError::new(
                        ErrorKind::Capability,
                        format!(
                            "functional name `{}` needs a channel type, not {t}",
                            name.display()
                        ),
                        p,
                    ));
                };
                self.functional.insert(name.clone());
                let mark = scope.mark();
                if let Some((g, t)) = iso.binding() {
                    scope.push(g, t);
                }
                let r = self.process(scope, &inner, body);
                scope.reset(mark);
                r
            }
            Process::RepIn {
                subject,
                params,
                body,
            } if iso.is(subject) => {
                let Isolated::Name { level, payload, .. } = iso else {
                    unreachable!()
                };
                let Some(carried) = payload_for_arity(payload, params.len()) else {
                    return Err(arity_error(subject, payload.len(), params.len(), p));
                };
                let mark = scope.mark();
                for (x, t) in params.iter().zip(carried) {
                    scope.push(x.clone(), t.clone());
                }
                let w = self.process(scope, &Isolated::Dummy, body);
                scope.reset(mark);
                let w = w?;
                if *level < w {
                    return Err(TypeError::new(
                        ErrorKind::LevelViolation,
                        format!(
                            "functional server `{}` at level {level} guards a body of weight {w}",
                            subject.display()
                        ),
                        p,
                    ));
                }
                Ok(0)
            }
            Process::RepIn { subject, .. } if self.functional.contains(subject) => {
                Err(TypeError::new(
                    ErrorKind::FunctionalInputNotIsolated,
                    format!(
                    "replicated input on functional name `{}`, which is not the isolated name here",
                    subject.display()
                ),
                    p,
                ))
            }
            Process::In { subject, .. } if self.functional.contains(subject) => {
                Err(TypeError::new(
                    ErrorKind::Capability,
                    format!(
                        "functional name `{}` cannot be used for a linear input",
                        subject.display()
                    ),
                    p,
                ))
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
                let (level, carried) = channel(scope, subject, Capability::In, p)?;
                let Some(carried) = payload_for_arity(&carried, params.len()) else {
                    return Err(arity_error(subject, carried.len(), params.len(), p));
                };
                let mark = scope.mark();
                for (x, t) in params.iter().zip(carried) {
                    scope.push(x.clone(), t.clone());
                }
                if let Some((f, t)) = iso.binding() {
                    scope.push(f, t);
                }
                let w = self.process(scope, &Isolated::Dummy, body);
                scope.reset(mark);
                let w = w?;
                if level <= w {
                    return Err(TypeError::new(
                        ErrorKind::LevelViolation,
                        format!(
                            "input on imperative name `{}` at level {level} guards a body of weight {w}",
                            subject.display()
                        ),
                        p,
                    ));
                }
                Ok(0)
            }
        }
    }
}

fn channel(
    scope: &Scope,
    subject: &Name,
    use_: Capability,
    at: &Process,
) -> Result<(u32, Vec<Type>), TypeError> {
    let t = lookup(scope, subject, at)?;
    let ok = match t {
        Type::Chan { cap, .. } if use_ == Capability::Out => cap.allows_output(),
        Type::Chan { cap, .. } => cap.allows_input(),
        _ => false,
    };
    match t {
        Type::Chan { level, payload, .. } if ok => Ok((*level, payload.clone())),
        _ => Err(TypeError::new(
            ErrorKind::Capability,
            format!(
                "`{}` : {t} cannot be used for {}",
                subject.display(),
                if use_ == Capability::Out {
                    "output"
                } else {
                    "input"
                }
            ),
            at,
        )),
    }
}

/// Upper bound on the nestings of functional restrictions tried by
/// [`rearrangements`].
const MAX_NESTINGS: usize = 720;

/// Processes congruent to `state` in which imperative restrictions are
/// outermost and functional restrictions are nested, one nesting per order
/// of the functional names. Each thread sits directly under the
/// restriction of the innermost functional name it mentions; a replicated
/// input on a restricted functional name sits directly under that name's
/// restriction. Orders where this is impossible are skipped.
pub fn rearrangements(state: &NormalProcess, env: &ImpureEnv) -> Vec<Process> {
    let (fun, imp): (Vec<_>, Vec<_>) = state
        .restrictions
        .iter()
        .partition(|r| r.kind == ResKind::Functional);
    let mut order: Vec<usize> = (0..fun.len()).collect();
    let mut out = Vec::new();
    loop {
        if let Some(p) = nest(state, env, &fun, &order) {
            let wrapped = imp.iter().rev().fold(p, |body, r| Process::Res {
                name: r.name.clone(),
                annotation: r.annotation.clone(),
                kind: r.kind,
                body: Box::new(body),
            });
            out.push(wrapped);
        }
        if out.len() >= MAX_NESTINGS || !crate::semantics::next_permutation(&mut order) {
            break;
        }
    }
    out
}

fn nest(
    state: &NormalProcess,
    env: &ImpureEnv,
    fun: &[&crate::semantics::Restriction],
    order: &[usize],
) -> Option<Process> {
    let depth_of = |n: &Name| order.iter().position(|&i| &fun[i].name == n).map(|d| d + 1);
    let mut layers: Vec<Vec<Process>> = vec![Vec::new(); order.len() + 1];
    for c in &state.components {
        let least = crate::subst::free_names(c)
            .iter()
            .filter_map(depth_of)
            .max()
            .unwrap_or(0);
        let at = match c {
            Process::RepIn { subject, .. } if env.isolated.is(subject) => 0,
            Process::RepIn { subject, .. } => depth_of(subject).unwrap_or(least),
            _ => least,
        };
        if at < least {
            return None;
        }
        layers[at].push(c.clone());
    }
    let mut body = Process::Nil;
    for d in (0..layers.len()).rev() {
        let here = std::mem::take(&mut layers[d]);
        body = Process::par_all(here.into_iter().chain(std::iter::once(body)));
        if d > 0 {
            let r = fun[order[d - 1]];
            body = Process::Res {
                name: r.name.clone(),
                annotation: r.annotation.clone(),
                kind: r.kind,
                body: Box::new(body),
            };
        }
    }
    Some(body)
}

/// Least weight of a process congruent to `p` that is typable in the
/// impure system, found among `p` itself and its [`rearrangements`].
pub fn check_impure_up_to_congruence(env: &ImpureEnv, p: &Process) -> Result<Weight, TypeError> {
    let first = check_impure(env, p);
    let mut best = first.as_ref().ok().copied();
    for q in rearrangements(&normalize(p), env) {
        if let Ok(w) = check_impure(env, &q) {
            best = Some(best.map_or(w, |b| b.min(w)));
        }
    }
    match best {
        Some(w) => Ok(w),
        None => first,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_env, parse_process};

    fn env(text: &str) -> ImpureEnv {
        ImpureEnv::from_decls(&parse_env(text).unwrap()).unwrap()
    }

    fn code(env_text: &str, src: &str) -> &'static str {
        check_impure(&env(env_text), &parse_process(src).unwrap())
            .unwrap_err()
            .code()
    }

    #[test]
    fn replication_on_functional_name_under_input_is_rejected() {
        let e = "fun f : o0[Unit]  c : #1[o0[Unit]]  v : #0[Unit]";
        assert_eq!(code(e, "c(x).!f(y).x<y> | c<f> | f<v>"), "FUN");
    }

    #[test]
    fn servers_on_the_isolated_name_coexist() {
        let p = parse_process(
            "new f fun : o1[o0[Unit]]. (!f(x).x<*> | !f(y).(y<*> | y<*>) | f<r> | f<r>)",
        )
        .unwrap();
        let e = env("r : #0[Unit]");
        assert_eq!(check_impure(&e, &p), Ok(1));
    }

    #[test]
    fn functional_servers_allow_equal_levels() {
        let e = "fun f : o0[Unit]  r : #0[Unit]";
        let p = parse_process("!f().r<*>").unwrap();
        assert_eq!(check_impure(&env(e), &p), Ok(0));
        let e = "f : #0[Unit]  r : #0[Unit]";
        assert_eq!(code(e, "!f().r<*>"), "LVL");
    }

    #[test]
    fn isolated_name_is_unusable_inside_its_server() {
        let e = "fun f : o1[Unit]";
        assert_eq!(code(e, "!f().f<*>"), "UNB");
    }

    #[test]
    fn linear_inputs_are_weight_zero_but_constrained() {
        let e = env("c : #2[Unit]  d : #1[Unit]");
        assert_eq!(check_impure(&e, &parse_process("c().d<*>").unwrap()), Ok(0));
        let e2 = "c : #1[Unit]  d : #1[Unit]";
        assert_eq!(code(e2, "c().d<*>"), "LVL");
        assert_eq!(code("fun f : o1[Unit]", "f().0"), "CAP");
    }

    #[test]
    fn inner_functional_restriction_demotes_the_outer_one() {
        let e = env("r : #0[Unit]");
        let nested = "new f fun : o0[Unit]. new g fun : o0[Unit]. (!f().r<*> | !g().f<*>)";
        let err = check_impure(&e, &parse_process(nested).unwrap()).unwrap_err();
        assert_eq!(err.code(), "FUN");
        let scoped = "new f fun : o0[Unit]. (!f().r<*> | new g fun : o0[Unit]. !g().f<*>)";
        assert_eq!(check_impure(&e, &parse_process(scoped).unwrap()), Ok(0));
        assert_eq!(
            check_impure_up_to_congruence(&e, &parse_process(nested).unwrap()),
            Ok(0)
        );
    }

    #[test]
    fn rearrangements_respect_scope() {
        let e = env("r : #0[Unit]");
        let p =
            parse_process("new f fun : o0[Unit]. new g fun : o0[Unit]. (!f().g<*> | !g().r<*>)")
                .unwrap();
        let all = rearrangements(&normalize(&p), &e);
        assert_eq!(all.len(), 1);
        assert!(crate::semantics::congruent(&all[0], &p));
        assert_eq!(check_impure(&e, &all[0]), Ok(0));
    }
}

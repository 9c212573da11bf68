use crate::impure::ImpureEnv;
use crate::infer::{infer_simple, InferError, SimpleType};
use crate::name::Name;
use crate::subst::free_names_in_order;
use crate::syntax::{Process, ResKind, Type, Value};

use super::{check_stlc, IllTypedLambda, LambdaContext, LambdaTerm};

struct Encoder {
    next: u32,
}

impl Encoder {
    fn fresh(&mut self, base: &str) -> Name {
        self.next += 1;
        Name::fresh(&format!("{base}{}", self.next))
    }

    fn term(&mut self, m: &LambdaTerm, p: &Name) -> Process {
        match m {
            LambdaTerm::Var(x) => Process::out(p, vec![Value::name(x)]),
            LambdaTerm::Abs(x, body) => {
                let y = self.fresh("y");
                let q = self.fresh("q");
                let server =
                    Process::rep_input(&y, vec![x.clone(), q.clone()], self.term(body, &q));
                Process::res(
                    &y,
                    None,
                    Process::par(server, Process::out(p, vec![Value::name(&y)])),
                )
            }
            LambdaTerm::App(fun, arg) => {
                let q = self.fresh("q");
                let r = self.fresh("r");
                let f = self.fresh("f");
                let z = self.fresh("z");
                let call = Process::input(
                    &q,
                    vec![f.clone()],
                    Process::input(
                        &r,
                        vec![z.clone()],
                        Process::out(&f, vec![Value::name(&z), Value::name(p)]),
                    ),
                );
                let body = Process::par_all([self.term(fun, &q), self.term(arg, &r), call]);
                Process::res(&q, None, Process::res(&r, None, body))
            }
        }
    }
}

/// The parallel call-by-value encoding of `m` at result channel `p`.
///
/// Generated names are numbered from 1 on every call, so equal inputs give
/// equal printed outputs.
pub fn encode(m: &LambdaTerm, p: &Name) -> Process {
    Encoder { next: 0 }.term(m, p)
}

/// [`encode`], after checking that `m` is simply typed under `delta`.
pub fn encode_typed(
    delta: &LambdaContext,
    m: &LambdaTerm,
    p: &Name,
) -> Result<Process, IllTypedLambda> {
    check_stlc(delta, m)?;
    Ok(encode(m, p))
}

/// Every name of `p` treated as functional at level 0: restrictions are
/// marked functional and annotated with output types of level 0, and free
/// names are functional output-only bindings.
pub fn functional_typing(p: &Process) -> Result<(ImpureEnv, Process), InferError> {
    let simple = infer_simple(p)?;
    let ty = |n: &Name| level_zero(simple.get(n).unwrap_or(&SimpleType::Unit));
    let mut env = ImpureEnv::new(Default::default());
    for n in free_names_in_order(p) {
        env.gamma.set(n.clone(), ty(&n));
        env.functional.insert(n);
    }
    Ok((env, mark(p, &ty)))
}

fn level_zero(t: &SimpleType) -> Type {
    match t {
        SimpleType::Unit => Type::Unit,
        SimpleType::Nat => Type::Nat,
        SimpleType::Var(_) => Type::output(0, vec![Type::Unit]),
        SimpleType::Chan(ps) => Type::output(0, ps.iter().map(level_zero).collect()),
    }
}

fn mark(p: &Process, ty: &dyn Fn(&Name) -> Type) -> Process {
    match p {
        Process::Nil | Process::Out { .. } => p.clone(),
        Process::Par(l, r) => Process::par(mark(l, ty), mark(r, ty)),
        Process::Res { name, body, .. } => Process::Res {
            name: name.clone(),
            annotation: Some(ty(name)),
            kind: ResKind::Functional,
            body: Box::new(mark(body, ty)),
        },
        Process::In {
            subject,
            params,
            body,
        } => Process::input(subject, params.clone(), mark(body, ty)),
        Process::RepIn {
            subject,
            params,
            body,
        } => Process::rep_input(subject, params.clone(), mark(body, ty)),
    }
}

//! Helpers shared by the integration suites: a type-directed process
//! generator, congruence scrambling and brute-force oracles.
#![allow(dead_code)]

use std::collections::HashMap;

use piterm::impure::{check_impure, ImpureEnv};
use piterm::infer::{infer_simple, SimpleType};
use piterm::lambda::{encode_typed, functional_typing, parse_lambda};
use piterm::semantics::{certified_run, congruent, Bounds, Verdict};
use piterm::subst::free_names;
use piterm::syntax::parse_env;
use piterm::typing::{check, measure, subtype, Measure, TypeEnv};
use piterm::{parse_process, Capability, Name, Process, ResKind, Type, Value};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

pub const CAPS: [Capability; 3] = [Capability::Sharp, Capability::In, Capability::Out];

pub fn process(src: &str) -> Process {
    parse_process(src).unwrap_or_else(|e| panic!("{src}: {e}"))
}

pub fn env(src: &str) -> TypeEnv {
    TypeEnv::from_decls(&parse_env(src).unwrap()).unwrap()
}

pub fn multiset(values: &[u32]) -> Measure {
    let mut m = Measure::new();
    for &v in values {
        m.insert(v);
    }
    m
}

// ---------------------------------------------------------------------------
// Subtyping: closure of the rules over an enumerated universe.

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Shape {
    Unit,
    Nat,
    Chan(Vec<Shape>),
}

/// Every shape of depth at most `depth` (base types have depth 1) whose
/// channels carry at most `arity` values.
pub fn shapes(depth: usize, arity: usize) -> Vec<Shape> {
    let base = vec![Shape::Unit, Shape::Nat];
    let mut all = base.clone();
    for _ in 1..depth {
        let mut next = base.clone();
        let mut lists: Vec<Vec<Shape>> = vec![Vec::new()];
        let mut layer = lists.clone();
        for _ in 0..arity {
            layer = layer
                .iter()
                .flat_map(|l| {
                    all.iter().map(move |s| {
                        let mut l = l.clone();
                        l.push(s.clone());
                        l
                    })
                })
                .collect();
            lists.extend(layer.iter().cloned());
        }
        next.extend(lists.into_iter().map(Shape::Chan));
        all = next;
    }
    all.sort_by_key(Shape::depth);
    all
}

impl Shape {
    pub fn depth(&self) -> usize {
        match self {
            Shape::Chan(ps) => 1 + ps.iter().map(Shape::depth).max().unwrap_or(0),
            _ => 1,
        }
    }
}

/// All types of one shape, with the subtyping relation computed as the least
/// reflexive and transitive relation closed under the four capability rules.
pub struct SubtypeClass {
    pub shape: Shape,
    pub members: Vec<Type>,
    rows: Vec<Vec<u64>>,
}

impl SubtypeClass {
    pub fn related(&self, a: usize, b: usize) -> bool {
        self.rows[a][b / 64] >> (b % 64) & 1 == 1
    }
}

/// The closure for every shape of `shapes`, whose payload shapes must come
/// earlier in the list.
pub fn subtype_closure(shapes: &[Shape], max_level: u32) -> Vec<SubtypeClass> {
    let mut classes: Vec<SubtypeClass> = Vec::new();
    let mut by_shape: HashMap<Shape, usize> = HashMap::new();
    for shape in shapes {
        let class = match shape {
            Shape::Unit => base_class(shape.clone(), Type::Unit),
            Shape::Nat => base_class(shape.clone(), Type::Nat),
            Shape::Chan(ps) => {
                let parts: Vec<&SubtypeClass> = ps.iter().map(|p| &classes[by_shape[p]]).collect();
                chan_class(shape.clone(), &parts, max_level)
            }
        };
        by_shape.insert(shape.clone(), classes.len());
        classes.push(class);
    }
    classes
}

fn base_class(shape: Shape, t: Type) -> SubtypeClass {
    SubtypeClass {
        shape,
        members: vec![t],
        rows: vec![vec![1]],
    }
}

fn chan_class(shape: Shape, parts: &[&SubtypeClass], max_level: u32) -> SubtypeClass {
    let tuples: Vec<Vec<usize>> = parts.iter().fold(vec![Vec::new()], |acc, c| {
        acc.iter()
            .flat_map(|t| {
                (0..c.members.len()).map(move |i| {
                    let mut t = t.clone();
                    t.push(i);
                    t
                })
            })
            .collect()
    });
    let mut decoded = Vec::new();
    let mut members = Vec::new();
    for cap in CAPS {
        for level in 0..=max_level {
            for (ti, t) in tuples.iter().enumerate() {
                let payload = t
                    .iter()
                    .zip(parts)
                    .map(|(&i, c)| c.members[i].clone())
                    .collect();
                members.push(Type::chan(cap, level, payload));
                decoded.push((cap, level, ti));
            }
        }
    }
    let n = members.len();
    let words = n.div_ceil(64);
    let mut rows = vec![vec![0u64; words]; n];
    let pointwise = |a: usize, b: usize| {
        tuples[a]
            .iter()
            .zip(&tuples[b])
            .zip(parts)
            .all(|((&x, &y), c)| c.related(x, y))
    };
    for (a, &(ca, la, ta)) in decoded.iter().enumerate() {
        for (b, &(cb, lb, tb)) in decoded.iter().enumerate() {
            let one_step = a == b
                || match (ca, cb) {
                    (Capability::Sharp, Capability::In | Capability::Out) => la == lb && ta == tb,
                    (Capability::In, Capability::In) => lb <= la && pointwise(ta, tb),
                    (Capability::Out, Capability::Out) => la <= lb && pointwise(tb, ta),
                    _ => false,
                };
            if one_step {
                rows[a][b / 64] |= 1 << (b % 64);
            }
        }
    }
    for k in 0..n {
        let via = rows[k].clone();
        for row in rows.iter_mut() {
            if row[k / 64] >> (k % 64) & 1 == 1 {
                for (w, v) in row.iter_mut().zip(&via) {
                    *w |= v;
                }
            }
        }
    }
    SubtypeClass {
        shape,
        members,
        rows,
    }
}

/// Compares `subtype` with the closure on every pair within a class, and on
/// a spread of pairs across classes, which the closure never relates.
pub fn subtype_disagreements(classes: &[SubtypeClass]) -> Vec<String> {
    let mut bad = Vec::new();
    let mut pairs = 0u64;
    for c in classes {
        for (a, s) in c.members.iter().enumerate() {
            for (b, u) in c.members.iter().enumerate() {
                pairs += 1;
                if subtype(s, u) != c.related(a, b) && bad.len() < 10 {
                    bad.push(format!("{s} <= {u}: closure says {}", c.related(a, b)));
                }
            }
        }
    }
    for (i, c) in classes.iter().enumerate() {
        for d in &classes[i + 1..] {
            for s in spread(&c.members) {
                for u in spread(&d.members) {
                    if (subtype(s, u) || subtype(u, s)) && bad.len() < 10 {
                        bad.push(format!("{s} and {u} have different shapes"));
                    }
                }
            }
        }
    }
    assert!(pairs > 0);
    bad
}

fn spread(v: &[Type]) -> Vec<&Type> {
    let n = v.len();
    let mut out = vec![&v[0], &v[n / 2], &v[n - 1]];
    out.dedup();
    out
}

// ---------------------------------------------------------------------------
// Multiset ordering from its definition.

/// `m > n` when `n` is `m` with a non-empty part `x` replaced by values each
/// below some element of `x`.
pub fn dm_greater(m: &[u32], n: &[u32]) -> bool {
    for mask in 1u32..(1 << m.len()) {
        let (mut x, mut rest) = (Vec::new(), Vec::new());
        for (i, &v) in m.iter().enumerate() {
            if mask >> i & 1 == 1 {
                x.push(v);
            } else {
                rest.push(v);
            }
        }
        let mut y = n.to_vec();
        let kept = rest.iter().all(|v| match y.iter().position(|w| w == v) {
            Some(p) => {
                y.swap_remove(p);
                true
            }
            None => false,
        });
        if kept && y.iter().all(|v| x.iter().any(|u| u > v)) {
            return true;
        }
    }
    false
}

/// Sorted multisets of size at most `size` over `0..=max`.
pub fn multisets(size: usize, max: u32) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    let mut layer: Vec<Vec<u32>> = vec![Vec::new()];
    for _ in 0..size {
        layer = layer
            .iter()
            .flat_map(|m| {
                let from = m.last().copied().unwrap_or(0);
                (from..=max).map(move |v| {
                    let mut m = m.clone();
                    m.push(v);
                    m
                })
            })
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

// ---------------------------------------------------------------------------
// Typability by enumerating every annotation.

fn channel_nodes(st: &SimpleType) -> usize {
    match st {
        SimpleType::Chan(ps) => 1 + ps.iter().map(channel_nodes).sum::<usize>(),
        _ => 0,
    }
}

fn decorate(st: &SimpleType, decs: &mut impl Iterator<Item = (Capability, u32)>) -> Type {
    match st {
        SimpleType::Nat => Type::Nat,
        SimpleType::Unit | SimpleType::Var(_) => Type::Unit,
        SimpleType::Chan(ps) => {
            let (cap, level) = decs.next().unwrap();
            Type::chan(cap, level, ps.iter().map(|p| decorate(p, decs)).collect())
        }
    }
}

pub fn annotate(p: &Process, types: &HashMap<Name, Type>) -> Process {
    match p {
        Process::Nil | Process::Out { .. } => p.clone(),
        Process::Par(l, r) => Process::par(annotate(l, types), annotate(r, types)),
        Process::Res {
            name, kind, body, ..
        } => Process::Res {
            name: name.clone(),
            annotation: types.get(name).cloned(),
            kind: *kind,
            body: Box::new(annotate(body, types)),
        },
        Process::In {
            subject,
            params,
            body,
        } => Process::input(subject, params.clone(), annotate(body, types)),
        Process::RepIn {
            subject,
            params,
            body,
        } => Process::rep_input(subject, params.clone(), annotate(body, types)),
    }
}

/// Number of channel positions among the free and restricted names.
pub fn annotation_positions(p: &Process) -> usize {
    let Ok(simple) = infer_simple(p) else {
        return 0;
    };
    typed_names(p)
        .iter()
        .map(|n| simple.get(n).map_or(0, channel_nodes))
        .sum()
}

fn typed_names(p: &Process) -> Vec<Name> {
    let mut names: Vec<Name> = piterm::subst::free_names_in_order(p);
    names.extend(piterm::subst::restricted_names(p));
    names
}

/// Whether some choice of capability and level in `0..=max_level` at every
/// channel position of the free and restricted names makes `p` check.
pub fn typable_by_enumeration(p: &Process, max_level: u32) -> bool {
    let Ok(simple) = infer_simple(p) else {
        return false;
    };
    let names = typed_names(p);
    let shapes: Vec<SimpleType> = names
        .iter()
        .map(|n| simple.get(n).cloned().unwrap_or(SimpleType::Unit))
        .collect();
    let positions: usize = shapes.iter().map(channel_nodes).sum();
    let choices: Vec<(Capability, u32)> = CAPS
        .iter()
        .flat_map(|&c| (0..=max_level).map(move |l| (c, l)))
        .collect();
    let mut digits = vec![0usize; positions];
    loop {
        let mut decs = digits.iter().map(|&d| choices[d]);
        let types: HashMap<Name, Type> = names
            .iter()
            .zip(&shapes)
            .map(|(n, st)| (n.clone(), decorate(st, &mut decs)))
            .collect();
        let free = free_names(p);
        let mut gamma = TypeEnv::new();
        for (n, t) in types.iter().filter(|(n, _)| free.contains(*n)) {
            gamma.set(n.clone(), t.clone());
        }
        if check(&gamma, &annotate(p, &types)).is_ok() {
            return true;
        }
        let mut i = 0;
        loop {
            if i == positions {
                return false;
            }
            digits[i] += 1;
            if digits[i] < choices.len() {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
    }
}

/// Processes of the localised calculus with few channel positions, typable
/// and not.
pub const LPI_CORPUS: [&str; 30] = [
    "a<*>",
    "!a().b<*> | a<*>",
    "!a(x).x<*> | a<b>",
    "!a(x).a<x>",
    "!a(x).b<x> | !b(y).a<y>",
    "!a().b<*> | !b().c<*> | a<*>",
    "!a().b<*> | !b().a<*>",
    "!a(x).(x<*> | x<*>) | a<b> | !b().c<*>",
    "(new a)(!a().b<*> | a<*> | a<*>)",
    "(new a)(!a().a<*>)",
    "!a().(new b)(!b().c<*> | b<*>)",
    "!a().(new b)(!b().a<*> | b<*>)",
    "a<b> | !b().b<*>",
    "!a(x).x<*> | !b().a<c> | b<*>",
    "!a(x).x<*> | !c().a<c>",
    "!a(x, y).x<y> | a<b, *>",
    "!a(x, y).(x<*> | y<*>) | a<b, c> | !b().c<*>",
    "a(x).x<*> | a<b>",
    "!a(x).b<x> | a<*>",
    "!a(n).b<n + 1> | a<3>",
    "!a(n).a<n + 1> | a<0>",
    "!a().b<*> | !a().c<*> | a<*>",
    "!a().(b<*> | !c().d<*>)",
    "!a().!b().a<*>",
    "!a(x).(x<*> | a<x>)",
    "(new r)(!a(x).x<*> | a<r> | r().0)",
    "!a().b<*> | !b().c<*> | !c().a<*>",
    "!p().q<*> | !q().r<*> | !r().s<*>",
    "a<b> | a<c> | !b().c<*>",
    "a<b> | a<c> | !b().c<*> | !c().b<*>",
];

// ---------------------------------------------------------------------------
// Impure examples and encoded terms.

pub fn impure_env(src: &str) -> ImpureEnv {
    ImpureEnv::from_decls(&parse_env(src).unwrap()).unwrap()
}

pub const DIVERGENT: &str = "c(x).!f(y).x<y> | c<f> | f<v>";
pub const MIXED: &str = "!u(x).x<> | !v().u<t> | u<v> | c(y).u<c>";

/// Typings of the mixed example with `v` isolated and the other names
/// imperative, over every level up to 4.
pub fn mixed_typings() -> Vec<String> {
    let p = process(MIXED);
    let mut found = Vec::new();
    for kv in 0..=4 {
        for nu in 0..=4 {
            for m in 0..=4 {
                for nc in 0..=4 {
                    for kt in 0..=4 {
                        for tcap in ['#', 'o'] {
                            let src = format!(
                                "fun v : o{kv}[Unit]\nu : #{nu}[o{m}[Unit]]\nc : #{nc}[Unit]\nt : {tcap}{kt}[Unit]"
                            );
                            if check_impure(&impure_env(&src), &p).is_ok() {
                                found.push(src);
                            }
                        }
                    }
                }
            }
        }
    }
    found
}

pub fn example_three_one() -> piterm::Process {
    process(
        "!f1(n, r).r<n * n>
         | !f2(m, r).(new s : #0[Nat]. (f1<m + 1, s> | s(x).r<x + 1>))
         | !g(p, x, r).(new s : #0[Nat]. (p<x, s> | s(y).p<y, r>))
         | g<f1, 4, t1> | g<f2, 5, t2>",
    )
}

pub const EXAMPLE_THREE_ONE_ENV: &str = "f1 : #1[Nat, o0[Nat]]
f2 : #2[Nat, o0[Nat]]
g : #3[o2[Nat, o0[Nat]], Nat, o0[Nat]]
t1 : #0[Nat]
t2 : #0[Nat]";

/// `p` with every restriction spelled like a key of `types` annotated.
pub fn annotate_by_spelling(p: &piterm::Process, types: &[(Name, String)]) -> piterm::Process {
    use piterm::Process;
    match p {
        Process::Res {
            name,
            kind,
            body,
            annotation,
        } => Process::Res {
            name: name.clone(),
            annotation: types
                .iter()
                .find(|(n, _)| n.display() == name.display())
                .map(|(_, t)| piterm::parse_type(t).unwrap())
                .or_else(|| annotation.clone()),
            kind: *kind,
            body: Box::new(annotate_by_spelling(body, types)),
        },
        Process::Par(l, r) => Process::par(
            annotate_by_spelling(l, types),
            annotate_by_spelling(r, types),
        ),
        Process::In {
            subject,
            params,
            body,
        } => Process::input(subject, params.clone(), annotate_by_spelling(body, types)),
        Process::RepIn {
            subject,
            params,
            body,
        } => Process::rep_input(subject, params.clone(), annotate_by_spelling(body, types)),
        other => other.clone(),
    }
}

/// Ten simply-typed terms, with their free variables declared.
pub const STLC_CORPUS: [&str; 10] = [
    "\\x. x",
    "\\x y. x",
    "\\x y. y",
    "\\f. \\x. f",
    "a : s\n\\x. a",
    "f : s -> t\na : s\nf a",
    "\\f x. f x",
    "\\f x. f (f x)",
    "a : s\n(\\x. x) a",
    "\\x y z. x z (y z)",
];

pub fn stlc_outcome(src: &str) -> Result<u32, String> {
    let prog = parse_lambda(src).map_err(|e| e.to_string())?;
    let p = encode_typed(&prog.context, &prog.term, &Name::global("p")).map_err(|e| e.0)?;
    let (env, annotated) = functional_typing(&p).map_err(|e| e.to_string())?;
    check_impure(&env, &annotated).map_err(|e| format!("{}: {}", e.code(), e.message))
}

// ---------------------------------------------------------------------------
// Type-directed generation of typed processes.

pub const MAX_LEVEL: u32 = 4;
pub const MAX_DEPTH: usize = 4;
pub const BUDGET: usize = 16;

#[derive(Debug, Clone)]
pub struct Case {
    pub seed: u64,
    pub env: TypeEnv,
    pub process: Process,
}

struct Gen {
    rng: ChaCha8Rng,
    budget: usize,
}

impl Gen {
    fn level(&mut self) -> u32 {
        self.rng.gen_range(0..=MAX_LEVEL)
    }

    fn payload(&mut self) -> Vec<Type> {
        match self.rng.gen_range(0..5) {
            0 => vec![Type::Unit],
            1 => vec![Type::Nat],
            2 => vec![Type::output(self.level(), vec![Type::Unit])],
            3 => vec![Type::Unit, Type::output(self.level(), vec![Type::Unit])],
            _ => vec![Type::Nat, Type::output(self.level(), vec![Type::Nat])],
        }
    }

    fn channel(&mut self, sharp: bool) -> Type {
        let cap = if sharp || self.rng.gen_bool(0.7) {
            Capability::Sharp
        } else {
            Capability::Out
        };
        let level = self.level();
        let payload = self.payload();
        Type::chan(cap, level, payload)
    }

    fn value(&mut self, scope: &[(Name, Type)], t: &Type) -> Option<Value> {
        match t {
            Type::Unit => Some(Value::Star),
            Type::Nat => {
                let nats: Vec<&Name> = scope
                    .iter()
                    .filter(|(_, s)| *s == Type::Nat)
                    .map(|(n, _)| n)
                    .collect();
                let lit = Value::Nat(self.rng.gen_range(0..5));
                match nats.choose(&mut self.rng) {
                    Some(n) if self.rng.gen_bool(0.6) => {
                        Some(Value::Add(Box::new(Value::name(n)), Box::new(lit)))
                    }
                    _ => Some(lit),
                }
            }
            _ => {
                let fits: Vec<&Name> = scope
                    .iter()
                    .filter(|(_, s)| subtype(s, t))
                    .map(|(n, _)| n)
                    .collect();
                fits.choose(&mut self.rng).map(|n| Value::name(n))
            }
        }
    }

    fn output(&mut self, scope: &[(Name, Type)], wmax: u32) -> Process {
        self.output_among(scope, wmax, |_| true)
    }

    fn output_among(
        &mut self,
        scope: &[(Name, Type)],
        wmax: u32,
        keep: impl Fn(&Name) -> bool,
    ) -> Process {
        let subjects: Vec<&(Name, Type)> = scope
            .iter()
            .filter(|(n, t)| {
                keep(n) && matches!(t, Type::Chan { cap, level, .. } if cap.allows_output() && *level <= wmax)
            })
            .collect();
        let mut order: Vec<usize> = (0..subjects.len()).collect();
        order.shuffle(&mut self.rng);
        for i in order {
            let (n, Type::Chan { payload, .. }) = subjects[i] else {
                unreachable!()
            };
            let values: Option<Vec<Value>> = payload.iter().map(|t| self.value(scope, t)).collect();
            if let Some(values) = values {
                return Process::out(n, values);
            }
        }
        Process::Nil
    }

    fn input(
        &mut self,
        scope: &[(Name, Type)],
        depth: usize,
        wmax: u32,
        replicated: bool,
    ) -> Process {
        let subjects: Vec<(Name, u32, Vec<Type>)> = scope
            .iter()
            .filter_map(|(n, t)| match t {
                Type::Chan {
                    cap,
                    level,
                    payload,
                } if cap.allows_input() && (!replicated || *level >= 1) => {
                    Some((n.clone(), *level, payload.clone()))
                }
                _ => None,
            })
            .collect();
        let Some((subject, level, payload)) = subjects.choose(&mut self.rng).cloned() else {
            return self.output(scope, wmax);
        };
        let mut inner = scope.to_vec();
        let params: Vec<Name> = payload
            .iter()
            .map(|t| {
                let x = Name::fresh("x");
                inner.push((x.clone(), t.clone()));
                x
            })
            .collect();
        if replicated {
            let body = self.process(&inner, depth - 1, level - 1);
            Process::rep_input(&subject, params, body)
        } else {
            let body = self.process(&inner, depth - 1, wmax);
            Process::input(&subject, params, body)
        }
    }

    fn process(&mut self, scope: &[(Name, Type)], depth: usize, wmax: u32) -> Process {
        if self.budget == 0 {
            return Process::Nil;
        }
        self.budget -= 1;
        match self.rng.gen_range(0..10) {
            0..=2 => self.output(scope, wmax),
            3 | 4 => {
                let l = self.process(scope, depth, wmax);
                let r = self.process(scope, depth, wmax);
                Process::par(l, r)
            }
            5 if depth > 0 => self.input(scope, depth, wmax, false),
            6 | 7 if depth > 0 => self.input(scope, depth, wmax, true),
            8 => {
                let n = Name::fresh("n");
                let t = self.channel(true);
                let mut inner = scope.to_vec();
                inner.push((n.clone(), t.clone()));
                let body = self.process(&inner, depth, wmax);
                Process::res(&n, Some(t), body)
            }
            _ => Process::Nil,
        }
    }
}

/// A process together with an environment that types it, built so that every
/// output stays within the weight its context allows.
pub fn generate(seed: u64) -> Case {
    let mut g = Gen {
        rng: ChaCha8Rng::seed_from_u64(seed),
        budget: BUDGET,
    };
    let mut scope = Vec::new();
    let mut gamma = TypeEnv::new();
    for (n, t) in [("r", Type::Unit), ("s", Type::Nat)] {
        let n = Name::global(n);
        let t = Type::sharp(0, vec![t]);
        gamma.set(n.clone(), t.clone());
        scope.push((n, t));
    }
    for i in 0..g.rng.gen_range(2..=3) {
        let n = Name::global(&format!("c{i}"));
        let t = g.channel(i == 0);
        gamma.set(n.clone(), t.clone());
        scope.push((n, t));
    }
    let mut parts: Vec<Process> = Vec::new();
    for _ in 0..g.rng.gen_range(1..=3) {
        let replicated = g.rng.gen_bool(0.6);
        g.budget = g.budget.saturating_sub(1);
        parts.push(g.input(&scope, MAX_DEPTH, MAX_LEVEL, replicated));
    }
    for _ in 0..g.rng.gen_range(0..=2) {
        parts.push(g.process(&scope, MAX_DEPTH, MAX_LEVEL));
    }
    let mut served = Vec::new();
    for p in &parts {
        input_subjects(p, &mut served);
    }
    for _ in 0..g.rng.gen_range(1..=3) {
        let client = g.output_among(&scope, MAX_LEVEL, |n| served.contains(n));
        parts.push(client);
    }
    Case {
        seed,
        env: gamma,
        process: Process::par_all(parts),
    }
}

fn input_subjects(p: &Process, out: &mut Vec<Name>) {
    match p {
        Process::Par(l, r) => {
            input_subjects(l, out);
            input_subjects(r, out);
        }
        Process::Res { body, .. } => input_subjects(body, out),
        Process::In { subject, .. } | Process::RepIn { subject, .. } => out.push(subject.clone()),
        _ => {}
    }
}

// ---------------------------------------------------------------------------
// Random rearrangement up to structural congruence.

pub fn scramble(p: &Process, rng: &mut impl Rng) -> Process {
    let q = match p {
        Process::Nil | Process::Out { .. } => p.clone(),
        Process::In {
            subject,
            params,
            body,
        } => Process::input(subject, params.clone(), scramble(body, rng)),
        Process::RepIn {
            subject,
            params,
            body,
        } => Process::rep_input(subject, params.clone(), scramble(body, rng)),
        Process::Res {
            name,
            annotation,
            kind,
            body,
        } => {
            let body = scramble(body, rng);
            match body {
                Process::Par(l, r) if !free_names(&r).contains(name) && rng.gen_bool(0.5) => {
                    Process::par(restrict(name, annotation, *kind, *l), *r)
                }
                body => restrict(name, annotation, *kind, body),
            }
        }
        Process::Par(l, r) => {
            let (mut l, mut r) = (scramble(l, rng), scramble(r, rng));
            if rng.gen_bool(0.5) {
                std::mem::swap(&mut l, &mut r);
            }
            match l {
                Process::Res {
                    name,
                    annotation,
                    kind,
                    body,
                } if !free_names(&r).contains(&name) && rng.gen_bool(0.3) => {
                    restrict(&name, &annotation, kind, Process::par(*body, r))
                }
                Process::Par(a, b) if rng.gen_bool(0.5) => Process::par(*a, Process::par(*b, r)),
                l => Process::par(l, r),
            }
        }
    };
    if rng.gen_bool(0.1) {
        Process::par(q, Process::Nil)
    } else {
        q
    }
}

fn restrict(name: &Name, annotation: &Option<Type>, kind: ResKind, body: Process) -> Process {
    Process::Res {
        name: name.clone(),
        annotation: annotation.clone(),
        kind,
        body: Box::new(body),
    }
}

// ---------------------------------------------------------------------------
// The properties every generated case must satisfy.

#[derive(Debug, Default, Clone, Copy)]
pub struct CaseStats {
    pub states: usize,
    pub edges: usize,
}

/// Typability, termination under exhaustive exploration, subject reduction
/// with non-increasing weight, strict decrease of the measure on every edge
/// and invariance of weight and measure under congruence.
pub fn check_case(case: &Case) -> Result<CaseStats, String> {
    let Case {
        env,
        process: p,
        seed,
    } = case;
    let w = check(env, p).map_err(|e| format!("generated process is ill-typed: {e}\n{p}"))?;
    let run = certified_run(env, p, Bounds::default()).map_err(|e| e.to_string())?;
    if run.verdict != Verdict::Terminated {
        return Err(format!(
            "verdict {:?} after {} states\n{p}",
            run.verdict,
            run.states.len()
        ));
    }
    for s in &run.states {
        let q = s.to_process();
        match check(env, &q) {
            Ok(w2) if w2 <= w => {}
            Ok(w2) => return Err(format!("weight grew from {w} to {w2} at {q}")),
            Err(e) => return Err(format!("reduct is ill-typed: {e}\n{q}")),
        }
    }
    for c in run.measure_trace.as_deref().unwrap_or_default() {
        if !dm_greater(&c.before.to_vec(), &c.after.to_vec()) {
            return Err(format!("measure {} does not exceed {}", c.before, c.after));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
    let m = measure(env, p).map_err(|e| e.to_string())?;
    for _ in 0..3 {
        let q = scramble(p, &mut rng);
        if !congruent(p, &q) {
            return Err(format!("rearrangement not congruent: {q}"));
        }
        if check(env, &q) != Ok(w) || measure(env, &q).as_ref() != Ok(&m) {
            return Err(format!("weight or measure changed under congruence: {q}"));
        }
    }
    Ok(CaseStats {
        states: run.states.len(),
        edges: run.edges.len(),
    })
}

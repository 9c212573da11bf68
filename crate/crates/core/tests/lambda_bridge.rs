use piterm::infer::{infer, locality_check, InferMode};
use piterm::lambda::{check_stlc, encode, parse_lambda};
use piterm::semantics::{explore, Bounds, Verdict};
use piterm::{Name, Process};

const M1: &str = "f : (s -> t) -> t -> t\nv : s\nu : s -> t\nf (\\x. f u (u v))";
const M2: &str = "a : s\nt : s -> r\n(\\u. (\\v. u v) (\\y. u t)) (\\x. x a)";

fn encoded(src: &str) -> Process {
    let prog = parse_lambda(src).unwrap();
    check_stlc(&prog.context, &prog.term).unwrap();
    encode(&prog.term, &Name::global("p"))
}

#[test]
fn first_counterexample_is_inferred() {
    let p = encoded(M1);
    assert!(locality_check(&p));
    let r = infer(&p, InferMode::Flexible);
    assert!(r.is_ok(), "{r:?}");
}

#[test]
fn second_counterexample_has_a_strict_cycle() {
    let err = infer(&encoded(M2), InferMode::Flexible).unwrap_err();
    assert_eq!(err.code(), "CYC", "{err}");
}

#[test]
fn equality_levels_lose_the_first_counterexample() {
    let err = infer(&encoded(M1), InferMode::DsEquality).unwrap_err();
    assert_eq!(err.code(), "CYC", "{err}");
}

#[test]
fn both_encodings_terminate() {
    for src in [M1, M2] {
        let r = explore(&encoded(src), Bounds::default());
        assert_eq!(r.verdict, Verdict::Terminated);
        assert!(r.states.len() < 100_000);
    }
}

/// True when `body`, run on its own, always ends as the single output
/// `subject<first, last>`.
fn settles_to(body: &Process, subject: &Name, first: &Name, last: &Name) -> bool {
    let r = explore(body, Bounds::default());
    let expected = Process::out(
        subject,
        vec![piterm::Value::name(first), piterm::Value::name(last)],
    );
    r.verdict == Verdict::Terminated
        && r.states
            .iter()
            .enumerate()
            .all(|(i, s)| r.edges.iter().any(|&(from, _)| from == i) || s.to_process() == expected)
}

/// `u<v,p> | !v(y,q).u<t,q> | !u(x,q').x<a,q'>` among the threads of a
/// state, for some names `u` and `v`, where server bodies are read up to
/// their own internal communications.
fn has_stuck_pattern(threads: &[Process]) -> bool {
    let p = Name::global("p");
    let t = Name::global("t");
    let a = Name::global("a");
    for msg in threads {
        let Process::Out {
            subject: u,
            payload,
        } = msg
        else {
            continue;
        };
        let [v, k] = payload.as_slice() else { continue };
        let (Some(v), Some(k)) = (v.as_name(), k.as_name()) else {
            continue;
        };
        if *k != p {
            continue;
        }
        let v_server = threads.iter().any(|c| match c {
            Process::RepIn {
                subject,
                params,
                body,
            } if subject == v && params.len() == 2 => settles_to(body, u, &t, &params[1]),
            _ => false,
        });
        let u_server = threads.iter().any(|c| match c {
            Process::RepIn {
                subject,
                params,
                body,
            } if subject == u && params.len() == 2 => settles_to(body, &params[0], &a, &params[1]),
            _ => false,
        });
        if v_server && u_server {
            return true;
        }
    }
    false
}

#[test]
fn second_counterexample_reaches_the_untypable_core() {
    let r = explore(&encoded(M2), Bounds::default());
    assert!(r.states.iter().any(|s| has_stuck_pattern(&s.components)));
    assert!(!has_stuck_pattern(&r.states[0].components));
}

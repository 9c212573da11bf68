//! Termination typing for the asynchronous π-calculus.
//!
//! The crate covers the whole pipeline: parsing and printing processes,
//! the level-based type checker and its multiset measure, a reduction engine
//! that can certify the measure along every step, type inference for the
//! localised calculus, the functional/imperative extension, and a
//! call-by-value encoding of the simply-typed λ-calculus.

pub mod impure;
pub mod infer;
pub mod lambda;
pub mod name;
pub mod semantics;
pub mod subst;
pub mod syntax;
pub mod typing;

pub use name::Name;
pub use syntax::{parse_process, parse_type, Capability, Process, ResKind, Type, Value};

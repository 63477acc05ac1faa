//! Rainbow transversals over collections of graphs.
//!
//! A collection `G = {G_1, ..., G_s}` holds `s` (not necessarily distinct)
//! simple graphs on a shared vertex set `{0, ..., n-1}`. A *transversal* is a
//! graph `H` on those vertices together with an injection `phi` from the
//! edges of `H` into the colors `1..=s` such that every edge lies in the
//! graph of its assigned color; it is *full* when `phi` is a bijection.
//!
//! This crate provides:
//!
//! * [`collection`] — the immutable data model, color-set queries, and the
//!   certificate verifier,
//! * [`hamilton`] — a constructive rotation–extension solver that produces a
//!   Hamiltonian transversal whenever every graph has minimum degree at
//!   least `n/2` and `s = n`,
//! * [`matching`] — a constructive solver for perfect-matching transversals
//!   under the same degree bound with `s = n/2`,
//! * [`oracle`] — exhaustive ground truth at small sizes,
//! * [`gen`] — seeded instance generators, including the tight
//!   counterexample families,
//! * [`formats`] — the `rgc` instance format and JSON certificates,
//! * [`batch`] — data-parallel trial runners used by the bench harness.
//!
//! Solver runs are deterministic: move order and tie-breaking are fixed, so
//! a given instance always yields the same certificate.

#![forbid(unsafe_code)]

mod bits;
pub mod batch;
pub mod collection;
pub mod digraph;
pub mod formats;
pub mod gen;
pub mod hamilton;
pub mod matching;
pub mod oracle;

pub use collection::{ColorSet, GraphCollection, Problem, Transversal, VerifyReport};

/// Crate-wide error type.
///
/// `Input` and `Parse` are caller mistakes (exit code 2 in the CLI).
/// `Invariant` means the solver reached a state its move system cannot
/// handle, which indicates an implementation bug rather than an unsolvable
/// instance; the offending state is carried along for replay (exit code 3).
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{0}")]
    Input(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("internal invariant violation in {context}: {message}")]
    Invariant {
        context: &'static str,
        message: String,
        /// JSON dump of the state the solver was stuck in.
        state: String,
    },
}

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub fn invariant(context: &'static str, msg: impl Into<String>, state: String) -> Self {
        Error::Invariant {
            context,
            message: msg.into(),
            state,
        }
    }

    /// Process exit code mandated for this error kind.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Input(_) | Error::Parse { .. } => 2,
            Error::Invariant { .. } => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

//! Batch trial runner behind the bench harness and the acceptance suite.
//!
//! Trials are independent (generate, solve, verify) and run data-parallel
//! through rayon when the `parallel` feature (default) is enabled;
//! [`run_trials_sequential`] always runs in order, and without the feature
//! [`run_trials`] falls back to it. Records are deterministic given
//! `(problem, n, seed)` except for the wall-time field.

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::Serialize;
use std::time::Instant;

use crate::collection::Problem;
use crate::hamilton::{self, HamiltonStats};
use crate::matching::{self, MatchStats};
use crate::{gen, Error};

#[derive(Clone, Copy, Debug, Serialize)]
pub struct TrialSpec {
    pub problem: Problem,
    pub n: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct TrialRecord {
    pub problem: Problem,
    pub n: usize,
    pub seed: u64,
    /// Solved and the certificate verified.
    pub ok: bool,
    pub wall_ms: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hamilton: Option<HamiltonStats>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matching: Option<MatchStats>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    /// Exit-code class of `error` (2 input, 3 invariant violation).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error_code: Option<u8>,
}

pub fn run_trial(spec: &TrialSpec) -> TrialRecord {
    let start = Instant::now();
    let mut record = TrialRecord {
        problem: spec.problem,
        n: spec.n,
        seed: spec.seed,
        ok: false,
        wall_ms: 0.0,
        hamilton: None,
        matching: None,
        error: None,
        error_code: None,
    };
    let outcome: Result<bool, Error> = (|| {
        let coll = gen::gen_random_dirac(spec.n, spec.problem, spec.seed)?;
        match spec.problem {
            Problem::Hamilton => {
                let out = hamilton::solve_hamilton(&coll)?;
                record.hamilton = Some(out.stats);
                Ok(coll
                    .verify_transversal(&out.transversal, Problem::Hamilton)
                    .valid)
            }
            Problem::Matching => {
                let out = matching::solve_matching(&coll)?;
                record.matching = Some(out.stats);
                Ok(coll
                    .verify_transversal(&out.transversal, Problem::Matching)
                    .valid)
            }
        }
    })();
    match outcome {
        Ok(valid) => record.ok = valid,
        Err(e) => {
            record.error_code = Some(e.exit_code());
            record.error = Some(e.to_string());
        }
    }
    record.wall_ms = start.elapsed().as_secs_f64() * 1e3;
    record
}

/// Runs trials in parallel (input order preserved in the output) when the
/// `parallel` feature is on; sequentially otherwise.
pub fn run_trials(specs: &[TrialSpec]) -> Vec<TrialRecord> {
    #[cfg(feature = "parallel")]
    {
        specs.par_iter().map(run_trial).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        run_trials_sequential(specs)
    }
}

pub fn run_trials_sequential(specs: &[TrialSpec]) -> Vec<TrialRecord> {
    specs.iter().map(run_trial).collect()
}

/// Per-trial CSV: one row per record plus a header.
pub fn csv_report(records: &[TrialRecord]) -> String {
    let mut out = String::from("problem,n,seed,ok,wall_ms,steps,detail\n");
    for r in records {
        let (steps, detail) = match (&r.hamilton, &r.matching) {
            (Some(h), _) => (
                h.steps,
                h.finalize_case
                    .map_or_else(|| "grown-to-full".to_string(), |c| format!("{c:?}")),
            ),
            (_, Some(m)) => (m.growth_steps, format!("{:?}", m.completion)),
            _ => (0, r.error.clone().unwrap_or_default()),
        };
        out.push_str(&format!(
            "{},{},{},{},{:.3},{},{}\n",
            r.problem, r.n, r.seed, r.ok, r.wall_ms, steps, detail
        ));
    }
    out
}

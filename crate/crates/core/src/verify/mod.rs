//! Numerical checks of the inequalities, characterizations and convexity
//! statements behind the constructions in [`crate::minimal`].
//!
//! Every check produces a [`CheckResult`]. Its `worst_violation` is the
//! largest observed value of a quantity that must stay at or below
//! `tolerance`; checks with several clauses rescale secondary clauses into
//! the units of the first one.

mod battery;
mod checks;
pub mod fixtures;
mod midpoints;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::GeoError;
use crate::linalg::CMat;

pub use battery::{run_report, BATTERY};
pub use checks::{
    check_araki_contraction, check_convexity_distance, check_diagonal_monotonicity, check_eigencurve_monotonicity,
    check_iemi, check_pinching_minimality, eigen_curves, structure_diagnostics, track_phases, StructureDiagnostics,
};
pub use midpoints::{
    antipodal_counterexample, check_midpoint_convexity, intermediate_membership, CounterexampleReport,
    IntermediateSetReport,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub worst_violation: f64,
    pub tolerance: f64,
    pub witness: Option<Value>,
    pub seeds_run: u64,
}

impl CheckResult {
    /// Combines two results of the same check (for example over several
    /// dimensions). The witness of the worse one is kept.
    pub fn merge(mut self, other: CheckResult) -> CheckResult {
        self.seeds_run += other.seeds_run;
        if other.worst_violation > self.worst_violation {
            self.worst_violation = other.worst_violation;
            if other.witness.is_some() {
                self.witness = other.witness;
            }
        } else if self.witness.is_none() {
            self.witness = other.witness;
        }
        self.passed = self.passed && other.passed;
        self
    }

    /// Re-evaluates the verdict with the tolerance multiplied by `scale`.
    pub fn rescaled(&self, scale: f64) -> CheckResult {
        let mut out = self.clone();
        out.tolerance *= scale;
        out.passed = out.worst_violation <= out.tolerance;
        out
    }
}

/// Accumulates observations for one check.
#[derive(Debug, Clone)]
pub(crate) struct Tally {
    name: String,
    tolerance: f64,
    worst: f64,
    witness: Option<Value>,
    seeds: u64,
    failed: bool,
}

impl Tally {
    pub(crate) fn new(name: impl Into<String>, tolerance: f64) -> Self {
        Tally {
            name: name.into(),
            tolerance,
            worst: f64::NEG_INFINITY,
            witness: None,
            seeds: 0,
            failed: false,
        }
    }

    /// Records `value` (which must be `≤ tolerance`). The witness is only
    /// built for the worst failing observation.
    pub(crate) fn observe(&mut self, value: f64, witness: impl FnOnce() -> Value) {
        let value = if value.is_nan() { f64::MAX } else { value };
        let failing = value > self.tolerance;
        if value > self.worst {
            self.worst = value;
            if failing {
                self.witness = Some(witness());
            }
        }
        self.failed |= failing;
    }

    /// Records a clause with its own tolerance `tol`, rescaled into the
    /// units of this tally.
    pub(crate) fn observe_scaled(&mut self, value: f64, tol: f64, witness: impl FnOnce() -> Value) {
        self.observe(value * (self.tolerance / tol), witness);
    }

    /// Records a failed instance caused by an error.
    pub(crate) fn observe_error(&mut self, err: &GeoError, context: Value) {
        self.observe(
            f64::MAX,
            || json!({ "error": err.code(), "message": err.to_string(), "context": context }),
        );
    }

    pub(crate) fn seed(&mut self) {
        self.seeds += 1;
    }

    pub(crate) fn finish(self) -> CheckResult {
        let worst = if self.worst == f64::NEG_INFINITY {
            0.0
        } else {
            self.worst
        };
        CheckResult {
            name: self.name,
            passed: !self.failed,
            worst_violation: worst,
            tolerance: self.tolerance,
            witness: if self.failed { self.witness } else { None },
            seeds_run: self.seeds,
        }
    }
}

/// `[[re, im], …]` rows of a matrix, for witnesses.
pub fn matrix_json(m: &CMat) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| Value::Array((0..m.ncols()).map(|j| json!([m[(i, j)].re, m[(i, j)].im])).collect()))
            .collect(),
    )
}

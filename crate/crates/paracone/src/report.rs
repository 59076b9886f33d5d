//! Machine-readable outcome of a checker run.

use serde::{Deserialize, Serialize};

use crate::paraconvexity::{DefectForm, SampleTriple};
use crate::vector::Vector;

/// What a failed (or worst surviving) sample looked like.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Witness {
    /// A (x₁, x₂, λ) sample of a convexity-type inequality.
    Triple(SampleTriple),
    /// A single scalar probe point, e.g. a modulus grid value or a trace step.
    Point { t: f64 },
    /// An ordered pair of trace steps t_large > t_small.
    Pair { t_large: f64, t_small: f64 },
}

/// Parameters a check ran with, echoed into every report.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CheckParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k0: Option<Vector>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub form: Option<DefectForm>,
    /// Tolerance in force at the reported worst sample.
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Outcome of a checker: verdict, worst-case slack and where it occurred.
///
/// `worst_slack` is the raw slack of the sample with the smallest margin
/// (slack plus its own tolerance); `passed` holds exactly when that margin
/// is nonnegative, i.e. `worst_slack >= -params.tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub passed: bool,
    pub worst_slack: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    pub samples_used: usize,
    pub params: CheckParams,
}

impl CheckReport {
    /// A vacuous pass over zero samples.
    pub fn empty_pass(params: CheckParams) -> Self {
        CheckReport {
            passed: true,
            worst_slack: f64::INFINITY,
            witness: None,
            samples_used: 0,
            params,
        }
    }
}

/// Running worst-case accumulator for sample loops.
///
/// Samples are ranked by margin = slack + tolerance, so the reported worst
/// sample is the one closest to (or deepest into) violation under its own
/// relative tolerance. Merging is associative, which keeps data-parallel
/// evaluation and sequential evaluation observationally identical.
#[derive(Debug, Clone)]
pub struct WorstCase {
    pub margin: f64,
    pub slack: f64,
    pub tolerance: f64,
    pub witness: Option<Witness>,
    pub samples: usize,
    pub all_contained: bool,
}

impl WorstCase {
    pub fn new() -> Self {
        WorstCase {
            margin: f64::INFINITY,
            slack: f64::INFINITY,
            tolerance: 0.0,
            witness: None,
            samples: 0,
            all_contained: true,
        }
    }

    pub fn record(&mut self, slack: f64, tolerance: f64, contained: bool, witness: Witness) {
        self.samples += 1;
        self.all_contained &= contained;
        let margin = slack + tolerance;
        if margin < self.margin {
            self.margin = margin;
            self.slack = slack;
            self.tolerance = tolerance;
            self.witness = Some(witness);
        }
    }

    pub fn merge(mut self, other: WorstCase) -> WorstCase {
        self.samples += other.samples;
        self.all_contained &= other.all_contained;
        if other.margin < self.margin {
            self.margin = other.margin;
            self.slack = other.slack;
            self.tolerance = other.tolerance;
            self.witness = other.witness;
        }
        self
    }

    pub fn into_report(self, mut params: CheckParams) -> CheckReport {
        params.tolerance = self.tolerance;
        CheckReport {
            passed: self.all_contained,
            worst_slack: self.slack,
            witness: if self.all_contained { None } else { self.witness },
            samples_used: self.samples,
            params,
        }
    }
}

impl Default for WorstCase {
    fn default() -> Self {
        Self::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(slack: f64, tol: f64, ok: bool) -> WorstCase {
        let mut acc = WorstCase::new();
        acc.record(slack, tol, ok, Witness::Point { t: slack });
        acc
    }

    #[test]
    fn merge_is_associative_on_worst_sample() {
        let a = w(0.5, 1e-9, true);
        let b = w(-0.2, 1e-9, false);
        let c = w(0.1, 1e-9, true);
        let left = a.clone().merge(b.clone()).merge(c.clone());
        let right = a.merge(b.merge(c));
        assert_eq!(left.slack, right.slack);
        assert_eq!(left.samples, right.samples);
        assert_eq!(left.all_contained, right.all_contained);
    }

    #[test]
    fn failed_report_carries_witness() {
        let rep = w(-0.2, 1e-9, false).into_report(CheckParams::default());
        assert!(!rep.passed);
        assert_eq!(rep.worst_slack, -0.2);
        assert!(rep.witness.is_some());
    }

    #[test]
    fn passed_report_has_no_witness() {
        let rep = w(0.3, 1e-9, true).into_report(CheckParams::default());
        assert!(rep.passed);
        assert!(rep.witness.is_none());
    }
}

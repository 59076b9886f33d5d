//! The modulus function α controlling the paraconvexity defect.
//!
//! A valid modulus is nondecreasing with α(0) = 0 and α(t)/t → 0 as t → 0⁺.
//! The limit cannot be certified from finitely many samples, so validation
//! checks a falsifiable proxy on a geometric probe grid: α(t)/t must be
//! nonincreasing as t decreases and must fall below a fixed threshold at the
//! grid tail.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::report::{CheckParams, CheckReport, Witness, WorstCase};

/// Threshold the ratio α(t)/t must reach at the tail of the probe grid.
pub const RATIO_TAIL_TOL: f64 = 1e-9;

/// Floating-point slop for the monotonicity comparisons.
const MONOTONE_TOL: f64 = 1e-12;

type Evaluator = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A modulus α: [0, ∞) → [0, ∞), evaluable pointwise.
#[derive(Clone)]
pub struct Modulus {
    evaluator: Evaluator,
    label: String,
    probe_grid: Vec<f64>,
}

impl std::fmt::Debug for Modulus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Modulus")
            .field("label", &self.label)
            .field("probe_grid_len", &self.probe_grid.len())
            .finish()
    }
}

/// Geometric grid 2⁻¹, 2⁻², …, 2⁻³⁰⁰ (decreasing).
///
/// The tail reaches ~5·10⁻⁹¹ so that slowly vanishing ratios such as t^0.1
/// still clear [`RATIO_TAIL_TOL`] while α(t) = t does not.
pub fn default_probe_grid() -> Vec<f64> {
    (1..=300).map(|k| 2f64.powi(-k)).collect()
}

impl Modulus {
    pub fn new<F>(label: impl Into<String>, evaluator: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Modulus {
            evaluator: Arc::new(evaluator),
            label: label.into(),
            probe_grid: default_probe_grid(),
        }
    }

    /// Replace the probe grid; values must be positive and strictly decreasing.
    pub fn with_probe_grid(mut self, grid: Vec<f64>) -> Result<Self> {
        if grid.is_empty()
            || grid.iter().any(|t| !t.is_finite() || *t <= 0.0)
            || grid.windows(2).any(|w| w[1] >= w[0])
        {
            return Err(Error::InvalidModulus(
                "probe grid must be positive and strictly decreasing".into(),
            ));
        }
        self.probe_grid = grid;
        Ok(self)
    }

    /// The power modulus α(t) = t^γ, valid for γ > 1.
    pub fn power(gamma: f64) -> Result<Self> {
        if !gamma.is_finite() || gamma <= 1.0 {
            return Err(Error::InvalidModulus(format!(
                "power modulus needs gamma > 1 so that alpha(t)/t vanishes; got {gamma}"
            )));
        }
        Ok(Modulus::new(format!("pow:{gamma}"), move |t: f64| {
            t.powf(gamma)
        }))
    }

    /// Parse a CLI modulus spec, currently `pow:<gamma>`.
    pub fn parse(spec: &str) -> Result<Self> {
        if let Some(gamma) = spec.strip_prefix("pow:") {
            let gamma: f64 = gamma
                .parse()
                .map_err(|_| Error::InvalidModulus(format!("bad exponent in '{spec}'")))?;
            Modulus::power(gamma)
        } else {
            Err(Error::InvalidModulus(format!(
                "unknown modulus spec '{spec}' (expected pow:<gamma>)"
            )))
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        (self.evaluator)(t)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn probe_grid(&self) -> &[f64] {
        &self.probe_grid
    }

    /// Check the defining properties on the probe grid.
    ///
    /// Pass requires: α(0) = 0; α finite and nonnegative on the grid;
    /// α nondecreasing; α(t)/t nonincreasing as t decreases and below
    /// [`RATIO_TAIL_TOL`] at the smallest grid point. The report's witness
    /// is the probe point of the worst violation.
    pub fn validate(&self) -> CheckReport {
        let params = CheckParams {
            alpha: Some(self.label.clone()),
            tolerance: MONOTONE_TOL,
            ..CheckParams::default()
        };
        let mut worst = WorstCase::new();

        let at_zero = self.eval(0.0);
        let zero_slack = if at_zero.is_finite() {
            -at_zero.abs()
        } else {
            f64::NEG_INFINITY
        };
        worst.record(
            zero_slack,
            MONOTONE_TOL,
            zero_slack >= -MONOTONE_TOL,
            Witness::Point { t: 0.0 },
        );

        let mut values = Vec::with_capacity(self.probe_grid.len());
        for &t in &self.probe_grid {
            let a = self.eval(t);
            if !a.is_finite() {
                worst.record(
                    f64::NEG_INFINITY,
                    MONOTONE_TOL,
                    false,
                    Witness::Point { t },
                );
                return worst.into_report(params);
            }
            worst.record(a, MONOTONE_TOL, a >= -MONOTONE_TOL, Witness::Point { t });
            values.push(a);
        }

        // grid is decreasing: nondecreasing in t means values[i] >= values[i+1]
        for i in 0..values.len() - 1 {
            let gap = values[i] - values[i + 1];
            worst.record(
                gap,
                MONOTONE_TOL,
                gap >= -MONOTONE_TOL,
                Witness::Point {
                    t: self.probe_grid[i + 1],
                },
            );
        }

        let ratios: Vec<f64> = values
            .iter()
            .zip(&self.probe_grid)
            .map(|(a, t)| a / t)
            .collect();
        for i in 0..ratios.len() - 1 {
            let gap = ratios[i] - ratios[i + 1];
            worst.record(
                gap,
                MONOTONE_TOL,
                gap >= -MONOTONE_TOL,
                Witness::Point {
                    t: self.probe_grid[i + 1],
                },
            );
        }

        let tail = *ratios.last().unwrap();
        let t_tail = *self.probe_grid.last().unwrap();
        worst.record(
            RATIO_TAIL_TOL - tail,
            0.0,
            tail < RATIO_TAIL_TOL,
            Witness::Point { t: t_tail },
        );

        worst.into_report(params)
    }

    /// Largest probe-grid t with 2C·α(2t)/(2t) ≤ 1.
    ///
    /// For a valid modulus the ratio is nonincreasing as t decreases, so the
    /// condition then holds for every smaller t as well. Returns 0 when no
    /// grid point qualifies.
    pub fn prop2_delta(&self, c: f64) -> f64 {
        for &t in &self.probe_grid {
            let ratio = self.eval(2.0 * t) / (2.0 * t);
            if 2.0 * c * ratio <= 1.0 + 1e-12 {
                return t;
            }
        }
        0.0
    }
}

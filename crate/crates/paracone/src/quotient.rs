//! α-corrected difference quotients along a direction and the analysis
//! built on them.
//!
//! For F strongly paraconvex at (C, k₀, α), the corrected quotient
//!
//! ```text
//! φ(t) = (F(x₀ + t·h) − F(x₀)) / t + C·(α(t)/t)·k₀
//! ```
//!
//! is α-nondecreasing: φ(t) − φ(t₁) + C·(α(t₁)/t₁)·k₀ ∈ K for 0 < t₁ < t,
//! and bounded below by b = F(x₀) − F(x₀ − h) − (C·α(1) + 1)·k₀ on (0, δ)
//! where δ satisfies 2C·α(2t)/(2t) ≤ 1 for t < δ. Together these force the
//! raw quotient to converge as t → 0⁺, which is what the derivative
//! estimator certifies numerically.

use serde::Serialize;

use crate::cone::ConeDescriptor;
use crate::corpus::MappingSpec;
use crate::error::{Error, Result};
use crate::modulus::Modulus;
use crate::report::{CheckParams, CheckReport, Witness, WorstCase};
use crate::vector::Vector;

/// Parameters a trace was built with.
#[derive(Debug, Clone)]
pub struct TraceParams {
    pub c: f64,
    pub k0: Vector,
    pub alpha: Modulus,
}

/// The sampled sequence {tᵢ, φ(tᵢ)} of α-corrected difference quotients,
/// anchored at x₀ (t₀ = 0 convention).
#[derive(Debug, Clone)]
pub struct QuotientTrace {
    pub x0: Vector,
    /// Unit direction actually traced.
    pub h: Vector,
    /// Norm of the caller's direction; t values refer to the unit direction,
    /// so steps along the original h correspond to t / h_scale.
    pub h_scale: f64,
    /// Strictly decreasing positive step sizes.
    pub t_values: Vec<f64>,
    /// (F(x₀ + tᵢh) − F(x₀)) / tᵢ
    pub raw_quotients: Vec<Vector>,
    /// raw + C·(α(tᵢ)/tᵢ)·k₀
    pub corrected_quotients: Vec<Vector>,
    pub params: TraceParams,
    /// Validity radius for the lower bound: 2C·α(2t)/(2t) ≤ 1 for t < delta.
    pub delta: f64,
    /// Leading steps left the domain box or t underflowed.
    pub truncated: bool,
}

impl QuotientTrace {
    pub fn len(&self) -> usize {
        self.t_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t_values.is_empty()
    }

    /// The correction term C·(α(tᵢ)/tᵢ)·k₀ at step i. Recomputed with the
    /// same expression the builder used, so
    /// `corrected_quotients[i] == raw_quotients[i].add(&correction(i))`
    /// holds bit for bit.
    pub fn correction(&self, i: usize) -> Vector {
        let t = self.t_values[i];
        self.params
            .k0
            .scale(self.params.c * self.params.alpha.eval(t) / t)
    }

    fn truncate(&mut self, keep: usize) {
        self.t_values.truncate(keep);
        self.raw_quotients.truncate(keep);
        self.corrected_quotients.truncate(keep);
    }
}

/// Build the corrected-quotient trace on the geometric grid
/// tᵢ = t_start·ratioⁱ⁻¹, i = 1…steps.
///
/// A non-unit `h` is normalized and the scale recorded in `h_scale` (the
/// t grid is rescaled accordingly, so x₀ + tᵢ·ĥ visits the same points).
/// Steps that leave the domain box (only possible at the head of the grid)
/// or underflow are dropped and flagged via `truncated`.
#[allow(clippy::too_many_arguments)]
pub fn build_trace(
    f: &MappingSpec,
    x0: &Vector,
    h: &Vector,
    c: f64,
    k0: &Vector,
    alpha: &Modulus,
    t_start: f64,
    ratio: f64,
    steps: usize,
) -> Result<QuotientTrace> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "ratio must be in (0, 1), got {ratio}"
        )));
    }
    if !(t_start.is_finite() && t_start > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "t_start must be positive, got {t_start}"
        )));
    }
    if steps == 0 {
        return Err(Error::InvalidParameter("steps must be positive".into()));
    }
    if !c.is_finite() || c < 0.0 {
        return Err(Error::InvalidParameter(format!("C must be >= 0, got {c}")));
    }
    if x0.dim() != f.input_dim() || h.dim() != f.input_dim() || k0.dim() != f.output_dim() {
        return Err(Error::DimensionMismatch {
            expected: f.input_dim(),
            got: h.dim(),
        });
    }
    if !f.domain_box.contains(x0) {
        return Err(Error::DomainExit(format!(
            "x0 {:?} is outside the domain box",
            x0.0
        )));
    }
    let h_scale = h.norm2();
    if h_scale == 0.0 {
        return Err(Error::InvalidParameter("direction h must be nonzero".into()));
    }
    let unit_h = h.scale(1.0 / h_scale);

    let f0 = f.eval(x0)?;
    let mut t = t_start * h_scale;
    let mut truncated = false;
    let mut t_values = Vec::with_capacity(steps);
    let mut raw_quotients = Vec::with_capacity(steps);
    let mut corrected_quotients = Vec::with_capacity(steps);

    for _ in 0..steps {
        if t < 1e-300 {
            truncated = true;
            break;
        }
        let x = x0.axpy(t, &unit_h);
        if !f.domain_box.contains(&x) {
            // head of the grid sticks out of the box; smaller steps fit
            truncated = true;
            t *= ratio;
            continue;
        }
        let raw = f.eval(&x)?.sub(&f0).scale(1.0 / t);
        let corrected = raw.add(&k0.scale(c * alpha.eval(t) / t));
        t_values.push(t);
        raw_quotients.push(raw);
        corrected_quotients.push(corrected);
        t *= ratio;
    }

    if t_values.is_empty() {
        return Err(Error::DomainExit(
            "no admissible step: x0 + t*h leaves the domain box for every t in the grid".into(),
        ));
    }

    Ok(QuotientTrace {
        x0: x0.clone(),
        h: unit_h,
        h_scale,
        t_values,
        raw_quotients,
        corrected_quotients,
        params: TraceParams {
            c,
            k0: k0.clone(),
            alpha: alpha.clone(),
        },
        delta: alpha.prop2_delta(c),
        truncated,
    })
}

/// Check α-nondecreasingness of the corrected quotient over every trace
/// pair t_small < t_large:
/// φ(t_large) − φ(t_small) + C·(α(t_small)/t_small)·k₀ ∈ K.
///
/// The correction term is recovered from the trace itself (corrected − raw),
/// so the check is exactly consistent with how the trace was built.
pub fn check_alpha_monotone(trace: &QuotientTrace, cone: &ConeDescriptor) -> Result<CheckReport> {
    if trace.is_empty() {
        return Err(Error::InvalidInput("empty trace".into()));
    }
    let mut worst = WorstCase::new();
    for i in 0..trace.len() {
        for j in (i + 1)..trace.len() {
            let v = trace.corrected_quotients[i]
                .sub(&trace.corrected_quotients[j])
                .add(&trace.correction(j));
            let m = cone.member(&v)?;
            worst.record(
                m.slack,
                m.threshold,
                m.contained,
                Witness::Pair {
                    t_large: trace.t_values[i],
                    t_small: trace.t_values[j],
                },
            );
        }
    }
    Ok(worst.into_report(CheckParams {
        c: Some(trace.params.c),
        k0: Some(trace.params.k0.clone()),
        alpha: Some(trace.params.alpha.label().to_string()),
        tolerance: 0.0,
        ..CheckParams::default()
    }))
}

/// The lower-bound element b = F(x₀) − F(x₀ − h) − (C·α(1) + 1)·k₀.
pub fn lower_bound_element(trace: &QuotientTrace, f: &MappingSpec) -> Result<Vector> {
    let x_minus = trace.x0.sub(&trace.h);
    if !f.domain_box.contains(&x_minus) {
        return Err(Error::DomainExit(format!(
            "x0 - h = {:?} is outside the domain box",
            x_minus.0
        )));
    }
    let c_alpha1 = trace.params.c * trace.params.alpha.eval(1.0);
    Ok(f
        .eval(&trace.x0)?
        .sub(&f.eval(&x_minus)?)
        .axpy(-(c_alpha1 + 1.0), &trace.params.k0))
}

/// Check φ(t) − b ∈ K for every trace point with t < delta.
pub fn check_lower_bound(
    trace: &QuotientTrace,
    f: &MappingSpec,
    cone: &ConeDescriptor,
) -> Result<CheckReport> {
    if trace.is_empty() {
        return Err(Error::InvalidInput("empty trace".into()));
    }
    let b = lower_bound_element(trace, f)?;
    let mut worst = WorstCase::new();
    for (i, &t) in trace.t_values.iter().enumerate() {
        if t >= trace.delta {
            continue;
        }
        let v = trace.corrected_quotients[i].sub(&b);
        let m = cone.member(&v)?;
        worst.record(m.slack, m.threshold, m.contained, Witness::Point { t });
    }
    let note = if worst.samples == 0 {
        Some("no trace points below delta".to_string())
    } else {
        None
    };
    Ok(worst.into_report(CheckParams {
        c: Some(trace.params.c),
        k0: Some(trace.params.k0.clone()),
        alpha: Some(trace.params.alpha.label().to_string()),
        tolerance: 0.0,
        note,
        ..CheckParams::default()
    }))
}

/// Outcome of the convergence-lemma check on a trace Φ.
///
/// The lemma: if (i) Φ(t) ∈ K, (ii) Φ(t) − Φ(t₁) + (α(t₁)/t₁)·k₀ ∈ K for
/// t₁ < t, and (iii) Φ(t) → 0 weakly as t → 0⁺, then ‖Φ(t)‖ → 0. In Rᵐ the
/// weak premise is operationalized as scalarized tail convergence along the
/// dual generators; the checker asserts the implication rather than any
/// single premise, so `passed` holds whenever the premises fail too.
#[derive(Debug, Clone, Serialize)]
pub struct LemmaReport {
    /// Premise (i): membership of every Φ(t).
    pub membership: CheckReport,
    /// Premise (ii): pairwise α-monotone inclusion.
    pub monotone: CheckReport,
    /// Premise (iii): scalarized values y*(Φ(t_tail)) along dual generators.
    pub scalarized_tail: Vec<f64>,
    pub premises_met: bool,
    pub conclusion_tail_norm: f64,
    pub conclusion_ok: bool,
    pub passed: bool,
    pub note: String,
}

/// Check the Lemma implication on a sampled trace Φ(t), t decreasing.
///
/// `tol` bounds the scalarized tail for premise (iii); the conclusion
/// requires ‖Φ(t_tail)‖ ≤ 10·tol.
pub fn check_lemma_trace(
    phi: &[(f64, Vector)],
    cone: &ConeDescriptor,
    k0: &Vector,
    alpha: &Modulus,
    tol: f64,
) -> Result<LemmaReport> {
    if phi.is_empty() {
        return Err(Error::InvalidInput("empty trace".into()));
    }
    if phi.windows(2).any(|w| w[1].0 >= w[0].0 || w[1].0 <= 0.0) {
        return Err(Error::InvalidInput(
            "t values must be strictly decreasing and positive".into(),
        ));
    }
    let dim = phi[0].1.dim();
    if k0.dim() != dim || phi.iter().any(|(_, v)| v.dim() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: k0.dim(),
        });
    }

    let mut membership = WorstCase::new();
    for (t, v) in phi {
        let m = cone.member(v)?;
        membership.record(m.slack, m.threshold, m.contained, Witness::Point { t: *t });
    }
    let membership = membership.into_report(CheckParams {
        tolerance: 0.0,
        note: Some("premise (i): trace membership".into()),
        ..CheckParams::default()
    });

    let mut monotone = WorstCase::new();
    for i in 0..phi.len() {
        for j in (i + 1)..phi.len() {
            let (t_small, ref phi_small) = phi[j];
            let v = phi[i]
                .1
                .sub(phi_small)
                .axpy(alpha.eval(t_small) / t_small, k0);
            let m = cone.member(&v)?;
            monotone.record(
                m.slack,
                m.threshold,
                m.contained,
                Witness::Pair {
                    t_large: phi[i].0,
                    t_small,
                },
            );
        }
    }
    let monotone = monotone.into_report(CheckParams {
        k0: Some(k0.clone()),
        alpha: Some(alpha.label().to_string()),
        tolerance: 0.0,
        note: Some("premise (ii): alpha-monotone inclusion".into()),
        ..CheckParams::default()
    });

    // dual generators of a polyhedral H-form cone are its facet normals
    let tail = &phi.last().unwrap().1;
    let scalarized_tail: Vec<f64> = cone
        .facet_normals
        .iter()
        .map(|a| a.dot(tail) / a.norm2())
        .collect();
    let weak_tail_ok = scalarized_tail.iter().all(|s| s.abs() <= tol);

    let premises_met = membership.passed && monotone.passed && weak_tail_ok;
    let conclusion_tail_norm = tail.norm2();
    let conclusion_ok = conclusion_tail_norm <= 10.0 * tol;
    let passed = !premises_met || conclusion_ok;
    let note = if premises_met {
        "premises met; conclusion checked".to_string()
    } else {
        "premises unmet; implication holds vacuously".to_string()
    };
    Ok(LemmaReport {
        membership,
        monotone,
        scalarized_tail,
        premises_met,
        conclusion_tail_norm,
        conclusion_ok,
        passed,
        note,
    })
}

/// Estimator configuration; the defaults match the geometric grid used in
/// the regression corpus.
#[derive(Debug, Clone)]
pub struct EstimatorConfig {
    pub t_start: f64,
    pub ratio: f64,
    pub max_steps: usize,
    pub tol: f64,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        EstimatorConfig {
            t_start: 0.5,
            ratio: 0.5,
            max_steps: 40,
            tol: 1e-6,
        }
    }
}

/// A directional-derivative estimate with its convergence certificate.
#[derive(Debug, Clone)]
pub struct DerivativeEstimate {
    /// The raw quotient at the finest accepted step — the limit candidate.
    /// The correction term vanishes in the limit, so the raw quotient, not
    /// the corrected one, is the estimate; `correction_tail` reports the
    /// residual gap between the two.
    pub value: Vector,
    pub trace: QuotientTrace,
    /// ‖φ(tₙ) − φ(tₙ₋₁)‖₂ at the accepted step.
    pub cauchy_gap: f64,
    /// ‖C·(α(tₙ)/tₙ)·k₀‖₂ at the accepted step.
    pub correction_tail: f64,
    pub converged: bool,
    /// Hypothesis trail: the α-monotone inclusion over the trace.
    pub monotone: CheckReport,
    /// Hypothesis trail: the lower bound; absent when x₀ − h leaves the box.
    pub lower_bound: Option<CheckReport>,
}

/// Estimate the one-sided directional derivative F′(x₀; h) by following the
/// corrected quotients down a geometric t grid until both the Cauchy gap and
/// the correction tail drop below `tol`.
///
/// Never converges silently to a wrong flag: if the budget runs out the full
/// trace is returned with `converged = false`.
#[allow(clippy::too_many_arguments)]
pub fn estimate_directional_derivative(
    f: &MappingSpec,
    x0: &Vector,
    h: &Vector,
    c: f64,
    k0: &Vector,
    alpha: &Modulus,
    cone: &ConeDescriptor,
    config: &EstimatorConfig,
) -> Result<DerivativeEstimate> {
    if !config.tol.is_finite() || config.tol <= 0.0 {
        return Err(Error::InvalidParameter("tol must be positive".into()));
    }
    let mut trace = build_trace(
        f,
        x0,
        h,
        c,
        k0,
        alpha,
        config.t_start,
        config.ratio,
        config.max_steps,
    )?;
    if trace.len() < 2 {
        return Err(Error::InvalidInput(
            "trace too short to assess convergence (need at least 2 in-domain steps)".into(),
        ));
    }

    let mut accepted: Option<usize> = None;
    let mut cauchy_gap = f64::INFINITY;
    let mut correction_tail = f64::INFINITY;
    for i in 1..trace.len() {
        cauchy_gap = trace.corrected_quotients[i]
            .sub(&trace.corrected_quotients[i - 1])
            .norm2();
        correction_tail = trace.correction(i).norm2();
        if cauchy_gap < config.tol && correction_tail < config.tol {
            accepted = Some(i);
            break;
        }
    }
    let converged = accepted.is_some();
    if let Some(i) = accepted {
        trace.truncate(i + 1);
    }

    let value = trace.raw_quotients.last().unwrap().clone();
    let monotone = check_alpha_monotone(&trace, cone)?;
    let lower_bound = match check_lower_bound(&trace, f, cone) {
        Ok(rep) => Some(rep),
        Err(Error::DomainExit(_)) => None,
        Err(e) => return Err(e),
    };

    Ok(DerivativeEstimate {
        value,
        trace,
        cauchy_gap,
        correction_tail,
        converged,
        monotone,
        lower_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::corpus_get;

    fn vec1(x: f64) -> Vector {
        Vector(vec![x])
    }

    fn pow2() -> Modulus {
        Modulus::power(2.0).unwrap()
    }

    fn r_plus() -> ConeDescriptor {
        ConeDescriptor::orthant(1)
    }

    fn neg_square_trace(x0: f64, c: f64, steps: usize) -> QuotientTrace {
        let f = corpus_get("neg_square").unwrap();
        build_trace(&f, &vec1(x0), &vec1(1.0), c, &vec1(1.0), &pow2(), 0.5, 0.5, steps).unwrap()
    }

    #[test]
    fn neg_square_raw_is_minus_t_and_corrected_vanishes() {
        let trace = neg_square_trace(0.0, 1.0, 20);
        for (i, &t) in trace.t_values.iter().enumerate() {
            assert_eq!(trace.raw_quotients[i][0], -t, "raw quotient is exactly -t");
            assert_eq!(trace.corrected_quotients[i][0], 0.0);
        }
        // strictly decreasing raw quotient: the uncorrected sequence drops
        for w in trace.raw_quotients.windows(2) {
            assert!(w[1][0] > w[0][0], "raw increases as t decreases");
        }
    }

    #[test]
    fn linear_trace_shapes() {
        let f = corpus_get("linear").unwrap();
        let h = Vector(vec![1.0, 0.0]);
        let k0 = Vector(vec![1.0, 1.0]);
        let trace = build_trace(
            &f,
            &Vector(vec![0.0, 0.0]),
            &h,
            2.0,
            &k0,
            &pow2(),
            0.5,
            0.5,
            10,
        )
        .unwrap();
        let fh = f.eval(&h).unwrap();
        for (i, &t) in trace.t_values.iter().enumerate() {
            assert_eq!(trace.raw_quotients[i], fh, "raw quotient constant at F(h)");
            let expected = fh.axpy(2.0 * t, &k0);
            assert_eq!(trace.corrected_quotients[i], expected);
        }
    }

    #[test]
    fn correction_consistency_machine_precision() {
        let trace = neg_square_trace(0.5, 1.0, 30);
        for (i, &t) in trace.t_values.iter().enumerate() {
            let expected = trace
                .params
                .k0
                .scale(trace.params.c * trace.params.alpha.eval(t) / t);
            assert_eq!(trace.correction(i), expected);
            assert_eq!(
                trace.corrected_quotients[i],
                trace.raw_quotients[i].add(&trace.correction(i))
            );
        }
    }

    #[test]
    fn non_unit_direction_is_normalized() {
        let f = corpus_get("neg_square").unwrap();
        let trace = build_trace(
            &f, &vec1(0.0), &vec1(2.0), 1.0, &vec1(1.0), &pow2(), 0.25, 0.5, 10,
        )
        .unwrap();
        assert_eq!(trace.h_scale, 2.0);
        assert_eq!(trace.h, vec1(1.0));
        // t grid rescaled: first step 0.25 * 2 = 0.5 along the unit direction
        assert_eq!(trace.t_values[0], 0.5);
    }

    #[test]
    fn trace_truncates_at_domain_boundary() {
        let f = corpus_get("neg_square").unwrap();
        // x0 = 1.75: the first step 1.75 + 0.5 = 2.25 leaves [-2, 2]
        let trace = build_trace(
            &f, &vec1(1.75), &vec1(1.0), 1.0, &vec1(1.0), &pow2(), 0.5, 0.5, 10,
        )
        .unwrap();
        assert!(trace.truncated);
        assert_eq!(trace.t_values[0], 0.25);
        // and a hopeless direction errors out
        let err = build_trace(
            &f, &vec1(2.0), &vec1(1.0), 1.0, &vec1(1.0), &pow2(), 0.5, 0.5, 4,
        );
        assert!(matches!(err, Err(Error::DomainExit(_))));
    }

    #[test]
    fn trace_truncates_on_t_underflow() {
        let f = corpus_get("neg_square").unwrap();
        let trace = build_trace(
            &f, &vec1(0.0), &vec1(1.0), 0.0, &vec1(1.0), &pow2(), 0.5, 0.5, 1200,
        )
        .unwrap();
        assert!(trace.truncated);
        assert!(trace.len() < 1200);
        assert!(*trace.t_values.last().unwrap() >= 1e-300);
    }

    #[test]
    fn alpha_monotone_neg_square_passes() {
        let trace = neg_square_trace(0.0, 1.0, 40);
        let rep = check_alpha_monotone(&trace, &r_plus()).unwrap();
        assert!(rep.passed, "worst slack {}", rep.worst_slack);
        assert_eq!(rep.samples_used, 40 * 39 / 2);
    }

    #[test]
    fn alpha_monotone_classical_case_for_convex_map() {
        // C = 0 on a cone-convex mapping: classical quotient monotonicity
        let f = corpus_get("linear").unwrap();
        let trace = build_trace(
            &f,
            &Vector(vec![0.5, -0.5]),
            &Vector(vec![0.0, 1.0]),
            0.0,
            &Vector(vec![1.0, 1.0]),
            &pow2(),
            0.5,
            0.5,
            20,
        )
        .unwrap();
        let rep = check_alpha_monotone(&trace, &ConeDescriptor::orthant(2)).unwrap();
        assert!(rep.passed);
    }

    #[test]
    fn alpha_monotone_uncorrected_neg_square_fails() {
        // raw quotients of -x^2 strictly decrease, so the C = 0 inclusion
        // fails with slack t_small - t_large on every pair
        let trace = neg_square_trace(0.0, 0.0, 10);
        let rep = check_alpha_monotone(&trace, &r_plus()).unwrap();
        assert!(!rep.passed);
        let t1 = trace.t_values[0];
        let tn = *trace.t_values.last().unwrap();
        assert!((rep.worst_slack - (tn - t1)).abs() <= 1e-12);
        assert!(matches!(rep.witness, Some(Witness::Pair { .. })));
    }

    #[test]
    fn lower_bound_neg_square_from_proof_formula() {
        let f = corpus_get("neg_square").unwrap();
        let trace = neg_square_trace(0.0, 1.0, 20);
        // b = F(0) - F(-1) - (C alpha(1) + 1) k0 = 0 - (-1) - 2 = -1
        let b = lower_bound_element(&trace, &f).unwrap();
        assert_eq!(b, vec1(-1.0));
        let rep = check_lower_bound(&trace, &f, &r_plus()).unwrap();
        assert!(rep.passed);
        // phi = 0, so phi - b = 1 at every checked point
        assert!((rep.worst_slack - 1.0).abs() < 1e-12);
        assert_eq!(trace.delta, 0.25);
        // only points strictly below delta are checked
        assert_eq!(
            rep.samples_used,
            trace.t_values.iter().filter(|t| **t < 0.25).count()
        );
    }

    #[test]
    fn lower_bound_linear_passes() {
        let f = corpus_get("linear").unwrap();
        let trace = build_trace(
            &f,
            &Vector(vec![0.0, 0.0]),
            &Vector(vec![1.0, 0.0]),
            0.0,
            &Vector(vec![1.0, 1.0]),
            &pow2(),
            0.5,
            0.5,
            20,
        )
        .unwrap();
        let rep = check_lower_bound(&trace, &f, &ConeDescriptor::orthant(2)).unwrap();
        assert!(rep.passed);
        // phi(t) - b = F(h) - (F(h) - k0) = k0 >= 0 with slack exactly 1
        assert!((rep.worst_slack - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lower_bound_requires_backward_point() {
        let f = corpus_get("neg_square").unwrap();
        let trace = build_trace(
            &f, &vec1(-1.5), &vec1(1.0), 1.0, &vec1(1.0), &pow2(), 0.5, 0.5, 10,
        )
        .unwrap();
        // x0 - h = -2.5 is outside [-2, 2]
        assert!(matches!(
            check_lower_bound(&trace, &f, &r_plus()),
            Err(Error::DomainExit(_))
        ));
    }

    #[test]
    fn lemma_linear_decay_passes() {
        let k = ConeDescriptor::orthant(2);
        let k0 = Vector(vec![1.0, 1.0]);
        let phi: Vec<(f64, Vector)> = (1..=30)
            .map(|i| {
                let t = 0.5f64.powi(i);
                (t, k0.scale(t))
            })
            .collect();
        let rep = check_lemma_trace(&phi, &k, &k0, &pow2(), 1e-6).unwrap();
        assert!(rep.premises_met, "{rep:?}");
        assert!(rep.conclusion_ok);
        assert!(rep.passed);
    }

    #[test]
    fn lemma_constant_trace_is_vacuous() {
        let k = ConeDescriptor::orthant(2);
        let v = Vector(vec![1.0, 0.5]);
        let phi: Vec<(f64, Vector)> = (1..=20).map(|i| (0.5f64.powi(i), v.clone())).collect();
        let rep = check_lemma_trace(&phi, &k, &Vector(vec![1.0, 1.0]), &pow2(), 1e-6).unwrap();
        assert!(rep.membership.passed);
        assert!(rep.monotone.passed);
        assert!(!rep.premises_met, "weak-convergence premise must fail");
        assert!(rep.passed, "implication is vacuous");
        assert!(rep.note.contains("premises unmet"));
    }

    #[test]
    fn lemma_rejects_empty_and_unsorted() {
        let k = ConeDescriptor::orthant(1);
        assert!(check_lemma_trace(&[], &k, &vec1(1.0), &pow2(), 1e-6).is_err());
        let bad = vec![(0.25, vec1(0.0)), (0.5, vec1(0.0))];
        assert!(check_lemma_trace(&bad, &k, &vec1(1.0), &pow2(), 1e-6).is_err());
    }

    #[test]
    fn estimator_neg_square_at_origin() {
        let f = corpus_get("neg_square").unwrap();
        let est = estimate_directional_derivative(
            &f,
            &vec1(0.0),
            &vec1(1.0),
            1.0,
            &vec1(1.0),
            &pow2(),
            &r_plus(),
            &EstimatorConfig::default(),
        )
        .unwrap();
        assert!(est.converged);
        assert!(est.value[0].abs() <= 1e-5, "value {}", est.value[0]);
        assert!(est.monotone.passed);
        assert!(est.lower_bound.as_ref().unwrap().passed);
    }

    #[test]
    fn estimator_neg_square_off_origin() {
        let f = corpus_get("neg_square").unwrap();
        let est = estimate_directional_derivative(
            &f,
            &vec1(0.5),
            &vec1(1.0),
            1.0,
            &vec1(1.0),
            &pow2(),
            &r_plus(),
            &EstimatorConfig::default(),
        )
        .unwrap();
        assert!(est.converged);
        assert!((est.value[0] + 1.0).abs() <= 1e-5, "value {}", est.value[0]);
    }

    #[test]
    fn estimator_linear_one_step() {
        let f = corpus_get("linear").unwrap();
        let h = Vector(vec![1.0, 0.0]);
        let est = estimate_directional_derivative(
            &f,
            &Vector(vec![0.0, 0.0]),
            &h,
            0.0,
            &Vector(vec![1.0, 1.0]),
            &pow2(),
            &ConeDescriptor::orthant(2),
            &EstimatorConfig::default(),
        )
        .unwrap();
        assert!(est.converged);
        assert_eq!(est.value, f.eval(&h).unwrap());
        assert_eq!(est.trace.len(), 2, "constant quotient converges immediately");
    }

    #[test]
    fn estimator_c_zero_matches_positive_c_on_convex_map() {
        // Valadier case: raw quotients do not depend on C, so the estimate
        // from the C = 0 path equals the C > 0 path bit for bit
        let f = corpus_get("linear").unwrap();
        let k = ConeDescriptor::orthant(2);
        let k0 = Vector(vec![1.0, 1.0]);
        let x0 = Vector(vec![0.5, -0.5]);
        let h = Vector(vec![0.0, 1.0]);
        let cfg = EstimatorConfig::default();
        let a = estimate_directional_derivative(&f, &x0, &h, 0.0, &k0, &pow2(), &k, &cfg).unwrap();
        let b = estimate_directional_derivative(&f, &x0, &h, 1.0, &k0, &pow2(), &k, &cfg).unwrap();
        assert!(a.converged && b.converged);
        assert_eq!(a.value, b.value);
    }

    #[test]
    fn estimator_flags_non_convergence() {
        let f = corpus_get("neg_square").unwrap();
        let cfg = EstimatorConfig {
            max_steps: 3,
            ..EstimatorConfig::default()
        };
        let est = estimate_directional_derivative(
            &f, &vec1(0.0), &vec1(1.0), 1.0, &vec1(1.0), &pow2(), &r_plus(), &cfg,
        )
        .unwrap();
        assert!(!est.converged, "correction tail 0.0625 cannot clear 1e-6");
        assert_eq!(est.trace.len(), 3);
    }

    #[test]
    fn estimator_matches_analytic_on_certified_entries() {
        for name in ["neg_square", "linear", "hilbert_shift"] {
            let f = corpus_get(name).unwrap();
            let meta = f.metadata.clone().unwrap();
            let k = meta.cone.clone().unwrap();
            let k0 = meta.known_k0.clone().unwrap();
            let c = meta.known_c.unwrap();
            for (x0, h) in &meta.trace_anchors {
                let est = estimate_directional_derivative(
                    &f,
                    x0,
                    h,
                    c,
                    &k0,
                    &pow2(),
                    &k,
                    &EstimatorConfig::default(),
                )
                .unwrap();
                assert!(est.converged, "{name} at {x0:?}");
                let analytic = f.analytic_dderiv(x0, h).unwrap();
                let err = est.value.sub(&analytic).norm2();
                assert!(err <= 1e-5, "{name} at {x0:?}: error {err}");
            }
        }
    }

    #[test]
    fn estimator_stable_under_grid_changes() {
        let f = corpus_get("hilbert_shift").unwrap();
        let k = ConeDescriptor::orthant(2);
        let k0 = Vector(vec![1.0, 1.0]);
        let x0 = Vector(vec![0.5, -0.5]);
        let h = Vector(vec![1.0, 0.0]);
        let base = EstimatorConfig::default();
        let halved = EstimatorConfig {
            t_start: 0.25,
            ..EstimatorConfig::default()
        };
        let wider = EstimatorConfig {
            ratio: 0.7,
            max_steps: 80,
            ..EstimatorConfig::default()
        };
        let reference =
            estimate_directional_derivative(&f, &x0, &h, 1.0, &k0, &pow2(), &k, &base).unwrap();
        for cfg in [halved, wider] {
            let other =
                estimate_directional_derivative(&f, &x0, &h, 1.0, &k0, &pow2(), &k, &cfg).unwrap();
            assert!(other.converged);
            let gap = reference.value.sub(&other.value).norm2();
            assert!(gap <= 2.0 * base.tol, "gap {gap}");
        }
    }

    #[test]
    fn scalarized_corrected_quotients_are_cauchy() {
        // along each dual generator the scalarized corrected quotient has
        // shrinking increments on certified entries
        for name in ["neg_square", "linear", "hilbert_shift"] {
            let f = corpus_get(name).unwrap();
            let meta = f.metadata.clone().unwrap();
            let k = meta.cone.clone().unwrap();
            let k0 = meta.known_k0.clone().unwrap();
            let c = meta.known_c.unwrap();
            let (x0, h) = meta.trace_anchors[0].clone();
            let trace =
                build_trace(&f, &x0, &h, c, &k0, &pow2(), 0.5, 0.5, 30).unwrap();
            for a in &k.facet_normals {
                let series: Vec<f64> = trace
                    .corrected_quotients
                    .iter()
                    .map(|phi| a.dot(phi))
                    .collect();
                let gaps: Vec<f64> = series.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
                for w in gaps.windows(2) {
                    assert!(w[1] <= w[0] + 1e-12, "gaps must shrink: {gaps:?}");
                }
                assert!(*gaps.last().unwrap() < 1e-6);
            }
        }
    }
}

//! Checkers for the cone-convexity and strong paraconvexity inequalities.
//!
//! A mapping F is strongly paraconvex with defect direction k₀ ∈ K∖{0},
//! modulus α and constant C ≥ 0 when, for all x₁, x₂ in the domain and
//! λ ∈ [0, 1],
//!
//! ```text
//! F(λx₁ + (1−λ)x₂) ≤_K λF(x₁) + (1−λ)F(x₂) + C·w(λ)·α(‖x₁−x₂‖)·k₀
//! ```
//!
//! with defect weight w(λ) = min{λ, 1−λ} or 2λ(1−λ); the two weights bracket
//! each other (λ(1−λ) ≤ min{λ,1−λ} ≤ 2λ(1−λ)), so a min-form pass at C implies
//! a product-form pass at C, and a product-form pass at C implies a min-form
//! pass at 2C. C = 0 degenerates to plain cone-convexity.
//!
//! Sampling certifies the inequality up to grid resolution only; these are
//! falsification tools, not proofs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cone::{ConeDescriptor, DualVector};
use crate::corpus::MappingSpec;
use crate::error::{Error, Result};
use crate::modulus::Modulus;
use crate::report::{CheckParams, CheckReport, Witness, WorstCase};
use crate::sampling::SamplingPlan;
use crate::vector::{NormChoice, Vector};

/// A sample of the defining inequality: two points and a mixing weight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleTriple {
    pub x1: Vector,
    pub x2: Vector,
    pub lambda: f64,
}

impl SampleTriple {
    pub fn midpoint(&self) -> Vector {
        self.x1.scale(self.lambda).axpy(1.0 - self.lambda, &self.x2)
    }
}

/// Defect weight convention.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DefectForm {
    /// w(λ) = min{λ, 1−λ}
    Min,
    /// w(λ) = 2λ(1−λ)
    Product,
}

impl DefectForm {
    pub fn weight(self, lambda: f64) -> f64 {
        match self {
            DefectForm::Min => lambda.min(1.0 - lambda),
            DefectForm::Product => 2.0 * lambda * (1.0 - lambda),
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "min" => Ok(DefectForm::Min),
            "product" => Ok(DefectForm::Product),
            _ => Err(Error::InvalidParameter(format!(
                "unknown defect form '{s}' (expected min or product)"
            ))),
        }
    }
}

impl std::fmt::Display for DefectForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DefectForm::Min => write!(f, "min"),
            DefectForm::Product => write!(f, "product"),
        }
    }
}

fn check_dims(f: &MappingSpec, cone: &ConeDescriptor) -> Result<()> {
    if f.output_dim() != cone.dim {
        return Err(Error::DimensionMismatch {
            expected: f.output_dim(),
            got: cone.dim,
        });
    }
    Ok(())
}

fn check_k0(cone: &ConeDescriptor, k0: &Vector) -> Result<()> {
    if k0.norm2() < 1e-15 {
        return Err(Error::InvalidParameter("k0 must be nonzero".into()));
    }
    let m = cone.member(k0)?;
    if !m.contained {
        return Err(Error::InvalidParameter(format!(
            "k0 {:?} is not a cone member (slack {})",
            k0.0, m.slack
        )));
    }
    Ok(())
}

/// λF(x₁) + (1−λ)F(x₂) − F(λx₁ + (1−λ)x₂), the cone-convexity combination.
fn convexity_combination(f: &MappingSpec, triple: &SampleTriple) -> Result<Vector> {
    let fx1 = f.eval(&triple.x1)?;
    let fx2 = f.eval(&triple.x2)?;
    let fmid = f.eval(&triple.midpoint())?;
    Ok(fx1
        .scale(triple.lambda)
        .axpy(1.0 - triple.lambda, &fx2)
        .sub(&fmid))
}

/// Check plain cone-convexity on the sampling plan.
pub fn check_cone_convex(
    f: &MappingSpec,
    cone: &ConeDescriptor,
    plan: &SamplingPlan,
) -> Result<CheckReport> {
    check_dims(f, cone)?;
    let mut worst = WorstCase::new();
    plan.for_each_triple(&f.domain_box, |triple| {
        let v = convexity_combination(f, triple)?;
        let m = cone.member(&v)?;
        worst.record(m.slack, m.threshold, m.contained, Witness::Triple(triple.clone()));
        Ok(())
    })?;
    Ok(worst.into_report(CheckParams {
        c: Some(0.0),
        tolerance: 0.0,
        ..CheckParams::default()
    }))
}

/// Check the strong paraconvexity inequality at constant `c` on the plan.
#[allow(clippy::too_many_arguments)]
pub fn check_paraconvex(
    f: &MappingSpec,
    cone: &ConeDescriptor,
    alpha: &Modulus,
    c: f64,
    k0: &Vector,
    form: DefectForm,
    norm: NormChoice,
    plan: &SamplingPlan,
) -> Result<CheckReport> {
    if !c.is_finite() || c < 0.0 {
        return Err(Error::InvalidParameter(format!("C must be >= 0, got {c}")));
    }
    check_dims(f, cone)?;
    check_k0(cone, k0)?;
    let mut worst = WorstCase::new();
    plan.for_each_triple(&f.domain_box, |triple| {
        let defect =
            c * form.weight(triple.lambda) * alpha.eval(norm.norm(&triple.x1.sub(&triple.x2)));
        let v = convexity_combination(f, triple)?.axpy(defect, k0);
        let m = cone.member(&v)?;
        worst.record(m.slack, m.threshold, m.contained, Witness::Triple(triple.clone()));
        Ok(())
    })?;
    Ok(worst.into_report(CheckParams {
        c: Some(c),
        k0: Some(k0.clone()),
        alpha: Some(alpha.label().to_string()),
        form: Some(form),
        tolerance: 0.0,
        ..CheckParams::default()
    }))
}

/// Smallest Ĉ ≥ 0 making the paraconvexity inequality pass on the plan.
///
/// Over samples with w(λ)·α(‖x₁−x₂‖) > 0 and facet normals with aᵢ·k₀ > 0,
/// Ĉ is the largest ratio aᵢ·(F(mid) − λF(x₁) − (1−λ)F(x₂)) / (w·α·aᵢ·k₀).
/// A facet normal orthogonal to (or negative on) k₀ with a positive defect
/// component cannot be repaired by any constant and is reported as an error.
/// The estimate is a lower bound on the true minimal constant and is
/// nondecreasing under grid refinement.
#[allow(clippy::too_many_arguments)]
pub fn estimate_min_c(
    f: &MappingSpec,
    cone: &ConeDescriptor,
    alpha: &Modulus,
    k0: &Vector,
    form: DefectForm,
    norm: NormChoice,
    plan: &SamplingPlan,
) -> Result<f64> {
    check_dims(f, cone)?;
    check_k0(cone, k0)?;
    let k0_scale = k0.norm2();
    let mut best: f64 = 0.0;
    plan.for_each_triple(&f.domain_box, |triple| {
        let weight = form.weight(triple.lambda) * alpha.eval(norm.norm(&triple.x1.sub(&triple.x2)));
        if weight <= 0.0 {
            // coincident points or endpoint lambda: any constant works here
            return Ok(());
        }
        let gap = convexity_combination(f, triple)?.scale(-1.0);
        let noise = cone.membership_tol * (1.0 + gap.norm2());
        for a in &cone.facet_normals {
            let along = a.dot(k0);
            let component = a.dot(&gap);
            if along > 1e-12 * a.norm2() * k0_scale {
                // sub-tolerance components are rounding noise, not defect
                if component > noise {
                    best = best.max(component / (weight * along));
                }
            } else if component > noise {
                return Err(Error::NoFiniteConstant(format!(
                    "facet normal {:?} is non-positive on k0 but sees defect {component} \
                     at (x1 = {:?}, x2 = {:?}, lambda = {})",
                    a.0, triple.x1.0, triple.x2.0, triple.lambda
                )));
            }
        }
        Ok(())
    })?;
    Ok(best)
}

/// Check the scalarized inequality for a dual-feasible functional y*:
/// y*(F(mid)) ≤ λ·y*(F(x₁)) + (1−λ)·y*(F(x₂)) + C·y*(k₀)·w(λ)·α(‖x₁−x₂‖).
#[allow(clippy::too_many_arguments)]
pub fn check_scalarization(
    f: &MappingSpec,
    cone: &ConeDescriptor,
    alpha: &Modulus,
    c: f64,
    k0: &Vector,
    ystar: &DualVector,
    norm: NormChoice,
    plan: &SamplingPlan,
) -> Result<CheckReport> {
    if !c.is_finite() || c < 0.0 {
        return Err(Error::InvalidParameter(format!("C must be >= 0, got {c}")));
    }
    check_dims(f, cone)?;
    check_k0(cone, k0)?;
    if !ystar.is_dual_feasible(cone) {
        return Err(Error::InvalidParameter(format!(
            "y* {:?} is not dual-feasible",
            ystar.coeffs.0
        )));
    }
    let scalar_constant = c * ystar.apply(k0);
    let mut worst = WorstCase::new();
    plan.for_each_triple(&f.domain_box, |triple| {
        let combo = ystar.apply(&convexity_combination(f, triple)?);
        let defect = scalar_constant
            * DefectForm::Min.weight(triple.lambda)
            * alpha.eval(norm.norm(&triple.x1.sub(&triple.x2)));
        let slack = combo + defect;
        let threshold = cone.membership_tol * (1.0 + combo.abs() + defect.abs());
        worst.record(
            slack,
            threshold,
            slack >= -threshold,
            Witness::Triple(triple.clone()),
        );
        Ok(())
    })?;
    Ok(worst.into_report(CheckParams {
        c: Some(c),
        k0: Some(k0.clone()),
        alpha: Some(alpha.label().to_string()),
        form: Some(DefectForm::Min),
        tolerance: 0.0,
        note: Some(format!("scalarized with constant C*y*(k0) = {scalar_constant}")),
    }))
}

/// Joint report of the squared-norm-shift characterization.
#[derive(Debug, Clone, Serialize)]
pub struct SquareShiftReport {
    /// Strong ‖·‖²-k₀ paraconvexity of F with defect C·λ(1−λ)‖x₁−x₂‖²·k₀.
    pub paraconvex: CheckReport,
    /// Cone-convexity of G(x) = F(x) + C‖x‖²k₀.
    pub shifted_convex: CheckReport,
    pub verdicts_agree: bool,
    /// Worst |λ‖x₁‖² + (1−λ)‖x₂‖² − ‖mid‖² − λ(1−λ)‖x₁−x₂‖²| over random pairs.
    pub identity_max_abs_err: f64,
    pub passed: bool,
}

/// Maximum identity violation over `pairs` random (x₁, x₂, λ) samples.
pub fn hilbert_identity_max_err(dim: usize, half_width: f64, pairs: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..pairs {
        let x1 = Vector(
            (0..dim)
                .map(|_| rng.gen_range(-half_width..half_width))
                .collect(),
        );
        let x2 = Vector(
            (0..dim)
                .map(|_| rng.gen_range(-half_width..half_width))
                .collect(),
        );
        let lambda: f64 = rng.gen_range(0.0..=1.0);
        let mid = x1.scale(lambda).axpy(1.0 - lambda, &x2);
        let lhs = lambda * x1.dot(&x1) + (1.0 - lambda) * x2.dot(&x2) - mid.dot(&mid);
        let rhs = lambda * (1.0 - lambda) * {
            let d = x1.sub(&x2);
            d.dot(&d)
        };
        worst = worst.max((lhs - rhs).abs());
    }
    worst
}

/// Verify that strong squared-norm paraconvexity of F at constant `c`
/// (defect C·λ(1−λ)‖x₁−x₂‖²·k₀) and cone-convexity of F + C‖·‖²k₀ produce
/// the same verdict, and check the underlying Hilbert-norm identity.
/// Euclidean norm only.
pub fn verify_square_shift(
    f: &MappingSpec,
    cone: &ConeDescriptor,
    c: f64,
    k0: &Vector,
    norm: NormChoice,
    plan: &SamplingPlan,
) -> Result<SquareShiftReport> {
    if norm != NormChoice::Euclidean {
        return Err(Error::UnsupportedRepresentation(
            "the squared-norm shift characterization needs the euclidean norm".into(),
        ));
    }
    if !c.is_finite() || c < 0.0 {
        return Err(Error::InvalidParameter(format!("C must be >= 0, got {c}")));
    }
    check_k0(cone, k0)?;
    let alpha = Modulus::power(2.0)?;
    // C·λ(1−λ) equals the product form 2λ(1−λ) at constant C/2
    let paraconvex = check_paraconvex(
        f,
        cone,
        &alpha,
        0.5 * c,
        k0,
        DefectForm::Product,
        norm,
        plan,
    )?;

    let inner = f.clone();
    let k0_shift = k0.clone();
    let out_dim = f.output_dim();
    let shifted = MappingSpec::new(
        format!("{}+shift", f.name()),
        f.input_dim(),
        out_dim,
        f.domain_box.clone(),
        move |x: &Vector| {
            inner
                .eval(x)
                .map(|y| y.axpy(c * x.dot(x), &k0_shift))
                .unwrap_or_else(|_| Vector(vec![f64::NAN; out_dim]))
        },
    );
    let shifted_convex = check_cone_convex(&shifted, cone, plan)?;

    let identity_max_abs_err = hilbert_identity_max_err(
        f.input_dim(),
        f.domain_box
            .hi
            .iter()
            .fold(1.0f64, |m, &h| m.max(h.abs())),
        1000,
        plan.seed ^ 0x5157,
    );
    let verdicts_agree = paraconvex.passed == shifted_convex.passed;
    let passed = verdicts_agree && identity_max_abs_err <= 1e-12;
    Ok(SquareShiftReport {
        paraconvex,
        shifted_convex,
        verdicts_agree,
        identity_max_abs_err,
        passed,
    })
}

/// Randomized multi-start hill climb on the negative membership margin over
/// (x₁, x₂, λ). Returns the deepest violation found within the evaluation
/// budget, or `None` when every probe stayed feasible. Deterministic for a
/// fixed seed.
#[allow(clippy::too_many_arguments)]
pub fn search_violation(
    f: &MappingSpec,
    cone: &ConeDescriptor,
    alpha: &Modulus,
    c: f64,
    k0: &Vector,
    form: DefectForm,
    norm: NormChoice,
    budget: usize,
    seed: u64,
) -> Result<Option<SampleTriple>> {
    if budget == 0 {
        return Err(Error::InvalidParameter("budget must be positive".into()));
    }
    check_dims(f, cone)?;
    check_k0(cone, k0)?;
    let domain = &f.domain_box;
    let n = domain.dim();
    let half_widths: Vec<f64> = (0..n).map(|i| 0.5 * (domain.hi[i] - domain.lo[i])).collect();

    let margin = |triple: &SampleTriple| -> Result<f64> {
        let defect =
            c * form.weight(triple.lambda) * alpha.eval(norm.norm(&triple.x1.sub(&triple.x2)));
        let v = convexity_combination(f, triple)?.axpy(defect, k0);
        let m = cone.member(&v)?;
        Ok(m.slack + m.threshold)
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut evals = 0usize;
    let mut best: Option<(f64, SampleTriple)> = None;

    while evals < budget {
        // fresh start: uniform pair or a small-separation pair, like the plan
        let x1 = Vector(
            (0..n)
                .map(|i| rng.gen_range(domain.lo[i]..=domain.hi[i]))
                .collect(),
        );
        let x2 = if rng.gen::<f64>() < 0.5 {
            Vector(
                (0..n)
                    .map(|i| rng.gen_range(domain.lo[i]..=domain.hi[i]))
                    .collect(),
            )
        } else {
            let scale = 10f64.powf(rng.gen_range(-3.0..0.5));
            Vector(
                (0..n)
                    .map(|i| {
                        (x1[i] + scale * rng.gen_range(-1.0..1.0))
                            .clamp(domain.lo[i], domain.hi[i])
                    })
                    .collect(),
            )
        };
        let mut current = SampleTriple {
            x1,
            x2,
            lambda: rng.gen_range(0.0..=1.0),
        };
        let mut current_margin = margin(&current)?;
        evals += 1;
        let mut sigma = 0.25;

        for _ in 0..80 {
            if evals >= budget {
                break;
            }
            let candidate = SampleTriple {
                x1: Vector(
                    (0..n)
                        .map(|i| {
                            (current.x1[i] + sigma * half_widths[i] * rng.gen_range(-1.0..1.0))
                                .clamp(domain.lo[i], domain.hi[i])
                        })
                        .collect(),
                ),
                x2: Vector(
                    (0..n)
                        .map(|i| {
                            (current.x2[i] + sigma * half_widths[i] * rng.gen_range(-1.0..1.0))
                                .clamp(domain.lo[i], domain.hi[i])
                        })
                        .collect(),
                ),
                lambda: (current.lambda + 0.5 * sigma * rng.gen_range(-1.0..1.0))
                    .clamp(0.0, 1.0),
            };
            let m = margin(&candidate)?;
            evals += 1;
            if m < current_margin {
                current = candidate;
                current_margin = m;
            } else {
                sigma *= 0.85;
            }
        }
        if current_margin < 0.0
            && best
                .as_ref()
                .map(|(b, _)| current_margin < *b)
                .unwrap_or(true)
        {
            best = Some((current_margin, current));
        }
    }
    Ok(best.map(|(_, triple)| triple))
}

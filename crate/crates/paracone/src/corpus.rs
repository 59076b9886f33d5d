//! Built-in mappings F: Rⁿ → Rᵐ with analytic ground truth, plus a loader
//! for user-supplied componentwise polynomial mappings.
//!
//! Each built-in entry carries the data needed to close the verification
//! loop: the ordering cone it is certified against, the known defect
//! constant and direction when one exists, the analytic directional
//! derivative used to test the estimator against an independent source, and
//! a set of trace anchors for corpus-wide runs. Metadata of certified
//! entries is validated by the paraconvexity checker the first time the
//! corpus is accessed.

use std::sync::{Arc, OnceLock};

use serde::Deserialize;

use crate::cone::ConeDescriptor;
use crate::error::{Error, Result};
use crate::modulus::Modulus;
use crate::paraconvexity::{check_paraconvex, DefectForm};
use crate::sampling::SamplingPlan;
use crate::vector::{NormChoice, Vector};

/// Axis-aligned box standing in for the convex domain A.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainBox {
    pub lo: Vector,
    pub hi: Vector,
}

impl DomainBox {
    pub fn new(lo: Vector, hi: Vector) -> Result<Self> {
        if lo.dim() != hi.dim() {
            return Err(Error::DimensionMismatch {
                expected: lo.dim(),
                got: hi.dim(),
            });
        }
        lo.check_finite()?;
        hi.check_finite()?;
        if lo.iter().zip(hi.iter()).any(|(l, h)| l > h) {
            return Err(Error::InvalidInput("empty domain box".into()));
        }
        Ok(DomainBox { lo, hi })
    }

    /// [−half, half]ⁿ.
    pub fn symmetric(half: f64, n: usize) -> Result<Self> {
        DomainBox::new(
            Vector(vec![-half; n]),
            Vector(vec![half; n]),
        )
    }

    pub fn dim(&self) -> usize {
        self.lo.dim()
    }

    pub fn contains(&self, x: &Vector) -> bool {
        x.dim() == self.dim()
            && x.iter()
                .zip(self.lo.iter().zip(self.hi.iter()))
                .all(|(xi, (l, h))| *xi >= l - 1e-12 && *xi <= h + 1e-12)
    }
}

pub type EvalFn = Arc<dyn Fn(&Vector) -> Vector + Send + Sync>;
pub type DderivFn = Arc<dyn Fn(&Vector, &Vector) -> Vector + Send + Sync>;

/// Analytic ground truth attached to a corpus entry.
#[derive(Clone)]
pub struct MappingMetadata {
    /// Min-form defect constant the entry is certified at (0 = cone-convex).
    pub known_c: Option<f64>,
    pub known_k0: Option<Vector>,
    pub known_modulus: Option<String>,
    /// Ordering cone the certification refers to.
    pub cone: Option<ConeDescriptor>,
    /// Independent one-sided directional derivative (x₀, h) ↦ F′(x₀; h).
    pub analytic_dderiv: Option<DderivFn>,
    /// (x₀, h) pairs used for corpus-wide trace runs; h has unit norm and
    /// x₀ ± h stays inside the domain box.
    pub trace_anchors: Vec<(Vector, Vector)>,
    /// Entry is expected to fail the paraconvexity check (no valid C exists).
    pub negative_control: bool,
}

/// A mapping F: Rⁿ → Rᵐ as a black-box evaluator over a box domain.
#[derive(Clone)]
pub struct MappingSpec {
    name: String,
    n: usize,
    m: usize,
    evaluate: EvalFn,
    pub domain_box: DomainBox,
    pub metadata: Option<MappingMetadata>,
}

impl std::fmt::Debug for MappingSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MappingSpec")
            .field("name", &self.name)
            .field("n", &self.n)
            .field("m", &self.m)
            .finish()
    }
}

impl MappingSpec {
    pub fn new<F>(
        name: impl Into<String>,
        n: usize,
        m: usize,
        domain_box: DomainBox,
        evaluate: F,
    ) -> Self
    where
        F: Fn(&Vector) -> Vector + Send + Sync + 'static,
    {
        MappingSpec {
            name: name.into(),
            n,
            m,
            evaluate: Arc::new(evaluate),
            domain_box,
            metadata: None,
        }
    }

    pub fn with_metadata(mut self, metadata: MappingMetadata) -> Self {
        self.metadata = Some(metadata);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn input_dim(&self) -> usize {
        self.n
    }

    pub fn output_dim(&self) -> usize {
        self.m
    }

    /// Evaluate F, rejecting dimension mismatches and non-finite output.
    pub fn eval(&self, x: &Vector) -> Result<Vector> {
        if x.dim() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: x.dim(),
            });
        }
        let y = (self.evaluate)(x);
        if y.dim() != self.m {
            return Err(Error::EvaluatorFailure(x.0.clone()));
        }
        if !y.is_finite() {
            return Err(Error::EvaluatorFailure(x.0.clone()));
        }
        Ok(y)
    }

    pub fn analytic_dderiv(&self, x0: &Vector, h: &Vector) -> Option<Vector> {
        self.metadata
            .as_ref()
            .and_then(|meta| meta.analytic_dderiv.as_ref())
            .map(|f| f(x0, h))
    }

    /// The ordering cone from metadata, if recorded.
    pub fn cone(&self) -> Option<&ConeDescriptor> {
        self.metadata.as_ref().and_then(|m| m.cone.as_ref())
    }
}

fn vec1(x: f64) -> Vector {
    Vector(vec![x])
}

fn neg_square() -> MappingSpec {
    MappingSpec::new(
        "neg_square",
        1,
        1,
        DomainBox::symmetric(2.0, 1).unwrap(),
        |x: &Vector| vec1(-x[0] * x[0]),
    )
    .with_metadata(MappingMetadata {
        known_c: Some(1.0),
        known_k0: Some(vec1(1.0)),
        known_modulus: Some("pow:2".into()),
        cone: Some(ConeDescriptor::orthant(1)),
        analytic_dderiv: Some(Arc::new(|x0: &Vector, h: &Vector| {
            vec1(-2.0 * x0[0] * h[0])
        })),
        trace_anchors: vec![
            (vec1(0.0), vec1(1.0)),
            (vec1(0.5), vec1(1.0)),
            (vec1(-0.5), vec1(1.0)),
            (vec1(1.0), vec1(1.0)),
            (vec1(-1.0), vec1(1.0)),
            (vec1(0.25), vec1(-1.0)),
            (vec1(0.0), vec1(-1.0)),
            (vec1(0.5), vec1(-1.0)),
        ],
        negative_control: false,
    })
}

/// L = [[2, −1], [0, 3]]; exactly cone-convex (C = 0).
fn linear() -> MappingSpec {
    let l = |x: &Vector| Vector(vec![2.0 * x[0] - x[1], 3.0 * x[1]]);
    MappingSpec::new(
        "linear",
        2,
        2,
        DomainBox::symmetric(2.0, 2).unwrap(),
        l,
    )
    .with_metadata(MappingMetadata {
        known_c: Some(0.0),
        known_k0: Some(Vector(vec![1.0, 1.0])),
        known_modulus: Some("pow:2".into()),
        cone: Some(ConeDescriptor::orthant(2)),
        analytic_dderiv: Some(Arc::new(|_: &Vector, h: &Vector| {
            Vector(vec![2.0 * h[0] - h[1], 3.0 * h[1]])
        })),
        trace_anchors: vec![
            (Vector(vec![0.0, 0.0]), Vector(vec![1.0, 0.0])),
            (Vector(vec![0.0, 0.0]), Vector(vec![0.0, 1.0])),
            (Vector(vec![0.5, -0.5]), Vector(vec![1.0, 0.0])),
            (Vector(vec![0.5, -0.5]), Vector(vec![0.0, 1.0])),
            (Vector(vec![-1.0, 0.25]), Vector(vec![1.0, 0.0])),
            (Vector(vec![-1.0, 0.25]), Vector(vec![0.0, 1.0])),
        ],
        negative_control: false,
    })
}

/// F = G − ‖x‖²k₀ for the cone-convex quadratic
/// G(x) = (x₁² + x₂² + x₁x₂, 2x₁² + 3x₂² − x₁x₂) and k₀ = (1, 1), i.e.
/// F(x) = (x₁x₂, x₁² + 2x₂² − x₁x₂). Shifting back by ‖x‖²k₀ restores a
/// cone-convex mapping, which certifies the squared-norm defect with C = 1.
fn hilbert_shift() -> MappingSpec {
    let f = |x: &Vector| {
        Vector(vec![
            x[0] * x[1],
            x[0] * x[0] + 2.0 * x[1] * x[1] - x[0] * x[1],
        ])
    };
    MappingSpec::new(
        "hilbert_shift",
        2,
        2,
        DomainBox::symmetric(2.0, 2).unwrap(),
        f,
    )
    .with_metadata(MappingMetadata {
        known_c: Some(1.0),
        known_k0: Some(Vector(vec![1.0, 1.0])),
        known_modulus: Some("pow:2".into()),
        cone: Some(ConeDescriptor::orthant(2)),
        analytic_dderiv: Some(Arc::new(|x0: &Vector, h: &Vector| {
            Vector(vec![
                x0[1] * h[0] + x0[0] * h[1],
                (2.0 * x0[0] - x0[1]) * h[0] + (4.0 * x0[1] - x0[0]) * h[1],
            ])
        })),
        trace_anchors: vec![
            (Vector(vec![0.0, 0.0]), Vector(vec![1.0, 0.0])),
            (Vector(vec![0.0, 0.0]), Vector(vec![0.0, 1.0])),
            (Vector(vec![0.5, -0.5]), Vector(vec![1.0, 0.0])),
            (Vector(vec![0.5, -0.5]), Vector(vec![0.0, 1.0])),
            (Vector(vec![-0.5, 0.25]), Vector(vec![1.0, 0.0])),
            (Vector(vec![-0.5, 0.25]), Vector(vec![0.0, 1.0])),
        ],
        negative_control: false,
    })
}

/// F(x) = −|x|: the convexity gap near the kink decays like |x₁ − x₂|,
/// faster than any valid modulus allows, so no finite C works.
fn abs_kink() -> MappingSpec {
    MappingSpec::new(
        "abs_kink",
        1,
        1,
        DomainBox::symmetric(2.0, 1).unwrap(),
        |x: &Vector| vec1(-x[0].abs()),
    )
    .with_metadata(MappingMetadata {
        known_c: None,
        known_k0: Some(vec1(1.0)),
        known_modulus: Some("pow:2".into()),
        cone: Some(ConeDescriptor::orthant(1)),
        analytic_dderiv: Some(Arc::new(|x0: &Vector, h: &Vector| {
            if x0[0] > 0.0 {
                vec1(-h[0])
            } else if x0[0] < 0.0 {
                vec1(h[0])
            } else {
                vec1(-h[0].abs())
            }
        })),
        trace_anchors: vec![
            (vec1(-0.5), vec1(1.0)),
            (vec1(0.5), vec1(1.0)),
            (vec1(0.25), vec1(1.0)),
        ],
        negative_control: true,
    })
}

fn build_corpus() -> Result<Vec<MappingSpec>> {
    let entries = vec![neg_square(), linear(), hilbert_shift(), abs_kink()];
    let plan = SamplingPlan::light();
    for entry in &entries {
        let meta = entry
            .metadata
            .as_ref()
            .ok_or_else(|| Error::InvalidInput(format!("{}: missing metadata", entry.name)))?;
        let cone = meta
            .cone
            .as_ref()
            .ok_or_else(|| Error::InvalidInput(format!("{}: missing cone", entry.name)))?;
        cone.validate()?;
        if let Some(label) = &meta.known_modulus {
            let modulus = Modulus::parse(label)?;
            let rep = modulus.validate();
            if !rep.passed {
                return Err(Error::InvalidModulus(format!(
                    "{}: modulus {label} fails validation",
                    entry.name
                )));
            }
            if let (Some(c), Some(k0)) = (meta.known_c, &meta.known_k0) {
                let rep = check_paraconvex(
                    entry,
                    cone,
                    &modulus,
                    c,
                    k0,
                    DefectForm::Min,
                    NormChoice::Euclidean,
                    &plan,
                )?;
                if !rep.passed {
                    return Err(Error::InvalidInput(format!(
                        "{}: certified constant C = {c} rejected by the checker \
                         (worst slack {})",
                        entry.name, rep.worst_slack
                    )));
                }
            }
        }
        for (x0, h) in &meta.trace_anchors {
            if !entry.domain_box.contains(x0) || !entry.domain_box.contains(&x0.add(h)) {
                return Err(Error::InvalidInput(format!(
                    "{}: trace anchor outside the domain box",
                    entry.name
                )));
            }
        }
    }
    Ok(entries)
}

fn registry() -> &'static Result<Vec<MappingSpec>> {
    static REGISTRY: OnceLock<Result<Vec<MappingSpec>>> = OnceLock::new();
    REGISTRY.get_or_init(build_corpus)
}

/// Names of the built-in corpus entries, in registration order.
pub fn corpus_names() -> Result<Vec<String>> {
    match registry() {
        Ok(entries) => Ok(entries.iter().map(|e| e.name.clone()).collect()),
        Err(e) => Err(e.clone()),
    }
}

/// Look up a built-in mapping by name.
pub fn corpus_get(name: &str) -> Result<MappingSpec> {
    match registry() {
        Ok(entries) => entries
            .iter()
            .find(|e| e.name == name)
            .cloned()
            .ok_or_else(|| Error::UnknownMapping(name.to_string())),
        Err(e) => Err(e.clone()),
    }
}

#[derive(Debug, Deserialize)]
struct PolynomialFile {
    n: usize,
    m: usize,
    /// components[j] = list of (coefficient, exponent-per-input) terms
    components: Vec<Vec<(f64, Vec<u32>)>>,
    #[serde(default)]
    name: Option<String>,
    #[serde(default)]
    domain_box: Option<BoxFile>,
}

#[derive(Debug, Deserialize)]
struct BoxFile {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

/// Load a componentwise polynomial mapping from its JSON description:
/// `{"n": 1, "m": 2, "components": [[[1.0, [2]]], [[-1.0, [2]]]]}`
/// with optional `"name"` and `"domain_box": {"lo": [...], "hi": [...]}`
/// (default [−2, 2]ⁿ).
pub fn from_polynomial_json(text: &str) -> Result<MappingSpec> {
    let file: PolynomialFile = serde_json::from_str(text)
        .map_err(|e| Error::InvalidInput(format!("mapping JSON: {e}")))?;
    if file.n == 0 || file.m == 0 {
        return Err(Error::InvalidInput("mapping dimensions must be positive".into()));
    }
    if file.components.len() != file.m {
        return Err(Error::InvalidInput(format!(
            "expected {} components, got {}",
            file.m,
            file.components.len()
        )));
    }
    for comp in &file.components {
        for (coeff, exps) in comp {
            if !coeff.is_finite() {
                return Err(Error::InvalidInput("non-finite coefficient".into()));
            }
            if exps.len() != file.n {
                return Err(Error::InvalidInput(format!(
                    "exponent tuple {exps:?} does not match n = {}",
                    file.n
                )));
            }
        }
    }
    let domain_box = match file.domain_box {
        Some(b) => DomainBox::new(Vector(b.lo), Vector(b.hi))?,
        None => DomainBox::symmetric(2.0, file.n)?,
    };
    if domain_box.dim() != file.n {
        return Err(Error::DimensionMismatch {
            expected: file.n,
            got: domain_box.dim(),
        });
    }
    let components = file.components;
    let name = file.name.unwrap_or_else(|| "polynomial".into());
    Ok(MappingSpec::new(
        name,
        file.n,
        file.m,
        domain_box,
        move |x: &Vector| {
            Vector(
                components
                    .iter()
                    .map(|terms| {
                        terms
                            .iter()
                            .map(|(coeff, exps)| {
                                coeff
                                    * exps
                                        .iter()
                                        .enumerate()
                                        .map(|(i, &e)| x[i].powi(e as i32))
                                        .product::<f64>()
                            })
                            .sum()
                    })
                    .collect(),
            )
        },
    ))
}

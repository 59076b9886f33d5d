//! Verification and computation toolkit for strongly cone-paraconvex
//! mappings between finite-dimensional spaces.
//!
//! The pieces fit together as a pipeline:
//!
//! * [`cone`] — Rᵐ ordered by a polyhedral cone: membership, the induced
//!   order, dual cones, pointedness, normality constants, well-basedness.
//! * [`modulus`] — the defect modulus α with numeric validation of
//!   α(t)/t → 0.
//! * [`corpus`] — built-in mappings with analytic ground truth, plus a JSON
//!   polynomial loader.
//! * [`paraconvexity`] — sampling checkers for the defining inequalities,
//!   minimal-constant estimation, scalarization, the squared-norm-shift
//!   characterization and counterexample search.
//! * [`quotient`] — α-corrected difference quotients, their monotonicity and
//!   lower-bound certificates, and the directional derivative estimator.
//!
//! Everything is a pure function over immutable values; checkers are
//! deterministic for a fixed seed.
//!
//! ```
//! use paracone::*;
//!
//! # fn main() -> Result<()> {
//! let f = corpus_get("neg_square")?; // F(x) = -x^2 on [-2, 2]
//! let cone = ConeDescriptor::orthant(1);
//! let alpha = Modulus::power(2.0)?;
//! let k0 = Vector(vec![1.0]);
//!
//! // the squared-modulus defect with C = 1 repairs the lost convexity
//! let report = check_paraconvex(
//!     &f, &cone, &alpha, 1.0, &k0,
//!     DefectForm::Min, NormChoice::Euclidean,
//!     &SamplingPlan::light(),
//! )?;
//! assert!(report.passed);
//!
//! // and the one-sided derivative at 0.5 converges to -1
//! let estimate = estimate_directional_derivative(
//!     &f, &Vector(vec![0.5]), &Vector(vec![1.0]),
//!     1.0, &k0, &alpha, &cone, &EstimatorConfig::default(),
//! )?;
//! assert!(estimate.converged);
//! assert!((estimate.value[0] + 1.0).abs() < 1e-5);
//! # Ok(()) }
//! ```

pub mod cone;
pub mod corpus;
pub mod error;
mod linalg;
pub mod modulus;
pub mod paraconvexity;
pub mod quotient;
pub mod report;
pub mod sampling;
pub mod vector;

pub use cone::{ConeDescriptor, DualVector, Membership};
pub use corpus::{corpus_get, corpus_names, DomainBox, MappingMetadata, MappingSpec};
pub use error::{Error, Result};
pub use modulus::Modulus;
pub use paraconvexity::{
    check_cone_convex, check_paraconvex, check_scalarization, estimate_min_c, search_violation,
    verify_square_shift, DefectForm, SampleTriple, SquareShiftReport,
};
pub use quotient::{
    build_trace, check_alpha_monotone, check_lemma_trace, check_lower_bound,
    estimate_directional_derivative, DerivativeEstimate, EstimatorConfig, LemmaReport,
    QuotientTrace,
};
pub use report::{CheckParams, CheckReport, Witness};
pub use sampling::SamplingPlan;
pub use vector::{NormChoice, Vector};

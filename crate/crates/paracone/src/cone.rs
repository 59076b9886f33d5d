//! Rᵐ ordered by a closed convex polyhedral cone.
//!
//! Cones are stored in facet-normal (H) form: K = {y : aᵢ·y ≥ 0 ∀i}. The
//! generator (V) form is optional; it is required for the dual cone and the
//! well-basedness witness and is derived automatically for simplicial cones
//! (square, invertible normal matrix). The induced order is
//! x ≤_K y ⟺ y − x ∈ K.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::vector::{NormChoice, Vector};

pub const DEFAULT_MEMBERSHIP_TOL: f64 = 1e-9;

fn default_membership_tol() -> f64 {
    DEFAULT_MEMBERSHIP_TOL
}

/// Outcome of a membership query.
///
/// `slack` is minᵢ aᵢ·y over the facet normals; `threshold` is the relative
/// tolerance tol·(1 + ‖y‖₂) the slack was compared against, so the signed
/// distance to violation is `slack + threshold`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Membership {
    pub contained: bool,
    pub slack: f64,
    pub threshold: f64,
}

/// A closed convex polyhedral cone K ⊂ Rᵐ in facet-normal form.
///
/// Loadable from JSON:
/// `{"dim": 2, "facet_normals": [[1,0],[0,1]], "generators": [[1,0],[0,1]],
///   "membership_tol": 1e-9}`
/// with `generators`, `membership_tol` and `pointed` optional.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConeDescriptor {
    pub dim: usize,
    #[serde(default)]
    pub facet_normals: Vec<Vector>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<Vector>>,
    #[serde(default = "default_membership_tol")]
    pub membership_tol: f64,
    /// Optional cached pointedness flag; must agree with [`Self::is_pointed`].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pointed: Option<bool>,
}

impl ConeDescriptor {
    pub fn new(dim: usize, facet_normals: Vec<Vector>) -> Result<Self> {
        let cone = ConeDescriptor {
            dim,
            facet_normals,
            generators: None,
            membership_tol: DEFAULT_MEMBERSHIP_TOL,
            pointed: None,
        };
        cone.validate()?;
        Ok(cone)
    }

    pub fn with_generators(mut self, generators: Vec<Vector>) -> Result<Self> {
        self.generators = Some(generators);
        self.validate()?;
        Ok(self)
    }

    /// The nonnegative orthant R^m₊ with standard basis generators.
    pub fn orthant(dim: usize) -> Self {
        let basis: Vec<Vector> = (0..dim).map(|i| Vector::unit(dim, i)).collect();
        ConeDescriptor {
            dim,
            facet_normals: basis.clone(),
            generators: Some(basis),
            membership_tol: DEFAULT_MEMBERSHIP_TOL,
            pointed: Some(true),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cone: ConeDescriptor = serde_json::from_str(text)
            .map_err(|e| Error::InvalidInput(format!("cone JSON: {e}")))?;
        cone.validate()?;
        Ok(cone)
    }

    /// Check structural invariants: consistent dimensions, finite nonzero
    /// normals, generators inside the cone, pointedness flag consistency.
    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::InvalidInput("cone dimension must be positive".into()));
        }
        if !self.membership_tol.is_finite() || self.membership_tol < 0.0 {
            return Err(Error::InvalidInput("membership_tol must be >= 0".into()));
        }
        for a in &self.facet_normals {
            if a.dim() != self.dim {
                return Err(Error::DimensionMismatch {
                    expected: self.dim,
                    got: a.dim(),
                });
            }
            a.check_finite()?;
            if a.norm2() == 0.0 {
                return Err(Error::InvalidInput("zero facet normal".into()));
            }
        }
        if let Some(gens) = &self.generators {
            for g in gens {
                if g.dim() != self.dim {
                    return Err(Error::DimensionMismatch {
                        expected: self.dim,
                        got: g.dim(),
                    });
                }
                g.check_finite()?;
                let m = self.member(g)?;
                if !m.contained {
                    return Err(Error::InvalidInput(format!(
                        "stored generator {:?} is not a cone member (slack {})",
                        g.0, m.slack
                    )));
                }
            }
        }
        if let Some(flag) = self.pointed {
            if flag != self.compute_pointed() {
                return Err(Error::InvalidInput(
                    "stored pointedness flag disagrees with the cone geometry".into(),
                ));
            }
        }
        Ok(())
    }

    /// Membership test with relative slack: y ∈ K iff
    /// minᵢ aᵢ·y ≥ −tol·(1 + ‖y‖).
    pub fn member(&self, y: &Vector) -> Result<Membership> {
        if y.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: y.dim(),
            });
        }
        let slack = self
            .facet_normals
            .iter()
            .map(|a| a.dot(y))
            .fold(f64::INFINITY, f64::min);
        let threshold = self.membership_tol * (1.0 + y.norm2());
        Ok(Membership {
            contained: slack >= -threshold,
            slack,
            threshold,
        })
    }

    /// The induced order: x ≤_K y ⟺ y − x ∈ K.
    pub fn leq(&self, x: &Vector, y: &Vector) -> Result<bool> {
        if x.dim() != y.dim() {
            return Err(Error::DimensionMismatch {
                expected: x.dim(),
                got: y.dim(),
            });
        }
        Ok(self.member(&y.sub(x))?.contained)
    }

    /// Stored generators, or generators derived from a simplicial H-form
    /// (square invertible normal matrix → columns of A⁻¹, normalized).
    pub fn effective_generators(&self) -> Option<Vec<Vector>> {
        if let Some(gens) = &self.generators {
            return Some(gens.clone());
        }
        if self.facet_normals.len() != self.dim {
            return None;
        }
        let a: linalg::Matrix = self.facet_normals.iter().map(|v| v.0.clone()).collect();
        let inv = linalg::invert(&a)?;
        let mut gens = Vec::with_capacity(self.dim);
        for j in 0..self.dim {
            let col = Vector(inv.iter().map(|row| row[j]).collect());
            let n = col.norm2();
            if n == 0.0 {
                return None;
            }
            gens.push(col.scale(1.0 / n));
        }
        Some(gens)
    }

    /// The positive dual cone K* = {y* : y*(y) ≥ 0 ∀ y ∈ K}.
    ///
    /// For polyhedral K the dual's facet normals are K's generators and,
    /// by Farkas duality, K's facet normals generate K*; both forms are
    /// filled in so the bipolar K** is computable directly.
    pub fn dual_cone(&self) -> Result<ConeDescriptor> {
        let gens = self.effective_generators().ok_or_else(|| {
            Error::UnsupportedRepresentation(
                "dual cone needs generators: store them or use a simplicial cone".into(),
            )
        })?;
        Ok(ConeDescriptor {
            dim: self.dim,
            facet_normals: gens,
            generators: Some(self.facet_normals.clone()),
            membership_tol: self.membership_tol,
            pointed: None,
        })
    }

    fn compute_pointed(&self) -> bool {
        if let Some(gens) = self.effective_generators() {
            // K ∩ (−K) is nontrivial iff some generator's negation stays in K
            for g in &gens {
                if g.norm2() < 1e-12 {
                    continue;
                }
                if self
                    .member(&g.scale(-1.0))
                    .map(|m| m.contained)
                    .unwrap_or(false)
                {
                    return false;
                }
            }
            true
        } else {
            // H-form only: K ∩ (−K) = ker(A), trivial iff A has full column rank
            let a: linalg::Matrix = self.facet_normals.iter().map(|v| v.0.clone()).collect();
            linalg::rank(&a, 1e-9) == self.dim
        }
    }

    /// True iff K ∩ (−K) = {0}.
    pub fn is_pointed(&self) -> bool {
        self.pointed.unwrap_or_else(|| self.compute_pointed())
    }

    /// Sampled lower bound on the normality constant: the largest observed
    /// ‖x‖/‖y‖ over feasible pairs 0 ≤_K x ≤_K y with y ≠ 0.
    ///
    /// Deterministic for a fixed seed, and nondecreasing in `samples` for a
    /// fixed seed because a longer run extends the same sample stream.
    pub fn estimate_normality_constant(
        &self,
        norm: NormChoice,
        samples: usize,
        seed: u64,
    ) -> Result<f64> {
        if !self.is_pointed() {
            return Err(Error::InvalidParameter(
                "normality constant is defined for pointed cones only".into(),
            ));
        }
        if samples == 0 {
            return Err(Error::InvalidParameter("samples must be positive".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut best: Option<f64> = None;

        match self.effective_generators() {
            Some(gens) if !gens.is_empty() => {
                let unit: Vec<Vector> = gens
                    .iter()
                    .filter(|g| g.norm2() > 0.0)
                    .map(|g| g.scale(1.0 / g.norm2()))
                    .collect();
                if unit.is_empty() {
                    return Err(Error::EstimationFailed(
                        "cone has no nonzero generators".into(),
                    ));
                }
                for _ in 0..samples {
                    // x and the increment d are nonnegative combinations of
                    // the generators; d's magnitude is log-uniform so pairs
                    // with y ≈ x (ratios near the supremum) are well covered.
                    let mut x = Vector::zeros(self.dim);
                    for g in &unit {
                        x = x.axpy(rng.gen::<f64>(), g);
                    }
                    let scale = 10f64.powf(rng.gen_range(-4.0..0.0));
                    let mut d = Vector::zeros(self.dim);
                    for g in &unit {
                        d = d.axpy(scale * rng.gen::<f64>(), g);
                    }
                    let y = x.add(&d);
                    let nx = norm.norm(&x);
                    let ny = norm.norm(&y);
                    if nx <= 1e-12 || ny <= 1e-300 {
                        continue;
                    }
                    let ratio = nx / ny;
                    best = Some(best.map_or(ratio, |b| b.max(ratio)));
                }
            }
            _ => {
                // no V-form: rejection-sample both members from the unit cube
                for _ in 0..samples {
                    let x = Vector((0..self.dim).map(|_| rng.gen_range(-1.0..1.0)).collect());
                    let scale = 10f64.powf(rng.gen_range(-4.0..0.0));
                    let d = Vector(
                        (0..self.dim)
                            .map(|_| scale * rng.gen_range(-1.0..1.0))
                            .collect(),
                    );
                    if !self.member(&x)?.contained || !self.member(&d)?.contained {
                        continue;
                    }
                    let y = x.add(&d);
                    let nx = norm.norm(&x);
                    let ny = norm.norm(&y);
                    if nx <= 1e-12 || ny <= 1e-300 {
                        continue;
                    }
                    let ratio = nx / ny;
                    best = Some(best.map_or(ratio, |b| b.max(ratio)));
                }
            }
        }

        best.ok_or_else(|| {
            Error::EstimationFailed("no feasible pair 0 <= x <= y with y != 0 was found".into())
        })
    }

    /// A functional y* with y*(k) ≥ ‖k‖ for all k ∈ K, if one is found.
    ///
    /// It suffices to enforce y*·g ≥ ‖g‖ on the generators: positive
    /// combinations then follow from the triangle inequality. The finite
    /// system is solved in closed form when possible and by subgradient
    /// ascent otherwise. Returns `None` for non-pointed cones (no witness
    /// can exist) and when no V-form is available.
    pub fn well_based_witness(&self, norm: NormChoice) -> Option<DualVector> {
        if !self.is_pointed() {
            return None;
        }
        let gens = self.effective_generators()?;
        let unit: Vec<Vector> = gens
            .iter()
            .filter(|g| norm.norm(g) > 0.0)
            .map(|g| g.scale(1.0 / norm.norm(g)))
            .collect();
        if unit.is_empty() {
            return None;
        }
        let verify = |y: &Vector| unit.iter().all(|g| g.dot(y) >= 1.0 - 1e-9);

        // closed form: solve G y = 1 in the least-squares / minimum-norm sense
        let m: linalg::Matrix = unit.iter().map(|g| g.0.clone()).collect();
        let ones = vec![1.0; unit.len()];
        if let Some(y) = linalg::least_squares(&m, &ones) {
            let y = Vector(y);
            if verify(&y) {
                return Some(DualVector { coeffs: y });
            }
        }

        // fallback: maximize min_j g_j · y on the unit sphere, then rescale
        let mut y = Vector::zeros(self.dim);
        for g in &unit {
            y = y.add(g);
        }
        if y.norm2() > 0.0 {
            y = y.scale(1.0 / y.norm2());
        }
        let mut best_margin = f64::NEG_INFINITY;
        let mut best_y = y.clone();
        for iter in 0..5000 {
            let (margin, worst_gen) = unit
                .iter()
                .map(|g| (g.dot(&y), g))
                .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal))
                .map(|(v, g)| (v, g.clone()))?;
            if margin > best_margin {
                best_margin = margin;
                best_y = y.clone();
            }
            let step = 1.0 / (2.0 + iter as f64).sqrt();
            y = y.axpy(step, &worst_gen);
            let n = y.norm2();
            if n > 0.0 {
                y = y.scale(1.0 / n);
            }
        }
        if best_margin > 1e-9 {
            let y = best_y.scale(1.0 / best_margin);
            if verify(&y) {
                return Some(DualVector { coeffs: y });
            }
        }
        None
    }
}

/// A linear functional y* on Rᵐ acting through the dot product.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualVector {
    pub coeffs: Vector,
}

impl DualVector {
    pub fn new(coeffs: Vector) -> Self {
        DualVector { coeffs }
    }

    pub fn apply(&self, y: &Vector) -> f64 {
        self.coeffs.dot(y)
    }

    /// Dual feasibility: y*·g ≥ −tol for every cone generator.
    pub fn is_dual_feasible(&self, cone: &ConeDescriptor) -> bool {
        match cone.effective_generators() {
            Some(gens) => gens.iter().all(|g| {
                self.coeffs.dot(g) >= -cone.membership_tol * (1.0 + g.norm2())
            }),
            // without a V-form, fall back to the dual cone's H-form being
            // unavailable; accept only the zero functional conservatively
            None => self.coeffs.norm2() == 0.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(coords: &[f64]) -> Vector {
        Vector::new(coords.to_vec())
    }

    fn halfspace_r2() -> ConeDescriptor {
        // {(u, w): w >= 0}
        ConeDescriptor::new(2, vec![v(&[0.0, 1.0])]).unwrap()
    }

    fn wedge() -> ConeDescriptor {
        // {(u, w): w >= |u|}, generators (1,1) and (-1,1)
        ConeDescriptor::new(2, vec![v(&[1.0, 1.0]), v(&[-1.0, 1.0])]).unwrap()
    }

    #[test]
    fn member_orthant() {
        let k = ConeDescriptor::orthant(2);
        let inside = k.member(&v(&[1.0, 1.0])).unwrap();
        assert!(inside.contained);
        assert_eq!(inside.slack, 1.0);

        let outside = k.member(&v(&[1.0, -1.0])).unwrap();
        assert!(!outside.contained);
        assert_eq!(outside.slack, -1.0);

        let apex = k.member(&v(&[0.0, 0.0])).unwrap();
        assert!(apex.contained);
        assert_eq!(apex.slack, 0.0);
    }

    #[test]
    fn member_dimension_mismatch() {
        let k = ConeDescriptor::orthant(2);
        assert!(matches!(
            k.member(&v(&[1.0])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn leq_orthant() {
        let k = ConeDescriptor::orthant(2);
        assert!(k.leq(&v(&[0.0, 0.0]), &v(&[1.0, 2.0])).unwrap());
        let x = v(&[0.3, -0.7]);
        assert!(k.leq(&x, &x).unwrap());
        assert!(!k.leq(&v(&[2.0, 0.0]), &v(&[1.0, 0.0])).unwrap());
    }

    #[test]
    fn dual_of_orthant_is_orthant() {
        let k = ConeDescriptor::orthant(2);
        let dual = k.dual_cone().unwrap();
        for probe in [
            v(&[1.0, 1.0]),
            v(&[1.0, 0.0]),
            v(&[-0.1, 1.0]),
            v(&[-1.0, -1.0]),
        ] {
            assert_eq!(
                dual.member(&probe).unwrap().contained,
                k.member(&probe).unwrap().contained
            );
        }
    }

    #[test]
    fn dual_of_wedge_is_itself() {
        // brute-force oracle: z in K* iff z·g >= 0 for sampled rays g of K
        let k = wedge();
        let dual = k.dual_cone().unwrap();
        let rays: Vec<Vector> = (0..=50)
            .map(|i| {
                let s = -1.0 + 2.0 * (i as f64) / 50.0;
                v(&[s, 1.0]) // all rays of {w >= |u|} with w = 1
            })
            .collect();
        for i in -10..=10 {
            for j in -10..=10 {
                let z = v(&[i as f64 / 5.0, j as f64 / 5.0]);
                let oracle = rays.iter().all(|g| z.dot(g) >= -1e-9);
                assert_eq!(
                    dual.member(&z).unwrap().contained,
                    oracle,
                    "disagreement at {z:?}"
                );
            }
        }
    }

    #[test]
    fn dual_of_halfline_is_halfspace() {
        let k = ConeDescriptor {
            dim: 2,
            facet_normals: vec![v(&[1.0, 0.0]), v(&[0.0, 1.0]), v(&[0.0, -1.0])],
            generators: Some(vec![v(&[1.0, 0.0])]),
            membership_tol: DEFAULT_MEMBERSHIP_TOL,
            pointed: None,
        };
        let dual = k.dual_cone().unwrap();
        // dual = {(a, b): a >= 0}: check on samples straight from the definition
        for (probe, expect) in [
            (v(&[1.0, 5.0]), true),
            (v(&[0.0, -3.0]), true),
            (v(&[1e-3, 0.0]), true),
            (v(&[-0.5, 1.0]), false),
        ] {
            assert_eq!(dual.member(&probe).unwrap().contained, expect);
        }
    }

    #[test]
    fn dual_requires_generators() {
        // three normals in R^2: not simplicial, no stored generators
        let k = ConeDescriptor::new(
            2,
            vec![v(&[1.0, 0.0]), v(&[0.0, 1.0]), v(&[1.0, 1.0])],
        )
        .unwrap();
        assert!(matches!(
            k.dual_cone(),
            Err(Error::UnsupportedRepresentation(_))
        ));
    }

    #[test]
    fn pointedness() {
        assert!(ConeDescriptor::orthant(2).is_pointed());
        // full plane: no facet normals
        let full = ConeDescriptor::new(2, vec![]).unwrap();
        assert!(!full.is_pointed());
        // half-space contains the line w = 0
        assert!(!halfspace_r2().is_pointed());
        assert!(wedge().is_pointed());
    }

    #[test]
    fn pointed_flag_consistency_is_validated() {
        let mut k = ConeDescriptor::orthant(2);
        k.pointed = Some(false);
        assert!(k.validate().is_err());
    }

    #[test]
    fn normality_orthant_sup() {
        // coordinatewise 0 <= x_i <= y_i gives sup ratio exactly 1
        let k = ConeDescriptor::orthant(2);
        let c = k
            .estimate_normality_constant(NormChoice::Sup, 20_000, 7)
            .unwrap();
        assert!(c > 0.99 && c <= 1.0 + 1e-12, "got {c}");
    }

    #[test]
    fn normality_orthant_euclidean_vs_oracle() {
        // dense-grid oracle over pair angles: x on the unit circle arc inside
        // the orthant, d along a second arc direction with scanned radius
        let k = ConeDescriptor::orthant(2);
        let mut oracle: f64 = 0.0;
        let steps = 120;
        for i in 0..=steps {
            let phi = std::f64::consts::FRAC_PI_2 * (i as f64) / (steps as f64);
            let x = v(&[phi.cos(), phi.sin()]);
            for j in 0..=steps {
                let psi = std::f64::consts::FRAC_PI_2 * (j as f64) / (steps as f64);
                for r_step in 0..=60 {
                    let r = 10f64.powf(-4.0 + 4.0 * (r_step as f64) / 60.0);
                    let y = x.axpy(r, &v(&[psi.cos(), psi.sin()]));
                    oracle = oracle.max(x.norm2() / y.norm2());
                }
            }
        }
        assert!((oracle - 1.0).abs() < 0.01, "oracle {oracle}");
        let est = k
            .estimate_normality_constant(NormChoice::Euclidean, 20_000, 7)
            .unwrap();
        assert!((est - 1.0).abs() < 0.01, "estimate {est}");
    }

    #[test]
    fn normality_steep_wedge_regression() {
        // {(u, w): w >= 2|u|}: acute cone, x·d >= 0 for all members, so the
        // true constant is 1; recorded from the dense-grid oracle below.
        let k = ConeDescriptor::new(2, vec![v(&[2.0, 1.0]), v(&[-2.0, 1.0])]).unwrap();
        let ang = (0.5f64).atan(); // half-opening from the w-axis
        let mut oracle: f64 = 0.0;
        let steps = 120;
        for i in 0..=steps {
            let phi = -ang + 2.0 * ang * (i as f64) / (steps as f64);
            let x = v(&[phi.sin(), phi.cos()]);
            for j in 0..=steps {
                let psi = -ang + 2.0 * ang * (j as f64) / (steps as f64);
                for r_step in 0..=60 {
                    let r = 10f64.powf(-4.0 + 4.0 * (r_step as f64) / 60.0);
                    let y = x.axpy(r, &v(&[psi.sin(), psi.cos()]));
                    oracle = oracle.max(x.norm2() / y.norm2());
                }
            }
        }
        assert!((oracle - 1.0).abs() < 1e-3, "oracle {oracle}");
        let est = k
            .estimate_normality_constant(NormChoice::Euclidean, 20_000, 11)
            .unwrap();
        assert!((est - oracle).abs() < 0.02, "estimate {est} vs oracle {oracle}");
    }

    #[test]
    fn normality_obtuse_cone_exceeds_one() {
        // cone{(1,0), (-1,1)} is pointed but wider than a right angle: adding
        // a member can shrink the euclidean norm, so C > 1 (true value √2).
        let k = ConeDescriptor::new(2, vec![v(&[0.0, 1.0]), v(&[1.0, 1.0])])
            .unwrap()
            .with_generators(vec![v(&[1.0, 0.0]), v(&[-1.0, 1.0])])
            .unwrap();
        let est = k
            .estimate_normality_constant(NormChoice::Euclidean, 100_000, 3)
            .unwrap();
        assert!(est > 1.3, "estimate {est}");
        assert!(est <= 2f64.sqrt() + 1e-9, "estimate {est} above true constant");
    }

    #[test]
    fn normality_monotone_in_samples() {
        let k = ConeDescriptor::orthant(2);
        let mut prev = 0.0;
        for samples in [100, 1_000, 10_000] {
            let c = k
                .estimate_normality_constant(NormChoice::Euclidean, samples, 42)
                .unwrap();
            assert!(c >= prev);
            prev = c;
        }
    }

    #[test]
    fn normality_requires_pointed() {
        assert!(matches!(
            halfspace_r2().estimate_normality_constant(NormChoice::Euclidean, 100, 0),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn normality_degenerate_cone_fails() {
        // {0} in R^2: pointed, but no feasible pair has y != 0
        let zero = ConeDescriptor::new(
            2,
            vec![
                v(&[1.0, 0.0]),
                v(&[-1.0, 0.0]),
                v(&[0.0, 1.0]),
                v(&[0.0, -1.0]),
            ],
        )
        .unwrap();
        assert!(matches!(
            zero.estimate_normality_constant(NormChoice::Euclidean, 500, 0),
            Err(Error::EstimationFailed(_))
        ));
    }

    #[test]
    fn well_based_orthant_sup() {
        let k = ConeDescriptor::orthant(2);
        let w = k.well_based_witness(NormChoice::Sup).unwrap();
        // (1,1) satisfies y*·e_i = 1 = ||e_i||_sup with equality
        assert!((w.coeffs[0] - 1.0).abs() < 1e-9);
        assert!((w.coeffs[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn well_based_halfspace_none() {
        assert!(halfspace_r2().well_based_witness(NormChoice::Euclidean).is_none());
    }

    #[test]
    fn well_based_halfline() {
        let k = ConeDescriptor {
            dim: 2,
            facet_normals: vec![v(&[1.0, 0.0]), v(&[0.0, 1.0]), v(&[0.0, -1.0])],
            generators: Some(vec![v(&[1.0, 1.0])]),
            membership_tol: DEFAULT_MEMBERSHIP_TOL,
            pointed: None,
        };
        // span{(1,1)}: witness must satisfy y*·(1,1) >= sqrt(2)
        let w = k.well_based_witness(NormChoice::Euclidean).unwrap();
        assert!(w.coeffs.dot(&v(&[1.0, 1.0])) >= 2f64.sqrt() - 1e-9);
    }

    #[test]
    fn well_based_witness_covers_random_members() {
        let k = wedge().with_generators(vec![v(&[1.0, 1.0]), v(&[-1.0, 1.0])]).unwrap();
        let w = k.well_based_witness(NormChoice::Euclidean).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let a: f64 = rng.gen_range(0.0..3.0);
            let b: f64 = rng.gen_range(0.0..3.0);
            let member = v(&[1.0, 1.0]).scale(a).add(&v(&[-1.0, 1.0]).scale(b));
            assert!(w.apply(&member) >= member.norm2() - 1e-9);
        }
    }

    #[test]
    fn membership_positively_homogeneous() {
        let k = wedge();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let y = v(&[rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)]);
            if !k.member(&y).unwrap().contained {
                continue;
            }
            for lambda in [0.0, 0.5, 2.0, 17.0] {
                assert!(k.member(&y.scale(lambda)).unwrap().contained);
            }
        }
    }

    #[test]
    fn leq_transitive_on_chains() {
        let k = ConeDescriptor::orthant(3);
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..200 {
            let x = Vector((0..3).map(|_| rng.gen_range(-1.0..1.0)).collect());
            let k1 = Vector((0..3).map(|_| rng.gen_range(0.0..1.0)).collect());
            let k2 = Vector((0..3).map(|_| rng.gen_range(0.0..1.0)).collect());
            let y = x.add(&k1);
            let z = y.add(&k2);
            assert!(k.leq(&x, &y).unwrap());
            assert!(k.leq(&y, &z).unwrap());
            assert!(k.leq(&x, &z).unwrap());
        }
    }

    #[test]
    fn leq_antisymmetric_within_tolerance() {
        let k = wedge();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..500 {
            let d = v(&[rng.gen_range(-1.0..1.0), rng.gen_range(-1e-9..1e-9)]);
            if k.member(&d).unwrap().contained && k.member(&d.scale(-1.0)).unwrap().contained {
                // both directions inside a pointed cone only happens near 0
                assert!(d.norm2() < 1e-6, "antisymmetry violated at {d:?}");
            }
        }
        let zero = v(&[0.0, 0.0]);
        assert!(k.leq(&zero, &zero).unwrap());
    }

    #[test]
    fn bipolar_preserves_membership() {
        for k in [ConeDescriptor::orthant(2), wedge().with_generators(vec![v(&[1.0, 1.0]), v(&[-1.0, 1.0])]).unwrap()] {
            let kk = k.dual_cone().unwrap().dual_cone().unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(33);
            for _ in 0..500 {
                let y = v(&[rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)]);
                assert_eq!(
                    k.member(&y).unwrap().contained,
                    kk.member(&y).unwrap().contained,
                    "bipolar mismatch at {y:?}"
                );
            }
        }
    }

    #[test]
    fn cone_json_round_trip() {
        let text = r#"{"dim": 2, "facet_normals": [[1.0, 0.0], [0.0, 1.0]],
                       "generators": [[1.0, 0.0], [0.0, 1.0]]}"#;
        let k = ConeDescriptor::from_json(text).unwrap();
        assert_eq!(k.dim, 2);
        assert_eq!(k.membership_tol, DEFAULT_MEMBERSHIP_TOL);
        assert!(k.is_pointed());
        // bad generator is rejected at load time
        let bad = r#"{"dim": 2, "facet_normals": [[1.0, 0.0], [0.0, 1.0]],
                      "generators": [[-1.0, 0.0]]}"#;
        assert!(ConeDescriptor::from_json(bad).is_err());
    }
}

//! Sampling plans for the inequality checkers.
//!
//! A plan is a deterministic tensor grid unioned with seeded random triples.
//! The per-axis grid mixes uniformly spaced points with a geometric cluster
//! around the box center, so defects that only show up at small separations
//! (kinks, high-curvature spots) are hit by the grid instead of relying on
//! luck with random pairs. Grids give reproducible worst-slack values; random
//! triples catch off-grid violations.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::DomainBox;
use crate::error::Result;
use crate::paraconvexity::SampleTriple;
use crate::vector::Vector;

/// Hard cap on tensor-grid points per vector; larger grids are thinned.
const MAX_GRID_POINTS: usize = 300;

#[derive(Debug, Clone)]
pub struct SamplingPlan {
    /// λ values, endpoints included.
    pub lambdas: Vec<f64>,
    /// Uniform per-axis points at n = 1 (scaled down for higher dimensions).
    pub uniform_points_per_dim: usize,
    /// Geometric refinement levels around the box center at n = 1.
    pub geometric_levels: usize,
    pub random_triples: usize,
    pub seed: u64,
}

fn lambda_grid(interior: usize) -> Vec<f64> {
    let mut l = vec![0.0];
    l.extend((1..=interior).map(|i| i as f64 / (interior + 1) as f64));
    l.push(1.0);
    l
}

impl SamplingPlan {
    /// λ ∈ {0} ∪ {0.05, …, 0.95} ∪ {1}, multi-scale axis grid, 400 random
    /// triples.
    pub fn default_plan() -> Self {
        SamplingPlan {
            lambdas: lambda_grid(19),
            uniform_points_per_dim: 9,
            geometric_levels: 9,
            random_triples: 400,
            seed: 7,
        }
    }

    /// Small plan for load-time sanity checks.
    pub fn light() -> Self {
        SamplingPlan {
            lambdas: lambda_grid(9),
            uniform_points_per_dim: 3,
            geometric_levels: 3,
            random_triples: 50,
            seed: 7,
        }
    }

    /// Pure grid plan with explicit λ values and no random triples.
    pub fn grid_only(lambdas: Vec<f64>, uniform_points_per_dim: usize) -> Self {
        SamplingPlan {
            lambdas,
            uniform_points_per_dim,
            geometric_levels: 0,
            random_triples: 0,
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_random_triples(mut self, n: usize) -> Self {
        self.random_triples = n;
        self
    }

    fn axis_budget(&self, n: usize) -> (usize, usize) {
        match n {
            0 | 1 => (self.uniform_points_per_dim, self.geometric_levels),
            2 => (
                self.uniform_points_per_dim / 2 + 1,
                self.geometric_levels / 2,
            ),
            _ => (self.uniform_points_per_dim.min(3), self.geometric_levels.min(1)),
        }
    }

    /// Per-axis grid: uniform points across [lo, hi] plus center ± hw·2⁻ⁱ⁺¹.
    fn axis_points(&self, lo: f64, hi: f64, n: usize) -> Vec<f64> {
        let (uniform, levels) = self.axis_budget(n);
        let mut pts = Vec::new();
        if uniform == 1 {
            pts.push(0.5 * (lo + hi));
        } else if uniform > 1 {
            for i in 0..uniform {
                pts.push(lo + (hi - lo) * i as f64 / (uniform - 1) as f64);
            }
        }
        let center = 0.5 * (lo + hi);
        let hw = 0.5 * (hi - lo);
        if levels > 0 {
            pts.push(center);
            for j in 1..=levels {
                let r = hw * 2f64.powi(-(j as i32 + 1));
                pts.push(center - r);
                pts.push(center + r);
            }
        }
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        pts.dedup();
        pts
    }

    /// Cross product of the per-axis grids, deterministically thinned so the
    /// grid never exceeds 300 vectors regardless of dimension.
    pub fn grid_points(&self, domain: &DomainBox) -> Vec<Vector> {
        let n = domain.dim();
        let axes: Vec<Vec<f64>> = (0..n)
            .map(|i| self.axis_points(domain.lo[i], domain.hi[i], n))
            .collect();
        let total: usize = axes.iter().map(|a| a.len()).product();
        if total == 0 {
            return Vec::new();
        }
        let mut points = Vec::with_capacity(total.min(MAX_GRID_POINTS));
        let mut idx = vec![0usize; n];
        let stride = total.div_ceil(MAX_GRID_POINTS).max(1);
        let mut counter = 0usize;
        loop {
            if counter.is_multiple_of(stride) {
                points.push(Vector(
                    idx.iter().enumerate().map(|(d, &i)| axes[d][i]).collect(),
                ));
            }
            counter += 1;
            // odometer increment
            let mut d = 0;
            loop {
                if d == n {
                    return points;
                }
                idx[d] += 1;
                if idx[d] < axes[d].len() {
                    break;
                }
                idx[d] = 0;
                d += 1;
            }
        }
    }

    /// Visit every sample triple: all grid pairs crossed with the λ grid,
    /// then the seeded random triples. Deterministic for a fixed plan.
    pub fn for_each_triple<F>(&self, domain: &DomainBox, mut visit: F) -> Result<()>
    where
        F: FnMut(&SampleTriple) -> Result<()>,
    {
        let grid = self.grid_points(domain);
        for x1 in &grid {
            for x2 in &grid {
                for &lambda in &self.lambdas {
                    visit(&SampleTriple {
                        x1: x1.clone(),
                        x2: x2.clone(),
                        lambda,
                    })?;
                }
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let n = domain.dim();
        for _ in 0..self.random_triples {
            let x1 = Vector(
                (0..n)
                    .map(|i| rng.gen_range(domain.lo[i]..=domain.hi[i]))
                    .collect(),
            );
            // half the triples pick x2 independently; the other half place it
            // at a log-uniform separation from x1 to probe small scales
            let x2 = if rng.gen::<f64>() < 0.5 {
                Vector(
                    (0..n)
                        .map(|i| rng.gen_range(domain.lo[i]..=domain.hi[i]))
                        .collect(),
                )
            } else {
                let scale = 10f64.powf(rng.gen_range(-3.0..0.5));
                let offset: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
                Vector(
                    (0..n)
                        .map(|i| {
                            (x1[i] + scale * offset[i]).clamp(domain.lo[i], domain.hi[i])
                        })
                        .collect(),
                )
            };
            let lambda = rng.gen_range(0.0..=1.0);
            visit(&SampleTriple { x1, x2, lambda })?;
        }
        Ok(())
    }

    /// Grid triples only (no randomness), handy for exact regression values.
    pub fn grid_triple_count(&self, domain: &DomainBox) -> usize {
        let g = self.grid_points(domain).len();
        g * g * self.lambdas.len()
    }
}

impl Default for SamplingPlan {
    fn default() -> Self {
        Self::default_plan()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_box(n: usize) -> DomainBox {
        DomainBox::symmetric(2.0, n).unwrap()
    }

    #[test]
    fn default_lambda_grid_shape() {
        let plan = SamplingPlan::default_plan();
        assert_eq!(plan.lambdas.len(), 21);
        assert_eq!(plan.lambdas[0], 0.0);
        assert_eq!(*plan.lambdas.last().unwrap(), 1.0);
        assert!((plan.lambdas[1] - 0.05).abs() < 1e-15);
        assert!((plan.lambdas[19] - 0.95).abs() < 1e-15);
    }

    #[test]
    fn axis_grid_contains_small_separations() {
        // the geometric cluster must reach separations below 0.005 so that
        // scale-sensitive defects are caught deterministically
        let plan = SamplingPlan::default_plan();
        let pts = plan.axis_points(-2.0, 2.0, 1);
        let min_pos = pts
            .iter()
            .filter(|p| **p > 0.0)
            .fold(f64::INFINITY, |m, &p| m.min(p));
        assert!(min_pos < 0.0025, "finest positive grid point {min_pos}");
        assert!(pts.contains(&0.0));
        assert!(pts.contains(&-2.0) && pts.contains(&2.0));
    }

    #[test]
    fn grid_point_count_is_capped() {
        let plan = SamplingPlan::default_plan();
        for n in 1..=4 {
            let pts = plan.grid_points(&unit_box(n));
            assert!(!pts.is_empty());
            assert!(pts.len() <= MAX_GRID_POINTS, "n={n}: {}", pts.len());
        }
    }

    #[test]
    fn triples_are_deterministic() {
        let plan = SamplingPlan::default_plan().with_random_triples(50);
        let collect = || {
            let mut v = Vec::new();
            plan.for_each_triple(&unit_box(1), |t| {
                v.push((t.x1[0], t.x2[0], t.lambda));
                Ok(())
            })
            .unwrap();
            v
        };
        assert_eq!(collect(), collect());
    }

    #[test]
    fn triples_stay_in_box() {
        let plan = SamplingPlan::default_plan();
        let b = unit_box(2);
        plan.for_each_triple(&b, |t| {
            assert!(b.contains(&t.x1) && b.contains(&t.x2));
            assert!((0.0..=1.0).contains(&t.lambda));
            Ok(())
        })
        .unwrap();
    }
}

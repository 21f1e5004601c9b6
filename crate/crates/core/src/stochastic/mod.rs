//! Brownian motion on the Lie algebra, the group Brownian motion, heat-kernel
//! Monte Carlo and iterated Itô integrals.
//!
//! Every complex coordinate increment over a step of length `Δt` has
//! independent real and imaginary parts of variance `Δt/2`, so `E|ΔZ|² = Δt`
//! and `E[ΔZ²] = 0`. Paths are drawn from per-path counter streams and all
//! reductions run sequentially over per-path values in path order, so the
//! estimates do not depend on the number of worker threads.

mod chaos;
mod mc;
mod path;
mod rng;

pub use chaos::{
    chaos_eval, chaos_residual, chaos_residual_levels, iterated_integrals, ChaosEvaluator,
    DenseTensor,
};
pub use mc::{
    gaussian_moment_check, group_path_refinement_error, heat_mc, heat_mc_fn, heat_mc_many, martingale_check,
    skeleton_mc, skeleton_mc_many, MomentLine, MomentReport,
};
pub use path::{group_path, sample_path, sample_path_with_steps, BrownianPath, GroupPath};
pub use rng::PathRng;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MCParams {
    #[serde(rename = "T")]
    pub t: f64,
    pub steps: usize,
    pub paths: usize,
    pub seed: u64,
}

impl MCParams {
    pub fn new(t: f64, steps: usize, paths: usize, seed: u64) -> Result<Self> {
        let p = Self {
            t,
            steps,
            paths,
            seed,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t > 0.0 && self.t.is_finite()) {
            return Err(Error::InvalidParameter(format!("T must be positive, got {}", self.t)));
        }
        if self.steps == 0 || self.paths == 0 {
            return Err(Error::InvalidParameter("steps and paths must be positive".into()));
        }
        Ok(())
    }

    pub fn dt(&self) -> f64 {
        self.t / self.steps as f64
    }

    pub fn with_steps(&self, steps: usize) -> Self {
        Self { steps, ..*self }
    }

    pub fn with_paths(&self, paths: usize) -> Self {
        Self { paths, ..*self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MCEstimate {
    pub mean: Complex64,
    pub stderr: f64,
    pub paths: usize,
}

impl MCEstimate {
    /// Sample mean and `sample std / √n` with compensated summation.
    pub fn from_samples(samples: &[Complex64]) -> Self {
        let n = samples.len();
        let mut sum = KahanSum::default();
        for &x in samples {
            sum.add(x);
        }
        let mean = sum.value() / n.max(1) as f64;
        let mut sq = KahanSum::default();
        for &x in samples {
            sq.add(Complex64::new((x - mean).norm_sqr(), 0.0));
        }
        let var = if n > 1 { sq.value().re / (n - 1) as f64 } else { 0.0 };
        Self {
            mean,
            stderr: (var / n.max(1) as f64).sqrt(),
            paths: n,
        }
    }

    pub fn from_real_samples(samples: &[f64]) -> Self {
        let c: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::from_samples(&c)
    }

    /// `|mean − target| ≤ sigmas · stderr`.
    pub fn within(&self, target: Complex64, sigmas: f64) -> bool {
        (self.mean - target).norm() <= sigmas * self.stderr
    }

    /// Distance to `target` in units of standard error.
    pub fn z_score(&self, target: Complex64) -> f64 {
        let dev = (self.mean - target).norm();
        if dev == 0.0 {
            0.0
        } else {
            dev / self.stderr
        }
    }
}

/// Compensated complex summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: Complex64,
    comp: Complex64,
}

impl KahanSum {
    pub fn add(&mut self, x: Complex64) {
        let y = x - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> Complex64 {
        self.sum
    }
}

/// Evaluates `f(path_index)` for every path in parallel and returns the
/// values in path order.
pub(crate) fn map_paths<T, F>(paths: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    (0..paths as u64).into_par_iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn estimate_of_constant_samples() {
        let est = MCEstimate::from_samples(&vec![Complex64::new(1.0, 0.0); 100]);
        assert_eq!(est.mean, Complex64::new(1.0, 0.0));
        assert_eq!(est.stderr, 0.0);
        assert_eq!(est.paths, 100);
    }

    #[test]
    fn stderr_formula() {
        let est = MCEstimate::from_real_samples(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(est.mean.re, 2.5);
        let var = (2.25 + 0.25 + 0.25 + 2.25) / 3.0;
        assert!((est.stderr - (var / 4.0_f64).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn params_validation() {
        assert!(MCParams::new(0.0, 10, 10, 1).is_err());
        assert!(MCParams::new(1.0, 0, 10, 1).is_err());
        assert!(MCParams::new(1.0, 10, 0, 1).is_err());
        assert_eq!(MCParams::new(2.0, 8, 1, 0).unwrap().dt(), 0.25);
    }
}

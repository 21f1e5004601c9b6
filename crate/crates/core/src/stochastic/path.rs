use num_complex::Complex64;

use super::{MCParams, PathRng};
use crate::algebra::{GroupConfig, GroupElement};
use crate::error::{Error, Result};

/// Discretized Brownian motion `b = (B, B_0)` on a uniform grid, stored as
/// increments. Row `i` holds `Δb_i = b(t_{i+1}) − b(t_i)` in basis order
/// `(e_1..e_k, f_1..f_d)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BrownianPath {
    k: usize,
    d: usize,
    dt: f64,
    increments: Vec<Complex64>,
}

impl BrownianPath {
    pub fn from_increments(k: usize, d: usize, dt: f64, increments: Vec<Complex64>) -> Result<Self> {
        if increments.len() % (k + d) != 0 {
            return Err(Error::Dimension {
                what: "increments",
                expected: k + d,
                got: increments.len() % (k + d),
            });
        }
        Ok(Self {
            k,
            d,
            dt,
            increments,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn dim(&self) -> usize {
        self.k + self.d
    }

    pub fn steps(&self) -> usize {
        self.increments.len() / self.dim()
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn horizon(&self) -> f64 {
        self.dt * self.steps() as f64
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.steps()).map(move |i| i as f64 * self.dt)
    }

    #[inline]
    pub fn increment(&self, i: usize) -> &[Complex64] {
        let n = self.dim();
        &self.increments[i * n..(i + 1) * n]
    }

    /// `b(t_i)` for `i = 0..=steps`, starting at zero.
    pub fn values(&self) -> Vec<GroupElement> {
        let mut cur = GroupElement::zero(self.k, self.d);
        let mut out = Vec::with_capacity(self.steps() + 1);
        out.push(cur.clone());
        for i in 0..self.steps() {
            let inc = self.increment(i);
            for j in 0..self.k {
                cur.w[j] += inc[j];
            }
            for m in 0..self.d {
                cur.c[m] += inc[self.k + m];
            }
            out.push(cur.clone());
        }
        out
    }

    pub fn terminal(&self) -> GroupElement {
        let mut cur = GroupElement::zero(self.k, self.d);
        for i in 0..self.steps() {
            let inc = self.increment(i);
            for j in 0..self.k {
                cur.w[j] += inc[j];
            }
            for m in 0..self.d {
                cur.c[m] += inc[self.k + m];
            }
        }
        cur
    }

    /// Path on the grid with spacing `factor·Δt`, obtained by summing blocks
    /// of `factor` consecutive increments.
    pub fn coarsen(&self, factor: usize) -> Result<Self> {
        if factor == 0 || self.steps() % factor != 0 {
            return Err(Error::InvalidParameter(format!(
                "cannot coarsen {} steps by {factor}",
                self.steps()
            )));
        }
        let n = self.dim();
        let coarse_steps = self.steps() / factor;
        let mut inc = vec![Complex64::default(); coarse_steps * n];
        for i in 0..self.steps() {
            let row = &mut inc[(i / factor) * n..(i / factor + 1) * n];
            for (a, b) in row.iter_mut().zip(self.increment(i)) {
                *a += b;
            }
        }
        Ok(Self {
            k: self.k,
            d: self.d,
            dt: self.dt * factor as f64,
            increments: inc,
        })
    }

    /// `g(T)` by the left-point Itô sum, without storing the path.
    pub fn terminal_group(&self, cfg: &GroupConfig) -> GroupElement {
        let (k, d) = (self.k, self.d);
        let mut g = GroupElement::zero(k, d);
        let mut area = vec![Complex64::default(); d];
        for i in 0..self.steps() {
            let inc = self.increment(i);
            cfg.omega_into(&g.w, &inc[..k], &mut area);
            for m in 0..d {
                g.c[m] += inc[k + m] + 0.5 * area[m];
            }
            for j in 0..k {
                g.w[j] += inc[j];
            }
        }
        g
    }
}

/// Samples path `path_index` at `params.steps` resolution.
pub fn sample_path(cfg: &GroupConfig, params: &MCParams, path_index: u64) -> BrownianPath {
    sample_path_with_steps(cfg, params.t, params.steps, params.seed, path_index)
}

pub fn sample_path_with_steps(
    cfg: &GroupConfig,
    t: f64,
    steps: usize,
    seed: u64,
    path_index: u64,
) -> BrownianPath {
    let n = cfg.basis_len();
    let dt = t / steps as f64;
    let mut rng = PathRng::new(seed, path_index);
    let increments = (0..steps * n)
        .map(|_| rng.complex_gaussian(dt / 2.0))
        .collect();
    BrownianPath {
        k: cfg.k(),
        d: cfg.d(),
        dt,
        increments,
    }
}

/// Group Brownian motion `g(t_i)` on the grid of `b`.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupPath {
    pub points: Vec<GroupElement>,
}

impl GroupPath {
    pub fn terminal(&self) -> &GroupElement {
        self.points.last().expect("path has at least one point")
    }
}

/// `g = (B, B_0 + ½ Σ ω(B(t_i), ΔB_i))` with the left-point Itô sum.
pub fn group_path(b: &BrownianPath, cfg: &GroupConfig) -> GroupPath {
    let (k, d) = (b.k, b.d);
    let mut g = GroupElement::zero(k, d);
    let mut area = vec![Complex64::default(); d];
    let mut points = Vec::with_capacity(b.steps() + 1);
    points.push(g.clone());
    for i in 0..b.steps() {
        let inc = b.increment(i);
        cfg.omega_into(&g.w, &inc[..k], &mut area);
        for m in 0..d {
            g.c[m] += inc[k + m] + 0.5 * area[m];
        }
        for j in 0..k {
            g.w[j] += inc[j];
        }
        points.push(g.clone());
    }
    GroupPath { points }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stochastic::MCEstimate;

    #[test]
    fn path_starts_at_zero_and_coarsens() {
        let cfg = GroupConfig::heisenberg();
        let params = MCParams::new(1.0, 16, 1, 5).unwrap();
        let b = sample_path(&cfg, &params, 0);
        assert!(b.values()[0].is_identity());
        assert_eq!(b.steps(), 16);
        let coarse = b.coarsen(4).unwrap();
        assert_eq!(coarse.steps(), 4);
        assert!(coarse.terminal().max_abs_diff(&b.terminal()) < 1e-14);
        assert!(b.coarsen(3).is_err());
    }

    #[test]
    fn group_path_matches_brownian_w_and_terminal() {
        let cfg = GroupConfig::heisenberg();
        let params = MCParams::new(1.0, 64, 1, 9).unwrap();
        let b = sample_path(&cfg, &params, 3);
        let g = group_path(&b, &cfg);
        assert!(g.points[0].is_identity());
        for (gp, bp) in g.points.iter().zip(b.values()) {
            assert_eq!(gp.w, bp.w);
        }
        assert_eq!(g.terminal(), &b.terminal_group(&cfg));
    }

    #[test]
    fn commutative_group_path_is_the_brownian_path() {
        let cfg = GroupConfig::commutative(2, 1);
        let params = MCParams::new(1.0, 32, 1, 2).unwrap();
        let b = sample_path(&cfg, &params, 0);
        assert_eq!(group_path(&b, &cfg).points, b.values());
    }

    #[test]
    fn brownian_normalization() {
        let cfg = GroupConfig::heisenberg();
        let params = MCParams::new(1.0, 4, 100_000, 17).unwrap();
        let ends: Vec<GroupElement> = (0..params.paths as u64)
            .map(|i| sample_path(&cfg, &params, i).terminal())
            .collect();
        let sq: Vec<f64> = ends.iter().map(|g| g.w[0].norm_sqr()).collect();
        let est = MCEstimate::from_real_samples(&sq);
        assert!(est.within(Complex64::new(1.0, 0.0), 3.0), "{est:?}");
        let mean: Vec<Complex64> = ends.iter().map(|g| g.w[0]).collect();
        assert!(MCEstimate::from_samples(&mean).within(Complex64::default(), 3.0));
        let cross: Vec<Complex64> = ends.iter().map(|g| g.w[0] * g.c[0].conj()).collect();
        assert!(MCEstimate::from_samples(&cross).within(Complex64::default(), 3.0));
        let pseudo: Vec<Complex64> = ends.iter().map(|g| g.w[1] * g.w[1]).collect();
        assert!(MCEstimate::from_samples(&pseudo).within(Complex64::default(), 3.0));
    }
}

//! Iterated Itô integrals `M_n(t) = ∫ M_{n−1}(s) ⊗ db(s)` and the chaos
//! realization `α ↦ Σ_n ⟨α_n, M_n(T)⟩`.
//!
//! In a product `Δb_{i_1}[I_1] ⋯ Δb_{i_n}[I_n]` with `i_1 < … < i_n` the first
//! tensor factor carries the earliest increment.

use num_complex::Complex64;

use super::{map_paths, sample_path, sample_path_with_steps, BrownianPath, MCEstimate, MCParams};
use crate::algebra::GroupConfig;
use crate::error::{Error, Result};
use crate::fock::{taylor, FockTensor};
use crate::poly::Polynomial;

/// Dense rank-`n` tensor over a basis of size `dim`, row-major with the first
/// factor most significant.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseTensor {
    pub dim: usize,
    pub rank: usize,
    pub data: Vec<Complex64>,
}

impl DenseTensor {
    pub fn zeros(dim: usize, rank: usize) -> Self {
        Self {
            dim,
            rank,
            data: vec![Complex64::default(); dim.pow(rank as u32)],
        }
    }

    pub fn flat_index(&self, index: &[usize]) -> usize {
        index.iter().fold(0, |acc, &i| acc * self.dim + i)
    }

    pub fn get(&self, index: &[usize]) -> Complex64 {
        self.data[self.flat_index(index)]
    }

    /// `⟨α_n, M⟩ = Σ_I α_n(I) M[I]` for the rank of this tensor.
    pub fn pair(&self, alpha: &FockTensor) -> Complex64 {
        alpha
            .rank(self.rank)
            .map(|r| r.iter().map(|(idx, a)| a * self.get(idx)).sum())
            .unwrap_or_default()
    }
}

/// `M_1(T), …, M_nmax(T)` by the left-point recursion
/// `M_n(t_{i+1}) = M_n(t_i) + M_{n−1}(t_i) ⊗ Δb_i`.
pub fn iterated_integrals(b: &BrownianPath, nmax: usize) -> Result<Vec<DenseTensor>> {
    if nmax == 0 {
        return Err(Error::InvalidParameter("nmax must be at least 1".into()));
    }
    let dim = b.dim();
    let mut m: Vec<DenseTensor> = (0..=nmax).map(|n| DenseTensor::zeros(dim, n)).collect();
    m[0].data[0] = Complex64::new(1.0, 0.0);
    for i in 0..b.steps() {
        let inc = b.increment(i);
        for n in (1..=nmax).rev() {
            let (lower, upper) = m.split_at_mut(n);
            let prev = &lower[n - 1].data;
            let cur = &mut upper[0].data;
            for (p, &pv) in prev.iter().enumerate() {
                if pv == Complex64::default() {
                    continue;
                }
                let row = &mut cur[p * dim..(p + 1) * dim];
                for (slot, &db) in row.iter_mut().zip(inc) {
                    *slot += pv * db;
                }
            }
        }
    }
    m.remove(0);
    Ok(m)
}

/// Evaluates `Σ_n ⟨α_n, M_n(T)⟩` by tracking only the iterated integrals
/// indexed by prefixes of tuples in the support of `α`.
#[derive(Debug, Clone)]
pub struct ChaosEvaluator {
    scalar: Complex64,
    // prefixes sorted by decreasing length; parent == usize::MAX means the root M_0 = 1
    parent: Vec<usize>,
    last: Vec<usize>,
    weight: Vec<Complex64>,
}

impl ChaosEvaluator {
    pub fn new(alpha: &FockTensor) -> Self {
        use std::collections::BTreeMap;
        let mut prefixes: BTreeMap<Vec<usize>, Complex64> = BTreeMap::new();
        for (idx, v) in alpha.entries() {
            if idx.is_empty() {
                continue;
            }
            for len in 1..=idx.len() {
                prefixes.entry(idx[..len].to_vec()).or_default();
            }
            *prefixes.get_mut(idx).unwrap() += v;
        }
        let mut order: Vec<Vec<usize>> = prefixes.keys().cloned().collect();
        order.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        let position: BTreeMap<&Vec<usize>, usize> =
            order.iter().enumerate().map(|(i, p)| (p, i)).collect();
        let parent = order
            .iter()
            .map(|p| {
                if p.len() == 1 {
                    usize::MAX
                } else {
                    position[&p[..p.len() - 1].to_vec()]
                }
            })
            .collect();
        let last = order.iter().map(|p| *p.last().unwrap()).collect();
        let weight = order.iter().map(|p| prefixes[p]).collect();
        Self {
            scalar: alpha.scalar(),
            parent,
            last,
            weight,
        }
    }

    pub fn eval(&self, b: &BrownianPath) -> Complex64 {
        let mut value = vec![Complex64::default(); self.parent.len()];
        let one = Complex64::new(1.0, 0.0);
        for i in 0..b.steps() {
            let inc = b.increment(i);
            // longer prefixes first so each update reads the parent's value at t_i
            for p in 0..value.len() {
                let pv = match self.parent[p] {
                    usize::MAX => one,
                    q => value[q],
                };
                value[p] += pv * inc[self.last[p]];
            }
        }
        self.scalar
            + value
                .iter()
                .zip(&self.weight)
                .map(|(v, w)| v * w)
                .sum::<Complex64>()
    }
}

/// `Σ_n ⟨α_n, M_n(T)⟩` on the given path.
pub fn chaos_eval(alpha: &FockTensor, b: &BrownianPath) -> Complex64 {
    ChaosEvaluator::new(alpha).eval(b)
}

/// MC estimate of `E|f(g(T)) − Σ_n ⟨α_n, M_n(T)⟩|²` with `α = taylor(f)`,
/// both evaluated on the same path.
pub fn chaos_residual(f: &Polynomial, cfg: &GroupConfig, params: &MCParams) -> Result<MCEstimate> {
    params.validate()?;
    let alpha = taylor(f, cfg, f.graded_degree())?;
    let eval = ChaosEvaluator::new(&alpha);
    let samples = map_paths(params.paths, |i| {
        let b = sample_path(cfg, params, i);
        let exact = f.eval(&b.terminal_group(cfg));
        (exact - eval.eval(&b)).norm_sqr()
    });
    Ok(MCEstimate::from_real_samples(&samples))
}

/// Residuals at several resolutions from nested paths: each path is sampled
/// once at the finest level and coarsened. Every level must divide the finest.
pub fn chaos_residual_levels(
    f: &Polynomial,
    cfg: &GroupConfig,
    t: f64,
    paths: usize,
    seed: u64,
    levels: &[usize],
) -> Result<Vec<MCEstimate>> {
    let finest = *levels
        .iter()
        .max()
        .ok_or_else(|| Error::InvalidParameter("no levels".into()))?;
    if levels.iter().any(|&s| s == 0 || finest % s != 0) {
        return Err(Error::InvalidParameter(
            "every level must divide the finest level".into(),
        ));
    }
    MCParams::new(t, finest, paths, seed)?;
    let alpha = taylor(f, cfg, f.graded_degree())?;
    let eval = ChaosEvaluator::new(&alpha);
    let per_path: Vec<Vec<f64>> = map_paths(paths, |i| {
        let fine = sample_path_with_steps(cfg, t, finest, seed, i);
        levels
            .iter()
            .map(|&s| {
                let b = fine.coarsen(finest / s).expect("divides");
                (f.eval(&b.terminal_group(cfg)) - eval.eval(&b)).norm_sqr()
            })
            .collect()
    });
    Ok((0..levels.len())
        .map(|l| {
            let col: Vec<f64> = per_path.iter().map(|row| row[l]).collect();
            MCEstimate::from_real_samples(&col)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_polynomial;

    #[test]
    fn first_integral_is_the_path() {
        let cfg = GroupConfig::random_skew(2, 2, &mut <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(1));
        let params = MCParams::new(1.0, 50, 1, 3).unwrap();
        let b = sample_path(&cfg, &params, 0);
        let m = iterated_integrals(&b, 3).unwrap();
        let end = b.terminal();
        for j in 0..cfg.basis_len() {
            assert!((m[0].get(&[j]) - end.coord(j)).norm() < 1e-13);
        }
        assert!(iterated_integrals(&b, 0).is_err());
    }

    #[test]
    fn second_integral_is_left_point_sum() {
        let cfg = GroupConfig::heisenberg();
        let params = MCParams::new(1.0, 40, 1, 8).unwrap();
        let b = sample_path(&cfg, &params, 2);
        let m = iterated_integrals(&b, 2).unwrap();
        let vals = b.values();
        for (p, q) in [(0, 0), (0, 1), (2, 1)] {
            let direct: Complex64 = (0..b.steps())
                .map(|i| vals[i].coord(p) * b.increment(i)[q])
                .sum();
            assert!((m[1].get(&[p, q]) - direct).norm() < 1e-13);
        }
    }

    #[test]
    fn chaos_of_linear_and_centre() {
        let cfg = GroupConfig::heisenberg();
        let params = MCParams::new(1.0, 128, 1, 4).unwrap();
        let b = sample_path(&cfg, &params, 0);
        let w1 = taylor(&parse_polynomial("w1", 2, 1).unwrap(), &cfg, 1).unwrap();
        assert!((chaos_eval(&w1, &b) - b.terminal().w[0]).norm() < 1e-14);
        // for c1 the rank-2 pairing reproduces the left-point area sum exactly
        let c1 = taylor(&parse_polynomial("c1", 2, 1).unwrap(), &cfg, 2).unwrap();
        assert!((chaos_eval(&c1, &b) - b.terminal_group(&cfg).c[0]).norm() < 1e-13);
    }

    #[test]
    fn sparse_evaluator_agrees_with_dense_integrals() {
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(5);
        let cfg = GroupConfig::random_skew(2, 1, &mut rng);
        let params = MCParams::new(0.7, 30, 1, 6).unwrap();
        let b = sample_path(&cfg, &params, 1);
        let f = Polynomial::random_holomorphic(2, 1, 3, 5, &mut rng);
        let alpha = taylor(&f, &cfg, 3).unwrap();
        let m = iterated_integrals(&b, 3).unwrap();
        let dense = alpha.scalar() + m.iter().map(|t| t.pair(&alpha)).sum::<Complex64>();
        assert!((dense - chaos_eval(&alpha, &b)).norm() < 1e-12);
    }

    #[test]
    fn linear_residual_is_zero() {
        let cfg = GroupConfig::heisenberg();
        let params = MCParams::new(1.0, 32, 200, 1).unwrap();
        let f = parse_polynomial("w1 + 2*c1", 2, 1).unwrap();
        let r = chaos_residual(&f, &cfg, &params).unwrap();
        assert!(r.mean.re < 1e-24);
    }
}

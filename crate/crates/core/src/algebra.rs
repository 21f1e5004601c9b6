//! Group and Lie-algebra arithmetic for `G = ℂᵏ × ℂᵈ` with the product
//! `(w, c)·(w', c') = (w + w', c + c' + ½ω(w, w'))`.
//!
//! The skew form is stored as `d` complex `k×k` matrices `Ω_m` with
//! `ω(w, w')_m = wᵀ Ω_m w'`. The same `(w, c)` carrier is used for group
//! elements and for Lie-algebra elements.

use std::ops::{Add, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_NORM_RESTARTS: usize = 32;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Structural data of a Heisenberg-type group: dimensions and the skew form.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupConfig {
    k: usize,
    d: usize,
    // omega[m * k * k + i * k + j] = (Ω_m)_{ij}
    omega: Vec<Complex64>,
}

impl GroupConfig {
    /// Builds a configuration from `d` matrices of size `k×k`, rejecting any
    /// matrix that is not exactly skew-symmetric.
    pub fn new(k: usize, d: usize, omega: Vec<Vec<Vec<Complex64>>>) -> Result<Self> {
        if k == 0 || d == 0 {
            return Err(Error::Config("k and d must be positive".into()));
        }
        if omega.len() != d {
            return Err(Error::Config(format!(
                "omega must hold d = {d} matrices, found {}",
                omega.len()
            )));
        }
        let mut flat = Vec::with_capacity(d * k * k);
        for (m, mat) in omega.iter().enumerate() {
            if mat.len() != k || mat.iter().any(|row| row.len() != k) {
                return Err(Error::Config(format!("omega[{m}] must be {k}x{k}")));
            }
            for row in mat {
                flat.extend_from_slice(row);
            }
        }
        let cfg = Self { k, d, omega: flat };
        cfg.check_skew()?;
        Ok(cfg)
    }

    fn check_skew(&self) -> Result<()> {
        for m in 0..self.d {
            for i in 0..self.k {
                for j in 0..self.k {
                    if self.omega_entry(m, i, j) != -self.omega_entry(m, j, i) {
                        return Err(Error::Config(format!(
                            "omega[{m}] is not skew-symmetric at ({i},{j})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// HEIS(2,1): `k = 2`, `d = 1`, `Ω = [[0,1],[-1,0]]`.
    pub fn heisenberg() -> Self {
        Self::block_diagonal(&[1.0])
    }

    /// `k = 2·scales.len()`, `d = 1`, with `Ω` block diagonal in `[[0,s],[-s,0]]` blocks.
    pub fn block_diagonal(scales: &[f64]) -> Self {
        let k = 2 * scales.len();
        let mut omega = vec![ZERO; k * k];
        for (b, &s) in scales.iter().enumerate() {
            omega[(2 * b) * k + 2 * b + 1] = Complex64::new(s, 0.0);
            omega[(2 * b + 1) * k + 2 * b] = Complex64::new(-s, 0.0);
        }
        Self { k, d: 1, omega }
    }

    /// ω ≡ 0; the group is then abelian.
    pub fn commutative(k: usize, d: usize) -> Self {
        Self {
            k,
            d,
            omega: vec![ZERO; d * k * k],
        }
    }

    /// Skew form with independent standard complex Gaussian entries above the diagonal.
    pub fn random_skew<R: Rng + ?Sized>(k: usize, d: usize, rng: &mut R) -> Self {
        let mut omega = vec![ZERO; d * k * k];
        for m in 0..d {
            for i in 0..k {
                for j in (i + 1)..k {
                    let z = Complex64::new(
                        rng.random::<f64>() * 2.0 - 1.0,
                        rng.random::<f64>() * 2.0 - 1.0,
                    );
                    omega[m * k * k + i * k + j] = z;
                    omega[m * k * k + j * k + i] = -z;
                }
            }
        }
        Self { k, d, omega }
    }

    /// Same structure with every `Ω_m` multiplied by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        Self {
            k: self.k,
            d: self.d,
            omega: self.omega.iter().map(|z| z * s).collect(),
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Number of basis directions `(e_j, 0)` and `(0, f_m)` of the Lie algebra.
    pub fn basis_len(&self) -> usize {
        self.k + self.d
    }

    #[inline]
    pub fn omega_entry(&self, m: usize, i: usize, j: usize) -> Complex64 {
        self.omega[m * self.k * self.k + i * self.k + j]
    }

    /// Nested `d × k × k` copy of the skew form.
    pub fn omega_matrices(&self) -> Vec<Vec<Vec<Complex64>>> {
        (0..self.d)
            .map(|m| {
                (0..self.k)
                    .map(|i| (0..self.k).map(|j| self.omega_entry(m, i, j)).collect())
                    .collect()
            })
            .collect()
    }

    /// `ω(w1, w2)` written into `out` (length `d`). No dimension checks.
    #[inline]
    pub fn omega_into(&self, w1: &[Complex64], w2: &[Complex64], out: &mut [Complex64]) {
        let k = self.k;
        for (m, o) in out.iter_mut().enumerate() {
            let base = m * k * k;
            let mut acc = ZERO;
            for i in 0..k {
                if w1[i] == ZERO {
                    continue;
                }
                let row = &self.omega[base + i * k..base + (i + 1) * k];
                let mut inner = ZERO;
                for j in 0..k {
                    inner += row[j] * w2[j];
                }
                acc += w1[i] * inner;
            }
            *o = acc;
        }
    }

    pub fn omega(&self, w1: &[Complex64], w2: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![ZERO; self.d];
        self.omega_into(w1, w2, &mut out);
        out
    }

    /// `Ω_m a`, i.e. the coefficient vector of the linear map `w ↦ ω_m(w, a)`.
    pub fn omega_apply(&self, m: usize, a: &[Complex64]) -> Vec<Complex64> {
        (0..self.k)
            .map(|i| (0..self.k).map(|j| self.omega_entry(m, i, j) * a[j]).sum())
            .collect()
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement::zero(self.k, self.d)
    }

    /// Basis direction `index` of the Lie algebra: `(e_j, 0)` for `index < k`,
    /// `(0, f_m)` otherwise.
    pub fn basis_element(&self, index: BasisIndex) -> GroupElement {
        let mut g = self.identity();
        if index.0 < self.k {
            g.w[index.0] = Complex64::new(1.0, 0.0);
        } else {
            g.c[index.0 - self.k] = Complex64::new(1.0, 0.0);
        }
        g
    }

    pub fn check(&self, g: &GroupElement) -> Result<()> {
        if g.w.len() != self.k {
            return Err(Error::Dimension {
                what: "w",
                expected: self.k,
                got: g.w.len(),
            });
        }
        if g.c.len() != self.d {
            return Err(Error::Dimension {
                what: "c",
                expected: self.d,
                got: g.c.len(),
            });
        }
        Ok(())
    }

    /// Group product `(w1 + w2, c1 + c2 + ½ω(w1, w2))`.
    pub fn mul(&self, g1: &GroupElement, g2: &GroupElement) -> Result<GroupElement> {
        self.check(g1)?;
        self.check(g2)?;
        Ok(self.mul_unchecked(g1, g2))
    }

    pub(crate) fn mul_unchecked(&self, g1: &GroupElement, g2: &GroupElement) -> GroupElement {
        let mut c = self.omega(&g1.w, &g2.w);
        for (m, cm) in c.iter_mut().enumerate() {
            *cm = g1.c[m] + g2.c[m] + 0.5 * *cm;
        }
        GroupElement {
            w: g1.w.iter().zip(&g2.w).map(|(a, b)| a + b).collect(),
            c,
        }
    }

    pub fn inv(&self, g: &GroupElement) -> GroupElement {
        -g.clone()
    }

    /// Lie bracket `[(A1, a1), (A2, a2)] = (0, ω(A1, A2))`.
    pub fn bracket(&self, h1: &GroupElement, h2: &GroupElement) -> Result<GroupElement> {
        self.check(h1)?;
        self.check(h2)?;
        Ok(GroupElement {
            w: vec![ZERO; self.k],
            c: self.omega(&h1.w, &h2.w),
        })
    }

    /// `sup{‖ω(w1, w2)‖ : ‖w1‖ = ‖w2‖ = 1}`.
    ///
    /// For `d = 1` this is the largest singular value of `Ω_1`. For `d > 1` the
    /// bilinear maximization is nonconvex; the value returned is the best one
    /// found by alternating maximization over `restarts` random starts, so it
    /// is a lower bound on the true supremum.
    pub fn omega_uniform_norm(&self, restarts: usize, seed: u64) -> f64 {
        if self.d == 1 {
            let m = DMatrix::from_fn(self.k, self.k, |i, j| self.omega_entry(0, i, j));
            return m.singular_values().max();
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut best = 0.0_f64;
        for _ in 0..restarts.max(1) {
            let mut w2 = random_unit(self.k, &mut rng);
            let mut value = 0.0_f64;
            for _ in 0..500 {
                // ω_m(w1, w2) = Σ_i w1_i (Ω_m w2)_i
                let a = DMatrix::from_fn(self.d, self.k, |m, i| {
                    (0..self.k)
                        .map(|j| self.omega_entry(m, i, j) * w2[j])
                        .sum::<Complex64>()
                });
                let w1 = top_right_singular(&a);
                // ω_m(w1, w2) = Σ_j (Ω_mᵀ w1)_j w2_j
                let b = DMatrix::from_fn(self.d, self.k, |m, j| {
                    (0..self.k)
                        .map(|i| w1[i] * self.omega_entry(m, i, j))
                        .sum::<Complex64>()
                });
                w2 = top_right_singular(&b);
                let next = norm(&self.omega(&w1, &w2));
                if next <= value * (1.0 + 1e-14) {
                    value = value.max(next);
                    break;
                }
                value = next;
            }
            best = best.max(value);
        }
        best
    }

    /// `k(ω) = −sup_{‖A‖=1} ‖ω(·, A)‖²`, i.e. minus the largest eigenvalue of
    /// `Σ_m Ω_m† Ω_m`.
    pub fn k_omega(&self) -> f64 {
        let k = self.k;
        let mut gram = DMatrix::<Complex64>::zeros(k, k);
        for m in 0..self.d {
            let om = DMatrix::from_fn(k, k, |i, j| self.omega_entry(m, i, j));
            gram += om.adjoint() * &om;
        }
        let lambda = gram
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(0.0_f64, f64::max);
        if lambda == 0.0 {
            0.0
        } else {
            -lambda
        }
    }

    /// Hilbert–Schmidt norm squared `Σ_m Σ_ij |(Ω_m)_ij|²`.
    pub fn omega_hs_norm_sq(&self) -> f64 {
        self.omega.iter().map(|z| z.norm_sqr()).sum()
    }
}

fn random_unit<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect();
    let s = norm(&v).max(f64::MIN_POSITIVE);
    v.into_iter().map(|z| z / s).collect()
}

fn top_right_singular(a: &DMatrix<Complex64>) -> Vec<Complex64> {
    // right singular vectors of A are eigenvectors of A†A
    let gram = a.adjoint() * a;
    let eig = gram.symmetric_eigen();
    let (idx, _) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, &l)| {
            if l > acc.1 {
                (i, l)
            } else {
                acc
            }
        });
    eig.eigenvectors.column(idx).iter().copied().collect()
}

pub(crate) fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// A point `(w, c)` of the group, or an element of its Lie algebra.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupElement {
    pub w: Vec<Complex64>,
    pub c: Vec<Complex64>,
}

pub type AlgebraElement = GroupElement;

impl GroupElement {
    pub fn new(w: Vec<Complex64>, c: Vec<Complex64>) -> Self {
        Self { w, c }
    }

    pub fn zero(k: usize, d: usize) -> Self {
        Self {
            w: vec![ZERO; k],
            c: vec![ZERO; d],
        }
    }

    pub fn from_real(w: &[f64], c: &[f64]) -> Self {
        Self {
            w: w.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
            c: c.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            w: self.w.iter().map(|z| z * s).collect(),
            c: self.c.iter().map(|z| z * s).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.w.iter().chain(&self.c).all(|z| *z == ZERO)
    }

    /// `‖w‖² + ‖c‖²`.
    pub fn norm_sq(&self) -> f64 {
        self.w.iter().chain(&self.c).map(|z| z.norm_sqr()).sum()
    }

    /// Coordinate `index` in the basis `(e_1..e_k, f_1..f_d)`.
    pub fn coord(&self, index: usize) -> Complex64 {
        if index < self.w.len() {
            self.w[index]
        } else {
            self.c[index - self.w.len()]
        }
    }

    /// `ρ²(w, c) = ‖w‖² + ‖c‖` (the centre enters at first power).
    pub fn rho_sq(&self) -> f64 {
        norm(&self.w).powi(2) + norm(&self.c)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.w
            .iter()
            .zip(&other.w)
            .chain(self.c.iter().zip(&other.c))
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl Add for GroupElement {
    type Output = GroupElement;
    fn add(self, rhs: Self) -> Self {
        Self {
            w: self.w.iter().zip(&rhs.w).map(|(a, b)| a + b).collect(),
            c: self.c.iter().zip(&rhs.c).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for GroupElement {
    type Output = GroupElement;
    fn sub(self, rhs: Self) -> Self {
        Self {
            w: self.w.iter().zip(&rhs.w).map(|(a, b)| a - b).collect(),
            c: self.c.iter().zip(&rhs.c).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for GroupElement {
    type Output = GroupElement;
    fn neg(self) -> Self {
        Self {
            w: self.w.into_iter().map(|z| -z).collect(),
            c: self.c.into_iter().map(|z| -z).collect(),
        }
    }
}

/// Index into the Lie-algebra basis: `[0, k)` are `(e_j, 0)`, `[k, k+d)` are `(0, f_m)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BasisIndex(usize);

impl BasisIndex {
    pub fn new(index: usize, cfg: &GroupConfig) -> Result<Self> {
        if index >= cfg.basis_len() {
            return Err(Error::Dimension {
                what: "basis index",
                expected: cfg.basis_len(),
                got: index,
            });
        }
        Ok(Self(index))
    }

    pub fn get(self) -> usize {
        self.0
    }

    pub fn is_central(self, cfg: &GroupConfig) -> bool {
        self.0 >= cfg.k()
    }
}

/// Config file representation: `omega` is a `d`-list of `k×k` arrays of `[re, im]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupConfigFile {
    pub k: Option<usize>,
    pub d: Option<usize>,
    pub omega: Option<Vec<Vec<Vec<[f64; 2]>>>>,
}

impl TryFrom<GroupConfigFile> for GroupConfig {
    type Error = Error;

    fn try_from(file: GroupConfigFile) -> Result<Self> {
        let k = file.k.ok_or_else(|| Error::Config("k required".into()))?;
        let d = file.d.ok_or_else(|| Error::Config("d required".into()))?;
        let omega = file
            .omega
            .ok_or_else(|| Error::Config("omega required".into()))?;
        let omega = omega
            .into_iter()
            .map(|mat| {
                mat.into_iter()
                    .map(|row| row.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
                    .collect()
            })
            .collect();
        GroupConfig::new(k, d, omega)
    }
}

impl From<&GroupConfig> for GroupConfigFile {
    fn from(cfg: &GroupConfig) -> Self {
        Self {
            k: Some(cfg.k),
            d: Some(cfg.d),
            omega: Some(
                cfg.omega_matrices()
                    .into_iter()
                    .map(|mat| {
                        mat.into_iter()
                            .map(|row| row.into_iter().map(|z| [z.re, z.im]).collect())
                            .collect()
                    })
                    .collect(),
            ),
        }
    }
}

impl Serialize for GroupConfig {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GroupConfigFile::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for GroupConfig {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let file = GroupConfigFile::deserialize(d)?;
        GroupConfig::try_from(file).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_element(rng: &mut ChaCha8Rng, k: usize, d: usize) -> GroupElement {
        let mut v = |n: usize| -> Vec<Complex64> {
            (0..n)
                .map(|_| c(rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0))
                .collect()
        };
        let w = v(k);
        let cc = v(d);
        GroupElement::new(w, cc)
    }

    #[test]
    fn heisenberg_products() {
        let cfg = GroupConfig::heisenberg();
        let e1 = GroupElement::from_real(&[1.0, 0.0], &[0.0]);
        let e2 = GroupElement::from_real(&[0.0, 1.0], &[0.0]);
        assert_eq!(
            cfg.mul(&e1, &e2).unwrap(),
            GroupElement::from_real(&[1.0, 1.0], &[0.5])
        );
        assert_eq!(
            cfg.mul(&e2, &e1).unwrap(),
            GroupElement::from_real(&[1.0, 1.0], &[-0.5])
        );
        let g = GroupElement::new(vec![c(0.3, 1.0), c(-2.0, 0.5)], vec![c(1.0, -1.0)]);
        assert_eq!(cfg.mul(&g, &cfg.identity()).unwrap(), g);
        assert_eq!(cfg.mul(&cfg.identity(), &g).unwrap(), g);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let cfg = GroupConfig::heisenberg();
        let bad = GroupElement::from_real(&[1.0], &[0.0]);
        assert!(matches!(
            cfg.mul(&bad, &cfg.identity()),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn inverse() {
        let cfg = GroupConfig::heisenberg();
        let g = GroupElement::from_real(&[1.0, 0.0], &[0.3]);
        assert_eq!(cfg.inv(&g), GroupElement::from_real(&[-1.0, 0.0], &[-0.3]));
        assert!(cfg.inv(&cfg.identity()).is_identity());
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let g = random_element(&mut rng, 2, 1);
            let e = cfg.mul(&g, &cfg.inv(&g)).unwrap();
            assert!(e.norm_sq() < 1e-28);
        }
    }

    #[test]
    fn bracket_values() {
        let cfg = GroupConfig::heisenberg();
        let e1 = GroupElement::from_real(&[1.0, 0.0], &[0.0]);
        let e2 = GroupElement::from_real(&[0.0, 1.0], &[0.0]);
        assert_eq!(
            cfg.bracket(&e1, &e2).unwrap(),
            GroupElement::from_real(&[0.0, 0.0], &[1.0])
        );
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let cfg = GroupConfig::random_skew(4, 2, &mut rng);
        for _ in 0..50 {
            let (h1, h2, h3) = (
                random_element(&mut rng, 4, 2),
                random_element(&mut rng, 4, 2),
                random_element(&mut rng, 4, 2),
            );
            assert!(cfg.bracket(&h1, &h1).unwrap().norm_sq() < 1e-28);
            let inner = cfg.bracket(&h1, &h2).unwrap();
            assert!(cfg.bracket(&inner, &h3).unwrap().is_identity());
            let jac = cfg.bracket(&h2, &h3).unwrap();
            assert!(cfg.bracket(&h1, &jac).unwrap().is_identity());
        }
    }

    #[test]
    fn group_axioms_on_random_triples() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let cfg = GroupConfig::random_skew(3, 2, &mut rng);
        for _ in 0..1000 {
            let g1 = random_element(&mut rng, 3, 2);
            let g2 = random_element(&mut rng, 3, 2);
            let g3 = random_element(&mut rng, 3, 2);
            let left = cfg.mul(&cfg.mul(&g1, &g2).unwrap(), &g3).unwrap();
            let right = cfg.mul(&g1, &cfg.mul(&g2, &g3).unwrap()).unwrap();
            assert!(left.max_abs_diff(&right) < 1e-13);

            let prod = cfg.mul(&g1, &g2).unwrap();
            let half_bracket = cfg.bracket(&g1, &g2).unwrap().scale(c(0.5, 0.0));
            let lhs = prod - (g1.clone() + g2.clone());
            assert!(lhs.max_abs_diff(&half_bracket) < 1e-14);
        }
    }

    #[test]
    fn omega_skew_sampling() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let cfg = GroupConfig::random_skew(5, 3, &mut rng);
        for _ in 0..100 {
            let a = random_element(&mut rng, 5, 3);
            let b = random_element(&mut rng, 5, 3);
            let x = cfg.omega(&a.w, &b.w);
            let y = cfg.omega(&b.w, &a.w);
            for (p, q) in x.iter().zip(&y) {
                assert!((p + q).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn skewness_is_validated() {
        let bad = vec![vec![
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 0.0)],
        ]];
        assert!(matches!(GroupConfig::new(2, 1, bad), Err(Error::Config(_))));
        let diag = vec![vec![
            vec![c(1.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 0.0)],
        ]];
        assert!(GroupConfig::new(2, 1, diag).is_err());
    }

    #[test]
    fn uniform_norm_values() {
        let cfg = GroupConfig::heisenberg();
        assert!((cfg.omega_uniform_norm(DEFAULT_NORM_RESTARTS, 0) - 1.0).abs() < 1e-12);
        assert_eq!(
            GroupConfig::commutative(3, 2).omega_uniform_norm(DEFAULT_NORM_RESTARTS, 0),
            0.0
        );
        let block = GroupConfig::block_diagonal(&[2.0, 1.0]);
        assert!((block.omega_uniform_norm(DEFAULT_NORM_RESTARTS, 0) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn uniform_norm_multi_centre_is_a_lower_bound_on_sampled_values() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let cfg = GroupConfig::random_skew(4, 3, &mut rng);
        let best = cfg.omega_uniform_norm(DEFAULT_NORM_RESTARTS, 1);
        for _ in 0..2000 {
            let w1 = random_unit(4, &mut rng);
            let w2 = random_unit(4, &mut rng);
            assert!(norm(&cfg.omega(&w1, &w2)) <= best + 1e-10);
        }
        // ‖ω(w1,w2)‖ ≤ ‖ω‖_HS for unit vectors
        assert!(best <= cfg.omega_hs_norm_sq().sqrt() + 1e-12);
    }

    #[test]
    fn k_omega_values() {
        assert!((GroupConfig::heisenberg().k_omega() + 1.0).abs() < 1e-12);
        assert_eq!(GroupConfig::commutative(2, 1).k_omega(), 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..20 {
            let cfg = GroupConfig::random_skew(4, 2, &mut rng);
            let base = cfg.k_omega();
            assert!(base >= -cfg.omega_hs_norm_sq() - 1e-12);
            let s = 0.5 + 2.0 * rng.random::<f64>();
            let scaled = cfg.scaled(s).k_omega();
            assert!((scaled - s * s * base).abs() < 1e-10 * base.abs().max(1.0));
        }
    }

    #[test]
    fn rho_sq_values() {
        assert_eq!(GroupElement::from_real(&[1.0, 0.0], &[0.0]).rho_sq(), 1.0);
        assert_eq!(GroupElement::from_real(&[0.0, 0.0], &[4.0]).rho_sq(), 4.0);
        let g = GroupElement::new(vec![c(3.0, 0.0), c(4.0, 0.0)], vec![c(0.0, 2.0)]);
        assert!((g.rho_sq() - 27.0).abs() < 1e-12);
    }

    #[test]
    fn config_file_round_trip_and_missing_omega() {
        let cfg = GroupConfig::heisenberg();
        let json = serde_json::to_string(&cfg).unwrap();
        let back: GroupConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(back, cfg);
        let missing: std::result::Result<GroupConfig, _> =
            serde_json::from_str(r#"{"k":2,"d":1}"#);
        assert!(missing.unwrap_err().to_string().contains("omega required"));
    }
}

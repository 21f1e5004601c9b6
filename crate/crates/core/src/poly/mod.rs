//! Sparse complex polynomials in `w, c, w̄, c̄`.
//!
//! A monomial is an exponent vector of length `2(k+d)` laid out as
//! `w_1..w_k, c_1..c_d, w̄_1..w̄_k, c̄_1..c̄_d`. Graded degree counts `w`, `w̄`
//! with weight 1 and `c`, `c̄` with weight 2.

mod diff;
mod parse;

pub use diff::{apply_l, heat_expectation, heat_expectation_with_limit, lid, Direction};
pub use parse::parse_polynomial;

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use rand::Rng;

use crate::algebra::{GroupConfig, GroupElement};
use crate::error::{Error, Result};

/// Coefficients with modulus below this are dropped after each ring operation.
pub const CLEANUP_THRESHOLD: f64 = 1e-14;

/// Default cap on graded degree for the heat oracle and the Taylor map.
pub const DEFAULT_DEGREE_LIMIT: usize = 16;

pub type Monomial = Vec<u8>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    W(usize),
    C(usize),
    WBar(usize),
    CBar(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    k: usize,
    d: usize,
    terms: BTreeMap<Monomial, Complex64>,
}

impl Polynomial {
    pub fn zero(k: usize, d: usize) -> Self {
        Self {
            k,
            d,
            terms: BTreeMap::new(),
        }
    }

    pub fn zero_for(cfg: &GroupConfig) -> Self {
        Self::zero(cfg.k(), cfg.d())
    }

    pub fn constant(k: usize, d: usize, value: Complex64) -> Self {
        let mut p = Self::zero(k, d);
        p.add_term(vec![0; 2 * (k + d)], value);
        p
    }

    pub fn var(k: usize, d: usize, v: Var) -> Self {
        let mut p = Self::zero(k, d);
        let mut mono = vec![0; 2 * (k + d)];
        mono[p.var_index(v)] = 1;
        p.add_term(mono, Complex64::new(1.0, 0.0));
        p
    }

    pub fn from_terms(
        k: usize,
        d: usize,
        terms: impl IntoIterator<Item = (Monomial, Complex64)>,
    ) -> Result<Self> {
        let mut p = Self::zero(k, d);
        for (mono, coef) in terms {
            if mono.len() != p.nvars() {
                return Err(Error::Dimension {
                    what: "monomial",
                    expected: p.nvars(),
                    got: mono.len(),
                });
            }
            p.add_term(mono, coef);
        }
        p.cleanup();
        Ok(p)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn nvars(&self) -> usize {
        2 * (self.k + self.d)
    }

    pub fn var_index(&self, v: Var) -> usize {
        let (k, d) = (self.k, self.d);
        match v {
            Var::W(j) => j,
            Var::C(m) => k + m,
            Var::WBar(j) => k + d + j,
            Var::CBar(m) => 2 * k + d + m,
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Complex64)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, mono: &[u8]) -> Complex64 {
        self.terms.get(mono).copied().unwrap_or_default()
    }

    /// Value at the identity, i.e. the constant coefficient.
    pub fn constant_term(&self) -> Complex64 {
        self.coefficient(&vec![0; self.nvars()])
    }

    pub(crate) fn add_term(&mut self, mono: Monomial, coef: Complex64) {
        if coef == Complex64::default() {
            return;
        }
        *self.terms.entry(mono).or_default() += coef;
    }

    pub(crate) fn cleanup(&mut self) {
        self.terms.retain(|_, c| c.norm() >= CLEANUP_THRESHOLD);
    }

    pub fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.k != other.k || self.d != other.d {
            return Err(Error::Config(format!(
                "polynomial shapes differ: (k={}, d={}) vs (k={}, d={})",
                self.k, self.d, other.k, other.d
            )));
        }
        Ok(())
    }

    pub fn check_config(&self, cfg: &GroupConfig) -> Result<()> {
        if self.k != cfg.k() || self.d != cfg.d() {
            return Err(Error::Config(format!(
                "polynomial over (k={}, d={}) used with group (k={}, d={})",
                self.k,
                self.d,
                cfg.k(),
                cfg.d()
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), *c);
        }
        out.cleanup();
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = Self::zero(self.k, self.d);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c * s);
        }
        out.cleanup();
        out
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let mut out = Self::zero(self.k, self.d);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let mono: Monomial = m1.iter().zip(m2).map(|(a, b)| a + b).collect();
                out.add_term(mono, c1 * c2);
            }
        }
        out.cleanup();
        Ok(out)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = Self::constant(self.k, self.d, Complex64::new(1.0, 0.0));
        for _ in 0..e {
            out = out.mul(self).expect("same shape");
        }
        out
    }

    /// Complex conjugate: swaps each variable block with its conjugate block
    /// and conjugates coefficients.
    pub fn conj(&self) -> Self {
        let half = self.k + self.d;
        let mut out = Self::zero(self.k, self.d);
        for (m, c) in &self.terms {
            let mut mono = Vec::with_capacity(m.len());
            mono.extend_from_slice(&m[half..]);
            mono.extend_from_slice(&m[..half]);
            out.add_term(mono, c.conj());
        }
        out
    }

    /// `|f|² = f · f̄`.
    pub fn modulus_sq(&self) -> Self {
        self.mul(&self.conj()).expect("same shape")
    }

    pub fn is_holomorphic(&self) -> bool {
        let half = self.k + self.d;
        self.terms.keys().all(|m| m[half..].iter().all(|&e| e == 0))
    }

    pub fn graded_degree(&self) -> usize {
        self.terms
            .keys()
            .map(|m| monomial_degree(m, self.k, self.d))
            .max()
            .unwrap_or(0)
    }

    pub fn eval(&self, g: &GroupElement) -> Complex64 {
        let (k, d) = (self.k, self.d);
        let mut acc = Complex64::default();
        for (m, coef) in &self.terms {
            let mut term = *coef;
            for (i, &e) in m.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let z = if i < k {
                    g.w[i]
                } else if i < k + d {
                    g.c[i - k]
                } else if i < 2 * k + d {
                    g.w[i - k - d].conj()
                } else {
                    g.c[i - 2 * k - d].conj()
                };
                term *= z.powu(e as u32);
            }
            acc += term;
        }
        acc
    }

    /// Replaces variable `i` by `images[i]` (all of the same shape) and expands.
    pub fn substitute(&self, images: &[Polynomial]) -> Result<Self> {
        if images.len() != self.nvars() {
            return Err(Error::Dimension {
                what: "substitution images",
                expected: self.nvars(),
                got: images.len(),
            });
        }
        let (k, d) = (images[0].k, images[0].d);
        let mut powers: Vec<Vec<Polynomial>> = images
            .iter()
            .map(|p| vec![Polynomial::constant(k, d, Complex64::new(1.0, 0.0)), p.clone()])
            .collect();
        let mut out = Polynomial::zero(k, d);
        for (m, coef) in &self.terms {
            let mut term = Polynomial::constant(k, d, *coef);
            for (i, &e) in m.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[i].len() <= e as usize {
                    let next = powers[i].last().unwrap().mul(&images[i])?;
                    powers[i].push(next);
                }
                term = term.mul(&powers[i][e as usize])?;
            }
            for (mm, cc) in term.terms {
                out.add_term(mm, cc);
            }
        }
        out.cleanup();
        Ok(out)
    }

    /// The polynomial `g ↦ f(h·g)`.
    pub fn left_translate(&self, cfg: &GroupConfig, h: &GroupElement) -> Result<Self> {
        self.check_config(cfg)?;
        cfg.check(h)?;
        let (k, d) = (self.k, self.d);
        let one = Complex64::new(1.0, 0.0);
        let mut images = Vec::with_capacity(self.nvars());
        for j in 0..k {
            let mut p = Polynomial::var(k, d, Var::W(j));
            p.add_term(vec![0; self.nvars()], h.w[j]);
            images.push(p);
        }
        for m in 0..d {
            // c_m ↦ h.c_m + c_m + ½ Σ_j (h.wᵀ Ω_m)_j w_j
            let mut p = Polynomial::var(k, d, Var::C(m));
            p.add_term(vec![0; self.nvars()], h.c[m]);
            for j in 0..k {
                let coef: Complex64 = (0..k).map(|i| h.w[i] * cfg.omega_entry(m, i, j)).sum();
                let mut mono = vec![0; self.nvars()];
                mono[j] = 1;
                p.add_term(mono, 0.5 * coef * one);
            }
            p.cleanup();
            images.push(p);
        }
        let conj_images: Vec<Polynomial> = images.iter().map(|p| p.conj()).collect();
        images.extend(conj_images);
        self.substitute(&images)
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Largest coefficient modulus of `self − other`.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        Ok(self.sub(other)?.max_abs_coefficient())
    }

    /// Random conjugate-free polynomial with `n_terms` monomials of graded degree
    /// at most `max_degree` and coefficients uniform in the unit square.
    pub fn random_holomorphic<R: Rng + ?Sized>(
        k: usize,
        d: usize,
        max_degree: usize,
        n_terms: usize,
        rng: &mut R,
    ) -> Self {
        Self::random_impl(k, d, max_degree, n_terms, false, rng)
    }

    /// Random polynomial in all of `w, c, w̄, c̄`.
    pub fn random_general<R: Rng + ?Sized>(
        k: usize,
        d: usize,
        max_degree: usize,
        n_terms: usize,
        rng: &mut R,
    ) -> Self {
        Self::random_impl(k, d, max_degree, n_terms, true, rng)
    }

    fn random_impl<R: Rng + ?Sized>(
        k: usize,
        d: usize,
        max_degree: usize,
        n_terms: usize,
        with_conjugates: bool,
        rng: &mut R,
    ) -> Self {
        let nvars = 2 * (k + d);
        let choices = if with_conjugates { nvars } else { k + d };
        let mut p = Self::zero(k, d);
        for _ in 0..n_terms {
            let target = rng.random_range(0..=max_degree);
            let mut mono = vec![0u8; nvars];
            let mut deg = 0;
            let mut attempts = 0;
            while deg < target && attempts < 64 {
                attempts += 1;
                let v = rng.random_range(0..choices);
                let w = var_weight(v, k, d);
                if deg + w <= target {
                    mono[v] += 1;
                    deg += w;
                }
            }
            let coef = Complex64::new(
                rng.random::<f64>() * 2.0 - 1.0,
                rng.random::<f64>() * 2.0 - 1.0,
            );
            p.add_term(mono, coef);
        }
        p.cleanup();
        p
    }
}

fn var_weight(v: usize, k: usize, d: usize) -> usize {
    let local = v % (k + d);
    if local < k {
        1
    } else {
        2
    }
}

pub(crate) fn monomial_degree(m: &[u8], k: usize, d: usize) -> usize {
    m.iter()
        .enumerate()
        .map(|(i, &e)| e as usize * var_weight(i, k, d))
        .sum()
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let (k, d) = (self.k, self.d);
        for (n, (m, c)) in self.terms.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({}{:+}i)", c.re, c.im)?;
            for (i, &e) in m.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let name = if i < k {
                    format!("w{}", i + 1)
                } else if i < k + d {
                    format!("c{}", i - k + 1)
                } else if i < 2 * k + d {
                    format!("wbar{}", i - k - d + 1)
                } else {
                    format!("cbar{}", i - 2 * k - d + 1)
                };
                if e == 1 {
                    write!(f, "*{name}")?;
                } else {
                    write!(f, "*{name}^{e}")?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn eval_and_holomorphy() {
        let w1 = Polynomial::var(2, 1, Var::W(0));
        let c1 = Polynomial::var(2, 1, Var::C(0));
        let g = GroupElement::from_real(&[2.0, 0.0], &[3.0]);
        assert_eq!(w1.mul(&c1).unwrap().eval(&g), c(6.0, 0.0));
        assert!(w1.add(&c1).unwrap().is_holomorphic());
        assert!(!Polynomial::var(2, 1, Var::WBar(0)).is_holomorphic());
    }

    #[test]
    fn conj_swaps_blocks() {
        let p = Polynomial::var(2, 1, Var::W(0)).scale(c(0.0, 1.0));
        let expected = Polynomial::var(2, 1, Var::WBar(0)).scale(c(0.0, -1.0));
        assert_eq!(p.conj(), expected);
    }

    #[test]
    fn graded_degree_weights() {
        let p = parse_polynomial("w1^2*c1 + cbar1^3", 2, 1).unwrap();
        assert_eq!(p.graded_degree(), 6);
        assert_eq!(Polynomial::zero(2, 1).graded_degree(), 0);
    }

    #[test]
    fn shape_mismatch() {
        let a = Polynomial::var(2, 1, Var::W(0));
        let b = Polynomial::var(3, 1, Var::W(0));
        assert!(matches!(a.add(&b), Err(Error::Config(_))));
    }

    #[test]
    fn eval_is_a_ring_homomorphism() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let p = Polynomial::random_general(2, 1, 4, 5, &mut rng);
            let q = Polynomial::random_general(2, 1, 4, 5, &mut rng);
            let g = GroupElement::new(
                vec![c(rng.random(), rng.random()), c(rng.random(), rng.random())],
                vec![c(rng.random(), rng.random())],
            );
            let prod = p.mul(&q).unwrap().eval(&g);
            assert!((prod - p.eval(&g) * q.eval(&g)).norm() < 1e-12);
            let sum = p.add(&q).unwrap().eval(&g);
            assert!((sum - p.eval(&g) - q.eval(&g)).norm() < 1e-12);
            assert!((p.conj().eval(&g) - p.eval(&g).conj()).norm() < 1e-12);
        }
    }

    #[test]
    fn left_translation_matches_pointwise_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let cfg = GroupConfig::random_skew(3, 2, &mut rng);
        for _ in 0..20 {
            let f = Polynomial::random_general(3, 2, 4, 4, &mut rng);
            let mut rand_el = || {
                GroupElement::new(
                    (0..3).map(|_| c(rng.random(), rng.random())).collect(),
                    (0..2).map(|_| c(rng.random(), rng.random())).collect(),
                )
            };
            let h = rand_el();
            let g = rand_el();
            let shifted = f.left_translate(&cfg, &h).unwrap();
            let direct = f.eval(&cfg.mul(&h, &g).unwrap());
            assert!((shifted.eval(&g) - direct).norm() < 1e-10 * (1.0 + direct.norm()));
        }
    }

    #[test]
    fn random_holomorphic_respects_degree() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let p = Polynomial::random_holomorphic(3, 2, 5, 6, &mut rng);
            assert!(p.is_holomorphic());
            assert!(p.graded_degree() <= 5);
        }
    }

    #[test]
    fn display_parses_back() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let p = Polynomial::random_general(2, 2, 5, 6, &mut rng);
            let q = parse_polynomial(&p.to_string(), 2, 2).unwrap();
            assert!(p.distance(&q).unwrap() < 1e-15);
        }
    }
}

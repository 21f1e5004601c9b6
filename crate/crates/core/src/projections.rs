//! Finite-rank projections `P` on `ℂᵏ`, the induced map `π_P(w, c) = (Pw, c)`,
//! its homomorphism defect `Γ_P`, and the Taylor coefficients of `u∘π_P`
//! through the `κ_n` recursion.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::algebra::{AlgebraElement, BasisIndex, GroupConfig, GroupElement};
use crate::error::{Error, Result};
use crate::fock::{basis_directions, taylor, FockTensor, IndexTuple};
use crate::poly::{lid, Direction, Polynomial, Var};

const GRAM_TOLERANCE: f64 = 1e-12;
const ROUTE_TOLERANCE: f64 = 1e-10;

/// Orthogonal projection onto the span of an orthonormal family.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    k: usize,
    vectors: Vec<Vec<Complex64>>,
    // row-major P = Σ u u†
    matrix: Vec<Complex64>,
}

impl Projection {
    pub fn new(k: usize, vectors: Vec<Vec<Complex64>>) -> Result<Self> {
        if vectors.len() > k {
            return Err(Error::InvalidParameter(format!(
                "rank {} exceeds dimension {k}",
                vectors.len()
            )));
        }
        for v in &vectors {
            if v.len() != k {
                return Err(Error::Dimension {
                    what: "projection vector",
                    expected: k,
                    got: v.len(),
                });
            }
        }
        for (a, u) in vectors.iter().enumerate() {
            for (b, v) in vectors.iter().enumerate() {
                let g: Complex64 = u.iter().zip(v).map(|(x, y)| x * y.conj()).sum();
                let target = if a == b { 1.0 } else { 0.0 };
                if (g - target).norm() > GRAM_TOLERANCE {
                    return Err(Error::InvalidParameter(format!(
                        "family is not orthonormal: <u{a}, u{b}> = {g}"
                    )));
                }
            }
        }
        let mut matrix = vec![Complex64::default(); k * k];
        for u in &vectors {
            for i in 0..k {
                for j in 0..k {
                    matrix[i * k + j] += u[i] * u[j].conj();
                }
            }
        }
        Ok(Self { k, vectors, matrix })
    }

    /// Projection onto `span(e_1, …, e_n)`.
    pub fn coordinate(k: usize, n: usize) -> Result<Self> {
        let vectors = (0..n)
            .map(|i| {
                let mut v = vec![Complex64::default(); k];
                v[i] = Complex64::new(1.0, 0.0);
                v
            })
            .collect();
        Self::new(k, vectors)
    }

    pub fn identity(k: usize) -> Self {
        Self::coordinate(k, k).expect("standard basis is orthonormal")
    }

    /// Span of `n` Gram–Schmidt orthonormalized Gaussian vectors.
    pub fn random<R: Rng + ?Sized>(k: usize, n: usize, rng: &mut R) -> Result<Self> {
        let mut vectors: Vec<Vec<Complex64>> = Vec::with_capacity(n);
        while vectors.len() < n.min(k) {
            let mut v: Vec<Complex64> = (0..k)
                .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
                .collect();
            // two passes keep the family orthonormal to rounding
            for _ in 0..2 {
                for u in &vectors {
                    let c: Complex64 = v.iter().zip(u).map(|(x, y)| x * y.conj()).sum();
                    for (x, y) in v.iter_mut().zip(u) {
                        *x -= c * y;
                    }
                }
            }
            let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-6 {
                continue;
            }
            vectors.push(v.into_iter().map(|x| x / norm).collect());
        }
        Self::new(k, vectors)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn rank(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[Vec<Complex64>] {
        &self.vectors
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.matrix[i * self.k + j]
    }

    pub fn apply(&self, w: &[Complex64]) -> Vec<Complex64> {
        (0..self.k)
            .map(|i| (0..self.k).map(|j| self.entry(i, j) * w[j]).sum())
            .collect()
    }

    fn check(&self, cfg: &GroupConfig) -> Result<()> {
        if self.k != cfg.k() {
            return Err(Error::Dimension {
                what: "projection",
                expected: cfg.k(),
                got: self.k,
            });
        }
        Ok(())
    }
}

/// `π_P(w, c) = (Pw, c)`.
pub fn pi_p(p: &Projection, g: &GroupElement) -> GroupElement {
    GroupElement::new(p.apply(&g.w), g.c.clone())
}

/// `Γ_P(w, w') = ½(0, ω(w, w') − ω(Pw, Pw'))`.
pub fn gamma_defect(
    p: &Projection,
    cfg: &GroupConfig,
    w: &[Complex64],
    w2: &[Complex64],
) -> Result<GroupElement> {
    p.check(cfg)?;
    let full = cfg.omega(w, w2);
    let proj = cfg.omega(&p.apply(w), &p.apply(w2));
    let c = full.iter().zip(&proj).map(|(a, b)| 0.5 * (a - b)).collect();
    Ok(GroupElement::new(vec![Complex64::default(); cfg.k()], c))
}

/// `k^P(g) = π_P k + Γ_P(w, A)` for `k = (A, a)`.
pub fn k_p(
    p: &Projection,
    cfg: &GroupConfig,
    k: &AlgebraElement,
    g: &GroupElement,
) -> Result<AlgebraElement> {
    cfg.check(k)?;
    cfg.check(g)?;
    Ok(pi_p(p, k) + gamma_defect(p, cfg, &g.w, &k.w)?)
}

/// Tensor with polynomial coefficients, indexed like [`FockTensor`].
type PolyTensor = BTreeMap<IndexTuple, Polynomial>;

/// `k^P` as a rank-one tensor whose coefficients are polynomials in `w`.
fn k_p_symbolic(p: &Projection, cfg: &GroupConfig, k: &AlgebraElement) -> PolyTensor {
    let (kk, d) = (cfg.k(), cfg.d());
    let mut out = PolyTensor::new();
    let pa = p.apply(&k.w);
    for (i, &v) in pa.iter().enumerate() {
        if v != Complex64::default() {
            out.insert(vec![i], Polynomial::constant(kk, d, v));
        }
    }
    // ½(ω_m(w, A) − ω_m(Pw, PA)) = ½ Σ_i w_i [(Ω_m A)_i − (Pᵀ Ω_m PA)_i]
    for m in 0..d {
        let oa = cfg.omega_apply(m, &k.w);
        let opa = cfg.omega_apply(m, &pa);
        let mut poly = Polynomial::constant(kk, d, k.c[m]);
        for i in 0..kk {
            let pt: Complex64 = (0..kk).map(|j| p.entry(j, i) * opa[j]).sum();
            let coef = 0.5 * (oa[i] - pt);
            if coef != Complex64::default() {
                let lin = Polynomial::var(kk, d, Var::W(i)).scale(coef);
                poly = poly.add(&lin).expect("same shape");
            }
        }
        if !poly.is_zero() {
            out.insert(vec![kk + m], poly);
        }
    }
    out
}

fn left_tensor(a: &PolyTensor, b: &PolyTensor, into: &mut PolyTensor) -> Result<()> {
    for (ia, pa) in a {
        for (ib, pb) in b {
            let mut idx = ia.clone();
            idx.extend_from_slice(ib);
            let prod = pa.mul(pb)?;
            accumulate(into, idx, prod)?;
        }
    }
    Ok(())
}

fn accumulate(into: &mut PolyTensor, idx: IndexTuple, p: Polynomial) -> Result<()> {
    if p.is_zero() {
        return Ok(());
    }
    match into.remove(&idx) {
        Some(q) => {
            let s = q.add(&p)?;
            if !s.is_zero() {
                into.insert(idx, s);
            }
        }
        None => {
            into.insert(idx, p);
        }
    }
    Ok(())
}

/// One step `κ_n = K_n ⊗ κ_{n−1} + k̃_n κ_{n−1}`.
fn kappa_step(
    p: &Projection,
    cfg: &GroupConfig,
    k: &AlgebraElement,
    prev: &PolyTensor,
) -> Result<PolyTensor> {
    let big_k = k_p_symbolic(p, cfg, k);
    let dir = Direction::new(cfg, k.clone())?;
    let mut out = PolyTensor::new();
    left_tensor(&big_k, prev, &mut out)?;
    for (idx, poly) in prev {
        accumulate(&mut out, idx.clone(), lid(poly, &dir, cfg)?)?;
    }
    Ok(out)
}

fn evaluate_at_identity(cfg: &GroupConfig, t: &PolyTensor, maxrank: usize) -> Result<FockTensor> {
    let mut out = FockTensor::zero_for(cfg, maxrank);
    for (idx, poly) in t {
        out.set(idx, poly.constant_term())?;
    }
    Ok(out)
}

/// `κ_n(e)` for the direction sequence `k_1, …, k_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedTensor {
    pub order: usize,
    pub tensor: FockTensor,
}

impl MixedTensor {
    /// Nonzero components only in ranks `n − ⌊n/2⌋ ..= n`.
    pub fn rank_support_ok(&self) -> bool {
        let lo = self.order - self.order / 2;
        self.tensor
            .entries()
            .all(|(idx, _)| idx.len() >= lo && idx.len() <= self.order)
    }

    /// `⟨α, κ_n(e)⟩`.
    pub fn pair(&self, alpha: &FockTensor) -> Complex64 {
        self.tensor.entries().map(|(idx, v)| alpha.get(idx) * v).sum()
    }
}

/// `κ_n(e)` where `directions = [k_1, …, k_n]`; `k_n` occupies the leftmost
/// tensor slot.
pub fn kappa(p: &Projection, cfg: &GroupConfig, directions: &[AlgebraElement]) -> Result<MixedTensor> {
    p.check(cfg)?;
    let n = directions.len();
    if n == 0 {
        return Err(Error::InvalidParameter("kappa needs at least one direction".into()));
    }
    let mut cur = k_p_symbolic(p, cfg, &directions[0]);
    cfg.check(&directions[0])?;
    for k in &directions[1..] {
        cur = kappa_step(p, cfg, k, &cur)?;
    }
    Ok(MixedTensor {
        order: n,
        tensor: evaluate_at_identity(cfg, &cur, n)?,
    })
}

/// The polynomial `u∘π_P`.
pub fn compose_projection(u: &Polynomial, p: &Projection, cfg: &GroupConfig) -> Result<Polynomial> {
    u.check_config(cfg)?;
    p.check(cfg)?;
    let (k, d) = (cfg.k(), cfg.d());
    let mut images = Vec::with_capacity(2 * (k + d));
    for i in 0..k {
        let mut img = Polynomial::zero(k, d);
        for j in 0..k {
            let e = p.entry(i, j);
            if e != Complex64::default() {
                img = img.add(&Polynomial::var(k, d, Var::W(j)).scale(e))?;
            }
        }
        images.push(img);
    }
    for m in 0..d {
        images.push(Polynomial::var(k, d, Var::C(m)));
    }
    let conj: Vec<Polynomial> = images.iter().map(|q| q.conj()).collect();
    images.extend(conj);
    u.substitute(&images)
}

/// Taylor tensor of `u∘π_P`, computed directly and through
/// `⟨taylor(u), κ_n(e)⟩` for every basis direction tuple; the two must agree.
pub fn pullback_taylor(
    u: &Polynomial,
    p: &Projection,
    cfg: &GroupConfig,
    maxrank: usize,
) -> Result<FockTensor> {
    let composed = compose_projection(u, p, cfg)?;
    let direct = taylor(&composed, cfg, maxrank)?;
    let alpha = taylor(u, cfg, maxrank.max(u.graded_degree()))?;
    let via_kappa = pullback_by_kappa(&alpha, p, cfg, maxrank)?;
    let scale = direct
        .entries()
        .map(|(_, v)| v.norm())
        .fold(1.0_f64, f64::max);
    let diff = direct.sub(&via_kappa)?;
    let worst = diff.entries().map(|(_, v)| v.norm()).fold(0.0, f64::max);
    if worst > ROUTE_TOLERANCE * scale {
        return Err(Error::Consistency(format!(
            "pullback routes differ by {worst:e}"
        )));
    }
    Ok(direct)
}

/// Entry `(j_1, …, j_n)` of the pullback is `⟨α, κ_n(e)⟩` with
/// `k_n = e_{j_1}, …, k_1 = e_{j_n}`. Tuples are extended on the left so
/// each `κ` is built from the one for its suffix.
fn pullback_by_kappa(
    alpha: &FockTensor,
    p: &Projection,
    cfg: &GroupConfig,
    maxrank: usize,
) -> Result<FockTensor> {
    let dirs = basis_directions(cfg);
    let mut out = FockTensor::zero_for(cfg, maxrank);
    out.set(&[], alpha.scalar())?;
    if maxrank == 0 {
        return Ok(out);
    }
    let pair = |t: &PolyTensor| -> Complex64 {
        t.iter()
            .map(|(idx, poly)| alpha.get(idx) * poly.constant_term())
            .sum()
    };
    let mut stack: Vec<(IndexTuple, PolyTensor)> = dirs
        .iter()
        .enumerate()
        .map(|(b, dir)| (vec![b], k_p_symbolic(p, cfg, &dir.h)))
        .collect();
    while let Some((idx, kap)) = stack.pop() {
        out.set(&idx, pair(&kap))?;
        if idx.len() == maxrank {
            continue;
        }
        for (b, dir) in dirs.iter().enumerate() {
            let next = kappa_step(p, cfg, &dir.h, &kap)?;
            let mut nidx = Vec::with_capacity(idx.len() + 1);
            nidx.push(b);
            nidx.extend_from_slice(&idx);
            stack.push((nidx, next));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceRow {
    pub projection_rank: usize,
    pub tensor_rank: usize,
    pub error: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceReport {
    pub rows: Vec<ConvergenceRow>,
    /// Whether the error sequence in `N` is non-increasing (to 1e-12) for
    /// every tensor rank. Informational only.
    pub monotone: bool,
}

impl ConvergenceReport {
    /// Largest error at the full projection `N = k`.
    pub fn full_rank_error(&self, k: usize) -> f64 {
        self.rows
            .iter()
            .filter(|r| r.projection_rank == k)
            .map(|r| r.error)
            .fold(0.0, f64::max)
    }
}

/// `‖taylor(u)_n − pullback_taylor(u, P_N)_n‖` for coordinate projections
/// `P_N = span(e_1..e_N)` along the given increasing sequence of `N`.
pub fn projection_convergence(
    u: &Polynomial,
    cfg: &GroupConfig,
    ranks: &[usize],
) -> Result<ConvergenceReport> {
    if ranks.windows(2).any(|w| w[0] >= w[1]) || ranks.iter().any(|&n| n > cfg.k()) {
        return Err(Error::InvalidParameter(format!(
            "projection ranks must increase within 0..={}",
            cfg.k()
        )));
    }
    let maxrank = u.graded_degree();
    let alpha = taylor(u, cfg, maxrank)?;
    let mut rows = Vec::new();
    let mut monotone = true;
    let mut last: Option<Vec<f64>> = None;
    for &n in ranks {
        let p = Projection::coordinate(cfg.k(), n)?;
        let diff = alpha.sub(&pullback_taylor(u, &p, cfg, maxrank)?)?;
        let errs: Vec<f64> = (0..=maxrank).map(|r| diff.rank_norm_sq(r).sqrt()).collect();
        if let Some(prev) = &last {
            monotone &= errs.iter().zip(prev).all(|(e, q)| *e <= q + 1e-12);
        }
        for (r, &e) in errs.iter().enumerate() {
            rows.push(ConvergenceRow {
                projection_rank: n,
                tensor_rank: r,
                error: e,
            });
        }
        last = Some(errs);
    }
    Ok(ConvergenceReport { rows, monotone })
}

/// Convenience: the basis element with index `b` as an algebra element.
pub fn basis_direction(cfg: &GroupConfig, b: usize) -> Result<AlgebraElement> {
    Ok(cfg.basis_element(BasisIndex::new(b, cfg)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_polynomial;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn random_element(cfg: &GroupConfig, rng: &mut ChaCha8Rng) -> GroupElement {
        let mut z = || Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
        GroupElement::new((0..cfg.k()).map(|_| z()).collect(), (0..cfg.d()).map(|_| z()).collect())
    }

    #[test]
    fn projection_of_point() {
        let p = Projection::coordinate(2, 1).unwrap();
        let g = GroupElement::from_real(&[1.0, 2.0], &[5.0]);
        assert_eq!(pi_p(&p, &g), GroupElement::from_real(&[1.0, 0.0], &[5.0]));
        assert_eq!(pi_p(&Projection::identity(2), &g), g);
        let zero = Projection::coordinate(2, 0).unwrap();
        assert_eq!(pi_p(&zero, &g), GroupElement::from_real(&[0.0, 0.0], &[5.0]));
    }

    #[test]
    fn gram_check() {
        let bad = vec![vec![c(1.0), c(0.0)], vec![c(1.0), c(1e-6)]];
        assert!(Projection::new(2, bad).is_err());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = Projection::random(4, 3, &mut rng).unwrap();
        assert_eq!(p.rank(), 3);
    }

    #[test]
    fn gamma_worked_value() {
        let cfg = GroupConfig::heisenberg();
        let p = Projection::coordinate(2, 1).unwrap();
        let g = gamma_defect(&p, &cfg, &[c(1.0), c(0.0)], &[c(0.0), c(1.0)]).unwrap();
        assert_eq!(g.c[0], c(0.5));
        let id = gamma_defect(&Projection::identity(2), &cfg, &[c(1.0), c(0.3)], &[c(0.2), c(1.0)])
            .unwrap();
        assert_eq!(id.c[0], c(0.0));
    }

    #[test]
    fn defect_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for trial in 0..1000 {
            let (k, d) = if trial % 2 == 0 { (2, 1) } else { (4, 2) };
            let cfg = GroupConfig::random_skew(k, d, &mut rng);
            let n = rng.random_range(0..=k);
            let p = Projection::random(k, n, &mut rng).unwrap();
            let g1 = random_element(&cfg, &mut rng);
            let g2 = random_element(&cfg, &mut rng);
            let lhs = pi_p(&p, &cfg.mul(&g1, &g2).unwrap());
            let gam = gamma_defect(&p, &cfg, &g1.w, &g2.w).unwrap();
            let rhs = cfg
                .mul(&cfg.mul(&pi_p(&p, &g1), &pi_p(&p, &g2)).unwrap(), &gam)
                .unwrap();
            assert!(lhs.max_abs_diff(&rhs) < 1e-14);
        }
    }

    #[test]
    fn k_p_worked_value() {
        let cfg = GroupConfig::heisenberg();
        let p = Projection::coordinate(2, 1).unwrap();
        let k = GroupElement::from_real(&[0.0, 1.0], &[0.0]);
        let g = GroupElement::from_real(&[1.0, 0.0], &[0.0]);
        let kp = k_p(&p, &cfg, &k, &g).unwrap();
        assert_eq!(kp, GroupElement::from_real(&[0.0, 0.0], &[0.5]));
        assert_eq!(k_p(&p, &cfg, &k, &cfg.identity()).unwrap(), pi_p(&p, &k));
        assert_eq!(k_p(&Projection::identity(2), &cfg, &k, &g).unwrap(), k);
    }

    #[test]
    fn kappa_closed_forms() {
        let cfg = GroupConfig::heisenberg();
        let p = Projection::coordinate(2, 1).unwrap();
        let e1 = basis_direction(&cfg, 0).unwrap();
        let e2 = basis_direction(&cfg, 1).unwrap();
        let k1 = kappa(&p, &cfg, &[e1.clone()]).unwrap();
        assert_eq!(k1.tensor.get(&[0]), c(1.0));
        assert_eq!(k1.tensor.nnz(), 1);
        let k2 = kappa(&p, &cfg, &[e2.clone(), e1.clone()]).unwrap();
        assert_eq!(k2.tensor.get(&[2]), c(0.5));
        assert_eq!(k2.tensor.nnz(), 1);
        // κ_2 = π_P k_2 ⊗ π_P k_1 + Γ_P(A_2, A_1) on random inputs
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let cfg = GroupConfig::random_skew(3, 2, &mut rng);
            let p = Projection::random(3, 2, &mut rng).unwrap();
            let a1 = random_element(&cfg, &mut rng);
            let a2 = random_element(&cfg, &mut rng);
            let k2 = kappa(&p, &cfg, &[a1.clone(), a2.clone()]).unwrap();
            let (x, y) = (pi_p(&p, &a2), pi_p(&p, &a1));
            let gam = gamma_defect(&p, &cfg, &a2.w, &a1.w).unwrap();
            let mut expected = FockTensor::zero_for(&cfg, 2);
            for i in 0..5 {
                expected.set(&[i], if i < 3 { c(0.0) } else { gam.c[i - 3] }).unwrap();
                for j in 0..5 {
                    expected.set(&[i, j], x.coord(i) * y.coord(j)).unwrap();
                }
            }
            let err = k2.tensor.sub(&expected).unwrap();
            assert!(err.entries().all(|(_, v)| v.norm() < 1e-13));
        }
    }

    #[test]
    fn kappa_rank_support() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for n in 1..=5 {
            let cfg = GroupConfig::random_skew(3, 1, &mut rng);
            let p = Projection::random(3, 1, &mut rng).unwrap();
            let dirs: Vec<_> = (0..n).map(|_| random_element(&cfg, &mut rng)).collect();
            let kap = kappa(&p, &cfg, &dirs).unwrap();
            assert!(kap.rank_support_ok(), "n = {n}");
        }
    }

    #[test]
    fn pullback_worked_value() {
        let cfg = GroupConfig::heisenberg();
        let p = Projection::coordinate(2, 1).unwrap();
        let u = parse_polynomial("c1", 2, 1).unwrap();
        let pb = pullback_taylor(&u, &p, &cfg, 2).unwrap();
        // pairing with k_2 ⊗ k_1 = e1 ⊗ e2
        assert!((pb.get(&[0, 1]) - c(0.5)).norm() < 1e-14);
        let e1 = basis_direction(&cfg, 0).unwrap();
        let e2 = basis_direction(&cfg, 1).unwrap();
        let alpha = taylor(&u, &cfg, 2).unwrap();
        assert_eq!(kappa(&p, &cfg, &[e2, e1]).unwrap().pair(&alpha), c(0.5));
    }

    #[test]
    fn identity_projection_pullback_is_taylor() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let cfg = GroupConfig::random_skew(2, 1, &mut rng);
        let u = Polynomial::random_holomorphic(2, 1, 4, 6, &mut rng);
        let pb = pullback_taylor(&u, &Projection::identity(2), &cfg, 4).unwrap();
        assert_eq!(pb.sub(&taylor(&u, &cfg, 4).unwrap()).unwrap().nnz(), 0);
    }

    #[test]
    fn two_routes_agree_on_random_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..10 {
            let cfg = GroupConfig::random_skew(3, 1, &mut rng);
            let n = rng.random_range(0..=3);
            let p = Projection::random(3, n, &mut rng).unwrap();
            let u = Polynomial::random_holomorphic(3, 1, 4, 5, &mut rng);
            pullback_taylor(&u, &p, &cfg, 4).unwrap();
        }
    }

    #[test]
    fn pullback_rank_audit() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let cfg = GroupConfig::random_skew(3, 1, &mut rng);
        let p = Projection::coordinate(3, 2).unwrap();
        let u = Polynomial::random_holomorphic(3, 1, 2, 6, &mut rng);
        let pb = pullback_taylor(&u, &p, &cfg, 5).unwrap();
        assert!(pb.support_rank() <= 3);
    }

    #[test]
    fn convergence_reaches_zero_at_full_rank() {
        let cfg = GroupConfig::heisenberg();
        let u = parse_polynomial("c1 + w1*w2", 2, 1).unwrap();
        let rep = projection_convergence(&u, &cfg, &[0, 1, 2]).unwrap();
        assert_eq!(rep.full_rank_error(2), 0.0);
        let at1: Vec<_> = rep.rows.iter().filter(|r| r.projection_rank == 1).collect();
        assert!(at1.iter().any(|r| r.error > 0.1));
        let commutative = GroupConfig::commutative(3, 1);
        let v = parse_polynomial("w1^2 + c1", 3, 1).unwrap();
        let rep = projection_convergence(&v, &commutative, &[1, 3]).unwrap();
        assert!(rep.rows.iter().all(|r| r.error == 0.0));
        assert!(projection_convergence(&v, &commutative, &[2, 1]).is_err());
    }
}

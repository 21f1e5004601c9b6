//! Graded tensors `α = (α_0, α_1, …, α_N)` over the Lie-algebra basis, the
//! Fock norm `Σ Tⁿ/n! ‖α_n‖²`, the Taylor map and its inverse, the
//! annihilator certificate for `J = ⟨h⊗k − k⊗h − [h,k]⟩`, the grading
//! automorphism `Φ_θ` and Fejér truncation.
//!
//! Index tuples follow the left-differential convention
//! `⟨α_n, h_1⊗…⊗h_n⟩ = (h̃_1 ⋯ h̃_n f)(e)`: `h̃_n` acts on `f` first and
//! `h̃_1` last.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{BasisIndex, GroupConfig};
use crate::error::{Error, Result};
use crate::poly::{lid, Direction, Polynomial, CLEANUP_THRESHOLD, DEFAULT_DEGREE_LIMIT};

pub type IndexTuple = Vec<usize>;

#[derive(Debug, Clone, PartialEq)]
pub struct FockTensor {
    k: usize,
    d: usize,
    ranks: Vec<BTreeMap<IndexTuple, Complex64>>,
}

impl FockTensor {
    pub fn zero(k: usize, d: usize, maxrank: usize) -> Self {
        Self {
            k,
            d,
            ranks: vec![BTreeMap::new(); maxrank + 1],
        }
    }

    pub fn zero_for(cfg: &GroupConfig, maxrank: usize) -> Self {
        Self::zero(cfg.k(), cfg.d(), maxrank)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn basis_len(&self) -> usize {
        self.k + self.d
    }

    pub fn maxrank(&self) -> usize {
        self.ranks.len() - 1
    }

    pub fn rank(&self, n: usize) -> Option<&BTreeMap<IndexTuple, Complex64>> {
        self.ranks.get(n)
    }

    pub fn get(&self, index: &[usize]) -> Complex64 {
        self.ranks
            .get(index.len())
            .and_then(|r| r.get(index))
            .copied()
            .unwrap_or_default()
    }

    pub fn scalar(&self) -> Complex64 {
        self.get(&[])
    }

    /// Sets one entry, growing `maxrank` when needed. Zero values are removed.
    pub fn set(&mut self, index: &[usize], value: Complex64) -> Result<()> {
        if let Some(&bad) = index.iter().find(|&&i| i >= self.basis_len()) {
            return Err(Error::Dimension {
                what: "tensor index",
                expected: self.basis_len(),
                got: bad,
            });
        }
        while self.ranks.len() <= index.len() {
            self.ranks.push(BTreeMap::new());
        }
        let slot = &mut self.ranks[index.len()];
        if value.norm() < CLEANUP_THRESHOLD {
            slot.remove(index);
        } else {
            slot.insert(index.to_vec(), value);
        }
        Ok(())
    }

    pub fn entries(&self) -> impl Iterator<Item = (&IndexTuple, &Complex64)> {
        self.ranks.iter().flat_map(|r| r.iter())
    }

    pub fn nnz(&self) -> usize {
        self.ranks.iter().map(|r| r.len()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.nnz() == 0
    }

    /// Highest rank holding a nonzero entry.
    pub fn support_rank(&self) -> usize {
        self.ranks
            .iter()
            .rposition(|r| !r.is_empty())
            .unwrap_or(0)
    }

    fn is_central(&self, index: usize) -> bool {
        index >= self.k
    }

    /// `n + (number of central factors)`, the weight under `Φ_θ`.
    pub fn homogeneous_degree(&self, index: &[usize]) -> usize {
        index.len() + index.iter().filter(|&&i| self.is_central(i)).count()
    }

    fn map_entries(&self, f: impl Fn(&[usize], Complex64) -> Complex64) -> Self {
        let mut out = Self::zero(self.k, self.d, self.maxrank());
        for (n, r) in self.ranks.iter().enumerate() {
            for (idx, v) in r {
                let nv = f(idx, *v);
                if nv.norm() >= CLEANUP_THRESHOLD {
                    out.ranks[n].insert(idx.clone(), nv);
                }
            }
        }
        out
    }

    pub fn scale(&self, s: Complex64) -> Self {
        self.map_entries(|_, v| v * s)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        let mut out = self.clone();
        while out.ranks.len() < other.ranks.len() {
            out.ranks.push(BTreeMap::new());
        }
        for (n, r) in other.ranks.iter().enumerate() {
            for (idx, v) in r {
                *out.ranks[n].entry(idx.clone()).or_default() += v;
            }
        }
        for r in &mut out.ranks {
            r.retain(|_, v| v.norm() >= CLEANUP_THRESHOLD);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    fn check_shape(&self, other: &Self) -> Result<()> {
        if self.k != other.k || self.d != other.d {
            return Err(Error::Config("tensor shapes differ".into()));
        }
        Ok(())
    }

    /// `‖α_n‖²_n = Σ_I |α_n(I)|²`.
    pub fn rank_norm_sq(&self, n: usize) -> f64 {
        self.ranks
            .get(n)
            .map(|r| r.values().fold(0.0, |acc, v| acc + v.norm_sqr()))
            .unwrap_or(0.0)
    }

    /// `Σ_n Tⁿ/n! ‖α_n‖²_n`.
    pub fn fock_norm_sq(&self, t: f64) -> Result<f64> {
        Ok(self.fock_inner(self, t)?.re)
    }

    /// `Σ_n Tⁿ/n! Σ_I α_n(I) conj(β_n(I))`.
    pub fn fock_inner(&self, other: &Self, t: f64) -> Result<Complex64> {
        if !(t > 0.0) {
            return Err(Error::InvalidParameter(format!("T must be positive, got {t}")));
        }
        self.check_shape(other)?;
        let mut weight = 1.0;
        let mut total = Complex64::default();
        for n in 0..self.ranks.len().min(other.ranks.len()) {
            if n > 0 {
                weight *= t / n as f64;
            }
            let mut s = Complex64::default();
            for (idx, a) in &self.ranks[n] {
                if let Some(b) = other.ranks[n].get(idx) {
                    s += a * b.conj();
                }
            }
            total += weight * s;
        }
        Ok(total)
    }

    /// Bilinear pairing `Σ_I α(I) x(I)` with a mixed-rank coefficient family.
    pub fn pair(&self, coeffs: &BTreeMap<IndexTuple, Complex64>) -> Complex64 {
        coeffs.iter().map(|(idx, x)| self.get(idx) * x).sum()
    }

    /// `α ∘ Φ_θ`: an entry with `n` factors of which `j` are central is
    /// multiplied by `e^{iθ(n+j)}`.
    pub fn grading_pullback(&self, theta: f64) -> Self {
        self.map_entries(|idx, v| {
            let l = self.homogeneous_degree(idx) as f64;
            v * Complex64::from_polar(1.0, theta * l)
        })
    }

    /// Fejér mean `∫ α∘Φ_θ F_n(θ) dθ`, computed from the Fourier coefficients
    /// of the Fejér kernel: the degree-`l` component is weighted by
    /// `max(0, 1 − l/n)`.
    pub fn fejer_truncate(&self, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("Fejér order must be positive".into()));
        }
        Ok(self.map_entries(|idx, v| {
            let l = self.homogeneous_degree(idx) as f64;
            v * (1.0 - l / n as f64).max(0.0)
        }))
    }

    pub fn to_records(&self) -> Vec<FockRecord> {
        self.entries()
            .map(|(idx, v)| FockRecord {
                rank: idx.len(),
                index: idx.clone(),
                value: [v.re, v.im],
            })
            .collect()
    }

    pub fn to_file(&self) -> FockFile {
        FockFile {
            k: self.k,
            d: self.d,
            maxrank: self.maxrank(),
            entries: self.to_records(),
        }
    }

    pub fn from_file(file: &FockFile) -> Result<Self> {
        let mut out = Self::zero(file.k, file.d, file.maxrank);
        for rec in &file.entries {
            if rec.rank != rec.index.len() {
                return Err(Error::Config(format!(
                    "record rank {} does not match index length {}",
                    rec.rank,
                    rec.index.len()
                )));
            }
            out.set(&rec.index, Complex64::new(rec.value[0], rec.value[1]))?;
        }
        Ok(out)
    }
}

/// One stored tensor entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FockRecord {
    pub rank: usize,
    pub index: Vec<usize>,
    pub value: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FockFile {
    pub k: usize,
    pub d: usize,
    pub maxrank: usize,
    pub entries: Vec<FockRecord>,
}

pub(crate) fn basis_directions(cfg: &GroupConfig) -> Vec<Direction> {
    (0..cfg.basis_len())
        .map(|b| Direction {
            h: cfg.basis_element(BasisIndex::new(b, cfg).expect("in range")),
        })
        .collect()
}

/// Left derivatives of a holomorphic polynomial at the identity, up to `maxrank`.
pub fn taylor(f: &Polynomial, cfg: &GroupConfig, maxrank: usize) -> Result<FockTensor> {
    f.check_config(cfg)?;
    if !f.is_holomorphic() {
        return Err(Error::NotHolomorphic);
    }
    let degree = f.graded_degree();
    if degree > DEFAULT_DEGREE_LIMIT {
        return Err(Error::DegreeLimit {
            degree,
            limit: DEFAULT_DEGREE_LIMIT,
        });
    }
    if maxrank < degree {
        return Err(Error::RankTooSmall { maxrank, degree });
    }
    let dirs = basis_directions(cfg);
    let mut out = FockTensor::zero_for(cfg, maxrank);
    // depth-first over suffixes: the polynomial stored with a tuple is
    // h̃_{I_1}⋯h̃_{I_n} f; prepending b applies h̃_b on the outside
    let mut stack: Vec<(IndexTuple, Polynomial)> = vec![(Vec::new(), f.clone())];
    while let Some((idx, p)) = stack.pop() {
        out.set(&idx, p.constant_term())?;
        if idx.len() == maxrank {
            continue;
        }
        for (b, dir) in dirs.iter().enumerate() {
            let q = lid(&p, dir, cfg)?;
            if q.is_zero() {
                continue;
            }
            let mut next = Vec::with_capacity(idx.len() + 1);
            next.push(b);
            next.extend_from_slice(&idx);
            stack.push((next, q));
        }
    }
    Ok(out)
}

/// `g ↦ Σ_n (1/n!) ⟨α_n, g^{⊗n}⟩` with `g` expanded in the basis coordinates.
pub fn inverse_taylor(alpha: &FockTensor) -> Polynomial {
    let (k, d) = (alpha.k, alpha.d);
    let nvars = 2 * (k + d);
    let mut terms: BTreeMap<Vec<u8>, Complex64> = BTreeMap::new();
    let mut factorial = 1.0;
    for (n, r) in alpha.ranks.iter().enumerate() {
        if n > 0 {
            factorial *= n as f64;
        }
        for (idx, v) in r {
            let mut mono = vec![0u8; nvars];
            for &b in idx {
                // basis b < k pairs with w_b, central b with c_{b-k}
                mono[b] += 1;
            }
            *terms.entry(mono).or_default() += v / factorial;
        }
    }
    Polynomial::from_terms(k, d, terms).expect("monomials have the right length")
}

/// `max |⟨α, u⊗(h⊗k − k⊗h − [h,k])⊗v⟩|` over basis monomials with total
/// rank at most `maxrank`. Zero certifies `α ∈ J⁰` up to that rank only.
pub fn j0_residual(alpha: &FockTensor, cfg: &GroupConfig) -> Result<f64> {
    if alpha.k != cfg.k() || alpha.d != cfg.d() {
        return Err(Error::Config("tensor and group shapes differ".into()));
    }
    let b = cfg.basis_len();
    let k = cfg.k();
    let mut worst = 0.0_f64;
    for r in 2..=alpha.maxrank() {
        let mut idx = vec![0usize; r];
        loop {
            for p in 0..r - 1 {
                let (h, kk) = (idx[p], idx[p + 1]);
                if h == kk {
                    continue;
                }
                let mut swapped = idx.clone();
                swapped.swap(p, p + 1);
                let mut value = alpha.get(&idx) - alpha.get(&swapped);
                if h < k && kk < k {
                    let mut shorter = Vec::with_capacity(r - 1);
                    shorter.extend_from_slice(&idx[..p]);
                    shorter.push(0);
                    shorter.extend_from_slice(&idx[p + 2..]);
                    for m in 0..cfg.d() {
                        let w = cfg.omega_entry(m, h, kk);
                        if w == Complex64::default() {
                            continue;
                        }
                        shorter[p] = k + m;
                        value -= w * alpha.get(&shorter);
                    }
                }
                worst = worst.max(value.norm());
            }
            if !odometer(&mut idx, b) {
                break;
            }
        }
    }
    Ok(worst)
}

/// Advances `idx` to the next tuple in lexicographic order; false after the last.
pub(crate) fn odometer(idx: &mut [usize], base: usize) -> bool {
    for slot in idx.iter_mut().rev() {
        *slot += 1;
        if *slot < base {
            return true;
        }
        *slot = 0;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{heat_expectation, parse_polynomial};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn taylor_of_c1() {
        let cfg = GroupConfig::heisenberg();
        let f = parse_polynomial("c1", 2, 1).unwrap();
        let a = taylor(&f, &cfg, 2).unwrap();
        assert_eq!(a.nnz(), 3);
        assert_eq!(a.get(&[2]), c(1.0, 0.0));
        assert_eq!(a.get(&[0, 1]), c(0.5, 0.0));
        assert_eq!(a.get(&[1, 0]), c(-0.5, 0.0));
        assert!((a.fock_norm_sq(1.0).unwrap() - 1.25).abs() < 1e-15);
        // rank-2 part pairs with ½ω(w,w) = 0
        assert_eq!(inverse_taylor(&a), f);
    }

    #[test]
    fn taylor_of_linear_and_constant() {
        let cfg = GroupConfig::heisenberg();
        let a = taylor(&parse_polynomial("w1", 2, 1).unwrap(), &cfg, 3).unwrap();
        assert_eq!(a.nnz(), 1);
        assert_eq!(a.get(&[0]), c(1.0, 0.0));
        for t in [0.5, 2.0] {
            assert!((a.fock_norm_sq(t).unwrap() - t).abs() < 1e-15);
        }
        let k = taylor(&parse_polynomial("2-3i", 2, 1).unwrap(), &cfg, 0).unwrap();
        assert_eq!(k.nnz(), 1);
        assert_eq!(k.scalar(), c(2.0, -3.0));
        assert_eq!(FockTensor::zero(2, 1, 3).fock_norm_sq(1.0).unwrap(), 0.0);
    }

    #[test]
    fn taylor_errors() {
        let cfg = GroupConfig::heisenberg();
        let bar = parse_polynomial("wbar1", 2, 1).unwrap();
        assert_eq!(taylor(&bar, &cfg, 3), Err(Error::NotHolomorphic));
        let c1 = parse_polynomial("c1", 2, 1).unwrap();
        assert_eq!(
            taylor(&c1, &cfg, 1),
            Err(Error::RankTooSmall { maxrank: 1, degree: 2 })
        );
    }

    #[test]
    fn inverse_taylor_of_scalar() {
        let mut a = FockTensor::zero(2, 1, 0);
        a.set(&[], c(1.0, 0.0)).unwrap();
        assert_eq!(
            inverse_taylor(&a),
            Polynomial::constant(2, 1, c(1.0, 0.0))
        );
    }

    #[test]
    fn round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for cfg in [GroupConfig::heisenberg(), GroupConfig::random_skew(3, 2, &mut rng)] {
            for _ in 0..100 {
                let f = Polynomial::random_holomorphic(cfg.k(), cfg.d(), 5, 5, &mut rng);
                let a = taylor(&f, &cfg, 5).unwrap();
                let back = inverse_taylor(&a);
                assert!(back.distance(&f).unwrap() < 1e-12);
                let again = taylor(&back, &cfg, 5).unwrap();
                assert!(again.sub(&a).unwrap().fock_norm_sq(1.0).unwrap() < 1e-24);
            }
        }
    }

    #[test]
    fn isometry_against_heat_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        for cfg in [GroupConfig::heisenberg(), GroupConfig::random_skew(3, 2, &mut rng)] {
            for _ in 0..20 {
                let f = Polynomial::random_holomorphic(cfg.k(), cfg.d(), 4, 4, &mut rng);
                let t = 0.5 + rng.random::<f64>();
                let a = taylor(&f, &cfg, 4).unwrap();
                let fock = a.fock_norm_sq(t).unwrap();
                let heat = heat_expectation(&f.modulus_sq(), t, &cfg).unwrap();
                assert!((fock - heat.re).abs() <= 1e-10 * fock.max(1e-300));
                assert!(heat.im.abs() <= 1e-10 * fock);
            }
        }
    }

    #[test]
    fn j0_membership() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let cfg = GroupConfig::random_skew(3, 1, &mut rng);
        for _ in 0..20 {
            let f = Polynomial::random_holomorphic(3, 1, 4, 5, &mut rng);
            let a = taylor(&f, &cfg, 4).unwrap();
            assert!(j0_residual(&a, &cfg).unwrap() <= 1e-12);
            let rotated = a.grading_pullback(rng.random::<f64>() * 6.0);
            assert!(j0_residual(&rotated, &cfg).unwrap() <= 1e-12);
        }
        assert_eq!(j0_residual(&FockTensor::zero(3, 1, 3), &cfg).unwrap(), 0.0);
    }

    #[test]
    fn symmetric_rank_two_tensor_is_not_in_j0() {
        let cfg = GroupConfig::heisenberg();
        let mut a = FockTensor::zero(2, 1, 2);
        a.set(&[0, 1], c(0.7, 0.0)).unwrap();
        a.set(&[1, 0], c(0.7, 0.0)).unwrap();
        a.set(&[0, 0], c(1.0, 0.0)).unwrap();
        assert!((j0_residual(&a, &cfg).unwrap() - 0.0).abs() < 1e-15);
        // with a rank-1 central entry the bracket term is unmatched
        let mut b = a.clone();
        b.set(&[2], c(1.0, 0.0)).unwrap();
        assert!((j0_residual(&b, &cfg).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn grading_and_fejer() {
        let cfg = GroupConfig::heisenberg();
        let a = taylor(&parse_polynomial("c1 + w1^2*c1", 2, 1).unwrap(), &cfg, 4).unwrap();
        assert_eq!(a.grading_pullback(0.0), a);
        let c1 = taylor(&parse_polynomial("c1", 2, 1).unwrap(), &cfg, 2).unwrap();
        let rotated = c1.grading_pullback(std::f64::consts::PI);
        assert!(rotated.sub(&c1).unwrap().fock_norm_sq(1.0).unwrap() < 1e-28);
        for i in 0..16 {
            let theta = i as f64 * 0.4;
            let r = a.grading_pullback(theta);
            assert!((r.fock_norm_sq(1.3).unwrap() - a.fock_norm_sq(1.3).unwrap()).abs() < 1e-12);
        }

        let mut lin = FockTensor::zero(2, 1, 1);
        lin.set(&[0], c(2.0, 1.0)).unwrap();
        assert_eq!(lin.fejer_truncate(2).unwrap().get(&[0]), c(1.0, 0.5));
        for n in 1..6 {
            let t = a.fejer_truncate(n).unwrap();
            assert_eq!(t.scalar(), a.scalar());
            for r in (n + 1)..=a.maxrank() {
                assert!(t.rank(r).unwrap().is_empty());
            }
        }
        assert!(a.fejer_truncate(0).is_err());
    }

    #[test]
    fn records_round_trip() {
        let cfg = GroupConfig::heisenberg();
        let a = taylor(&parse_polynomial("c1*w2 + 2i*w1", 2, 1).unwrap(), &cfg, 3).unwrap();
        let json = serde_json::to_string(&a.to_file()).unwrap();
        let file: FockFile = serde_json::from_str(&json).unwrap();
        assert_eq!(FockTensor::from_file(&file).unwrap(), a);
    }
}

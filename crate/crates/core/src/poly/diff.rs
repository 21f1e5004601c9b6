use num_complex::Complex64;

use super::{Monomial, Polynomial, DEFAULT_DEGREE_LIMIT};
use crate::algebra::{AlgebraElement, GroupConfig};
use crate::error::{Error, Result};

/// Direction `h = (A, a)` of a left-invariant vector field.
#[derive(Debug, Clone, PartialEq)]
pub struct Direction {
    pub h: AlgebraElement,
}

impl Direction {
    pub fn new(cfg: &GroupConfig, h: AlgebraElement) -> Result<Self> {
        cfg.check(&h)?;
        Ok(Self { h })
    }

    /// The `2(k+d)` real directions `(e_j,0), (ie_j,0), (0,f_m), (0,if_m)`
    /// whose squared fields sum to `L`.
    pub fn real_frame(cfg: &GroupConfig) -> Vec<Direction> {
        let i = Complex64::new(0.0, 1.0);
        let mut out = Vec::with_capacity(2 * cfg.basis_len());
        for b in 0..cfg.basis_len() {
            let e = cfg.basis_element(crate::algebra::BasisIndex::new(b, cfg).unwrap());
            out.push(Direction { h: e.clone() });
            out.push(Direction { h: e.scale(i) });
        }
        out
    }
}

/// Left-invariant derivative `(h̃ f)(g) = d/dt f(g·e^{th})|_{t=0}`.
///
/// For `h = (A, a)` this is
/// `Σ A_j ∂_{w_j} + Ā_j ∂_{w̄_j} + Σ v_m ∂_{c_m} + v̄_m ∂_{c̄_m}` with
/// `v(w) = a + ½ω(w, A)`.
pub fn lid(f: &Polynomial, h: &Direction, cfg: &GroupConfig) -> Result<Polynomial> {
    f.check_config(cfg)?;
    cfg.check(&h.h)?;
    let (k, d) = (cfg.k(), cfg.d());
    let a_vec = &h.h.w;
    let a_cen = &h.h.c;
    // (Ω_m A)_i, the coefficient of w_i in ω_m(w, A)
    let omega_a: Vec<Vec<Complex64>> = (0..d).map(|m| cfg.omega_apply(m, a_vec)).collect();

    let mut out = Polynomial::zero(k, d);
    let emit = |out: &mut Polynomial, base: &Monomial, extra: Option<usize>, coef: Complex64| {
        if coef == Complex64::default() {
            return;
        }
        let mut mono = base.clone();
        if let Some(v) = extra {
            mono[v] += 1;
        }
        out.add_term(mono, coef);
    };

    for (mono, &coef) in f.terms() {
        for j in 0..k {
            for (var, dir) in [(j, a_vec[j]), (k + d + j, a_vec[j].conj())] {
                let e = mono[var];
                if e == 0 || dir == Complex64::default() {
                    continue;
                }
                let mut base = mono.clone();
                base[var] -= 1;
                emit(&mut out, &base, None, coef * e as f64 * dir);
            }
        }
        for m in 0..d {
            for conj in [false, true] {
                let var = if conj { 2 * k + d + m } else { k + m };
                let e = mono[var];
                if e == 0 {
                    continue;
                }
                let mut base = mono.clone();
                base[var] -= 1;
                let scale = coef * e as f64;
                let a_m = if conj { a_cen[m].conj() } else { a_cen[m] };
                emit(&mut out, &base, None, scale * a_m);
                for (i, &oa) in omega_a[m].iter().enumerate() {
                    let (oa, wvar) = if conj { (oa.conj(), k + d + i) } else { (oa, i) };
                    emit(&mut out, &base, Some(wvar), scale * 0.5 * oa);
                }
            }
        }
    }
    out.cleanup();
    Ok(out)
}

/// `L F = Σ_h h̃² F` over the real frame `(e_j,0), (ie_j,0), (0,f_m), (0,if_m)`.
pub fn apply_l(f: &Polynomial, cfg: &GroupConfig) -> Result<Polynomial> {
    f.check_config(cfg)?;
    let mut out = Polynomial::zero_for(cfg);
    for dir in Direction::real_frame(cfg) {
        let once = lid(f, &dir, cfg)?;
        let twice = lid(&once, &dir, cfg)?;
        for (m, c) in twice.terms {
            out.add_term(m, c);
        }
    }
    out.cleanup();
    Ok(out)
}

/// Exact `∫ F dν_T = Σ_m (T/4)^m / m! · (L^m F)(e)`.
///
/// The series is finite because `L` lowers graded degree by at least two.
pub fn heat_expectation(f: &Polynomial, t: f64, cfg: &GroupConfig) -> Result<Complex64> {
    heat_expectation_with_limit(f, t, cfg, DEFAULT_DEGREE_LIMIT)
}

pub fn heat_expectation_with_limit(
    f: &Polynomial,
    t: f64,
    cfg: &GroupConfig,
    degree_limit: usize,
) -> Result<Complex64> {
    if !(t > 0.0) {
        return Err(Error::InvalidParameter(format!("T must be positive, got {t}")));
    }
    let degree = f.graded_degree();
    if degree > degree_limit {
        return Err(Error::DegreeLimit {
            degree,
            limit: degree_limit,
        });
    }
    let mut current = f.clone();
    let mut weight = 1.0;
    let mut total = Complex64::default();
    let mut m = 0usize;
    while !current.is_zero() {
        total += weight * current.constant_term();
        m += 1;
        weight *= t / 4.0 / m as f64;
        current = apply_l(&current, cfg)?;
    }
    Ok(total)
}

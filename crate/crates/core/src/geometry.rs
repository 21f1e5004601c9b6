//! Lengths of horizontal-free paths in `G_CM`, upper bounds on the distance
//! from the identity by path optimization, and pointwise bounds for the
//! heat semigroup that depend on that distance.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{GroupConfig, GroupElement};
use crate::error::{Error, Result};
use crate::fock::taylor;
use crate::poly::{heat_expectation, Polynomial};
use crate::stochastic::{heat_mc_fn, MCParams, PathRng};

/// 8-point Gauss–Legendre nodes and weights on `[-1, 1]`.
const GL_NODES: [f64; 8] = [
    -0.960_289_856_497_536_2,
    -0.796_666_477_413_626_7,
    -0.525_532_409_916_329,
    -0.183_434_642_495_649_8,
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_2,
];
const GL_WEIGHTS: [f64; 8] = [
    0.101_228_536_290_376_26,
    0.222_381_034_453_374_47,
    0.313_706_645_877_887_3,
    0.362_683_783_378_362,
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_47,
    0.101_228_536_290_376_26,
];

pub const DEFAULT_RESTARTS: usize = 8;
pub const DEFAULT_SEGMENTS: usize = 4;

/// Piecewise-linear path in the `(w, c)` chart through `g_0 = e, g_1, …, g_M`.
#[derive(Debug, Clone, PartialEq)]
pub struct CMPath {
    points: Vec<GroupElement>,
}

impl CMPath {
    pub fn new(cfg: &GroupConfig, points: Vec<GroupElement>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidParameter("a path needs at least two points".into()));
        }
        for g in &points {
            cfg.check(g)?;
        }
        if !points[0].is_identity() {
            return Err(Error::InvalidParameter("path must start at the identity".into()));
        }
        Ok(Self { points })
    }

    /// `M` equal chart-linear pieces from `e` to `h`.
    pub fn straight(cfg: &GroupConfig, h: &GroupElement, segments: usize) -> Result<Self> {
        let m = segments.max(1);
        let e = cfg.identity();
        let points = (0..=m)
            .map(|i| {
                let s = Complex64::new(i as f64 / m as f64, 0.0);
                e.clone() + h.scale(s)
            })
            .collect();
        Self::new(cfg, points)
    }

    pub fn points(&self) -> &[GroupElement] {
        &self.points
    }

    pub fn segments(&self) -> usize {
        self.points.len() - 1
    }

    pub fn end(&self) -> &GroupElement {
        self.points.last().unwrap()
    }

    /// Same curve with every segment split at its chart midpoint.
    pub fn refine(&self) -> Self {
        let mut points = Vec::with_capacity(2 * self.points.len() - 1);
        for pair in self.points.windows(2) {
            points.push(pair[0].clone());
            points.push((pair[0].clone() + pair[1].clone()).scale(Complex64::new(0.5, 0.0)));
        }
        points.push(self.end().clone());
        Self { points }
    }

    /// Pointwise left translate `g·σ(s)`, re-anchored so that it starts at
    /// `e` when `g·σ(0) = g`: the returned path is `σ ↦ g·σ` as a list of
    /// chart points (the first point is `g`, not `e`).
    pub fn left_translate_points(&self, cfg: &GroupConfig, g: &GroupElement) -> Vec<GroupElement> {
        self.points.iter().map(|p| cfg.mul_unchecked(g, p)).collect()
    }
}

fn segment_length(cfg: &GroupConfig, a: &GroupElement, b: &GroupElement, scratch: &mut [Complex64]) -> f64 {
    let dw: Vec<Complex64> = a.w.iter().zip(&b.w).map(|(x, y)| y - x).collect();
    let dw_sq: f64 = dw.iter().map(|z| z.norm_sqr()).sum();
    let mut total = 0.0;
    let mut w = vec![Complex64::default(); a.w.len()];
    for (x, wt) in GL_NODES.iter().zip(GL_WEIGHTS) {
        let s = 0.5 * (x + 1.0);
        for (j, slot) in w.iter_mut().enumerate() {
            *slot = a.w[j] + s * dw[j];
        }
        cfg.omega_into(&w, &dw, scratch);
        let vert: f64 = scratch
            .iter()
            .zip(a.c.iter().zip(&b.c))
            .map(|(om, (ca, cb))| (cb - ca - 0.5 * om).norm_sqr())
            .sum();
        total += 0.5 * wt * (dw_sq + vert).sqrt();
    }
    total
}

/// Length of the chart-linear polyline through `points` (no identity check).
pub fn polyline_length(cfg: &GroupConfig, points: &[GroupElement]) -> f64 {
    let mut scratch = vec![Complex64::default(); cfg.d()];
    points
        .windows(2)
        .map(|p| segment_length(cfg, &p[0], &p[1], &mut scratch))
        .sum()
}

/// `∫ √(‖w'‖² + ‖c' − ½ω(w, w')‖²) ds`, segment by segment.
pub fn path_length(cfg: &GroupConfig, path: &CMPath) -> f64 {
    polyline_length(cfg, &path.points)
}

/// Derivative-free minimization with the standard reflection, expansion,
/// contraction and shrink coefficients. Stops after `budget` evaluations or
/// when the simplex values agree to `1e-14`.
fn nelder_mead(
    f: &dyn Fn(&[f64]) -> f64,
    x0: &[f64],
    step: f64,
    budget: usize,
) -> (Vec<f64>, f64) {
    let n = x0.len();
    if n == 0 {
        return (Vec::new(), f(x0));
    }
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += step;
        simplex.push(x);
    }
    let mut values: Vec<f64> = simplex.iter().map(|x| f(x)).collect();
    let mut evals = n + 1;
    let blend = |a: &[f64], b: &[f64], t: f64| -> Vec<f64> {
        a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect()
    };
    while evals < budget {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();
        if values[n] - values[0] <= 1e-14 * (1.0 + values[0].abs()) {
            break;
        }
        let mut centroid = vec![0.0; n];
        for x in &simplex[..n] {
            for (c, v) in centroid.iter_mut().zip(x) {
                *c += v / n as f64;
            }
        }
        let worst = simplex[n].clone();
        let reflected = blend(&centroid, &worst, -1.0);
        let fr = f(&reflected);
        evals += 1;
        if fr < values[0] {
            let expanded = blend(&centroid, &worst, -2.0);
            let fe = f(&expanded);
            evals += 1;
            if fe < fr {
                simplex[n] = expanded;
                values[n] = fe;
            } else {
                simplex[n] = reflected;
                values[n] = fr;
            }
        } else if fr < values[n - 1] {
            simplex[n] = reflected;
            values[n] = fr;
        } else {
            let (cand, fc) = if fr < values[n] {
                let c = blend(&centroid, &reflected, 0.5);
                let v = f(&c);
                (c, v)
            } else {
                let c = blend(&centroid, &worst, 0.5);
                let v = f(&c);
                (c, v)
            };
            evals += 1;
            if fc < values[n].min(fr) {
                simplex[n] = cand;
                values[n] = fc;
            } else {
                let best = simplex[0].clone();
                for i in 1..=n {
                    simplex[i] = blend(&best, &simplex[i], 0.5);
                    values[i] = f(&simplex[i]);
                }
                evals += n;
            }
        }
    }
    let best = (0..=n)
        .min_by(|&a, &b| values[a].total_cmp(&values[b]))
        .unwrap();
    (simplex[best].clone(), values[best])
}

fn pack(points: &[GroupElement]) -> Vec<f64> {
    let mut x = Vec::new();
    for g in points {
        for z in g.w.iter().chain(&g.c) {
            x.push(z.re);
            x.push(z.im);
        }
    }
    x
}

fn unpack(x: &[f64], k: usize, d: usize) -> Vec<GroupElement> {
    let per = 2 * (k + d);
    x.chunks(per)
        .map(|ch| {
            let z: Vec<Complex64> = ch.chunks(2).map(|p| Complex64::new(p[0], p[1])).collect();
            GroupElement::new(z[..k].to_vec(), z[k..].to_vec())
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistanceOptions {
    pub segments: usize,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for DistanceOptions {
    fn default() -> Self {
        Self {
            segments: DEFAULT_SEGMENTS,
            restarts: DEFAULT_RESTARTS,
            seed: 0,
        }
    }
}

/// Upper bound on `d(e, h)`: the shortest path found among chart polylines
/// with `segments` pieces.
///
/// The optimization runs on the resolutions `M_0, 2M_0, …, M` where `M_0` is
/// the odd part of `M`. Each level starts from the midpoint refinement of the
/// previous best, which has the same length, so the result never exceeds the
/// straight-path length `‖h‖` and never increases when `M` is doubled.
/// Restart 0 is the warm start itself; the others perturb it with
/// streams derived from `(seed, level, restart)`.
pub fn distance_upper(cfg: &GroupConfig, h: &GroupElement, opts: &DistanceOptions) -> Result<f64> {
    Ok(shortest_path(cfg, h, opts)?.1)
}

/// As [`distance_upper`], also returning the best path.
pub fn shortest_path(
    cfg: &GroupConfig,
    h: &GroupElement,
    opts: &DistanceOptions,
) -> Result<(CMPath, f64)> {
    cfg.check(h)?;
    if opts.segments == 0 || opts.restarts == 0 {
        return Err(Error::InvalidParameter("segments and restarts must be positive".into()));
    }
    let mut levels = vec![opts.segments];
    while levels.last().unwrap() % 2 == 0 {
        let next = levels.last().unwrap() / 2;
        levels.push(next);
    }
    levels.reverse();

    let (k, d) = (cfg.k(), cfg.d());
    let scale = h.norm_sq().sqrt().max(1e-3);
    let mut best = CMPath::straight(cfg, h, levels[0])?;
    let mut best_len = path_length(cfg, &best);
    for (li, &m) in levels.iter().enumerate() {
        if li > 0 {
            best = best.refine();
        }
        if m < 2 {
            continue;
        }
        let interior = &best.points[1..m];
        let x0 = pack(interior);
        let objective = |x: &[f64]| -> f64 {
            let mut pts = Vec::with_capacity(m + 1);
            pts.push(cfg.identity());
            pts.extend(unpack(x, k, d));
            pts.push(h.clone());
            polyline_length(cfg, &pts)
        };
        let budget = 200 * x0.len();
        let step = 0.25 * scale / m as f64;
        let runs: Vec<(Vec<f64>, f64)> = (0..opts.restarts)
            .into_par_iter()
            .map(|r| {
                let mut start = x0.clone();
                if r > 0 {
                    let mut rng = PathRng::new(opts.seed, ((li as u64) << 32) | r as u64);
                    for v in start.iter_mut() {
                        *v += scale * (rng.uniform() - 0.5) / m as f64;
                    }
                }
                nelder_mead(&objective, &start, step, budget)
            })
            .collect();
        for (x, v) in runs {
            if v < best_len {
                let mut pts = vec![cfg.identity()];
                pts.extend(unpack(&x, k, d));
                pts.push(h.clone());
                best = CMPath { points: pts };
                best_len = v;
            }
        }
    }
    Ok((best, best_len))
}

/// `c(t) = t/(eᵗ − 1)` with `c(0) = 1`.
pub fn c_fn(t: f64) -> f64 {
    if t.abs() < 1e-8 {
        1.0 - t / 2.0
    } else {
        t / t.exp_m1()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundRow {
    pub point: GroupElement,
    pub value: f64,
    pub bound: f64,
    pub margin: f64,
    pub d_upper: f64,
}

impl BoundRow {
    /// `margin ≥ 0` up to rounding in the norm computation.
    pub fn pass(&self) -> bool {
        self.margin >= -1e-12 * self.bound.max(1.0)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub norm: f64,
    pub rows: Vec<BoundRow>,
}

impl BoundReport {
    pub fn violations(&self) -> usize {
        self.rows.iter().filter(|r| !r.pass()).count()
    }
}

/// `|f(h)| ≤ ‖f‖_{H²_T} e^{d(e,h)²/(2T)}` with `d` replaced by its upper bound.
pub fn bargmann_check(
    f: &Polynomial,
    cfg: &GroupConfig,
    points: &[GroupElement],
    t: f64,
    opts: &DistanceOptions,
) -> Result<BoundReport> {
    check_time(t)?;
    let alpha = taylor(f, cfg, f.graded_degree())?;
    let norm = alpha.fock_norm_sq(t)?.sqrt();
    let rows = points
        .iter()
        .map(|h| {
            let d_up = distance_upper(cfg, h, opts)?;
            let value = f.eval(h).norm();
            let bound = norm * (d_up * d_up / (2.0 * t)).exp();
            Ok(BoundRow {
                point: h.clone(),
                value,
                bound,
                margin: bound - value,
                d_upper: d_up,
            })
        })
        .collect::<Result<_>>()?;
    Ok(BoundReport { norm, rows })
}

/// `|S_T f(h)| ≤ ‖f‖_{L^p(ν_T)} exp(c(k(ω)T/2) d(e,h)² / (T(p−1)))`.
///
/// `S_T f(h)` comes from the heat oracle applied to `f(h·)`. The `L^p` norm is
/// exact for `p = 2`; otherwise it is the MC estimate `(E|f(g_T)|^p)^{1/p}`
/// from `mc`, which must then be supplied.
pub fn gaussian_bound_check(
    f: &Polynomial,
    cfg: &GroupConfig,
    points: &[GroupElement],
    t: f64,
    p: f64,
    opts: &DistanceOptions,
    mc: Option<&MCParams>,
) -> Result<BoundReport> {
    check_time(t)?;
    if !(p > 1.0) {
        return Err(Error::InvalidParameter(format!("p must exceed 1, got {p}")));
    }
    let norm = lp_norm(f, cfg, t, p, mc)?;
    let rate = c_fn(cfg.k_omega() * t / 2.0) / (t * (p - 1.0));
    let holomorphic = f.is_holomorphic();
    let rows = points
        .iter()
        .map(|h| {
            let d_up = distance_upper(cfg, h, opts)?;
            let value = if holomorphic {
                f.eval(h).norm()
            } else {
                heat_expectation(&f.left_translate(cfg, h)?, t, cfg)?.norm()
            };
            let bound = norm * (rate * d_up * d_up).exp();
            Ok(BoundRow {
                point: h.clone(),
                value,
                bound,
                margin: bound - value,
                d_upper: d_up,
            })
        })
        .collect::<Result<_>>()?;
    Ok(BoundReport { norm, rows })
}

fn lp_norm(f: &Polynomial, cfg: &GroupConfig, t: f64, p: f64, mc: Option<&MCParams>) -> Result<f64> {
    if p == 2.0 {
        return Ok(heat_expectation(&f.modulus_sq(), t, cfg)?.re.max(0.0).sqrt());
    }
    let params = mc.ok_or_else(|| {
        Error::InvalidParameter("an MC configuration is required for p != 2".into())
    })?;
    let params = MCParams { t, ..*params };
    let est = heat_mc_power(f, cfg, &params, p)?;
    Ok(est.powf(1.0 / p))
}

fn heat_mc_power(f: &Polynomial, cfg: &GroupConfig, params: &MCParams, p: f64) -> Result<f64> {
    heat_mc_fn(cfg, params, |g| Complex64::new(f.eval(g).norm().powf(p), 0.0)).map(|e| e.mean.re)
}

fn check_time(t: f64) -> Result<()> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter(format!("T must be positive, got {t}")));
    }
    Ok(())
}

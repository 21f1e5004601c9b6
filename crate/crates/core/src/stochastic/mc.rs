use num_complex::Complex64;
use serde::Serialize;

use super::{group_path, map_paths, sample_path, MCEstimate, MCParams};
use crate::algebra::{GroupConfig, GroupElement};
use crate::error::{Error, Result};
use crate::poly::{apply_l, Polynomial};

/// `E[f(g(T))]`.
pub fn heat_mc(f: &Polynomial, cfg: &GroupConfig, params: &MCParams) -> Result<MCEstimate> {
    Ok(heat_mc_many(std::slice::from_ref(f), cfg, params)?.remove(0))
}

/// `E[f(g(T))]` for several functions on the same paths.
pub fn heat_mc_many(
    fs: &[Polynomial],
    cfg: &GroupConfig,
    params: &MCParams,
) -> Result<Vec<MCEstimate>> {
    params.validate()?;
    for f in fs {
        f.check_config(cfg)?;
    }
    let per_path: Vec<Vec<Complex64>> = map_paths(params.paths, |i| {
        let g = sample_path(cfg, params, i).terminal_group(cfg);
        fs.iter().map(|f| f.eval(&g)).collect()
    });
    Ok(columns(&per_path, fs.len()))
}

/// `(S_T f)(h) = E[f(h·g(T))]`.
pub fn skeleton_mc(
    f: &Polynomial,
    h: &GroupElement,
    cfg: &GroupConfig,
    params: &MCParams,
) -> Result<MCEstimate> {
    Ok(skeleton_mc_many(std::slice::from_ref(f), std::slice::from_ref(h), cfg, params)?
        .remove(0)
        .remove(0))
}

/// `E[f(h·g(T))]` for every pair `(f, h)` on the same paths; indexed `[f][h]`.
pub fn skeleton_mc_many(
    fs: &[Polynomial],
    hs: &[GroupElement],
    cfg: &GroupConfig,
    params: &MCParams,
) -> Result<Vec<Vec<MCEstimate>>> {
    params.validate()?;
    for f in fs {
        f.check_config(cfg)?;
    }
    for h in hs {
        cfg.check(h)?;
    }
    let per_path: Vec<Vec<Complex64>> = map_paths(params.paths, |i| {
        let g = sample_path(cfg, params, i).terminal_group(cfg);
        let shifted: Vec<GroupElement> = hs.iter().map(|h| cfg.mul_unchecked(h, &g)).collect();
        fs.iter()
            .flat_map(|f| shifted.iter().map(move |x| f.eval(x)))
            .collect()
    });
    let flat = columns(&per_path, fs.len() * hs.len());
    Ok(flat.chunks(hs.len().max(1)).map(|c| c.to_vec()).collect())
}

/// `E[F(g(T))]` for an arbitrary function of the endpoint.
pub fn heat_mc_fn<F>(cfg: &GroupConfig, params: &MCParams, f: F) -> Result<MCEstimate>
where
    F: Fn(&GroupElement) -> Complex64 + Sync + Send,
{
    params.validate()?;
    let samples = map_paths(params.paths, |i| f(&sample_path(cfg, params, i).terminal_group(cfg)));
    Ok(MCEstimate::from_samples(&samples))
}

fn columns(per_path: &[Vec<Complex64>], width: usize) -> Vec<MCEstimate> {
    (0..width)
        .map(|j| {
            let col: Vec<Complex64> = per_path.iter().map(|row| row[j]).collect();
            MCEstimate::from_samples(&col)
        })
        .collect()
}

/// `E|c_coarse(T) − c_fine(T)|²` where the coarse path sums blocks of the
/// fine increments (`params.steps` is the fine resolution).
pub fn group_path_refinement_error(
    cfg: &GroupConfig,
    params: &MCParams,
    coarse_steps: usize,
) -> Result<MCEstimate> {
    params.validate()?;
    if coarse_steps == 0 || params.steps % coarse_steps != 0 {
        return Err(Error::InvalidParameter(format!(
            "{coarse_steps} does not divide {}",
            params.steps
        )));
    }
    let factor = params.steps / coarse_steps;
    let samples = map_paths(params.paths, |i| {
        let fine = sample_path(cfg, params, i);
        let coarse = fine.coarsen(factor).expect("divides");
        let a = fine.terminal_group(cfg);
        let b = coarse.terminal_group(cfg);
        a.c.iter().zip(&b.c).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>()
    });
    Ok(MCEstimate::from_real_samples(&samples))
}

/// Per-path `F(g(T)) − F(e) − ¼∫₀ᵀ (LF)(g(τ)) dτ` (trapezoid on the grid),
/// whose mean vanishes up to discretization error.
pub fn martingale_check(f: &Polynomial, cfg: &GroupConfig, params: &MCParams) -> Result<MCEstimate> {
    params.validate()?;
    let lf = apply_l(f, cfg)?;
    let f_e = f.constant_term();
    let dt = params.dt();
    let samples = map_paths(params.paths, |i| {
        let path = group_path(&sample_path(cfg, params, i), cfg);
        let vals: Vec<Complex64> = path.points.iter().map(|g| lf.eval(g)).collect();
        let n = vals.len() - 1;
        let integral = dt * (0.5 * (vals[0] + vals[n]) + vals[1..n].iter().sum::<Complex64>());
        f.eval(path.terminal()) - f_e - 0.25 * integral
    });
    Ok(MCEstimate::from_samples(&samples))
}

#[derive(Debug, Clone, Serialize)]
pub struct MomentLine {
    pub name: &'static str,
    pub estimate: MCEstimate,
    pub target: Complex64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MomentReport {
    pub lines: Vec<MomentLine>,
}

impl MomentReport {
    pub fn all_within(&self, sigmas: f64) -> bool {
        self.lines.iter().all(|l| l.estimate.within(l.target, sigmas))
    }
}

/// Gaussian moment identities for `φ(w) = Σ_j φ_j w_j` at `B(T)`.
///
/// With each real coordinate of variance `T/2`, `φ(B(T))` is circular with
/// `E|φ|² = T Σ|φ_j|²`, so `E(Re φ)² = E(Im φ)² = T Σ|φ_j|²/2`,
/// `E[φ²] = 0` and `E[e^φ] = 1`.
pub fn gaussian_moment_check(
    phi: &[Complex64],
    cfg: &GroupConfig,
    params: &MCParams,
) -> Result<MomentReport> {
    params.validate()?;
    if phi.len() != cfg.k() {
        return Err(Error::Dimension {
            what: "functional",
            expected: cfg.k(),
            got: phi.len(),
        });
    }
    let per_path: Vec<[Complex64; 5]> = map_paths(params.paths, |i| {
        let b = sample_path(cfg, params, i).terminal();
        let v: Complex64 = phi.iter().zip(&b.w).map(|(a, z)| a * z).sum();
        [
            v.exp(),
            Complex64::new(v.re * v.re, 0.0),
            Complex64::new(v.im * v.im, 0.0),
            Complex64::new(v.norm_sqr(), 0.0),
            v * v,
        ]
    });
    let half = params.t * phi.iter().map(|z| z.norm_sqr()).sum::<f64>() / 2.0;
    let names = ["E[exp(phi)]", "E[(Re phi)^2]", "E[(Im phi)^2]", "E[|phi|^2]", "E[phi^2]"];
    let targets = [1.0, half, half, 2.0 * half, 0.0];
    let lines = (0..5)
        .map(|j| {
            let col: Vec<Complex64> = per_path.iter().map(|r| r[j]).collect();
            MomentLine {
                name: names[j],
                estimate: MCEstimate::from_samples(&col),
                target: Complex64::new(targets[j], 0.0),
            }
        })
        .collect();
    Ok(MomentReport { lines })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_polynomial;

    fn p(s: &str) -> Polynomial {
        parse_polynomial(s, 2, 1).unwrap()
    }

    #[test]
    fn constant_has_zero_stderr() {
        let cfg = GroupConfig::heisenberg();
        let params = MCParams::new(1.0, 8, 100, 1).unwrap();
        let est = heat_mc(&p("1"), &cfg, &params).unwrap();
        assert_eq!(est.mean, Complex64::new(1.0, 0.0));
        assert_eq!(est.stderr, 0.0);
    }

    #[test]
    fn skeleton_at_identity_is_heat_mc() {
        let cfg = GroupConfig::heisenberg();
        let params = MCParams::new(1.0, 16, 500, 2).unwrap();
        let f = p("c1*cbar1 + w1^2");
        let a = heat_mc(&f, &cfg, &params).unwrap();
        let b = skeleton_mc(&f, &cfg.identity(), &cfg, &params).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn translated_modulus() {
        let cfg = GroupConfig::heisenberg();
        let params = MCParams::new(1.0, 16, 40_000, 3).unwrap();
        let h = GroupElement::from_real(&[1.0, 0.0], &[0.0]);
        let est = skeleton_mc(&p("w1*wbar1"), &h, &cfg, &params).unwrap();
        assert!(est.within(Complex64::new(2.0, 0.0), 3.0), "{est:?}");
    }

    #[test]
    fn holomorphic_mean_value() {
        let cfg = GroupConfig::heisenberg();
        let params = MCParams::new(1.0, 32, 20_000, 4).unwrap();
        let f = p("(1+i) + w1*c1 + c1^2 - 2*w2^3");
        let est = heat_mc(&f, &cfg, &params).unwrap();
        assert!(est.within(Complex64::new(1.0, 1.0), 3.0), "{est:?}");
    }

    #[test]
    fn moment_report() {
        let cfg = GroupConfig::heisenberg();
        let params = MCParams::new(1.0, 1, 100_000, 5).unwrap();
        let phi = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        let rep = gaussian_moment_check(&phi, &cfg, &params).unwrap();
        assert!(rep.all_within(3.0), "{rep:?}");
        assert_eq!(rep.lines[3].target, Complex64::new(1.0, 0.0));
        let zero = gaussian_moment_check(&[Complex64::default(); 2], &cfg, &params).unwrap();
        assert_eq!(zero.lines[0].estimate.mean, Complex64::new(1.0, 0.0));
        assert_eq!(zero.lines[3].estimate.mean, Complex64::default());
    }

    #[test]
    fn worker_count_does_not_change_estimates() {
        let cfg = GroupConfig::heisenberg();
        let params = MCParams::new(1.0, 16, 2_000, 6).unwrap();
        let f = p("c1*cbar1 + w1*wbar2");
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| heat_mc(&f, &cfg, &params).unwrap())
        };
        let a = run(1);
        let b = run(3);
        assert_eq!(a.mean.re.to_bits(), b.mean.re.to_bits());
        assert_eq!(a.stderr.to_bits(), b.stderr.to_bits());
    }
}

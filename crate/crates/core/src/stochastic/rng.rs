use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Counter-based stream for one path: the ChaCha key comes from the seed and
/// the stream id is the path index, so draws for a path never depend on
/// which thread produced them or in which order paths were visited.
pub struct PathRng {
    inner: ChaCha8Rng,
}

impl PathRng {
    pub fn new(seed: u64, path_index: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(path_index);
        Self { inner }
    }

    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    /// Box–Muller: a complex number whose real and imaginary parts are
    /// independent `N(0, variance_each)`.
    pub fn complex_gaussian(&mut self, variance_each: f64) -> Complex64 {
        let u1 = 1.0 - self.inner.random::<f64>();
        let u2 = self.inner.random::<f64>();
        let r = (-2.0 * u1.ln() * variance_each).sqrt();
        let (s, c) = (TAU * u2).sin_cos();
        Complex64::new(r * c, r * s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: Vec<_> = {
            let mut r = PathRng::new(42, 3);
            (0..5).map(|_| r.complex_gaussian(1.0)).collect()
        };
        let b: Vec<_> = {
            let mut r = PathRng::new(42, 3);
            (0..5).map(|_| r.complex_gaussian(1.0)).collect()
        };
        let c: Vec<_> = {
            let mut r = PathRng::new(42, 4);
            (0..5).map(|_| r.complex_gaussian(1.0)).collect()
        };
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn gaussian_moments() {
        let mut r = PathRng::new(1, 0);
        let n = 200_000;
        let (mut re2, mut im2, mut cross) = (0.0, 0.0, 0.0);
        for _ in 0..n {
            let z = r.complex_gaussian(0.5);
            re2 += z.re * z.re;
            im2 += z.im * z.im;
            cross += z.re * z.im;
        }
        let n = n as f64;
        // stderr of a chi-square mean with variance 2σ⁴ is σ²√(2/n) ≈ 0.0016
        assert!((re2 / n - 0.5).abs() < 0.008);
        assert!((im2 / n - 0.5).abs() < 0.008);
        assert!((cross / n).abs() < 0.006);
    }
}

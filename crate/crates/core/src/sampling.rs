//! Deterministic point sampling for the sup-norm estimators.
//!
//! All estimators in this crate are seeded; identical seeds give identical
//! sample streams and therefore byte-identical outputs.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::sumspace::{PExponent, SumSpaceSpec, SumVector};

/// Seeded random point source.
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn uniform(&mut self) -> f64 {
        self.rng.gen::<f64>()
    }

    /// Standard complex Gaussian via Box-Muller.
    pub fn complex_gaussian(&mut self) -> Complex64 {
        let u1: f64 = self.rng.gen::<f64>().max(1e-300);
        let u2: f64 = self.rng.gen();
        let r = (-2.0 * u1.ln()).sqrt();
        let phase = 2.0 * std::f64::consts::PI * u2;
        Complex64::new(r * phase.cos(), r * phase.sin())
    }

    /// Random point of the `ℓ_p` sphere of the given radius in `ℂ^n`.
    pub fn lp_sphere_point(&mut self, n: usize, p: &PExponent, radius: f64) -> Vec<Complex64> {
        let mut v: Vec<Complex64> = (0..n).map(|_| self.complex_gaussian()).collect();
        let norm = p.vector_norm(&v);
        if norm == 0.0 {
            v[0] = Complex64::new(radius, 0.0);
            return v;
        }
        let s = radius / norm;
        v.iter_mut().for_each(|z| *z *= s);
        v
    }

    /// Random point inside the `ℓ_p` ball (interior coverage, not exactly
    /// uniform).
    pub fn lp_ball_point(&mut self, n: usize, p: &PExponent, radius: f64) -> Vec<Complex64> {
        let shrink = self.uniform().powf(1.0 / (2 * n) as f64);
        self.lp_sphere_point(n, p, radius * shrink)
    }

    /// Random point of the sum-space sphere of the given radius.
    pub fn sphere_point(&mut self, spec: &SumSpaceSpec, radius: f64) -> SumVector {
        let raw: Vec<(usize, Vec<Complex64>)> = spec
            .blocks
            .iter()
            .enumerate()
            .map(|(i, b)| (i + 1, (0..b.dim).map(|_| self.complex_gaussian()).collect()))
            .collect();
        let x = SumVector::from_components(raw).expect("valid block layout");
        let norm = crate::sumspace::norm(spec, &x).expect("conforming sample");
        if norm == 0.0 {
            let dim = spec.blocks[0].dim;
            let mut v = vec![Complex64::new(0.0, 0.0); dim];
            v[0] = Complex64::new(radius, 0.0);
            return crate::sumspace::include(spec, 1, &v).expect("valid inclusion");
        }
        scale_vector(&x, radius / norm)
    }

    /// Random point of the open ball of the given radius.
    pub fn ball_point(&mut self, spec: &SumSpaceSpec, radius: f64) -> SumVector {
        let shrink = self.uniform().powf(1.0 / (2 * spec.scalar_len()) as f64);
        self.sphere_point(spec, radius * shrink)
    }

    /// Uniform point of the complex unit disc scaled by `radius`.
    pub fn disc_point(&mut self, radius: f64) -> Complex64 {
        let r = radius * self.uniform().sqrt();
        let phase = 2.0 * std::f64::consts::PI * self.uniform();
        Complex64::new(r * phase.cos(), r * phase.sin())
    }
}

/// Scales every coordinate of a sum vector by a real factor.
pub fn scale_vector(x: &SumVector, s: f64) -> SumVector {
    SumVector::from_components(
        x.components()
            .map(|(n, v)| (n, v.iter().map(|&z| z * s).collect())),
    )
    .expect("scaling preserves valid block positions")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sumspace::{norm, Block, OuterType};

    #[test]
    fn sphere_points_have_requested_norm() {
        let spec = SumSpaceSpec::new(
            vec![
                Block {
                    p: PExponent::Finite(2.0),
                    dim: 3,
                },
                Block {
                    p: PExponent::Finite(1.0),
                    dim: 2,
                },
            ],
            OuterType::Lq(1.0),
        )
        .unwrap();
        let mut sampler = Sampler::new(7);
        for _ in 0..50 {
            let x = sampler.sphere_point(&spec, 0.8);
            assert!((norm(&spec, &x).unwrap() - 0.8).abs() < 1e-12);
            let y = sampler.ball_point(&spec, 0.8);
            assert!(norm(&spec, &y).unwrap() <= 0.8 + 1e-12);
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let mut a = Sampler::new(42);
        let mut b = Sampler::new(42);
        for _ in 0..16 {
            assert_eq!(a.complex_gaussian(), b.complex_gaussian());
        }
    }

    #[test]
    fn lp_sphere_norm_matches() {
        let mut sampler = Sampler::new(1);
        let p = PExponent::Finite(3.0);
        let v = sampler.lp_sphere_point(4, &p, 2.5);
        assert!((p.vector_norm(&v) - 2.5).abs() < 1e-12);
    }
}

//! Minimal-sup-norm `∂̄` solutions over a holomorphic correction class.
//!
//! `u = homotopy_solve(f) + h` where `h` runs over holomorphic polynomials
//! of bounded degree and the sampled sup of `|u|` on a finite grid is
//! minimized (a linear Chebyshev problem, solved by Lawson's iteratively
//! reweighted least squares). The result is an upper bound for the true
//! minimum over that correction class, and `∂̄u = f` holds exactly because
//! the correction is holomorphic.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::multiindex::enumerate;
use crate::poly::PolyFunction;
use crate::sampling::Sampler;
use crate::sumspace::PExponent;

use super::{homotopy_solve, PolyForm01};

#[derive(Debug, Clone)]
pub struct MinSupOptions {
    pub irls_iterations: usize,
}

impl Default for MinSupOptions {
    fn default() -> Self {
        Self {
            irls_iterations: 120,
        }
    }
}

/// Deterministic grid in the closed `ℓ_p` ball of the given radius:
/// coordinate corners plus seeded sphere and interior points.
pub fn min_sup_grid(
    n: usize,
    radius: f64,
    p: &PExponent,
    count: usize,
    seed: u64,
) -> Vec<Vec<Complex64>> {
    let mut sampler = Sampler::new(seed);
    let mut grid = Vec::with_capacity(count + 2 * n + 1);
    grid.push(vec![Complex64::new(0.0, 0.0); n]);
    for j in 0..n {
        let mut plus = vec![Complex64::new(0.0, 0.0); n];
        plus[j] = Complex64::new(radius, 0.0);
        grid.push(plus);
        let mut imag = vec![Complex64::new(0.0, 0.0); n];
        imag[j] = Complex64::new(0.0, radius);
        grid.push(imag);
    }
    for i in 0..count {
        if i % 2 == 0 {
            grid.push(sampler.lp_sphere_point(n, p, radius));
        } else {
            grid.push(sampler.lp_ball_point(n, p, radius));
        }
    }
    grid
}

/// Holomorphic monomial basis `z^α`, `|α| ≤ degree`.
fn holomorphic_basis(n: usize, degree: u32) -> Vec<Vec<u32>> {
    enumerate(n as u32, degree)
        .into_iter()
        .map(|k| {
            let mut alpha = vec![0u32; n];
            for (pos, e) in k.entries() {
                alpha[pos as usize - 1] = e;
            }
            alpha
        })
        .collect()
}

fn eval_monomial(alpha: &[u32], x: &[Complex64]) -> Complex64 {
    let mut out = Complex64::new(1.0, 0.0);
    for (j, &e) in alpha.iter().enumerate() {
        if e > 0 {
            out *= x[j].powu(e);
        }
    }
    out
}

/// Returns `(u, sup)` with `∂̄u = f` exactly and `sup = max_grid |u|`, the
/// sampled sup of the best iterate.
pub fn min_sup_solution(
    f: &PolyForm01,
    grid: &[Vec<Complex64>],
    holo_degree: u32,
    options: &MinSupOptions,
) -> Result<(PolyFunction, f64)> {
    let n = f.n();
    let particular = homotopy_solve(f)?;
    if particular.is_zero() {
        return Ok((particular, 0.0));
    }
    let basis = holomorphic_basis(n, holo_degree);
    if grid.len() < basis.len() {
        return Err(Error::InvalidSpec(format!(
            "grid of {} points cannot determine {} holomorphic coefficients",
            grid.len(),
            basis.len()
        )));
    }
    for x in grid {
        if x.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: x.len(),
            });
        }
    }

    let rows = grid.len();
    let cols = basis.len();
    let design = DMatrix::from_fn(rows, cols, |i, j| eval_monomial(&basis[j], &grid[i]));
    let target = DMatrix::from_fn(rows, 1, |i, _| -particular.eval(&grid[i]));

    let mut weights = vec![1.0f64 / rows as f64; rows];
    // The zero correction is always a feasible candidate, so the result is
    // never worse than the particular solution itself.
    let mut best_sup = (0..rows)
        .map(|i| target[(i, 0)].norm())
        .fold(0.0f64, f64::max);
    let mut best_coeffs = DMatrix::from_element(cols, 1, Complex64::new(0.0, 0.0));

    for _ in 0..options.irls_iterations.max(1) {
        let mut a = design.clone();
        let mut b = target.clone();
        for i in 0..rows {
            let s = Complex64::new(weights[i].sqrt(), 0.0);
            for j in 0..cols {
                a[(i, j)] *= s;
            }
            b[(i, 0)] *= s;
        }
        let svd = a.svd(true, true);
        let coeffs = match svd.solve(&b, 1e-13) {
            Ok(c) => c,
            Err(_) => break,
        };

        // Residuals of the unweighted problem.
        let fitted = &design * &coeffs;
        let mut sup = 0.0f64;
        let mut moduli = Vec::with_capacity(rows);
        for i in 0..rows {
            let r = (fitted[(i, 0)] - target[(i, 0)]).norm();
            moduli.push(r);
            sup = sup.max(r);
        }
        if sup < best_sup {
            best_sup = sup;
            best_coeffs = coeffs;
        }
        // Lawson update: emphasize large residuals; the floor keeps every
        // point alive so later-active constraints can come back.
        let floor = 1e-12 * sup + 1e-300;
        let mut total = 0.0;
        for (w, r) in weights.iter_mut().zip(&moduli) {
            *w *= r + floor;
            total += *w;
        }
        if total <= 0.0 || !total.is_finite() {
            break;
        }
        for w in &mut weights {
            *w /= total;
        }
    }

    let mut correction = PolyFunction::zero(n);
    let zero_beta = vec![0u32; n];
    for (j, alpha) in basis.iter().enumerate() {
        correction.add_term(alpha, &zero_beta, best_coeffs[(j, 0)]);
    }
    let u = particular.add(&correction);
    let sup = grid
        .iter()
        .map(|x| u.eval(x).norm())
        .fold(0.0, f64::max);
    Ok((u, sup))
}

//! Sampled `C^m` norms: `Σ_{k ≤ m} sup_Ω ‖u^{(k)}‖`.
//!
//! Derivatives are symbolic (iterated directional derivatives of the
//! polynomial); only the supremum over points and unit directions is
//! sampled, so every value is a lower estimate of the true norm. The norm
//! of a `(0,1)`-form is the norm of `u(x, ξ) = f(x)ξ` on `Ω × B(1)`.

use num_complex::Complex64;

use crate::poly::PolyFunction;
use crate::sampling::Sampler;
use crate::sumspace::PExponent;

use super::PolyForm01;

#[derive(Debug, Clone)]
pub struct CmOptions {
    pub seed: u64,
    /// Sup sample count per derivative order (half sphere, half interior).
    pub point_samples: usize,
    /// Random unit direction tuples per derivative order, on top of the
    /// deterministic basis tuples.
    pub direction_tuples: usize,
}

impl Default for CmOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            point_samples: 8192,
            direction_tuples: 16,
        }
    }
}

fn sample_points(
    sampler: &mut Sampler,
    n: usize,
    p: &PExponent,
    radius: f64,
    count: usize,
) -> Vec<Vec<Complex64>> {
    let mut points = Vec::with_capacity(count + n);
    // Deterministic corners: radius on each coordinate axis.
    for j in 0..n {
        let mut v = vec![Complex64::new(0.0, 0.0); n];
        v[j] = Complex64::new(radius, 0.0);
        points.push(v);
    }
    for i in 0..count {
        if i % 2 == 0 {
            points.push(sampler.lp_sphere_point(n, p, radius));
        } else {
            points.push(sampler.lp_ball_point(n, p, radius));
        }
    }
    points
}

/// Direction tuples for derivative order `k`: coordinate bases (real and
/// imaginary axes), repeated-coordinate tuples, plus random unit tuples.
fn direction_tuples(
    sampler: &mut Sampler,
    n: usize,
    p: &PExponent,
    order: usize,
    random_tuples: usize,
) -> Vec<Vec<Vec<Complex64>>> {
    let mut tuples = Vec::new();
    let basis: Vec<Vec<Complex64>> = (0..n)
        .flat_map(|j| {
            let mut re = vec![Complex64::new(0.0, 0.0); n];
            re[j] = Complex64::new(1.0, 0.0);
            let mut im = vec![Complex64::new(0.0, 0.0); n];
            im[j] = Complex64::new(0.0, 1.0);
            [re, im]
        })
        .collect();
    // Same basis direction in every slot.
    for b in &basis {
        tuples.push(vec![b.clone(); order]);
    }
    // Mixed basis pairs for second order.
    if order == 2 {
        for a in &basis {
            for b in &basis {
                tuples.push(vec![a.clone(), b.clone()]);
            }
        }
    }
    for _ in 0..random_tuples {
        tuples.push(
            (0..order)
                .map(|_| sampler.lp_sphere_point(n, p, 1.0))
                .collect(),
        );
    }
    tuples
}

fn sup_abs(poly: &PolyFunction, points: &[Vec<Complex64>]) -> f64 {
    points
        .iter()
        .map(|x| poly.eval(x).norm())
        .fold(0.0, f64::max)
}

/// Core estimator over an `ℓ_p` ball of the given radius in `ℂ^n`.
fn cm_norm_core(
    u: &PolyFunction,
    m: u32,
    radius: f64,
    p: &PExponent,
    options: &CmOptions,
) -> f64 {
    let n = u.n();
    let mut sampler = Sampler::new(options.seed);
    let points = sample_points(&mut sampler, n, p, radius, options.point_samples);

    let mut total = sup_abs(u, &points);
    for order in 1..=m as usize {
        let tuples = direction_tuples(&mut sampler, n, p, order, options.direction_tuples);
        let mut sup = 0.0f64;
        for tuple in tuples {
            let mut derived = u.clone();
            for xi in &tuple {
                derived = derived.directional_derivative(xi);
                if derived.is_zero() {
                    break;
                }
            }
            sup = sup.max(sup_abs(&derived, &points));
        }
        total += sup;
    }
    total
}

/// `C^m` norm of a polynomial function over the `ℓ_p` ball of the given
/// radius (sampled lower estimate; derivatives exact).
pub fn cm_norm_function(
    u: &PolyFunction,
    m: u32,
    radius: f64,
    p: &PExponent,
    options: &CmOptions,
) -> f64 {
    cm_norm_core(u, m, radius, p, options)
}

/// `C^m` norm of a `(0,1)`-form via `u(x, ξ) = f(x)ξ = Σ_j f_j(x) ξ̄_j` on
/// `Ω × B(1)`, sampled over product points with directions normalized in
/// the product max norm.
pub fn cm_norm_form(
    f: &PolyForm01,
    m: u32,
    radius: f64,
    p: &PExponent,
    options: &CmOptions,
) -> f64 {
    let n = f.n();
    // Embed u(x, xi) into 2n variables: x in slots 1..=n, xi in n+1..=2n.
    let mut u = PolyFunction::zero(2 * n);
    for j in 1..=n {
        let fj = f.component(j).extend_vars(2 * n).expect("extension grows arity");
        u = u.add(&fj.mul(&PolyFunction::conj_var(2 * n, n + j)));
    }

    let mut sampler = Sampler::new(options.seed);
    // Product points: x on spheres/interior of radius, xi in B(1).
    let mut points = Vec::with_capacity(options.point_samples + 2 * n * n);
    for i in 0..n {
        for j in 0..n {
            let mut v = vec![Complex64::new(0.0, 0.0); 2 * n];
            v[i] = Complex64::new(radius, 0.0);
            v[n + j] = Complex64::new(1.0, 0.0);
            points.push(v);
        }
    }
    for i in 0..options.point_samples {
        let x = if i % 2 == 0 {
            sampler.lp_sphere_point(n, p, radius)
        } else {
            sampler.lp_ball_point(n, p, radius)
        };
        let xi = if i % 3 == 0 {
            sampler.lp_ball_point(n, p, 1.0)
        } else {
            sampler.lp_sphere_point(n, p, 1.0)
        };
        let mut v = x;
        v.extend(xi);
        points.push(v);
    }

    let mut total = sup_abs(&u, &points);
    for order in 1..=m as usize {
        // Directions on the product: unit in max(‖·‖_p, ‖·‖_p).
        let mut tuples = Vec::new();
        for j in 0..2 * n {
            let mut re = vec![Complex64::new(0.0, 0.0); 2 * n];
            re[j] = Complex64::new(1.0, 0.0);
            tuples.push(vec![re; order]);
        }
        if order == 2 {
            for a in 0..2 * n {
                for b in 0..2 * n {
                    let mut va = vec![Complex64::new(0.0, 0.0); 2 * n];
                    va[a] = Complex64::new(1.0, 0.0);
                    let mut vb = vec![Complex64::new(0.0, 0.0); 2 * n];
                    vb[b] = Complex64::new(1.0, 0.0);
                    tuples.push(vec![va, vb]);
                }
            }
        }
        for _ in 0..options.direction_tuples {
            tuples.push(
                (0..order)
                    .map(|_| {
                        let mut d = sampler.lp_sphere_point(n, p, 1.0);
                        d.extend(sampler.lp_sphere_point(n, p, 1.0));
                        d
                    })
                    .collect(),
            );
        }
        let mut sup = 0.0f64;
        for tuple in tuples {
            let mut derived = u.clone();
            for xi in &tuple {
                derived = derived.directional_derivative(xi);
                if derived.is_zero() {
                    break;
                }
            }
            sup = sup.max(sup_abs(&derived, &points));
        }
        total += sup;
    }
    total
}

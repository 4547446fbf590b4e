//! Sparse polynomials in `(z, z̄)` over `ℂ^n`, generic over the coefficient
//! field so the same calculus runs in floating or exact rational mode.
//!
//! A term is `c · z^α z̄^β` with dense exponent vectors `α, β` of length
//! `n`. All symbolic operations (Wirtinger derivatives, products, the
//! homotopy integral) are coefficientwise and preserve exactness of the
//! coefficient type.

use std::collections::BTreeMap;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coefficient field for the symbolic calculus.
pub trait Coefficient:
    Clone
    + PartialEq
    + std::fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn from_int(v: i64) -> Self;
    fn conj(&self) -> Self;
    fn to_c64(&self) -> Complex64;

    fn mul_int(&self, v: i64) -> Self {
        self.clone() * Self::from_int(v)
    }

    fn div_int(&self, v: i64) -> Self {
        self.clone() / Self::from_int(v)
    }
}

impl Coefficient for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn from_int(v: i64) -> Self {
        Complex64::new(v as f64, 0.0)
    }
    fn conj(&self) -> Self {
        num_complex::Complex::conj(self)
    }
    fn to_c64(&self) -> Complex64 {
        *self
    }
}

/// Exact complex rationals for the rational mode.
pub type CRational = num_complex::Complex<BigRational>;

impl Coefficient for CRational {
    fn zero() -> Self {
        num_complex::Complex::new(BigRational::zero(), BigRational::zero())
    }
    fn one() -> Self {
        num_complex::Complex::new(BigRational::one(), BigRational::zero())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn from_int(v: i64) -> Self {
        num_complex::Complex::new(BigRational::from_integer(BigInt::from(v)), BigRational::zero())
    }
    fn conj(&self) -> Self {
        num_complex::Complex::new(self.re.clone(), -self.im.clone())
    }
    fn to_c64(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }
}

/// Builds an exact complex rational from integer parts.
pub fn crational(re_num: i64, re_den: i64, im_num: i64, im_den: i64) -> CRational {
    num_complex::Complex::new(
        BigRational::new(BigInt::from(re_num), BigInt::from(re_den)),
        BigRational::new(BigInt::from(im_num), BigInt::from(im_den)),
    )
}

type ExpKey = (Vec<u32>, Vec<u32>);

/// Polynomial `Σ c_{αβ} z^α z̄^β` in `n` variables.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly<C> {
    n: usize,
    terms: BTreeMap<ExpKey, C>,
}

pub type PolyFunction = Poly<Complex64>;
pub type PolyExact = Poly<CRational>;

impl<C: Coefficient> Poly<C> {
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n: usize, c: C) -> Self {
        let mut out = Self::zero(n);
        out.add_term(&vec![0; n], &vec![0; n], c);
        out
    }

    /// The coordinate function `z_j` (1-based).
    pub fn var(n: usize, j: usize) -> Self {
        let mut alpha = vec![0; n];
        alpha[j - 1] = 1;
        let mut out = Self::zero(n);
        out.add_term(&alpha, &vec![0; n], C::one());
        out
    }

    /// The conjugate coordinate function `z̄_j` (1-based).
    pub fn conj_var(n: usize, j: usize) -> Self {
        let mut beta = vec![0; n];
        beta[j - 1] = 1;
        let mut out = Self::zero(n);
        out.add_term(&vec![0; n], &beta, C::one());
        out
    }

    pub fn from_terms<I>(n: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, Vec<u32>, C)>,
    {
        let mut out = Self::zero(n);
        for (alpha, beta, c) in terms {
            if alpha.len() != n || beta.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: alpha.len().max(beta.len()),
                });
            }
            out.add_term(&alpha, &beta, c);
        }
        Ok(out)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &[u32], &C)> + '_ {
        self.terms
            .iter()
            .map(|((a, b), c)| (a.as_slice(), b.as_slice(), c))
    }

    /// Coefficient at `(α, β)`, zero when absent.
    pub fn coefficient(&self, alpha: &[u32], beta: &[u32]) -> C {
        self.terms
            .get(&(alpha.to_vec(), beta.to_vec()))
            .cloned()
            .unwrap_or_else(C::zero)
    }

    /// Accumulates a term, dropping exact zeros.
    pub fn add_term(&mut self, alpha: &[u32], beta: &[u32], c: C) {
        debug_assert_eq!(alpha.len(), self.n);
        debug_assert_eq!(beta.len(), self.n);
        if c.is_zero() {
            return;
        }
        let key = (alpha.to_vec(), beta.to_vec());
        match self.terms.get_mut(&key) {
            Some(existing) => {
                let updated = existing.clone() + c;
                if updated.is_zero() {
                    self.terms.remove(&key);
                } else {
                    *existing = updated;
                }
            }
            None => {
                self.terms.insert(key, c);
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "polynomial arity mismatch");
        let mut out = self.clone();
        for ((a, b), c) in &other.terms {
            out.add_term(a, b, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Self {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (k.clone(), -c.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, factor: &C) -> Self {
        if factor.is_zero() {
            return Self::zero(self.n);
        }
        Self {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (k.clone(), c.clone() * factor.clone()))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "polynomial arity mismatch");
        let mut out = Self::zero(self.n);
        for ((a1, b1), c1) in &self.terms {
            for ((a2, b2), c2) in &other.terms {
                let alpha: Vec<u32> = a1.iter().zip(a2).map(|(x, y)| x + y).collect();
                let beta: Vec<u32> = b1.iter().zip(b2).map(|(x, y)| x + y).collect();
                out.add_term(&alpha, &beta, c1.clone() * c2.clone());
            }
        }
        out
    }

    /// Wirtinger derivative `∂/∂z_j` (1-based).
    pub fn wirtinger_z(&self, j: usize) -> Self {
        let idx = j - 1;
        let mut out = Self::zero(self.n);
        for ((a, b), c) in &self.terms {
            if a[idx] == 0 {
                continue;
            }
            let mut alpha = a.clone();
            alpha[idx] -= 1;
            out.add_term(&alpha, b, c.mul_int(i64::from(a[idx])));
        }
        out
    }

    /// Wirtinger derivative `∂/∂z̄_j` (1-based).
    pub fn wirtinger_zbar(&self, j: usize) -> Self {
        let idx = j - 1;
        let mut out = Self::zero(self.n);
        for ((a, b), c) in &self.terms {
            if b[idx] == 0 {
                continue;
            }
            let mut beta = b.clone();
            beta[idx] -= 1;
            out.add_term(a, &beta, c.mul_int(i64::from(b[idx])));
        }
        out
    }

    /// The conjugate function `x ↦ conj(u(x))`: swaps `α ↔ β` and
    /// conjugates coefficients.
    pub fn conjugate(&self) -> Self {
        Self {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|((a, b), c)| ((b.clone(), a.clone()), c.conj()))
                .collect(),
        }
    }

    /// True when no `z̄` exponent appears (the function is holomorphic).
    pub fn is_holomorphic(&self) -> bool {
        self.terms.keys().all(|(_, b)| b.iter().all(|&e| e == 0))
    }

    /// Largest total degree (in `z` and `z̄` together) over the terms.
    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|(a, b)| a.iter().sum::<u32>() + b.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    /// Keeps only terms with all exponents on variables `1..=m`, reindexed
    /// to `m` variables: the pullback along the prefix inclusion
    /// `ℂ^m → ℂ^n`.
    pub fn restrict_vars(&self, m: usize) -> Result<Self> {
        if m > self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: m,
            });
        }
        let mut out = Self::zero(m);
        for ((a, b), c) in &self.terms {
            if a[m..].iter().any(|&e| e > 0) || b[m..].iter().any(|&e| e > 0) {
                continue;
            }
            out.add_term(&a[..m], &b[..m], c.clone());
        }
        Ok(out)
    }

    /// Extends to `big_n ≥ n` variables: the pullback along the prefix
    /// truncation `ℂ^big_n → ℂ^n` (a cylinder function).
    pub fn extend_vars(&self, big_n: usize) -> Result<Self> {
        if big_n < self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: big_n,
            });
        }
        let pad = big_n - self.n;
        let mut out = Self::zero(big_n);
        for ((a, b), c) in &self.terms {
            let mut alpha = a.clone();
            alpha.extend(std::iter::repeat(0).take(pad));
            let mut beta = b.clone();
            beta.extend(std::iter::repeat(0).take(pad));
            out.add_term(&alpha, &beta, c.clone());
        }
        Ok(out)
    }

    /// Keeps only terms supported on the window of `len` variables starting
    /// after `offset`, reindexed to `len` variables: the pullback along the
    /// window inclusion.
    pub fn project_window(&self, offset: usize, len: usize) -> Result<Self> {
        if offset + len > self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: offset + len,
            });
        }
        let inside = |v: &[u32]| {
            v[..offset].iter().all(|&e| e == 0) && v[offset + len..].iter().all(|&e| e == 0)
        };
        let mut out = Self::zero(len);
        for ((a, b), c) in &self.terms {
            if inside(a) && inside(b) {
                out.add_term(&a[offset..offset + len], &b[offset..offset + len], c.clone());
            }
        }
        Ok(out)
    }

    /// Shifts every variable index up by `offset` inside an ambient space
    /// of `big_n` variables (the pullback along the block projection).
    pub fn embed_at(&self, big_n: usize, offset: usize) -> Result<Self> {
        if offset + self.n > big_n {
            return Err(Error::DimensionMismatch {
                expected: big_n,
                got: offset + self.n,
            });
        }
        let mut out = Self::zero(big_n);
        for ((a, b), c) in &self.terms {
            let mut alpha = vec![0; big_n];
            alpha[offset..offset + self.n].copy_from_slice(a);
            let mut beta = vec![0; big_n];
            beta[offset..offset + self.n].copy_from_slice(b);
            out.add_term(&alpha, &beta, c.clone());
        }
        Ok(out)
    }

    pub fn map_coeffs<D: Coefficient>(&self, f: impl Fn(&C) -> D) -> Poly<D> {
        let mut out = Poly::zero(self.n);
        for ((a, b), c) in &self.terms {
            out.add_term(a, b, f(c));
        }
        out
    }

    pub fn to_c64_poly(&self) -> PolyFunction {
        self.map_coeffs(Coefficient::to_c64)
    }

    /// Largest coefficient magnitude (coarse size measure).
    pub fn max_coeff_norm(&self) -> f64 {
        self.terms
            .values()
            .map(|c| c.to_c64().norm())
            .fold(0.0, f64::max)
    }
}

impl<C: Coefficient> Poly<C> {
    /// Evaluates at a point, conjugating for the `z̄` exponents.
    pub fn eval(&self, point: &[Complex64]) -> Complex64 {
        assert_eq!(point.len(), self.n, "evaluation point arity mismatch");
        let mut acc = Complex64::new(0.0, 0.0);
        for ((a, b), c) in &self.terms {
            let mut term = c.to_c64();
            for (j, (&ea, &eb)) in a.iter().zip(b.iter()).enumerate() {
                if ea > 0 {
                    term *= point[j].powu(ea);
                }
                if eb > 0 {
                    term *= point[j].conj().powu(eb);
                }
            }
            acc += term;
        }
        acc
    }
}

impl PolyFunction {
    /// Directional derivative with a constant direction `ξ ∈ ℂ^n`:
    /// `Du[ξ] = Σ_j (∂u/∂z_j) ξ_j + (∂u/∂z̄_j) ξ̄_j`.
    pub fn directional_derivative(&self, xi: &[Complex64]) -> PolyFunction {
        assert_eq!(xi.len(), self.n, "direction arity mismatch");
        let mut out = PolyFunction::zero(self.n);
        for j in 1..=self.n {
            out = out.add(&self.wirtinger_z(j).scale(&xi[j - 1]));
            out = out.add(&self.wirtinger_zbar(j).scale(&xi[j - 1].conj()));
        }
        out
    }
}

/// JSON shape for one term of a floating polynomial.
#[derive(Serialize, Deserialize)]
struct TermJson {
    alpha: Vec<u32>,
    beta: Vec<u32>,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct PolyJson {
    n: usize,
    terms: Vec<TermJson>,
}

impl Serialize for PolyFunction {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let body = PolyJson {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|((a, b), c)| TermJson {
                    alpha: a.clone(),
                    beta: b.clone(),
                    re: c.re,
                    im: c.im,
                })
                .collect(),
        };
        body.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PolyFunction {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let body = PolyJson::deserialize(deserializer)?;
        Poly::from_terms(
            body.n,
            body.terms
                .into_iter()
                .map(|t| (t.alpha, t.beta, Complex64::new(t.re, t.im))),
        )
        .map_err(|e| D::Error::custom(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn arithmetic_and_cancellation() {
        let z = PolyFunction::var(2, 1);
        let w = PolyFunction::var(2, 2);
        let p = z.mul(&w).add(&z.mul(&w).neg());
        assert!(p.is_zero());

        let q = z.add(&w).mul(&z.sub(&w)); // z^2 - w^2
        assert_eq!(q.coefficient(&[2, 0], &[0, 0]), c(1.0, 0.0));
        assert_eq!(q.coefficient(&[0, 2], &[0, 0]), c(-1.0, 0.0));
        assert_eq!(q.term_count(), 2);
    }

    #[test]
    fn wirtinger_derivatives() {
        // u = z zbar: du/dz = zbar, du/dzbar = z.
        let u = PolyFunction::var(1, 1).mul(&PolyFunction::conj_var(1, 1));
        assert_eq!(u.wirtinger_z(1), PolyFunction::conj_var(1, 1));
        assert_eq!(u.wirtinger_zbar(1), PolyFunction::var(1, 1));

        // d/dzbar of zbar^2 = 2 zbar.
        let u = PolyFunction::conj_var(1, 1).mul(&PolyFunction::conj_var(1, 1));
        let d = u.wirtinger_zbar(1);
        assert_eq!(d.coefficient(&[0], &[1]), c(2.0, 0.0));
    }

    #[test]
    fn eval_handles_conjugation() {
        // u = z zbar at z = 1 + 2i evaluates to |z|^2 = 5.
        let u = PolyFunction::var(1, 1).mul(&PolyFunction::conj_var(1, 1));
        assert_eq!(u.eval(&[c(1.0, 2.0)]), c(5.0, 0.0));
    }

    #[test]
    fn conjugate_is_an_involution_matching_pointwise_conj() {
        let u = PolyFunction::from_terms(
            2,
            vec![
                (vec![1, 0], vec![0, 1], c(1.0, 2.0)),
                (vec![0, 0], vec![2, 0], c(-0.5, 0.25)),
            ],
        )
        .unwrap();
        assert_eq!(u.conjugate().conjugate(), u);
        let point = [c(0.3, -0.7), c(1.1, 0.2)];
        let lhs = u.conjugate().eval(&point);
        let rhs = u.eval(&point).conj();
        assert!((lhs - rhs).norm() < 1e-15);
    }

    #[test]
    fn restrict_and_extend_round_trip() {
        let u = PolyFunction::from_terms(
            3,
            vec![
                (vec![1, 1, 0], vec![0, 0, 0], c(2.0, 0.0)),
                (vec![0, 0, 1], vec![0, 0, 0], c(1.0, 0.0)),
            ],
        )
        .unwrap();
        let restricted = u.restrict_vars(2).unwrap();
        assert_eq!(restricted.term_count(), 1);
        assert_eq!(restricted.coefficient(&[1, 1], &[0, 0]), c(2.0, 0.0));

        let lifted = restricted.extend_vars(3).unwrap();
        assert_eq!(lifted.restrict_vars(2).unwrap(), restricted);
    }

    #[test]
    fn exact_rational_division_is_exact() {
        let one = PolyExact::constant(1, Coefficient::one());
        let third = one.scale(&crational(1, 3, 0, 1));
        let back = third.scale(&CRational::from_int(3));
        assert_eq!(back, one);
    }

    #[test]
    fn json_round_trip() {
        let u = PolyFunction::from_terms(
            2,
            vec![
                (vec![1, 0], vec![0, 1], c(1.0, 2.0)),
                (vec![0, 3], vec![0, 0], c(-0.5, 0.0)),
            ],
        )
        .unwrap();
        let text = serde_json::to_string(&u).unwrap();
        let back: PolyFunction = serde_json::from_str(&text).unwrap();
        assert_eq!(back, u);
    }
}

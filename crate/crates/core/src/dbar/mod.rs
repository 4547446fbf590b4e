//! Finite-dimensional `∂̄`-calculus on polynomial data.
//!
//! `(0,1)`-forms carry one polynomial coefficient per `dz̄_j`; `∂̄`,
//! closedness and the homotopy solver are symbolic and coefficientwise, so
//! in the exact coefficient field every identity here is exact.

mod cauchy;
mod cm;
mod condense;
mod minsup;

pub use cauchy::{cauchy_pompeiu_slice_solve, SliceSolution};
pub use cm::{cm_norm_form, cm_norm_function, CmOptions};
pub use condense::{
    condense, growth_table, pullback_block, synthetic_member,weight, BlockLayout,
    CondensationMember, CondensationSpec, CondensedForm, GrowthRow,
};
pub use minsup::{min_sup_grid, min_sup_solution, MinSupOptions};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{Coefficient, Poly, PolyFunction};

/// A `(0,1)`-form `Σ_j f_j dz̄_j` with polynomial coefficients; exactly one
/// component per variable.
#[derive(Debug, Clone, PartialEq)]
pub struct Form01<C> {
    n: usize,
    components: Vec<Poly<C>>,
}

pub type PolyForm01 = Form01<Complex64>;
pub type Form01Exact = Form01<crate::poly::CRational>;

impl<C: Coefficient> Form01<C> {
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            components: (0..n).map(|_| Poly::zero(n)).collect(),
        }
    }

    pub fn new(components: Vec<Poly<C>>) -> Result<Self> {
        let n = components.len();
        for c in &components {
            if c.n() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: c.n(),
                });
            }
        }
        Ok(Self { n, components })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Coefficient of `dz̄_j` (1-based).
    pub fn component(&self, j: usize) -> &Poly<C> {
        &self.components[j - 1]
    }

    pub fn components(&self) -> &[Poly<C>] {
        &self.components
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(Poly::is_zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "form arity mismatch");
        Self {
            n: self.n,
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "form arity mismatch");
        Self {
            n: self.n,
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a.sub(b))
                .collect(),
        }
    }

    pub fn scale(&self, factor: &C) -> Self {
        Self {
            n: self.n,
            components: self.components.iter().map(|c| c.scale(factor)).collect(),
        }
    }

    /// Pointwise application to a tangent vector `ξ ∈ ℂ^n`:
    /// `f(x)ξ = Σ_j f_j(x) ξ̄_j`.
    pub fn apply(&self, x: &[Complex64], xi: &[Complex64]) -> Complex64 {
        assert_eq!(xi.len(), self.n, "tangent arity mismatch");
        self.components
            .iter()
            .zip(xi)
            .map(|(fj, &xij)| fj.eval(x) * xij.conj())
            .sum()
    }

    pub fn map_coeffs<D: Coefficient>(&self, f: impl Fn(&C) -> D + Copy) -> Form01<D> {
        Form01 {
            n: self.n,
            components: self.components.iter().map(|c| c.map_coeffs(f)).collect(),
        }
    }

    pub fn max_coeff_norm(&self) -> f64 {
        self.components
            .iter()
            .map(Poly::max_coeff_norm)
            .fold(0.0, f64::max)
    }
}

/// `∂̄u = Σ_j (∂u/∂z̄_j) dz̄_j`, symbolic Wirtinger derivative per
/// component.
pub fn dbar<C: Coefficient>(u: &Poly<C>) -> Form01<C> {
    Form01 {
        n: u.n(),
        components: (1..=u.n()).map(|j| u.wirtinger_zbar(j)).collect(),
    }
}

/// Closedness report: all residuals `∂f_j/∂z̄_i − ∂f_i/∂z̄_j`, `i < j`, as
/// polynomials; the form is closed iff every residual is identically zero
/// (exact coefficient test).
#[derive(Debug, Clone)]
pub struct ClosednessReport<C> {
    pub closed: bool,
    pub residuals: Vec<(usize, usize, Poly<C>)>,
}

pub fn is_closed<C: Coefficient>(f: &Form01<C>) -> ClosednessReport<C> {
    let mut residuals = Vec::new();
    let mut closed = true;
    for i in 1..=f.n {
        for j in (i + 1)..=f.n {
            let r = f.component(j).wirtinger_zbar(i).sub(&f.component(i).wirtinger_zbar(j));
            if !r.is_zero() {
                closed = false;
            }
            residuals.push((i, j, r));
        }
    }
    ClosednessReport { closed, residuals }
}

fn ensure_closed<C: Coefficient>(f: &Form01<C>) -> Result<()> {
    let report = is_closed(f);
    if report.closed {
        Ok(())
    } else {
        let max_residual = report
            .residuals
            .iter()
            .map(|(_, _, r)| r.max_coeff_norm())
            .fold(0.0, f64::max);
        Err(Error::NotClosed { max_residual })
    }
}

/// Exact particular solution of `∂̄u = f` for closed polynomial `f` by the
/// Poincaré homotopy in the `z̄` variables (`z` enters as a parameter):
/// `u(z, z̄) = Σ_j z̄_j ∫₀¹ f_j(z, t z̄) dt`.
///
/// Termwise: `c z^α z̄^β dz̄_j ↦ c/(|β|+1) z^α z̄^{β+e_j}`.
pub fn homotopy_solve<C: Coefficient>(f: &Form01<C>) -> Result<Poly<C>> {
    ensure_closed(f)?;
    let n = f.n;
    let mut u = Poly::zero(n);
    for j in 1..=n {
        for (alpha, beta, c) in f.component(j).terms() {
            let zbar_degree: u32 = beta.iter().sum();
            let mut shifted = beta.to_vec();
            shifted[j - 1] += 1;
            u.add_term(alpha, &shifted, c.div_int(i64::from(zbar_degree) + 1));
        }
    }
    Ok(u)
}

/// Pullback `J_m^*`: restricts a form to the first `m` variables (later
/// variables set to zero, `dz̄_j` kept for `j ≤ m`).
pub fn restrict<C: Coefficient>(f: &Form01<C>, m: usize) -> Result<Form01<C>> {
    if m > f.n {
        return Err(Error::DimensionMismatch {
            expected: f.n,
            got: m,
        });
    }
    Form01::new(
        (1..=m)
            .map(|j| f.component(j).restrict_vars(m))
            .collect::<Result<Vec<_>>>()?,
    )
}

/// Pullback `ϱ_n^*` of a function: views a polynomial on `ℂ^m` as a
/// cylinder function on `ℂ^big_n`.
pub fn cylinder_lift<C: Coefficient>(u: &Poly<C>, big_n: usize) -> Result<Poly<C>> {
    u.extend_vars(big_n)
}

/// Pullback `ϱ_n^*` of a form: components extend as cylinder functions and
/// the missing `dz̄_j` slots are zero.
pub fn cylinder_lift_form<C: Coefficient>(f: &Form01<C>, big_n: usize) -> Result<Form01<C>> {
    if big_n < f.n {
        return Err(Error::DimensionMismatch {
            expected: f.n,
            got: big_n,
        });
    }
    let mut components = Vec::with_capacity(big_n);
    for j in 1..=f.n {
        components.push(f.component(j).extend_vars(big_n)?);
    }
    components.resize_with(big_n, || Poly::zero(big_n));
    Form01::new(components)
}

#[derive(Serialize, Deserialize)]
struct FormJson {
    n: usize,
    components: Vec<PolyFunction>,
}

impl Serialize for PolyForm01 {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        FormJson {
            n: self.n,
            components: self.components.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PolyForm01 {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let body = FormJson::deserialize(deserializer)?;
        if body.components.len() != body.n {
            return Err(D::Error::custom(format!(
                "a (0,1)-form on C^{} needs exactly {} components",
                body.n, body.n
            )));
        }
        Form01::new(body.components).map_err(|e| D::Error::custom(e.to_string()))
    }
}

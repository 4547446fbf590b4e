//! Almost complex structures on `B × G` driven by a `𝔤^{1,0}`-valued
//! `(0,1)`-form `f`: a tangent `(ζ, ν)` is anti-holomorphic iff
//! `ζ = ζ^{0,1}` and `μ(ν) = f(ζ)`, where `μ(ν) = (dL_z)^{−1} ν^{1,0}` is
//! the holomorphic Maurer-Cartan form.
//!
//! Two group models are supported: additive `ℂ` (the commutative case,
//! where integrability reduces to `∂̄f = 0`) and `GL(m)` (a genuinely
//! noncommutative bracket). `(1,0)/(0,1)` parts are stored separately so
//! type projections are exact; `dL_z` acts on `(1,0)` data by `z` and on
//! `(0,1)` data by `z̄`, as the complexification of a holomorphic map
//! requires.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dbar::{dbar, PolyForm01};
use crate::error::{Error, Result};
use crate::poly::PolyFunction;
use crate::sampling::Sampler;

/// The fiber group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LieGroupModel {
    /// `(ℂ, +)` with Lie algebra `ℂ` and trivial bracket.
    AdditiveC,
    /// `GL(m, ℂ)` with matrix commutator.
    GeneralLinear(usize),
}

impl LieGroupModel {
    pub fn validate(&self) -> Result<()> {
        match self {
            LieGroupModel::GeneralLinear(0) => {
                Err(Error::InvalidSpec("GL(m) needs m >= 1".into()))
            }
            _ => Ok(()),
        }
    }

    pub fn identity(&self) -> AlgValue {
        match self {
            LieGroupModel::AdditiveC => AlgValue::Scalar(Complex64::new(0.0, 0.0)),
            LieGroupModel::GeneralLinear(m) => AlgValue::Matrix(DMatrix::identity(*m, *m)),
        }
    }

    pub fn zero(&self) -> AlgValue {
        match self {
            LieGroupModel::AdditiveC => AlgValue::Scalar(Complex64::new(0.0, 0.0)),
            LieGroupModel::GeneralLinear(m) => AlgValue::Matrix(DMatrix::zeros(*m, *m)),
        }
    }
}

/// A value in `𝔤^{1,0}` (or one typed component of a fiber tangent).
#[derive(Debug, Clone, PartialEq)]
pub enum AlgValue {
    Scalar(Complex64),
    Matrix(DMatrix<Complex64>),
}

impl AlgValue {
    pub fn add(&self, other: &Self) -> Self {
        match (self, other) {
            (AlgValue::Scalar(a), AlgValue::Scalar(b)) => AlgValue::Scalar(a + b),
            (AlgValue::Matrix(a), AlgValue::Matrix(b)) => AlgValue::Matrix(a + b),
            _ => panic!("mixed algebra values"),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        match (self, other) {
            (AlgValue::Scalar(a), AlgValue::Scalar(b)) => AlgValue::Scalar(a - b),
            (AlgValue::Matrix(a), AlgValue::Matrix(b)) => AlgValue::Matrix(a - b),
            _ => panic!("mixed algebra values"),
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        match self {
            AlgValue::Scalar(a) => AlgValue::Scalar(a * s),
            AlgValue::Matrix(a) => AlgValue::Matrix(a.map(|e| e * s)),
        }
    }

    /// Entrywise complex conjugate (the conjugation swapping `𝔤^{1,0}` and
    /// `𝔤^{0,1}`).
    pub fn conj(&self) -> Self {
        match self {
            AlgValue::Scalar(a) => AlgValue::Scalar(a.conj()),
            AlgValue::Matrix(a) => AlgValue::Matrix(a.map(|e| e.conj())),
        }
    }

    /// Lie bracket in `𝔤^{1,0}`: zero for the additive model, the matrix
    /// commutator for `GL(m)`.
    pub fn commutator(&self, other: &Self) -> Self {
        match (self, other) {
            (AlgValue::Scalar(_), AlgValue::Scalar(_)) => {
                AlgValue::Scalar(Complex64::new(0.0, 0.0))
            }
            (AlgValue::Matrix(a), AlgValue::Matrix(b)) => AlgValue::Matrix(a * b - b * a),
            _ => panic!("mixed algebra values"),
        }
    }

    /// Left multiplication by a group element: the action of `dL_z` on
    /// `(1,0)`-typed data.
    pub fn left_mul(&self, z: &Self) -> Self {
        match (z, self) {
            (AlgValue::Scalar(_), v @ AlgValue::Scalar(_)) => v.clone(),
            (AlgValue::Matrix(z), AlgValue::Matrix(v)) => AlgValue::Matrix(z * v),
            _ => panic!("mixed algebra values"),
        }
    }

    pub fn norm(&self) -> f64 {
        match self {
            AlgValue::Scalar(a) => a.norm(),
            AlgValue::Matrix(a) => a.iter().map(|e| e.norm_sqr()).sum::<f64>().sqrt(),
        }
    }

    fn try_inverse(&self) -> Result<Self> {
        match self {
            AlgValue::Scalar(_) => Ok(self.clone()),
            AlgValue::Matrix(a) => a
                .clone()
                .try_inverse()
                .map(AlgValue::Matrix)
                .ok_or(Error::SingularElement),
        }
    }
}

/// `μ(ν) = (dL_z)^{−1} ν^{1,0}`: the fiber tangent's `(1,0)` part pulled
/// back to the Lie algebra. Additive model: `ν^{1,0}` itself; `GL(m)`:
/// `z^{−1} ν^{1,0}`.
pub fn maurer_cartan(model: &LieGroupModel, z: &AlgValue, nu10: &AlgValue) -> Result<AlgValue> {
    model.validate()?;
    match model {
        LieGroupModel::AdditiveC => Ok(nu10.clone()),
        LieGroupModel::GeneralLinear(_) => {
            let inv = z.try_inverse()?;
            Ok(nu10.left_mul(&inv))
        }
    }
}

/// `dL_z` applied to a typed pair: `(1,0)` data multiplies by `z`, `(0,1)`
/// data by `z̄` (a holomorphic map acts by the conjugate on conjugate
/// coordinates).
pub fn left_translate(
    model: &LieGroupModel,
    z: &AlgValue,
    nu10: &AlgValue,
    nu01: &AlgValue,
) -> (AlgValue, AlgValue) {
    match model {
        LieGroupModel::AdditiveC => (nu10.clone(), nu01.clone()),
        LieGroupModel::GeneralLinear(_) => (nu10.left_mul(z), nu01.left_mul(&z.conj())),
    }
}

/// A complexified tangent vector of `B × G` at `(x, z)`, with `(1,0)` and
/// `(0,1)` parts stored separately. `zeta10`/`zeta01` are coefficients on
/// `∂/∂x_j` and `∂/∂x̄_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct GTangent {
    pub x: Vec<Complex64>,
    pub z: AlgValue,
    pub zeta10: Vec<Complex64>,
    pub zeta01: Vec<Complex64>,
    pub nu10: AlgValue,
    pub nu01: AlgValue,
}

impl GTangent {
    /// Conjugation swaps the types and conjugates the coefficients.
    pub fn conj(&self) -> Self {
        Self {
            x: self.x.clone(),
            z: self.z.clone(),
            zeta10: self.zeta01.iter().map(|c| c.conj()).collect(),
            zeta01: self.zeta10.iter().map(|c| c.conj()).collect(),
            nu10: self.nu01.conj(),
            nu01: self.nu10.conj(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            x: self.x.clone(),
            z: self.z.clone(),
            zeta10: self
                .zeta10
                .iter()
                .zip(&other.zeta10)
                .map(|(a, b)| a + b)
                .collect(),
            zeta01: self
                .zeta01
                .iter()
                .zip(&other.zeta01)
                .map(|(a, b)| a + b)
                .collect(),
            nu10: self.nu10.add(&other.nu10),
            nu01: self.nu01.add(&other.nu01),
        }
    }

    pub fn norm(&self) -> f64 {
        let base_sq: f64 = self
            .zeta10
            .iter()
            .chain(&self.zeta01)
            .map(|c| c.norm_sqr())
            .sum();
        (base_sq + self.nu10.norm().powi(2) + self.nu01.norm().powi(2)).sqrt()
    }
}

/// A `(0,1)`-form on `B ⊂ ℂ^N` with values in `𝔤^{1,0}`: per `dx̄_j` one
/// polynomial coefficient (scalar model) or an `m×m` matrix of polynomial
/// entries (row-major).
#[derive(Debug, Clone, PartialEq)]
pub struct GForm01 {
    model: LieGroupModel,
    n: usize,
    components: Vec<Vec<PolyFunction>>,
}

impl GForm01 {
    pub fn zero(model: LieGroupModel, n: usize) -> Self {
        let entries = match model {
            LieGroupModel::AdditiveC => 1,
            LieGroupModel::GeneralLinear(m) => m * m,
        };
        Self {
            model,
            n,
            components: vec![vec![PolyFunction::zero(n); entries]; n],
        }
    }

    pub fn new(model: LieGroupModel, components: Vec<Vec<PolyFunction>>) -> Result<Self> {
        model.validate()?;
        let n = components.len();
        let entries = match model {
            LieGroupModel::AdditiveC => 1,
            LieGroupModel::GeneralLinear(m) => m * m,
        };
        for comp in &components {
            if comp.len() != entries {
                return Err(Error::DimensionMismatch {
                    expected: entries,
                    got: comp.len(),
                });
            }
            for poly in comp {
                if poly.n() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        got: poly.n(),
                    });
                }
            }
        }
        Ok(Self {
            model,
            n,
            components,
        })
    }

    /// Scalar (additive-model) form from a plain `(0,1)`-form.
    pub fn from_scalar_form(f: &PolyForm01) -> Self {
        Self {
            model: LieGroupModel::AdditiveC,
            n: f.n(),
            components: (1..=f.n()).map(|j| vec![f.component(j).clone()]).collect(),
        }
    }

    /// Constant `GL(m)` form with the given matrix on each listed `dx̄_j`.
    pub fn constant_matrix_form(
        n: usize,
        m: usize,
        entries: &[(usize, DMatrix<Complex64>)],
    ) -> Result<Self> {
        let mut components = vec![vec![PolyFunction::zero(n); m * m]; n];
        for (j, matrix) in entries {
            if *j == 0 || *j > n {
                return Err(Error::InvalidRange(format!("component {j} out of 1..={n}")));
            }
            if matrix.nrows() != m || matrix.ncols() != m {
                return Err(Error::DimensionMismatch {
                    expected: m,
                    got: matrix.nrows(),
                });
            }
            for r in 0..m {
                for c in 0..m {
                    components[j - 1][r * m + c] = PolyFunction::constant(n, matrix[(r, c)]);
                }
            }
        }
        Self::new(LieGroupModel::GeneralLinear(m), components)
    }

    pub fn model(&self) -> &LieGroupModel {
        &self.model
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn components(&self) -> &[Vec<PolyFunction>] {
        &self.components
    }

    /// Value of the `dx̄_j` coefficient at `x`.
    pub fn component_value(&self, j: usize, x: &[Complex64]) -> AlgValue {
        let comp = &self.components[j - 1];
        match self.model {
            LieGroupModel::AdditiveC => AlgValue::Scalar(comp[0].eval(x)),
            LieGroupModel::GeneralLinear(m) => {
                AlgValue::Matrix(DMatrix::from_fn(m, m, |r, c| comp[r * m + c].eval(x)))
            }
        }
    }

    /// `f(ζ) = Σ_j f_j(x) ζ^{0,1}_j`: the form only sees the `(0,1)` part.
    pub fn apply(&self, x: &[Complex64], zeta01: &[Complex64]) -> AlgValue {
        let mut acc = self.model.zero();
        for j in 1..=self.n {
            if zeta01[j - 1].norm_sqr() == 0.0 {
                continue;
            }
            acc = acc.add(&self.component_value(j, x).scale(zeta01[j - 1]));
        }
        acc
    }

    /// `(∂̄f)(ζ, ζ′) = Σ_{i,j} (∂f_j/∂x̄_i)(x) (ζ_i ζ′_j − ζ′_i ζ_j)`,
    /// Wirtinger derivatives symbolic.
    pub fn dbar_apply(
        &self,
        x: &[Complex64],
        zeta: &[Complex64],
        zeta_prime: &[Complex64],
    ) -> AlgValue {
        let mut acc = self.model.zero();
        for j in 1..=self.n {
            for i in 1..=self.n {
                let factor = zeta[i - 1] * zeta_prime[j - 1] - zeta_prime[i - 1] * zeta[j - 1];
                if factor.norm_sqr() == 0.0 {
                    continue;
                }
                let derived: Vec<PolyFunction> = self.components[j - 1]
                    .iter()
                    .map(|p| p.wirtinger_zbar(i))
                    .collect();
                let value = match self.model {
                    LieGroupModel::AdditiveC => AlgValue::Scalar(derived[0].eval(x)),
                    LieGroupModel::GeneralLinear(m) => {
                        AlgValue::Matrix(DMatrix::from_fn(m, m, |r, c| derived[r * m + c].eval(x)))
                    }
                };
                acc = acc.add(&value.scale(factor));
            }
        }
        acc
    }

    /// Componentwise sum (same model and base dimension).
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.model != other.model || self.n != other.n {
            return Err(Error::InvalidSpec(
                "cannot add forms over different models or base dimensions".into(),
            ));
        }
        Ok(Self {
            model: self.model,
            n: self.n,
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a.iter().zip(b).map(|(p, q)| p.add(q)).collect())
                .collect(),
        })
    }
}

/// JSON value-kind tag for a `𝔤^{1,0}`-valued form.
#[derive(Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum GFormKind {
    Scalar,
    Matrix(usize),
}

#[derive(Serialize, Deserialize)]
struct GFormJson {
    n: usize,
    kind: GFormKind,
    components: Vec<Vec<PolyFunction>>,
}

impl Serialize for GForm01 {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        GFormJson {
            n: self.n,
            kind: match self.model {
                LieGroupModel::AdditiveC => GFormKind::Scalar,
                LieGroupModel::GeneralLinear(m) => GFormKind::Matrix(m),
            },
            components: self.components.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for GForm01 {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let body = GFormJson::deserialize(deserializer)?;
        let model = match body.kind {
            GFormKind::Scalar => LieGroupModel::AdditiveC,
            GFormKind::Matrix(m) => LieGroupModel::GeneralLinear(m),
        };
        if body.components.len() != body.n {
            return Err(D::Error::custom(format!(
                "a (0,1)-form on C^{} needs exactly {} components",
                body.n, body.n
            )));
        }
        GForm01::new(model, body.components).map_err(|e| D::Error::custom(e.to_string()))
    }
}

/// Membership data for `T^{0,1} M_f`: `ζ^{1,0} = 0` and `μ(ν) = f(ζ)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MembershipReport {
    pub member: bool,
    pub zeta10_residual: f64,
    pub maurer_cartan_residual: f64,
}

pub const MEMBERSHIP_TOLERANCE: f64 = 1e-12;

pub fn is_antiholomorphic_tangent(v: &GTangent, f: &GForm01) -> Result<MembershipReport> {
    let zeta10_residual = v.zeta10.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let mu = maurer_cartan(f.model(), &v.z, &v.nu10)?;
    let mc_residual = mu.sub(&f.apply(&v.x, &v.zeta01)).norm();
    Ok(MembershipReport {
        member: zeta10_residual <= MEMBERSHIP_TOLERANCE && mc_residual <= MEMBERSHIP_TOLERANCE,
        zeta10_residual,
        maurer_cartan_residual: mc_residual,
    })
}

/// The unique splitting `V = V₁ + V₂` with `V₁` and `conj(V₂)` in
/// `T^{0,1} M_f`:
/// `V₁ = (ζ^{0,1}, dL_z f(ζ) − dL_z conj(f(ζ̄)) + ν^{0,1})`.
pub fn decompose(v: &GTangent, f: &GForm01) -> Result<(GTangent, GTangent)> {
    if v.x.len() != f.n() || v.zeta10.len() != f.n() || v.zeta01.len() != f.n() {
        return Err(Error::DimensionMismatch {
            expected: f.n(),
            got: v.x.len(),
        });
    }
    // w = f(ζ) and the conjugate-side value f(ζ̄), where
    // (ζ̄)^{0,1} = conj(ζ^{1,0}).
    let w = f.apply(&v.x, &v.zeta01);
    let zeta_conj01: Vec<Complex64> = v.zeta10.iter().map(|c| c.conj()).collect();
    let f_on_conj = f.apply(&v.x, &zeta_conj01);

    // dL_z carries the (1,0) value w and the (0,1) value conj(f(ζ̄)).
    let (lifted_w, lifted_conj) = left_translate(f.model(), &v.z, &w, &f_on_conj.conj());

    let zero_base = vec![Complex64::new(0.0, 0.0); f.n()];
    let v1 = GTangent {
        x: v.x.clone(),
        z: v.z.clone(),
        zeta10: zero_base.clone(),
        zeta01: v.zeta01.clone(),
        nu10: lifted_w.clone(),
        nu01: v.nu01.sub(&lifted_conj),
    };
    let v2 = GTangent {
        x: v.x.clone(),
        z: v.z.clone(),
        zeta10: v.zeta10.clone(),
        zeta01: zero_base,
        nu10: v.nu10.sub(&lifted_w),
        nu01: lifted_conj,
    };
    Ok((v1, v2))
}

/// `[φ, ψ](ζ, ζ′) = [φ(ζ), ψ(ζ′)] − [φ(ζ′), ψ(ζ)]` at `x`, brackets taken
/// in `𝔤^{1,0}`.
pub fn bracket(
    phi: &GForm01,
    psi: &GForm01,
    x: &[Complex64],
    zeta: &[Complex64],
    zeta_prime: &[Complex64],
) -> AlgValue {
    let a = phi.apply(x, zeta).commutator(&psi.apply(x, zeta_prime));
    let b = phi.apply(x, zeta_prime).commutator(&psi.apply(x, zeta));
    a.sub(&b)
}

/// The formal integrability tensor `(∂̄f)(ζ, ζ′) + ½ [f, f](ζ, ζ′)`.
pub fn integrability_residual(
    f: &GForm01,
    x: &[Complex64],
    zeta: &[Complex64],
    zeta_prime: &[Complex64],
) -> AlgValue {
    f.dbar_apply(x, zeta, zeta_prime)
        .add(&bracket(f, f, x, zeta, zeta_prime).scale(Complex64::new(0.5, 0.0)))
}

/// A polynomial map `B → G`: one entry (additive) or `m²` entries
/// (`GL(m)`, row-major).
#[derive(Debug, Clone, PartialEq)]
pub struct GroupMap {
    model: LieGroupModel,
    entries: Vec<PolyFunction>,
}

impl GroupMap {
    pub fn new(model: LieGroupModel, entries: Vec<PolyFunction>) -> Result<Self> {
        model.validate()?;
        let expected = match model {
            LieGroupModel::AdditiveC => 1,
            LieGroupModel::GeneralLinear(m) => m * m,
        };
        if entries.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                got: entries.len(),
            });
        }
        Ok(Self { model, entries })
    }

    pub fn scalar(u: PolyFunction) -> Self {
        Self {
            model: LieGroupModel::AdditiveC,
            entries: vec![u],
        }
    }

    pub fn n(&self) -> usize {
        self.entries[0].n()
    }

    pub fn value(&self, x: &[Complex64]) -> AlgValue {
        match self.model {
            LieGroupModel::AdditiveC => AlgValue::Scalar(self.entries[0].eval(x)),
            LieGroupModel::GeneralLinear(m) => {
                AlgValue::Matrix(DMatrix::from_fn(m, m, |r, c| self.entries[r * m + c].eval(x)))
            }
        }
    }

    /// `Σ_i (∂u/∂x̄_i)(x) ζ^{0,1}_i`: the `(1,0)` part of `du(ζ^{0,1})` in
    /// the group chart.
    fn dbar_direction(&self, x: &[Complex64], zeta01: &[Complex64]) -> AlgValue {
        let n = self.n();
        let mut acc = self.model.zero();
        for i in 1..=n {
            if zeta01[i - 1].norm_sqr() == 0.0 {
                continue;
            }
            let value = match self.model {
                LieGroupModel::AdditiveC => {
                    AlgValue::Scalar(self.entries[0].wirtinger_zbar(i).eval(x))
                }
                LieGroupModel::GeneralLinear(m) => AlgValue::Matrix(DMatrix::from_fn(
                    m,
                    m,
                    |r, c| self.entries[r * m + c].wirtinger_zbar(i).eval(x),
                )),
            };
            acc = acc.add(&value.scale(zeta01[i - 1]));
        }
        acc
    }
}

/// `D̄u(ζ) = μ(du(ζ^{0,1}))`: the usual `∂̄u(ζ)` for the additive model,
/// `u(x)^{−1} (∂̄u)(ζ)` for `GL(m)`.
pub fn dbar_g(u: &GroupMap, x: &[Complex64], zeta01: &[Complex64]) -> Result<AlgValue> {
    let raw = u.dbar_direction(x, zeta01);
    maurer_cartan(&u.model, &u.value(x), &raw)
}

/// Result of the gauge transport `Φ(x, z) = (x, z + u(x))`: the target
/// form `g = f + ∂̄u` and the worst pushforward membership residual over
/// sampled `T^{0,1} M_f` vectors.
#[derive(Debug, Clone)]
pub struct TransportReport {
    pub g: GForm01,
    pub max_residual: f64,
    pub samples: usize,
}

/// Gauge transport over the additive model: `dΦ` must carry sampled
/// anti-holomorphic tangents of `M_f` into `T^{0,1} M_g` residual-free.
pub fn gauge_transport(
    f: &GForm01,
    u: &PolyFunction,
    samples: usize,
    seed: u64,
) -> Result<TransportReport> {
    if !matches!(f.model(), LieGroupModel::AdditiveC) {
        return Err(Error::InvalidSpec(
            "gauge transport is defined over the additive fiber".into(),
        ));
    }
    if u.n() != f.n() {
        return Err(Error::DimensionMismatch {
            expected: f.n(),
            got: u.n(),
        });
    }
    let n = f.n();
    let du_form = dbar(u);
    let g = f.add(&GForm01::from_scalar_form(&du_form))?;

    let mut sampler = Sampler::new(seed);
    let mut max_residual = 0.0f64;
    for _ in 0..samples {
        let x: Vec<Complex64> = (0..n).map(|_| sampler.disc_point(0.9)).collect();
        let zeta01: Vec<Complex64> = (0..n).map(|_| sampler.complex_gaussian()).collect();
        let z = AlgValue::Scalar(sampler.complex_gaussian());
        // V in T^{0,1} M_f: additive μ is the identity on ν^{1,0}.
        let v = GTangent {
            x: x.clone(),
            z,
            zeta10: vec![Complex64::new(0.0, 0.0); n],
            zeta01: zeta01.clone(),
            nu10: f.apply(&x, &zeta01),
            nu01: AlgValue::Scalar(sampler.complex_gaussian()),
        };
        // dΦ(ζ, ν) = (ζ, ν + du(ζ)): the (1,0) fiber part gains ∂̄u(ζ).
        let du_zeta = (1..=n).fold(Complex64::new(0.0, 0.0), |acc, i| {
            acc + du_form.component(i).eval(&x) * zeta01[i - 1]
        });
        let pushed = GTangent {
            nu10: v.nu10.add(&AlgValue::Scalar(du_zeta)),
            ..v.clone()
        };
        let report = is_antiholomorphic_tangent(&pushed, &g)?;
        max_residual = max_residual
            .max(report.zeta10_residual)
            .max(report.maurer_cartan_residual);
    }
    Ok(TransportReport {
        g,
        max_residual,
        samples,
    })
}

/// One row of a residual report: base point, `(0,1)` vector, residual.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResidualRow {
    pub point: Vec<[f64; 2]>,
    pub vector: Vec<[f64; 2]>,
    pub residual: f64,
}

/// Residuals `μ(du(ζ^{0,1})) − f(ζ^{0,1})` at the given samples; all zero
/// iff the graph section `x ↦ (x, u(x))` is holomorphic for `M_f`.
pub fn section_holomorphy_check(
    u: &GroupMap,
    f: &GForm01,
    samples: &[(Vec<Complex64>, Vec<Complex64>)],
) -> Result<Vec<ResidualRow>> {
    if u.n() != f.n() {
        return Err(Error::DimensionMismatch {
            expected: f.n(),
            got: u.n(),
        });
    }
    let mut rows = Vec::with_capacity(samples.len());
    for (x, zeta01) in samples {
        let residual = dbar_g(u, x, zeta01)?.sub(&f.apply(x, zeta01)).norm();
        rows.push(ResidualRow {
            point: x.iter().map(|c| [c.re, c.im]).collect(),
            vector: zeta01.iter().map(|c| [c.re, c.im]).collect(),
            residual,
        });
    }
    Ok(rows)
}

/// Finite-difference residual of the holomorphic Maurer-Cartan formula
/// `dμ + ½[μ, μ] = 0` at `z` along constant `(1,0)` frames `A, B`
/// (constant frames commute, so `dμ(A,B) = A[μ(B)] − B[μ(A)]`).
pub fn maurer_cartan_fd_residual(
    model: &LieGroupModel,
    z: &AlgValue,
    a: &AlgValue,
    b: &AlgValue,
    h: f64,
) -> Result<f64> {
    match model {
        LieGroupModel::AdditiveC => Ok(0.0),
        LieGroupModel::GeneralLinear(_) => {
            let shift = |base: &AlgValue, dir: &AlgValue, t: f64| -> AlgValue {
                base.add(&dir.scale(Complex64::new(t, 0.0)))
            };
            // A[μ(·)(B)](z) by central differences.
            let da = maurer_cartan(model, &shift(z, a, h), b)?
                .sub(&maurer_cartan(model, &shift(z, a, -h), b)?)
                .scale(Complex64::new(0.5 / h, 0.0));
            let db = maurer_cartan(model, &shift(z, b, h), a)?
                .sub(&maurer_cartan(model, &shift(z, b, -h), a)?)
                .scale(Complex64::new(0.5 / h, 0.0));
            let dmu = da.sub(&db);
            let half_bracket = maurer_cartan(model, z, a)?.commutator(&maurer_cartan(model, z, b)?);
            Ok(dmu.add(&half_bracket).norm())
        }
    }
}

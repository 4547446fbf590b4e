//! JSON shapes for the almost-complex-structure scenarios.

use anyhow::{bail, Result};
use dbarlab::acs::{AlgValue, GForm01, GTangent, LieGroupModel};
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub fn c64(pair: [f64; 2]) -> Complex64 {
    Complex64::new(pair[0], pair[1])
}

pub fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

pub fn cvec(pairs: &[[f64; 2]]) -> Vec<Complex64> {
    pairs.iter().copied().map(c64).collect()
}

/// Scalar or matrix algebra value.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlgJson {
    Scalar([f64; 2]),
    Matrix(Vec<Vec<[f64; 2]>>),
}

impl AlgJson {
    pub fn to_value(&self) -> Result<AlgValue> {
        match self {
            AlgJson::Scalar(p) => Ok(AlgValue::Scalar(c64(*p))),
            AlgJson::Matrix(rows) => {
                let m = rows.len();
                for row in rows {
                    if row.len() != m {
                        bail!("matrix value must be square");
                    }
                }
                Ok(AlgValue::Matrix(DMatrix::from_fn(m, m, |r, c| {
                    c64(rows[r][c])
                })))
            }
        }
    }

    pub fn from_value(v: &AlgValue) -> Self {
        match v {
            AlgValue::Scalar(z) => AlgJson::Scalar(pair(*z)),
            AlgValue::Matrix(mtx) => AlgJson::Matrix(
                (0..mtx.nrows())
                    .map(|r| (0..mtx.ncols()).map(|c| pair(mtx[(r, c)])).collect())
                    .collect(),
            ),
        }
    }
}

/// One tangent vector sample at `(x, z)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TangentJson {
    pub x: Vec<[f64; 2]>,
    pub z: AlgJson,
    pub zeta10: Vec<[f64; 2]>,
    pub zeta01: Vec<[f64; 2]>,
    pub nu10: AlgJson,
    pub nu01: AlgJson,
}

impl TangentJson {
    pub fn to_tangent(&self) -> Result<GTangent> {
        Ok(GTangent {
            x: cvec(&self.x),
            z: self.z.to_value()?,
            zeta10: cvec(&self.zeta10),
            zeta01: cvec(&self.zeta01),
            nu10: self.nu10.to_value()?,
            nu01: self.nu01.to_value()?,
        })
    }

    pub fn from_tangent(v: &GTangent) -> Self {
        Self {
            x: v.x.iter().copied().map(pair).collect(),
            z: AlgJson::from_value(&v.z),
            zeta10: v.zeta10.iter().copied().map(pair).collect(),
            zeta01: v.zeta01.iter().copied().map(pair).collect(),
            nu10: AlgJson::from_value(&v.nu10),
            nu01: AlgJson::from_value(&v.nu01),
        }
    }
}

/// Input for `acs check` and `acs decompose`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TangentScenario {
    pub form: GForm01,
    pub samples: Vec<TangentJson>,
}

/// One `(ζ, ζ′)` pair sample for the integrability residual.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairSample {
    pub x: Vec<[f64; 2]>,
    pub zeta: Vec<[f64; 2]>,
    pub zeta_prime: Vec<[f64; 2]>,
}

/// Input for `acs residual`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResidualScenario {
    pub form: GForm01,
    pub samples: Vec<PairSample>,
}

/// Membership verdict row emitted by `acs check`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckRow {
    pub member: bool,
    pub zeta10_residual: f64,
    pub maurer_cartan_residual: f64,
}

/// Decomposition row emitted by `acs decompose`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DecomposeRow {
    pub v1: TangentJson,
    pub v2: TangentJson,
    pub v1_mc_residual: f64,
    pub v2_conj_mc_residual: f64,
}

pub fn model_of(form: &GForm01) -> &LieGroupModel {
    form.model()
}

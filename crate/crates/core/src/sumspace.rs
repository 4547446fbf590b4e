//! The sum space: finitely many finite-dimensional `ℓ_p(ℂ^dim)` blocks
//! glued by an outer `ℓ_q` or `c₀` norm.
//!
//! Only finitely many blocks are ever materialized; the infinite tail is
//! an implicit zero. Vectors are sparse block maps and immutable after
//! construction.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Block exponent `p ∈ [1, ∞]`; `Sup` is the max norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PExponent {
    Finite(f64),
    Sup,
}

impl PExponent {
    pub fn validate(&self) -> Result<()> {
        match self {
            PExponent::Finite(p) if !(p.is_finite() && *p >= 1.0) => Err(Error::InvalidSpec(
                format!("block exponent p must satisfy 1 <= p < inf, got {p}"),
            )),
            _ => Ok(()),
        }
    }

    /// `ℓ_p` norm of a coordinate vector.
    pub fn vector_norm(&self, v: &[Complex64]) -> f64 {
        match self {
            PExponent::Sup => v.iter().map(|z| z.norm()).fold(0.0, f64::max),
            PExponent::Finite(p) if *p == 1.0 => v.iter().map(|z| z.norm()).sum(),
            PExponent::Finite(p) if *p == 2.0 => {
                v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
            }
            PExponent::Finite(p) => v
                .iter()
                .map(|z| z.norm().powf(*p))
                .sum::<f64>()
                .powf(1.0 / *p),
        }
    }
}

impl Serialize for PExponent {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            PExponent::Finite(p) => serializer.serialize_f64(*p),
            PExponent::Sup => serializer.serialize_str("sup"),
        }
    }
}

impl<'de> Deserialize<'de> for PExponent {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Word(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Number(p) => Ok(PExponent::Finite(p)),
            Raw::Word(w) if w == "sup" => Ok(PExponent::Sup),
            Raw::Word(w) => Err(D::Error::custom(format!(
                "unknown block exponent {w:?}; expected a number or \"sup\""
            ))),
        }
    }
}

/// Outer norm type: `ℓ_q` with `1 ≤ q < ∞`, or `c₀` (max over the finitely
/// many materialized blocks).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OuterType {
    Lq(f64),
    C0,
}

impl OuterType {
    pub fn validate(&self) -> Result<()> {
        match self {
            OuterType::Lq(q) if !(q.is_finite() && *q >= 1.0) => Err(Error::InvalidSpec(
                format!("outer exponent q must satisfy 1 <= q < inf, got {q}"),
            )),
            _ => Ok(()),
        }
    }

    /// Y-norm of a finite nonnegative sequence.
    pub fn sequence_norm(&self, moduli: &[f64]) -> f64 {
        match self {
            OuterType::C0 => moduli.iter().copied().fold(0.0, f64::max),
            OuterType::Lq(q) if *q == 1.0 => moduli.iter().sum(),
            OuterType::Lq(q) if *q == 2.0 => moduli.iter().map(|b| b * b).sum::<f64>().sqrt(),
            OuterType::Lq(q) => moduli.iter().map(|b| b.powf(*q)).sum::<f64>().powf(1.0 / *q),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Block {
    pub p: PExponent,
    pub dim: usize,
}

/// Description of the sum space: an ordered list of blocks plus the outer
/// norm type.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SumSpaceSpec {
    pub blocks: Vec<Block>,
    pub outer: OuterType,
}

impl SumSpaceSpec {
    pub fn new(blocks: Vec<Block>, outer: OuterType) -> Result<Self> {
        let spec = Self { blocks, outer };
        spec.validate()?;
        Ok(spec)
    }

    /// All blocks `ℓ₁`, outer `ℓ₁`: `dims.len()` blocks of the given sizes.
    pub fn l1_sum(dims: &[usize]) -> Result<Self> {
        Self::new(
            dims.iter()
                .map(|&dim| Block {
                    p: PExponent::Finite(1.0),
                    dim,
                })
                .collect(),
            OuterType::Lq(1.0),
        )
    }

    pub fn validate(&self) -> Result<()> {
        if self.blocks.is_empty() {
            return Err(Error::InvalidSpec("at least one block is required".into()));
        }
        for (i, b) in self.blocks.iter().enumerate() {
            b.p.validate()?;
            if b.dim == 0 {
                return Err(Error::InvalidSpec(format!(
                    "block {} has dimension 0",
                    i + 1
                )));
            }
        }
        self.outer.validate()
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    /// Block at 1-based position `n`.
    pub fn block(&self, n: usize) -> Result<&Block> {
        if n == 0 || n > self.blocks.len() {
            return Err(Error::InvalidRange(format!(
                "block index {n} out of 1..={}",
                self.blocks.len()
            )));
        }
        Ok(&self.blocks[n - 1])
    }

    /// Total number of scalar coordinates across all blocks.
    pub fn scalar_len(&self) -> usize {
        self.blocks.iter().map(|b| b.dim).sum()
    }

    /// Whether every block has `p = 1` (and hence, with outer `ℓ₁`, the
    /// space is isometric to flat `ℓ₁`).
    pub fn is_all_l1(&self) -> bool {
        self.outer == OuterType::Lq(1.0)
            && self
                .blocks
                .iter()
                .all(|b| matches!(b.p, PExponent::Finite(p) if p == 1.0))
    }
}

/// A finitely supported vector in the sum space: a sparse map from 1-based
/// block position to that block's coordinate vector. Exactly-zero block
/// vectors are normalized away.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SumVector {
    components: BTreeMap<usize, Vec<Complex64>>,
}

impl SumVector {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_components<I: IntoIterator<Item = (usize, Vec<Complex64>)>>(
        components: I,
    ) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (n, v) in components {
            if n == 0 {
                return Err(Error::InvalidRange(
                    "block positions are 1-based; position 0 is not allowed".into(),
                ));
            }
            if v.iter().any(|z| z.norm_sqr() != 0.0) {
                map.insert(n, v);
            }
        }
        Ok(Self { components: map })
    }

    pub fn components(&self) -> impl Iterator<Item = (usize, &[Complex64])> + '_ {
        self.components.iter().map(|(&n, v)| (n, v.as_slice()))
    }

    pub fn component(&self, n: usize) -> Option<&[Complex64]> {
        self.components.get(&n).map(|v| v.as_slice())
    }

    /// Scalar coordinate `j` (1-based) of block `n`; zero when absent.
    pub fn coordinate(&self, n: usize, j: usize) -> Complex64 {
        self.components
            .get(&n)
            .and_then(|v| v.get(j - 1))
            .copied()
            .unwrap_or_else(|| Complex64::new(0.0, 0.0))
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    pub fn max_block(&self) -> usize {
        self.components.keys().next_back().copied().unwrap_or(0)
    }

    /// Checks block indices and dimensions against the spec.
    pub fn conforms(&self, spec: &SumSpaceSpec) -> Result<()> {
        for (&n, v) in &self.components {
            let block = spec.block(n)?;
            if v.len() != block.dim {
                return Err(Error::DimensionMismatch {
                    expected: block.dim,
                    got: v.len(),
                });
            }
        }
        Ok(())
    }

    /// The modulus sequence `|x| = (‖x_1‖_1, ‖x_2‖_2, …)` as a dense prefix
    /// of length `spec.block_count()`.
    pub fn modulus_sequence(&self, spec: &SumSpaceSpec) -> Result<Vec<f64>> {
        self.conforms(spec)?;
        let mut moduli = vec![0.0; spec.block_count()];
        for (&n, v) in &self.components {
            moduli[n - 1] = spec.blocks[n - 1].p.vector_norm(v);
        }
        Ok(moduli)
    }
}

impl Serialize for SumVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let map: BTreeMap<String, Vec<[f64; 2]>> = self
            .components
            .iter()
            .map(|(&n, v)| (n.to_string(), v.iter().map(|z| [z.re, z.im]).collect()))
            .collect();
        map.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SumVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let map = BTreeMap::<String, Vec<[f64; 2]>>::deserialize(deserializer)?;
        let mut components = Vec::with_capacity(map.len());
        for (key, coords) in map {
            let n: usize = key
                .parse()
                .map_err(|_| D::Error::custom(format!("invalid block key {key:?}")))?;
            components.push((n, coords.iter().map(|&[re, im]| Complex64::new(re, im)).collect()));
        }
        SumVector::from_components(components).map_err(|e| D::Error::custom(e.to_string()))
    }
}

impl fmt::Display for SumVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (n, v)) in self.components.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{n}: {v:?}")?;
        }
        write!(f, "}}")
    }
}

/// Norm of `x` in the sum space: block norms first, then the outer norm of
/// the resulting finite sequence.
pub fn norm(spec: &SumSpaceSpec, x: &SumVector) -> Result<f64> {
    let moduli = x.modulus_sequence(spec)?;
    Ok(spec.outer.sequence_norm(&moduli))
}

/// Inclusion `I_n`: places `v` at block `n`, zero elsewhere. An isometry.
pub fn include(spec: &SumSpaceSpec, n: usize, v: &[Complex64]) -> Result<SumVector> {
    let block = spec.block(n)?;
    if v.len() != block.dim {
        return Err(Error::DimensionMismatch {
            expected: block.dim,
            got: v.len(),
        });
    }
    SumVector::from_components([(n, v.to_vec())])
}

/// Single-block projection `π_n(x) = x_n` as a coordinate vector.
pub fn project_block(spec: &SumSpaceSpec, x: &SumVector, n: usize) -> Result<Vec<Complex64>> {
    let block = spec.block(n)?;
    x.conforms(spec)?;
    Ok(x.component(n)
        .map(<[Complex64]>::to_vec)
        .unwrap_or_else(|| vec![Complex64::new(0.0, 0.0); block.dim]))
}

/// Range projection `π_{m,n}`: keeps blocks in `[m, n]`, zeros the rest.
/// `n = None` means `∞`.
pub fn project(x: &SumVector, m: usize, n: Option<usize>) -> Result<SumVector> {
    if m == 0 {
        return Err(Error::InvalidRange("projection start must be >= 1".into()));
    }
    if let Some(end) = n {
        if end < m {
            return Err(Error::InvalidRange(format!(
                "projection range [{m}, {end}] is empty"
            )));
        }
    }
    SumVector::from_components(
        x.components
            .iter()
            .filter(|(&b, _)| b >= m && n.map_or(true, |end| b <= end))
            .map(|(&b, v)| (b, v.clone())),
    )
}

/// Tail sum `R_n(x) = Σ_{ν ≥ n} ‖x_ν‖_ν`.
pub fn tail_sums(spec: &SumSpaceSpec, x: &SumVector, n: usize) -> Result<f64> {
    let moduli = x.modulus_sequence(spec)?;
    Ok(moduli.iter().skip(n.saturating_sub(1)).sum())
}

/// A finite prefix of nonnegative scale factors with an implicit zero tail.
///
/// The class `S` of the theory (`σ_n → 0`) is represented by any finite
/// prefix; `S₁` additionally requires every value `< 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleSequence {
    values: Vec<f64>,
}

impl ScaleSequence {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|&s| !(s.is_finite() && s >= 0.0)) {
            return Err(Error::InvalidSpec(
                "scale factors must be finite and nonnegative".into(),
            ));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Scale factor at 1-based block position (implicit zero tail).
    pub fn factor(&self, n: usize) -> f64 {
        self.values.get(n - 1).copied().unwrap_or(0.0)
    }

    /// Membership in `S₁`: every prefix value `< 1` (the zero tail always
    /// qualifies).
    pub fn is_class_s1(&self) -> bool {
        self.values.iter().all(|&s| s < 1.0)
    }

    /// Whether the explicit prefix is nonincreasing. A decreasing-to-zero
    /// extension exists for any finite prefix, so this is advisory only.
    pub fn is_monotone_prefix(&self) -> bool {
        self.values.windows(2).all(|w| w[0] >= w[1])
    }

    /// `σ^k = Π σ_n^{k_n}` with the implicit zero tail.
    pub fn power(&self, k: &crate::multiindex::MultiIndex) -> f64 {
        k.power_real_tail(&self.values)
    }
}

/// Blockwise scaling `σx = (σ_1 x_1, σ_2 x_2, …)`; blocks beyond the
/// explicit prefix scale by zero.
pub fn scale(sigma: &ScaleSequence, x: &SumVector) -> SumVector {
    SumVector::from_components(x.components.iter().map(|(&n, v)| {
        let s = sigma.factor(n);
        (n, v.iter().map(|&z| z * s).collect())
    }))
    .expect("scaling preserves valid block positions")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn two_block_spec(outer: OuterType) -> SumSpaceSpec {
        SumSpaceSpec::new(
            vec![
                Block {
                    p: PExponent::Finite(2.0),
                    dim: 2,
                },
                Block {
                    p: PExponent::Finite(1.0),
                    dim: 1,
                },
            ],
            outer,
        )
        .unwrap()
    }

    fn sample_x() -> SumVector {
        SumVector::from_components([
            (1, vec![c(3.0, 0.0), c(4.0, 0.0)]),
            (2, vec![c(1.0, 0.0)]),
        ])
        .unwrap()
    }

    #[test]
    fn norm_examples() {
        let x = sample_x();
        assert_eq!(norm(&two_block_spec(OuterType::Lq(1.0)), &x).unwrap(), 6.0);
        let l2 = norm(&two_block_spec(OuterType::Lq(2.0)), &x).unwrap();
        assert!((l2 - 26.0f64.sqrt()).abs() < 1e-12);
        assert_eq!(norm(&two_block_spec(OuterType::C0), &x).unwrap(), 5.0);
    }

    #[test]
    fn norm_rejects_dimension_mismatch() {
        let spec = two_block_spec(OuterType::Lq(1.0));
        let bad = SumVector::from_components([(1, vec![c(1.0, 0.0)])]).unwrap();
        assert!(matches!(
            norm(&spec, &bad),
            Err(Error::DimensionMismatch { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn include_is_isometric_and_projects_back() {
        let spec = two_block_spec(OuterType::Lq(1.0));
        let v = vec![c(1.0, 0.0)];
        let inc = include(&spec, 2, &v).unwrap();
        assert_eq!(inc.component(2), Some(v.as_slice()));
        assert_eq!(norm(&spec, &inc).unwrap(), 1.0);
        assert_eq!(project_block(&spec, &inc, 2).unwrap(), v);
    }

    #[test]
    fn project_examples() {
        let spec = two_block_spec(OuterType::Lq(1.0));
        let x = sample_x();
        // A vector supported on block 1 dies under pi_{2,inf}.
        let only1 = include(&spec, 1, &[c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert!(project(&only1, 2, None).unwrap().is_zero());
        // Operator norm 1.
        let projected = project(&x, 1, Some(1)).unwrap();
        assert!(norm(&spec, &projected).unwrap() <= norm(&spec, &x).unwrap());
        // Partition of blocks reconstructs x.
        let head = project(&x, 1, Some(1)).unwrap();
        let tail = project(&x, 2, None).unwrap();
        let mut merged: Vec<(usize, Vec<Complex64>)> =
            head.components().map(|(n, v)| (n, v.to_vec())).collect();
        merged.extend(tail.components().map(|(n, v)| (n, v.to_vec())));
        assert_eq!(SumVector::from_components(merged).unwrap(), x);
    }

    #[test]
    fn project_rejects_bad_range() {
        let x = sample_x();
        assert!(project(&x, 0, None).is_err());
        assert!(project(&x, 3, Some(2)).is_err());
    }

    #[test]
    fn tail_sum_examples() {
        let spec = SumSpaceSpec::l1_sum(&[1, 1, 1]).unwrap();
        let x = SumVector::from_components([
            (1, vec![c(1.0, 0.0)]),
            (2, vec![c(0.5, 0.0)]),
            (3, vec![c(0.25, 0.0)]),
        ])
        .unwrap();
        assert_eq!(tail_sums(&spec, &x, 2).unwrap(), 0.75);
        assert_eq!(tail_sums(&spec, &x, 7).unwrap(), 0.0);
        assert_eq!(tail_sums(&spec, &x, 1).unwrap(), 1.75);
        // For an l1 outer norm the full tail sum is the norm itself.
        assert_eq!(tail_sums(&spec, &x, 1).unwrap(), norm(&spec, &x).unwrap());
    }

    #[test]
    fn scale_examples() {
        let spec = two_block_spec(OuterType::Lq(1.0));
        let x = sample_x();

        let ones = ScaleSequence::new(vec![1.0, 1.0]).unwrap();
        assert_eq!(scale(&ones, &x), x);

        // Prefix of ones acts as the prefix projection.
        let prefix = ScaleSequence::new(vec![1.0]).unwrap();
        assert_eq!(scale(&prefix, &x), project(&x, 1, Some(1)).unwrap());

        let zero = ScaleSequence::new(vec![]).unwrap();
        assert!(scale(&zero, &x).is_zero());

        let sigma = ScaleSequence::new(vec![0.5, 0.25]).unwrap();
        let scaled = scale(&sigma, &x);
        let bound = 0.5 * norm(&spec, &x).unwrap();
        assert!(norm(&spec, &scaled).unwrap() <= bound + 1e-12);
    }

    #[test]
    fn scale_class_checks() {
        let s1 = ScaleSequence::new(vec![0.9, 0.5, 0.1]).unwrap();
        assert!(s1.is_class_s1());
        assert!(s1.is_monotone_prefix());
        let s = ScaleSequence::new(vec![2.0, 1.0]).unwrap();
        assert!(!s.is_class_s1());
        assert!(ScaleSequence::new(vec![-0.1]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let spec = two_block_spec(OuterType::Lq(1.0));
        let text = serde_json::to_string(&spec).unwrap();
        let back: SumSpaceSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back, spec);

        let sup_spec = SumSpaceSpec::new(
            vec![Block {
                p: PExponent::Sup,
                dim: 3,
            }],
            OuterType::C0,
        )
        .unwrap();
        let text = serde_json::to_string(&sup_spec).unwrap();
        assert!(text.contains("\"sup\""));
        let back: SumSpaceSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back, sup_spec);

        let x = sample_x();
        let text = serde_json::to_string(&x).unwrap();
        let back: SumVector = serde_json::from_str(&text).unwrap();
        assert_eq!(back, x);
    }
}

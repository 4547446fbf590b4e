//! Multihomogeneous components, homogeneity norms `[φ]`, the pointwise
//! bound `|φ(x)| ≤ [φ] |x|^k ‖k‖^‖k‖ k^{−k}`, and the `M(σ)` statistic.
//!
//! A `k`-homogeneous polynomial lives on the scalar coordinates of the sum
//! space and has total degree exactly `k_n` inside block `n`. Component
//! extraction from a function oracle uses iterated discrete Fourier
//! transforms over per-coordinate circles; for polynomial inputs the same
//! component is available exactly by degree-pattern filtering, which serves
//! as the rational mode.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_complex::Complex64;
use num_rational::Ratio;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multiindex::MultiIndex;
use crate::poly::Coefficient;
use crate::sampling::Sampler;
use crate::sumspace::{OuterType, PExponent, SumSpaceSpec, SumVector};

/// A holomorphic monomial over the scalar coordinates of the sum space:
/// sorted `(block, coord, exponent)` entries, all 1-based, exponents ≥ 1.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial {
    entries: Vec<(u32, u32, u32)>,
}

impl Monomial {
    pub fn unit() -> Self {
        Self::default()
    }

    pub fn new<I: IntoIterator<Item = (u32, u32, u32)>>(entries: I) -> Result<Self> {
        let mut map: BTreeMap<(u32, u32), u32> = BTreeMap::new();
        for (block, coord, exp) in entries {
            if block == 0 || coord == 0 {
                return Err(Error::InvalidSpec(
                    "monomial blocks and coordinates are 1-based".into(),
                ));
            }
            if exp > 0 {
                *map.entry((block, coord)).or_insert(0) += exp;
            }
        }
        Ok(Self {
            entries: map.into_iter().map(|((b, c), e)| (b, c, e)).collect(),
        })
    }

    pub fn entries(&self) -> &[(u32, u32, u32)] {
        &self.entries
    }

    /// Total degree per block: the multiindex this monomial is homogeneous
    /// for.
    pub fn block_pattern(&self) -> MultiIndex {
        MultiIndex::from_pairs(self.entries.iter().map(|&(b, _, e)| (b, e)))
            .expect("1-based blocks")
    }

    pub fn total_degree(&self) -> u32 {
        self.entries.iter().map(|&(_, _, e)| e).sum()
    }

    pub fn eval(&self, x: &SumVector) -> Complex64 {
        let mut out = Complex64::new(1.0, 0.0);
        for &(b, c, e) in &self.entries {
            out *= x.coordinate(b as usize, c as usize).powu(e);
        }
        out
    }

    fn eval_dense(&self, blocks: &[Vec<Complex64>]) -> Complex64 {
        let mut out = Complex64::new(1.0, 0.0);
        for &(b, c, e) in &self.entries {
            out *= blocks[b as usize - 1][c as usize - 1].powu(e);
        }
        out
    }
}

/// Sparse holomorphic polynomial over the space's scalar coordinates,
/// generic over the coefficient field.
#[derive(Debug, Clone, PartialEq)]
pub struct SpacePolynomial<C> {
    terms: BTreeMap<Monomial, C>,
}

impl<C: Coefficient> Default for SpacePolynomial<C> {
    fn default() -> Self {
        Self {
            terms: BTreeMap::new(),
        }
    }
}

impl<C: Coefficient> SpacePolynomial<C> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, C)>>(terms: I) -> Self {
        let mut out = Self::zero();
        for (m, c) in terms {
            out.add_term(m, c);
        }
        out
    }

    pub fn add_term(&mut self, monomial: Monomial, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&monomial) {
            Some(existing) => {
                let updated = existing.clone() + c;
                if updated.is_zero() {
                    self.terms.remove(&monomial);
                } else {
                    *existing = updated;
                }
            }
            None => {
                self.terms.insert(monomial, c);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &C)> + '_ {
        self.terms.iter()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &Monomial) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, factor: &C) -> Self {
        if factor.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c.clone() * factor.clone()))
                .collect(),
        }
    }

    pub fn max_block(&self) -> u32 {
        self.terms
            .keys()
            .flat_map(|m| m.entries.iter().map(|&(b, _, _)| b))
            .max()
            .unwrap_or(0)
    }

    /// Largest total degree inside any single block (the per-block-circle
    /// bandwidth the Fourier extraction must resolve).
    pub fn max_block_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|m| {
                m.block_pattern()
                    .entries()
                    .map(|(_, e)| e)
                    .max()
                    .unwrap_or(0)
            })
            .max()
            .unwrap_or(0)
    }

    pub fn eval(&self, x: &SumVector) -> Complex64 {
        self.terms
            .iter()
            .map(|(m, c)| c.to_c64() * m.eval(x))
            .sum()
    }

    fn eval_dense(&self, blocks: &[Vec<Complex64>]) -> Complex64 {
        self.terms
            .iter()
            .map(|(m, c)| c.to_c64() * m.eval_dense(blocks))
            .sum()
    }

    pub fn map_coeffs<D: Coefficient>(&self, f: impl Fn(&C) -> D) -> SpacePolynomial<D> {
        SpacePolynomial {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), f(c))).collect(),
        }
    }
}

/// JSON shape of one floating monomial term: `(block, coord, exp)` triples
/// plus the complex coefficient.
#[derive(Serialize, Deserialize)]
struct SpaceTermJson {
    exponents: Vec<[u32; 3]>,
    re: f64,
    im: f64,
}

impl Serialize for SpacePolynomial<Complex64> {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let terms: Vec<SpaceTermJson> = self
            .terms
            .iter()
            .map(|(m, c)| SpaceTermJson {
                exponents: m.entries.iter().map(|&(b, co, e)| [b, co, e]).collect(),
                re: c.re,
                im: c.im,
            })
            .collect();
        terms.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SpacePolynomial<Complex64> {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let terms = Vec::<SpaceTermJson>::deserialize(deserializer)?;
        let mut out = SpacePolynomial::zero();
        for t in terms {
            let m = Monomial::new(t.exponents.iter().map(|&[b, c, e]| (b, c, e)))
                .map_err(|e| D::Error::custom(e.to_string()))?;
            out.add_term(m, Complex64::new(t.re, t.im));
        }
        Ok(out)
    }
}

/// Sampled or exact value of a homogeneity norm `[φ]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormEstimate {
    pub value: f64,
    /// True when the value is a closed-form supremum rather than a sampled
    /// lower estimate.
    pub exact: bool,
}

/// A `k`-homogeneous polynomial component with an optional cached norm.
#[derive(Debug, Clone, PartialEq)]
pub struct KHomPolynomial {
    index: MultiIndex,
    poly: SpacePolynomial<Complex64>,
    pub norm_cache: Option<NormEstimate>,
}

impl KHomPolynomial {
    /// Wraps a polynomial after checking `k`-homogeneity: every monomial's
    /// per-block degree pattern must equal `index` (this also forbids
    /// variables outside the support).
    pub fn new(index: MultiIndex, poly: SpacePolynomial<Complex64>) -> Result<Self> {
        for (m, _) in poly.terms() {
            if m.block_pattern() != index {
                return Err(Error::InvalidSpec(format!(
                    "monomial {:?} is not {index}-homogeneous",
                    m.entries()
                )));
            }
        }
        Ok(Self {
            index,
            poly,
            norm_cache: None,
        })
    }

    pub fn zero(index: MultiIndex) -> Self {
        Self {
            index,
            poly: SpacePolynomial::zero(),
            norm_cache: None,
        }
    }

    pub fn index(&self) -> &MultiIndex {
        &self.index
    }

    pub fn poly(&self) -> &SpacePolynomial<Complex64> {
        &self.poly
    }

    pub fn eval(&self, x: &SumVector) -> Complex64 {
        self.poly.eval(x)
    }
}

/// The multihomogeneous expansion of a function: finitely many
/// `k`-homogeneous terms on a space with an outer radius `R`.
#[derive(Debug, Clone, PartialEq)]
pub struct MHExpansion {
    pub space: SumSpaceSpec,
    pub radius: f64,
    terms: BTreeMap<MultiIndex, KHomPolynomial>,
}

impl MHExpansion {
    pub fn new(space: SumSpaceSpec, radius: f64) -> Result<Self> {
        space.validate()?;
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidSpec(format!(
                "expansion radius must be positive, got {radius}"
            )));
        }
        Ok(Self {
            space,
            radius,
            terms: BTreeMap::new(),
        })
    }

    pub fn insert(&mut self, term: KHomPolynomial) -> Result<()> {
        if term.index().max_position() as usize > self.space.block_count() {
            return Err(Error::InvalidRange(format!(
                "term index {} exceeds the {}-block space",
                term.index(),
                self.space.block_count()
            )));
        }
        self.terms.insert(term.index().clone(), term);
        Ok(())
    }

    /// Terms in graded order.
    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &KHomPolynomial)> + '_ {
        self.terms.iter()
    }

    pub fn terms_mut(&mut self) -> impl Iterator<Item = (&MultiIndex, &mut KHomPolynomial)> + '_ {
        self.terms.iter_mut()
    }

    pub fn term(&self, k: &MultiIndex) -> Option<&KHomPolynomial> {
        self.terms.get(k)
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn indices(&self) -> impl Iterator<Item = &MultiIndex> + '_ {
        self.terms.keys()
    }

    /// Exact symbolic expansion of a polynomial: groups monomials by block
    /// degree pattern.
    pub fn from_polynomial(
        space: SumSpaceSpec,
        radius: f64,
        f: &SpacePolynomial<Complex64>,
    ) -> Result<Self> {
        let mut out = Self::new(space, radius)?;
        for (m, c) in f.terms() {
            let k = m.block_pattern();
            let slot = out
                .terms
                .entry(k.clone())
                .or_insert_with(|| KHomPolynomial::zero(k));
            slot.poly.add_term(m.clone(), *c);
        }
        for (k, term) in &out.terms {
            if term.index().max_position() as usize > out.space.block_count() {
                return Err(Error::InvalidRange(format!(
                    "pattern {k} exceeds the {}-block space",
                    out.space.block_count()
                )));
            }
        }
        Ok(out)
    }

    /// Reassembles the plain polynomial `Σ_k f_k`.
    pub fn to_polynomial(&self) -> SpacePolynomial<Complex64> {
        let mut out = SpacePolynomial::zero();
        for term in self.terms.values() {
            out = out.add(&term.poly);
        }
        out
    }

    /// Fills every missing norm cache with the default-seeded estimator.
    pub fn cache_norms(&mut self, options: &NormOptions) {
        let space = self.space.clone();
        for term in self.terms.values_mut() {
            if term.norm_cache.is_none() {
                term.norm_cache = Some(khom_norm(term, &space, options));
            }
        }
    }
}

#[derive(Serialize, Deserialize)]
struct KHomJson {
    k: MultiIndex,
    monomials: SpacePolynomial<Complex64>,
    norm: Option<NormEstimate>,
}

#[derive(Serialize, Deserialize)]
struct ExpansionJson {
    space: SumSpaceSpec,
    #[serde(rename = "R")]
    radius: f64,
    terms: Vec<KHomJson>,
}

impl Serialize for MHExpansion {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        ExpansionJson {
            space: self.space.clone(),
            radius: self.radius,
            terms: self
                .terms
                .values()
                .map(|t| KHomJson {
                    k: t.index.clone(),
                    monomials: t.poly.clone(),
                    norm: t.norm_cache,
                })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for MHExpansion {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let body = ExpansionJson::deserialize(deserializer)?;
        let mut out = MHExpansion::new(body.space, body.radius)
            .map_err(|e| D::Error::custom(e.to_string()))?;
        for term in body.terms {
            let mut khom = KHomPolynomial::new(term.k, term.monomials)
                .map_err(|e| D::Error::custom(e.to_string()))?;
            khom.norm_cache = term.norm;
            out.insert(khom).map_err(|e| D::Error::custom(e.to_string()))?;
        }
        Ok(out)
    }
}

/// Exact degree-pattern filtering: the `k`-homogeneous component of a
/// polynomial, exact in any coefficient field (rational mode).
pub fn component_exact<C: Coefficient>(
    f: &SpacePolynomial<C>,
    k: &MultiIndex,
) -> SpacePolynomial<C> {
    let mut out = SpacePolynomial::zero();
    for (m, c) in f.terms() {
        if &m.block_pattern() == k {
            out.add_term(m.clone(), c.clone());
        }
    }
    out
}

/// Options for the discrete Fourier component extraction.
#[derive(Debug, Clone)]
pub struct ExtractionOptions {
    /// Nodes per scalar circle; defaults to `degree_cap + 1`.
    pub nodes: Option<usize>,
    /// Radius of the sampling circles; the default 1.0 is valid for
    /// polynomial oracles, which extend entirely.
    pub circle_radius: f64,
}

impl Default for ExtractionOptions {
    fn default() -> Self {
        Self {
            nodes: None,
            circle_radius: 1.0,
        }
    }
}

const MAX_GRID_POINTS: usize = 20_000_000;

/// The `k`-homogeneous component of a function oracle depending only on
/// blocks `1..=active_blocks`, by iterated discrete Fourier extraction with
/// `degree_cap + 1` equispaced nodes per scalar circle. Exact for
/// polynomials of per-block degree at most `degree_cap`, up to floating
/// round-off.
pub fn component<F>(
    mut oracle: F,
    space: &SumSpaceSpec,
    active_blocks: usize,
    k: &MultiIndex,
    degree_cap: u32,
) -> Result<KHomPolynomial>
where
    F: FnMut(&SumVector) -> Complex64,
{
    component_with_options(
        &mut oracle,
        space,
        active_blocks,
        k,
        degree_cap,
        &ExtractionOptions::default(),
    )
}

pub fn component_with_options<F>(
    oracle: &mut F,
    space: &SumSpaceSpec,
    active_blocks: usize,
    k: &MultiIndex,
    degree_cap: u32,
    options: &ExtractionOptions,
) -> Result<KHomPolynomial>
where
    F: FnMut(&SumVector) -> Complex64,
{
    if active_blocks == 0 || active_blocks > space.block_count() {
        return Err(Error::InvalidRange(format!(
            "active block count {active_blocks} out of 1..={}",
            space.block_count()
        )));
    }
    // Support outside the active window: the component is identically zero.
    if k.max_position() as usize > active_blocks {
        return Ok(KHomPolynomial::zero(k.clone()));
    }
    if k.entries().any(|(_, e)| e > degree_cap) {
        return Err(Error::InvalidSpec(format!(
            "index {k} has a block degree above the declared cap {degree_cap}"
        )));
    }
    let m = options.nodes.unwrap_or(degree_cap as usize + 1);
    if m < degree_cap as usize + 1 {
        return Err(Error::InsufficientNodes {
            needed: degree_cap as usize + 1,
            got: m,
        });
    }
    let rho = options.circle_radius;
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::InvalidSpec(format!(
            "circle radius must be positive, got {rho}"
        )));
    }

    // Flattened scalar slots of the active blocks.
    let slots: Vec<(u32, u32)> = (1..=active_blocks)
        .flat_map(|b| {
            let dim = space.blocks[b - 1].dim;
            (1..=dim).map(move |c| (b as u32, c as u32))
        })
        .collect();
    let s = slots.len();
    let grid_len = m
        .checked_pow(s as u32)
        .filter(|&g| g <= MAX_GRID_POINTS)
        .ok_or_else(|| {
            Error::InvalidSpec(format!(
                "extraction grid {m}^{s} exceeds the supported size"
            ))
        })?;

    // Roots of unity table.
    let omega: Vec<Complex64> = (0..m)
        .map(|j| {
            let t = 2.0 * std::f64::consts::PI * j as f64 / m as f64;
            Complex64::new(t.cos(), t.sin())
        })
        .collect();

    // Evaluate the oracle over the full grid once.
    let mut grid_values = Vec::with_capacity(grid_len);
    let mut digits = vec![0usize; s];
    for _ in 0..grid_len {
        let mut blocks: Vec<(usize, Vec<Complex64>)> = (1..=active_blocks)
            .map(|b| (b, vec![Complex64::new(0.0, 0.0); space.blocks[b - 1].dim]))
            .collect();
        for (slot, &(b, c)) in slots.iter().enumerate() {
            blocks[b as usize - 1].1[c as usize - 1] = omega[digits[slot]] * rho;
        }
        let x = SumVector::from_components(blocks)?;
        grid_values.push(oracle(&x));
        for d in digits.iter_mut() {
            *d += 1;
            if *d < m {
                break;
            }
            *d = 0;
        }
    }

    // Target monomials: all coordinate splittings of k across block
    // dimensions, each scalar exponent at most the cap.
    let targets = pattern_monomials(space, k, degree_cap);
    let scale = 1.0 / grid_len as f64;
    let mut poly = SpacePolynomial::zero();
    for target in targets {
        // Per-slot exponents of this monomial.
        let mut alpha = vec![0u32; s];
        for &(b, c, e) in target.entries() {
            let slot = slots
                .iter()
                .position(|&(sb, sc)| sb == b && sc == c)
                .expect("target within active slots");
            alpha[slot] = e;
        }
        let total: u32 = alpha.iter().sum();
        let mut acc = Complex64::new(0.0, 0.0);
        let mut digits = vec![0usize; s];
        for value in &grid_values {
            let mut phase_index = 0usize;
            for (slot, &d) in digits.iter().enumerate() {
                phase_index = (phase_index + d * alpha[slot] as usize) % m;
            }
            // Multiply by the conjugate root of unity.
            acc += value * omega[phase_index].conj();
            for d in digits.iter_mut() {
                *d += 1;
                if *d < m {
                    break;
                }
                *d = 0;
            }
        }
        let coeff = acc * scale / rho.powi(total as i32);
        if coeff.norm_sqr() != 0.0 {
            poly.add_term(target, coeff);
        }
    }
    KHomPolynomial::new(k.clone(), poly)
}

/// All monomials whose block degree pattern equals `k`, with every scalar
/// exponent at most `cap`.
fn pattern_monomials(space: &SumSpaceSpec, k: &MultiIndex, cap: u32) -> Vec<Monomial> {
    let mut per_block: Vec<Vec<Vec<(u32, u32, u32)>>> = Vec::new();
    for (block, degree) in k.entries() {
        let dim = space.blocks[block as usize - 1].dim;
        let mut block_options = Vec::new();
        let mut exps = vec![0u32; dim];
        fill_block_splits(&mut exps, 0, degree, cap, block, &mut block_options);
        per_block.push(block_options);
    }
    let mut out = vec![Vec::new()];
    for options in per_block {
        let mut next = Vec::with_capacity(out.len() * options.len());
        for base in &out {
            for opt in &options {
                let mut combined = base.clone();
                combined.extend(opt.iter().copied());
                next.push(combined);
            }
        }
        out = next;
    }
    out.into_iter()
        .map(|entries| Monomial::new(entries).expect("1-based entries"))
        .collect()
}

fn fill_block_splits(
    exps: &mut Vec<u32>,
    at: usize,
    remaining: u32,
    cap: u32,
    block: u32,
    out: &mut Vec<Vec<(u32, u32, u32)>>,
) {
    if at == exps.len() - 1 {
        if remaining <= cap {
            exps[at] = remaining;
            out.push(
                exps.iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(i, &e)| (block, i as u32 + 1, e))
                    .collect(),
            );
            exps[at] = 0;
        }
        return;
    }
    for e in (0..=remaining.min(cap)).rev() {
        exps[at] = e;
        fill_block_splits(exps, at + 1, remaining - e, cap, block, out);
    }
    exps[at] = 0;
}

/// Options for the sampled homogeneity-norm estimator.
#[derive(Debug, Clone)]
pub struct NormOptions {
    pub seed: u64,
    pub sphere_samples: usize,
    pub ascent_sweeps: usize,
}

impl Default for NormOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            sphere_samples: 4096,
            ascent_sweeps: 100,
        }
    }
}

/// The homogeneity norm `[φ] = sup_{‖x‖ ≤ 1} |φ(x)|`.
///
/// For a single monomial the supremum has a closed form (nested Lagrange
/// maximization through the block and outer norms) and is returned exact;
/// in particular `[z^k] = k^k ‖k‖^{−‖k‖}` on `ℓ₁` structures. Anything
/// else gets a sampled lower estimate refined by coordinate ascent.
pub fn khom_norm(
    phi: &KHomPolynomial,
    space: &SumSpaceSpec,
    options: &NormOptions,
) -> NormEstimate {
    if phi.poly.is_zero() {
        return NormEstimate {
            value: 0.0,
            exact: true,
        };
    }
    if phi.poly.term_count() == 1 {
        let (m, c) = phi.poly.terms().next().expect("one term");
        return NormEstimate {
            value: c.norm() * exact_monomial_sup(m, space),
            exact: true,
        };
    }
    NormEstimate {
        value: sampled_sup(&phi.poly, space, options),
        exact: false,
    }
}

/// Certified upper bound `Σ |c_α| [x^α]` by the triangle inequality.
pub fn khom_norm_upper(phi: &KHomPolynomial, space: &SumSpaceSpec) -> f64 {
    phi.poly
        .terms()
        .map(|(m, c)| c.norm() * exact_monomial_sup(m, space))
        .sum()
}

/// Exact `sup_{‖x‖ ≤ 1} |x^α|` for one monomial: maximize per block over
/// the `ℓ_p` sphere, then across blocks over the outer norm.
fn exact_monomial_sup(m: &Monomial, space: &SumSpaceSpec) -> f64 {
    if m.entries().is_empty() {
        return 1.0;
    }
    let k = m.block_pattern();
    let total = k.total_degree();

    if let Some(exact) = exact_monomial_sup_rational(m, space, &k, total) {
        return exact;
    }

    // Floating fallback of the same closed form.
    let mut value = 1.0f64;
    match space.outer {
        OuterType::Lq(q) => {
            for (_, kn) in k.entries() {
                value *= (f64::from(kn) / total as f64).powf(f64::from(kn) / q);
            }
        }
        OuterType::C0 => {}
    }
    let mut at = 0;
    while at < m.entries().len() {
        let block = m.entries()[at].0;
        let kn = k.exponent(block);
        let p = &space.blocks[block as usize - 1].p;
        while at < m.entries().len() && m.entries()[at].0 == block {
            let (_, _, e) = m.entries()[at];
            if let PExponent::Finite(p) = p {
                value *= (f64::from(e) / f64::from(kn)).powf(f64::from(e) / p);
            }
            at += 1;
        }
    }
    value
}

/// Exact rational evaluation of the monomial supremum, available when the
/// outer norm is `ℓ₁` and each active block is `ℓ₁` or touches a single
/// coordinate. Covers every all-`ℓ₁` structure.
fn exact_monomial_sup_rational(
    m: &Monomial,
    space: &SumSpaceSpec,
    k: &MultiIndex,
    total: u64,
) -> Option<f64> {
    if space.outer != OuterType::Lq(1.0) {
        return None;
    }
    // numerator / denominator accumulated as exact integers
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    // Outer factor Π (k_n / ‖k‖)^{k_n}.
    for (_, kn) in k.entries() {
        num *= BigUint::from(kn).pow(kn);
        den *= BigUint::from(total).pow(kn);
    }
    // Inner factors.
    let mut at = 0;
    while at < m.entries().len() {
        let block = m.entries()[at].0;
        let kn = k.exponent(block);
        let mut coords = Vec::new();
        while at < m.entries().len() && m.entries()[at].0 == block {
            coords.push(m.entries()[at].2);
            at += 1;
        }
        let p = &space.blocks[block as usize - 1].p;
        if coords.len() == 1 {
            // Single active coordinate: the inner factor is 1 for any p.
            continue;
        }
        match p {
            PExponent::Finite(pv) if *pv == 1.0 => {
                for e in coords {
                    num *= BigUint::from(e).pow(e);
                    den *= BigUint::from(kn).pow(e);
                }
            }
            PExponent::Sup => {
                // Max-norm blocks contribute factor 1.
            }
            _ => return None,
        }
    }
    Ratio::new(num, den).to_f64()
}

/// The Prop 2.2 maximizer `y = (k_n/‖k‖ · x_n/‖x_n‖_n)`, a unit vector at
/// which a monomial attains its homogeneity norm. Requires `x` nonzero on
/// the support of `k`.
pub fn prop22_maximizer(
    k: &MultiIndex,
    x: &SumVector,
    space: &SumSpaceSpec,
) -> Result<SumVector> {
    let moduli = x.modulus_sequence(space)?;
    let total = k.total_degree() as f64;
    if total == 0.0 {
        return Ok(SumVector::zero());
    }
    let mut components = Vec::new();
    for (block, kn) in k.entries() {
        let b = block as usize;
        let norm_n = moduli[b - 1];
        if norm_n == 0.0 {
            return Err(Error::InvalidSpec(format!(
                "x vanishes on block {b} in the support of k"
            )));
        }
        let scale = f64::from(kn) / total / norm_n;
        let v: Vec<Complex64> = x
            .component(b)
            .expect("nonzero block present")
            .iter()
            .map(|&z| z * scale)
            .collect();
        components.push((b, v));
    }
    SumVector::from_components(components)
}

fn sampled_sup(
    poly: &SpacePolynomial<Complex64>,
    space: &SumSpaceSpec,
    options: &NormOptions,
) -> f64 {
    let mut sampler = Sampler::new(options.seed);
    let dims: Vec<usize> = space.blocks.iter().map(|b| b.dim).collect();

    let normalize = |blocks: &mut [Vec<Complex64>]| {
        let moduli: Vec<f64> = blocks
            .iter()
            .enumerate()
            .map(|(i, v)| space.blocks[i].p.vector_norm(v))
            .collect();
        let norm = space.outer.sequence_norm(&moduli);
        if norm > 0.0 {
            let s = 1.0 / norm;
            for v in blocks.iter_mut() {
                for z in v.iter_mut() {
                    *z *= s;
                }
            }
        }
    };

    let mut best_point: Vec<Vec<Complex64>> = Vec::new();
    let mut best = f64::NEG_INFINITY;

    let consider = |blocks: Vec<Vec<Complex64>>, best: &mut f64, best_point: &mut Vec<Vec<Complex64>>| {
        let value = poly.eval_dense(&blocks).norm();
        if value > *best {
            *best = value;
            *best_point = blocks;
        }
    };

    // Per-monomial Lagrange maximizers make strong deterministic starts.
    for (m, _) in poly.terms() {
        let mut blocks: Vec<Vec<Complex64>> = dims
            .iter()
            .map(|&d| vec![Complex64::new(0.0, 0.0); d])
            .collect();
        for &(b, c, e) in m.entries() {
            blocks[b as usize - 1][c as usize - 1] = Complex64::new(f64::from(e), 0.0);
        }
        normalize(&mut blocks);
        consider(blocks, &mut best, &mut best_point);
    }

    for _ in 0..options.sphere_samples {
        let mut blocks: Vec<Vec<Complex64>> = dims
            .iter()
            .map(|&d| (0..d).map(|_| sampler.complex_gaussian()).collect())
            .collect();
        normalize(&mut blocks);
        consider(blocks, &mut best, &mut best_point);
    }

    if best_point.is_empty() {
        return 0.0;
    }

    // Coordinate ascent on the unit sphere: modulus and phase tweaks per
    // scalar coordinate, shrinking the step when a sweep stalls.
    let mut step = 0.3f64;
    for _ in 0..options.ascent_sweeps {
        let mut improved = false;
        for b in 0..dims.len() {
            for c in 0..dims[b] {
                let factors = [
                    Complex64::new(1.0 + step, 0.0),
                    Complex64::new(1.0 / (1.0 + step), 0.0),
                    Complex64::from_polar(1.0, step),
                    Complex64::from_polar(1.0, -step),
                ];
                for factor in factors {
                    let mut candidate = best_point.clone();
                    if candidate[b][c].norm_sqr() == 0.0 {
                        candidate[b][c] = Complex64::new(step, 0.0);
                    } else {
                        candidate[b][c] *= factor;
                    }
                    normalize(&mut candidate);
                    let value = poly.eval_dense(&candidate).norm();
                    if value > best {
                        best = value;
                        best_point = candidate;
                        improved = true;
                    }
                }
            }
        }
        if !improved {
            step *= 0.6;
            if step < 1e-12 {
                break;
            }
        }
    }
    best
}

/// The Prop 2.2 right-hand side `[φ] |x|^k ‖k‖^‖k‖ k^{−k}`, using the
/// cached norm.
pub fn prop22_bound(
    phi: &KHomPolynomial,
    space: &SumSpaceSpec,
    x: &SumVector,
) -> Result<f64> {
    let norm = phi
        .norm_cache
        .ok_or_else(|| Error::NormUnavailable(phi.index.to_string()))?;
    let moduli = x.modulus_sequence(space)?;
    let xk = phi.index.power_real_tail(&moduli);
    Ok(norm.value * xk * crate::dominate::series_weight(&phi.index))
}

/// `M(σ) = sup_k [f_k] σ^k R^{‖k‖}` over the stored terms.
pub fn m_sigma(expansion: &MHExpansion, sigma: &crate::sumspace::ScaleSequence) -> Result<f64> {
    let mut sup = 0.0f64;
    for (k, term) in expansion.terms() {
        let norm = term
            .norm_cache
            .ok_or_else(|| Error::NormUnavailable(k.to_string()))?;
        let value = norm.value * sigma.power(k) * expansion.radius.powi(k.total_degree() as i32);
        sup = sup.max(value);
    }
    Ok(sup)
}

/// `Σ_k f_k(x)` over the stored terms in graded order.
pub fn partial_sum_eval(expansion: &MHExpansion, x: &SumVector) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (_, term) in expansion.terms() {
        acc += term.eval(x);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sumspace::Block;

    fn scalar_blocks(n: usize) -> SumSpaceSpec {
        SumSpaceSpec::l1_sum(&vec![1; n]).unwrap()
    }

    fn mono(entries: &[(u32, u32, u32)]) -> Monomial {
        Monomial::new(entries.iter().copied()).unwrap()
    }

    fn point(values: &[(usize, Complex64)]) -> SumVector {
        SumVector::from_components(values.iter().map(|&(b, z)| (b, vec![z]))).unwrap()
    }

    fn one() -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    #[test]
    fn eval_examples() {
        // z1 z2 at x = (1, 1).
        let m = mono(&[(1, 1, 1), (2, 1, 1)]);
        let phi = KHomPolynomial::new(
            MultiIndex::from_dense(&[1, 1]),
            SpacePolynomial::from_terms([(m, one())]),
        )
        .unwrap();
        let x = point(&[(1, one()), (2, one())]);
        assert_eq!(phi.eval(&x), one());

        // Zero block in the support kills the value.
        let x0 = point(&[(1, one())]);
        assert_eq!(phi.eval(&x0), Complex64::new(0.0, 0.0));

        // Homogeneity under a uniform scaling: eval(2x) = 2^‖k‖ eval(x).
        let x2 = point(&[(1, Complex64::new(2.0, 0.0)), (2, Complex64::new(2.0, 0.0))]);
        assert_eq!(phi.eval(&x2), Complex64::new(4.0, 0.0));
    }

    #[test]
    fn khom_constructor_rejects_mixed_patterns() {
        let bad = SpacePolynomial::from_terms([
            (mono(&[(1, 1, 2)]), one()),
            (mono(&[(1, 1, 1), (2, 1, 1)]), one()),
        ]);
        assert!(KHomPolynomial::new(MultiIndex::from_dense(&[2]), bad).is_err());
    }

    #[test]
    fn component_exact_filters_patterns() {
        // f = z1^2 + z1 z2.
        let f = SpacePolynomial::from_terms([
            (mono(&[(1, 1, 2)]), one()),
            (mono(&[(1, 1, 1), (2, 1, 1)]), one()),
        ]);
        let c20 = component_exact(&f, &MultiIndex::from_dense(&[2, 0]));
        assert_eq!(c20.term_count(), 1);
        assert_eq!(c20.coefficient(&mono(&[(1, 1, 2)])), one());

        let c02 = component_exact(&f, &MultiIndex::from_dense(&[0, 2]));
        assert!(c02.is_zero());
    }

    #[test]
    fn component_dft_matches_exact_filtering() {
        let space = scalar_blocks(2);
        // f = z1^2 + z1 z2 as an oracle.
        let f = SpacePolynomial::from_terms([
            (mono(&[(1, 1, 2)]), one()),
            (mono(&[(1, 1, 1), (2, 1, 1)]), Complex64::new(0.5, -1.5)),
        ]);
        for k in [MultiIndex::from_dense(&[2, 0]), MultiIndex::from_dense(&[1, 1])] {
            let via_dft = component(|x| f.eval(x), &space, 2, &k, 3).unwrap();
            let via_filter = component_exact(&f, &k);
            for (m, c) in via_filter.terms() {
                assert!((via_dft.poly().coefficient(m) - c).norm() < 1e-14);
            }
            for (m, c) in via_dft.poly().terms() {
                assert!((via_filter.coefficient(m) - c).norm() < 1e-14);
            }
        }
        // Support outside the active window: zero.
        let k = MultiIndex::from_pairs([(5, 1)]).unwrap();
        let c = component(|x| f.eval(x), &space, 2, &k, 3).unwrap();
        assert!(c.poly().is_zero());
    }

    #[test]
    fn component_requires_enough_nodes() {
        let space = scalar_blocks(1);
        let f = SpacePolynomial::from_terms([(mono(&[(1, 1, 2)]), one())]);
        let err = component_with_options(
            &mut |x: &SumVector| f.eval(x),
            &space,
            1,
            &MultiIndex::from_dense(&[2]),
            2,
            &ExtractionOptions {
                nodes: Some(2),
                circle_radius: 1.0,
            },
        )
        .unwrap_err();
        assert!(matches!(err, Error::InsufficientNodes { needed: 3, got: 2 }));
    }

    #[test]
    fn khom_norm_monomial_values() {
        let space = scalar_blocks(2);
        let opts = NormOptions::default();

        let z1z2 = KHomPolynomial::new(
            MultiIndex::from_dense(&[1, 1]),
            SpacePolynomial::from_terms([(mono(&[(1, 1, 1), (2, 1, 1)]), one())]),
        )
        .unwrap();
        let est = khom_norm(&z1z2, &space, &opts);
        assert!(est.exact);
        assert_eq!(est.value, 0.25);

        let z1sq = KHomPolynomial::new(
            MultiIndex::from_dense(&[2]),
            SpacePolynomial::from_terms([(mono(&[(1, 1, 2)]), one())]),
        )
        .unwrap();
        assert_eq!(khom_norm(&z1sq, &space, &opts).value, 1.0);

        let scaled = KHomPolynomial::new(
            MultiIndex::from_dense(&[1, 1]),
            SpacePolynomial::from_terms([(mono(&[(1, 1, 1), (2, 1, 1)]), Complex64::new(2.0, 0.0))]),
        )
        .unwrap();
        assert_eq!(khom_norm(&scaled, &space, &opts).value, 0.5);
    }

    #[test]
    fn khom_norm_multicoordinate_l1_block() {
        // x11 * x12 inside a single l1(C^2) block: sup = 1/4 at (1/2, 1/2).
        let space = SumSpaceSpec::l1_sum(&[2]).unwrap();
        let phi = KHomPolynomial::new(
            MultiIndex::from_dense(&[2]),
            SpacePolynomial::from_terms([(mono(&[(1, 1, 1), (1, 2, 1)]), one())]),
        )
        .unwrap();
        let est = khom_norm(&phi, &space, &NormOptions::default());
        assert!(est.exact);
        assert_eq!(est.value, 0.25);
    }

    #[test]
    fn sampled_norm_reaches_monomial_values() {
        // Two-term polynomial: sampled estimate must stay below the
        // triangle-inequality upper bound and above each single point.
        let space = scalar_blocks(2);
        let phi = KHomPolynomial::new(
            MultiIndex::from_dense(&[1, 1]),
            SpacePolynomial::from_terms([
                (mono(&[(1, 1, 1), (2, 1, 1)]), one()),
                (mono(&[(1, 1, 1), (2, 1, 1)]), Complex64::new(0.0, 1.0)),
            ]),
        )
        .unwrap();
        // The two monomials merged: coefficient 1 + i, true norm = sqrt(2)/4.
        let est = khom_norm(&phi, &space, &NormOptions::default());
        assert!(est.exact);
        assert!((est.value - 2.0f64.sqrt() / 4.0).abs() < 1e-15);

        let mixed = KHomPolynomial::new(
            MultiIndex::from_dense(&[2]),
            SpacePolynomial::from_terms([
                (mono(&[(1, 1, 2)]), one()),
                (mono(&[(1, 1, 1), (1, 2, 1)]), one()),
            ]),
        )
        .unwrap();
        let space2 = SumSpaceSpec::l1_sum(&[2]).unwrap();
        let est = khom_norm(&mixed, &space2, &NormOptions::default());
        assert!(!est.exact);
        assert!(est.value <= khom_norm_upper(&mixed, &space2) + 1e-12);
        // |z11^2 + z11 z12| at (1, 0) equals 1, so the estimate is >= 1.
        assert!(est.value >= 1.0 - 1e-12);
    }

    #[test]
    fn prop22_bound_examples() {
        let space = scalar_blocks(2);
        let mut phi = KHomPolynomial::new(
            MultiIndex::from_dense(&[1, 1]),
            SpacePolynomial::from_terms([(mono(&[(1, 1, 1), (2, 1, 1)]), one())]),
        )
        .unwrap();
        phi.norm_cache = Some(khom_norm(&phi, &space, &NormOptions::default()));

        // Equality at x = (1, 1): bound = (1/4)·1·4 = 1 = |φ(x)|.
        let x = point(&[(1, one()), (2, one())]);
        let bound = prop22_bound(&phi, &space, &x).unwrap();
        assert!((bound - 1.0).abs() < 1e-15);
        assert!((phi.eval(&x).norm() - bound).abs() < 1e-12);

        // Zero block: |φ(x)| = 0 <= bound.
        let x0 = point(&[(1, one())]);
        assert_eq!(phi.eval(&x0).norm(), 0.0);
        assert!(prop22_bound(&phi, &space, &x0).unwrap() >= 0.0);
    }

    #[test]
    fn prop22_maximizer_attains_monomial_norm() {
        let space = scalar_blocks(3);
        let k = MultiIndex::from_dense(&[2, 0, 1]);
        let phi = KHomPolynomial::new(
            k.clone(),
            SpacePolynomial::from_terms([(mono(&[(1, 1, 2), (3, 1, 1)]), one())]),
        )
        .unwrap();
        let x = point(&[
            (1, Complex64::new(0.3, 0.4)),
            (3, Complex64::new(-0.2, 0.1)),
        ]);
        let y = prop22_maximizer(&k, &x, &space).unwrap();
        assert!((crate::sumspace::norm(&space, &y).unwrap() - 1.0).abs() < 1e-12);
        let norm_value = khom_norm(&phi, &space, &NormOptions::default()).value;
        assert!((phi.eval(&y).norm() - norm_value).abs() < 1e-12);
    }

    #[test]
    fn m_sigma_examples() {
        let space = scalar_blocks(1);
        let mut expansion = MHExpansion::new(space.clone(), 1.0).unwrap();
        for d in 0..=5u32 {
            let k = MultiIndex::from_dense(&[d]);
            let mut term = if d == 0 {
                let mut p = SpacePolynomial::zero();
                p.add_term(Monomial::unit(), one());
                KHomPolynomial::new(k.clone(), p).unwrap()
            } else {
                KHomPolynomial::new(
                    k.clone(),
                    SpacePolynomial::from_terms([(mono(&[(1, 1, d)]), one())]),
                )
                .unwrap()
            };
            term.norm_cache = Some(NormEstimate {
                value: 1.0,
                exact: true,
            });
            expansion.insert(term).unwrap();
        }
        let sigma = crate::sumspace::ScaleSequence::new(vec![0.5]).unwrap();
        // sup is attained at k = 0.
        assert_eq!(m_sigma(&expansion, &sigma).unwrap(), 1.0);

        // Scaling all norms scales M(σ).
        for (_, term) in expansion.terms_mut() {
            term.norm_cache = Some(NormEstimate {
                value: 3.0,
                exact: true,
            });
        }
        assert_eq!(m_sigma(&expansion, &sigma).unwrap(), 3.0);

        let empty = MHExpansion::new(space, 1.0).unwrap();
        assert_eq!(m_sigma(&empty, &sigma).unwrap(), 0.0);
    }

    #[test]
    fn partial_sum_reproduces_polynomials() {
        let space = scalar_blocks(2);
        let f = SpacePolynomial::from_terms([
            (Monomial::unit(), Complex64::new(2.0, 1.0)),
            (mono(&[(1, 1, 2)]), one()),
            (mono(&[(1, 1, 1), (2, 1, 1)]), Complex64::new(0.0, -1.0)),
        ]);
        let expansion = MHExpansion::from_polynomial(space, 1.0, &f).unwrap();
        assert_eq!(expansion.term_count(), 3);
        let x = point(&[(1, Complex64::new(0.2, 0.1)), (2, Complex64::new(-0.3, 0.5))]);
        let direct = f.eval(&x);
        let summed = partial_sum_eval(&expansion, &x);
        assert!((direct - summed).norm() < 1e-15);
    }

    #[test]
    fn expansion_json_round_trip() {
        let space = scalar_blocks(2);
        let f = SpacePolynomial::from_terms([
            (Monomial::unit(), Complex64::new(2.0, 1.0)),
            (mono(&[(1, 1, 2)]), one()),
            (mono(&[(1, 1, 1), (2, 1, 1)]), Complex64::new(0.0, -1.0)),
        ]);
        let mut expansion = MHExpansion::from_polynomial(space, 1.5, &f).unwrap();
        expansion.cache_norms(&NormOptions::default());
        let text = serde_json::to_string(&expansion).unwrap();
        let back: MHExpansion = serde_json::from_str(&text).unwrap();
        assert_eq!(back, expansion);
    }

    #[test]
    fn block_spec_helpers() {
        let space = SumSpaceSpec::new(
            vec![
                Block {
                    p: PExponent::Finite(1.0),
                    dim: 2,
                },
                Block {
                    p: PExponent::Finite(2.0),
                    dim: 1,
                },
            ],
            OuterType::Lq(1.0),
        )
        .unwrap();
        assert_eq!(space.scalar_len(), 3);
        assert!(!space.is_all_l1());
        assert!(SumSpaceSpec::l1_sum(&[1, 2]).unwrap().is_all_l1());
    }
}

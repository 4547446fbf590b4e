//! Runge-type approximation with an error certificate.
//!
//! From a multihomogeneous expansion of `f` on `B(R)` the algorithm keeps
//! the index set `𝒦 = {k : [f_k](θR)^‖k‖ Q^{#k} ≥ δ}`; the kept partial sum
//! `g` is a polynomial (hence entire) and the dropped terms obey
//! `|f(x) − g(x)| ≤ δ · sup_{‖w‖₁ ≤ θ} Δ(Q^{−1}, w)` on `‖x‖ < r`, provided
//! `r < θ² R`. The sup of `Δ` is certified for `eθ < 1` and sampled
//! otherwise.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dominate::{delta_sup_bound, delta_truncated};
use crate::error::{Error, Result};
use crate::mhcalc::{MHExpansion, NormEstimate};
use crate::multiindex::MultiIndex;
use crate::sampling::Sampler;

/// Parameters of one approximation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RungeParams {
    pub outer_radius: f64,
    pub inner_radius: f64,
    pub theta: f64,
    pub q_factor: f64,
    pub delta: f64,
    pub epsilon: f64,
}

impl RungeParams {
    pub fn validate(&self) -> Result<()> {
        let (r_outer, r_inner) = (self.outer_radius, self.inner_radius);
        if !(r_outer > 0.0 && r_outer.is_finite()) {
            return Err(Error::InvalidSpec(format!(
                "outer radius must be positive, got {r_outer}"
            )));
        }
        if !(self.theta > 0.0 && self.theta < 1.0) {
            return Err(Error::InvalidSpec(format!(
                "θ must lie in (0, 1), got {}",
                self.theta
            )));
        }
        if !(r_inner > 0.0 && r_inner < self.theta * self.theta * r_outer) {
            return Err(Error::InvalidSpec(format!(
                "need 0 < r < θ²R, got r = {r_inner}, θ²R = {}",
                self.theta * self.theta * r_outer
            )));
        }
        if !(self.q_factor >= 1.0) {
            return Err(Error::InvalidSpec(format!(
                "Q must be >= 1, got {}",
                self.q_factor
            )));
        }
        if !(self.delta > 0.0) {
            return Err(Error::InvalidSpec(format!(
                "δ must be positive, got {}",
                self.delta
            )));
        }
        Ok(())
    }

    /// The selection weight `c'_k = [f_k](θR)^‖k‖ Q^{#k}`.
    pub fn selection_weight(&self, norm: f64, k: &MultiIndex) -> f64 {
        norm * (self.theta * self.outer_radius).powi(k.total_degree() as i32)
            * self.q_factor.powi(k.support_size() as i32)
    }
}

/// Outcome of the certification step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproximationCertificate {
    pub kset: Vec<MultiIndex>,
    /// Sum of the per-term sup bounds `[f_k] r^‖k‖` of the stored terms
    /// that were dropped (the finite part of the discarded mass).
    pub dropped_mass_bound: f64,
    /// The bound (certified) or sampled estimate of
    /// `sup_{‖w‖₁ ≤ θ} Δ(Q^{−1}, w)`.
    pub delta_sup: f64,
    /// Always exactly `δ · delta_sup`.
    pub error_bound: f64,
    pub satisfied: bool,
    /// True when `delta_sup` is the certified bound (`eθ < 1`), false when
    /// it is a sampled estimate.
    pub certified: bool,
}

fn term_norm(expansion: &MHExpansion, k: &MultiIndex) -> Result<NormEstimate> {
    expansion
        .term(k)
        .ok_or_else(|| Error::MissingTerm(k.to_string()))?
        .norm_cache
        .ok_or_else(|| Error::NormUnavailable(k.to_string()))
}

/// `𝒦 = {k : c'_k ≥ δ}`, inclusive comparison, in graded order.
pub fn select_kset(expansion: &MHExpansion, params: &RungeParams) -> Result<Vec<MultiIndex>> {
    params.validate()?;
    let mut kept = Vec::new();
    for (k, term) in expansion.terms() {
        let norm = term
            .norm_cache
            .ok_or_else(|| Error::NormUnavailable(k.to_string()))?;
        if params.selection_weight(norm.value, k) >= params.delta {
            kept.push(k.clone());
        }
    }
    Ok(kept)
}

/// `g = Σ_{k ∈ 𝒦} f_k` as an expansion containing exactly the kept terms.
pub fn build_approximant(expansion: &MHExpansion, kset: &[MultiIndex]) -> Result<MHExpansion> {
    let mut out = MHExpansion::new(expansion.space.clone(), expansion.radius)?;
    for k in kset {
        let term = expansion
            .term(k)
            .ok_or_else(|| Error::MissingTerm(k.to_string()))?;
        out.insert(term.clone())?;
    }
    Ok(out)
}

/// Sampled estimate of `sup_{‖w‖₁ ≤ θ} Δ(q, w)`. Δ is monotone in every
/// coordinate, so sampling the face `‖w‖₁ = θ` suffices.
pub fn sampled_delta_sup(
    q: Complex64,
    theta: f64,
    positions: usize,
    seed: u64,
    truncation_degree: u32,
) -> Result<f64> {
    let positions = positions.clamp(1, 6);
    let mut sup = 0.0f64;
    // Corner: everything on one position.
    let corner = delta_truncated(q, &[theta], truncation_degree, 1)?.value;
    sup = sup.max(corner);
    // Uniform spread.
    let spread = vec![theta / positions as f64; positions];
    sup = sup.max(delta_truncated(q, &spread, truncation_degree, positions as u32)?.value);
    // Random simplex points.
    let mut sampler = Sampler::new(seed);
    for _ in 0..256 {
        let raw: Vec<f64> = (0..positions).map(|_| sampler.uniform().max(1e-12)).collect();
        let total: f64 = raw.iter().sum();
        let w: Vec<f64> = raw.iter().map(|v| v * theta / total).collect();
        sup = sup.max(delta_truncated(q, &w, truncation_degree, positions as u32)?.value);
    }
    Ok(sup)
}

/// Certificate for fixed parameters: selection, dropped-mass bookkeeping,
/// and the `δ · sup Δ` bound (certified when `eθ < 1`, sampled otherwise).
pub fn certify_error(expansion: &MHExpansion, params: &RungeParams) -> Result<ApproximationCertificate> {
    certify_error_seeded(expansion, params, 0)
}

pub fn certify_error_seeded(
    expansion: &MHExpansion,
    params: &RungeParams,
    seed: u64,
) -> Result<ApproximationCertificate> {
    params.validate()?;
    let kset = select_kset(expansion, params)?;

    let q = Complex64::new(1.0 / params.q_factor, 0.0);
    let (delta_sup, certified) = match delta_sup_bound(q, params.theta) {
        Ok(bound) => (bound, true),
        Err(_) => (
            sampled_delta_sup(
                q,
                params.theta,
                expansion.space.block_count(),
                seed,
                40,
            )?,
            false,
        ),
    };

    let mut dropped = 0.0;
    for (k, _) in expansion.terms() {
        if kset.contains(k) {
            continue;
        }
        let norm = term_norm(expansion, k)?;
        dropped += norm.value * params.inner_radius.powi(k.total_degree() as i32);
    }

    let error_bound = params.delta * delta_sup;
    Ok(ApproximationCertificate {
        kset,
        dropped_mass_bound: dropped,
        delta_sup,
        error_bound,
        satisfied: error_bound < params.epsilon,
        certified,
    })
}

/// Driver options; the sampled fallback can be disabled to force an error
/// when `θ` cannot stay inside the certified Δ regime.
#[derive(Debug, Clone)]
pub struct ApproximateOptions {
    pub allow_sampled_fallback: bool,
    pub seed: u64,
}

impl Default for ApproximateOptions {
    fn default() -> Self {
        Self {
            allow_sampled_fallback: true,
            seed: 0,
        }
    }
}

/// θ is kept at 0.35 (inside the certified regime `θ < 1/e`) whenever the
/// geometry allows, and pushed just above `√(r/R)` otherwise.
fn pick_theta(inner: f64, outer: f64) -> f64 {
    let base = (inner / outer).sqrt();
    let mut theta = (1.01 * base).max(0.35);
    if theta >= 1.0 {
        theta = (base + 1.0) / 2.0;
    }
    theta
}

/// End-to-end driver: chooses `θ`, doubles `Q` until the Δ sup is at most
/// 2, sets `δ = ε / (2 · sup Δ)`, then selects, builds and certifies.
pub fn approximate(
    expansion: &MHExpansion,
    outer_radius: f64,
    inner_radius: f64,
    epsilon: f64,
) -> Result<(MHExpansion, ApproximationCertificate)> {
    approximate_with_options(
        expansion,
        outer_radius,
        inner_radius,
        epsilon,
        &ApproximateOptions::default(),
    )
}

pub fn approximate_with_options(
    expansion: &MHExpansion,
    outer_radius: f64,
    inner_radius: f64,
    epsilon: f64,
    options: &ApproximateOptions,
) -> Result<(MHExpansion, ApproximationCertificate)> {
    if !(inner_radius > 0.0 && inner_radius < outer_radius) {
        return Err(Error::InvalidRange(format!(
            "need 0 < r < R, got r = {inner_radius}, R = {outer_radius}"
        )));
    }
    if !(epsilon > 0.0) {
        return Err(Error::InvalidSpec(format!(
            "target error must be positive, got {epsilon}"
        )));
    }

    let theta = pick_theta(inner_radius, outer_radius);
    let certified_regime = std::f64::consts::E * theta < 1.0;
    if !certified_regime && !options.allow_sampled_fallback {
        return Err(Error::NotCertifiable(format!(
            "θ = {theta} is outside the certified regime and the sampled fallback is disabled"
        )));
    }

    // Doubling search for Q: stop when the Δ sup is small (<= 2).
    let mut q_factor = 1.0f64;
    let mut delta_sup;
    loop {
        let q = Complex64::new(1.0 / q_factor, 0.0);
        delta_sup = if certified_regime {
            delta_sup_bound(q, theta)?
        } else {
            sampled_delta_sup(q, theta, expansion.space.block_count(), options.seed, 40)?
        };
        if delta_sup <= 2.0 || q_factor >= 2f64.powi(50) {
            break;
        }
        q_factor *= 2.0;
    }

    let params = RungeParams {
        outer_radius,
        inner_radius,
        theta,
        q_factor,
        delta: epsilon / (2.0 * delta_sup),
        epsilon,
    };
    let cert = certify_error_seeded(expansion, &params, options.seed)?;
    let g = build_approximant(expansion, &cert.kset)?;
    Ok((g, cert))
}

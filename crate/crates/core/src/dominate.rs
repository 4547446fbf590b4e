//! The dominating function `Δ(q, z) = Σ_k (‖k‖^‖k‖ / k^k) |q|^{#k} z^k`
//! over nonnegative `z` with `‖z‖₁ < 1`, truncated by total degree, with a
//! certified tail bound on the range `e·‖z‖₁ < 1`.
//!
//! The tail bound comes from `d^d / k^k ≤ e^d · d! / Π k_i!` and the
//! multinomial theorem: the degree-`d` shell of the series is at most
//! `|q| (e t)^d` for `|q| ≤ 1`, `t = ‖z‖₁`, so everything past degree `D`
//! sums to at most `|q| (e t)^{D+1} / (1 − e t)`.

use num_bigint::BigUint;
use num_complex::Complex64;
use num_rational::Ratio;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multiindex::{MultiIndex, SelfPower};

/// Truncated value of `Δ` plus an optional certified tail bound.
///
/// When `tail_bound` is present the full series lies in
/// `[value, value + tail_bound]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaResult {
    pub value: f64,
    pub tail_bound: Option<f64>,
    pub degree_cut: u32,
}

/// `[z^k] = k^k ‖k‖^{−‖k‖}`, the sup of the monomial `z^k` over the unit
/// ball of `ℓ₁`. Equals 1 exactly when `#k ≤ 1`.
pub fn monomial_norm(k: &MultiIndex) -> f64 {
    if k.support_size() <= 1 {
        return 1.0;
    }
    match exact_weight_ratio(k) {
        Some(ratio) => Ratio::new(ratio.1, ratio.0).to_f64().unwrap_or(0.0),
        None => (-log_weight(k)).exp(),
    }
}

/// The series weight `‖k‖^‖k‖ / k^k = 1 / [z^k]`.
pub fn series_weight(k: &MultiIndex) -> f64 {
    if k.support_size() <= 1 {
        return 1.0;
    }
    match exact_weight_ratio(k) {
        Some(ratio) => Ratio::new(ratio.0, ratio.1).to_f64().unwrap_or(f64::INFINITY),
        None => log_weight(k).exp(),
    }
}

/// `(‖k‖^‖k‖, k^k)` as exact integers when both fit under the magnitude cap.
fn exact_weight_ratio(k: &MultiIndex) -> Option<(BigUint, BigUint)> {
    let d = k.total_degree();
    let kk = match k.self_power() {
        SelfPower::Exact(v) => v,
        SelfPower::Log(_) => return None,
    };
    let d_u32 = u32::try_from(d).ok()?;
    let dd_log10 = if d == 0 {
        0.0
    } else {
        d as f64 * (d as f64).log10()
    };
    if dd_log10 > f64::from(crate::multiindex::DEFAULT_MAGNITUDE_CAP_LOG10) {
        return None;
    }
    Some((BigUint::from(d).pow(d_u32.max(0)), kk))
}

/// `ln(‖k‖^‖k‖ / k^k)` in the log domain.
fn log_weight(k: &MultiIndex) -> f64 {
    let d = k.total_degree() as f64;
    if d == 0.0 {
        return 0.0;
    }
    let mut lw = d * d.ln();
    for (_, e) in k.entries() {
        lw -= f64::from(e) * f64::from(e).ln();
    }
    lw
}

fn validate_z(z: &[f64], max_block: u32) -> Result<f64> {
    if z.iter().any(|&t| !(t.is_finite() && t >= 0.0)) {
        return Err(Error::InvalidSpec(
            "z entries must be finite and nonnegative".into(),
        ));
    }
    if z.iter()
        .enumerate()
        .any(|(i, &t)| t > 0.0 && i as u32 >= max_block)
    {
        return Err(Error::InvalidSpec(format!(
            "z has support beyond the first {max_block} blocks"
        )));
    }
    let t: f64 = z.iter().sum();
    if t >= 1.0 {
        return Err(Error::InvalidRange(format!(
            "‖z‖₁ = {t} must be < 1 for Δ to converge"
        )));
    }
    Ok(t)
}

/// Truncated sum of the `Δ` series over all `k` with support in the first
/// `max_block` positions and `‖k‖ ≤ max_degree`. Monotone nondecreasing in
/// the degree cut.
pub fn delta_truncated(
    q: Complex64,
    z: &[f64],
    max_degree: u32,
    max_block: u32,
) -> Result<DeltaResult> {
    validate_z(z, max_block)?;
    // Trailing zeros (and anything past max_block) contribute only through
    // exponent zero, so the recursion only walks the nonzero prefix.
    let active_len = z
        .iter()
        .rposition(|&t| t > 0.0)
        .map_or(0, |i| i + 1)
        .min(max_block as usize);

    let mut sum = KahanSum::default();
    let mut entries: Vec<(u32, u32)> = Vec::new();
    sum_recursive(
        q.norm(),
        &z[..active_len],
        0,
        max_degree,
        1.0,
        &mut entries,
        &mut sum,
    );
    Ok(DeltaResult {
        value: sum.value(),
        tail_bound: None,
        degree_cut: max_degree,
    })
}

fn sum_recursive(
    q_abs: f64,
    z: &[f64],
    at: usize,
    remaining: u32,
    z_power: f64,
    entries: &mut Vec<(u32, u32)>,
    sum: &mut KahanSum,
) {
    if at == z.len() {
        let k = MultiIndex::from_pairs(entries.iter().copied()).expect("positive positions");
        let weight = series_weight(&k);
        let q_factor = q_abs.powi(k.support_size() as i32);
        sum.add(weight * q_factor * z_power);
        return;
    }
    // Exponent 0 at this position.
    sum_recursive(q_abs, z, at + 1, remaining, z_power, entries, sum);
    if z[at] == 0.0 {
        return;
    }
    let mut power = z_power;
    for exp in 1..=remaining {
        power *= z[at];
        entries.push((at as u32 + 1, exp));
        sum_recursive(q_abs, z, at + 1, remaining - exp, power, entries, sum);
        entries.pop();
    }
}

#[derive(Default)]
struct KahanSum {
    sum: f64,
    carry: f64,
}

impl KahanSum {
    fn add(&mut self, v: f64) {
        let y = v - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }
    fn value(&self) -> f64 {
        self.sum
    }
}

/// Truncated value plus the certified tail bound
/// `|q| (e t)^{D+1} / (1 − e t)`, valid for `|q| ≤ 1` and `e t < 1` with
/// `t = ‖z‖₁`. Outside that range the result is returned uncertified.
pub fn delta_certified(
    q: Complex64,
    z: &[f64],
    max_degree: u32,
    max_block: u32,
) -> Result<DeltaResult> {
    let t = validate_z(z, max_block)?;
    let mut result = delta_truncated(q, z, max_degree, max_block)?;
    let et = std::f64::consts::E * t;
    if et < 1.0 && q.norm() <= 1.0 {
        let tail = q.norm() * et.powi(max_degree as i32 + 1) / (1.0 - et);
        result.tail_bound = Some(tail);
    }
    Ok(result)
}

/// Upper bound `1 + |q| eθ / (1 − eθ)` for `sup_{‖w‖₁ ≤ θ} Δ(q, w)`,
/// summing the per-degree shell bounds `|q| (eθ)^d`. Requires `eθ < 1` and
/// `|q| ≤ 1`.
pub fn delta_sup_bound(q: Complex64, theta: f64) -> Result<f64> {
    if !(theta >= 0.0 && theta.is_finite()) {
        return Err(Error::InvalidSpec(format!(
            "θ must be finite and nonnegative, got {theta}"
        )));
    }
    let etheta = std::f64::consts::E * theta;
    if etheta >= 1.0 {
        return Err(Error::NotCertifiable(format!(
            "eθ = {etheta} >= 1; the certified Δ bound needs θ < 1/e"
        )));
    }
    if q.norm() > 1.0 {
        return Err(Error::NotCertifiable(format!(
            "|q| = {} > 1; the certified Δ bound needs |q| <= 1",
            q.norm()
        )));
    }
    Ok(1.0 + q.norm() * etheta / (1.0 - etheta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multiindex::enumerate;

    fn re(v: f64) -> Complex64 {
        Complex64::new(v, 0.0)
    }

    #[test]
    fn monomial_norm_examples() {
        assert_eq!(
            monomial_norm(&MultiIndex::from_dense(&[1, 1])),
            0.25
        );
        assert_eq!(monomial_norm(&MultiIndex::from_dense(&[7])), 1.0);
        assert_eq!(
            monomial_norm(&MultiIndex::from_dense(&[1, 1, 1])),
            1.0 / 27.0
        );
        assert_eq!(monomial_norm(&MultiIndex::zero()), 1.0);
    }

    #[test]
    fn series_weight_inverts_monomial_norm() {
        for k in enumerate(3, 6) {
            let product = series_weight(&k) * monomial_norm(&k);
            assert!((product - 1.0).abs() < 1e-12, "k = {k}");
        }
    }

    #[test]
    fn delta_at_zero_is_exactly_one() {
        let r = delta_truncated(re(0.7), &[0.0, 0.0], 10, 5).unwrap();
        assert_eq!(r.value, 1.0);
        let r = delta_certified(re(1.0), &[], 0, 1).unwrap();
        assert_eq!(r.value, 1.0);
        assert_eq!(r.tail_bound, Some(0.0));
    }

    #[test]
    fn single_block_matches_closed_form() {
        // With one block the weights are all 1, so
        // Δ(q,(t)) = 1 + |q| t/(1−t).
        for &t in &[0.1, 0.2, 0.3, 0.4, 0.5] {
            let r = delta_truncated(re(0.5), &[t], 60, 1).unwrap();
            let expected = 1.0 + 0.5 * t / (1.0 - t);
            assert!(
                (r.value - expected).abs() < 1e-8,
                "t = {t}: {} vs {expected}",
                r.value
            );
        }
    }

    #[test]
    fn rejects_z_outside_domain() {
        assert!(delta_truncated(re(1.0), &[0.6, 0.5], 5, 2).is_err());
        assert!(delta_truncated(re(1.0), &[-0.1], 5, 1).is_err());
        assert!(delta_truncated(re(1.0), &[0.0, 0.2], 5, 1).is_err());
    }

    #[test]
    fn truncation_is_monotone_in_degree_and_arguments() {
        let z = [0.2, 0.1];
        let mut prev = 0.0;
        for d in 0..=12 {
            let v = delta_truncated(re(0.8), &z, d, 2).unwrap().value;
            assert!(v >= prev);
            prev = v;
        }
        let lo = delta_truncated(re(0.4), &z, 10, 2).unwrap().value;
        let hi = delta_truncated(re(0.9), &z, 10, 2).unwrap().value;
        assert!(hi >= lo);
        let bigger_z = delta_truncated(re(0.8), &[0.25, 0.1], 10, 2).unwrap().value;
        assert!(bigger_z >= delta_truncated(re(0.8), &z, 10, 2).unwrap().value);
    }

    #[test]
    fn certified_tail_bound_examples() {
        // z = 0: value 1, tail 0.
        let r = delta_certified(re(1.0), &[0.0], 10, 1).unwrap();
        assert_eq!(r.value, 1.0);
        assert_eq!(r.tail_bound, Some(0.0));

        // t = 0.25, q = 1, D = 40: tail = (e/4)^41 / (1 − e/4) < 1e−6.
        let r = delta_certified(re(1.0), &[0.25], 40, 1).unwrap();
        let et = std::f64::consts::E * 0.25;
        let expected_tail = et.powi(41) / (1.0 - et);
        let tail = r.tail_bound.unwrap();
        assert!((tail - expected_tail).abs() <= 1e-12 * expected_tail);
        assert!(tail < 1e-6);

        // Single block t = 0.3: the bracket contains the closed form.
        let r = delta_certified(re(1.0), &[0.3], 25, 1).unwrap();
        let truth = 1.0 + 0.3 / 0.7;
        assert!(r.value <= truth + 1e-12);
        assert!(truth <= r.value + r.tail_bound.unwrap() + 1e-12);
    }

    #[test]
    fn certification_degrades_gracefully() {
        // e t >= 1: still returns the truncated value, uncertified.
        let r = delta_certified(re(1.0), &[0.5], 10, 1).unwrap();
        assert!(r.tail_bound.is_none());
        assert!(r.value > 1.0);
        // |q| > 1 is also uncertified.
        let r = delta_certified(re(1.5), &[0.2], 10, 1).unwrap();
        assert!(r.tail_bound.is_none());
    }

    #[test]
    fn sup_bound_examples() {
        assert_eq!(delta_sup_bound(re(0.9), 0.0).unwrap(), 1.0);
        let b = delta_sup_bound(re(0.1), 0.25).unwrap();
        let et = std::f64::consts::E * 0.25;
        assert!((b - (1.0 + 0.1 * et / (1.0 - et))).abs() < 1e-15);
        assert!((b - 1.2121).abs() < 1e-3);
        assert!(delta_sup_bound(re(0.5), 0.4).is_err());
        assert!(delta_sup_bound(re(1.2), 0.2).is_err());
    }

    #[test]
    fn sup_bound_dominates_sampled_values() {
        let q = re(0.1);
        let theta = 0.25;
        let bound = delta_sup_bound(q, theta).unwrap();
        let mut sampler = crate::sampling::Sampler::new(3);
        for _ in 0..200 {
            // Random nonnegative w with ‖w‖₁ ≤ θ over up to 3 blocks.
            let raw: Vec<f64> = (0..3).map(|_| sampler.uniform()).collect();
            let total: f64 = raw.iter().sum();
            let scale = theta * sampler.uniform() / total;
            let w: Vec<f64> = raw.iter().map(|v| v * scale).collect();
            let value = delta_truncated(q, &w, 30, 3).unwrap().value;
            assert!(value <= bound + 1e-12);
        }
    }

    #[test]
    fn rewriting_check_normalized_monomials() {
        // Δ truncation equals Σ z^k / [z^k] · |q|^{#k} over the same set.
        let q = re(0.7);
        let z = [0.15, 0.2, 0.05];
        let direct = delta_truncated(q, &z, 8, 3).unwrap().value;
        let mut rewritten = 0.0;
        for k in enumerate(3, 8) {
            let zk = k.power_real_tail(&z);
            rewritten += zk / monomial_norm(&k) * q.norm().powi(k.support_size() as i32);
        }
        assert!((direct - rewritten).abs() < 1e-12 * rewritten.max(1.0));
    }
}

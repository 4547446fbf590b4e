//! Multiindices: finitely supported sequences of nonnegative integer
//! exponents, indexed from position 1.
//!
//! A multiindex `k` carries the grading data used by every truncated series
//! in this crate: the total degree `‖k‖ = Σ k_n`, the support size `#k`, the
//! self power `k^k = Π k_n^{k_n}` (with `0^0 = 1`) and the finite product
//! `λ^k`. Enumeration is graded: first by total degree, then lexicographic
//! on the dense prefix with larger leading exponents first, which is the
//! canonical iteration order for all truncated sums.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::{One, ToPrimitive};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Exact self powers are kept as big integers up to this magnitude
/// (`10^300`); beyond it only the log value is tracked.
pub const DEFAULT_MAGNITUDE_CAP_LOG10: u32 = 300;

/// A finitely supported sequence of nonnegative integers.
///
/// Zero entries are never stored, so two multiindices are equal iff their
/// sparse maps are equal. Positions are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct MultiIndex {
    entries: BTreeMap<u32, u32>,
}

impl MultiIndex {
    /// The zero multiindex (empty support).
    pub fn zero() -> Self {
        Self::default()
    }

    /// Builds a multiindex from `(position, exponent)` pairs.
    /// Zero exponents are dropped; duplicate positions accumulate.
    pub fn from_pairs<I: IntoIterator<Item = (u32, u32)>>(pairs: I) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (pos, exp) in pairs {
            if pos == 0 {
                return Err(Error::InvalidSpec(
                    "multiindex positions are 1-based; position 0 is not allowed".into(),
                ));
            }
            if exp > 0 {
                *entries.entry(pos).or_insert(0) += exp;
            }
        }
        Ok(Self { entries })
    }

    /// Builds a multiindex from a dense prefix `(k_1, k_2, ...)`.
    pub fn from_dense(dense: &[u32]) -> Self {
        let entries = dense
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| (i as u32 + 1, e))
            .collect();
        Self { entries }
    }

    /// Sparse entries in position order.
    pub fn entries(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.entries.iter().map(|(&p, &e)| (p, e))
    }

    /// Exponent at `position` (0 when absent).
    pub fn exponent(&self, position: u32) -> u32 {
        self.entries.get(&position).copied().unwrap_or(0)
    }

    /// Largest position in the support (0 for the zero multiindex).
    pub fn max_position(&self) -> u32 {
        self.entries.keys().next_back().copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// `‖k‖ = Σ k_n`.
    pub fn total_degree(&self) -> u64 {
        self.entries.values().map(|&e| u64::from(e)).sum()
    }

    /// `#k`, the number of elements of the support.
    pub fn support_size(&self) -> usize {
        self.entries.len()
    }

    /// Support positions in increasing order.
    pub fn support(&self) -> impl Iterator<Item = u32> + '_ {
        self.entries.keys().copied()
    }

    /// `k^k = Π k_n^{k_n}` with the empty product equal to 1.
    ///
    /// Exact up to the default magnitude cap, log-domain beyond.
    pub fn self_power(&self) -> SelfPower {
        self.self_power_capped(DEFAULT_MAGNITUDE_CAP_LOG10)
    }

    /// `k^k` with an explicit magnitude cap of `10^max_log10`.
    pub fn self_power_capped(&self, max_log10: u32) -> SelfPower {
        let log_value: f64 = self
            .entries
            .values()
            .map(|&e| f64::from(e) * f64::from(e).ln())
            .sum();
        if log_value > f64::from(max_log10) * std::f64::consts::LN_10 {
            return SelfPower::Log(log_value);
        }
        let mut product = BigUint::one();
        for &e in self.entries.values() {
            product *= BigUint::from(e).pow(e);
        }
        SelfPower::Exact(product)
    }

    /// The finite product `λ^k = Π λ_{n}^{k_n}` over the support.
    ///
    /// `lambda[i]` is the scalar at position `i + 1`; every support position
    /// must be covered.
    pub fn power(&self, lambda: &[Complex64]) -> Result<Complex64> {
        let mut out = Complex64::new(1.0, 0.0);
        for (&pos, &exp) in &self.entries {
            let value = lambda
                .get(pos as usize - 1)
                .copied()
                .ok_or(Error::MissingCoordinate(pos))?;
            out *= value.powu(exp);
        }
        Ok(out)
    }

    /// Like [`MultiIndex::power`] for a nonnegative real sequence, with the
    /// implicit-zero tail convention: positions past `values.len()` count as
    /// zero (so any support there sends the product to 0).
    pub fn power_real_tail(&self, values: &[f64]) -> f64 {
        let mut out = 1.0;
        for (&pos, &exp) in &self.entries {
            let value = values.get(pos as usize - 1).copied().unwrap_or(0.0);
            out *= value.powi(exp as i32);
        }
        out
    }
}

/// Comparison in the canonical enumeration order: by total degree, then by
/// the dense prefix with larger entries at earlier positions first.
impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| {
                let last = self.max_position().max(other.max_position());
                for pos in 1..=last {
                    // Larger exponent earlier in the prefix comes first.
                    match other.exponent(pos).cmp(&self.exponent(pos)) {
                        Ordering::Equal => continue,
                        ord => return ord,
                    }
                }
                Ordering::Equal
            })
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.entries.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .entries
            .iter()
            .map(|(p, e)| format!("{p}:{e}"))
            .collect();
        write!(f, "({})", parts.join(","))
    }
}

/// JSON form: array of `[position, exponent]` pairs sorted by position.
impl Serialize for MultiIndex {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs: Vec<[u32; 2]> = self.entries.iter().map(|(&p, &e)| [p, e]).collect();
        pairs.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for MultiIndex {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let pairs = Vec::<[u32; 2]>::deserialize(deserializer)?;
        MultiIndex::from_pairs(pairs.into_iter().map(|[p, e]| (p, e)))
            .map_err(|e| D::Error::custom(e.to_string()))
    }
}

/// `k^k`, exact when it fits under the magnitude cap.
#[derive(Debug, Clone, PartialEq)]
pub enum SelfPower {
    Exact(BigUint),
    /// Natural log of the value.
    Log(f64),
}

impl SelfPower {
    pub fn ln(&self) -> f64 {
        match self {
            SelfPower::Exact(v) => {
                if v.is_one() {
                    0.0
                } else if let Some(f) = v.to_f64().filter(|f| f.is_finite()) {
                    f.ln()
                } else {
                    // Too large for f64: split off the high 64 bits.
                    let bits = v.bits();
                    let shifted = v >> (bits - 64);
                    shifted.to_f64().unwrap_or(f64::INFINITY).ln()
                        + (bits - 64) as f64 * std::f64::consts::LN_2
                }
            }
            SelfPower::Log(l) => *l,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            SelfPower::Exact(v) => v.to_f64().unwrap_or(f64::INFINITY),
            SelfPower::Log(l) => l.exp(),
        }
    }

    pub fn as_exact(&self) -> Option<&BigUint> {
        match self {
            SelfPower::Exact(v) => Some(v),
            SelfPower::Log(_) => None,
        }
    }
}

/// All multiindices with support in `{1..max_block}` and total degree at
/// most `max_degree`, in graded order. The count is
/// `C(max_block + max_degree, max_block)`.
pub fn enumerate(max_block: u32, max_degree: u32) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    let mut dense = vec![0u32; max_block as usize];
    for degree in 0..=max_degree {
        if max_block == 0 && degree > 0 {
            break;
        }
        fill_compositions(&mut dense, 0, degree, &mut out);
    }
    out
}

fn fill_compositions(dense: &mut Vec<u32>, at: usize, remaining: u32, out: &mut Vec<MultiIndex>) {
    if at == dense.len() {
        if remaining == 0 {
            out.push(MultiIndex::from_dense(dense));
        }
        return;
    }
    if at == dense.len() - 1 {
        dense[at] = remaining;
        out.push(MultiIndex::from_dense(dense));
        dense[at] = 0;
        return;
    }
    // Larger leading exponents first.
    for head in (0..=remaining).rev() {
        dense[at] = head;
        fill_compositions(dense, at + 1, remaining - head, out);
    }
    dense[at] = 0;
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mi(dense: &[u32]) -> MultiIndex {
        MultiIndex::from_dense(dense)
    }

    #[test]
    fn total_degree_examples() {
        assert_eq!(mi(&[2, 0, 3]).total_degree(), 5);
        assert_eq!(MultiIndex::zero().total_degree(), 0);
        assert_eq!(mi(&[1, 1]).total_degree(), 2);
    }

    #[test]
    fn support_size_examples() {
        assert_eq!(mi(&[2, 0, 3]).support_size(), 2);
        assert_eq!(MultiIndex::zero().support_size(), 0);
        assert_eq!(mi(&[1, 1, 1]).support_size(), 3);
    }

    #[test]
    fn self_power_examples() {
        assert_eq!(
            mi(&[2, 3]).self_power().as_exact(),
            Some(&BigUint::from(108u32))
        );
        assert_eq!(
            MultiIndex::zero().self_power().as_exact(),
            Some(&BigUint::from(1u32))
        );
        assert_eq!(
            mi(&[4]).self_power().as_exact(),
            Some(&BigUint::from(256u32))
        );
    }

    #[test]
    fn self_power_switches_to_log_domain_past_cap() {
        // 200^200 has magnitude 10^460, past the default cap.
        let k = mi(&[200]);
        let sp = k.self_power();
        assert!(sp.as_exact().is_none());
        let expected_ln = 200.0 * (200.0f64).ln();
        assert!((sp.ln() - expected_ln).abs() < 1e-9);
        // With a larger cap it is exact again.
        let exact = k.self_power_capped(1000);
        assert!(exact.as_exact().is_some());
        assert!((exact.ln() - expected_ln).abs() < 1e-9);
    }

    #[test]
    fn power_examples() {
        let lambda = [Complex64::new(2.0, 0.0), Complex64::new(3.0, 0.0)];
        let v = mi(&[1, 2]).power(&lambda).unwrap();
        assert_eq!(v, Complex64::new(18.0, 0.0));

        assert_eq!(
            MultiIndex::zero().power(&[]).unwrap(),
            Complex64::new(1.0, 0.0)
        );

        let lambda = [Complex64::new(0.0, 1.0), Complex64::new(1.0, 0.0)];
        let v = mi(&[2, 5]).power(&lambda).unwrap();
        assert_eq!(v, Complex64::new(-1.0, 0.0));
    }

    #[test]
    fn power_missing_coordinate_errors() {
        let err = mi(&[0, 1]).power(&[Complex64::new(1.0, 0.0)]).unwrap_err();
        assert!(matches!(err, Error::MissingCoordinate(2)));
    }

    #[test]
    fn enumerate_matches_stars_and_bars() {
        let got = enumerate(2, 2);
        let expected = vec![
            MultiIndex::zero(),
            mi(&[1, 0]),
            mi(&[0, 1]),
            mi(&[2, 0]),
            mi(&[1, 1]),
            mi(&[0, 2]),
        ];
        assert_eq!(got, expected);

        assert_eq!(enumerate(5, 0), vec![MultiIndex::zero()]);
        // Brute-force cross-check of the count against C(3 + 2, 3) = 10.
        assert_eq!(enumerate(3, 2).len(), 10);
    }

    #[test]
    fn enumerate_count_matches_binomial() {
        fn binomial(n: u64, k: u64) -> u64 {
            let mut acc = 1u64;
            for i in 0..k {
                acc = acc * (n - i) / (i + 1);
            }
            acc
        }
        for b in 0..=4u32 {
            for d in 0..=5u32 {
                let count = enumerate(b, d).len() as u64;
                assert_eq!(
                    count,
                    binomial(u64::from(b + d), u64::from(b)),
                    "count mismatch at ({b},{d})"
                );
            }
        }
    }

    #[test]
    fn enumeration_order_is_sort_order() {
        let list = enumerate(3, 4);
        let mut sorted = list.clone();
        sorted.sort();
        assert_eq!(list, sorted);
    }

    #[test]
    fn json_round_trip_as_sorted_pairs() {
        let k = mi(&[2, 0, 3]);
        let text = serde_json::to_string(&k).unwrap();
        assert_eq!(text, "[[1,2],[3,3]]");
        let back: MultiIndex = serde_json::from_str(&text).unwrap();
        assert_eq!(back, k);
    }
}

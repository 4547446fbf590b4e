//! Property tests for the structural invariants: grading arithmetic,
//! norm axioms on samples, component idempotence and orthogonality, and
//! the dominating-series comparisons.

use num_complex::Complex64;
use proptest::prelude::*;

use dbarlab::dominate::{delta_truncated, monomial_norm, series_weight};
use dbarlab::mhcalc::{
    component_exact, khom_norm, prop22_bound, KHomPolynomial, Monomial, NormOptions,
    SpacePolynomial,
};
use dbarlab::multiindex::{enumerate, MultiIndex, SelfPower};
use dbarlab::poly::{crational, CRational, PolyExact};
use dbarlab::sampling::Sampler;
use dbarlab::sumspace::{include, norm, project, Block, OuterType, PExponent, SumSpaceSpec, SumVector};

fn arb_multiindex() -> impl Strategy<Value = MultiIndex> {
    proptest::collection::vec((1u32..12, 1u32..6), 0..6)
        .prop_map(|pairs| MultiIndex::from_pairs(pairs).unwrap())
}

proptest! {
    #[test]
    fn degree_dominates_support(k in arb_multiindex()) {
        let degree = k.total_degree();
        let support = k.support_size() as u64;
        prop_assert!(degree >= support);
        let all_ones = k.entries().all(|(_, e)| e == 1);
        prop_assert_eq!(degree == support, all_ones);
    }

    #[test]
    fn self_power_bounded_by_degree_power(k in arb_multiindex()) {
        let degree = k.total_degree() as f64;
        let bound = if degree == 0.0 { 0.0 } else { degree * degree.ln() };
        let ln_kk = match k.self_power() {
            SelfPower::Exact(v) => {
                if v == 1u32.into() { 0.0 } else { k.self_power().ln() }
            }
            SelfPower::Log(l) => l,
        };
        prop_assert!(ln_kk <= bound + 1e-9);
    }

    #[test]
    fn monomial_norm_and_weight_are_reciprocal(k in arb_multiindex()) {
        let product = monomial_norm(&k) * series_weight(&k);
        prop_assert!((product - 1.0).abs() < 1e-10);
    }
}

#[test]
fn enumeration_has_no_duplicates_and_is_downward_closed() {
    for (blocks, degree) in [(2u32, 5u32), (3, 4), (4, 3)] {
        let list = enumerate(blocks, degree);
        let set: std::collections::BTreeSet<_> = list.iter().cloned().collect();
        assert_eq!(set.len(), list.len(), "duplicates at ({blocks},{degree})");
        for k in &list {
            for (pos, e) in k.entries() {
                let mut lowered: Vec<(u32, u32)> =
                    k.entries().filter(|&(p, _)| p != pos).collect();
                if e > 1 {
                    lowered.push((pos, e - 1));
                }
                let smaller = MultiIndex::from_pairs(lowered).unwrap();
                assert!(set.contains(&smaller), "missing {smaller} below {k}");
            }
        }
    }
}

fn sample_spec() -> SumSpaceSpec {
    SumSpaceSpec::new(
        vec![
            Block {
                p: PExponent::Finite(2.0),
                dim: 2,
            },
            Block {
                p: PExponent::Finite(1.0),
                dim: 3,
            },
            Block {
                p: PExponent::Sup,
                dim: 2,
            },
        ],
        OuterType::Lq(1.0),
    )
    .unwrap()
}

#[test]
fn norm_axioms_on_samples() {
    let spec = sample_spec();
    let mut sampler = Sampler::new(2024);
    for _ in 0..300 {
        let x = sampler.ball_point(&spec, 1.0);
        let y = sampler.ball_point(&spec, 1.0);
        let nx = norm(&spec, &x).unwrap();
        let ny = norm(&spec, &y).unwrap();

        // Triangle inequality.
        let sum = SumVector::from_components((1..=spec.block_count()).map(|b| {
            let dim = spec.blocks[b - 1].dim;
            let zeros = vec![Complex64::new(0.0, 0.0); dim];
            let xv = x.component(b).map(<[Complex64]>::to_vec).unwrap_or_else(|| zeros.clone());
            let yv = y.component(b).map(<[Complex64]>::to_vec).unwrap_or(zeros);
            (b, xv.iter().zip(&yv).map(|(a, b)| a + b).collect())
        }))
        .unwrap();
        let nsum = norm(&spec, &sum).unwrap();
        assert!(nsum <= nx + ny + 1e-12);

        // Absolute homogeneity.
        let scaled = dbarlab::sampling::scale_vector(&x, 0.37);
        let nscaled = norm(&spec, &scaled).unwrap();
        assert!((nscaled - 0.37 * nx).abs() < 1e-12);

        // Projections have operator norm at most 1.
        let projected = project(&x, 2, Some(3)).unwrap();
        assert!(norm(&spec, &projected).unwrap() <= nx + 1e-12);
    }

    // Inclusions are isometric.
    for block in 1..=spec.block_count() {
        let dim = spec.blocks[block - 1].dim;
        for _ in 0..50 {
            let v = sampler.lp_sphere_point(dim, &spec.blocks[block - 1].p, 0.9);
            let included = include(&spec, block, &v).unwrap();
            let expected = spec.blocks[block - 1].p.vector_norm(&v);
            assert!((norm(&spec, &included).unwrap() - expected).abs() < 1e-12);
        }
    }
}

/// Random exact-rational polynomial over the scalar coordinates of up to
/// three scalar blocks.
fn random_rational_space_poly(sampler: &mut Sampler, blocks: u32, degree: u32) -> SpacePolynomial<CRational> {
    let mut poly = SpacePolynomial::zero();
    for _ in 0..6 {
        let entries: Vec<(u32, u32, u32)> = (1..=blocks)
            .filter_map(|b| {
                let e = (sampler.uniform() * f64::from(degree + 1)) as u32;
                (e > 0).then_some((b, 1, e))
            })
            .collect();
        let monomial = Monomial::new(entries).unwrap();
        let num = (sampler.uniform() * 19.0) as i64 - 9;
        let den = (sampler.uniform() * 8.0) as i64 + 1;
        poly.add_term(monomial, crational(num, den, den - num, den));
    }
    poly
}

#[test]
fn component_idempotence_and_orthogonality_exact() {
    let mut sampler = Sampler::new(7);
    for _ in 0..50 {
        let f = random_rational_space_poly(&mut sampler, 3, 5);
        for k in enumerate(3, 5) {
            let fk = component_exact(&f, &k);
            // Idempotence.
            assert_eq!(component_exact(&fk, &k), fk);
            // Cross-orthogonality.
            for j in enumerate(3, 3) {
                if j != k {
                    assert!(component_exact(&fk, &j).is_zero());
                }
            }
        }
    }
}

#[test]
fn prop22_bound_holds_on_samples() {
    let spec = SumSpaceSpec::l1_sum(&[1, 1, 1]).unwrap();
    let mut sampler = Sampler::new(12);
    let opts = NormOptions::default();
    for trial in 0..20 {
        // Random k-homogeneous polynomial on three scalar blocks.
        let k = MultiIndex::from_pairs(
            (1..=3u32)
                .filter_map(|b| {
                    let e = (sampler.uniform() * 3.0) as u32;
                    (e > 0).then_some((b, e))
                })
                .collect::<Vec<_>>(),
        )
        .unwrap();
        let mut poly = SpacePolynomial::zero();
        let monomial = Monomial::new(
            k.entries().map(|(b, e)| (b, 1, e)).collect::<Vec<_>>(),
        )
        .unwrap();
        poly.add_term(
            monomial,
            Complex64::new(sampler.uniform() * 2.0 - 1.0, sampler.uniform() * 2.0 - 1.0),
        );
        let mut phi = KHomPolynomial::new(k, poly).unwrap();
        phi.norm_cache = Some(khom_norm(&phi, &spec, &opts));

        for _ in 0..200 {
            let x = sampler.ball_point(&spec, 1.0);
            let bound = prop22_bound(&phi, &spec, &x).unwrap();
            let value = phi.eval(&x).norm();
            assert!(
                value <= bound * (1.0 + 1e-10) + 1e-300,
                "trial {trial}: {value} > {bound}"
            );
        }
    }
}

/// Independent brute-force enumerator for the Δ series: dense odometer
/// over exponent vectors, direct weight computation.
fn delta_brute_force(q: f64, z: &[f64], max_degree: u32) -> f64 {
    let n = z.len();
    let mut exps = vec![0u32; n];
    let mut total = 0.0;
    loop {
        let degree: u32 = exps.iter().sum();
        if degree <= max_degree {
            let support = exps.iter().filter(|&&e| e > 0).count() as i32;
            let mut weight = 1.0f64;
            let d = f64::from(degree);
            if degree > 0 {
                weight = d.powi(degree as i32);
                for &e in &exps {
                    if e > 0 {
                        weight /= f64::from(e).powi(e as i32);
                    }
                }
            }
            let mut zk = 1.0;
            for (i, &e) in exps.iter().enumerate() {
                zk *= z[i].powi(e as i32);
            }
            total += weight * q.powi(support) * zk;
        }
        // Odometer with degree pruning.
        let mut at = 0;
        loop {
            if at == n {
                return total;
            }
            exps[at] += 1;
            if exps[at] <= max_degree {
                break;
            }
            exps[at] = 0;
            at += 1;
        }
    }
}

#[test]
fn delta_matches_brute_force_enumeration() {
    let q = Complex64::new(0.8, 0.0);
    for z in [vec![0.1, 0.1], vec![0.25, 0.05, 0.1], vec![0.3]] {
        let direct = delta_truncated(q, &z, 9, z.len() as u32).unwrap().value;
        let brute = delta_brute_force(0.8, &z, 9);
        assert!(
            (direct - brute).abs() < 1e-10 * brute.max(1.0),
            "{direct} vs {brute}"
        );
    }
}

#[test]
fn exact_mode_polynomials_compose() {
    // Exact arithmetic sanity for the rational polynomial engine backing
    // the rational mode: (f + g) - g = f.
    let mut sampler = Sampler::new(77);
    for _ in 0..20 {
        let f = random_rational_space_poly(&mut sampler, 2, 4);
        let g = random_rational_space_poly(&mut sampler, 2, 4);
        let back = f.add(&g).add(&g.scale(&CRational::from(crational(-1, 1, 0, 1))));
        assert_eq!(back, f);
    }
    let one = PolyExact::constant(2, dbarlab::poly::Coefficient::one());
    let third = one.scale(&crational(1, 3, 0, 1));
    assert_eq!(third.scale(&crational(3, 1, 0, 1)), one);
}

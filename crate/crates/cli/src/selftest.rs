//! Deterministic self-test battery: one suite per module, fixed inputs,
//! seeded sampling. Identical seeds give byte-identical reports.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use dbarlab::acs::{
    self, AlgValue, GForm01, GroupMap, LieGroupModel as AcsGroup,
};
use dbarlab::dbar::{
    self, cauchy_pompeiu_slice_solve, cm_norm_function, condense, min_sup_grid, min_sup_solution,
    pullback_block, synthetic_member, CmOptions, CondensationSpec, Form01, MinSupOptions,
    PolyForm01,
};
use dbarlab::dominate::{delta_certified, delta_sup_bound, delta_truncated, monomial_norm};
use dbarlab::mhcalc::{
    component, component_exact, khom_norm, partial_sum_eval, KHomPolynomial, Monomial,
    NormOptions, SpacePolynomial,
};
use dbarlab::multiindex::{enumerate, MultiIndex};
use dbarlab::poly::PolyFunction;
use dbarlab::runge;
use dbarlab::sampling::Sampler;
use dbarlab::sumspace::{self, Block, OuterType, PExponent, SumSpaceSpec, SumVector};

#[derive(Debug, Serialize, Deserialize)]
pub struct SuiteResult {
    pub name: String,
    pub pass: bool,
    pub details: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SelftestReport {
    pub seed: u64,
    pub suites: Vec<SuiteResult>,
    pub all_pass: bool,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn suite(name: &str, run: impl FnOnce() -> (bool, String)) -> SuiteResult {
    let (pass, details) = run();
    SuiteResult {
        name: name.to_string(),
        pass,
        details,
    }
}

fn multiindex_suite() -> (bool, String) {
    let count = enumerate(3, 4).len();
    let kk = MultiIndex::from_dense(&[2, 3]).self_power().to_f64();
    let sorted = {
        let list = enumerate(3, 4);
        let mut copy = list.clone();
        copy.sort();
        copy == list
    };
    let pass = count == 35 && kk == 108.0 && sorted;
    (pass, format!("enumerate(3,4)={count} kk(2,3)={kk} graded_sorted={sorted}"))
}

fn sumspace_suite() -> (bool, String) {
    let make = |outer| {
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
    };
    let x = SumVector::from_components([
        (1, vec![c(3.0, 0.0), c(4.0, 0.0)]),
        (2, vec![c(1.0, 0.0)]),
    ])
    .unwrap();
    let l1 = sumspace::norm(&make(OuterType::Lq(1.0)), &x).unwrap();
    let l2 = sumspace::norm(&make(OuterType::Lq(2.0)), &x).unwrap();
    let c0 = sumspace::norm(&make(OuterType::C0), &x).unwrap();
    let pass = l1 == 6.0 && (l2 - 26.0f64.sqrt()).abs() < 1e-12 && c0 == 5.0;
    (pass, format!("l1={l1} l2={l2} c0={c0}"))
}

fn mhcalc_suite(seed: u64) -> (bool, String) {
    let space = SumSpaceSpec::l1_sum(&[1, 1]).unwrap();
    let m12 = Monomial::new([(1, 1, 1), (2, 1, 1)]).unwrap();
    let phi = KHomPolynomial::new(
        MultiIndex::from_dense(&[1, 1]),
        SpacePolynomial::from_terms([(m12.clone(), c(1.0, 0.0))]),
    )
    .unwrap();
    let opts = NormOptions {
        seed,
        ..NormOptions::default()
    };
    let exact = khom_norm(&phi, &space, &opts);

    // DFT extraction against exact filtering on a fixed polynomial.
    let f = SpacePolynomial::from_terms([
        (Monomial::new([(1, 1, 2)]).unwrap(), c(1.0, -0.5)),
        (m12, c(0.25, 2.0)),
    ]);
    let mut worst: f64 = 0.0;
    for k in enumerate(2, 2) {
        let via_dft = component(|x: &SumVector| f.eval(x), &space, 2, &k, 2).unwrap();
        let via_filter = component_exact(&f, &k);
        for (m, coeff) in via_filter.terms() {
            worst = worst.max((via_dft.poly().coefficient(m) - coeff).norm());
        }
        for (m, coeff) in via_dft.poly().terms() {
            worst = worst.max((via_filter.coefficient(m) - coeff).norm());
        }
    }
    let pass = exact.exact && exact.value == 0.25 && worst < 1e-12;
    (
        pass,
        format!("khom_norm(z1z2)={} dft_vs_exact_max_diff={worst:e}", exact.value),
    )
}

fn dominate_suite() -> (bool, String) {
    let value = delta_truncated(c(0.5, 0.0), &[0.5], 30, 1).unwrap().value;
    let closed_form = 1.5;
    let certified = delta_certified(c(1.0, 0.0), &[0.25], 40, 1).unwrap();
    let tail = certified.tail_bound.unwrap_or(f64::NAN);
    let sup = delta_sup_bound(c(0.1, 0.0), 0.25).unwrap();
    let mono = monomial_norm(&MultiIndex::from_dense(&[1, 1]));
    let pass = (value - closed_form).abs() < 1e-8 && tail < 1e-6 && mono == 0.25
        && (sup - 1.2121).abs() < 1e-3;
    (
        pass,
        format!("delta(0.5,0.5,30)={value} tail40={tail:e} supbound={sup} [z1z2]={mono}"),
    )
}

/// The shared geometric fixture `f_d = 2^{-d} z_1^d`.
pub fn geometric_fixture(max_degree: u32) -> dbarlab::mhcalc::MHExpansion {
    let space = SumSpaceSpec::l1_sum(&[1]).unwrap();
    let mut expansion = dbarlab::mhcalc::MHExpansion::new(space.clone(), 1.0).unwrap();
    for d in 0..=max_degree {
        let k = MultiIndex::from_dense(&[d]);
        let monomial = if d == 0 {
            Monomial::unit()
        } else {
            Monomial::new([(1, 1, d)]).unwrap()
        };
        let coeff = c(0.5f64.powi(d as i32), 0.0);
        let mut term =
            KHomPolynomial::new(k, SpacePolynomial::from_terms([(monomial, coeff)])).unwrap();
        term.norm_cache = Some(khom_norm(&term, &space, &NormOptions::default()));
        expansion.insert(term).unwrap();
    }
    expansion
}

fn runge_suite(seed: u64) -> (bool, String) {
    let expansion = geometric_fixture(10);
    let (g, cert) = runge::approximate(&expansion, 1.0, 0.1, 1e-2).unwrap();
    let mut sampler = Sampler::new(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..2000 {
        let x = sampler.ball_point(&expansion.space, 0.1);
        let diff = (partial_sum_eval(&expansion, &x) - partial_sum_eval(&g, &x)).norm();
        worst = worst.max(diff);
    }
    let pass = cert.certified && cert.satisfied && worst <= cert.error_bound;
    (
        pass,
        format!(
            "kept={} bound={:e} sampled_max={worst:e} certified={} satisfied={}",
            cert.kset.len(),
            cert.error_bound,
            cert.certified,
            cert.satisfied
        ),
    )
}

fn dbar_suite(seed: u64) -> (bool, String) {
    // Homotopy on fixed forms.
    let zb = PolyFunction::conj_var(1, 1);
    let f = Form01::new(vec![zb.clone()]).unwrap();
    let u = dbar::homotopy_solve(&f).unwrap();
    let homotopy_ok = u.coefficient(&[0], &[2]) == c(0.5, 0.0) && dbar::dbar(&u) == f;

    // dbar^2 = 0 on seeded dyadic polynomials.
    let mut sampler = Sampler::new(seed);
    let mut dbar2_ok = true;
    for _ in 0..20 {
        let mut w = PolyFunction::zero(3);
        for _ in 0..5 {
            let alpha: Vec<u32> = (0..3).map(|_| (sampler.uniform() * 4.0) as u32).collect();
            let beta: Vec<u32> = (0..3).map(|_| (sampler.uniform() * 4.0) as u32).collect();
            let num = (sampler.uniform() * 128.0).floor() - 64.0;
            w.add_term(&alpha, &beta, c(num / 16.0, -num / 32.0));
        }
        dbar2_ok &= dbar::is_closed(&dbar::dbar(&w)).closed;
    }

    // Cauchy-Pompeiu: constant form reproduces zbar exactly.
    let constant = Form01::new(vec![PolyFunction::constant(1, c(1.0, 0.0))]).unwrap();
    let slice = cauchy_pompeiu_slice_solve(&constant, 1.0, 64, 64).unwrap();
    let z0 = c(0.3, -0.2);
    let cauchy_err = (slice.eval(z0) - z0.conj()).norm();

    // Minimal-sup solve stays below the particular solution's sup.
    let grid = min_sup_grid(1, 1.0, &PExponent::Finite(2.0), 200, seed);
    let (_, sup) = min_sup_solution(&f, &grid, 4, &MinSupOptions::default()).unwrap();

    // Condensation: weights and single-block pullback are exact.
    let cm_opts = CmOptions {
        seed,
        point_samples: 1024,
        ..CmOptions::default()
    };
    let spec = CondensationSpec {
        members: (2..=4).map(|p| synthetic_member(p, 1, &cm_opts)).collect(),
    };
    let condensed = condense(&spec, &cm_opts).unwrap();
    let mut condense_ok = dbar::is_closed(&condensed.form).closed;
    for member in &condensed.normalized_members {
        let back = pullback_block(&condensed.form, &condensed.layout, member.p).unwrap();
        let expected = member
            .form
            .scale(&c(dbar::weight(member.p), 0.0));
        condense_ok &= back == expected;
    }

    // C^m norm of z on the unit disc.
    let cm_z = cm_norm_function(
        &PolyFunction::var(1, 1),
        1,
        1.0,
        &PExponent::Finite(2.0),
        &cm_opts,
    );

    let pass = homotopy_ok
        && dbar2_ok
        && cauchy_err < 1e-12
        && sup <= 0.5 + 1e-9
        && condense_ok
        && (cm_z - 2.0).abs() < 1e-12;
    (
        pass,
        format!(
            "homotopy_ok={homotopy_ok} dbar2_ok={dbar2_ok} cauchy_err={cauchy_err:e} minsup={sup} condense_ok={condense_ok} cm(z)={cm_z}"
        ),
    )
}

fn acs_suite(seed: u64) -> (bool, String) {
    let mut sampler = Sampler::new(seed);
    let n = 2;

    // Random scalar form, random tangents: decomposition residuals.
    let mut base = PolyForm01::zero(n);
    for j in 1..=n {
        let mut p = PolyFunction::zero(n);
        for _ in 0..3 {
            let alpha: Vec<u32> = (0..n).map(|_| (sampler.uniform() * 3.0) as u32).collect();
            let beta: Vec<u32> = (0..n).map(|_| (sampler.uniform() * 3.0) as u32).collect();
            p.add_term(&alpha, &beta, sampler.complex_gaussian());
        }
        let mut components: Vec<PolyFunction> =
            (1..=n).map(|i| base.component(i).clone()).collect();
        components[j - 1] = p;
        base = Form01::new(components).unwrap();
    }
    let f = GForm01::from_scalar_form(&base);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let v = acs::GTangent {
            x: (0..n).map(|_| sampler.disc_point(0.9)).collect(),
            z: AlgValue::Scalar(sampler.complex_gaussian()),
            zeta10: (0..n).map(|_| sampler.complex_gaussian()).collect(),
            zeta01: (0..n).map(|_| sampler.complex_gaussian()).collect(),
            nu10: AlgValue::Scalar(sampler.complex_gaussian()),
            nu01: AlgValue::Scalar(sampler.complex_gaussian()),
        };
        let (v1, v2) = acs::decompose(&v, &f).unwrap();
        let r1 = acs::is_antiholomorphic_tangent(&v1, &f).unwrap();
        let r2 = acs::is_antiholomorphic_tangent(&v2.conj(), &f).unwrap();
        worst = worst
            .max(r1.maurer_cartan_residual)
            .max(r2.maurer_cartan_residual)
            .max(v1.add(&v2).nu10.sub(&v.nu10).norm())
            .max(v1.add(&v2).nu01.sub(&v.nu01).norm());
    }

    // Gauge transport residual.
    let u = PolyFunction::var(n, 2)
        .mul(&PolyFunction::conj_var(n, 1))
        .add(&PolyFunction::conj_var(n, 2));
    let transport = acs::gauge_transport(&f, &u, 100, seed).unwrap();

    // GL(2) Maurer-Cartan finite differences.
    let model = AcsGroup::GeneralLinear(2);
    let mut mc_worst: f64 = 0.0;
    for _ in 0..10 {
        let z = AlgValue::Matrix(
            nalgebra::DMatrix::identity(2, 2)
                + nalgebra::DMatrix::from_fn(2, 2, |_, _| sampler.complex_gaussian() * 0.25),
        );
        let a = AlgValue::Matrix(nalgebra::DMatrix::from_fn(2, 2, |_, _| {
            sampler.complex_gaussian()
        }));
        let b = AlgValue::Matrix(nalgebra::DMatrix::from_fn(2, 2, |_, _| {
            sampler.complex_gaussian()
        }));
        mc_worst = mc_worst.max(acs::maurer_cartan_fd_residual(&model, &z, &a, &b, 1e-5).unwrap());
    }

    // D̄u of a holomorphic map vanishes.
    let holo = GroupMap::scalar(PolyFunction::var(n, 1));
    let dbar_holo = acs::dbar_g(
        &holo,
        &[c(0.3, 0.1), c(-0.2, 0.4)],
        &[c(1.0, 0.0), c(0.5, -0.5)],
    )
    .unwrap()
    .norm();

    let pass = worst < 1e-11 && transport.max_residual < 1e-10 && mc_worst < 1e-3
        && dbar_holo == 0.0;
    (
        pass,
        format!(
            "decomp_worst={worst:e} transport={:e} mc_fd={mc_worst:e} dbar_holo={dbar_holo}",
            transport.max_residual
        ),
    )
}

pub fn run(seed: u64) -> SelftestReport {
    let suites = vec![
        suite("multiindex", multiindex_suite),
        suite("sumspace", sumspace_suite),
        suite("mhcalc", || mhcalc_suite(seed)),
        suite("dominate", dominate_suite),
        suite("runge", || runge_suite(seed)),
        suite("dbar", || dbar_suite(seed)),
        suite("acs", || acs_suite(seed)),
    ];
    let all_pass = suites.iter().all(|s| s.pass);
    SelftestReport {
        seed,
        suites,
        all_pass,
    }
}

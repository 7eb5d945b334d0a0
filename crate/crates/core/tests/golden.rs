#![allow(clippy::excessive_precision)]

//! Reference values computed once with 30-digit arithmetic (high-order Taylor
//! integration of the subspace equation, and arbitrary-precision ₂F₁ and log Γ)
//! and frozen here.

use std::f64::consts::PI;

use sech_jcm::algebra::make_standard_jcm;
use sech_jcm::oracle::{integrate_subspace, OdeSettings};
use sech_jcm::propagator::{propagate_subspace, PulseParams};
use sech_jcm::specfun::{hyp2f1_at, ln_gamma, ZPoint};
use sech_jcm::C64;

struct PropagatorCase {
    lambda0_tau: f64,
    t0: f64,
    delta_bar: f64,
    delta_total: u64,
    t: f64,
    h: (f64, f64),
    f: (f64, f64),
}

const PROPAGATORS: [PropagatorCase; 4] = [
    PropagatorCase {
        lambda0_tau: 5.0,
        t0: -10.0,
        delta_bar: 0.5,
        delta_total: 4,
        t: 5.0,
        h: (-0.79632790625326202, 0.19065217320200713),
        f: (-0.42953270109599359, -0.38080870954434281),
    },
    PropagatorCase {
        lambda0_tau: 5.0,
        t0: -10.0,
        delta_bar: 0.5,
        delta_total: 4,
        t: -1.3,
        h: (-0.68594753112939141, -0.066510545054087116),
        f: (-0.66687499396150062, -0.28342560639954422),
    },
    PropagatorCase {
        lambda0_tau: 2.5,
        t0: -6.0,
        delta_bar: -1.25,
        delta_total: 7,
        t: 3.5,
        h: (0.32106552044222968, -0.8429791005309245),
        f: (0.40852352405391444, 0.13932586962156192),
    },
    PropagatorCase {
        lambda0_tau: 10.0,
        t0: -3.0,
        delta_bar: 2.0,
        delta_total: 30,
        t: 8.0,
        h: (-0.28223616983831466, 0.39540532712598588),
        f: (-0.11804751478087881, 0.86606128880665732),
    },
];

fn c(p: (f64, f64)) -> C64 {
    C64::new(p.0, p.1)
}

#[test]
fn analytic_propagator_matches_reference() {
    for case in &PROPAGATORS {
        // ω₀ = ω + 2δ̄ gives δ̄ in every subspace of the standard ladder
        let model = make_standard_jcm(1.0, 1.0 + 2.0 * case.delta_bar);
        let pulse = PulseParams::new(case.lambda0_tau, 1.0, case.t0).unwrap();
        let p = propagate_subspace(&model, &pulse, case.delta_total, case.t).unwrap();
        assert!((p.h - c(case.h)).norm() < 1e-11, "h at Δ={} t={}: {}", case.delta_total, case.t, p.h);
        assert!((p.f - c(case.f)).norm() < 1e-11, "f at Δ={} t={}: {}", case.delta_total, case.t, p.f);
    }
}

#[test]
fn ode_oracle_matches_reference() {
    for case in &PROPAGATORS {
        let model = make_standard_jcm(1.0, 1.0 + 2.0 * case.delta_bar);
        let pulse = PulseParams::new(case.lambda0_tau, 1.0, case.t0).unwrap();
        let p = integrate_subspace(&model, &pulse, case.delta_total, case.t, &OdeSettings::default()).unwrap();
        assert!((p.h - c(case.h)).norm() < 1e-9);
        assert!((p.f - c(case.f)).norm() < 1e-9);
    }
}

#[test]
fn hypergeometric_reference_values() {
    // ₂F₁(α, −α; γ; z)
    let cases = [
        (30.5, (0.5, 3.0), 0.3, (0.065022631509113326, 0.74102256756104011)),
        (30.5, (0.5, 3.0), 0.9, (0.72501112209500835, 0.23478475501323111)),
        (30.5, (0.5, 3.0), 0.999, (0.93350777355880194, 0.22030301256389459)),
        (7.25, (0.5, -1.0), 0.6, (-0.74828564358705289, 0.21127913556592783)),
        (110.25, (0.5, 0.4), 0.45, (-0.51313460110928067, 0.18735493088092294)),
    ];
    for (alpha, gamma, z, expected) in cases {
        let v = hyp2f1_at(C64::new(alpha, 0.0), C64::new(-alpha, 0.0), c(gamma), ZPoint::from_z(z)).unwrap();
        assert!((v - c(expected)).norm() < 1e-10, "α={alpha} z={z}: {v}");
    }
}

#[test]
fn log_gamma_reference_values() {
    let cases = [
        ((0.25, 0.0), (1.2880225246980775, 0.0)),
        ((3.5, 2.0), (0.58073321208126817, 2.3353168419161628)),
        ((0.5, -40.0), (-61.912914538591192, -107.55621986920906)),
        ((-2.5, 0.5), (-0.93508562129827748, -8.8709628852474592)),
        ((1e-3, 0.0), (6.9071788853838537, 0.0)),
    ];
    for (w, expected) in cases {
        let v = ln_gamma(c(w)).unwrap();
        assert!((v.re - expected.0).abs() < 1e-12 * expected.0.abs().max(1.0), "Re lnΓ{w:?} = {}", v.re);
        // branches may differ by 2πk
        let turns = (v.im - expected.1) / (2.0 * PI);
        assert!((turns - turns.round()).abs() < 1e-12, "Im lnΓ{w:?} = {}", v.im);
    }
}

use proptest::prelude::*;
use sech_jcm::algebra::make_standard_jcm;
use sech_jcm::oracle::{integrate_subspace, OdeSettings};
use sech_jcm::propagator::{propagate_subspace, propagate_zero_detuning, PulseParams, SechSolution};
use sech_jcm::C64;

type Mat = [[C64; 2]; 2];

fn mul(a: &Mat, b: &Mat) -> Mat {
    let mut out = [[C64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

/// Interaction-picture evolution `e^{−iφσ₃} [[H*, F*], [−F, H]]`, `φ = δ̄(t − t₀)`.
fn evolution(h: C64, f: C64, phi: f64) -> Mat {
    let e = C64::from_polar(1.0, -phi);
    [[e * h.conj(), e * f.conj()], [-f / e, h / e]]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn unitarity(
        lambda0 in 0.1f64..10.0,
        delta_bar in -2.0f64..2.0,
        delta_total in 1u64..=30,
        t0 in -20.0f64..0.0,
        span in 0.0f64..40.0,
    ) {
        let model = make_standard_jcm(1.0, 1.0 + 2.0 * delta_bar);
        let pulse = PulseParams::new(lambda0, 1.0, t0).unwrap();
        let p = propagate_subspace(&model, &pulse, delta_total, t0 + span).unwrap();
        prop_assert!(p.unitarity_defect() < 1e-10);
    }

    #[test]
    fn zero_detuning_routes_agree(
        lambda0 in 0.1f64..10.0,
        delta_total in 1u64..=30,
        t0 in -20.0f64..0.0,
        span in 0.0f64..40.0,
    ) {
        let model = make_standard_jcm(1.3, 1.3);
        let pulse = PulseParams::new(lambda0, 1.0, t0).unwrap();
        let t = t0 + span;
        let a = propagate_subspace(&model, &pulse, delta_total, t).unwrap();
        let b = propagate_zero_detuning(&model, &pulse, delta_total, t).unwrap();
        prop_assert!((a.h.norm() - b.h.norm()).abs() < 1e-9);
        prop_assert!((a.f.norm() - b.f.norm()).abs() < 1e-9);
        prop_assert!((a.h - b.h).norm() < 1e-9 && (a.f - b.f).norm() < 1e-9);
    }

    #[test]
    fn two_leg_integration_composes(
        lambda0 in 0.1f64..10.0,
        delta_bar in -2.0f64..2.0,
        delta_total in 1u64..=30,
        t0 in -20.0f64..0.0,
        split in 0.0f64..1.0,
        span in 0.0f64..40.0,
    ) {
        let model = make_standard_jcm(1.0, 1.0 + 2.0 * delta_bar);
        let t = t0 + span;
        let t1 = t0 + split * span;
        let settings = OdeSettings::default();
        let first = PulseParams::new(lambda0, 1.0, t0).unwrap();
        let second = PulseParams::new(lambda0, 1.0, t1).unwrap();
        let a = integrate_subspace(&model, &first, delta_total, t1, &settings).unwrap();
        let b = integrate_subspace(&model, &second, delta_total, t, &settings).unwrap();
        let u = mul(
            &evolution(b.h, b.f, delta_bar * (t - t1)),
            &evolution(a.h, a.f, delta_bar * (t1 - t0)),
        );
        // undo the outer phase of the single-leg form
        let e = C64::from_polar(1.0, delta_bar * (t - t0));
        let (h, f) = ((e * u[0][0]).conj(), -u[1][0] * e.conj());
        let exact = propagate_subspace(&model, &first, delta_total, t).unwrap();
        prop_assert!((h - exact.h).norm() < 1e-8, "h {} vs {}", h, exact.h);
        prop_assert!((f - exact.f).norm() < 1e-8, "f {} vs {}", f, exact.f);
    }

    /// `|d|f|²/dt| = |2 Re(i k e^{−2iφ} H* F*)| ≤ k(t) = √χ λ(t)`, so the
    /// transfer probability levels out at the rate the pulse dies away.
    #[test]
    fn transfer_rate_is_bounded_by_coupling(
        lambda0 in 0.1f64..10.0,
        delta_bar in -2.0f64..2.0,
        delta_total in 1u64..=30,
        t0 in -20.0f64..0.0,
        span in 0.01f64..40.0,
    ) {
        let model = make_standard_jcm(1.0, 1.0 + 2.0 * delta_bar);
        let pulse = PulseParams::new(lambda0, 1.0, t0).unwrap();
        let solution = SechSolution::new(&model, &pulse, delta_total).unwrap();
        let step = 1e-4;
        let t = t0 + span;
        let p = solution.eval_grid(&[t - step, t + step]).unwrap();
        let rate = (p[1].transfer() - p[0].transfer()).abs() / (2.0 * step);
        let bound = (delta_total as f64).sqrt() * pulse.coupling(t - step).max(pulse.coupling(t + step));
        prop_assert!(rate <= bound * (1.0 + 1e-3) + 1e-7, "rate {rate} bound {bound}");
    }

    #[test]
    fn late_transfer_is_frozen_for_weak_pulses(
        lambda0 in 0.1f64..1.0,
        delta_bar in -2.0f64..2.0,
        t0 in 0.0f64..10.0,
        extra in 0.0f64..10.0,
    ) {
        // √χ λ(t) < 1e−6 here, so the 1e−6/τ flattening bound applies
        let model = make_standard_jcm(1.0, 1.0 + 2.0 * delta_bar);
        let pulse = PulseParams::new(lambda0, 1.0, t0).unwrap();
        let solution = SechSolution::new(&model, &pulse, 1).unwrap();
        let t = t0 + 30.0 + extra;
        let p = solution.eval_grid(&[t, t + 0.5]).unwrap();
        prop_assert!((p[1].transfer() - p[0].transfer()).abs() / 0.5 < 1e-6);
    }
}

#[test]
fn coupling_free_subspace_is_identity() {
    let model = make_standard_jcm(1.0, 3.0);
    let pulse = PulseParams::new(0.0, 1.0, -5.0).unwrap();
    let p = propagate_subspace(&model, &pulse, 6, 12.0).unwrap();
    assert_eq!(p.h, C64::new(1.0, 0.0));
    assert_eq!(p.f, C64::new(0.0, 0.0));
}

#[test]
fn propagator_is_unchanged_far_past_the_pulse() {
    let model = make_standard_jcm(1.0, 1.5);
    let pulse = PulseParams::new(3.0, 1.0, -8.0).unwrap();
    let a = propagate_subspace(&model, &pulse, 5, 100.0).unwrap();
    let b = propagate_subspace(&model, &pulse, 5, 2000.0).unwrap();
    assert!((a.h - b.h).norm() < 1e-12 && (a.f - b.f).norm() < 1e-12);
}

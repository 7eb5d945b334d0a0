use std::f64::consts::PI;

use proptest::prelude::*;
use sech_jcm::specfun::{hyp2f1_at, hyp2f1_grid, hyp2f1_series, ln_gamma, ZPoint};
use sech_jcm::C64;

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn cosine_identity(a in 0.0f64..60.0, theta in 0.0f64..1.5) {
        let z = theta.sin().powi(2);
        let v = hyp2f1_at(re(a), re(-a), re(0.5), ZPoint::from_z(z)).unwrap();
        prop_assert!((v - re((2.0 * a * theta).cos())).norm() < 1e-10, "{v}");
    }

    /// `₂F₁(a, b; c; z) = (1 − z)^{c−a−b} ₂F₁(c − a, c − b; c; z)`.
    #[test]
    fn euler_transformation(
        alpha in 0.1f64..20.0,
        gamma_im in -4.0f64..4.0,
        z in 0.01f64..0.99,
    ) {
        let (a, b, c) = (re(alpha), re(-alpha), C64::new(0.5, gamma_im));
        let x = ZPoint::from_z(z);
        let lhs = hyp2f1_at(a, b, c, x).unwrap();
        let rhs = hyp2f1_at(c - a, c - b, c, x).unwrap() * pow_one_minus(c - a - b, z);
        prop_assert!((lhs - rhs).norm() < 1e-9 * lhs.norm().max(1.0), "{lhs} vs {rhs}");
    }

    #[test]
    fn gamma_recurrence(x in 0.05f64..30.0, y in -30.0f64..30.0) {
        let w = C64::new(x, y);
        let d = ln_gamma(w + 1.0).unwrap() - ln_gamma(w).unwrap() - w.ln();
        let turns = d.im / (2.0 * PI);
        prop_assert!(d.re.abs() < 1e-11 * (1.0 + ln_gamma(w).unwrap().re.abs()));
        prop_assert!((turns - turns.round()).abs() < 1e-11 * (1.0 + y.abs()));
    }

    #[test]
    fn gamma_on_imaginary_axis(y in 0.05f64..20.0) {
        let v = ln_gamma(C64::new(0.0, y)).unwrap();
        let expected = 0.5 * (PI / (y * (PI * y).sinh())).ln();
        prop_assert!((v.re - expected).abs() < 1e-11 * expected.abs().max(1.0));
    }

    #[test]
    fn grid_matches_pointwise(
        alpha in 0.1f64..40.0,
        gamma_im in -4.0f64..4.0,
        zs in prop::collection::vec(0.0f64..1.0, 1..12),
    ) {
        let (a, b, c) = (re(alpha), re(-alpha), C64::new(0.5, gamma_im));
        let points: Vec<ZPoint> = zs.iter().map(|&z| ZPoint::from_z(z)).collect();
        let grid = hyp2f1_grid(a, b, c, &points).unwrap();
        for (p, g) in points.iter().zip(&grid) {
            let single = hyp2f1_at(a, b, c, *p).unwrap();
            prop_assert!((single - g).norm() < 1e-10 * single.norm().max(1.0));
        }
    }
}

/// `(1 − z)^s` for real `z < 1`.
fn pow_one_minus(s: C64, z: f64) -> C64 {
    (s * (1.0 - z).ln()).exp()
}

#[test]
fn terminating_series_is_a_polynomial() {
    // ₂F₁(−2, b; c; z) = 1 − 2bz/c + b(b+1)z²/(c(c+1))
    let (b, c, z) = (re(1.5), C64::new(0.5, 1.0), 0.7);
    let expected = 1.0 - 2.0 * b * z / c + b * (b + 1.0) * z * z / (c * (c + 1.0));
    let v = hyp2f1_series(re(-2.0), b, c, z).unwrap();
    assert!((v.value - expected).norm() < 1e-14);
}

#[test]
fn gauss_sum_approached_from_below() {
    let (a, b, c) = (re(0.3), re(0.7), re(2.5));
    let expected = (ln_gamma(c).unwrap() + ln_gamma(c - a - b).unwrap()
        - ln_gamma(c - a).unwrap()
        - ln_gamma(c - b).unwrap())
    .exp();
    let v = hyp2f1_at(a, b, c, ZPoint::from_complement(1e-20)).unwrap();
    assert!((v - expected).norm() < 1e-12);
    assert!(hyp2f1_at(a, b, c, ZPoint::from_z(1.0)).is_err());
}

#[test]
fn poles_are_reported() {
    assert!(ln_gamma(re(0.0)).is_err());
    assert!(ln_gamma(re(-3.0)).is_err());
    assert!(hyp2f1_at(re(1.0), re(1.0), re(-2.0), ZPoint::from_z(0.3)).is_err());
}

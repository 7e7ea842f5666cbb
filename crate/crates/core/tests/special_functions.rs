mod common;

use common::{log_grid, rel_err};
use nbp_measures::special::{
    exp_integral_e1, gamma_quantile_upper, gamma_survival, log_gamma, upper_incomplete_gamma,
    Precision,
};
use nbp_measures::tail::LevyTail;
use proptest::prelude::*;

const ORACLE_TOL: f64 = 1e-8;

#[test]
fn quadrature_oracle_sanity() {
    assert!(rel_err(common::gamma_fn(0.5), std::f64::consts::PI.sqrt()) < 1e-13);
    assert!(rel_err(common::upper_gamma(1.0, 2.0), (-2.0f64).exp()) < 1e-13);
    assert!(rel_err(common::e1(1.0), 0.219_383_934_395_520_27) < 1e-13);
}

#[test]
fn upper_gamma_against_quadrature() {
    let prec = Precision::default();
    for &a in &[-0.9, -0.5, -0.1, 1e-3, 0.3, 1.0, 2.5, 7.0] {
        for x in log_grid(1e-6, 30.0, 41) {
            let got = upper_incomplete_gamma(a, x, prec).unwrap();
            let want = common::upper_gamma(a, x);
            assert!(
                rel_err(got, want) <= ORACLE_TOL,
                "a={a} x={x}: {got} vs {want}"
            );
        }
    }
}

#[test]
fn e1_against_quadrature() {
    for x in log_grid(1e-6, 30.0, 61) {
        let got = exp_integral_e1(x).unwrap();
        assert!(rel_err(got, common::e1(x)) <= ORACLE_TOL, "x={x}");
    }
}

#[test]
fn survival_against_quadrature() {
    for &a in &[1e-3, 0.01, 0.5, 1.0, 3.0, 10.0] {
        for x in log_grid(1e-6, 30.0, 31) {
            let got = gamma_survival(a, x).unwrap();
            let want = common::gamma_q(a, x);
            assert!(
                rel_err(got, want) <= ORACLE_TOL,
                "a={a} x={x}: {got} vs {want}"
            );
        }
    }
}

#[test]
fn log_gamma_against_quadrature() {
    for &a in &[1e-3, 0.1, 0.5, 1.5, 4.2, 9.0] {
        let got = log_gamma(a).unwrap();
        let want = common::gamma_fn(a).ln();
        assert!((got - want).abs() <= 1e-12 * want.abs().max(1.0), "a={a}");
    }
}

#[test]
fn tails_against_quadrature() {
    for x in log_grid(1e-6, 30.0, 41) {
        for &alpha in &[0.1, 0.5, 0.9] {
            let s = LevyTail::stable(alpha).unwrap().value(x).unwrap();
            assert!(rel_err(s, common::stable_tail(alpha, x)) <= 1e-14);
            let gg = LevyTail::generalized_gamma(alpha)
                .unwrap()
                .value(x)
                .unwrap();
            let want = common::generalized_gamma_tail(alpha, x);
            assert!(
                rel_err(gg, want) <= ORACLE_TOL,
                "alpha={alpha} x={x}: {gg} vs {want}"
            );
        }
        for &theta in &[0.5, 3.0, 100.0] {
            let g = LevyTail::gamma(theta).unwrap().value(x).unwrap();
            assert!(
                rel_err(g, common::gamma_tail(theta, x)) <= ORACLE_TOL,
                "theta={theta} x={x}"
            );
        }
    }
}

#[test]
fn tail_inversion_roundtrip() {
    let tails = [
        LevyTail::stable(0.1).unwrap(),
        LevyTail::stable(0.9).unwrap(),
        LevyTail::gamma(0.5).unwrap(),
        LevyTail::gamma(3.0).unwrap(),
        LevyTail::generalized_gamma(0.1).unwrap(),
        LevyTail::generalized_gamma(0.5).unwrap(),
        LevyTail::generalized_gamma(0.9).unwrap(),
    ];
    for t in &tails {
        for x in log_grid(1e-6, 30.0, 41) {
            let back = t.inverse(t.value(x).unwrap()).unwrap();
            assert!(rel_err(back, x) <= 1e-9, "{t:?} x={x} back={back}");
        }
    }
}

#[test]
fn stable_numeric_inverse_matches_closed_form() {
    let t = LevyTail::stable(0.7).unwrap();
    for y in log_grid(1e-8, 1e8, 33) {
        let closed = t.ln_inverse(y).unwrap();
        let numeric = t.ln_inverse_numeric(y).unwrap();
        assert!(
            (closed - numeric).abs() <= 1e-10 * closed.abs().max(1.0),
            "y={y}"
        );
    }
}

#[test]
fn quantile_examples() {
    let prec = Precision::default();
    let q = gamma_quantile_upper(1.0, 0.5, prec).unwrap();
    assert!((q - 2f64.ln().ln()).abs() < 1e-12);
    let small = gamma_quantile_upper(0.01, 0.5, prec).unwrap();
    assert!(rel_err(small, -69.883_748_850_601_5) < 1e-10);
    assert!(gamma_quantile_upper(1.0, 1.0, prec).is_err());
    assert!(gamma_quantile_upper(1.0, 0.0, prec).is_err());
    assert!(gamma_quantile_upper(0.0, 0.5, prec).is_err());
}

proptest! {
    #[test]
    fn recurrence_holds(a in 0.05f64..5.0, ln_x in -9.0f64..3.4) {
        // Γ(a+1, x) = a Γ(a, x) + x^a e^{-x}
        let prec = Precision::default();
        let x = ln_x.exp();
        let lhs = upper_incomplete_gamma(a + 1.0, x, prec).unwrap();
        let rhs = a * upper_incomplete_gamma(a, x, prec).unwrap() + (a * ln_x - x).exp();
        prop_assert!(rel_err(lhs, rhs) < 1e-11);
    }

    #[test]
    fn negative_parameter_recurrence(a in -0.95f64..-0.05, ln_x in -9.0f64..3.4) {
        let prec = Precision::default();
        let x = ln_x.exp();
        let lhs = upper_incomplete_gamma(a + 1.0, x, prec).unwrap();
        let rhs = a * upper_incomplete_gamma(a, x, prec).unwrap() + (a * ln_x - x).exp();
        prop_assert!(rel_err(lhs, rhs) < 1e-10);
    }

    #[test]
    fn tails_strictly_decrease(alpha in 0.05f64..0.95, theta in 0.1f64..50.0, ln_x in -12.0f64..3.0, step in 1e-3f64..1.0) {
        let x1 = ln_x.exp();
        let x2 = (ln_x + step).exp();
        for t in [
            LevyTail::stable(alpha).unwrap(),
            LevyTail::gamma(theta).unwrap(),
            LevyTail::generalized_gamma(alpha).unwrap(),
        ] {
            prop_assert!(t.value(x2).unwrap() < t.value(x1).unwrap());
        }
    }

    #[test]
    fn inverse_roundtrip(alpha in 0.05f64..0.95, theta in 0.1f64..50.0, ln_y in -20.0f64..10.0) {
        let y = ln_y.exp();
        for t in [
            LevyTail::stable(alpha).unwrap(),
            LevyTail::gamma(theta).unwrap(),
            LevyTail::generalized_gamma(alpha).unwrap(),
        ] {
            let x = t.inverse(y).unwrap();
            if x < f64::MIN_POSITIVE {
                // The preimage underflows; the log-domain inverse covers it.
                prop_assert!(t.ln_inverse(y).unwrap() < -700.0);
                continue;
            }
            prop_assert!(rel_err(t.value(x).unwrap(), y) < 1e-11, "{:?} y={}", t, y);
        }
    }

    #[test]
    fn quantile_roundtrip(ln_shape in -7.0f64..3.0, y in 1e-6f64..0.999_999) {
        let shape = ln_shape.exp();
        let ln_x = gamma_quantile_upper(shape, y, Precision::default()).unwrap();
        let back = nbp_measures::special::gamma_survival_ln_x(shape, ln_x).unwrap();
        prop_assert!(rel_err(back, y) < 1e-10, "shape={} y={} back={}", shape, y, back);
    }

    #[test]
    fn survival_is_monotone(shape in 0.01f64..20.0, ln_x in -10.0f64..3.0) {
        let a = gamma_survival(shape, ln_x.exp()).unwrap();
        let b = gamma_survival(shape, (ln_x + 0.1).exp()).unwrap();
        prop_assert!(b <= a && (0.0..=1.0).contains(&a));
    }
}

mod common;

use std::f64::consts::PI;

use proptest::prelude::*;
use qops::quad::*;
use qops::{Error, C64};

use common::{assert_close, re};

#[test]
fn gaussian_and_sech() {
    let q = QuadSpec::default();
    let g = integrate_line(|t| re((-t * t).exp()), &DecayProfile::symmetric(1.0, 0.0).with_plateau(6.0), &q).unwrap();
    assert_close(g.value, re(PI.sqrt()), 1e-12);
    let s = integrate_line(|t| re(1.0 / t.cosh()), &DecayProfile::symmetric(1.0, 0.0), &q).unwrap();
    assert_close(s.value, re(PI), 1e-12);
}

#[test]
fn oscillatory_fourier_transform() {
    // ∫ e^{iλt}/ch t dt = π/ch(πλ/2)
    let q = QuadSpec::default();
    for lam in [0.0, 3.0, 15.0] {
        let r = integrate_line_with(
            |t| (C64::i() * lam * t).exp() / t.cosh(),
            &DecayProfile::symmetric(1.0, 0.0),
            &q,
            &LineOptions::frequency(lam),
        )
        .unwrap();
        assert_close(r.value, re(PI / (PI * lam / 2.0).cosh()), 1e-12);
    }
}

#[test]
fn breakpoint_at_a_kink() {
    // ∫ e^{-|t-0.3|} = 2
    let q = QuadSpec::default();
    let r = integrate_line_with(
        |t| re((-(t - 0.3).abs()).exp()),
        &DecayProfile::symmetric(1.0, 0.0),
        &q,
        &LineOptions::default().with_breakpoints(&[0.3]),
    )
    .unwrap();
    assert_close(r.value, re(2.0), 1e-12);
}

#[test]
fn half_line() {
    let q = QuadSpec::default();
    let r = integrate_line_with(|t| re((-2.0 * t).exp()), &DecayProfile::symmetric(2.0, 0.0), &q, &LineOptions::default().half_line(0.0)).unwrap();
    assert_close(r.value, re(0.5), 1e-13);
}

#[test]
fn plane_product() {
    let q = QuadSpec::default();
    let d = DecayProfile::symmetric(1.0, 0.0).with_plateau(6.0);
    let r = integrate_plane(|a, b| re((-a * a - 2.0 * b * b).exp()), &d, &d, &q).unwrap();
    assert_close(r.value, re(PI / 2f64.sqrt()), 1e-11);
}

#[test]
fn envelope_must_decay() {
    let q = QuadSpec::default();
    let r = integrate_line(|_| re(1.0), &DecayProfile::symmetric(0.0, 0.0), &q);
    assert!(matches!(r, Err(Error::Divergent { .. })));
}

#[test]
fn non_finite_integrand() {
    let q = QuadSpec::default();
    let r = integrate_interval(|t| re(1.0 / t), -1.0, 2.0, &q, &LineOptions::default());
    assert!(matches!(r, Err(Error::NonFinite { .. })));
}

#[test]
fn budget_is_enforced() {
    let q = QuadSpec {
        max_nodes: 200,
        ..QuadSpec::default()
    };
    let r = integrate_interval(|t| re(t.abs().sqrt()), -1.0, 1.0 + 1e-9, &q, &LineOptions::default());
    assert!(matches!(r, Err(Error::BudgetExceeded { .. })));
}

#[test]
fn reversed_and_empty_intervals() {
    let q = QuadSpec::default();
    let o = LineOptions::default();
    let a = integrate_interval(|t| re(t * t), 0.0, 1.0, &q, &o).unwrap().value;
    let b = integrate_interval(|t| re(t * t), 1.0, 0.0, &q, &o).unwrap().value;
    assert_close(a, -b, 0.0);
    assert_eq!(integrate_interval(|t| re(t), 2.0, 2.0, &q, &o).unwrap().value, re(0.0));
}

#[test]
fn trapezoid_oracle_agrees() {
    let f = |t: f64| (C64::i() * 0.7 * t).exp() / t.cosh().powf(1.3);
    let adaptive = integrate_line_with(f, &DecayProfile::symmetric(1.3, 0.0), &QuadSpec::default(), &LineOptions::frequency(0.7)).unwrap();
    let trap = oracle_trapezoid(f, -40.0, 40.0, 4000);
    assert_close(adaptive.value, trap, 1e-12);
}

#[test]
fn repeated_runs_are_bit_identical() {
    let f = |t: f64| (C64::i() * 2.3 * t).exp() * (-(t - 0.1).powi(2)).exp();
    let d = DecayProfile::symmetric(1.0, 0.1).with_plateau(6.0);
    let o = LineOptions::frequency(2.3);
    let a = integrate_line_with(f, &d, &QuadSpec::default(), &o).unwrap();
    let b = integrate_line_with(f, &d, &QuadSpec::default(), &o).unwrap();
    assert_eq!(a, b);
}

proptest! {
    #[test]
    fn shifted_gaussian(mu in -5.0f64..5.0, s in 0.3f64..3.0) {
        let d = DecayProfile::symmetric(1.0 / s, mu).with_plateau(6.0 * s);
        let r = integrate_line(|t| re((-(t - mu).powi(2) / (2.0 * s * s)).exp()), &d, &QuadSpec::default()).unwrap();
        let exact = s * (2.0 * PI).sqrt();
        prop_assert!((r.value.re - exact).abs() < 1e-10 * exact);
    }

    #[test]
    fn linearity(a in -3.0f64..3.0, b in -3.0f64..3.0, lam in 0.0f64..5.0) {
        let q = QuadSpec::default();
        let d = DecayProfile::symmetric(1.0, 0.0);
        let o = LineOptions::frequency(lam);
        let f = |t: f64| (C64::i() * lam * t).exp() / t.cosh();
        let g = |t: f64| re((-(t * t)).exp());
        let lhs = integrate_line_with(|t| f(t) * a + g(t) * b, &d, &q, &o).unwrap().value;
        let rhs = integrate_line_with(f, &d, &q, &o).unwrap().value * a + integrate_line_with(g, &d, &q, &o).unwrap().value * b;
        prop_assert!((lhs - rhs).norm() < 1e-9 * (1.0 + lhs.norm()));
    }

    #[test]
    fn error_estimate_is_honest(lam in 0.0f64..20.0) {
        let r = integrate_line_with(
            |t| (C64::i() * lam * t).exp() / t.cosh(),
            &DecayProfile::symmetric(1.0, 0.0),
            &QuadSpec::default(),
            &LineOptions::frequency(lam),
        ).unwrap();
        let exact = PI / (PI * lam / 2.0).cosh();
        prop_assert!((r.value.re - exact).abs() <= 10.0 * r.error + 1e-12);
    }
}

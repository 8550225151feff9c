mod common;

use std::f64::consts::SQRT_2;
use std::sync::Arc;

use proptest::prelude::*;
use qops::kernels::{Coupling, KernelFamily};
use qops::operators::*;
use qops::quad::QuadSpec;
use qops::{Error, C64};

use common::{assert_close, re};

fn plane(fl_sigma: f64, l: f64, x: f64) -> C64 {
    (C64::i() * fl_sigma * l * x).exp()
}

#[test]
fn n1_plane_waves_are_eigenfunctions() {
    let q = QuadSpec::default();
    let cases = [
        (KernelFamily::Hyperbolic, Coupling::hyperbolic(1.0).unwrap(), 0.9, 0.2),
        (KernelFamily::Gamma, Coupling::hyperbolic(1.3).unwrap(), 0.3, -0.5),
        (KernelFamily::Relativistic, Coupling::relativistic(1.1, 1.0, SQRT_2).unwrap(), 0.3, -0.4),
    ];
    for (family, c, spectral, label) in cases {
        let spec = OperatorSpec::new(family, 1, c, re(spectral));
        let fl = spec.flavour().unwrap();
        let ev = fl.eigenvalue(re(spectral), re(label)).unwrap();
        for x in [-0.8, 0.0, 1.1] {
            let v = apply_Q(&spec, &FunctionHandle::PlaneWave(re(label)), &[x], &q).unwrap();
            assert_close(v / plane(fl.sigma, label, x), ev, 1e-9);
        }
    }
}

#[test]
fn relativistic_plain_operator_uses_the_dual_coupling() {
    let c = Coupling::relativistic(1.1, 1.0, SQRT_2).unwrap();
    let spec = OperatorSpec::new(KernelFamily::Relativistic, 1, c, re(0.2));
    assert!(!spec.dual);
    let fl = spec.flavour().unwrap();
    let v = apply_Q(&spec, &FunctionHandle::PlaneWave(re(0.5)), &[0.3], &QuadSpec::default()).unwrap();
    assert_close(v / plane(fl.sigma, 0.5, 0.3), fl.eigenvalue(re(0.2), re(0.5)).unwrap(), 1e-9);
}

#[test]
fn arity_mismatch_is_rejected() {
    let c = Coupling::hyperbolic(1.0).unwrap();
    let f = FunctionHandle::PlaneWave(re(0.1));
    let q = QuadSpec::default();
    let one = OperatorSpec::new(KernelFamily::Hyperbolic, 1, c, re(0.0));
    assert!(matches!(apply_Q(&one, &f, &[0.0, 1.0], &q), Err(Error::InvalidParam(_))));
    let two = OperatorSpec::new(KernelFamily::Hyperbolic, 2, c, re(0.0));
    assert!(matches!(apply_Q(&two, &f, &[0.0, 1.0], &q), Err(Error::InvalidParam(_))));
}

#[test]
fn constant_input_to_q2_diverges() {
    // the measure grows as fast as the kernels decay along y₁ - y₂
    let c = Coupling::hyperbolic(1.0).unwrap();
    let spec = OperatorSpec::new(KernelFamily::Hyperbolic, 2, c, re(0.3));
    let f = FunctionHandle::Pair {
        f: Arc::new(|_, _| re(1.0)),
        envelope: PairEnvelope {
            u_rate: 0.0,
            tilt: 0.0,
            s_decay: 0.0,
            center: 0.0,
            frequency: 0.0,
        },
    };
    let r = apply_Q(&spec, &f, &[0.2, -0.1], &QuadSpec::default());
    assert!(matches!(r, Err(Error::Divergent { .. })), "{r:?}");
}

#[test]
fn growing_input_to_q1_diverges() {
    let c = Coupling::hyperbolic(0.5).unwrap();
    let spec = OperatorSpec::new(KernelFamily::Hyperbolic, 1, c, re(0.0));
    // |e^{iℓy}| = e^{-Im ℓ·y} outgrows ch^{-1/2}
    let r = apply_Q(&spec, &FunctionHandle::PlaneWave(C64::new(0.0, 0.7)), &[0.0], &QuadSpec::default());
    assert!(matches!(r, Err(Error::Divergent { .. })));
}

#[test]
fn q_lim_ratio_tends_to_one() {
    let dev = |y2: f64| (q_lim_ratio(1.0, [0.3, -0.2], 0.4, y2, 0.7) - 1.0).norm();
    let (a, b, c) = (dev(6.0), dev(10.0), dev(14.0));
    assert!(a > b && b > c && c < 1e-10, "{a:e} {b:e} {c:e}");
}

#[test]
fn exchange_relation_hyperbolic() {
    let c = Coupling::hyperbolic(1.0).unwrap();
    let (lhs, rhs) =
        qlambda_exchange_check(KernelFamily::Hyperbolic, re(0.5), re(0.2), re(0.1), [0.3, -0.4], &c, &QuadSpec::default())
            .unwrap();
    assert_close(lhs, rhs, 1e-7);
}

#[test]
fn exchange_outside_its_strip_is_refused() {
    let c = Coupling::hyperbolic(1.0).unwrap();
    let q = QuadSpec::default();
    // Im(λ - ρ - i·s) must lie in (-2s, 0) with s = g
    for lam in [C64::new(0.5, 1.5), C64::new(0.5, -1.2)] {
        let r = qlambda_exchange_check(KernelFamily::Hyperbolic, lam, re(0.2), re(0.1), [0.3, -0.4], &c, &q);
        assert!(matches!(r, Err(Error::StripViolation { .. })), "{lam}");
    }
}

#[test]
fn exchange_shifts_per_family() {
    let c = Coupling::relativistic(0.9, 1.0, SQRT_2).unwrap();
    let s = |f, d| exchange_shift(&flavour_for(f, d, &c).unwrap());
    assert_close(re(s(KernelFamily::Hyperbolic, false)), re(0.9), 1e-15);
    assert_close(re(s(KernelFamily::Gamma, true)), re(std::f64::consts::FRAC_PI_2), 1e-15);
    assert_close(re(s(KernelFamily::Relativistic, true)), re(c.gstar().unwrap() / 2.0), 1e-14);
}

#[test]
fn composed_kernel_outside_strip_is_refused() {
    let fl = flavour_for(KernelFamily::Hyperbolic, false, &Coupling::hyperbolic(1.0).unwrap()).unwrap();
    let r = qq_kernel1(&fl, C64::new(0.0, 1.5), C64::new(0.0, -1.0), 0.0, 0.3, false, &QuadSpec::default());
    assert!(matches!(r, Err(Error::StripViolation { .. })));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn n1_operators_commute(lam in -1.0f64..1.0, mu in -1.0f64..1.0, x in -1.0f64..1.0, z in -1.0f64..1.0) {
        let fl = flavour_for(KernelFamily::Hyperbolic, false, &Coupling::hyperbolic(0.8).unwrap()).unwrap();
        let q = QuadSpec::default();
        let a = qq_kernel1(&fl, re(lam), re(mu), x, z, false, &q).unwrap();
        let b = qq_kernel1(&fl, re(mu), re(lam), x, z, true, &q).unwrap();
        let direct = qq_kernel1(&fl, re(mu), re(lam), x, z, false, &q).unwrap();
        prop_assert!((a - b).norm() <= 1e-9 * a.norm().max(1.0));
        prop_assert!((a - direct).norm() <= 1e-9 * a.norm().max(1.0));
    }

    #[test]
    fn hyperbolic_eigenvalue_on_plane_waves(spectral in -2.0f64..2.0, label in -2.0f64..2.0, x in -3.0f64..3.0, g in 0.4f64..2.0) {
        let c = Coupling::hyperbolic(g).unwrap();
        let spec = OperatorSpec::new(KernelFamily::Hyperbolic, 1, c, re(spectral));
        let fl = spec.flavour().unwrap();
        let v = apply_Q(&spec, &FunctionHandle::PlaneWave(re(label)), &[x], &QuadSpec::default()).unwrap();
        let ev = fl.eigenvalue(re(spectral), re(label)).unwrap();
        prop_assert!((v / plane(1.0, label, x) - ev).norm() <= 1e-9 * ev.norm().max(1.0));
    }
}

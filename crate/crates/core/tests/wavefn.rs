mod common;

use std::f64::consts::SQRT_2;

use proptest::prelude::*;
use qops::kernels::{Coupling, KernelFamily};
use qops::quad::QuadSpec;
use qops::wavefn::*;
use qops::{Error, C64};

use common::{assert_close, oracle, re};

const HYP: KernelFamily = KernelFamily::Hyperbolic;

#[test]
fn psi_matches_mpmath() {
    let q = QuadSpec::default();
    let g1 = Coupling::hyperbolic(1.0).unwrap();
    let v = psi_HR(&SpectralPoint::real(0.4, -0.3), &PositionPoint::new(0.2, -0.6), &g1, HYP, &q).unwrap();
    assert_close(v, oracle("psi_g1_0p4_m0p3_0p2_m0p6"), 1e-10);
    assert_close(v, oracle("psi_g1_closed"), 1e-10);
    let g07 = Coupling::hyperbolic(0.7).unwrap();
    let v = psi_HR(&SpectralPoint::real(0.5, 0.1), &PositionPoint::new(1.0, -0.4), &g07, HYP, &q).unwrap();
    assert_close(v, oracle("psi_g0p7_0p5_0p1_1p0_m0p4"), 1e-10);
}

#[test]
fn coordinate_and_spectral_sides_agree() {
    let q = QuadSpec::default();
    let sp = SpectralPoint::real(0.5, 0.1);
    let pp = PositionPoint::new(1.0, -0.4);
    let c = Coupling::hyperbolic(0.7).unwrap();
    let hr = psi_HR(&sp, &pp, &c, HYP, &q).unwrap();
    let mb = psi_MB(&sp, &pp, &c, KernelFamily::Gamma, &q).unwrap();
    assert_close(hr, mb, 1e-9);

    let r = Coupling::relativistic(0.9, 1.0, SQRT_2).unwrap();
    let sp = SpectralPoint::real(0.3, -0.2);
    let pp = PositionPoint::new(0.4, -0.1);
    let hr = psi_HR(&sp, &pp, &r, KernelFamily::Relativistic, &q).unwrap();
    let mb = psi_MB(&sp, &pp, &r, KernelFamily::Relativistic, &q).unwrap();
    assert_close(hr, mb, 1e-8);
}

#[test]
fn factored_form_and_its_closed_form_at_g1() {
    let q = QuadSpec::default();
    let c = Coupling::hyperbolic(1.0).unwrap();
    for (lam, x) in [(0.35, 0.8), (0.0, 0.8), (0.35, 0.0), (0.0, 0.0), (1.7, -2.5)] {
        assert_close(psi_factored(lam, x, &c, &q).unwrap(), re(psi_factored_g1(lam, x)), 1e-10);
    }
    // Ψ = e^{i(λ₁+λ₂)(x₁+x₂)/2}·ψ_{(λ₁-λ₂)/2}(x₁-x₂)
    let (sp, pp) = (SpectralPoint::real(0.4, -0.3), PositionPoint::new(0.2, -0.6));
    let phase = (C64::i() * 0.1 * -0.4 / 2.0).exp();
    let full = psi_HR(&sp, &pp, &c, HYP, &q).unwrap();
    assert_close(full, phase * psi_factored(0.35, 0.8, &c, &q).unwrap(), 1e-12);
}

#[test]
fn q2_eigenvalue_on_the_pair_function() {
    let c = Coupling::hyperbolic(1.0).unwrap();
    let pair = hr_pair(&SpectralPoint::real(0.4, -0.3), &c, HYP).unwrap();
    let q = QuadSpec::default();
    let at = [0.3, -0.4];
    let lhs = pair.apply_q2(re(0.5), at, &q).unwrap();
    let rhs = pair.q2_eigenvalue(re(0.5)).unwrap() * pair.eval(at, &q).unwrap();
    assert_close(lhs, rhs, 1e-7);
}

#[test]
fn schrodinger_and_momentum_residuals_are_small() {
    let c = Coupling::hyperbolic(1.0).unwrap();
    let q = QuadSpec::with_tol(1e-13, 1e-15);
    let (sp, pp) = (SpectralPoint::real(0.9, 0.2), PositionPoint::new(1.2, 0.3));
    let psi = psi_HR(&sp, &pp, &c, HYP, &q).unwrap().norm();
    assert!(schrodinger_residual(&sp, &pp, &c, 1e-2, &q).unwrap() < 1e-6 * psi.max(1.0));
    assert!(momentum_residual(&sp, &pp, &c, 1e-2, &q).unwrap() < 1e-7 * psi.max(1.0));
}

#[test]
fn coincident_arguments_are_reported() {
    let c = Coupling::hyperbolic(1.0).unwrap();
    let q = QuadSpec::default();
    let same = SpectralPoint::real(0.3, 0.3);
    assert!(matches!(psi_asymptotic(&same, &PositionPoint::new(0.0, 8.0), &c), Err(Error::Coincident(_))));
    assert!(matches!(dual_coefficients(&same, 3.0), Err(Error::Coincident(_))));
    let r = schrodinger_residual(&SpectralPoint::real(0.3, -0.2), &PositionPoint::new(0.5, 0.5), &c, 1e-2, &q);
    assert!(matches!(r, Err(Error::Coincident(_))));
    let gauge = sutherland_gauge(&SpectralPoint::real(0.3, -0.2), &PositionPoint::new(0.5, 0.5), &c, &q).unwrap();
    assert_eq!(gauge, re(0.0));
}

#[test]
fn dual_shift_needs_large_coupling() {
    let sp = SpectralPoint::real(0.4, -0.3);
    let pp = PositionPoint::new(0.2, -0.6);
    for g in [1.0, 2.0] {
        let r = dual_difference_residual(&sp, &pp, &Coupling::hyperbolic(g).unwrap(), &QuadSpec::default());
        assert!(matches!(r, Err(Error::Continuation(_))), "g = {g}");
    }
}

#[test]
fn relativistic_forms_need_periods() {
    let c = Coupling::hyperbolic(1.0).unwrap();
    let r = psi_HR(&SpectralPoint::real(0.1, 0.2), &PositionPoint::new(0.0, 1.0), &c, KernelFamily::Relativistic, &QuadSpec::default());
    assert!(matches!(r, Err(Error::InvalidParam(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn closed_form_at_g1(lam in -2.0f64..2.0, x in -4.0f64..4.0) {
        let v = psi_factored(lam, x, &Coupling::hyperbolic(1.0).unwrap(), &QuadSpec::default()).unwrap();
        let exact = psi_factored_g1(lam, x);
        prop_assert!((v - exact).norm() <= 1e-10 * exact.abs().max(1.0));
    }

    #[test]
    fn psi_is_symmetric(l1 in -1.5f64..1.5, l2 in -1.5f64..1.5, x1 in -2.0f64..2.0, x2 in -2.0f64..2.0, g in 0.4f64..2.0) {
        let c = Coupling::hyperbolic(g).unwrap();
        let q = QuadSpec::default();
        let (sp, pp) = (SpectralPoint::real(l1, l2), PositionPoint::new(x1, x2));
        let v = psi_HR(&sp, &pp, &c, HYP, &q).unwrap();
        let sx = psi_HR(&sp, &pp.swapped(), &c, HYP, &q).unwrap();
        let sl = psi_HR(&sp.swapped(), &pp, &c, HYP, &q).unwrap();
        prop_assert!((v - sx).norm() <= 1e-10 * v.norm().max(1.0));
        prop_assert!((v - sl).norm() <= 1e-10 * v.norm().max(1.0));
    }

    #[test]
    fn psi_is_real_up_to_its_centre_of_mass_phase(l in -1.5f64..1.5, x in -3.0f64..3.0, g in 0.4f64..2.0) {
        let v = psi_factored(l, x, &Coupling::hyperbolic(g).unwrap(), &QuadSpec::default()).unwrap();
        prop_assert!(v.im.abs() <= 1e-12 * v.norm().max(1.0));
    }
}

mod common;

use std::f64::consts::{PI, SQRT_2};

use proptest::prelude::*;
use qops::kernels::*;
use qops::operators::flavour_for;
use qops::quad::{integrate_line_with, DecayProfile, LineOptions, QuadSpec};
use qops::{Error, C64};

use common::{assert_close, oracle, re};

#[test]
fn kernel_values_match_mpmath() {
    let g1 = Coupling::hyperbolic(1.0).unwrap();
    let g07 = Coupling::hyperbolic(0.7).unwrap();
    assert_close(kernel_hatK(re(0.6), &g1).unwrap(), oracle("hatk_0p6_g1"), 1e-13);
    assert_close(kernel_hatK(re(1.3), &g07).unwrap(), oracle("hatk_1p3_g0p7"), 1e-13);
    let r = Coupling::relativistic(0.8, 1.0, SQRT_2).unwrap();
    assert_close(kernel_Kg(re(0.4), &r).unwrap(), oracle("kg_0p4_0p8_1_r2"), 1e-12);
}

#[test]
fn relativistic_measure_matches_mpmath() {
    let c = Coupling::relativistic(0.8, 1.0, 1.0).unwrap();
    assert_close(measure(KernelFamily::Relativistic, 0.7, 0.0, &c).unwrap(), oracle("mu_rel_0p7_0p8_1_1"), 1e-11);
    assert_eq!(measure(KernelFamily::Relativistic, 0.3, 0.3, &c).unwrap(), re(0.0));
}

#[test]
fn kernel_at_origin_is_one() {
    for g in [0.3, 1.0, 2.5] {
        assert_eq!(kernel_K(0.0, &Coupling::hyperbolic(g).unwrap()), 1.0);
    }
    // K̂(0) = Γ(g/2)²/(2^{1-g}Γ(g)); at g = 1 that is π
    assert_close(kernel_hatK(re(0.0), &Coupling::hyperbolic(1.0).unwrap()).unwrap(), re(PI), 1e-14);
}

#[test]
fn fourier_transform_of_kg_is_the_dual_kernel() {
    // 2∫₀^∞ cos(σxt) K_g(t) dt = √(ω₁ω₂)·S₂(g*)·K_{g*}(x)
    let c = Coupling::relativistic(0.8, 1.0, SQRT_2).unwrap();
    let x = 0.3;
    let rhs = eigenvalue(KernelFamily::Relativistic, re(x), re(0.0), &c.dual().unwrap()).unwrap();
    assert_close(rhs, oracle("betah_rhs_0p8_0p3"), 1e-11);

    let fl = Flavour::relativistic(0.8, &c.periods().unwrap()).unwrap();
    let lhs = integrate_line_with(
        |t| C64::new(fl.ln_k(t).unwrap(), fl.sigma * x * t).exp(),
        &DecayProfile::symmetric(fl.a, 0.0),
        &QuadSpec::default(),
        &LineOptions::frequency(fl.sigma * x),
    )
    .unwrap();
    assert_close(lhs.value, oracle("betah_lhs_0p8_0p3"), 1e-9);
}

#[test]
fn hatk_poles_are_reported() {
    let c = Coupling::hyperbolic(0.7).unwrap();
    // iλ = -(g + 2k)
    assert!(matches!(kernel_hatK(C64::new(0.0, 0.7), &c), Err(Error::GammaPole { .. })));
    assert!(matches!(kernel_hatK(C64::new(0.0, -2.7), &c), Err(Error::GammaPole { .. })));
    assert!(kernel_hatK(C64::new(0.0, 0.6), &c).is_ok());
}

#[test]
fn complex_k_leaves_its_strip() {
    assert!(matches!(kernel_K_complex(C64::new(0.1, 1.6), 1.0), Err(Error::Continuation(_))));
    let z = C64::new(0.4, 0.3);
    let direct = z.cosh().powf(-1.5);
    assert_close(kernel_K_complex(z, 1.5).unwrap(), direct, 1e-14);
}

#[test]
fn coupling_validation() {
    assert!(Coupling::hyperbolic(0.0).is_err());
    assert!(Coupling::hyperbolic(f64::NAN).is_err());
    assert!(Coupling::relativistic(2.5, 1.0, 1.0).is_err());
    let c = Coupling::relativistic(0.8, 1.0, SQRT_2).unwrap();
    assert_close(re(c.gstar().unwrap()), re(1.0 + SQRT_2 - 0.8), 1e-15);
    assert_eq!(c.dual().unwrap().dual().unwrap().g, c.g);
    assert!(Coupling::hyperbolic(1.0).unwrap().gstar().is_err());
    assert!(measure(KernelFamily::Relativistic, 1.0, 0.0, &Coupling::hyperbolic(1.0).unwrap()).is_err());
}

#[test]
fn family_names_round_trip() {
    for f in [KernelFamily::Hyperbolic, KernelFamily::Gamma, KernelFamily::Relativistic] {
        assert_eq!(f.name().parse::<KernelFamily>().unwrap(), f);
    }
    assert!(matches!("elliptic".parse::<KernelFamily>(), Err(Error::InvalidParam(_))));
}

#[test]
fn flavour_conventions() {
    let c = Coupling::relativistic(0.8, 1.0, SQRT_2).unwrap();
    assert!(flavour_for(KernelFamily::Hyperbolic, true, &c).is_err());
    assert!(flavour_for(KernelFamily::Gamma, false, &c).is_err());
    let plain = flavour_for(KernelFamily::Relativistic, false, &c).unwrap();
    let hatted = flavour_for(KernelFamily::Relativistic, true, &c).unwrap();
    assert_close(re(plain.h), re(c.gstar().unwrap()), 1e-15);
    assert_eq!(hatted.h, 0.8);
    assert_close(re(hatted.sigma), re(2.0 * PI / SQRT_2), 1e-15);
    assert!(flavour_for(KernelFamily::Relativistic, true, &Coupling::hyperbolic(0.8).unwrap()).is_err());
}

#[test]
fn tabulated_relativistic_logs_match_direct_evaluation() {
    let p = qops::special_fn::Periods::new(1.0, SQRT_2).unwrap();
    let fl = Flavour::relativistic(0.8, &p).unwrap();
    for u in [0.0, 0.37, 1.9, 5.5, 9.0, 14.0] {
        let direct = ln_kernel_Kg_real(u, 0.8, &p).unwrap();
        assert!((fl.ln_k(u).unwrap() - direct).abs() < 1e-11 * direct.abs().max(1.0), "u = {u}");
        let c = Coupling::new(0.8, Some(p)).unwrap();
        if u > 0.0 {
            let m = measure(KernelFamily::Relativistic, u, 0.0, &c).unwrap().re.ln();
            assert!((fl.ln_mu(u).unwrap() - m).abs() < 1e-10 * m.abs().max(1.0), "u = {u}");
        }
    }
}

#[test]
fn hatk_asymptotic_form() {
    let c = Coupling::hyperbolic(1.4).unwrap();
    // relative corrections are O(1/μ)
    let dev = |mu: f64| (kernel_hatK(re(0.3 - mu), &c).unwrap() / hatK_asymptotic(0.3, mu, &c) - 1.0).norm();
    let (d1, d2) = (dev(60.0), dev(120.0));
    assert!(d1 < 1e-2 && d2 < 0.6 * d1, "{d1:e} {d2:e}");
}

proptest! {
    #[test]
    fn kernels_are_even(x in -30.0f64..30.0, g in 0.2f64..3.0) {
        let c = Coupling::hyperbolic(g).unwrap();
        prop_assert_eq!(kernel_K(x, &c), kernel_K(-x, &c));
        let a = kernel_hatK(re(x), &c).unwrap();
        let b = kernel_hatK(re(-x), &c).unwrap();
        prop_assert!((a - b).norm() <= 1e-14 * a.norm());
    }

    #[test]
    fn kg_is_even_and_real(x in -6.0f64..6.0, g in 0.2f64..2.2) {
        let c = Coupling::relativistic(g, 1.0, SQRT_2).unwrap();
        let a = kernel_Kg(re(x), &c).unwrap();
        let b = kernel_Kg(re(-x), &c).unwrap();
        prop_assert!((a - b).norm() <= 1e-10 * a.norm());
        prop_assert!(a.im.abs() <= 1e-10 * a.norm());
        prop_assert!(a.re > 0.0);
    }

    #[test]
    fn measures_are_even_and_nonnegative(u in 0.01f64..8.0, g in 0.2f64..2.2) {
        let c = Coupling::relativistic(g, 1.0, SQRT_2).unwrap();
        for fam in [KernelFamily::Hyperbolic, KernelFamily::Gamma, KernelFamily::Relativistic] {
            let a = measure(fam, u, 0.0, &c).unwrap();
            let b = measure(fam, 0.0, u, &c).unwrap();
            prop_assert!(a.re >= 0.0);
            prop_assert!((a - b).norm() <= 1e-12 * a.norm());
        }
    }

    #[test]
    fn k_matches_its_definition(x in -20.0f64..20.0, g in 0.2f64..3.0) {
        let c = Coupling::hyperbolic(g).unwrap();
        let direct = x.cosh().powf(-g);
        prop_assert!((kernel_K(x, &c) - direct).abs() <= 1e-13 * direct);
    }
}

//! Two-particle wave functions in coordinate (HR) and spectral (MB) form.
//!
//! Every representation used here has the shape of a Λ₂-image of a plane
//! wave,
//!
//! Ψ(p₁, p₂) = c·w ∫ dt e^{iσ[ℓ₂(p₁+p₂-t) + ℓ₁t]} K(p₁-t) K(p₂-t),
//!
//! for a kernel family K with its phase scale σ and weight w, labels ℓ and an
//! overall constant c. [`PairFunction`] evaluates it through the centred
//! form Ψ = c·w·e^{iσ(ℓ₁+ℓ₂)(p₁+p₂)/2}·φ(p₁-p₂) with
//!
//! φ(u) = ∫ dt e^{iσ(ℓ₁-ℓ₂)t} K(u/2-t) K(-u/2-t),
//!
//! and directly when the evaluation point is complex.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{ln_sh_abs, Coupling, Flavour, KernelFamily};
use crate::operators::{kernel_rate, tail_amplitude, Trap};
use crate::quad::{integrate_line_with, DecayProfile, LineOptions, QuadSpec};
use crate::special_fn::{complex_gamma, double_sine};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralPoint {
    pub lambda1: C64,
    pub lambda2: C64,
}

impl SpectralPoint {
    pub fn real(l1: f64, l2: f64) -> Self {
        SpectralPoint {
            lambda1: C64::new(l1, 0.0),
            lambda2: C64::new(l2, 0.0),
        }
    }

    pub fn swapped(&self) -> Self {
        SpectralPoint {
            lambda1: self.lambda2,
            lambda2: self.lambda1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PositionPoint {
    pub x1: f64,
    pub x2: f64,
}

impl PositionPoint {
    pub fn new(x1: f64, x2: f64) -> Self {
        PositionPoint { x1, x2 }
    }

    pub fn swapped(&self) -> Self {
        PositionPoint { x1: self.x2, x2: self.x1 }
    }
}

/// Λ₂-image of a plane wave for one kernel family.
#[derive(Debug, Clone)]
pub struct PairFunction {
    pub flavour: Flavour,
    pub labels: (C64, C64),
    pub prefactor: C64,
}

impl PairFunction {
    pub fn new(flavour: Flavour, l1: C64, l2: C64, prefactor: C64) -> Self {
        PairFunction {
            flavour,
            labels: (l1, l2),
            prefactor,
        }
    }

    fn diff(&self) -> C64 {
        (self.labels.0 - self.labels.1) * self.flavour.sigma
    }

    fn total(&self) -> C64 {
        (self.labels.0 + self.labels.1) * self.flavour.sigma
    }

    /// φ(u)·e^{a|u|}, which stays O(1) where φ itself underflows.
    fn phi_scaled(&self, u: f64, q: &QuadSpec) -> Result<C64> {
        let fl = &self.flavour;
        let a = kernel_rate(fl);
        let d = self.diff();
        let pos = 2.0 * a + d.im;
        let neg = 2.0 * a - d.im;
        if !(pos > 0.0 && neg > 0.0) {
            return Err(Error::Divergent {
                rate: pos.min(neg),
                direction: "t",
            });
        }
        let h = 0.5 * u.abs();
        let decay = DecayProfile::new(pos, neg, 0.0)
            .with_plateau(h)
            .with_amplitude(tail_amplitude(fl, pos.min(neg), q));
        let opts = LineOptions::frequency(d.re.abs());
        let trap = Trap::default();
        let r = integrate_line_with(
            |t| {
                let l = trap.val(fl.ln_k(h - t)) + trap.val(fl.ln_k(-h - t)) + 2.0 * a * h;
                (C64::new(l, 0.0) + C64::i() * d * t).exp()
            },
            &decay,
            q,
            &opts,
        );
        Ok(trap.finish(r)?.value)
    }

    /// The centred one-variable integral φ(u); even in u.
    pub fn phi(&self, u: f64, q: &QuadSpec) -> Result<C64> {
        Ok(self.phi_scaled(u, q)? * (-kernel_rate(&self.flavour) * u.abs()).exp())
    }

    /// Ψ(p₁, p₂) at a real point.
    pub fn eval(&self, at: [f64; 2], q: &QuadSpec) -> Result<C64> {
        let [p1, p2] = at;
        let phase = (C64::i() * self.total() * 0.5 * (p1 + p2)).exp();
        Ok(self.prefactor * self.flavour.weight * phase * self.phi(p1 - p2, q)?)
    }

    /// Ψ(p₁, p₂) by the uncentred integral, for complex evaluation points.
    pub fn eval_direct(&self, at: [C64; 2], q: &QuadSpec) -> Result<C64> {
        let fl = &self.flavour;
        let a = kernel_rate(fl);
        let [p1, p2] = at;
        let (l1, l2) = self.labels;
        let d = self.diff();
        let pos = 2.0 * a + d.im;
        let neg = 2.0 * a - d.im;
        if !(pos > 0.0 && neg > 0.0) {
            return Err(Error::Divergent {
                rate: pos.min(neg),
                direction: "t",
            });
        }
        let (lo, hi) = (p1.re.min(p2.re), p1.re.max(p2.re));
        let decay = DecayProfile::new(pos, neg, 0.5 * (lo + hi))
            .with_plateau(0.5 * (hi - lo))
            .with_amplitude(tail_amplitude(fl, pos.min(neg), q));
        let opts = LineOptions::frequency(d.re.abs() + fl.sigma * (p1.im.abs() + p2.im.abs()));
        let s = fl.sigma;
        let trap = Trap::default();
        let r = integrate_line_with(
            |t| {
                let l = trap.cval(fl.ln_k_complex(p1 - t)) + trap.cval(fl.ln_k_complex(p2 - t));
                (l + C64::i() * s * (l2 * (p1 + p2 - t) + l1 * t)).exp()
            },
            &decay,
            q,
            &opts,
        );
        Ok(self.prefactor * fl.weight * trap.finish(r)?.value)
    }

    /// [Q₂(λ)Ψ](x₁, x₂) for the operator of the same family.
    ///
    /// In centre-of-mass coordinates the input is e^{iσ(ℓ₁+ℓ₂)s}φ(u), so the
    /// s-integral only involves the four kernels:
    /// Q₂Ψ = 2w²·c·w·e^{iσλ(x₁+x₂)} ∫₀^∞ du μ(u) φ(u) I(u),
    /// I(u) = ∫ ds e^{iσ(ℓ₁+ℓ₂-2λ)s} ∏ K(x_i - s ∓ u/2).
    pub fn apply_q2(&self, lam: C64, at: [f64; 2], q: &QuadSpec) -> Result<C64> {
        let fl = &self.flavour;
        let a = kernel_rate(fl);
        let [x1, x2] = at;
        let d = self.diff();
        let c = self.total() - lam * (2.0 * fl.sigma);
        let u_rate = a - 0.5 * d.im.abs() - 0.5 * c.im.abs();
        if !(u_rate > 0.0) {
            return Err(Error::Divergent {
                rate: u_rate,
                direction: "|u|",
            });
        }
        let s_pos = 4.0 * a + c.im;
        let s_neg = 4.0 * a - c.im;
        if !(s_pos > 0.0 && s_neg > 0.0) {
            return Err(Error::Divergent {
                rate: s_pos.min(s_neg),
                direction: "s",
            });
        }
        let inner = QuadSpec {
            rel_tol: q.rel_tol / 10.0,
            abs_tol: q.abs_tol / 10.0,
            ..*q
        };
        let s_amp = tail_amplitude(fl, s_pos.min(s_neg), q);
        let xc = 0.5 * (x1 + x2);
        let dx = 0.5 * (x1 - x2).abs();
        // I(u)·e^{(2a - |Im c|/2)u}, of at most polynomial size in u
        let i_rate = 2.0 * a - 0.5 * c.im.abs();
        let i_scaled = |u: f64, abs_tol: f64| -> Result<C64> {
            let inner = QuadSpec { abs_tol, ..inner };
            let h = 0.5 * u;
            let decay = DecayProfile::new(s_pos, s_neg, xc)
                .with_plateau(dx + h)
                .with_amplitude(s_amp);
            let opts = LineOptions::frequency(c.re.abs()).with_breakpoints(&[x1 - h, x1 + h, x2 - h, x2 + h]);
            let trap = Trap::default();
            let r = integrate_line_with(
                |s| {
                    let mut l = i_rate * u;
                    for xi in [x1, x2] {
                        l += trap.val(fl.ln_k(xi - s - h)) + trap.val(fl.ln_k(xi - s + h));
                    }
                    (C64::new(l, 0.0) + C64::i() * c * s).exp()
                },
                &decay,
                &inner,
                &opts,
            );
            Ok(trap.finish(r)?.value)
        };
        // effective length of the weighted u-range
        let reach = 1.0 + 2.0 * dx + 1.0 / u_rate;
        let outer = DecayProfile::symmetric(u_rate, 0.0)
            .with_plateau(2.0 * dx)
            .with_amplitude(tail_amplitude(fl, u_rate, q));
        let opts = LineOptions::frequency(0.5 * (d.re.abs() + c.re.abs()))
            .half_line(0.0)
            .with_breakpoints(&[2.0 * dx]);
        let trap = Trap::default();
        let r = integrate_line_with(
            |u| {
                if u == 0.0 {
                    return C64::new(0.0, 0.0);
                }
                let lm = trap.val(fl.ln_mu(u)) - (a + i_rate) * u;
                let w = lm.exp() * reach;
                if w == 0.0 {
                    return C64::new(0.0, 0.0);
                }
                // each factor only needs the absolute accuracy its partner's
                // weight passes on to the outer sum; φ̃ first assumes |Î| ≤ 1
                let tol = |other: f64| inner.abs_tol.max(inner.abs_tol / (w * other.max(1e-300)));
                let phi_at = |bound: f64| {
                    self.phi_scaled(
                        u,
                        &QuadSpec {
                            abs_tol: tol(bound),
                            ..inner
                        },
                    )
                };
                let mut p = trap.cval(phi_at(1.0));
                let i = trap.cval(i_scaled(u, tol(p.norm())));
                if i.norm() > 1.0 {
                    p = trap.cval(phi_at(i.norm()));
                }
                p * i * lm.exp()
            },
            &outer,
            q,
            &opts,
        );
        let integral = trap.finish(r)?.value;
        let w = fl.weight;
        let phase = (C64::i() * lam * fl.sigma * (x1 + x2)).exp();
        Ok(integral * phase * self.prefactor * (2.0 * w * w * w))
    }

    /// 2·q(λ, ℓ₁)·q(λ, ℓ₂), the Q₂ eigenvalue on this function.
    pub fn q2_eigenvalue(&self, lam: C64) -> Result<C64> {
        let fl = &self.flavour;
        Ok(fl.eigenvalue(lam, self.labels.0)? * fl.eigenvalue(lam, self.labels.1)? * 2.0)
    }
}

fn nonrelativistic(family: KernelFamily) -> bool {
    matches!(family, KernelFamily::Hyperbolic | KernelFamily::Gamma)
}

/// Coordinate-side representation: hyperbolic Ψ_λ(x), or the relativistic
/// ∫dt e^{iσλ₂(x₁+x₂-t)} K_g(x₁-t) K_g(x₂-t) e^{iσλ₁t}.
pub fn hr_pair(sp: &SpectralPoint, c: &Coupling, family: KernelFamily) -> Result<PairFunction> {
    let fl = if nonrelativistic(family) {
        Flavour::hyperbolic(c.g)
    } else {
        Flavour::relativistic(c.g, &c.periods()?)?
    };
    Ok(PairFunction::new(fl, sp.lambda1, sp.lambda2, C64::new(1.0, 0.0)))
}

/// Spectral-side representation as a function of (λ₁, λ₂): the gamma-kernel
/// Φ_{x₁,x₂}, or S₂(g*)²·∫dγ e^{iσx₁(λ₁+λ₂-γ)} K_{g*}(λ₁-γ) K_{g*}(λ₂-γ) e^{iσx₂γ}.
pub fn mb_pair(pp: &PositionPoint, c: &Coupling, family: KernelFamily) -> Result<PairFunction> {
    let (x1, x2) = (C64::new(pp.x1, 0.0), C64::new(pp.x2, 0.0));
    if nonrelativistic(family) {
        Ok(PairFunction::new(Flavour::gamma(c.g), x1, x2, C64::new(1.0, 0.0)))
    } else {
        let p = c.periods()?;
        let gs = c.gstar()?;
        let s = double_sine(C64::new(gs, 0.0), &p)?;
        Ok(PairFunction::new(Flavour::relativistic(gs, &p)?, x2, x1, s * s))
    }
}

pub fn psi_HR(sp: &SpectralPoint, pp: &PositionPoint, c: &Coupling, family: KernelFamily, q: &QuadSpec) -> Result<C64> {
    hr_pair(sp, c, family)?.eval([pp.x1, pp.x2], q)
}

pub fn psi_MB(sp: &SpectralPoint, pp: &PositionPoint, c: &Coupling, family: KernelFamily, q: &QuadSpec) -> Result<C64> {
    let pair = mb_pair(pp, c, family)?;
    if sp.lambda1.im == 0.0 && sp.lambda2.im == 0.0 {
        pair.eval([sp.lambda1.re, sp.lambda2.re], q)
    } else {
        pair.eval_direct([sp.lambda1, sp.lambda2], q)
    }
}

/// ψ_λ(x) = ∫dy e^{2iλy} ch^{-g}(x/2-y) ch^{-g}(x/2+y), so that
/// Ψ_{λ₁,λ₂}(x₁,x₂) = e^{i(λ₁+λ₂)(x₁+x₂)/2}·ψ_{(λ₁-λ₂)/2}(x₁-x₂).
pub fn psi_factored(lam: f64, x: f64, c: &Coupling, q: &QuadSpec) -> Result<C64> {
    let pair = PairFunction::new(
        Flavour::hyperbolic(c.g),
        C64::new(lam, 0.0),
        C64::new(-lam, 0.0),
        C64::new(1.0, 0.0),
    );
    pair.phi(x, q)
}

/// Leading two-plane-wave form of the hyperbolic Ψ for x₂ - x₁ → ∞.
pub fn psi_asymptotic(sp: &SpectralPoint, pp: &PositionPoint, c: &Coupling) -> Result<C64> {
    let (l1, l2) = (sp.lambda1, sp.lambda2);
    if (l1 - l2).norm() < 1e-12 {
        return Err(Error::Coincident("asymptotic form needs λ₁ ≠ λ₂".into()));
    }
    let g = c.g;
    let i = C64::i();
    let (x1, x2) = (pp.x1, pp.x2);
    let pre = (2.0f64).powf(2.0 * g - 1.0) / complex_gamma(C64::new(g, 0.0))?.re * (-g * (x2 - x1)).exp();
    let t1 = complex_gamma(i * (l2 - l1) * 0.5)? * complex_gamma(i * (l1 - l2) * 0.5 + g)? * (i * (l1 * x1 + l2 * x2)).exp();
    let t2 = complex_gamma(i * (l1 - l2) * 0.5)? * complex_gamma(i * (l2 - l1) * 0.5 + g)? * (i * (l2 * x1 + l1 * x2)).exp();
    Ok((t1 + t2) * pre)
}

/// Fourth-order central-difference step set used by the residual checks.
const D1: [(f64, f64); 4] = [(-2.0, 1.0 / 12.0), (-1.0, -8.0 / 12.0), (1.0, 8.0 / 12.0), (2.0, -1.0 / 12.0)];
const D2: [(f64, f64); 5] = [
    (-2.0, -1.0 / 12.0),
    (-1.0, 16.0 / 12.0),
    (0.0, -30.0 / 12.0),
    (1.0, 16.0 / 12.0),
    (2.0, -1.0 / 12.0),
];

struct Derivatives {
    value: C64,
    d1: [C64; 2],
    d2: [C64; 2],
}

fn derivatives(sp: &SpectralPoint, pp: &PositionPoint, c: &Coupling, h: f64, q: &QuadSpec) -> Result<Derivatives> {
    let pair = hr_pair(sp, c, KernelFamily::Hyperbolic)?;
    let at = |d1: f64, d2: f64| pair.eval([pp.x1 + d1, pp.x2 + d2], q);
    let value = at(0.0, 0.0)?;
    let mut d1 = [C64::new(0.0, 0.0); 2];
    let mut d2 = [C64::new(0.0, 0.0); 2];
    for k in 0..2 {
        let shift = |s: f64| if k == 0 { (s * h, 0.0) } else { (0.0, s * h) };
        for (s, w) in D1 {
            let (a, b) = shift(s);
            d1[k] += at(a, b)? * w;
        }
        for (s, w) in D2 {
            let v = if s == 0.0 {
                value
            } else {
                let (a, b) = shift(s);
                at(a, b)?
            };
            d2[k] += v * w;
        }
        d1[k] /= h;
        d2[k] /= h * h;
    }
    Ok(Derivatives { value, d1, d2 })
}

/// |HΨ - (λ₁² + λ₂²)Ψ| with H = -∂₁² - ∂₂² - 2g·coth(x₁-x₂)(∂₁-∂₂) - 2g²,
/// derivatives by fourth-order central differences with step `h`.
pub fn schrodinger_residual(sp: &SpectralPoint, pp: &PositionPoint, c: &Coupling, h: f64, q: &QuadSpec) -> Result<f64> {
    let x12 = pp.x1 - pp.x2;
    if x12 == 0.0 {
        return Err(Error::Coincident("H is singular at x₁ = x₂".into()));
    }
    let g = c.g;
    let d = derivatives(sp, pp, c, h, q)?;
    let coth = 1.0 / x12.tanh();
    let hpsi = -d.d2[0] - d.d2[1] - (d.d1[0] - d.d1[1]) * (2.0 * g * coth) - d.value * (2.0 * g * g);
    let e = sp.lambda1 * sp.lambda1 + sp.lambda2 * sp.lambda2;
    Ok((hpsi - d.value * e).norm())
}

/// |PΨ - (λ₁ + λ₂)Ψ| with P = -i(∂₁ + ∂₂).
pub fn momentum_residual(sp: &SpectralPoint, pp: &PositionPoint, c: &Coupling, h: f64, q: &QuadSpec) -> Result<f64> {
    let d = derivatives(sp, pp, c, h, q)?;
    let ppsi = -C64::i() * (d.d1[0] + d.d1[1]);
    Ok((ppsi - d.value * (sp.lambda1 + sp.lambda2)).norm())
}

/// Coefficients of the two shift terms of the dual Hamiltonian ℋ.
pub fn dual_coefficients(sp: &SpectralPoint, g: f64) -> Result<(C64, C64)> {
    let (l1, l2) = (sp.lambda1, sp.lambda2);
    if (l1 - l2).norm() < 1e-12 {
        return Err(Error::Coincident("ℋ needs λ₁ ≠ λ₂".into()));
    }
    let b = C64::new(0.0, 2.0 * (g - 1.0));
    Ok(((l1 - l2 + b) / (l2 - l1), (l2 - l1 + b) / (l1 - l2)))
}

/// Residuals (|ℋΨ - (e^{2x₁}+e^{2x₂})Ψ|, |𝒫Ψ - e^{2x₁+2x₂}Ψ|) of the dual
/// difference equations, with e^{-2i∂_λ} realised as evaluation of the
/// spectral-side integral at λ - 2i.
///
/// The γ-contour stays on the real axis; the shift moves the poles of
/// Γ((g - i(λ-γ))/2) across it unless g > 2, so smaller g is refused.
pub fn dual_difference_residual(sp: &SpectralPoint, pp: &PositionPoint, c: &Coupling, q: &QuadSpec) -> Result<(f64, f64)> {
    if !(c.g > 2.0) {
        return Err(Error::Continuation(format!(
            "shift λ → λ - 2i crosses kernel poles for g = {} ≤ 2",
            c.g
        )));
    }
    let (c1, c2) = dual_coefficients(sp, c.g)?;
    let pair = mb_pair(pp, c, KernelFamily::Gamma)?;
    let (l1, l2) = (sp.lambda1, sp.lambda2);
    let shift = C64::new(0.0, -2.0);
    let psi = pair.eval_direct([l1, l2], q)?;
    let s1 = pair.eval_direct([l1 + shift, l2], q)?;
    let s2 = pair.eval_direct([l1, l2 + shift], q)?;
    let s12 = pair.eval_direct([l1 + shift, l2 + shift], q)?;
    let (e1, e2) = ((2.0 * pp.x1).exp(), (2.0 * pp.x2).exp());
    let h = (s1 * c1 + s2 * c2 - psi * (e1 + e2)).norm();
    let p = (s12 - psi * (e1 * e2)).norm();
    Ok((h, p))
}

/// Sutherland-gauge wave function sh^g|x₁-x₂|·Ψ.
pub fn sutherland_gauge(sp: &SpectralPoint, pp: &PositionPoint, c: &Coupling, q: &QuadSpec) -> Result<C64> {
    let u = pp.x1 - pp.x2;
    if u == 0.0 {
        return Ok(C64::new(0.0, 0.0));
    }
    Ok(psi_HR(sp, pp, c, KernelFamily::Hyperbolic, q)? * (c.g * ln_sh_abs(u)).exp())
}

/// g = 1 closed form ψ_λ(x) = 2π·sin(λx)/(sh x·sh πλ), with its removable
/// limits at x = 0 and λ = 0.
pub fn psi_factored_g1(lam: f64, x: f64) -> f64 {
    // 2π·sin(λx)/(sh x·sh πλ) = 2·sinc(λx)/(shc(x)·shc(πλ))
    let shc = |t: f64| if t == 0.0 { 1.0 } else { t.sinh() / t };
    let sinc = |t: f64| if t == 0.0 { 1.0 } else { t.sin() / t };
    2.0 * sinc(lam * x) / (shc(x) * shc(PI * lam))
}

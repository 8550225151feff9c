//! Pointwise application of the n = 1 and n = 2 integral operators.
//!
//! For a family with kernel K, measure μ, phase scale σ and weight w per
//! integration variable:
//!
//! * [Q₁(λ) f](x)       = w ∫ dy e^{iσλ(x-y)} K(x-y) f(y)
//! * [Q₂(λ) f](x₁,x₂)   = w² ∫∫ dy μ(y₁-y₂) e^{iσλ(x₁+x₂-y₁-y₂)} ∏ K(x_i-y_k) f(y₁,y₂)
//! * [Λ₂(λ) f](x₁,x₂)   = w ∫ dy e^{iσλ(x₁+x₂-y)} K(x₁-y) K(x₂-y) f(y)
//!
//! Hyperbolic: K = ch^{-g}, σ = w = 1. Gamma (the hatted operators acting on
//! spectral variables): K = K̂, σ = 1, w = 1/(2π). Relativistic: K = K_h,
//! σ = 2π/(ω₁ω₂), w = 1, with h = g for the hatted operator and h = g* for the
//! plain one.
//!
//! Two-variable integrals run in centre-of-mass coordinates s = (y₁+y₂)/2,
//! u = y₁ - y₂, which puts the non-smooth point of μ at the end of the
//! u-range and makes the envelope bookkeeping one-dimensional in each
//! variable.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::kernels::{ln_ch, ln_sh_abs, Coupling, Flavour, KernelFamily};
use crate::quad::{integrate_line_with, integrate_plane_with, DecayProfile, LineOptions, QuadSpec};

/// |f(t)| ≲ e^{-pos·(t - center)} for t → +∞ and e^{-neg·(center - t)} for
/// t → -∞. Rates may be zero or negative (growth); `frequency` is the largest
/// oscillation frequency of f, 0 if unknown.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Envelope {
    pub pos: f64,
    pub neg: f64,
    pub center: f64,
    pub frequency: f64,
}

/// Envelope of g(s, u) = f(s + u/2, s - u/2):
/// |g| ≲ e^{-u_rate·|u|}·e^{tilt·s} for |s - center| ≤ |u|/2, with an extra
/// decay at rate `s_decay` beyond that plateau.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairEnvelope {
    pub u_rate: f64,
    pub tilt: f64,
    pub s_decay: f64,
    pub center: f64,
    pub frequency: f64,
}

/// A function supplied to an operator together with its declared envelope.
#[derive(Clone)]
pub enum FunctionHandle {
    /// t ↦ e^{iσℓt}, with σ taken from the operator it is applied to.
    PlaneWave(C64),
    Line {
        f: Arc<dyn Fn(f64) -> C64 + Send + Sync>,
        envelope: Envelope,
    },
    Pair {
        f: Arc<dyn Fn(f64, f64) -> C64 + Send + Sync>,
        envelope: PairEnvelope,
    },
}

impl std::fmt::Debug for FunctionHandle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FunctionHandle::PlaneWave(l) => write!(f, "PlaneWave({l})"),
            FunctionHandle::Line { envelope, .. } => write!(f, "Line({envelope:?})"),
            FunctionHandle::Pair { envelope, .. } => write!(f, "Pair({envelope:?})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorSpec {
    pub family: KernelFamily,
    /// 1 or 2 particles.
    pub arity: usize,
    /// Hatted operator: always true for the gamma family, false for hyperbolic.
    pub dual: bool,
    pub coupling: Coupling,
    pub spectral: C64,
}

impl OperatorSpec {
    pub fn new(family: KernelFamily, arity: usize, coupling: Coupling, spectral: C64) -> Self {
        OperatorSpec {
            family,
            arity,
            dual: family == KernelFamily::Gamma,
            coupling,
            spectral,
        }
    }

    pub fn with_dual(mut self, dual: bool) -> Self {
        self.dual = dual;
        self
    }

    /// Kernel conventions of this operator.
    pub fn flavour(&self) -> Result<Flavour> {
        flavour_for(self.family, self.dual, &self.coupling)
    }
}

pub fn flavour_for(family: KernelFamily, dual: bool, c: &Coupling) -> Result<Flavour> {
    match (family, dual) {
        (KernelFamily::Hyperbolic, false) => Ok(Flavour::hyperbolic(c.g)),
        (KernelFamily::Gamma, true) => Ok(Flavour::gamma(c.g)),
        (KernelFamily::Relativistic, true) => Flavour::relativistic(c.g, &c.periods()?),
        (KernelFamily::Relativistic, false) => Flavour::relativistic(c.gstar()?, &c.periods()?),
        (KernelFamily::Hyperbolic, true) => Err(Error::InvalidParam(
            "the hatted hyperbolic operator is the gamma family".into(),
        )),
        (KernelFamily::Gamma, false) => Err(Error::InvalidParam(
            "gamma-family operators are hatted (dual = true)".into(),
        )),
    }
}

/// First error raised inside an integrand; the integrand sees NaN instead.
#[derive(Default)]
pub(crate) struct Trap(RefCell<Option<Error>>);

impl Trap {
    pub(crate) fn val(&self, r: Result<f64>) -> f64 {
        match r {
            Ok(v) => v,
            Err(e) => {
                self.0.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        }
    }

    pub(crate) fn cval(&self, r: Result<C64>) -> C64 {
        match r {
            Ok(v) => v,
            Err(e) => {
                self.0.borrow_mut().get_or_insert(e);
                C64::new(f64::NAN, f64::NAN)
            }
        }
    }

    pub(crate) fn finish<T>(self, r: Result<T>) -> Result<T> {
        match self.0.into_inner() {
            Some(e) => Err(e),
            None => r,
        }
    }
}

fn require_positive(rate: f64, direction: &'static str) -> Result<f64> {
    if rate > 0.0 {
        Ok(rate)
    } else {
        Err(Error::Divergent { rate, direction })
    }
}

/// Exponential decay rate of the kernel.
pub(crate) fn kernel_rate(fl: &Flavour) -> f64 {
    fl.a
}

/// Envelope amplitude covering the power-law prefactors of the gamma family
/// (|λ|^{g-1} per kernel, |u|^{2-2g} per measure) out to the truncation point
/// implied by `rate`.
pub(crate) fn tail_amplitude(fl: &Flavour, rate: f64, q: &QuadSpec) -> f64 {
    match fl.family {
        KernelFamily::Gamma => {
            let l0 = q.safety * (-(q.abs_tol / 10.0).ln()) / rate;
            (1.0 + l0).powf(2.0 * (fl.h + 1.0))
        }
        _ => 1.0,
    }
}

fn envelope_of(handle: &FunctionHandle, sigma: f64) -> Result<Envelope> {
    match handle {
        FunctionHandle::PlaneWave(l) => Ok(Envelope {
            pos: sigma * l.im,
            neg: -sigma * l.im,
            center: 0.0,
            frequency: sigma * l.re.abs(),
        }),
        FunctionHandle::Line { envelope, .. } => Ok(*envelope),
        FunctionHandle::Pair { .. } => Err(Error::InvalidParam(
            "one-variable operator applied to a two-variable function".into(),
        )),
    }
}

fn eval_line(handle: &FunctionHandle, sigma: f64, t: f64) -> C64 {
    match handle {
        FunctionHandle::PlaneWave(l) => (C64::i() * sigma * l * t).exp(),
        FunctionHandle::Line { f, .. } => f(t),
        FunctionHandle::Pair { .. } => C64::new(f64::NAN, f64::NAN),
    }
}

/// [Q f](at) for the operator described by `spec`.
pub fn apply_Q(spec: &OperatorSpec, f: &FunctionHandle, at: &[f64], q: &QuadSpec) -> Result<C64> {
    let fl = spec.flavour()?;
    match (spec.arity, at) {
        (1, [x]) => q1_at(&fl, spec.spectral, f, *x, q),
        (2, [x1, x2]) => match f {
            FunctionHandle::Pair { f, envelope } => q2_at(&fl, spec.spectral, &**f, envelope, [*x1, *x2], q),
            _ => Err(Error::InvalidParam("Q₂ needs a two-variable function".into())),
        },
        _ => Err(Error::InvalidParam(format!(
            "arity {} does not match {} evaluation coordinates",
            spec.arity,
            at.len()
        ))),
    }
}

/// [Λ₂ f](x₁, x₂).
pub fn apply_Lambda(spec: &OperatorSpec, f: &FunctionHandle, at: [f64; 2], q: &QuadSpec) -> Result<C64> {
    let fl = spec.flavour()?;
    lambda2_at(&fl, spec.spectral, f, at, q)
}

/// Q₁ with prepared kernel conventions.
pub fn q1_at(fl: &Flavour, lam: C64, f: &FunctionHandle, x: f64, q: &QuadSpec) -> Result<C64> {
    let env = envelope_of(f, fl.sigma)?;
    let a = kernel_rate(fl);
    let sl = fl.sigma * lam;
    // |e^{iσλ(x-y)}| = e^{σ·Im λ·(y - x)}
    let pos = require_positive(a - sl.im + env.pos, "+y")?;
    let neg = require_positive(a + sl.im + env.neg, "-y")?;
    let decay = DecayProfile::new(pos, neg, 0.5 * (x + env.center))
        .with_plateau(0.5 * (x - env.center).abs())
        .with_amplitude(tail_amplitude(fl, pos.min(neg), q));
    let opts = LineOptions::frequency(sl.re.abs() + env.frequency).with_breakpoints(&[x]);
    let trap = Trap::default();
    let r = integrate_line_with(
        |y| {
            let lk = trap.val(fl.ln_k(x - y));
            (C64::new(lk, 0.0) + C64::i() * sl * (x - y)).exp() * eval_line(f, fl.sigma, y)
        },
        &decay,
        q,
        &opts,
    );
    Ok(trap.finish(r)?.value * fl.weight)
}

/// Λ₂ with prepared kernel conventions.
pub fn lambda2_at(fl: &Flavour, lam: C64, f: &FunctionHandle, at: [f64; 2], q: &QuadSpec) -> Result<C64> {
    let env = envelope_of(f, fl.sigma)?;
    let a = kernel_rate(fl);
    let sl = fl.sigma * lam;
    let [x1, x2] = at;
    let pos = require_positive(2.0 * a - sl.im + env.pos, "+y")?;
    let neg = require_positive(2.0 * a + sl.im + env.neg, "-y")?;
    let lo = x1.min(x2).min(env.center);
    let hi = x1.max(x2).max(env.center);
    let decay = DecayProfile::new(pos, neg, 0.5 * (lo + hi))
        .with_plateau(0.5 * (hi - lo))
        .with_amplitude(tail_amplitude(fl, pos.min(neg), q));
    let opts = LineOptions::frequency(sl.re.abs() + env.frequency).with_breakpoints(&[x1, x2]);
    let trap = Trap::default();
    let r = integrate_line_with(
        |y| {
            let lk = trap.val(fl.ln_k(x1 - y)) + trap.val(fl.ln_k(x2 - y));
            (C64::new(lk, 0.0) + C64::i() * sl * (x1 + x2 - y)).exp() * eval_line(f, fl.sigma, y)
        },
        &decay,
        q,
        &opts,
    );
    Ok(trap.finish(r)?.value * fl.weight)
}

/// Q₂ on a general two-variable function, as an iterated integral over
/// u ∈ (0, ∞) (outer, symmetrized) and s ∈ ℝ (inner).
pub fn q2_at(
    fl: &Flavour,
    lam: C64,
    f: &(dyn Fn(f64, f64) -> C64 + Send + Sync),
    env: &PairEnvelope,
    at: [f64; 2],
    q: &QuadSpec,
) -> Result<C64> {
    let a = kernel_rate(fl);
    let sl = fl.sigma * lam;
    let [x1, x2] = at;
    let xc = 0.5 * (x1 + x2);
    let dx = 0.5 * (x1 - x2).abs();
    // s-dependence of e^{iσλ(x₁+x₂-2s)} is e^{2σ·Im λ·s}
    let tau = 2.0 * sl.im + env.tilt;
    let u_rate = require_positive(env.u_rate - 0.5 * tau.abs(), "|u|")?;
    let s_pos = require_positive(4.0 * a - tau + env.s_decay, "+s")?;
    let s_neg = require_positive(4.0 * a + tau + env.s_decay, "-s")?;
    let freq = 2.0 * sl.re.abs() + env.frequency;
    let outer = DecayProfile::symmetric(u_rate, 0.0)
        .with_plateau(2.0 * dx)
        .with_amplitude(tail_amplitude(fl, u_rate, q));
    let s_amp = tail_amplitude(fl, s_pos.min(s_neg), q);
    let outer_opts = LineOptions::frequency(freq).half_line(0.0).with_breakpoints(&[2.0 * dx]);
    let trap = Trap::default();
    let integrand = |u: f64, s: f64| -> C64 {
        let mut l = trap.val(fl.ln_mu(u));
        for (y1, y2) in [(s + 0.5 * u, s - 0.5 * u)] {
            l += trap.val(fl.ln_k(x1 - y1)) + trap.val(fl.ln_k(x1 - y2));
            l += trap.val(fl.ln_k(x2 - y1)) + trap.val(fl.ln_k(x2 - y2));
        }
        let e = (C64::new(l, 0.0) + C64::i() * sl * (x1 + x2 - 2.0 * s)).exp();
        e * (f(s + 0.5 * u, s - 0.5 * u) + f(s - 0.5 * u, s + 0.5 * u))
    };
    let r = integrate_plane_with(
        |u, s| if u == 0.0 { C64::new(0.0, 0.0) } else { integrand(u, s) },
        (&outer, &outer_opts),
        |u| {
            let lo = (xc - dx - 0.5 * u).min(env.center - 0.5 * u);
            let hi = (xc + dx + 0.5 * u).max(env.center + 0.5 * u);
            let d = DecayProfile::new(s_pos, s_neg, 0.5 * (lo + hi))
                .with_plateau(0.5 * (hi - lo))
                .with_amplitude(s_amp);
            let bps = [x1 - 0.5 * u, x1 + 0.5 * u, x2 - 0.5 * u, x2 + 0.5 * u];
            (d, LineOptions::frequency(freq).with_breakpoints(&bps))
        },
        q,
    );
    Ok(trap.finish(r)?.value * fl.weight * fl.weight)
}

/// Composed kernel of two n = 1 operators:
/// 𝒬(x, z; λ, μ) = w ∫ ds e^{iσλ(x-s)} K(x-s) e^{iσμ(s-z)} K(s-z).
///
/// With `substituted`, the integration variable is t = x + z - s; the value is
/// the same and the integrand is literally that of 𝒬(x, z; μ, λ).
pub fn qq_kernel1(fl: &Flavour, lam: C64, mu: C64, x: f64, z: f64, substituted: bool, q: &QuadSpec) -> Result<C64> {
    let a = kernel_rate(fl);
    let d = fl.sigma * (lam - mu);
    if !(d.im.abs() < 2.0 * fl.a) {
        return Err(Error::StripViolation {
            re: d.im,
            lo: -2.0 * fl.a,
            hi: 2.0 * fl.a,
        });
    }
    let pos = require_positive(2.0 * a - d.im.abs(), "+s")?;
    let decay = DecayProfile::symmetric(pos, 0.5 * (x + z))
        .with_plateau(0.5 * (x - z).abs())
        .with_amplitude(tail_amplitude(fl, pos, q));
    let opts = LineOptions::frequency(fl.sigma * (lam.re.abs() + mu.re.abs())).with_breakpoints(&[x, z]);
    let (l1, l2) = if substituted { (mu, lam) } else { (lam, mu) };
    let trap = Trap::default();
    let r = integrate_line_with(
        |s| {
            let lk = trap.val(fl.ln_k(x - s)) + trap.val(fl.ln_k(s - z));
            (C64::new(lk, 0.0) + C64::i() * fl.sigma * (l1 * (x - s) + l2 * (s - z))).exp()
        },
        &decay,
        q,
        &opts,
    );
    Ok(trap.finish(r)?.value * fl.weight)
}

/// Composed kernel of two n = 2 operators,
/// 𝒬(x, z; λ, ρ) = ∫∫ dy Q(x, y; λ) Q(y, z; ρ), each Q carrying the measure
/// of its own integration variables and the weight w².
pub fn qq_kernel2(fl: &Flavour, lam: C64, rho: C64, x: [f64; 2], z: [f64; 2], q: &QuadSpec) -> Result<C64> {
    let a = kernel_rate(fl);
    let d = fl.sigma * (lam - rho);
    if !(d.im.abs() < 2.0 * fl.a) {
        return Err(Error::StripViolation {
            re: d.im,
            lo: -2.0 * fl.a,
            hi: 2.0 * fl.a,
        });
    }
    let sr = fl.sigma * rho;
    let trap = Trap::default();
    let mu_z = trap.val(fl.ln_mu(z[0] - z[1]));
    let [z1, z2] = z;
    let second = move |y1: f64, y2: f64| -> C64 {
        let l = fl.ln_k(y1 - z1).unwrap_or(f64::NAN)
            + fl.ln_k(y1 - z2).unwrap_or(f64::NAN)
            + fl.ln_k(y2 - z1).unwrap_or(f64::NAN)
            + fl.ln_k(y2 - z2).unwrap_or(f64::NAN)
            + mu_z;
        (C64::new(l, 0.0) + C64::i() * sr * (y1 + y2 - z1 - z2)).exp()
    };
    let env = PairEnvelope {
        u_rate: 2.0 * a,
        tilt: -2.0 * sr.im,
        s_decay: 0.0,
        center: 0.5 * (z1 + z2),
        frequency: 2.0 * sr.re.abs(),
    };
    let r = q2_at(fl, lam, &second, &env, x, q).map(|v| v * fl.weight * fl.weight);
    trap.finish(r)
}

/// e^{g·y₁ + iλy₂}·Q(x, y; λ) / Λ(x, y₁; λ - ig) for the hyperbolic n = 2
/// kernels, which tends to 1 as y₂ → ∞.
pub fn q_lim_ratio(g: f64, x: [f64; 2], y1: f64, y2: f64, lam: f64) -> C64 {
    let [x1, x2] = x;
    let i = C64::i();
    let lq = -g * (ln_ch(x1 - y1) + ln_ch(x1 - y2) + ln_ch(x2 - y1) + ln_ch(x2 - y2)) + 2.0 * g * ln_sh_abs(y1 - y2);
    let lq = C64::new(lq + g * y1, 0.0) + i * lam * (x1 + x2 - y1 - y2) + i * lam * y2;
    let ls = C64::new(lam, -g);
    let ll = C64::new(-g * (ln_ch(x1 - y1) + ln_ch(x2 - y1)), 0.0) + i * ls * (x1 + x2 - y1);
    (lq - ll).exp()
}

/// Shift s of the exchange relation in spectral units: g (hyperbolic),
/// π/2 (gamma), g*/2 (relativistic hatted).
pub fn exchange_shift(fl: &Flavour) -> f64 {
    fl.a / fl.sigma
}

/// Both sides of the two-particle exchange relation
/// Q₂(λ)·Λ₂(ρ) = 2·q(λ, ρ)·Λ₂(ρ)·Q₁(λ) on the plane wave e^{iσℓ·} at `at`.
///
/// Λ₂(ρ) applied to the plane wave is the pair eigenfunction with labels
/// (ℓ, ρ); Q₁(λ) multiplies the plane wave by q(λ, ℓ). The returned pair is
/// (Q₂(λ)[Λ₂(ρ)e^{iσℓ·}], 2·q(λ, ρ)·q(λ, ℓ)·[Λ₂(ρ)e^{iσℓ·}]).
///
/// The composition Q₂Λ₂ converges absolutely for σ·Im(λ - ρ) ∈ (-a, a),
/// where a is the kernel decay rate. In terms of the spectral parameter ρ'
/// = ρ + i·s of the underlying three-operator identity, with s the family
/// shift of [`exchange_shift`], this is Im(λ - ρ') ∈ (-2s, 0).
pub fn qlambda_exchange_check(
    family: KernelFamily,
    lam: C64,
    rho: C64,
    label: C64,
    at: [f64; 2],
    c: &Coupling,
    q: &QuadSpec,
) -> Result<(C64, C64)> {
    let fl = flavour_for(family, family != KernelFamily::Hyperbolic, c)?;
    let s = exchange_shift(&fl);
    let shifted = rho + C64::new(0.0, s);
    let im = (lam - shifted).im;
    if !(im > -2.0 * s && im < 0.0) {
        return Err(Error::StripViolation {
            re: im,
            lo: -2.0 * s,
            hi: 0.0,
        });
    }
    let pair = crate::wavefn::PairFunction::new(fl.clone(), label, rho, C64::new(1.0, 0.0));
    let lhs = pair.apply_q2(lam, at, q)?;
    let psi = pair.eval(at, q)?;
    let rhs = fl.eigenvalue(lam, rho)? * fl.eigenvalue(lam, label)? * psi * 2.0;
    Ok((lhs, rhs))
}

/// 2π/(ω₁ω₂) or 1, the phase scale for a family.
pub fn phase_scale(family: KernelFamily, c: &Coupling) -> Result<f64> {
    match family {
        KernelFamily::Relativistic => Ok(2.0 * PI / c.periods()?.product()),
        _ => Ok(1.0),
    }
}

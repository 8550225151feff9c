//! Complex gamma function and the double sine S₂(z|ω₁,ω₂).
//!
//! Conventions: S₂ has zeros at z = -m·ω₁ - k·ω₂ (m, k ≥ 0) and poles at
//! z = m·ω₁ + k·ω₂ (m, k ≥ 1); it satisfies
//!
//! * S₂(z)·S₂(W - z) = 1 with W = ω₁ + ω₂,
//! * S₂(z) / S₂(z + ω₁) = 2 sin(πz/ω₂) and the same with ω₁ ↔ ω₂,
//! * S₂(z) → exp(±iπ·B₂₂(z)/2) as Im z → ±∞.
//!
//! Inside the strip 0 < Re z < W it has the integral representation
//! ln S₂(z) = ∫₀^∞ dt/(2t) · [sh((2z - W)t) / (sh(ω₁t)·sh(ω₂t)) - (2z - W)/(ω₁ω₂t)].

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::quad::{integrate_interval, LineOptions, QuadSpec};

/// Number of recentering steps above which the evaluation is flagged as
/// ill-conditioned.
pub const MAX_QUIET_STEPS: usize = 64;

const LN_2PI_HALF: f64 = 0.918_938_533_204_672_8;

/// Lanczos coefficients, g = 7, n = 9.
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Quasi-periods of the double sine. Both are positive.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Periods {
    pub w1: f64,
    pub w2: f64,
}

impl Periods {
    pub fn new(w1: f64, w2: f64) -> Result<Self> {
        if !(w1 > 0.0 && w2 > 0.0 && w1.is_finite() && w2.is_finite()) {
            return Err(Error::InvalidPeriods { w1, w2 });
        }
        Ok(Periods { w1, w2 })
    }

    /// W = ω₁ + ω₂.
    pub fn sum(&self) -> f64 {
        self.w1 + self.w2
    }

    pub fn product(&self) -> f64 {
        self.w1 * self.w2
    }

    pub fn min(&self) -> f64 {
        self.w1.min(self.w2)
    }

    pub fn max(&self) -> f64 {
        self.w1.max(self.w2)
    }

    pub fn swapped(&self) -> Periods {
        Periods {
            w1: self.w2,
            w2: self.w1,
        }
    }

    pub fn scaled(&self, c: f64) -> Periods {
        Periods {
            w1: self.w1 * c,
            w2: self.w2 * c,
        }
    }

    fn check(&self) -> Result<()> {
        Periods::new(self.w1, self.w2).map(|_| ())
    }
}

/// ln(2 sin w), accurate for large |Im w|. The imaginary part is some
/// argument of 2 sin w, not necessarily the principal one.
pub fn ln_2sin(w: C64) -> C64 {
    let i = C64::i();
    if w.im > 1.0 {
        // 2 sin w = i·e^{-iw}·(1 - e^{2iw})
        C64::new(0.0, PI / 2.0) - i * w + (C64::new(1.0, 0.0) - (i * w * 2.0).exp()).ln()
    } else if w.im < -1.0 {
        C64::new(0.0, -PI / 2.0) + i * w + (C64::new(1.0, 0.0) - (-i * w * 2.0).exp()).ln()
    } else {
        (w.sin() * 2.0).ln()
    }
}

fn is_gamma_pole(z: C64) -> bool {
    if z.im != 0.0 || z.re > 0.0 {
        return false;
    }
    let n = z.re.round();
    (z.re - n).abs() <= 1e-14 * n.abs().max(1.0)
}

/// ln Γ(z) via Lanczos for Re z ≥ 1/2 and reflection otherwise.
///
/// The real part is ln|Γ(z)|; the imaginary part is an argument of Γ(z)
/// that may differ from the principal log-gamma branch by a multiple of 2π.
pub fn ln_gamma(z: C64) -> Result<C64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::InvalidParam(format!("non-finite gamma argument {z}")));
    }
    if is_gamma_pole(z) {
        return Err(Error::GammaPole { re: z.re, im: z.im });
    }
    Ok(ln_gamma_unchecked(z))
}

fn ln_gamma_unchecked(z: C64) -> C64 {
    if z.re < 0.5 {
        // Γ(z)Γ(1-z) = π / sin(πz)
        let ln_sin = ln_2sin(z * PI) - std::f64::consts::LN_2;
        return C64::new(PI.ln(), 0.0) - ln_sin - ln_gamma_unchecked(C64::new(1.0, 0.0) - z);
    }
    let z = z - 1.0;
    let mut x = C64::new(LANCZOS[0], 0.0);
    for (k, &c) in LANCZOS.iter().enumerate().skip(1) {
        x += c / (z + k as f64);
    }
    let t = z + 7.5;
    (z + 0.5) * t.ln() - t + LN_2PI_HALF + x.ln()
}

/// Γ(z) for complex z; errors at poles and when |Γ(z)| overflows.
pub fn complex_gamma(z: C64) -> Result<C64> {
    let lg = ln_gamma(z)?;
    if lg.re > 709.0 {
        return Err(Error::Overflow { ln_value: lg.re });
    }
    Ok(lg.exp())
}

/// 1/Γ(z), zero at the poles of Γ.
pub fn recip_gamma(z: C64) -> C64 {
    if is_gamma_pole(z) {
        return C64::new(0.0, 0.0);
    }
    (-ln_gamma_unchecked(z)).exp()
}

fn ln_s2_integrand(t: f64, a: C64, p: &Periods) -> C64 {
    let wp = p.product();
    let big = a.norm().max(p.max());
    if big * t < 0.2 {
        // (sh(at)/(at)) / (sh(ω₁t)/(ω₁t) · sh(ω₂t)/(ω₂t)) - 1, as a series in t²
        return a / (2.0 * wp) * small_t_series(t * t, a, p);
    }
    let w = p.sum();
    let num = ((a - w) * t).exp() - (-(a + w) * t).exp();
    let den = (-2.0 * p.w1 * t).exp_m1() * (-2.0 * p.w2 * t).exp_m1();
    (num * 2.0 / den - a / (wp * t)) / (2.0 * t)
}

// Returns (C(u) - 1)/u where C(u) = A(u)/(B₁(u)B₂(u)), A(u) = sh(a√u)/(a√u), etc.
fn small_t_series(u: f64, a: C64, p: &Periods) -> C64 {
    const K: usize = 10;
    let mut fact = [1.0f64; K];
    let mut f = 1.0;
    for (k, slot) in fact.iter_mut().enumerate() {
        if k > 0 {
            f *= ((2 * k) * (2 * k + 1)) as f64;
        }
        *slot = f;
    }
    let a2 = a * a;
    let mut ca = [C64::new(0.0, 0.0); K];
    let mut b1 = [0.0f64; K];
    let mut b2 = [0.0f64; K];
    let (mut pa, mut p1, mut p2) = (C64::new(1.0, 0.0), 1.0, 1.0);
    for k in 0..K {
        ca[k] = pa / fact[k];
        b1[k] = p1 / fact[k];
        b2[k] = p2 / fact[k];
        pa *= a2;
        p1 *= p.w1 * p.w1;
        p2 *= p.w2 * p.w2;
    }
    let mut d = [0.0f64; K];
    for i in 0..K {
        for j in 0..K - i {
            d[i + j] += b1[i] * b2[j];
        }
    }
    let mut c = [C64::new(0.0, 0.0); K];
    for k in 0..K {
        let mut acc = ca[k];
        for j in 1..=k {
            acc -= c[k - j] * d[j];
        }
        c[k] = acc;
    }
    let mut s = C64::new(0.0, 0.0);
    for k in (1..K).rev() {
        s = s * u + c[k];
    }
    s
}

/// ln S₂(z) from the integral representation; requires 0 < Re z < W.
pub fn log_double_sine(z: C64, p: &Periods) -> Result<C64> {
    p.check()?;
    let w = p.sum();
    if !(z.re > 0.0 && z.re < w) {
        return Err(Error::StripViolation {
            re: z.re,
            lo: 0.0,
            hi: w,
        });
    }
    let a = z * 2.0 - w;
    let delta = w - a.re.abs();
    // exp(-36.8) ≈ 1e-16 bounds the dropped tail of the decaying part
    let t_max = 36.8 / delta;
    let spec = QuadSpec {
        rel_tol: 1e-14,
        abs_tol: 1e-15,
        max_nodes: 400_000,
        safety: 1.0,
    };
    let opts = LineOptions::frequency(a.im.abs()).with_breakpoints(&[0.2 / a.norm().max(p.max())]);
    let r = integrate_interval(|t| ln_s2_integrand(t, a, p), 0.0, t_max, &spec, &opts)?;
    // the subtracted term integrates to -a/(2ω₁ω₂T) over (T, ∞)
    Ok(r.value - a / (2.0 * p.product() * t_max))
}

/// Lattice indices (m, k) with x = m·ω₁ + k·ω₂ (m, k ≥ `min`), if any.
fn lattice_index(x: f64, p: &Periods, min: u32) -> Option<(u32, u32)> {
    let tol = 1e-12 * x.abs().max(1.0);
    let m_max = (x / p.w1).floor() as i64 + 1;
    for m in min as i64..=m_max.max(min as i64) {
        let rest = x - m as f64 * p.w1;
        let k = (rest / p.w2).round();
        if k >= min as f64 && (rest - k * p.w2).abs() <= tol {
            return Some((m as u32, k as u32));
        }
    }
    None
}

/// Zero of S₂ at z = -(m·ω₁ + k·ω₂), m, k ≥ 0.
pub fn zero_index(z: C64, p: &Periods) -> Option<(u32, u32)> {
    if z.im.abs() > 1e-12 * z.re.abs().max(1.0) || z.re > 1e-12 {
        return None;
    }
    lattice_index(-z.re, p, 0)
}

/// Pole of S₂ at z = m·ω₁ + k·ω₂, m, k ≥ 1.
pub fn pole_index(z: C64, p: &Periods) -> Option<(u32, u32)> {
    if z.im.abs() > 1e-12 * z.re.abs().max(1.0) || z.re < p.sum() * (1.0 - 1e-12) {
        return None;
    }
    lattice_index(z.re, p, 1)
}

/// ln S₂(z) anywhere off the zero/pole lattice.
///
/// Arguments are moved into the window [(W - ω_max)/2, (W + ω_max)/2] by
/// repeated shifts of the larger period; each shift contributes one
/// ln(2 sin) term. More than [`MAX_QUIET_STEPS`] shifts logs a warning.
pub fn ln_double_sine(z: C64, p: &Periods) -> Result<C64> {
    p.check()?;
    if let Some((m, k)) = zero_index(z, p) {
        return Err(Error::InvalidParam(format!(
            "ln S₂ at the zero -({m}ω₁ + {k}ω₂)"
        )));
    }
    if let Some((m, k)) = pole_index(z, p) {
        return Err(Error::Pole { m, k });
    }
    let (wa, wb) = (p.max(), p.min());
    let lo = 0.5 * (p.sum() - wa);
    let hi = 0.5 * (p.sum() + wa);
    let mut acc = C64::new(0.0, 0.0);
    let mut zc = z;
    let mut steps = 0usize;
    if z.re < lo {
        let n = ((lo - z.re) / wa).ceil() as usize;
        for _ in 0..n {
            // S(z) = S(z + ω_a)·2 sin(πz/ω_b)
            acc += ln_2sin(zc * PI / wb);
            zc += wa;
        }
        steps = n;
    } else if z.re > hi {
        let n = ((z.re - hi) / wa).ceil() as usize;
        for _ in 0..n {
            zc -= wa;
            acc -= ln_2sin(zc * PI / wb);
        }
        steps = n;
    }
    if steps > MAX_QUIET_STEPS {
        log::warn!("double sine at {z}: {steps} recentering steps, result may be ill-conditioned");
    }
    Ok(acc + log_double_sine(zc, p)?)
}

/// S₂(z); exact zero on the zero lattice, [`Error::Pole`] on the pole lattice.
pub fn double_sine(z: C64, p: &Periods) -> Result<C64> {
    p.check()?;
    if zero_index(z, p).is_some() {
        return Ok(C64::new(0.0, 0.0));
    }
    let l = ln_double_sine(z, p)?;
    if l.re > 709.0 {
        return Err(Error::Overflow { ln_value: l.re });
    }
    Ok(l.exp())
}

/// S₂(z)/z for |z| ≤ ω_min/10, finite at z = 0 where it equals 2π/√(ω₁ω₂).
pub fn double_sine_near_zero(z: C64, p: &Periods) -> Result<C64> {
    p.check()?;
    if z.norm() > 0.1 * p.min() {
        return Err(Error::InvalidParam(format!(
            "|z| = {} exceeds ω_min/10 = {}",
            z.norm(),
            0.1 * p.min()
        )));
    }
    let (wa, wb) = (p.max(), p.min());
    let w = z * (PI / wb);
    // 2 sin(w)/z, with the series near the origin
    let sinc = if w.norm() < 1e-4 {
        (C64::new(1.0, 0.0) - w * w / 6.0) * (2.0 * PI / wb)
    } else {
        w.sin() * 2.0 / z
    };
    Ok(double_sine(z + wa, p)? * sinc)
}

/// B₂₂(z|ω) = (z - W/2)²/(ω₁ω₂) - (ω₁² + ω₂²)/(12ω₁ω₂).
pub fn b22(z: C64, p: &Periods) -> C64 {
    let c = z - p.sum() / 2.0;
    c * c / p.product() - (p.w1 * p.w1 + p.w2 * p.w2) / (12.0 * p.product())
}

/// Leading behaviour exp(sign(Im z)·iπ·B₂₂(z)/2) as |Im z| → ∞.
pub fn double_sine_asymptotic(z: C64, p: &Periods) -> C64 {
    let s = if z.im >= 0.0 { 1.0 } else { -1.0 };
    (C64::i() * (s * PI / 2.0) * b22(z, p)).exp()
}

//! Kernels, measures and eigenvalues of the three operator families.
//!
//! | family       | kernel                                   | two-particle measure                     |
//! |--------------|------------------------------------------|------------------------------------------|
//! | hyperbolic   | K(x) = ch^{-g}(x)                        | sh^{2g}\|x₁ - x₂\|                         |
//! | gamma        | K̂(λ) = Γ((g±iλ)/2) / (2^{1-g}Γ(g))       | [2^{1-g}Γ(g)]² / (Γ(g±iγ/2)Γ(±iγ/2))      |
//! | relativistic | K_g(λ) = 1/(S₂(g/2+iλ)·S₂(g/2-iλ))       | S₂(g±iγ)·S₂(±iγ)                          |
//!
//! The normalizations are those under which the two-particle exchange and
//! eigenvalue relations hold with the constant 2 (no n! or extra coupling
//! dependent constants in front of the operators).

use std::f64::consts::{LN_2, PI};
use std::sync::Arc;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::cheb::ChebTable;
use crate::error::{Error, Result};
use crate::special_fn::{double_sine, ln_double_sine, ln_gamma, Periods};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelFamily {
    Hyperbolic,
    Gamma,
    Relativistic,
}

impl KernelFamily {
    pub fn name(&self) -> &'static str {
        match self {
            KernelFamily::Hyperbolic => "hyperbolic",
            KernelFamily::Gamma => "gamma",
            KernelFamily::Relativistic => "relativistic",
        }
    }
}

impl std::str::FromStr for KernelFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hyperbolic" => Ok(KernelFamily::Hyperbolic),
            "gamma" => Ok(KernelFamily::Gamma),
            "relativistic" => Ok(KernelFamily::Relativistic),
            _ => Err(Error::InvalidParam(format!("unknown kernel family `{s}`"))),
        }
    }
}

/// Coupling constant, with periods for the relativistic forms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coupling {
    pub g: f64,
    pub periods: Option<Periods>,
}

impl Coupling {
    pub fn new(g: f64, periods: Option<Periods>) -> Result<Self> {
        if !(g > 0.0 && g.is_finite()) {
            return Err(Error::InvalidParam(format!("coupling g = {g} must be positive")));
        }
        if let Some(p) = periods {
            Periods::new(p.w1, p.w2)?;
            if !(g < p.sum()) {
                return Err(Error::InvalidParam(format!(
                    "coupling g = {g} must lie below ω₁ + ω₂ = {}",
                    p.sum()
                )));
            }
        }
        Ok(Coupling { g, periods })
    }

    pub fn hyperbolic(g: f64) -> Result<Self> {
        Coupling::new(g, None)
    }

    pub fn relativistic(g: f64, w1: f64, w2: f64) -> Result<Self> {
        Coupling::new(g, Some(Periods::new(w1, w2)?))
    }

    pub fn periods(&self) -> Result<Periods> {
        self.periods
            .ok_or_else(|| Error::InvalidParam("relativistic form needs periods".into()))
    }

    /// g* = ω₁ + ω₂ - g.
    pub fn gstar(&self) -> Result<f64> {
        Ok(self.periods()?.sum() - self.g)
    }

    /// The same periods with g replaced by g*.
    pub fn dual(&self) -> Result<Coupling> {
        Coupling::new(self.gstar()?, self.periods)
    }
}

/// ln ch x for real x, stable for large |x|.
pub(crate) fn ln_ch(x: f64) -> f64 {
    let a = x.abs();
    a + (-2.0 * a).exp().ln_1p() - LN_2
}

/// ln sh|x|; -∞ at 0.
pub(crate) fn ln_sh_abs(x: f64) -> f64 {
    let a = x.abs();
    if a == 0.0 {
        return f64::NEG_INFINITY;
    }
    a + (-(-2.0 * a).exp_m1()).ln() - LN_2
}

/// ln ch z on the strip |Im z| < π/2, the branch that is real on the real axis.
pub(crate) fn ln_ch_complex(z: C64) -> C64 {
    let s = if z.re >= 0.0 { 1.0 } else { -1.0 };
    let w = z * s;
    w + (C64::new(1.0, 0.0) + (-w * 2.0).exp()).ln() - LN_2
}

/// K(x) = 1/ch^g(x).
pub fn kernel_K(x: f64, c: &Coupling) -> f64 {
    (-c.g * ln_ch(x)).exp()
}

/// K(z) = exp(-g·ln ch z) for complex z with |Im z| < π/2.
pub fn kernel_K_complex(z: C64, g: f64) -> Result<C64> {
    if z.im.abs() >= PI / 2.0 {
        return Err(Error::Continuation(format!(
            "ch^(-g) continued to Im z = {} leaves the strip |Im z| < π/2",
            z.im
        )));
    }
    Ok((-ln_ch_complex(z) * g).exp())
}

fn check_hatk_pole(lam: C64, g: f64) -> Result<()> {
    // poles at ±iλ = g + 2k
    for s in [1.0, -1.0] {
        let w = C64::i() * lam * s;
        let k = (w.re - g) / 2.0;
        if w.im.abs() < 1e-14 && k >= -1e-14 && (k - k.round()).abs() < 1e-12 {
            return Err(Error::GammaPole { re: lam.re, im: lam.im });
        }
    }
    Ok(())
}

/// ln K̂(λ) for complex λ.
pub fn ln_hatK(lam: C64, g: f64) -> Result<C64> {
    check_hatk_pole(lam, g)?;
    let i = C64::i();
    let norm = (1.0 - g) * LN_2 + ln_gamma(C64::new(g, 0.0))?.re;
    Ok(ln_gamma((i * lam + g) * 0.5)? + ln_gamma((-i * lam + g) * 0.5)? - norm)
}

/// K̂(λ) = Γ((g+iλ)/2)Γ((g-iλ)/2) / (2^{1-g}Γ(g)).
pub fn kernel_hatK(lam: C64, c: &Coupling) -> Result<C64> {
    Ok(ln_hatK(lam, c.g)?.exp())
}

/// K_g(λ) = 1/(S₂(g/2+iλ)·S₂(g/2-iλ)) with the coupling's own g.
pub fn kernel_Kg(lam: C64, c: &Coupling) -> Result<C64> {
    let p = c.periods()?;
    let i = C64::i();
    let a = double_sine(i * lam + c.g / 2.0, &p)?;
    let b = double_sine(-i * lam + c.g / 2.0, &p)?;
    let d = a * b;
    if d.norm() == 0.0 {
        return Err(Error::Coincident(format!("K_g has a pole at λ = {lam}")));
    }
    Ok(C64::new(1.0, 0.0) / d)
}

/// ln K_g(u) for real u: -2·Re ln S₂(g/2 + iu).
pub fn ln_kernel_Kg_real(u: f64, g: f64, p: &Periods) -> Result<f64> {
    Ok(-2.0 * ln_double_sine(C64::new(g / 2.0, u), p)?.re)
}

fn ln_gamma_measure(u: f64, g: f64) -> Result<f64> {
    if u == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    let y = 0.5 * u.abs();
    let norm = 2.0 * ((1.0 - g) * LN_2 + ln_gamma(C64::new(g, 0.0))?.re);
    // |Γ(iy)|² = π/(y·sh(πy))
    let ln_gi2 = PI.ln() - y.ln() - ln_sh_abs(PI * y);
    Ok(norm - 2.0 * ln_gamma(C64::new(g, y))?.re - ln_gi2)
}

fn ln_rel_measure(u: f64, g: f64, p: &Periods) -> Result<f64> {
    if u == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    // S₂(iu)S₂(-iu) = 4 sh(πu/ω₁) sh(πu/ω₂)
    Ok(2.0 * LN_2
        + ln_sh_abs(PI * u / p.w1)
        + ln_sh_abs(PI * u / p.w2)
        + 2.0 * ln_double_sine(C64::new(g, u), p)?.re)
}

/// Two-particle measure μ(a, b); exact 0 at a = b.
pub fn measure(kind: KernelFamily, a: f64, b: f64, c: &Coupling) -> Result<C64> {
    let u = a - b;
    if u == 0.0 {
        return Ok(C64::new(0.0, 0.0));
    }
    let l = match kind {
        KernelFamily::Hyperbolic => 2.0 * c.g * ln_sh_abs(u),
        KernelFamily::Gamma => ln_gamma_measure(u, c.g)?,
        KernelFamily::Relativistic => ln_rel_measure(u, c.g, &c.periods()?)?,
    };
    Ok(C64::new(l.exp(), 0.0))
}

/// Eigenvalue of the n = 1 operator on a plane wave:
/// hyperbolic K̂(λ - λ₁), gamma K(x - x₁), relativistic √(ω₁ω₂)·S₂(g)·K_g(λ - ρ).
///
/// The relativistic value belongs to the operator with kernel K_{g*}; for the
/// dual operator with kernel K_g pass [`Coupling::dual`].
pub fn eigenvalue(kind: KernelFamily, spectral: C64, label: C64, c: &Coupling) -> Result<C64> {
    let d = spectral - label;
    match kind {
        KernelFamily::Hyperbolic => kernel_hatK(d, c),
        KernelFamily::Gamma => kernel_K_complex(d, c.g),
        KernelFamily::Relativistic => Ok(kernel_Kg(d, c)? * rel_eigen_prefactor(c.g, &c.periods()?)?),
    }
}

/// Large-μ form of K̂(γ - μ): (2π/Γ(g))·μ^{g-1}·e^{π(γ-μ)/2}.
pub fn hatK_asymptotic(gamma: f64, mu: f64, c: &Coupling) -> C64 {
    let lg = ln_gamma(C64::new(c.g, 0.0)).map(|v| v.re).unwrap_or(f64::NAN);
    let l = (2.0 * PI).ln() - lg + (c.g - 1.0) * mu.ln() + PI * (gamma - mu) / 2.0;
    C64::new(l.exp(), 0.0)
}

/// √(ω₁ω₂)·S₂(g) for the coupling's g.
pub(crate) fn rel_eigen_prefactor(g: f64, p: &Periods) -> Result<f64> {
    Ok(p.product().sqrt() * double_sine(C64::new(g, 0.0), p)?.re)
}

type TableFn = Box<dyn Fn(f64) -> Result<C64> + Send + Sync>;

/// Real-axis kernel and measure of one operator family in log form, with the
/// conventions an operator needs: phase scale of the exponentials, the weight
/// of each integration variable, and the kernel's exponential decay rate.
///
/// The relativistic variant tabulates ln K_h and ln|S₂(h+iu)|² on
/// |u| ≤ U and switches to the exact asymptotes beyond, where the first
/// correction is below e^{-2πU/ω_max} < 1e-16.
#[derive(Clone)]
pub struct Flavour {
    pub family: KernelFamily,
    /// Coupling of the kernel (g, or g* for relativistic non-dual operators).
    pub h: f64,
    /// Exponentials read e^{i·sigma·λ·(…)}.
    pub sigma: f64,
    /// Factor per integration variable.
    pub weight: f64,
    /// K(u) ≲ e^{-a|u|}; the measure grows as e^{2a|u|}.
    pub a: f64,
    tables: Option<Arc<RelTables>>,
}

struct RelTables {
    periods: Periods,
    h: f64,
    cutoff: f64,
    ln_k: ChebTable<TableFn>,
    ln_m: ChebTable<TableFn>,
}

impl std::fmt::Debug for Flavour {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Flavour")
            .field("family", &self.family)
            .field("h", &self.h)
            .field("sigma", &self.sigma)
            .field("weight", &self.weight)
            .field("a", &self.a)
            .finish()
    }
}

impl Flavour {
    pub fn hyperbolic(g: f64) -> Flavour {
        Flavour {
            family: KernelFamily::Hyperbolic,
            h: g,
            sigma: 1.0,
            weight: 1.0,
            a: g,
            tables: None,
        }
    }

    pub fn gamma(g: f64) -> Flavour {
        Flavour {
            family: KernelFamily::Gamma,
            h: g,
            sigma: 1.0,
            weight: 1.0 / (2.0 * PI),
            a: PI / 2.0,
            tables: None,
        }
    }

    /// Relativistic family with kernel K_h and measure μ_h.
    pub fn relativistic(h: f64, p: &Periods) -> Result<Flavour> {
        Coupling::new(h, Some(*p))?;
        let p = *p;
        let hstar = p.sum() - h;
        // distance from the real axis to the nearest log-singularity
        let d_k = 0.5 * h;
        let d_m = h.min(hstar);
        let cutoff = 6.0 * p.max() + 1.0;
        let ln_k: TableFn = Box::new(move |u| Ok(C64::new(ln_kernel_Kg_real(u, h, &p)?, 0.0)));
        let ln_m: TableFn = Box::new(move |u| Ok(C64::new(2.0 * ln_double_sine(C64::new(h, u), &p)?.re, 0.0)));
        let tables = RelTables {
            periods: p,
            h,
            cutoff,
            ln_k: ChebTable::new(0.0, cutoff, (0.9 * d_k).min(1.0), ln_k),
            ln_m: ChebTable::new(0.0, cutoff, (0.9 * d_m).min(1.0), ln_m),
        };
        Ok(Flavour {
            family: KernelFamily::Relativistic,
            h,
            sigma: 2.0 * PI / p.product(),
            weight: 1.0,
            a: PI * hstar / p.product(),
            tables: Some(Arc::new(tables)),
        })
    }

    /// ln K(u) for real u.
    pub fn ln_k(&self, u: f64) -> Result<f64> {
        match self.family {
            KernelFamily::Hyperbolic => Ok(-self.h * ln_ch(u)),
            KernelFamily::Gamma => Ok(ln_hatK(C64::new(u, 0.0), self.h)?.re),
            KernelFamily::Relativistic => {
                let t = self.tables.as_ref().expect("relativistic tables");
                let v = u.abs();
                if v <= t.cutoff {
                    Ok(t.ln_k.eval(v)?.re)
                } else {
                    Ok(-self.a * v)
                }
            }
        }
    }

    /// ln K(z) off the real axis, up to a multiple of 2πi.
    pub fn ln_k_complex(&self, z: C64) -> Result<C64> {
        if z.im == 0.0 {
            return Ok(C64::new(self.ln_k(z.re)?, 0.0));
        }
        match self.family {
            KernelFamily::Hyperbolic => {
                if z.im.abs() >= PI / 2.0 {
                    return Err(Error::Continuation(format!(
                        "ch^(-g) continued to Im z = {} leaves the strip |Im z| < π/2",
                        z.im
                    )));
                }
                Ok(-ln_ch_complex(z) * self.h)
            }
            KernelFamily::Gamma => ln_hatK(z, self.h),
            KernelFamily::Relativistic => {
                let p = self.tables.as_ref().expect("relativistic tables").periods;
                let i = C64::i();
                Ok(-ln_double_sine(i * z + self.h / 2.0, &p)? - ln_double_sine(-i * z + self.h / 2.0, &p)?)
            }
        }
    }

    /// ln μ(u) for the separation u = γ₁ - γ₂; -∞ at u = 0.
    pub fn ln_mu(&self, u: f64) -> Result<f64> {
        if u == 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        match self.family {
            KernelFamily::Hyperbolic => Ok(2.0 * self.h * ln_sh_abs(u)),
            KernelFamily::Gamma => ln_gamma_measure(u, self.h),
            KernelFamily::Relativistic => {
                let t = self.tables.as_ref().expect("relativistic tables");
                let p = &t.periods;
                let v = u.abs();
                let m = if v <= t.cutoff {
                    t.ln_m.eval(v)?.re
                } else {
                    PI * v * (p.sum() - 2.0 * t.h) / p.product()
                };
                Ok(2.0 * LN_2 + ln_sh_abs(PI * v / p.w1) + ln_sh_abs(PI * v / p.w2) + m)
            }
        }
    }

    /// Eigenvalue of the n = 1 operator with this kernel on the plane wave
    /// labelled `label`, at spectral value `spectral`.
    pub fn eigenvalue(&self, spectral: C64, label: C64) -> Result<C64> {
        let d = spectral - label;
        match self.family {
            KernelFamily::Hyperbolic => Ok(ln_hatK(d, self.h)?.exp()),
            KernelFamily::Gamma => kernel_K_complex(d, self.h),
            KernelFamily::Relativistic => {
                let p = self.tables.as_ref().expect("relativistic tables").periods;
                let dual = Coupling::new(p.sum() - self.h, Some(p))?;
                Ok(kernel_Kg(d, &dual)? * rel_eigen_prefactor(dual.g, &p)?)
            }
        }
    }

    pub fn periods(&self) -> Option<Periods> {
        self.tables.as_ref().map(|t| t.periods)
    }
}

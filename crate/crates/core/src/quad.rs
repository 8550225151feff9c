//! Deterministic adaptive quadrature on lines, half-lines and planes.
//!
//! Infinite ranges are truncated using the envelope the caller declares in a
//! [`DecayProfile`]; the integrand itself is never probed to find its tails.
//! Panels are refined by a global Gauss–Kronrod 7/15 scheme whose split order
//! depends only on the inputs, so repeated runs return bit-identical results.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Tolerances and budget for one integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Maximum number of integrand evaluations.
    pub max_nodes: usize,
    /// Multiplier on the tail-derived truncation length.
    pub safety: f64,
}

impl Default for QuadSpec {
    fn default() -> Self {
        QuadSpec {
            rel_tol: 1e-9,
            abs_tol: 1e-12,
            max_nodes: 200_000,
            safety: 1.5,
        }
    }
}

impl QuadSpec {
    pub fn with_tol(rel_tol: f64, abs_tol: f64) -> Self {
        QuadSpec {
            rel_tol,
            abs_tol,
            ..QuadSpec::default()
        }
    }
}

/// Envelope of an integrand on the real line:
/// |f(t)| ≤ amplitude·exp(-rate_pos·(t - center - half_width)) to the right of
/// the plateau `[center - half_width, center + half_width]`, and the mirror
/// bound with `rate_neg` to the left.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayProfile {
    pub rate_pos: f64,
    pub rate_neg: f64,
    pub center: f64,
    pub half_width: f64,
    pub amplitude: f64,
}

impl DecayProfile {
    pub fn new(rate_pos: f64, rate_neg: f64, center: f64) -> Self {
        DecayProfile {
            rate_pos,
            rate_neg,
            center,
            half_width: 0.0,
            amplitude: 1.0,
        }
    }

    pub fn symmetric(rate: f64, center: f64) -> Self {
        DecayProfile::new(rate, rate, center)
    }

    pub fn with_plateau(mut self, half_width: f64) -> Self {
        self.half_width = half_width.abs();
        self
    }

    pub fn with_amplitude(mut self, amplitude: f64) -> Self {
        self.amplitude = amplitude.max(1.0);
        self
    }

    /// Integration window implied by the envelope, clipped to `[lower, upper]`.
    pub fn window(&self, spec: &QuadSpec, lower: Option<f64>, upper: Option<f64>) -> Result<(f64, f64)> {
        let depth = spec.safety * (self.amplitude.ln() - (spec.abs_tol / 10.0).ln()).max(1.0);
        let hi = match upper {
            Some(u) => u,
            None => {
                if !(self.rate_pos > 0.0) {
                    return Err(Error::Divergent {
                        rate: self.rate_pos,
                        direction: "+inf",
                    });
                }
                self.center + self.half_width + depth / self.rate_pos
            }
        };
        let lo = match lower {
            Some(l) => l,
            None => {
                if !(self.rate_neg > 0.0) {
                    return Err(Error::Divergent {
                        rate: self.rate_neg,
                        direction: "-inf",
                    });
                }
                self.center - self.half_width - depth / self.rate_neg
            }
        };
        Ok((lo, hi.max(lo)))
    }
}

/// Optional hints for a single integral.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LineOptions {
    /// Largest angular frequency of the integrand; caps panel width at π/(4|ω|).
    pub frequency: f64,
    /// Points where the integrand has kinks or sharp features.
    pub breakpoints: Vec<f64>,
    /// Finite lower limit replacing the envelope truncation.
    pub lower: Option<f64>,
    /// Finite upper limit replacing the envelope truncation.
    pub upper: Option<f64>,
}

impl LineOptions {
    pub fn frequency(frequency: f64) -> Self {
        LineOptions {
            frequency,
            ..LineOptions::default()
        }
    }

    pub fn with_breakpoints(mut self, pts: &[f64]) -> Self {
        self.breakpoints.extend_from_slice(pts);
        self
    }

    pub fn half_line(mut self, lower: f64) -> Self {
        self.lower = Some(lower);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOutput {
    pub value: C64,
    /// Sum of per-panel |Kronrod - Gauss| differences.
    pub error: f64,
    pub nodes: usize,
}

const MAX_PANEL: f64 = 8.0;

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
// Gauss weights at XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

struct Panel {
    a: f64,
    b: f64,
    value: C64,
    error: f64,
    // Roundoff floor 50·ε·∫|f| of the panel; error at or below it is frozen
    // (moved to `frozen`, the panel is not split again).
    floor: f64,
    frozen: f64,
    // creation order; breaks ties so the split sequence is reproducible
    seq: u64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

/// (Kronrod value, |Kronrod - Gauss|, roundoff floor).
fn gk15<F: Fn(f64) -> C64>(f: &F, a: f64, b: f64) -> Result<(C64, f64, f64)> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut k = C64::new(0.0, 0.0);
    let mut g = C64::new(0.0, 0.0);
    let mut abs = 0.0;
    for (i, (&x, &w)) in XGK.iter().zip(WGK.iter()).enumerate() {
        let pts: &[f64] = if x == 0.0 { &[0.0] } else { &[x, -x] };
        for &s in pts {
            let t = c + h * s;
            let v = f(t);
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::NonFinite { at: t });
            }
            k += v * w;
            abs += v.norm() * w;
            if i % 2 == 1 {
                g += v * WG[i / 2];
            }
        }
    }
    Ok((k * h, ((k - g) * h).norm(), 50.0 * f64::EPSILON * abs * h))
}

fn compensated_sum(values: impl Iterator<Item = C64>) -> C64 {
    let (mut sr, mut cr, mut si, mut ci) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for v in values {
        for (s, c, x) in [(&mut sr, &mut cr, v.re), (&mut si, &mut ci, v.im)] {
            let t = *s + x;
            if s.abs() >= x.abs() {
                *c += (*s - t) + x;
            } else {
                *c += (x - t) + *s;
            }
            *s = t;
        }
    }
    C64::new(sr + cr, si + ci)
}

/// Adaptive integral over the finite interval `[a, b]`.
pub fn integrate_interval<F: Fn(f64) -> C64>(
    f: F,
    a: f64,
    b: f64,
    spec: &QuadSpec,
    opts: &LineOptions,
) -> Result<QuadOutput> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidParam(format!("interval [{a}, {b}] is not finite")));
    }
    if a == b {
        return Ok(QuadOutput {
            value: C64::new(0.0, 0.0),
            error: 0.0,
            nodes: 0,
        });
    }
    if b < a {
        let r = integrate_interval(f, b, a, spec, opts)?;
        return Ok(QuadOutput {
            value: -r.value,
            ..r
        });
    }
    let mut width = MAX_PANEL;
    if opts.frequency.abs() > 0.0 {
        width = width.min(std::f64::consts::PI / (4.0 * opts.frequency.abs()));
    }
    let mut cuts = vec![a];
    let mut bps: Vec<f64> = opts
        .breakpoints
        .iter()
        .copied()
        .filter(|&p| p > a && p < b)
        .collect();
    bps.sort_by(f64::total_cmp);
    bps.dedup();
    cuts.extend(bps);
    cuts.push(b);

    let mut heap = BinaryHeap::new();
    let mut seq = 0u64;
    let mut nodes = 0usize;
    let mut total = C64::new(0.0, 0.0);
    let mut total_err = 0.0;
    for w in cuts.windows(2) {
        let n = ((w[1] - w[0]) / width).ceil().max(1.0) as usize;
        let step = (w[1] - w[0]) / n as f64;
        for i in 0..n {
            let lo = w[0] + step * i as f64;
            let hi = if i + 1 == n { w[1] } else { lo + step };
            let (value, error, floor) = gk15(&f, lo, hi)?;
            nodes += 15;
            total += value;
            total_err += error;
            heap.push(Panel {
                a: lo,
                b: hi,
                value,
                error,
                floor,
                frozen: 0.0,
                seq,
            });
            seq += 1;
        }
    }

    loop {
        if total_err <= spec.abs_tol.max(spec.rel_tol * total.norm()) {
            break;
        }
        if nodes + 30 > spec.max_nodes {
            let all: Vec<Panel> = heap.into_vec();
            let value = compensated_sum(sorted(all.iter()).map(|p| p.value));
            return Err(Error::BudgetExceeded {
                estimate_re: value.re,
                estimate_im: value.im,
                error: total_err,
            });
        }
        let worst = heap.pop().expect("at least one panel");
        if worst.error == 0.0 {
            // every remaining panel is frozen
            break;
        }
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) || worst.error <= worst.floor {
            // no further progress possible in f64; keep its estimate
            total_err -= worst.error;
            heap.push(Panel {
                error: 0.0,
                frozen: worst.error,
                ..worst
            });
            continue;
        }
        let (v1, e1, f1) = gk15(&f, worst.a, mid)?;
        let (v2, e2, f2) = gk15(&f, mid, worst.b)?;
        nodes += 30;
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        heap.push(Panel {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
            floor: f1,
            frozen: 0.0,
            seq,
        });
        heap.push(Panel {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
            floor: f2,
            frozen: 0.0,
            seq: seq + 1,
        });
        seq += 2;
    }
    let all: Vec<Panel> = heap.into_vec();
    let value = compensated_sum(sorted(all.iter()).map(|p| p.value));
    let error = all.iter().map(|p| p.error + p.frozen).sum();
    Ok(QuadOutput { value, error, nodes })
}

fn sorted<'a>(panels: impl Iterator<Item = &'a Panel>) -> impl Iterator<Item = &'a Panel> {
    let mut v: Vec<&Panel> = panels.collect();
    v.sort_by(|p, q| p.a.total_cmp(&q.a));
    v.into_iter()
}

/// Integral over the real line truncated by the declared envelope.
pub fn integrate_line<F: Fn(f64) -> C64>(f: F, decay: &DecayProfile, spec: &QuadSpec) -> Result<QuadOutput> {
    integrate_line_with(f, decay, spec, &LineOptions::default())
}

pub fn integrate_line_with<F: Fn(f64) -> C64>(
    f: F,
    decay: &DecayProfile,
    spec: &QuadSpec,
    opts: &LineOptions,
) -> Result<QuadOutput> {
    let (lo, hi) = decay.window(spec, opts.lower, opts.upper)?;
    let mut opts = opts.clone();
    opts.breakpoints.push(decay.center);
    if decay.half_width > 0.0 {
        opts.breakpoints.push(decay.center - decay.half_width);
        opts.breakpoints.push(decay.center + decay.half_width);
    }
    integrate_interval(f, lo, hi, spec, &opts)
}

/// Iterated integral over the plane: outer variable `t1`, inner `t2`.
///
/// The inner tolerance is a tenth of the outer one so that inner noise stays
/// below the outer error estimate.
pub fn integrate_plane<F: Fn(f64, f64) -> C64>(
    f: F,
    d1: &DecayProfile,
    d2: &DecayProfile,
    spec: &QuadSpec,
) -> Result<QuadOutput> {
    integrate_plane_with(
        f,
        (d1, &LineOptions::default()),
        |_| (*d2, LineOptions::default()),
        spec,
    )
}

/// Iterated integral where the inner envelope and hints may depend on the
/// outer variable.
pub fn integrate_plane_with<F, G>(
    f: F,
    outer: (&DecayProfile, &LineOptions),
    inner: G,
    spec: &QuadSpec,
) -> Result<QuadOutput>
where
    F: Fn(f64, f64) -> C64,
    G: Fn(f64) -> (DecayProfile, LineOptions),
{
    let inner_spec = QuadSpec {
        rel_tol: spec.rel_tol / 10.0,
        abs_tol: spec.abs_tol / 10.0,
        ..*spec
    };
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let nodes = RefCell::new(0usize);
    let g = |t1: f64| -> C64 {
        if failure.borrow().is_some() {
            return C64::new(0.0, 0.0);
        }
        let (d2, o2) = inner(t1);
        match integrate_line_with(|t2| f(t1, t2), &d2, &inner_spec, &o2) {
            Ok(r) => {
                *nodes.borrow_mut() += r.nodes;
                r.value
            }
            Err(e) => {
                *failure.borrow_mut() = Some(e);
                C64::new(0.0, 0.0)
            }
        }
    };
    let out = integrate_line_with(g, outer.0, spec, outer.1);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let mut out = out?;
    out.nodes += nodes.into_inner();
    Ok(out)
}

/// Composite trapezoid rule with `n` intervals; the independent oracle for
/// the adaptive scheme on smooth, rapidly decaying integrands.
pub fn oracle_trapezoid<F: Fn(f64) -> C64>(f: F, a: f64, b: f64, n: usize) -> C64 {
    let n = n.max(1);
    let h = (b - a) / n as f64;
    let inner = compensated_sum((1..n).map(|i| f(a + h * i as f64)));
    (inner + (f(a) + f(b)) * 0.5) * h
}

pub fn oracle_trapezoid_2d<F: Fn(f64, f64) -> C64>(
    f: F,
    (a1, b1): (f64, f64),
    (a2, b2): (f64, f64),
    n1: usize,
    n2: usize,
) -> C64 {
    oracle_trapezoid(|t1| oracle_trapezoid(|t2| f(t1, t2), a2, b2, n2), a1, b1, n1)
}

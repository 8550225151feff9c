//! Piecewise Chebyshev interpolation with panels filled on first use.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64 as C64;

use crate::error::Result;

const DEGREE: usize = 24;

pub(crate) struct ChebTable<F> {
    lo: f64,
    width: f64,
    panels: Vec<OnceLock<Result<[C64; DEGREE + 1]>>>,
    f: F,
}

impl<F: Fn(f64) -> Result<C64>> ChebTable<F> {
    /// Covers `[lo, hi]` with panels no wider than `max_width`.
    pub(crate) fn new(lo: f64, hi: f64, max_width: f64, f: F) -> Self {
        let n = ((hi - lo) / max_width).ceil().max(1.0) as usize;
        ChebTable {
            lo,
            width: (hi - lo) / n as f64,
            panels: (0..n).map(|_| OnceLock::new()).collect(),
            f,
        }
    }

    fn coefficients(&self, a: f64) -> Result<[C64; DEGREE + 1]> {
        const N: usize = DEGREE + 1;
        let mut vals = [C64::new(0.0, 0.0); N];
        for (j, v) in vals.iter_mut().enumerate() {
            let th = PI * (j as f64 + 0.5) / N as f64;
            *v = (self.f)(a + 0.5 * self.width * (1.0 + th.cos()))?;
        }
        let mut c = [C64::new(0.0, 0.0); N];
        for (k, ck) in c.iter_mut().enumerate() {
            let mut s = C64::new(0.0, 0.0);
            for (j, v) in vals.iter().enumerate() {
                s += v * (PI * k as f64 * (j as f64 + 0.5) / N as f64).cos();
            }
            *ck = s * (2.0 / N as f64);
        }
        c[0] *= 0.5;
        Ok(c)
    }

    /// Value at `x`; the caller guarantees `contains(x)`.
    pub(crate) fn eval(&self, x: f64) -> Result<C64> {
        let idx = (((x - self.lo) / self.width).floor() as usize).min(self.panels.len() - 1);
        let a = self.lo + self.width * idx as f64;
        let c = self.panels[idx].get_or_init(|| self.coefficients(a));
        let c = match c {
            Ok(c) => c,
            Err(e) => return Err(e.clone()),
        };
        let t = 2.0 * (x - a) / self.width - 1.0;
        let (mut b1, mut b2) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
        for ck in c.iter().skip(1).rev() {
            let b0 = ck + b1 * (2.0 * t) - b2;
            b2 = b1;
            b1 = b0;
        }
        Ok(c[0] + b1 * t - b2)
    }
}

//! Grid evaluation of the library functions.

use std::collections::BTreeMap;

use qops::identity_suite::Param;
use qops::kernels::{kernel_K, kernel_Kg, kernel_hatK, measure, Coupling, KernelFamily};
use qops::quad::QuadSpec;
use qops::special_fn::double_sine;
use qops::wavefn::{psi_HR, psi_MB, psi_factored, PositionPoint, SpectralPoint};
use qops::C64;

pub const TARGETS: [&str; 8] = ["K", "hatK", "Kg", "mu", "S2", "psi_HR", "psi_MB", "psi_factored"];

/// Required and optional (defaulting to 0) axes of a target.
pub fn axes(target: &str) -> Option<(&'static [&'static str], &'static [&'static str])> {
    Some(match target {
        "K" => (&["x"], &[]),
        "hatK" => (&["lambda"], &["lambda_im"]),
        "Kg" => (&["x"], &["x_im"]),
        "mu" => (&["a", "b"], &[]),
        "S2" => (&["re", "im"], &[]),
        "psi_HR" | "psi_MB" => (&["lambda1", "lambda2", "x1", "x2"], &[]),
        "psi_factored" => (&["lambda", "x"], &[]),
        _ => return None,
    })
}

/// Whether the target is computed by quadrature; those get an error
/// estimate from a second evaluation at ten times tighter tolerances.
fn uses_quadrature(target: &str) -> bool {
    target.starts_with("psi")
}

pub struct Evaluator {
    pub target: String,
    pub family: KernelFamily,
    pub coupling: Coupling,
    pub quad: QuadSpec,
}

impl Evaluator {
    fn value(&self, p: &BTreeMap<String, f64>, q: &QuadSpec) -> qops::Result<C64> {
        let v = |k: &str| p.get(k).copied().unwrap_or(0.0);
        let c = &self.coupling;
        match self.target.as_str() {
            "K" => Ok(C64::new(kernel_K(v("x"), c), 0.0)),
            "hatK" => kernel_hatK(C64::new(v("lambda"), v("lambda_im")), c),
            "Kg" => kernel_Kg(C64::new(v("x"), v("x_im")), c),
            "mu" => measure(self.family, v("a"), v("b"), c),
            "S2" => double_sine(C64::new(v("re"), v("im")), &c.periods()?),
            "psi_HR" | "psi_MB" => {
                let sp = SpectralPoint::real(v("lambda1"), v("lambda2"));
                let pp = PositionPoint::new(v("x1"), v("x2"));
                if self.target == "psi_HR" {
                    psi_HR(&sp, &pp, c, self.family, q)
                } else {
                    psi_MB(&sp, &pp, c, self.family, q)
                }
            }
            "psi_factored" => psi_factored(v("lambda"), v("x"), c, q),
            other => Err(qops::Error::InvalidParam(format!("unknown target `{other}`"))),
        }
    }

    /// (re, im, quadrature error estimate) at one grid point.
    pub fn eval(&self, p: &BTreeMap<String, f64>) -> qops::Result<(f64, f64, f64)> {
        let z = self.value(p, &self.quad)?;
        let err = if uses_quadrature(&self.target) {
            let fine = QuadSpec {
                rel_tol: self.quad.rel_tol / 10.0,
                abs_tol: self.quad.abs_tol / 10.0,
                ..self.quad
            };
            (self.value(p, &fine)? - z).norm()
        } else {
            0.0
        };
        Ok((z.re, z.im, err))
    }
}

/// Cartesian product of the axes, last axis fastest, in axis-name order.
pub fn grid_points(grid: &BTreeMap<String, Vec<f64>>) -> Vec<BTreeMap<String, f64>> {
    let mut out = vec![BTreeMap::new()];
    for (k, vals) in grid {
        out = out
            .into_iter()
            .flat_map(|p| {
                vals.iter().map(move |v| {
                    let mut q = p.clone();
                    q.insert(k.clone(), *v);
                    q
                })
            })
            .collect();
    }
    out
}

pub fn as_params(p: &BTreeMap<String, f64>) -> BTreeMap<String, Param> {
    p.iter().map(|(k, v)| (k.clone(), Param::Num(*v))).collect()
}

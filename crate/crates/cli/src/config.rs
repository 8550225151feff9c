use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use qops::kernels::{Coupling, KernelFamily};
use qops::quad::QuadSpec;
use qops::special_fn::Periods;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    JsonLines,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_nodes: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        let q = QuadSpec::default();
        QuadConfig {
            rel_tol: q.rel_tol,
            abs_tol: q.abs_tol,
            max_nodes: q.max_nodes,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalConfig {
    pub target: Option<String>,
    /// Axis name to values; the grid is the Cartesian product in axis-name order.
    pub grid: BTreeMap<String, Vec<f64>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CheckConfig {
    pub names: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub check: Option<String>,
    pub values: Vec<f64>,
}

/// Contents of a `--config` file, overridden field by field by flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub family: String,
    pub g: f64,
    pub periods: Option<[f64; 2]>,
    pub quad: QuadConfig,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub tol: Option<f64>,
    pub jobs: usize,
    pub seed: u64,
    pub eval: EvalConfig,
    pub check: CheckConfig,
    pub sweep: SweepConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            family: "hyperbolic".into(),
            g: 1.0,
            periods: None,
            quad: QuadConfig::default(),
            format: Format::JsonLines,
            out: None,
            tol: None,
            jobs: 1,
            seed: qops::identity_suite::SuiteConfig::default().seed,
            eval: EvalConfig::default(),
            check: CheckConfig::default(),
            sweep: SweepConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    pub fn family(&self) -> Result<KernelFamily, String> {
        self.family.parse().map_err(|e: qops::Error| e.to_string())
    }

    pub fn coupling(&self) -> Result<Coupling, String> {
        let periods = match self.periods {
            Some([w1, w2]) => Some(Periods::new(w1, w2).map_err(|e| e.to_string())?),
            None => None,
        };
        Coupling::new(self.g, periods).map_err(|e| e.to_string())
    }

    pub fn quad_spec(&self) -> Result<QuadSpec, String> {
        let q = &self.quad;
        if !(q.rel_tol > 0.0 && q.abs_tol > 0.0 && q.max_nodes >= 15) {
            return Err("quad tolerances must be positive and max_nodes at least 15".into());
        }
        Ok(QuadSpec {
            rel_tol: q.rel_tol,
            abs_tol: q.abs_tol,
            max_nodes: q.max_nodes,
            ..QuadSpec::default()
        })
    }

    pub fn validate(&self) -> Result<(), String> {
        let family = self.family()?;
        self.coupling()?;
        let needs_periods = family == KernelFamily::Relativistic
            || matches!(self.eval.target.as_deref(), Some("Kg" | "S2"));
        if needs_periods && self.periods.is_none() {
            return Err("the relativistic family and the Kg and S2 targets need --periods W1 W2".into());
        }
        self.quad_spec()?;
        if let Some(t) = self.tol {
            if !(t > 0.0) {
                return Err(format!("--tol must be positive, got {t}"));
            }
        }
        if self.jobs == 0 {
            return Err("--jobs must be at least 1".into());
        }
        if self.eval.grid.values().any(|v| v.is_empty()) {
            return Err("grid axes must be non-empty".into());
        }
        Ok(())
    }

    /// SHA-256 of everything that can change a result. The output path and
    /// the thread count are left out: neither affects a record.
    pub fn hash(&self, command: &str) -> String {
        let mut c = self.clone();
        c.out = None;
        c.jobs = 1;
        let body = serde_json::to_string(&(command, &c)).expect("config serializes");
        hex::encode(Sha256::digest(body.as_bytes()))
    }
}

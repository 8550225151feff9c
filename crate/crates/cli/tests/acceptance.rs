//! One PASS/FAIL line per acceptance criterion. Criteria 1 to 10 run their
//! check groups in-process on one thread and hold them to the runtime
//! budget; criterion 11 runs the full suite through the binary twice.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use qops::identity_suite::{run_suite, CheckResult, SuiteConfig};

struct Criterion {
    id: u32,
    title: &'static str,
    groups: &'static [&'static str],
    budget: Duration,
    /// Criterion-specific conditions beyond every record passing.
    extra: fn(&[CheckResult]) -> Result<(), String>,
}

fn none(_: &[CheckResult]) -> Result<(), String> {
    Ok(())
}

fn records_of<'a>(rs: &'a [CheckResult], name: &str) -> Vec<&'a CheckResult> {
    rs.iter().filter(|r| r.check_name == name).collect()
}

/// Strictly decreasing deviations with the last one below `last`.
fn decreasing(rs: &[CheckResult], name: &str, last: f64) -> Result<(), String> {
    let v = records_of(rs, name);
    if v.len() < 2 {
        return Err(format!("{name}: {} records", v.len()));
    }
    if let Some(w) = v.windows(2).find(|w| !(w[1].abs_err < w[0].abs_err)) {
        return Err(format!("{name}: {:.3e} after {:.3e}", w[1].abs_err, w[0].abs_err));
    }
    let fin = v[v.len() - 1].abs_err;
    if !(fin < last) {
        return Err(format!("{name}: final deviation {fin:.3e} ≥ {last:e}"));
    }
    Ok(())
}

fn counts(rs: &[CheckResult], want: &[(&str, usize)]) -> Result<(), String> {
    for (name, n) in want {
        let got = records_of(rs, name).len();
        if got != *n {
            return Err(format!("{name}: {got} records, expected {n}"));
        }
    }
    Ok(())
}

const MIN: u64 = 60;

const CRITERIA: &[Criterion] = &[
    Criterion {
        id: 1,
        title: "special-function identities",
        groups: &[
            "special_fn.inversion",
            "special_fn.shift_w1",
            "special_fn.shift_w2",
            "special_fn.period_swap",
            "special_fn.homogeneity",
            "special_fn.gamma_reflection",
        ],
        budget: Duration::from_secs(5),
        extra: none,
    },
    Criterion {
        id: 2,
        title: "beta integrals",
        groups: &["beta.*"],
        budget: Duration::from_secs(30),
        extra: |rs| counts(rs, &[("beta.fourier", 9), ("beta.inverse", 9), ("beta.hyperbolic", 3)]),
    },
    Criterion {
        id: 3,
        title: "coordinate and spectral representations agree",
        groups: &["equivalence.*"],
        budget: Duration::from_secs(5 * MIN),
        extra: |rs| counts(rs, &[("equivalence.hyperbolic", 27), ("equivalence.relativistic", 8)]),
    },
    Criterion {
        id: 4,
        title: "eigen-relations",
        groups: &["eigen.*"],
        budget: Duration::from_secs(10 * MIN),
        extra: |rs| counts(rs, &[("eigen.n1.hyperbolic", 5), ("eigen.n1.gamma", 5), ("eigen.n1.relativistic", 5)]),
    },
    Criterion {
        id: 5,
        title: "commutativity",
        groups: &["commute.*", "determinant"],
        budget: Duration::from_secs(10 * MIN),
        extra: none,
    },
    Criterion {
        id: 6,
        title: "QΛ exchange",
        groups: &["exchange.*"],
        budget: Duration::from_secs(3 * MIN),
        extra: none,
    },
    Criterion {
        id: 7,
        title: "Schrödinger, momentum and dual difference residuals",
        groups: &["residual.*"],
        budget: Duration::from_secs(3 * MIN),
        extra: none,
    },
    Criterion {
        id: 8,
        title: "reductions",
        groups: &["reduction.*"],
        budget: Duration::from_secs(2 * MIN),
        extra: |rs| {
            for n in [
                "reduction.Kg_to_hatK",
                "reduction.Kgstar_to_K",
                "reduction.beta_reduction_1",
                "reduction.beta_reduction_2",
                "reduction.S2_to_gamma",
            ] {
                decreasing(rs, n, 5e-2)?;
            }
            Ok(())
        },
    },
    Criterion {
        id: 9,
        title: "delta sequences",
        groups: &["delta.*"],
        budget: Duration::from_secs(5 * MIN),
        extra: |rs| {
            decreasing(rs, "delta.n1_g1", 5e-2)?;
            decreasing(rs, "delta.n1_g", 5e-2)?;
            decreasing(rs, "delta.n2", 1e-1)
        },
    },
    Criterion {
        id: 10,
        title: "scalar-product chain and orthogonality",
        groups: &["chain.*", "orthogonality.*"],
        budget: Duration::from_secs(10 * MIN),
        extra: none,
    },
];

fn run_criterion(c: &Criterion) -> Result<String, String> {
    let sel: Vec<String> = c.groups.iter().map(|s| s.to_string()).collect();
    let t = Instant::now();
    let rs = run_suite(&sel, &SuiteConfig::default()).map_err(|e| e.to_string())?;
    let dt = t.elapsed();
    let failed: Vec<_> = rs.iter().filter(|r| !r.passed).collect();
    if let Some(r) = failed.first() {
        return Err(format!(
            "{} of {} records failed, first {} (abs {:.2e}, rel {:.2e}, tol {:.0e}) {:?}",
            failed.len(),
            rs.len(),
            r.check_name,
            r.abs_err,
            r.rel_err,
            r.tolerance,
            r.params
        ));
    }
    (c.extra)(&rs)?;
    if dt > c.budget {
        return Err(format!("{:.1} s exceeds the {} s budget", dt.as_secs_f64(), c.budget.as_secs()));
    }
    let worst = rs.iter().map(|r| r.rel_err.min(r.abs_err)).fold(0.0, f64::max);
    Ok(format!("{} records, worst deviation {worst:.2e}, {:.1} s", rs.len(), dt.as_secs_f64()))
}

fn determinism() -> Result<String, String> {
    let dir = tempfile::TempDir::new().map_err(|e| e.to_string())?;
    let mut reports = Vec::new();
    let t = Instant::now();
    for jobs in ["1", "8"] {
        let out = dir.path().join(format!("jobs{jobs}.jsonl"));
        let status = Command::new(env!("CARGO_BIN_EXE_qops"))
            .args(["check", "all", "--deterministic", "--jobs", jobs, "--out"])
            .arg(&out)
            .env_remove("SOURCE_DATE_EPOCH")
            .status()
            .map_err(|e| e.to_string())?;
        if status.code() != Some(0) {
            return Err(format!("--jobs {jobs} run exited with {status}"));
        }
        reports.push(std::fs::read(&out).map_err(|e| e.to_string())?);
    }
    if reports[0] != reports[1] {
        let line = reports[0]
            .split(|b| *b == b'\n')
            .zip(reports[1].split(|b| *b == b'\n'))
            .position(|(a, b)| a != b)
            .map_or(0, |k| k + 1);
        return Err(format!("reports differ, first at line {line}"));
    }
    Ok(format!(
        "{} identical bytes, {:.1} s for both runs",
        reports[0].len(),
        t.elapsed().as_secs_f64()
    ))
}

fn main() -> ExitCode {
    // `cargo test -- <filter>` passes arguments through; the criteria always run
    let mut failures = 0;
    let mut report = |id: u32, title: &str, r: Result<String, String>| {
        match r {
            Ok(m) => println!("PASS criterion {id}: {title}: {m}"),
            Err(m) => {
                failures += 1;
                println!("FAIL criterion {id}: {title}: {m}");
            }
        }
    };
    for c in CRITERIA {
        report(c.id, c.title, run_criterion(c));
    }
    report(11, "byte-identical reports for --jobs 1 and --jobs 8", determinism());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

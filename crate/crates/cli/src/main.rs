//! `qops`: evaluate kernels and wave functions on grids, run the identity
//! suite, sweep trend checks and merge reports.
//!
//! Exit status: 0 when everything passed, 1 on a failed check or evaluation,
//! 2 on a usage, config or report-parse error.

mod config;
mod eval;
mod output;

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand};
use qops::identity_suite::{self, CheckResult, Reduction, SuiteConfig};

use config::{Format, RunConfig};
use output::{Meta, Sink};

#[derive(Debug, Parser)]
#[command(name = "qops", version, about = "Identity checks for Q-operator kernels and wave functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// TOML run configuration; flags override its fields
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file (standard output when absent)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Replace every check tolerance
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Seed of the random draws in property checks
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Kernel family: hyperbolic, gamma or relativistic
    #[arg(long, global = true)]
    family: Option<String>,
    /// Coupling constant g
    #[arg(long, global = true)]
    g: Option<f64>,
    /// Periods ω₁ ω₂ of the relativistic family
    #[arg(long, global = true, num_args = 2, value_names = ["W1", "W2"])]
    periods: Option<Vec<f64>>,
    /// Zero the runtimes and pin the timestamp to $SOURCE_DATE_EPOCH (or 0)
    #[arg(long, global = true)]
    deterministic: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate one function on a parameter grid
    Eval {
        /// K, hatK, Kg, mu, S2, psi_HR, psi_MB or psi_factored
        #[arg(long)]
        target: Option<String>,
        /// Grid axis as NAME=V1,V2,...; repeatable
        #[arg(long = "grid", value_parser = parse_axis)]
        grid: Vec<(String, Vec<f64>)>,
    },
    /// Run named checks ("all", a name, or a prefix such as "beta.*")
    Check { names: Vec<String> },
    /// Run a trend check over explicit axis values
    Sweep {
        #[arg(long)]
        check: Option<String>,
        #[arg(long, value_delimiter = ',')]
        values: Vec<f64>,
    },
    /// Merge json-lines reports and print a pass/fail table
    Report { paths: Vec<PathBuf> },
    /// Print the catalogue of check names
    List,
}

fn parse_axis(s: &str) -> Result<(String, Vec<f64>), String> {
    let (name, vals) = s.split_once('=').ok_or("expected NAME=V1,V2,...")?;
    let vals = vals
        .split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|e| format!("{v}: {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((name.trim().to_string(), vals))
}

enum Fail {
    Usage(String),
    Failed,
}

impl From<io::Error> for Fail {
    fn from(e: io::Error) -> Self {
        Fail::Usage(e.to_string())
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Fail::Failed) => ExitCode::from(1),
        Err(Fail::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn resolve_config(cli: &Cli) -> Result<RunConfig, Fail> {
    let mut c = match &cli.config {
        Some(p) => RunConfig::load(p).map_err(Fail::Usage)?,
        None => RunConfig::default(),
    };
    if let Some(v) = &cli.out {
        c.out = Some(v.clone());
    }
    if let Some(v) = cli.format {
        c.format = v;
    }
    if cli.tol.is_some() {
        c.tol = cli.tol;
    }
    if let Some(v) = cli.jobs {
        c.jobs = v;
    }
    if let Some(v) = cli.seed {
        c.seed = v;
    }
    if let Some(v) = &cli.family {
        c.family = v.clone();
    }
    if let Some(v) = cli.g {
        c.g = v;
    }
    if let Some(v) = &cli.periods {
        c.periods = Some([v[0], v[1]]);
    }
    Ok(c)
}

fn meta(cfg: &RunConfig, command: &str, deterministic: bool) -> Meta {
    let timestamp = if deterministic {
        std::env::var("SOURCE_DATE_EPOCH").ok().and_then(|s| s.parse().ok()).unwrap_or(0)
    } else {
        SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
    };
    Meta {
        version: env!("CARGO_PKG_VERSION").to_string(),
        config_hash: cfg.hash(command),
        timestamp,
    }
}

fn open_out(cfg: &RunConfig) -> Result<Box<dyn Write>, Fail> {
    Ok(match &cfg.out {
        Some(p) => Box::new(io::BufWriter::new(File::create(p).map_err(|e| Fail::Usage(format!("{}: {e}", p.display())))?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn suite_config(cfg: &RunConfig) -> Result<SuiteConfig, Fail> {
    Ok(SuiteConfig {
        quad: cfg.quad_spec().map_err(Fail::Usage)?,
        seed: cfg.seed,
        tolerance: cfg.tol,
        jobs: cfg.jobs,
    })
}

fn run(cli: Cli) -> Result<(), Fail> {
    let mut cfg = resolve_config(&cli)?;
    match &cli.command {
        Command::List => {
            for n in identity_suite::check_names() {
                println!("{n}");
            }
            Ok(())
        }
        Command::Report { paths } => cmd_report(paths),
        Command::Eval { target, grid } => {
            if let Some(t) = target {
                cfg.eval.target = Some(t.clone());
            }
            for (k, v) in grid {
                cfg.eval.grid.insert(k.clone(), v.clone());
            }
            cfg.validate().map_err(Fail::Usage)?;
            cmd_eval(&cfg, cli.deterministic)
        }
        Command::Check { names } => {
            if !names.is_empty() {
                cfg.check.names = names.clone();
            }
            if cfg.check.names.is_empty() {
                cfg.check.names = vec!["all".into()];
            }
            cfg.validate().map_err(Fail::Usage)?;
            cmd_check(&cfg, cli.deterministic)
        }
        Command::Sweep { check, values } => {
            if let Some(c) = check {
                cfg.sweep.check = Some(c.clone());
            }
            if !values.is_empty() {
                cfg.sweep.values = values.clone();
            }
            cfg.validate().map_err(Fail::Usage)?;
            cmd_sweep(&cfg, cli.deterministic)
        }
    }
}

fn write_results(cfg: &RunConfig, command: &str, results: &[CheckResult], deterministic: bool) -> Result<(), Fail> {
    let m = meta(cfg, command, deterministic);
    let mut sink = Sink::new(cfg.format, open_out(cfg)?);
    for r in results {
        sink.write(&output::check_row(r, &m, deterministic))?;
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    if cfg.out.is_some() {
        eprintln!("{} records, {failed} failed", results.len());
    }
    if failed > 0 {
        Err(Fail::Failed)
    } else {
        Ok(())
    }
}

fn cmd_check(cfg: &RunConfig, deterministic: bool) -> Result<(), Fail> {
    // unknown names are a config error, caught before anything runs
    for n in &cfg.check.names {
        identity_suite::resolve(n).map_err(|e| Fail::Usage(e.to_string()))?;
    }
    let results = identity_suite::run_suite(&cfg.check.names, &suite_config(cfg)?).map_err(|e| Fail::Usage(e.to_string()))?;
    write_results(cfg, "check", &results, deterministic)
}

fn cmd_sweep(cfg: &RunConfig, deterministic: bool) -> Result<(), Fail> {
    let name = cfg.sweep.check.as_deref().ok_or(Fail::Usage("sweep needs --check".into()))?;
    identity_suite::sweep_axis(name).ok_or_else(|| Fail::Usage(format!("`{name}` cannot be swept; use a reduction.* or delta.* check")))?;
    let values = if cfg.sweep.values.is_empty() {
        match name.strip_prefix("reduction.").map(str::parse::<Reduction>) {
            Some(Ok(r)) => r.default_schedule(),
            Some(Err(e)) => return Err(Fail::Usage(e.to_string())),
            None => vec![10.0, 20.0, 40.0],
        }
    } else {
        cfg.sweep.values.clone()
    };
    let results = match identity_suite::sweep(name, &values, &suite_config(cfg)?) {
        Ok(r) => r,
        Err(e @ (qops::Error::UnknownCheck(_) | qops::Error::InvalidParam(_))) => return Err(Fail::Usage(e.to_string())),
        Err(e) => vec![CheckResult::failure(name, &e, cfg.tol.unwrap_or(0.0))],
    };
    write_results(cfg, "sweep", &results, deterministic)
}

fn cmd_eval(cfg: &RunConfig, deterministic: bool) -> Result<(), Fail> {
    let target = cfg.eval.target.clone().ok_or(Fail::Usage(format!("eval needs --target, one of {:?}", eval::TARGETS)))?;
    let (required, optional) = eval::axes(&target).ok_or_else(|| Fail::Usage(format!("unknown target `{target}`; expected one of {:?}", eval::TARGETS)))?;
    for a in required {
        if !cfg.eval.grid.contains_key(*a) {
            return Err(Fail::Usage(format!("target {target} needs grid axis `{a}`")));
        }
    }
    for a in cfg.eval.grid.keys() {
        if !required.contains(&a.as_str()) && !optional.contains(&a.as_str()) {
            return Err(Fail::Usage(format!("target {target} has no axis `{a}`")));
        }
    }
    let ev = eval::Evaluator {
        target: target.clone(),
        family: cfg.family().map_err(Fail::Usage)?,
        coupling: cfg.coupling().map_err(Fail::Usage)?,
        quad: cfg.quad_spec().map_err(Fail::Usage)?,
    };
    let points = eval::grid_points(&cfg.eval.grid);
    let slots: Vec<Mutex<Option<Result<(f64, f64, f64), String>>>> = points.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    std::thread::scope(|s| {
        for _ in 0..cfg.jobs.clamp(1, points.len().max(1)) {
            s.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::Relaxed);
                if k >= points.len() {
                    break;
                }
                *slots[k].lock().expect("slot") = Some(ev.eval(&points[k]).map_err(|e| e.to_string()));
            });
        }
    });
    let m = meta(cfg, "eval", deterministic);
    let mut sink = Sink::new(cfg.format, open_out(cfg)?);
    let mut failed = 0;
    for (p, slot) in points.iter().zip(slots) {
        let v = slot.into_inner().expect("slot").expect("point evaluated");
        failed += v.is_err() as usize;
        sink.write(&output::eval_row(&target, eval::as_params(p), v, &m))?;
    }
    if failed > 0 {
        eprintln!("{failed} of {} points failed", points.len());
        return Err(Fail::Failed);
    }
    Ok(())
}

fn cmd_report(paths: &[PathBuf]) -> Result<(), Fail> {
    if paths.is_empty() {
        return Err(Fail::Usage("report needs at least one input file".into()));
    }
    // name → (records, failures, worst rel_err), in first-seen order
    let mut order: Vec<String> = Vec::new();
    let mut table: BTreeMap<String, (usize, usize, f64)> = BTreeMap::new();
    for p in paths {
        let f = File::open(p).map_err(|e| Fail::Usage(format!("{}: {e}", p.display())))?;
        for (i, line) in BufReader::new(f).lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let r = output::parse_line(&line).map_err(|e| Fail::Usage(format!("{}:{}: {e}", p.display(), i + 1)))?;
            if r.verdict() != r.passed {
                return Err(Fail::Usage(format!(
                    "{}:{}: stored verdict disagrees with its errors and tolerance",
                    p.display(),
                    i + 1
                )));
            }
            let e = table.entry(r.check_name.clone()).or_insert_with(|| {
                order.push(r.check_name.clone());
                (0, 0, 0.0)
            });
            e.0 += 1;
            e.1 += !r.passed as usize;
            if !(r.rel_err <= e.2) {
                e.2 = r.rel_err;
            }
        }
    }
    let width = order.iter().map(String::len).max().unwrap_or(5).max(5);
    println!("{:<width$}  {:>7}  {:>6}  {:>13}  verdict", "check", "records", "failed", "worst rel_err");
    let mut failures = 0;
    for n in &order {
        let (count, failed, worst) = table[n];
        failures += failed;
        let verdict = if failed == 0 { "PASS" } else { "FAIL" };
        println!("{n:<width$}  {count:>7}  {failed:>6}  {worst:>13.3e}  {verdict}");
    }
    if failures > 0 {
        Err(Fail::Failed)
    } else {
        Ok(())
    }
}

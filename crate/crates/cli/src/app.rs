//! Command-line interface: `run`, `compare` and `sweep`.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, Subcommand};
use mfapc_core::sim::DiagnosticsReport;
use mfapc_core::{run_closed_loop, Metrics, SimError, SimTrace};
use rayon::prelude::*;

use crate::config::{load, ControllerSection, LoadedConfig};
use crate::error::{CliError, Result};
use crate::output::{sparkline, write_diagnostics, write_metrics, write_summary_table, write_trace, MetricsSummary};
use crate::plot::{line_chart, Series};

pub const OUT_DIR_ENV: &str = "MFAPC_OUT_DIR";
const DEFAULT_OUT_DIR: &str = "mfapc-out";

#[derive(Debug, Parser)]
#[command(name = "mfapc", version, about = "Model-free adaptive predictive control experiments")]
pub struct Cli {
    /// Output directory [default: run.out_dir from the config, else ./mfapc-out]
    #[arg(long, global = true, env = OUT_DIR_ENV)]
    pub out: Option<PathBuf>,
    /// Seed for measurement noise, overriding run.seed
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for compare and sweep [default: logical CPUs]
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate one configuration.
    Run { config: PathBuf },
    /// Simulate several configurations on the same plant and reference.
    Compare {
        #[arg(required = true, num_args = 2..)]
        configs: Vec<PathBuf>,
    },
    /// Re-run one configuration across values of a single parameter.
    Sweep {
        config: PathBuf,
        /// lambda, N, Nu, rho_<i> (1-based), eta or mu
        #[arg(long)]
        param: String,
        /// Comma-separated values
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
        values: Vec<String>,
    },
}

/// Parses `args` and executes the command; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // Usage errors share the config-error code; help and version are successes.
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Run { config } => cmd_run(cli, config),
        Command::Compare { configs } => cmd_compare(cli, configs),
        Command::Sweep { config, param, values } => cmd_sweep(cli, config, param, values),
    }
}

/// Outcome of one simulation, diverged or not.
pub struct RunResult {
    pub name: String,
    pub controller: &'static str,
    pub trace: SimTrace,
    pub metrics: Option<Metrics>,
    pub diagnostics: DiagnosticsReport,
    pub divergence: Option<String>,
}

impl RunResult {
    pub fn summary(&self) -> MetricsSummary {
        MetricsSummary::new(&self.name, self.controller, &self.trace, self.metrics.as_ref(), &self.diagnostics)
    }
}

fn load_with_seed(cli: &Cli, path: &Path) -> Result<LoadedConfig> {
    let mut loaded = load(path)?;
    if let Some(seed) = cli.seed {
        loaded.config.run.seed = seed;
    }
    Ok(loaded)
}

pub fn simulate(loaded: &LoadedConfig, name: &str) -> Result<RunResult> {
    let cfg = &loaded.config;
    let sim = cfg.sim_config(loaded.base_dir())?;
    let mut plant = cfg.build_plant()?;
    let controller = cfg.controller_kind();
    match run_closed_loop(plant.as_mut(), &sim) {
        Ok(out) => Ok(RunResult {
            name: name.to_string(),
            controller,
            trace: out.trace,
            metrics: Some(out.metrics),
            diagnostics: out.diagnostics,
            divergence: None,
        }),
        Err(SimError::Diverged { step, value, trace, diagnostics }) => Ok(RunResult {
            name: name.to_string(),
            controller,
            trace: *trace,
            metrics: None,
            diagnostics: *diagnostics,
            divergence: Some(format!("{name}: closed loop diverged at step {step} (y = {value})")),
        }),
        Err(SimError::Config(e)) => Err(CliError::Config(format!("{}: {e}", loaded.path.display()))),
    }
}

fn out_dir(cli: &Cli, loaded: &LoadedConfig) -> Result<PathBuf> {
    let dir = cli
        .out
        .clone()
        .or_else(|| loaded.config.run.out_dir.clone())
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR));
    fs::create_dir_all(&dir).map_err(CliError::io(&dir))?;
    Ok(dir)
}

fn pool(cli: &Cli) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(cli.workers.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Config(format!("worker pool: {e}")))
}

fn write_run_files(dir: &Path, run: &RunResult) -> Result<()> {
    write_trace(&dir.join("trace.csv"), &run.trace)?;
    write_diagnostics(&dir.join("diagnostics.csv"), &run.trace)?;
    write_metrics(&dir.join("metrics.json"), &run.summary())
}

fn tracking_series(runs: &[&RunResult]) -> Vec<Series> {
    let mut series = vec![Series::new("y*", runs[0].trace.records.iter().map(|r| (r.k as f64, r.y_star)).collect()).dashed()];
    series.extend(runs.iter().map(|run| Series::new(&run.name, run.trace.records.iter().map(|r| (r.k as f64, r.y)).collect())));
    series
}

fn control_series(runs: &[&RunResult]) -> Vec<Series> {
    runs.iter().map(|run| Series::new(&run.name, run.trace.records.iter().map(|r| (r.k as f64, r.u)).collect())).collect()
}

fn pg_series(runs: &[&RunResult]) -> Vec<Series> {
    let mut series = Vec::new();
    for run in runs {
        for j in 0..run.trace.order() {
            let label = if runs.len() == 1 { format!("φ_{}", j + 1) } else { format!("{} φ_{}", run.name, j + 1) };
            series.push(Series::new(label, run.trace.records.iter().map(|r| (r.k as f64, r.phi[j])).collect()));
        }
    }
    series
}

fn write_plots(dir: &Path, runs: &[&RunResult]) -> Result<()> {
    line_chart(&dir.join("tracking.svg"), "Output tracking", "k", "y", &tracking_series(runs))?;
    line_chart(&dir.join("control.svg"), "Control input", "k", "u", &control_series(runs))?;
    let pg = pg_series(runs);
    if !pg.is_empty() {
        line_chart(&dir.join("pg.svg"), "Pseudo-gradient estimate", "k", "φ̂", &pg)?;
    }
    Ok(())
}

struct Num(Option<f64>);

impl fmt::Display for Num {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Some(v) => write!(f, "{v:>12.4}"),
            None => write!(f, "{:>12}", "-"),
        }
    }
}

fn cmd_run(cli: &Cli, path: &Path) -> Result<()> {
    let loaded = load_with_seed(cli, path)?;
    let dir = out_dir(cli, &loaded)?;
    let run = simulate(&loaded, &loaded.name())?;
    write_run_files(&dir, &run)?;
    write_plots(&dir, &[&run])?;

    let s = run.summary();
    println!("{} ({}): {} steps, {}", s.name, s.controller, s.steps, s.status);
    println!("  eITAE Σ|e|     {}", Num(s.e_itae));
    println!("  ITAE Σk|e|     {}", Num(s.itae));
    println!("  RMSE           {}", Num(s.rmse));
    println!("  max |e|        {}", Num(s.max_abs_error));
    println!("  max σ(A)       {}", Num(s.max_spectral_radius));
    println!("  max Σ|a_i|     {}", Num(s.max_lemma1_bound));
    let ys: Vec<f64> = run.trace.records.iter().map(|r| r.y).collect();
    let us: Vec<f64> = run.trace.records.iter().map(|r| r.u).collect();
    println!("  y {}", sparkline(&ys, 64));
    println!("  u {}", sparkline(&us, 64));
    println!("wrote {}", dir.display());
    match run.divergence {
        Some(msg) => Err(CliError::Diverged(msg)),
        None => Ok(()),
    }
}

fn unique_names(configs: &[LoadedConfig]) -> Vec<String> {
    let mut names: Vec<String> = Vec::with_capacity(configs.len());
    for c in configs {
        let base = c.name();
        let mut name = base.clone();
        let mut n = 2;
        while names.contains(&name) {
            name = format!("{base}-{n}");
            n += 1;
        }
        names.push(name);
    }
    names
}

fn print_table(key: &str, rows: &[(String, MetricsSummary)]) {
    println!(
        "{key:<20} {:<6} {:<9} {:>12} {:>12} {:>12} {:>12}",
        "ctrl", "status", "eITAE", "RMSE", "max σ(A)", "max Σ|a_i|"
    );
    for (label, s) in rows {
        println!(
            "{label:<20} {:<6} {:<9} {} {} {} {}",
            s.controller,
            s.status,
            Num(s.e_itae),
            Num(s.rmse),
            Num(s.max_spectral_radius),
            Num(s.max_lemma1_bound)
        );
    }
}

fn divergence_error(runs: &[RunResult]) -> Result<()> {
    let msgs: Vec<&str> = runs.iter().filter_map(|r| r.divergence.as_deref()).collect();
    if msgs.is_empty() {
        Ok(())
    } else {
        Err(CliError::Diverged(msgs.join("; ")))
    }
}

fn cmd_compare(cli: &Cli, paths: &[PathBuf]) -> Result<()> {
    if paths.len() < 2 {
        return Err(CliError::Config("compare needs at least two configs".into()));
    }
    let configs: Vec<LoadedConfig> = paths.iter().map(|p| load_with_seed(cli, p)).collect::<Result<_>>()?;
    let first = &configs[0];
    for other in &configs[1..] {
        if other.config.plant != first.config.plant {
            return Err(CliError::Config(format!(
                "{} and {} use different plants",
                first.path.display(),
                other.path.display()
            )));
        }
        let same_reference = first.config.sim_config(first.base_dir())?.reference
            == other.config.sim_config(other.base_dir())?.reference;
        if !same_reference || other.config.run.steps != first.config.run.steps {
            return Err(CliError::Config(format!(
                "{} and {} use different references or run lengths",
                first.path.display(),
                other.path.display()
            )));
        }
    }
    let names = unique_names(&configs);
    let dir = out_dir(cli, first)?;
    let runs: Vec<RunResult> = pool(cli)?.install(|| {
        configs.par_iter().zip(&names).map(|(c, name)| simulate(c, name)).collect::<Result<_>>()
    })?;

    for run in &runs {
        let sub = dir.join(&run.name);
        fs::create_dir_all(&sub).map_err(CliError::io(&sub))?;
        write_run_files(&sub, run)?;
    }
    let rows: Vec<(String, MetricsSummary)> = runs.iter().map(|r| (r.name.clone(), r.summary())).collect();
    write_summary_table(&dir.join("compare.csv"), "name", &rows)?;
    write_plots(&dir, &runs.iter().collect::<Vec<_>>())?;
    print_table("name", &rows);
    println!("wrote {}", dir.display());
    divergence_error(&runs)
}

/// A sweepable tunable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    Lambda,
    Horizon,
    ControlHorizon,
    /// `ρ_i`, 1-based.
    Rho(usize),
    Eta,
    Mu,
}

impl FromStr for SweepParam {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "lambda" => SweepParam::Lambda,
            "N" => SweepParam::Horizon,
            "Nu" => SweepParam::ControlHorizon,
            "eta" => SweepParam::Eta,
            "mu" => SweepParam::Mu,
            _ => match s.strip_prefix("rho_").and_then(|i| i.parse::<usize>().ok()) {
                Some(i) if i >= 1 => SweepParam::Rho(i),
                _ => {
                    return Err(CliError::Config(format!(
                        "unknown sweep parameter `{s}` (expected lambda, N, Nu, rho_<i>, eta or mu)"
                    )))
                }
            },
        })
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SweepParam::Lambda => f.write_str("lambda"),
            SweepParam::Horizon => f.write_str("N"),
            SweepParam::ControlHorizon => f.write_str("Nu"),
            SweepParam::Rho(i) => write!(f, "rho_{i}"),
            SweepParam::Eta => f.write_str("eta"),
            SweepParam::Mu => f.write_str("mu"),
        }
    }
}

fn parse_count(param: SweepParam, raw: &str) -> Result<usize> {
    raw.trim()
        .parse()
        .map_err(|_| CliError::Config(format!("{param} value `{raw}` is not a non-negative integer")))
}

/// Returns a copy of `config` with `param` set to `raw`. Sweeping `N`
/// lowers `Nu` to `N` where needed.
pub fn apply_param(config: &LoadedConfig, param: SweepParam, raw: &str) -> Result<LoadedConfig> {
    let mut out = config.clone();
    let cfg = &mut out.config;
    let not_applicable = || CliError::Config(format!("parameter {param} does not apply to a {} controller", config.config.controller_kind()));
    let real = || -> Result<f64> {
        raw.trim().parse().map_err(|_| CliError::Config(format!("{param} value `{raw}` is not a number")))
    };
    match param {
        SweepParam::Lambda => match &mut cfg.controller {
            ControllerSection::Mfapc(c) => c.lambda = real()?,
            ControllerSection::Mfac(c) => c.lambda = real()?,
            ControllerSection::Pid(_) => return Err(not_applicable()),
        },
        SweepParam::Horizon => match &mut cfg.controller {
            ControllerSection::Mfapc(c) => {
                c.horizon = parse_count(param, raw)?;
                c.control_horizon = c.control_horizon.min(c.horizon);
            }
            _ => return Err(not_applicable()),
        },
        SweepParam::ControlHorizon => match &mut cfg.controller {
            ControllerSection::Mfapc(c) => c.control_horizon = parse_count(param, raw)?,
            _ => return Err(not_applicable()),
        },
        SweepParam::Rho(i) => {
            let rho = match &mut cfg.controller {
                ControllerSection::Mfapc(c) => &mut c.rho,
                ControllerSection::Mfac(c) => &mut c.rho,
                ControllerSection::Pid(_) => return Err(not_applicable()),
            };
            let len = rho.len();
            *rho.get_mut(i - 1).ok_or_else(|| CliError::Config(format!("rho_{i} out of range: rho has {len} entries")))? = real()?;
        }
        SweepParam::Eta | SweepParam::Mu => {
            let est = cfg.estimator.as_mut().ok_or_else(not_applicable)?;
            if param == SweepParam::Eta {
                est.eta = real()?;
            } else {
                est.mu = real()?;
            }
        }
    }
    cfg.check().map_err(|e| CliError::Config(format!("{param} = {raw}: {e}")))?;
    Ok(out)
}

fn cmd_sweep(cli: &Cli, path: &Path, param: &str, values: &[String]) -> Result<()> {
    let param: SweepParam = param.parse()?;
    let values: Vec<&str> = values.iter().map(|v| v.trim()).filter(|v| !v.is_empty()).collect();
    if values.is_empty() {
        return Err(CliError::Config("--values needs at least one value".into()));
    }
    let base = load_with_seed(cli, path)?;
    let variants: Vec<LoadedConfig> = values.iter().map(|v| apply_param(&base, param, v)).collect::<Result<_>>()?;
    let dir = out_dir(cli, &base)?;
    let runs: Vec<RunResult> = pool(cli)?.install(|| {
        variants
            .par_iter()
            .zip(&values)
            .map(|(c, v)| simulate(c, &format!("{}[{param}={v}]", base.name())))
            .collect::<Result<_>>()
    })?;

    let rows: Vec<(String, MetricsSummary)> =
        values.iter().zip(&runs).map(|(v, r)| (v.to_string(), r.summary())).collect();
    write_summary_table(&dir.join(format!("sweep_{param}.csv")), &param.to_string(), &rows)?;

    // Plot against the parsed value where possible, else the row index.
    let xs: Vec<f64> = values.iter().enumerate().map(|(i, v)| v.parse().unwrap_or(i as f64)).collect();
    let metric = |f: fn(&MetricsSummary) -> Option<f64>| -> Vec<(f64, f64)> {
        xs.iter().zip(&rows).filter_map(|(x, (_, s))| f(s).map(|y| (*x, y))).collect()
    };
    line_chart(
        &dir.join(format!("sweep_{param}.svg")),
        &format!("Error index vs {param}"),
        &param.to_string(),
        "Σ|e|",
        &[Series::new("eITAE", metric(|s| s.e_itae))],
    )?;
    let bound = metric(|s| s.max_lemma1_bound);
    if !bound.is_empty() {
        line_chart(
            &dir.join(format!("sweep_{param}_stability.svg")),
            &format!("Stability diagnostics vs {param}"),
            &param.to_string(),
            "run maximum",
            &[Series::new("Σ|a_i|", bound), Series::new("σ(A)", metric(|s| s.max_spectral_radius)).dashed()],
        )?;
    }
    print_table(&param.to_string(), &rows);
    println!("wrote {}", dir.display());
    divergence_error(&runs)
}

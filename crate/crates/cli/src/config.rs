//! TOML experiment files.
//!
//! `[controller]`, `[plant]` and `[reference]` are selected by their `kind`
//! key; unknown keys anywhere are rejected. Serializing a parsed file gives
//! its canonical form, which the bundled configs are stored in.

use std::fs;
use std::path::{Path, PathBuf};

use mfapc_core::plant::{Example1Structure, SecondBranchInputs};
use mfapc_core::sim::MeasurementNoise;
use mfapc_core::{
    ControllerSpec, EstimatorConfig, Example1Plant, ForecastMode, ForecasterConfig, MfacConfig, MfapcConfig,
    PgVector, PidConfig, Plant, ReferenceSpec, SimConfig, SyntheticPfdlPlant,
};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub controller: ControllerSection,
    /// Required by the adaptive controllers, absent for PID.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub estimator: Option<EstimatorSection>,
    pub plant: PlantSection,
    pub reference: ReferenceSection,
    pub run: RunSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ControllerSection {
    Mfapc(MfapcSection),
    Mfac(MfacSection),
    Pid(PidSection),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MfapcSection {
    pub order: usize,
    pub horizon: usize,
    pub control_horizon: usize,
    pub lambda: f64,
    pub rho: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MfacSection {
    pub order: usize,
    pub lambda: f64,
    pub rho: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PidSection {
    pub kp: f64,
    /// Integral time; omit for no integral action.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ti: Option<f64>,
    #[serde(default)]
    pub td: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ForecasterKind {
    Hold,
    AutoRegressive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatorSection {
    pub eta: f64,
    pub mu: f64,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    pub phi_init: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pg_bound: Option<f64>,
    #[serde(default = "default_forecaster")]
    pub forecaster: ForecasterKind,
    #[serde(default = "default_ar_order")]
    pub ar_order: usize,
    #[serde(default = "default_ar_ridge")]
    pub ar_ridge: f64,
}

fn default_epsilon() -> f64 {
    EstimatorConfig::default().epsilon
}
fn default_forecaster() -> ForecasterKind {
    ForecasterKind::Hold
}
fn default_ar_order() -> usize {
    ForecasterConfig::default().order
}
fn default_ar_ridge() -> f64 {
    ForecasterConfig::default().ridge
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SecondBranch {
    #[default]
    Lagged,
    Literal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PlantSection {
    /// The structure-varying benchmark plant.
    Example1(Example1Section),
    /// Its first (nonlinear) branch applied at every step.
    Example1Nonlinear(Example1Section),
    /// A linear PFDL plant with constant pseudo-gradient.
    Synthetic(SyntheticSection),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Example1Section {
    /// `y(−n+1) … y(0)`, oldest first.
    pub y_seed: Vec<f64>,
    /// `u(−n+1) … u(0)`, oldest first.
    pub u_seed: Vec<f64>,
    #[serde(default)]
    pub second_branch: SecondBranch,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticSection {
    pub phi_true: Vec<f64>,
    #[serde(default)]
    pub y0: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ReferenceSection {
    Square(SquareSection),
    Constant(ConstantSection),
    /// `k,y_star` CSV; a relative path is resolved against the config file.
    Table(TableSection),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SquareSection {
    pub amplitude: f64,
    pub switch_interval: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantSection {
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableSection {
    pub path: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub steps: usize,
    /// Feed `y*(k+1) … y*(k+N)` to the predictive law instead of holding `y*(k+1)`.
    #[serde(default = "default_true")]
    pub preview: bool,
    #[serde(default = "default_divergence_limit")]
    pub divergence_limit: f64,
    #[serde(default)]
    pub noise_amplitude: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
}

fn default_true() -> bool {
    true
}
fn default_divergence_limit() -> f64 {
    1e6
}

/// A parsed config together with the directory relative paths refer to.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedConfig {
    pub path: PathBuf,
    pub config: ExperimentConfig,
}

impl LoadedConfig {
    pub fn base_dir(&self) -> &Path {
        self.path.parent().unwrap_or(Path::new("."))
    }

    /// File stem, used to name per-run outputs.
    pub fn name(&self) -> String {
        self.path.file_stem().map_or_else(|| "run".into(), |s| s.to_string_lossy().into_owned())
    }
}

pub fn load(path: &Path) -> Result<LoadedConfig> {
    let text = fs::read_to_string(path).map_err(CliError::io(path))?;
    let config = parse(&text).map_err(|e| match e {
        CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
        other => other,
    })?;
    Ok(LoadedConfig { path: path.to_path_buf(), config })
}

pub fn parse(text: &str) -> Result<ExperimentConfig> {
    let config: ExperimentConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
    config.check()?;
    Ok(config)
}

impl ExperimentConfig {
    /// Canonical TOML text.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("experiment config is always representable in TOML")
    }

    /// Structural checks that do not need the filesystem.
    pub fn check(&self) -> Result<()> {
        let adaptive = !matches!(self.controller, ControllerSection::Pid(_));
        if adaptive && self.estimator.is_none() {
            return Err(CliError::Config("[estimator] section is required for adaptive controllers".into()));
        }
        let reference = match &self.reference {
            ReferenceSection::Table(_) => None,
            _ => Some(self.reference_spec(Path::new("."))?),
        };
        let sim = self.sim_config_with(reference.unwrap_or(ReferenceSpec::Constant { value: 0.0 }))?;
        sim.validate()?;
        self.build_plant()?;
        Ok(())
    }

    pub fn controller_spec(&self) -> ControllerSpec {
        match &self.controller {
            ControllerSection::Mfapc(c) => ControllerSpec::Mfapc(MfapcConfig {
                horizon: c.horizon,
                control_horizon: c.control_horizon,
                order: c.order,
                lambda: c.lambda,
                rho: c.rho.clone(),
            }),
            ControllerSection::Mfac(c) => {
                ControllerSpec::Mfac(MfacConfig { order: c.order, lambda: c.lambda, rho: c.rho.clone() })
            }
            ControllerSection::Pid(c) => ControllerSpec::Pid(PidConfig { kp: c.kp, ti: c.ti, td: c.td }),
        }
    }

    pub fn controller_kind(&self) -> &'static str {
        match self.controller {
            ControllerSection::Mfapc(_) => "mfapc",
            ControllerSection::Mfac(_) => "mfac",
            ControllerSection::Pid(_) => "pid",
        }
    }

    /// Resolves the reference, reading a table file if needed.
    pub fn reference_spec(&self, base_dir: &Path) -> Result<ReferenceSpec> {
        let spec = match &self.reference {
            ReferenceSection::Square(s) => {
                ReferenceSpec::Square { amplitude: s.amplitude, switch_interval: s.switch_interval }
            }
            ReferenceSection::Constant(c) => ReferenceSpec::Constant { value: c.value },
            ReferenceSection::Table(t) => ReferenceSpec::Table { points: load_reference_table(&base_dir.join(&t.path))? },
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn sim_config(&self, base_dir: &Path) -> Result<SimConfig> {
        let sim = self.sim_config_with(self.reference_spec(base_dir)?)?;
        sim.validate()?;
        Ok(sim)
    }

    fn sim_config_with(&self, reference: ReferenceSpec) -> Result<SimConfig> {
        let (estimator, phi_init, forecaster) = match &self.estimator {
            Some(e) => (
                EstimatorConfig { eta: e.eta, mu: e.mu, epsilon: e.epsilon, pg_bound: e.pg_bound },
                e.phi_init.clone(),
                ForecasterConfig {
                    mode: match e.forecaster {
                        ForecasterKind::Hold => ForecastMode::Hold,
                        ForecasterKind::AutoRegressive => ForecastMode::AutoRegressive,
                    },
                    order: e.ar_order,
                    ridge: e.ar_ridge,
                    bound: e.pg_bound,
                },
            ),
            None => (EstimatorConfig::default(), Vec::new(), ForecasterConfig::default()),
        };
        let noise = (self.run.noise_amplitude != 0.0)
            .then_some(MeasurementNoise { amplitude: self.run.noise_amplitude, seed: self.run.seed });
        Ok(SimConfig {
            controller: self.controller_spec(),
            estimator,
            phi_init,
            forecaster,
            reference,
            preview: self.run.preview,
            steps: self.run.steps,
            divergence_limit: self.run.divergence_limit,
            noise,
        })
    }

    pub fn build_plant(&self) -> Result<Box<dyn Plant>> {
        Ok(match &self.plant {
            PlantSection::Example1(p) => Box::new(example1(p, Example1Structure::Switching)?),
            PlantSection::Example1Nonlinear(p) => Box::new(example1(p, Example1Structure::NonlinearOnly)?),
            PlantSection::Synthetic(s) => Box::new(SyntheticPfdlPlant::new(PgVector::from_slice(&s.phi_true)?, s.y0)),
        })
    }
}

fn example1(p: &Example1Section, structure: Example1Structure) -> Result<Example1Plant> {
    let second = match p.second_branch {
        SecondBranch::Lagged => SecondBranchInputs::Lagged,
        SecondBranch::Literal => SecondBranchInputs::Literal,
    };
    Ok(Example1Plant::new(&p.y_seed, &p.u_seed, structure, second)?)
}

#[derive(Debug, Deserialize)]
struct TableRow {
    k: u64,
    y_star: f64,
}

/// Reads a `k,y_star` CSV with a header row.
pub fn load_reference_table(path: &Path) -> Result<Vec<(u64, f64)>> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| match e.kind() {
        csv::ErrorKind::Io(_) => CliError::Output { path: path.to_path_buf(), message: e.to_string() },
        _ => CliError::Config(format!("{}: {e}", path.display())),
    })?;
    reader
        .deserialize::<TableRow>()
        .map(|row| {
            row.map(|r| (r.k, r.y_star))
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
        })
        .collect()
}

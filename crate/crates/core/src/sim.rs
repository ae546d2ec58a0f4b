//! Closed-loop simulation: estimate → reset → forecast → assemble →
//! control → actuate → plant step, one iteration per sample.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::controller::{
    mfac_control_increment, mfapc_apply, mfapc_control_increment, mfapc_nu1_control_increment, MfapcConfig,
    ReferencePreview,
};
use crate::diagnostics::stability_diagnostic;
use crate::error::{Error, Result};
use crate::estimator::{Estimator, EstimatorConfig};
use crate::forecast::{Forecaster, ForecasterConfig};
use crate::metrics::{compute_metrics, Metrics};
use crate::model::{assemble_prediction, ControlWindow, PgVector};
use crate::pid::{pid_step, PidConfig, PidState};
use crate::plant::Plant;
use crate::reference::ReferenceSpec;

/// One-step MFAC tunables (`N = Nu = 1`).
#[derive(Debug, Clone, PartialEq)]
pub struct MfacConfig {
    pub order: usize,
    pub lambda: f64,
    pub rho: Vec<f64>,
}

impl MfacConfig {
    pub fn as_mfapc(&self) -> MfapcConfig {
        MfapcConfig::one_step(self.order, self.lambda, self.rho.clone())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ControllerSpec {
    Mfapc(MfapcConfig),
    Mfac(MfacConfig),
    Pid(PidConfig),
}

impl ControllerSpec {
    /// Pseudo order of the adaptive controllers; `None` for PID.
    pub fn order(&self) -> Option<usize> {
        match self {
            ControllerSpec::Mfapc(c) => Some(c.order),
            ControllerSpec::Mfac(c) => Some(c.order),
            ControllerSpec::Pid(_) => None,
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            ControllerSpec::Mfapc(c) => c.validate(),
            ControllerSpec::Mfac(c) => c.as_mfapc().validate(),
            ControllerSpec::Pid(c) => c.validate(),
        }
    }
}

/// Additive measurement noise, uniform on `[−amplitude, amplitude]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementNoise {
    pub amplitude: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub controller: ControllerSpec,
    pub estimator: EstimatorConfig,
    /// Initial PG estimate `φ̂(1)`; ignored for PID.
    pub phi_init: Vec<f64>,
    pub forecaster: ForecasterConfig,
    pub reference: ReferenceSpec,
    /// Use `y*(k+1) … y*(k+N)` from the reference; otherwise hold `y*(k+1)`.
    pub preview: bool,
    pub steps: usize,
    /// `|y| > divergence_limit` aborts the run.
    pub divergence_limit: f64,
    pub noise: Option<MeasurementNoise>,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        self.controller.validate()?;
        self.reference.validate()?;
        if self.steps == 0 {
            return Err(Error::InvalidDimension { what: "run length" });
        }
        if self.divergence_limit.is_nan() || self.divergence_limit <= 0.0 {
            return Err(Error::InvalidParameter { name: "divergence_limit", reason: "must be positive" });
        }
        if let Some(n) = self.noise {
            if !(n.amplitude >= 0.0 && n.amplitude.is_finite()) {
                return Err(Error::InvalidParameter { name: "noise_amplitude", reason: "must be non-negative" });
            }
        }
        if let Some(order) = self.controller.order() {
            crate::error::ensure_len("phi_init (expects L entries)", order, self.phi_init.len())?;
            self.estimator.validate()?;
            self.forecaster.validate()?;
        }
        Ok(())
    }
}

/// One row of a [`SimTrace`].
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub k: usize,
    /// Measured output `y(k)`.
    pub y: f64,
    /// The target the controller pursues at step k, `y*(k+1)`.
    pub y_star: f64,
    /// `y_star − y`.
    pub e: f64,
    pub u: f64,
    /// `u(k) − u(k−1)`.
    pub du: f64,
    /// `φ̂(k)` after update and reset; empty for PID.
    pub phi: Vec<f64>,
    pub sigma_a: Option<f64>,
    pub lemma1_bound: Option<f64>,
    pub reset: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SimTrace {
    pub records: Vec<StepRecord>,
}

impl SimTrace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Number of PG components recorded per step.
    pub fn order(&self) -> usize {
        self.records.first().map_or(0, |r| r.phi.len())
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct DiagnosticsReport {
    /// `σ(A(k))` per step; empty for PID.
    pub spectral_radius: Vec<f64>,
    /// First-row absolute sum of `A(k)` per step; empty for PID.
    pub lemma1_bound: Vec<f64>,
    /// Steps where `‖φ̂(k)‖` exceeded the configured bound after clamping.
    pub pg_bound_violations: usize,
    /// Steps where the raw projection update had to be clamped.
    pub pg_clamp_events: usize,
    pub max_window_norm: f64,
}

impl DiagnosticsReport {
    pub fn max_spectral_radius(&self) -> Option<f64> {
        self.spectral_radius.iter().copied().reduce(f64::max)
    }

    pub fn max_lemma1_bound(&self) -> Option<f64> {
        self.lemma1_bound.iter().copied().reduce(f64::max)
    }

    /// Steps where the sufficient bound holds but `σ(A(k)) ≥ 1`.
    pub fn lemma1_inconsistencies(&self) -> usize {
        self.spectral_radius
            .iter()
            .zip(&self.lemma1_bound)
            .filter(|(&s, &b)| b < 1.0 && s >= 1.0)
            .count()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimOutcome {
    pub trace: SimTrace,
    pub metrics: Metrics,
    pub diagnostics: DiagnosticsReport,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SimError {
    Config(Error),
    /// The output left `[−limit, limit]` or became non-finite at `step`.
    Diverged {
        step: usize,
        value: f64,
        trace: Box<SimTrace>,
        diagnostics: Box<DiagnosticsReport>,
    },
}

impl From<Error> for SimError {
    fn from(e: Error) -> Self {
        SimError::Config(e)
    }
}

impl fmt::Display for SimError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimError::Config(e) => write!(f, "{e}"),
            SimError::Diverged { step, value, trace, .. } => write!(
                f,
                "closed loop diverged at step {step} (y = {value}); {} steps recorded",
                trace.len()
            ),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for SimError {}

#[cfg(feature = "std")]
extern crate std;

enum Law {
    Mfapc(MfapcConfig),
    Mfac(MfapcConfig),
    Pid(PidConfig, PidState),
}

struct Adaptive {
    estimator: Estimator,
    forecaster: Forecaster,
}

/// Runs `cfg.steps` samples of the closed loop on `plant`, starting from
/// its current output.
pub fn run_closed_loop(plant: &mut dyn Plant, cfg: &SimConfig) -> core::result::Result<SimOutcome, SimError> {
    cfg.validate()?;

    let mut law = match &cfg.controller {
        ControllerSpec::Mfapc(c) => Law::Mfapc(c.clone()),
        ControllerSpec::Mfac(c) => Law::Mfac(c.as_mfapc()),
        ControllerSpec::Pid(c) => Law::Pid(*c, PidState::default()),
    };
    let order = cfg.controller.order();
    let mut adaptive = match order {
        Some(_) => {
            let mut est_cfg = cfg.estimator;
            let mut fc_cfg = cfg.forecaster;
            fc_cfg.bound = fc_cfg.bound.or(est_cfg.pg_bound);
            est_cfg.pg_bound = est_cfg.pg_bound.or(fc_cfg.bound);
            Some(Adaptive {
                estimator: Estimator::new(est_cfg, PgVector::from_slice(&cfg.phi_init)?)?,
                forecaster: Forecaster::new(fc_cfg)?,
            })
        }
        None => None,
    };

    // Past inputs newest first: u(0), u(−1), …
    let past_u = plant.past_inputs();
    let mut u_prev = past_u.first().copied().unwrap_or(0.0);
    let window_len = order.unwrap_or(1);
    let deltas: Vec<f64> = (0..window_len)
        .map(|i| match (past_u.get(i), past_u.get(i + 1)) {
            (Some(a), Some(b)) => a - b,
            (Some(a), None) => *a,
            _ => 0.0,
        })
        .collect();
    let mut window = ControlWindow::from_newest_first(deltas)?;

    let mut rng = cfg.noise.map(|n| (n.amplitude, ChaCha8Rng::seed_from_u64(n.seed)));
    let mut measure = |y: f64| match rng.as_mut() {
        Some((a, r)) if *a > 0.0 => y + r.random_range(-*a..=*a),
        _ => y,
    };

    let mut trace = SimTrace { records: Vec::with_capacity(cfg.steps) };
    let mut diag = DiagnosticsReport::default();
    let k0 = plant.step_index().max(1) as u64;

    let diverged = |step: usize, value: f64, trace: SimTrace, diag: DiagnosticsReport| SimError::Diverged {
        step,
        value,
        trace: Box::new(trace),
        diagnostics: Box::new(diag),
    };

    let mut y_true = plant.output();
    if !y_true.is_finite() || y_true.abs() > cfg.divergence_limit {
        return Err(diverged(1, y_true, trace, diag));
    }
    let mut y_prev_meas: Option<f64> = None;

    for k in 1..=cfg.steps {
        let time = k0 + (k as u64 - 1);
        let y = measure(y_true);

        let mut reset = false;
        let mut phi_rec = Vec::new();
        let mut phi_seq = Vec::new();
        if let Some(ad) = adaptive.as_mut() {
            if let Some(y_prev) = y_prev_meas {
                let outcome = ad.estimator.estimate(y - y_prev, &window)?;
                if outcome.clamped {
                    diag.pg_clamp_events += 1;
                }
            }
            reset = ad.estimator.reset();
            let phi = ad.estimator.phi_hat().clone();
            if let Some(b) = ad.estimator.config().pg_bound {
                if phi.norm() > b * (1.0 + 1e-12) {
                    diag.pg_bound_violations += 1;
                }
            }
            ad.forecaster.observe(&phi)?;
            phi_rec = phi.as_slice().to_vec();
            let horizon = match &law {
                Law::Mfapc(c) => c.horizon,
                _ => 1,
            };
            phi_seq.push(phi);
            phi_seq.extend(ad.forecaster.forecast(horizon - 1)?);
        }

        let y_star = cfg.reference.value(time + 1)?;
        let (du_raw, stability) = match &mut law {
            Law::Mfapc(c) => {
                let pm = assemble_prediction(&phi_seq, c.horizon, c.control_horizon)?;
                let preview: Vec<f64> = if cfg.preview {
                    (1..=c.horizon as u64)
                        .map(|i| cfg.reference.value(time + i))
                        .collect::<Result<_>>()?
                } else {
                    vec![y_star; c.horizon]
                };
                let preview = ReferencePreview::new(preview)?;
                let du = if c.control_horizon == 1 {
                    mfapc_nu1_control_increment(c, &pm, y, &preview, &window)?
                } else {
                    mfapc_apply(mfapc_control_increment(c, &pm, y, &preview, &window)?.as_slice(), 0.0)
                };
                (du, Some(stability_diagnostic(c, &pm)?))
            }
            Law::Mfac(c) => {
                let du = mfac_control_increment(&phi_seq[0], y, y_star, &window, c.lambda, &c.rho)?;
                let pm = assemble_prediction(&phi_seq, 1, 1)?;
                (du, Some(stability_diagnostic(c, &pm)?))
            }
            Law::Pid(c, state) => (pid_step(c, y_star - y, state), None),
        };

        let u = u_prev + du_raw;
        let du = u - u_prev;
        window.push(du);
        diag.max_window_norm = diag.max_window_norm.max(window.norm());
        let (sigma_a, lemma1_bound) = match stability {
            Some(s) => {
                diag.spectral_radius.push(s.spectral_radius);
                diag.lemma1_bound.push(s.lemma1_bound);
                (Some(s.spectral_radius), Some(s.lemma1_bound))
            }
            None => (None, None),
        };
        trace.records.push(StepRecord {
            k: time as usize,
            y,
            y_star,
            e: y_star - y,
            u,
            du,
            phi: phi_rec,
            sigma_a,
            lemma1_bound,
            reset,
        });
        u_prev = u;
        y_prev_meas = Some(y);

        if k < cfg.steps {
            y_true = plant.step(u)?;
            if !y_true.is_finite() || y_true.abs() > cfg.divergence_limit {
                return Err(diverged(time as usize + 1, y_true, trace, diag));
            }
        }
    }

    let metrics = compute_metrics(&trace)?;
    Ok(SimOutcome { trace, metrics, diagnostics: diag })
}

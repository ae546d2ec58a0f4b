//! Model-free adaptive predictive control built on the partial-form
//! dynamic linearization (PFDL) data model.
//!
//! The crate is `no_std` (it needs `alloc`) and contains the numerical
//! core only:
//!
//! * [`model`]: PG vectors, increment windows, predictive matrices `Ψ̃`, `Ψ̄`
//! * [`estimator`] and [`forecast`]: online PG estimation, reset rule, PG forecasts
//! * [`controller`] and [`pid`]: receding-horizon law, its `Nu = 1` and
//!   one-step (MFAC) special cases, and an incremental PID baseline
//! * [`plant`] and [`reference`]: benchmark plants and trajectories
//! * [`sim`], [`metrics`], [`diagnostics`]: closed-loop runs, error
//!   indices and companion-matrix stability checks
//!
//! File formats, configuration and the command-line front end live in the
//! `mfapc` crate.

#![no_std]

extern crate alloc;

pub mod controller;
pub mod diagnostics;
pub mod error;
pub mod estimator;
pub mod forecast;
pub mod metrics;
pub mod model;
pub mod pid;
pub mod plant;
pub mod presets;
pub mod reference;
pub mod sim;

pub use controller::{MfapcConfig, ReferencePreview};
pub use error::{Error, Result};
pub use estimator::{Estimator, EstimatorConfig};
pub use forecast::{ForecastMode, Forecaster, ForecasterConfig};
pub use metrics::Metrics;
pub use model::{ControlWindow, PgVector, PredictionMatrices};
pub use pid::PidConfig;
pub use plant::{Example1Plant, Plant, SyntheticPfdlPlant};
pub use reference::ReferenceSpec;
pub use sim::{run_closed_loop, ControllerSpec, MfacConfig, SimConfig, SimError, SimOutcome, SimTrace};

//! The structure-varying benchmark settings: plant seeds, reference and
//! the three controller tunings compared on it.

use alloc::vec;

use crate::controller::MfapcConfig;
use crate::error::Result;
use crate::estimator::EstimatorConfig;
use crate::forecast::ForecasterConfig;
use crate::pid::PidConfig;
use crate::plant::{Example1Plant, Example1Structure, SecondBranchInputs};
use crate::reference::ReferenceSpec;
use crate::sim::{ControllerSpec, MfacConfig, SimConfig};

/// Output seed `y(−4) … y(0)`.
pub const EXAMPLE1_Y_SEED: [f64; 5] = [0.0, 0.0, 0.0, 1.0, 0.0];
/// Input seed `u(−4) … u(0)`.
pub const EXAMPLE1_U_SEED: [f64; 5] = [0.0; 5];
pub const EXAMPLE1_STEPS: usize = 400;

pub fn example1_plant() -> Result<Example1Plant> {
    Example1Plant::new(
        &EXAMPLE1_Y_SEED,
        &EXAMPLE1_U_SEED,
        Example1Structure::Switching,
        SecondBranchInputs::Lagged,
    )
}

fn base(controller: ControllerSpec, phi_init: alloc::vec::Vec<f64>) -> SimConfig {
    SimConfig {
        controller,
        estimator: EstimatorConfig { eta: 0.5, mu: 2.0, epsilon: 1e-5, pg_bound: None },
        phi_init,
        forecaster: ForecasterConfig::default(),
        reference: ReferenceSpec::example1(),
        preview: true,
        steps: EXAMPLE1_STEPS,
        divergence_limit: 1e6,
        noise: None,
    }
}

/// L = 2, N = Nu = 3, λ = 0.01, ρ = 0.5.
pub fn example1_mfapc() -> SimConfig {
    base(
        ControllerSpec::Mfapc(MfapcConfig {
            horizon: 3,
            control_horizon: 3,
            order: 2,
            lambda: 0.01,
            rho: vec![0.5; 3],
        }),
        vec![1.0, 0.0],
    )
}

/// L = 3, λ = 0.01, ρ = 0.5 (ρ₄ extended from ρ₁…ρ₃).
pub fn example1_mfac() -> SimConfig {
    base(
        ControllerSpec::Mfac(MfacConfig { order: 3, lambda: 0.01, rho: vec![0.5; 4] }),
        vec![1.0, 0.0, 0.0],
    )
}

/// kp = 0.15, Ti = 0.5, Td = 0.
pub fn example1_pid() -> SimConfig {
    base(ControllerSpec::Pid(PidConfig { kp: 0.15, ti: Some(0.5), td: 0.0 }), vec![])
}

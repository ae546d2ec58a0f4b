//! Online pseudo-gradient estimation: the normalized projection update and
//! the reset rule that keeps the estimate away from zero and sign-consistent.

use crate::error::{Error, Result};
use crate::model::{ControlWindow, PgVector};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorConfig {
    /// Step size η, `0 < η ≤ 2`.
    pub eta: f64,
    /// Regularizer μ > 0 in the update denominator.
    pub mu: f64,
    /// Reset threshold ε > 0 on `‖φ̂‖`.
    pub epsilon: f64,
    /// Optional bound b: estimates are scaled back onto `‖φ̂‖ ≤ b`.
    pub pg_bound: Option<f64>,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self {
            eta: 0.5,
            mu: 2.0,
            epsilon: 1e-5,
            pg_bound: None,
        }
    }
}

impl EstimatorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0 && self.eta <= 2.0) {
            return Err(Error::InvalidParameter { name: "eta", reason: "must lie in (0, 2]" });
        }
        if !(self.mu > 0.0 && self.mu.is_finite()) {
            return Err(Error::InvalidParameter { name: "mu", reason: "must be positive" });
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidParameter { name: "epsilon", reason: "must be positive" });
        }
        if let Some(b) = self.pg_bound {
            if !(b > 0.0 && b.is_finite()) {
                return Err(Error::InvalidParameter { name: "pg_bound", reason: "must be positive" });
            }
        }
        Ok(())
    }
}

/// `sign` with `sign(0) = +1`, which makes the reset rule total.
#[inline]
pub fn sign(x: f64) -> f64 {
    if x >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// Projection update
/// `φ̂(k) = φ̂(k-1) + η ΔU(k-1) (Δy(k) - φ̂(k-1)ᵀΔU(k-1)) / (μ + ‖ΔU(k-1)‖²)`.
pub fn projection_update(
    phi_prev: &PgVector,
    eta: f64,
    mu: f64,
    delta_y: f64,
    window_prev: &ControlWindow,
) -> Result<PgVector> {
    let innovation = delta_y - phi_prev.dot(window_prev)?;
    let du = window_prev.as_dvector();
    let gain = eta * innovation / (mu + du.norm_squared());
    Ok(PgVector::from_dvector_unchecked(phi_prev.as_dvector() + du * gain))
}

/// True when the reset rule fires: `‖φ̂‖ ≤ ε` or the leading sign differs
/// from the initial estimate.
pub fn needs_reset(phi: &PgVector, phi_init: &PgVector, epsilon: f64) -> bool {
    phi.norm() <= epsilon || sign(phi.leading()) != sign(phi_init.leading())
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct UpdateOutcome {
    /// The raw update exceeded the PG bound and was scaled back.
    pub clamped: bool,
}

/// Estimator memory: current estimate, the initial estimate used for
/// resets, and the tunables.
#[derive(Debug, Clone, PartialEq)]
pub struct Estimator {
    config: EstimatorConfig,
    phi_hat: PgVector,
    phi_init: PgVector,
}

impl Estimator {
    pub fn new(config: EstimatorConfig, phi_init: PgVector) -> Result<Self> {
        config.validate()?;
        if phi_init.norm() <= config.epsilon {
            return Err(Error::InvalidParameter {
                name: "phi_init",
                reason: "norm must exceed the reset threshold epsilon",
            });
        }
        if let Some(b) = config.pg_bound {
            if phi_init.norm() > b {
                return Err(Error::InvalidParameter {
                    name: "phi_init",
                    reason: "norm must not exceed pg_bound",
                });
            }
        }
        Ok(Self {
            config,
            phi_hat: phi_init.clone(),
            phi_init,
        })
    }

    pub fn config(&self) -> &EstimatorConfig {
        &self.config
    }

    pub fn phi_hat(&self) -> &PgVector {
        &self.phi_hat
    }

    pub fn phi_init(&self) -> &PgVector {
        &self.phi_init
    }

    pub fn order(&self) -> usize {
        self.phi_hat.len()
    }

    /// Overwrites the current estimate; mainly for tests and warm starts.
    pub fn set_phi_hat(&mut self, phi: PgVector) -> Result<()> {
        crate::error::ensure_len("estimate", self.order(), phi.len())?;
        self.phi_hat = phi;
        Ok(())
    }

    /// Applies one projection step with `Δy(k)` and `ΔU_L(k-1)`.
    pub fn estimate(&mut self, delta_y: f64, window_prev: &ControlWindow) -> Result<UpdateOutcome> {
        let mut next = projection_update(
            &self.phi_hat,
            self.config.eta,
            self.config.mu,
            delta_y,
            window_prev,
        )?;
        if !next.is_finite() {
            return Err(Error::NonFinite { what: "PG estimate" });
        }
        let clamped = match self.config.pg_bound {
            Some(b) => next.clamp_norm(b),
            None => false,
        };
        self.phi_hat = next;
        Ok(UpdateOutcome { clamped })
    }

    /// Restores the initial estimate if the reset rule fires. Returns whether it fired.
    pub fn reset(&mut self) -> bool {
        if needs_reset(&self.phi_hat, &self.phi_init, self.config.epsilon) {
            self.phi_hat = self.phi_init.clone();
            true
        } else {
            false
        }
    }
}

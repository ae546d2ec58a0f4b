//! Incremental (velocity-form) PID baseline with unit sample time.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PidConfig {
    pub kp: f64,
    /// Integral time; `None` disables the integral action.
    pub ti: Option<f64>,
    pub td: f64,
}

impl PidConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.kp >= 0.0 && self.kp.is_finite()) {
            return Err(Error::InvalidParameter { name: "kp", reason: "must be non-negative" });
        }
        if let Some(ti) = self.ti {
            if !(ti > 0.0 && ti.is_finite()) {
                return Err(Error::InvalidParameter { name: "ti", reason: "must be positive" });
            }
        }
        if !(self.td >= 0.0 && self.td.is_finite()) {
            return Err(Error::InvalidParameter { name: "td", reason: "must be non-negative" });
        }
        Ok(())
    }
}

/// Past errors `e(k-1)`, `e(k-2)`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PidState {
    pub e_prev: f64,
    pub e_prev2: f64,
}

/// `Δu(k) = kp[(e(k) − e(k−1)) + e(k)/Ti + Td(e(k) − 2e(k−1) + e(k−2))]`.
pub fn pid_step(cfg: &PidConfig, e_k: f64, state: &mut PidState) -> f64 {
    let proportional = e_k - state.e_prev;
    let integral = cfg.ti.map_or(0.0, |ti| e_k / ti);
    let derivative = cfg.td * (e_k - 2.0 * state.e_prev + state.e_prev2);
    state.e_prev2 = state.e_prev;
    state.e_prev = e_k;
    cfg.kp * (proportional + integral + derivative)
}

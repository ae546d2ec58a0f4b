//! Receding-horizon control laws built on the PFDL predictor.
//!
//! The general law solves
//!
//! ```text
//! ΔU_Nu(k) = (Ψ̃ᵀΨ̃ + λI)⁻¹ Ψ̃ᵀ [ρ₁(Y*_N(k+1) − E·y(k)) − Ψ̄·Λ·ΔU_L(k−1)]
//! ```
//!
//! with `Λ = diag(ρ₂ … ρ_{L+1})`, and only the first increment is applied.
//! With `Nu = 1` the normal matrix is a scalar, and with `N = Nu = 1` the
//! law collapses to the one-step MFAC update.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::error::{ensure_finite, ensure_len, Error, Result};
use crate::model::{ControlWindow, PgVector, PredictionMatrices};

#[derive(Debug, Clone, PartialEq)]
pub struct MfapcConfig {
    /// Prediction horizon N ≥ 1.
    pub horizon: usize,
    /// Control horizon 1 ≤ Nu ≤ N.
    pub control_horizon: usize,
    /// Pseudo order L ≥ 1.
    pub order: usize,
    /// Control-increment weight λ > 0.
    pub lambda: f64,
    /// Step factors `ρ₁ … ρ_{L+1}`, each in (0, 1].
    pub rho: Vec<f64>,
}

impl MfapcConfig {
    /// One-step configuration (`N = Nu = 1`), i.e. plain MFAC.
    pub fn one_step(order: usize, lambda: f64, rho: Vec<f64>) -> Self {
        Self { horizon: 1, control_horizon: 1, order, lambda, rho }
    }

    pub fn validate(&self) -> Result<()> {
        if self.horizon == 0 {
            return Err(Error::InvalidDimension { what: "prediction horizon N" });
        }
        if self.control_horizon == 0 {
            return Err(Error::InvalidDimension { what: "control horizon Nu" });
        }
        if self.order == 0 {
            return Err(Error::InvalidDimension { what: "pseudo order L" });
        }
        if self.control_horizon > self.horizon {
            return Err(Error::InvalidParameter {
                name: "control_horizon",
                reason: "Nu must not exceed N",
            });
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::InvalidParameter { name: "lambda", reason: "must be positive" });
        }
        validate_rho(&self.rho, self.order)
    }

    /// `ρ₁`.
    pub fn rho_error(&self) -> f64 {
        self.rho[0]
    }

    /// Diagonal of `Λ = diag(ρ₂ … ρ_{L+1})`.
    pub fn rho_window(&self) -> &[f64] {
        &self.rho[1..]
    }
}

fn validate_rho(rho: &[f64], order: usize) -> Result<()> {
    ensure_len("rho (expects L + 1 entries)", order + 1, rho.len())?;
    if rho.iter().all(|&r| r > 0.0 && r <= 1.0) {
        Ok(())
    } else {
        Err(Error::InvalidParameter { name: "rho", reason: "every entry must lie in (0, 1]" })
    }
}

/// Desired outputs `[y*(k+1) … y*(k+N)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferencePreview(DVector<f64>);

impl ReferencePreview {
    pub fn new(y_star: Vec<f64>) -> Result<Self> {
        if y_star.is_empty() {
            return Err(Error::InvalidDimension { what: "reference preview length" });
        }
        ensure_finite("reference preview", &y_star)?;
        Ok(Self(DVector::from_vec(y_star)))
    }

    /// Constant preview of length `n`.
    pub fn constant(value: f64, n: usize) -> Result<Self> {
        Self::new(alloc::vec![value; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        self.0.as_slice()
    }

    pub fn as_dvector(&self) -> &DVector<f64> {
        &self.0
    }
}

fn check_shapes(
    cfg: &MfapcConfig,
    pm: &PredictionMatrices,
    y_k: f64,
    preview: &ReferencePreview,
    delta_u_past: &ControlWindow,
) -> Result<()> {
    cfg.validate()?;
    ensure_len("prediction horizon", cfg.horizon, pm.horizon())?;
    ensure_len("control horizon", cfg.control_horizon, pm.control_horizon())?;
    ensure_len("pseudo order", cfg.order, pm.order())?;
    ensure_len("reference preview", cfg.horizon, preview.len())?;
    ensure_len("past increment window", cfg.order, delta_u_past.len())?;
    if !y_k.is_finite() {
        return Err(Error::NonFinite { what: "measured output" });
    }
    ensure_finite("prediction matrices", pm.psi_tilde.as_slice())?;
    ensure_finite("prediction matrices", pm.psi_bar.as_slice())?;
    Ok(())
}

/// Right-hand side `ρ₁(Y* − E·y(k)) − Ψ̄·Λ·ΔU_L(k−1)`.
fn target_vector(
    cfg: &MfapcConfig,
    pm: &PredictionMatrices,
    y_k: f64,
    preview: &ReferencePreview,
    delta_u_past: &ControlWindow,
) -> DVector<f64> {
    let weighted_past = delta_u_past
        .as_dvector()
        .component_mul(&DVector::from_column_slice(cfg.rho_window()));
    (preview.as_dvector() - &pm.e * y_k) * cfg.rho_error() - &pm.psi_bar * weighted_past
}

fn normal_matrix(psi_tilde: &DMatrix<f64>, lambda: f64) -> DMatrix<f64> {
    let nu = psi_tilde.ncols();
    psi_tilde.transpose() * psi_tilde + DMatrix::identity(nu, nu) * lambda
}

/// Full optimal increment sequence `ΔU_Nu(k)`.
pub fn mfapc_control_increment(
    cfg: &MfapcConfig,
    pm: &PredictionMatrices,
    y_k: f64,
    preview: &ReferencePreview,
    delta_u_past: &ControlWindow,
) -> Result<DVector<f64>> {
    check_shapes(cfg, pm, y_k, preview, delta_u_past)?;
    let rhs = pm.psi_tilde.transpose() * target_vector(cfg, pm, y_k, preview, delta_u_past);
    let chol = normal_matrix(&pm.psi_tilde, cfg.lambda)
        .cholesky()
        .expect("Ψ̃ᵀΨ̃ + λI is symmetric positive definite for λ > 0");
    Ok(chol.solve(&rhs))
}

/// `Nu = 1` law: the normal matrix is the scalar `ψᵀψ + λ`.
pub fn mfapc_nu1_control_increment(
    cfg: &MfapcConfig,
    pm: &PredictionMatrices,
    y_k: f64,
    preview: &ReferencePreview,
    delta_u_past: &ControlWindow,
) -> Result<f64> {
    if cfg.control_horizon != 1 {
        return Err(Error::InvalidParameter {
            name: "control_horizon",
            reason: "scalar law requires Nu = 1",
        });
    }
    check_shapes(cfg, pm, y_k, preview, delta_u_past)?;
    let psi = pm.psi_tilde.column(0);
    let target = target_vector(cfg, pm, y_k, preview, delta_u_past);
    Ok(psi.dot(&target) / (psi.norm_squared() + cfg.lambda))
}

/// One-step MFAC increment:
///
/// ```text
/// Δu(k) = [ρ₁φ₁(y* − y(k)) − φ₁ Σ_{i=2..L} ρᵢ φᵢ Δu(k−i+1)] / (λ + φ₁²)
/// ```
pub fn mfac_control_increment(
    phi_hat: &PgVector,
    y_k: f64,
    y_star: f64,
    delta_u_past: &ControlWindow,
    lambda: f64,
    rho: &[f64],
) -> Result<f64> {
    let order = phi_hat.len();
    ensure_len("past increment window", order, delta_u_past.len())?;
    validate_rho(rho, order)?;
    if lambda.is_nan() || lambda <= 0.0 {
        return Err(Error::InvalidParameter { name: "lambda", reason: "must be positive" });
    }
    let phi1 = phi_hat.leading();
    let past = delta_u_past.as_slice();
    // φᵢ pairs with Δu(k−i+1) = past[i−2].
    let memory: f64 = (2..=order).map(|i| rho[i - 1] * phi_hat.get(i - 1) * past[i - 2]).sum();
    Ok(phi1 * (rho[0] * (y_star - y_k) - memory) / (lambda + phi1 * phi1))
}

/// Receding-horizon application: `u(k) = u(k−1) + gᵀΔU_Nu(k)` with `g = e₁`.
pub fn mfapc_apply(delta_u: &[f64], u_prev: f64) -> f64 {
    u_prev + delta_u.first().copied().unwrap_or(0.0)
}

/// Row vector `P = gᵀ(Ψ̃ᵀΨ̃ + λI)⁻¹Ψ̃ᵀ` (length N): the map from the
/// right-hand side to the applied increment.
pub fn applied_gain_row(psi_tilde: &DMatrix<f64>, lambda: f64) -> DVector<f64> {
    let nu = psi_tilde.ncols();
    let chol = normal_matrix(psi_tilde, lambda)
        .cholesky()
        .expect("Ψ̃ᵀΨ̃ + λI is symmetric positive definite for λ > 0");
    let mut g = DVector::zeros(nu);
    g[0] = 1.0;
    // P = (M⁻¹ g)ᵀ Ψ̃ᵀ since M is symmetric.
    psi_tilde * chol.solve(&g)
}

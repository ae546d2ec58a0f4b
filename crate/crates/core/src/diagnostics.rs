//! Closed-loop stability diagnostics for the increment-window dynamics
//! `ΔU_L(k) = A(k)·ΔU_L(k−1) + (…)·e(k)`.
//!
//! `A(k)` is an L×L companion matrix whose first row is
//! `[−ρ₂PΨ̄₁, …, −ρ_L PΨ̄_{L−1}, 0]` with `P = gᵀ(Ψ̃ᵀΨ̃ + λI)⁻¹Ψ̃ᵀ`; the
//! remaining rows shift the window down. If the first-row absolute sum is
//! below one then `σ(A(k)) < 1`.

use alloc::vec::Vec;

use nalgebra::{ComplexField, DMatrix};

use crate::controller::{applied_gain_row, MfapcConfig};
use crate::error::{ensure_len, Result};
use crate::model::PredictionMatrices;

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityDiagnostic {
    /// First row of `A(k)`.
    pub first_row: Vec<f64>,
    /// Spectral radius `σ(A(k))`.
    pub spectral_radius: f64,
    /// Sufficient bound `Σ_i |ρ_{i+1} P Ψ̄_i|`.
    pub lemma1_bound: f64,
}

/// Builds `A(k)` from the controller tunables and the prediction matrices
/// the controller used at step k.
pub fn stability_diagnostic(cfg: &MfapcConfig, pm: &PredictionMatrices) -> Result<StabilityDiagnostic> {
    cfg.validate()?;
    ensure_len("pseudo order", cfg.order, pm.order())?;
    let p = applied_gain_row(&pm.psi_tilde, cfg.lambda);
    let order = cfg.order;
    let rho_window = cfg.rho_window();
    let mut first_row = alloc::vec![0.0; order];
    // The last column of Ψ̄ is identically zero, so the last entry stays 0.
    for i in 0..order.saturating_sub(1) {
        first_row[i] = -rho_window[i] * p.dot(&pm.psi_bar.column(i));
    }
    let lemma1_bound = first_row.iter().map(|a| a.abs()).sum();
    Ok(StabilityDiagnostic {
        spectral_radius: companion_spectral_radius(&first_row),
        first_row,
        lemma1_bound,
    })
}

/// Companion matrix with the given first row and ones on the subdiagonal.
pub fn companion_matrix(first_row: &[f64]) -> DMatrix<f64> {
    let n = first_row.len();
    DMatrix::from_fn(n, n, |r, c| {
        if r == 0 {
            first_row[c]
        } else if r == c + 1 {
            1.0
        } else {
            0.0
        }
    })
}

/// Spectral radius of [`companion_matrix`]`(first_row)`.
///
/// The characteristic polynomial is `z^n − a₁z^{n−1} − … − a_n`; trailing
/// zero coefficients contribute exact zero roots and are deflated before
/// the eigenvalue solve.
pub fn companion_spectral_radius(first_row: &[f64]) -> f64 {
    let m = first_row.iter().rposition(|&a| a != 0.0).map_or(0, |i| i + 1);
    match m {
        0 => 0.0,
        1 => first_row[0].abs(),
        _ => spectral_radius(&companion_matrix(&first_row[..m])),
    }
}

/// Largest eigenvalue modulus of a real square matrix.
pub fn spectral_radius(m: &DMatrix<f64>) -> f64 {
    m.clone()
        .complex_eigenvalues()
        .iter()
        .map(|z| z.modulus())
        .fold(0.0, f64::max)
}

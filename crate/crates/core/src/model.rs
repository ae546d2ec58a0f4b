//! Partial-form dynamic linearization (PFDL) data model and the N-step
//! predictive matrices built on top of it.
//!
//! All windows are stored newest-first: index 0 holds the value at time `k`,
//! index `L-1` the value at `k-L+1`.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::error::{ensure_finite, ensure_len, Error, Result};

/// Pseudo-gradient vector: the time-varying coefficients of the PFDL model
/// `Δy(k+1) = φ_L(k)ᵀ ΔU_L(k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PgVector(DVector<f64>);

impl PgVector {
    pub fn new(phi: Vec<f64>) -> Result<Self> {
        if phi.is_empty() {
            return Err(Error::InvalidDimension { what: "PG vector length" });
        }
        ensure_finite("PG vector", &phi)?;
        Ok(Self(DVector::from_vec(phi)))
    }

    pub fn from_slice(phi: &[f64]) -> Result<Self> {
        Self::new(phi.to_vec())
    }

    pub(crate) fn from_dvector_unchecked(phi: DVector<f64>) -> Self {
        Self(phi)
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

    /// Leading component `φ_1`, the instantaneous input gain.
    pub fn leading(&self) -> f64 {
        self.0[0]
    }

    pub fn get(&self, i: usize) -> f64 {
        self.0[i]
    }

    /// Component `i`, or zero past the end of the vector.
    #[inline]
    pub(crate) fn get_or_zero(&self, i: usize) -> f64 {
        if i < self.0.len() {
            self.0[i]
        } else {
            0.0
        }
    }

    pub fn norm(&self) -> f64 {
        euclid(self.0.as_slice())
    }

    pub fn dot(&self, window: &ControlWindow) -> Result<f64> {
        ensure_len("PG vector · ΔU window", self.len(), window.len())?;
        Ok(self.0.dot(&window.0))
    }

    /// Scales the vector back onto the ball `‖φ‖ ≤ bound`. Returns `true`
    /// when scaling was needed.
    pub fn clamp_norm(&mut self, bound: f64) -> bool {
        let n = self.norm();
        if n > bound {
            self.0 *= bound / n;
            true
        } else {
            false
        }
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }
}

/// Sliding window of input increments `ΔU_L(k) = [Δu(k), …, Δu(k-L+1)]ᵀ`.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlWindow(DVector<f64>);

impl ControlWindow {
    pub fn zeros(order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidDimension { what: "control window length" });
        }
        Ok(Self(DVector::zeros(order)))
    }

    /// Builds a window from newest-first increments.
    pub fn from_newest_first(deltas: Vec<f64>) -> Result<Self> {
        if deltas.is_empty() {
            return Err(Error::InvalidDimension { what: "control window length" });
        }
        ensure_finite("control window", &deltas)?;
        Ok(Self(DVector::from_vec(deltas)))
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

    /// Discards the oldest increment and inserts `newest` at index 0.
    pub fn push(&mut self, newest: f64) {
        let s = self.0.as_mut_slice();
        let n = s.len();
        s.copy_within(0..n - 1, 1);
        s[0] = newest;
    }

    pub fn norm(&self) -> f64 {
        euclid(self.0.as_slice())
    }
}

/// The lower-shift matrix `A` and the unit vector `B` of the predictive
/// model: `ΔU_L(k) = A·ΔU_L(k-1) + B·Δu(k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftPair {
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
}

pub fn build_shift_pair(order: usize) -> Result<ShiftPair> {
    if order == 0 {
        return Err(Error::InvalidDimension { what: "pseudo order L" });
    }
    let a = DMatrix::from_fn(order, order, |r, c| if r == c + 1 { 1.0 } else { 0.0 });
    let mut b = DVector::zeros(order);
    b[0] = 1.0;
    Ok(ShiftPair { a, b })
}

/// One-step PFDL prediction `y(k+1) = y(k) + φ_L(k)ᵀ ΔU_L(k)`.
pub fn pfdl_predict_one(y_k: f64, phi: &PgVector, window: &ControlWindow) -> Result<f64> {
    Ok(y_k + phi.dot(window)?)
}

/// Matrices of the N-step prediction
/// `Y_N(k+1) = E·y(k) + Ψ̃(k)·ΔU_Nu(k) + Ψ̄(k)·ΔU_L(k-1)`.
///
/// Increments past the control horizon are taken as zero, so only the
/// truncated `Ψ̃` (N×Nu) is formed.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionMatrices {
    pub psi_tilde: DMatrix<f64>,
    pub psi_bar: DMatrix<f64>,
    pub e: DVector<f64>,
}

impl PredictionMatrices {
    pub fn horizon(&self) -> usize {
        self.psi_tilde.nrows()
    }

    pub fn control_horizon(&self) -> usize {
        self.psi_tilde.ncols()
    }

    pub fn order(&self) -> usize {
        self.psi_bar.ncols()
    }
}

/// Assembles `Ψ̃` and `Ψ̄` from `phi_seq[i] = φ̂_L(k+i)`, `i = 0..N`.
///
/// Uses `φᵀ A^j B = φ_j` and `(φᵀ A^m)_c = φ_{c+m}` (zero past `L`), so no
/// matrix powers are formed:
///
/// * `Ψ̃[r][c] = Σ_{i=c..=r} φ(k+i)[i-c]` for `c ≤ r`, zero above the diagonal
/// * `Ψ̄[r][c] = Σ_{i=0..=r} φ(k+i)[c+i+1]`
pub fn assemble_prediction(
    phi_seq: &[PgVector],
    horizon: usize,
    control_horizon: usize,
) -> Result<PredictionMatrices> {
    if horizon == 0 {
        return Err(Error::InvalidDimension { what: "prediction horizon N" });
    }
    if control_horizon == 0 {
        return Err(Error::InvalidDimension { what: "control horizon Nu" });
    }
    if control_horizon > horizon {
        return Err(Error::InvalidParameter {
            name: "control_horizon",
            reason: "Nu must not exceed N",
        });
    }
    if phi_seq.is_empty() {
        return Err(Error::EmptyHistory);
    }
    ensure_len("PG sequence", horizon, phi_seq.len())?;
    let order = phi_seq[0].len();
    for phi in phi_seq {
        ensure_len("PG sequence entry", order, phi.len())?;
    }

    let mut psi_tilde = DMatrix::zeros(horizon, control_horizon);
    for r in 0..horizon {
        for c in 0..=r.min(control_horizon - 1) {
            psi_tilde[(r, c)] = (c..=r).map(|i| phi_seq[i].get_or_zero(i - c)).sum();
        }
    }

    let mut psi_bar = DMatrix::zeros(horizon, order);
    for c in 0..order {
        let mut acc = 0.0;
        for r in 0..horizon {
            acc += phi_seq[r].get_or_zero(c + r + 1);
            psi_bar[(r, c)] = acc;
        }
    }

    Ok(PredictionMatrices {
        psi_tilde,
        psi_bar,
        e: DVector::from_element(horizon, 1.0),
    })
}

/// Evaluates the N-step prediction for a candidate future increment vector.
pub fn predict_outputs(
    y_k: f64,
    pm: &PredictionMatrices,
    delta_u_future: &[f64],
    delta_u_past: &ControlWindow,
) -> Result<DVector<f64>> {
    ensure_len("future increments", pm.control_horizon(), delta_u_future.len())?;
    ensure_len("past increment window", pm.order(), delta_u_past.len())?;
    let du = DVector::from_column_slice(delta_u_future);
    Ok(&pm.e * y_k + &pm.psi_tilde * du + &pm.psi_bar * delta_u_past.as_dvector())
}

pub(crate) fn euclid(v: &[f64]) -> f64 {
    libm::sqrt(v.iter().map(|x| x * x).sum())
}

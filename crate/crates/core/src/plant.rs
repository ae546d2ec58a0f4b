//! Discrete-time SISO plants.
//!
//! A plant holds its own output/input history and exposes the current
//! measurement `y(k)`. [`Plant::step`] applies `u(k)` and advances to
//! `y(k+1)`; the simulation loop owns the measure-then-act ordering.

use alloc::collections::VecDeque;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::model::{pfdl_predict_one, ControlWindow, PgVector};

pub trait Plant {
    /// Current output `y(k)`.
    fn output(&self) -> f64;
    /// Time index `k` of [`Plant::output`].
    fn step_index(&self) -> i64;
    /// Inputs already applied, newest first: `u(k-1), u(k-2), …`.
    fn past_inputs(&self) -> Vec<f64>;
    /// Applies `u(k)` and returns `y(k+1)`.
    fn step(&mut self, u_k: f64) -> Result<f64>;
}

/// Output/input history, newest first, plus the index of the newest output.
#[derive(Debug, Clone, PartialEq)]
pub struct PlantState {
    pub y_history: VecDeque<f64>,
    pub u_history: VecDeque<f64>,
    pub k: i64,
    depth: usize,
}

impl PlantState {
    const DEPTH: usize = 3;

    /// Builds a state from chronological seeds (oldest first); the last
    /// entries are `y(k)` and `u(k-1)` respectively.
    pub fn from_seeds(y_seed: &[f64], u_seed: &[f64], k: i64) -> Result<Self> {
        if y_seed.len() < Self::DEPTH || u_seed.len() < Self::DEPTH - 1 {
            return Err(Error::InvalidParameter {
                name: "seed",
                reason: "output and input seeds need at least 3 values",
            });
        }
        crate::error::ensure_finite("plant seed", y_seed)?;
        crate::error::ensure_finite("plant seed", u_seed)?;
        Ok(Self {
            y_history: y_seed.iter().rev().copied().collect(),
            u_history: u_seed.iter().rev().copied().collect(),
            k,
            depth: y_seed.len().max(u_seed.len() + 1),
        })
    }

    fn push(&mut self, y_next: f64, u_k: f64) {
        self.y_history.push_front(y_next);
        self.u_history.push_front(u_k);
        self.y_history.truncate(self.depth);
        self.u_history.truncate(self.depth);
        self.k += 1;
    }
}

/// How the second branch of the structure-varying benchmark reads its input lags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SecondBranchInputs {
    /// `0.1u(k-1) + 0.02u(k-2) + 0.03u(k-3)`.
    #[default]
    Lagged,
    /// `(0.1 + 0.02 + 0.03)u(k-1)`: all three weights on the newest input.
    Literal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Example1Structure {
    /// Nonlinear branch for `0 < k ≤ 200`, linear branch for `200 < k ≤ 400`.
    #[default]
    Switching,
    /// Nonlinear branch for every `k ≥ 1`.
    NonlinearOnly,
}

pub const EXAMPLE1_SWITCH: i64 = 200;
pub const EXAMPLE1_LAST: i64 = 400;

/// Output `y(k)` of the structure-varying benchmark given
/// `y_hist = [y(k-1), y(k-2), y(k-3)]` and `u_hist = [u(k-1), u(k-2), u(k-3)]`.
pub fn example1_output(
    k: i64,
    y_hist: [f64; 3],
    u_hist: [f64; 3],
    structure: Example1Structure,
    second: SecondBranchInputs,
) -> Result<f64> {
    let nonlinear = match structure {
        Example1Structure::Switching => {
            if k <= 0 || k > EXAMPLE1_LAST {
                return Err(Error::OutOfRange { what: "benchmark plant step", index: k });
            }
            k <= EXAMPLE1_SWITCH
        }
        Example1Structure::NonlinearOnly => {
            if k <= 0 {
                return Err(Error::OutOfRange { what: "benchmark plant step", index: k });
            }
            true
        }
    };
    let [y1, y2, y3] = y_hist;
    let [u1, u2, u3] = u_hist;
    Ok(if nonlinear {
        2.5 * y1 * y2 / (1.0 + y1 * y1 + y2 * y2)
            + 1.2 * u1
            + 1.4 * u2
            + 0.7 * libm::sin(0.5 * (y1 + y2))
    } else {
        let inputs = match second {
            SecondBranchInputs::Lagged => 0.1 * u1 + 0.02 * u2 + 0.03 * u3,
            SecondBranchInputs::Literal => (0.1 + 0.02 + 0.03) * u1,
        };
        -0.1 * y1 - 0.2 * y2 - 0.3 * y3 + inputs
    })
}

/// Computes `y(k)` from `state` (whose newest output is `y(k-1)`) after
/// applying `u_k_minus_1`, without mutating the state.
pub fn example1_step(
    state: &PlantState,
    u_k_minus_1: f64,
    structure: Example1Structure,
    second: SecondBranchInputs,
) -> Result<f64> {
    let y = &state.y_history;
    let u = &state.u_history;
    example1_output(
        state.k + 1,
        [y[0], y[1], y[2]],
        [u_k_minus_1, u[0], u[1]],
        structure,
        second,
    )
}

/// The structure-varying nonlinear benchmark plant.
#[derive(Debug, Clone, PartialEq)]
pub struct Example1Plant {
    state: PlantState,
    structure: Example1Structure,
    second: SecondBranchInputs,
}

impl Example1Plant {
    /// Seeds are chronological histories ending at `y(0)` and `u(0)`.
    /// The plant is constructed at `k = 1` with `y(1)` already computed.
    pub fn new(
        y_seed: &[f64],
        u_seed: &[f64],
        structure: Example1Structure,
        second: SecondBranchInputs,
    ) -> Result<Self> {
        let u0 = *u_seed.last().ok_or(Error::InvalidParameter {
            name: "seed",
            reason: "output and input seeds need at least 3 values",
        })?;
        let mut state = PlantState::from_seeds(y_seed, &u_seed[..u_seed.len() - 1], 0)?;
        let y1 = example1_step(&state, u0, structure, second)?;
        state.push(y1, u0);
        Ok(Self { state, structure, second })
    }

    pub fn state(&self) -> &PlantState {
        &self.state
    }
}

impl Plant for Example1Plant {
    fn output(&self) -> f64 {
        self.state.y_history[0]
    }

    fn step_index(&self) -> i64 {
        self.state.k
    }

    fn past_inputs(&self) -> Vec<f64> {
        self.state.u_history.iter().copied().collect()
    }

    fn step(&mut self, u_k: f64) -> Result<f64> {
        let y_next = example1_step(&self.state, u_k, self.structure, self.second)?;
        self.state.push(y_next, u_k);
        Ok(y_next)
    }
}

/// `y(k+1) = y(k) + φᵀ ΔU_L(k)` for a fixed PG vector.
pub fn synthetic_linear_pfdl_step(phi_true: &PgVector, y_k: f64, window_k: &ControlWindow) -> Result<f64> {
    pfdl_predict_one(y_k, phi_true, window_k)
}

/// A plant that is exactly a PFDL model with constant pseudo-gradient.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticPfdlPlant {
    phi_true: PgVector,
    y: f64,
    k: i64,
    u_prev: f64,
    /// `ΔU_L(k-1)`, newest first.
    window: ControlWindow,
}

impl SyntheticPfdlPlant {
    pub fn new(phi_true: PgVector, y0: f64) -> Self {
        let order = phi_true.len();
        Self {
            phi_true,
            y: y0,
            k: 1,
            u_prev: 0.0,
            window: ControlWindow::zeros(order).expect("PG vector is non-empty"),
        }
    }

    pub fn phi_true(&self) -> &PgVector {
        &self.phi_true
    }
}

impl Plant for SyntheticPfdlPlant {
    fn output(&self) -> f64 {
        self.y
    }

    fn step_index(&self) -> i64 {
        self.k
    }

    fn past_inputs(&self) -> Vec<f64> {
        // Reconstructed from the increment window with u(-∞) = 0.
        let mut out = Vec::with_capacity(self.window.len());
        let mut u = self.u_prev;
        for &d in self.window.as_slice() {
            out.push(u);
            u -= d;
        }
        out
    }

    fn step(&mut self, u_k: f64) -> Result<f64> {
        self.window.push(u_k - self.u_prev);
        self.u_prev = u_k;
        self.y = synthetic_linear_pfdl_step(&self.phi_true, self.y, &self.window)?;
        self.k += 1;
        Ok(self.y)
    }
}

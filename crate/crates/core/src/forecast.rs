//! Forecasts of future PG vectors `φ̂(k+1) … φ̂(k+N-1)`.
//!
//! Two forecasters are available. `Hold` repeats the current estimate.
//! `AutoRegressive` fits, per component, an AR(n_p) model by ridge least
//! squares over the whole in-run history and rolls it forward, feeding the
//! forecasts back as regressors. Every forecast is a linear combination of
//! the last `n_p` estimates, optionally scaled onto `‖φ‖ ≤ b`.

use alloc::collections::VecDeque;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::error::{ensure_len, Error, Result};
use crate::model::PgVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ForecastMode {
    #[default]
    Hold,
    AutoRegressive,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForecasterConfig {
    pub mode: ForecastMode,
    /// AR order n_p.
    pub order: usize,
    /// Ridge term added to the AR normal equations.
    pub ridge: f64,
    /// Optional norm bound b applied to every forecast.
    pub bound: Option<f64>,
}

impl Default for ForecasterConfig {
    fn default() -> Self {
        Self {
            mode: ForecastMode::Hold,
            order: 3,
            ridge: 1e-6,
            bound: None,
        }
    }
}

impl ForecasterConfig {
    pub fn validate(&self) -> Result<()> {
        if self.order == 0 {
            return Err(Error::InvalidDimension { what: "forecaster order n_p" });
        }
        if !(self.ridge > 0.0 && self.ridge.is_finite()) {
            return Err(Error::InvalidParameter { name: "ridge", reason: "must be positive" });
        }
        if let Some(b) = self.bound {
            if !(b > 0.0 && b.is_finite()) {
                return Err(Error::InvalidParameter { name: "pg_bound", reason: "must be positive" });
            }
        }
        Ok(())
    }
}

/// Normal-equation accumulators for one PG component.
#[derive(Debug, Clone, PartialEq)]
struct ArStats {
    gram: DMatrix<f64>,
    cross: DVector<f64>,
    rows: usize,
}

impl ArStats {
    fn new(order: usize) -> Self {
        Self {
            gram: DMatrix::zeros(order, order),
            cross: DVector::zeros(order),
            rows: 0,
        }
    }

    fn add_row(&mut self, regressors: &DVector<f64>, target: f64) {
        self.gram += regressors * regressors.transpose();
        self.cross += regressors * target;
        self.rows += 1;
    }

    fn solve(&self, ridge: f64) -> Option<DVector<f64>> {
        if self.rows == 0 {
            return None;
        }
        let n = self.gram.nrows();
        let lhs = &self.gram + DMatrix::identity(n, n) * ridge;
        lhs.cholesky().map(|c| c.solve(&self.cross))
    }
}

/// Streaming forecaster state: a ring buffer of the last `n_p` estimates
/// plus per-component AR sufficient statistics over the full run.
#[derive(Debug, Clone, PartialEq)]
pub struct Forecaster {
    config: ForecasterConfig,
    /// Newest first.
    history: VecDeque<PgVector>,
    stats: Vec<ArStats>,
}

impl Forecaster {
    pub fn new(config: ForecasterConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            config,
            history: VecDeque::with_capacity(config.order),
            stats: Vec::new(),
        })
    }

    pub fn config(&self) -> &ForecasterConfig {
        &self.config
    }

    /// Up to `n_p` most recent estimates, newest first.
    pub fn history(&self) -> impl Iterator<Item = &PgVector> {
        self.history.iter()
    }

    pub fn history_len(&self) -> usize {
        self.history.len()
    }

    /// Records the (post-reset) estimate for the current step.
    pub fn observe(&mut self, phi: &PgVector) -> Result<()> {
        if let Some(first) = self.history.front() {
            ensure_len("forecaster history", first.len(), phi.len())?;
        }
        let n_p = self.config.order;
        if self.stats.is_empty() {
            self.stats = (0..phi.len()).map(|_| ArStats::new(n_p)).collect();
        }
        if self.history.len() == n_p {
            for (j, stat) in self.stats.iter_mut().enumerate() {
                let regressors = DVector::from_iterator(n_p, self.history.iter().map(|h| h.get(j)));
                stat.add_row(&regressors, phi.get(j));
            }
            self.history.pop_back();
        }
        self.history.push_front(phi.clone());
        Ok(())
    }

    /// AR coefficients `θ_1 … θ_{n_p}` for component `j`, if enough data
    /// has been seen to fit them.
    pub fn coefficients(&self, j: usize) -> Option<DVector<f64>> {
        self.stats.get(j)?.solve(self.config.ridge)
    }

    /// Returns `φ̂(k+1) … φ̂(k+steps)`.
    pub fn forecast(&self, steps: usize) -> Result<Vec<PgVector>> {
        if steps == 0 {
            return Ok(Vec::new());
        }
        if self.history.is_empty() {
            return Err(Error::EmptyHistory);
        }
        let thetas: Vec<Option<DVector<f64>>> = match self.config.mode {
            ForecastMode::Hold => Vec::new(),
            ForecastMode::AutoRegressive => {
                (0..self.stats.len()).map(|j| self.coefficients(j)).collect()
            }
        };
        let newest_first: Vec<&PgVector> = self.history.iter().collect();
        Ok(roll_forward(&newest_first, &thetas, steps, self.config.bound))
    }
}

/// Batch form of [`Forecaster`]: fits over `history` (oldest first) and
/// returns `steps` forecasts past its last entry.
pub fn forecast_pg(config: &ForecasterConfig, history: &[PgVector], steps: usize) -> Result<Vec<PgVector>> {
    let mut f = Forecaster::new(*config)?;
    for phi in history {
        f.observe(phi)?;
    }
    f.forecast(steps)
}

fn roll_forward(
    newest_first: &[&PgVector],
    thetas: &[Option<DVector<f64>>],
    steps: usize,
    bound: Option<f64>,
) -> Vec<PgVector> {
    let order = newest_first[0].len();
    // Per-component buffers, newest first, extended as forecasts are produced.
    let mut buffers: Vec<VecDeque<f64>> = (0..order)
        .map(|j| newest_first.iter().map(|h| h.get(j)).collect())
        .collect();
    let mut out = Vec::with_capacity(steps);
    for _ in 0..steps {
        let mut next = DVector::zeros(order);
        for (j, buf) in buffers.iter().enumerate() {
            next[j] = match thetas.get(j) {
                Some(Some(theta)) if buf.len() >= theta.len() => {
                    theta.iter().zip(buf.iter()).map(|(t, x)| t * x).sum()
                }
                _ => buf[0],
            };
        }
        let mut phi = PgVector::from_dvector_unchecked(next);
        if let Some(b) = bound {
            phi.clamp_norm(b);
        }
        for (j, buf) in buffers.iter_mut().enumerate() {
            buf.push_front(phi.get(j));
        }
        out.push(phi);
    }
    out
}

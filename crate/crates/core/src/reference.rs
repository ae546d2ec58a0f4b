//! Desired output trajectories `y*(j)`, defined for every `j ≥ 1`.

use alloc::vec::Vec;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum ReferenceSpec {
    /// `y*(j+1) = amplitude · (−1)^round(j / switch_interval)` with
    /// `round` taking ties away from zero.
    Square { amplitude: f64, switch_interval: f64 },
    Constant { value: f64 },
    /// `(k, y*)` points with strictly increasing `k ≥ 1`. Values are held
    /// between points; before the first point the first value applies.
    Table { points: Vec<(u64, f64)> },
}

impl ReferenceSpec {
    /// The benchmark square wave: amplitude 5, switching every 80 steps.
    pub fn example1() -> Self {
        ReferenceSpec::Square { amplitude: 5.0, switch_interval: 80.0 }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ReferenceSpec::Square { amplitude, switch_interval } => {
                if !amplitude.is_finite() {
                    return Err(Error::NonFinite { what: "reference amplitude" });
                }
                if !(*switch_interval > 0.0 && switch_interval.is_finite()) {
                    return Err(Error::InvalidParameter {
                        name: "switch_interval",
                        reason: "must be positive",
                    });
                }
            }
            ReferenceSpec::Constant { value } => {
                if !value.is_finite() {
                    return Err(Error::NonFinite { what: "reference value" });
                }
            }
            ReferenceSpec::Table { points } => {
                if points.is_empty() {
                    return Err(Error::InvalidDimension { what: "reference table" });
                }
                if points.iter().any(|&(k, v)| k == 0 || !v.is_finite()) {
                    return Err(Error::InvalidParameter {
                        name: "reference table",
                        reason: "steps must be >= 1 and values finite",
                    });
                }
                if points.windows(2).any(|w| w[1].0 <= w[0].0) {
                    return Err(Error::InvalidParameter {
                        name: "reference table",
                        reason: "steps must be strictly increasing",
                    });
                }
            }
        }
        Ok(())
    }

    /// `y*(j)` for `j ≥ 1`.
    pub fn value(&self, j: u64) -> Result<f64> {
        if j == 0 {
            return Err(Error::OutOfRange { what: "reference step", index: 0 });
        }
        Ok(match self {
            ReferenceSpec::Square { amplitude, switch_interval } => {
                amplitude * alternating_sign((j - 1) as f64 / switch_interval)
            }
            ReferenceSpec::Constant { value } => *value,
            ReferenceSpec::Table { points } => {
                let idx = points.partition_point(|&(k, _)| k <= j);
                points[idx.saturating_sub(1)].1
            }
        })
    }
}

/// `(−1)^round(x)`.
fn alternating_sign(x: f64) -> f64 {
    // libm::round rounds half away from zero.
    let n = libm::round(x) as i64;
    if n % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Benchmark trajectory `y*(k+1) = 5 · (−1)^round(k/80)` for `1 ≤ k ≤ 400`.
pub fn reference_square(k: i64) -> Result<f64> {
    if !(1..=400).contains(&k) {
        return Err(Error::OutOfRange { what: "benchmark reference", index: k });
    }
    Ok(5.0 * alternating_sign(k as f64 / 80.0))
}

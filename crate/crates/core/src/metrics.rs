//! Tracking-error summaries of a [`SimTrace`].

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::sim::SimTrace;

/// Settling band as a fraction of the reference jump.
pub const SETTLING_BAND: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct SettlingInfo {
    /// Step at which the target changed.
    pub switch_step: usize,
    /// Steps until `|e|` entered and stayed in the band until the next
    /// switch (or end of run); `None` if it never did.
    pub settling_steps: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Metrics {
    /// `Σ|e(k)|` over the whole run (the benchmark's error index).
    pub e_itae: f64,
    /// Time-weighted `Σ k·|e(k)|`.
    pub itae: f64,
    pub rmse: f64,
    pub max_abs_error: f64,
    pub settling: Vec<SettlingInfo>,
}

pub fn compute_metrics(trace: &SimTrace) -> Result<Metrics> {
    if trace.is_empty() {
        return Err(Error::InvalidDimension { what: "trace" });
    }
    let recs = &trace.records;
    let e_itae = recs.iter().map(|r| r.e.abs()).sum();
    let itae = recs.iter().map(|r| r.k as f64 * r.e.abs()).sum();
    let sq: f64 = recs.iter().map(|r| r.e * r.e).sum();
    let rmse = libm::sqrt(sq / recs.len() as f64);
    let max_abs_error = recs.iter().map(|r| r.e.abs()).fold(0.0, f64::max);

    let switches: Vec<usize> = (1..recs.len()).filter(|&i| recs[i].y_star != recs[i - 1].y_star).collect();
    let settling = switches
        .iter()
        .enumerate()
        .map(|(n, &start)| {
            let end = switches.get(n + 1).copied().unwrap_or(recs.len());
            let band = SETTLING_BAND * (recs[start].y_star - recs[start - 1].y_star).abs();
            // Last index in the segment that is still outside the band.
            let last_out = (start..end).rev().find(|&i| recs[i].e.abs() > band);
            let settling_steps = match last_out {
                None => Some(0),
                Some(i) if i + 1 < end => Some(i + 1 - start),
                Some(_) => None,
            };
            SettlingInfo { switch_step: recs[start].k, settling_steps }
        })
        .collect();

    Ok(Metrics { e_itae, itae, rmse, max_abs_error, settling })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::StepRecord;
    use alloc::vec;

    fn trace(errors: &[f64], targets: &[f64]) -> SimTrace {
        SimTrace {
            records: errors
                .iter()
                .zip(targets)
                .enumerate()
                .map(|(i, (&e, &t))| StepRecord {
                    k: i + 1,
                    y: t - e,
                    y_star: t,
                    e,
                    u: 0.0,
                    du: 0.0,
                    phi: vec![],
                    sigma_a: None,
                    lemma1_bound: None,
                    reset: false,
                })
                .collect(),
        }
    }

    #[test]
    fn zero_error_gives_zero_metrics() {
        let m = compute_metrics(&trace(&[0.0; 4], &[1.0; 4])).unwrap();
        assert_eq!((m.e_itae, m.itae, m.rmse, m.max_abs_error), (0.0, 0.0, 0.0, 0.0));
        assert!(m.settling.is_empty());
    }

    #[test]
    fn hand_sums() {
        let m = compute_metrics(&trace(&[1.0, -1.0, 2.0], &[0.0; 3])).unwrap();
        assert_eq!(m.e_itae, 4.0);
        assert_eq!(m.max_abs_error, 2.0);
        assert_eq!(m.itae, 1.0 + 2.0 + 6.0);
        assert!((m.rmse - libm::sqrt(2.0)).abs() < 1e-15);
    }

    #[test]
    fn empty_trace_rejected() {
        assert!(compute_metrics(&SimTrace::default()).is_err());
    }

    #[test]
    fn settling_per_switch() {
        // Jump of 10 at index 2 → band 0.5; error back inside from index 4.
        let m = compute_metrics(&trace(
            &[0.0, 0.0, 10.0, 3.0, 0.4, 0.1, 0.0],
            &[5.0, 5.0, -5.0, -5.0, -5.0, -5.0, -5.0],
        ))
        .unwrap();
        assert_eq!(m.settling, vec![SettlingInfo { switch_step: 3, settling_steps: Some(2) }]);

        let m = compute_metrics(&trace(&[0.0, 10.0, 9.0], &[5.0, -5.0, -5.0])).unwrap();
        assert_eq!(m.settling[0].settling_steps, None);
    }
}

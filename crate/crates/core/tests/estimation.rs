mod common;

use common::{dot, identify_synthetic};
use mfapc_core::estimator::{needs_reset, projection_update, Estimator, EstimatorConfig};
use mfapc_core::forecast::forecast_pg;
use mfapc_core::{ControlWindow, ForecastMode, Forecaster, ForecasterConfig, PgVector};
use proptest::prelude::*;

fn pg(v: &[f64]) -> PgVector {
    PgVector::from_slice(v).unwrap()
}

fn vec_and_init() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (1usize..6).prop_flat_map(|l| {
        let comp = prop_oneof![3 => -2.0..2.0f64, 1 => Just(0.0), 1 => -1e-5..1e-5f64];
        (prop::collection::vec(comp, l), prop::collection::vec(0.1..2.0f64, l), any::<bool>())
            .prop_map(|(phi, init, neg)| {
                let mut init = init;
                if neg {
                    init[0] = -init[0];
                }
                (phi, init)
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn reset_fires_exactly_on_collapse_or_flip((phi, init) in vec_and_init(), eps in prop_oneof![Just(1e-5), 1e-6..1e-1f64]) {
        let norm = dot(&phi, &phi).sqrt();
        let flipped = (phi[0] >= 0.0) != (init[0] >= 0.0);
        let expected = norm <= eps || flipped;
        prop_assert_eq!(needs_reset(&pg(&phi), &pg(&init), eps), expected);

        let cfg = EstimatorConfig { epsilon: eps, ..EstimatorConfig::default() };
        let mut est = Estimator::new(cfg, pg(&init)).unwrap();
        est.set_phi_hat(pg(&phi)).unwrap();
        prop_assert_eq!(est.reset(), expected);
        let after_first = est.phi_hat().clone();
        if expected {
            prop_assert_eq!(after_first.as_slice(), init.as_slice());
        } else {
            prop_assert_eq!(after_first.as_slice(), phi.as_slice());
        }
        // A second application changes nothing.
        prop_assert!(!est.reset());
        prop_assert_eq!(est.phi_hat(), &after_first);
    }

    #[test]
    fn projection_shrinks_innovation(
        phi in prop::collection::vec(-2.0..2.0f64, 3),
        du in prop::collection::vec(-3.0..3.0f64, 3),
        dy in -5.0..5.0f64,
        eta in 1e-3..=1.0f64,
        mu in 1e-3..10.0f64,
    ) {
        let window = ControlWindow::from_newest_first(du.clone()).unwrap();
        let next = projection_update(&pg(&phi), eta, mu, dy, &window).unwrap();
        let before = dy - dot(&phi, &du);
        let after = dy - dot(next.as_slice(), &du);
        let s = dot(&du, &du);
        // Closed form of the post-update innovation.
        let expected = before * (1.0 - eta * s / (mu + s));
        prop_assert!((after - expected).abs() <= 1e-10 * before.abs().max(1.0));
        prop_assert!(after.abs() <= before.abs() + 1e-12);
        // The correction lies along ΔU.
        for i in 0..3 {
            let step = next.as_slice()[i] - phi[i];
            prop_assert!((step - eta * before * du[i] / (mu + s)).abs() <= 1e-12);
        }
    }

    #[test]
    fn pg_bound_holds_under_clamp(
        dys in prop::collection::vec(-50.0..50.0f64, 1..40),
        dus in prop::collection::vec(-5.0..5.0f64, 40),
        bound in 0.5..5.0f64,
    ) {
        let cfg = EstimatorConfig { eta: 1.0, mu: 1e-3, epsilon: 1e-5, pg_bound: Some(bound) };
        let mut est = Estimator::new(cfg, pg(&[0.4, 0.0])).unwrap();
        let mut window = ControlWindow::zeros(2).unwrap();
        for (dy, du) in dys.iter().zip(&dus) {
            window.push(*du);
            est.estimate(*dy, &window).unwrap();
            est.reset();
            prop_assert!(est.phi_hat().norm() <= bound * (1.0 + 1e-12));
        }
    }

    #[test]
    fn ar_fit_is_ridge_least_squares(series in prop::collection::vec(-2.0..2.0f64, 5..40)) {
        let n_p = 3;
        let ridge = 1e-6;
        let cfg = ForecasterConfig { mode: ForecastMode::AutoRegressive, order: n_p, ridge, bound: None };
        let mut f = Forecaster::new(cfg).unwrap();
        for x in &series {
            f.observe(&pg(&[*x])).unwrap();
        }
        let theta = f.coefficients(0);
        if series.len() <= n_p {
            prop_assert!(theta.is_none());
        } else {
            let oracle = ridge_ls(&series, n_p, ridge);
            let theta = theta.unwrap();
            for i in 0..n_p {
                prop_assert!((theta[i] - oracle[i]).abs() <= 1e-6 * oracle[i].abs().max(1.0));
            }
        }
    }
}

/// Builds the regression `x_t ≈ Σ θ_i x_{t−i}` explicitly and solves the
/// ridge normal equations by Gaussian elimination with partial pivoting.
fn ridge_ls(series: &[f64], n_p: usize, ridge: f64) -> Vec<f64> {
    let mut a = vec![vec![0.0; n_p + 1]; n_p];
    for t in n_p..series.len() {
        let row: Vec<f64> = (1..=n_p).map(|i| series[t - i]).collect();
        for r in 0..n_p {
            for c in 0..n_p {
                a[r][c] += row[r] * row[c];
            }
            a[r][n_p] += row[r] * series[t];
        }
    }
    for (r, row) in a.iter_mut().enumerate() {
        row[r] += ridge;
    }
    for col in 0..n_p {
        let piv = (col..n_p).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
        a.swap(col, piv);
        for r in (col + 1)..n_p {
            let f = a[r][col] / a[col][col];
            for c in col..=n_p {
                a[r][c] -= f * a[col][c];
            }
        }
    }
    let mut x = vec![0.0; n_p];
    for r in (0..n_p).rev() {
        let s: f64 = ((r + 1)..n_p).map(|c| a[r][c] * x[c]).sum();
        x[r] = (a[r][n_p] - s) / a[r][r];
    }
    x
}

#[test]
fn estimator_recovers_constant_pg() {
    let errors = identify_synthetic(&[1.5, 0.4], 1.0, 0.01, 500, 7);
    assert!(*errors.last().unwrap() < 1e-3, "final error {}", errors.last().unwrap());
}

#[test]
fn ar_continues_linear_trend() {
    let ramps = [(1.0, 0.05), (-0.5, 0.03)];
    let history: Vec<PgVector> = (0..60)
        .map(|t| pg(&ramps.map(|(a, b)| a + b * t as f64)))
        .collect();
    let cfg = ForecasterConfig { mode: ForecastMode::AutoRegressive, ..ForecasterConfig::default() };
    let out = forecast_pg(&cfg, &history, 3).unwrap();
    for (j, (a, b)) in ramps.iter().enumerate() {
        let series: Vec<f64> = history.iter().map(|p| p.get(j)).collect();
        let theta = ridge_ls(&series, 3, cfg.ridge);
        let mut rolled = series.clone();
        for h in 0..3 {
            let n = rolled.len();
            let next = (0..3).map(|i| theta[i] * rolled[n - 1 - i]).sum();
            rolled.push(next);
            assert!((out[h].get(j) - next).abs() < 1e-6, "component {j} step {h}: {} vs {next}", out[h].get(j));
            // A ramp satisfies x_t = 2x_{t−1} − x_{t−2}; only the ridge
            // bias separates the fit from the exact continuation.
            let exact = a + b * (60 + h) as f64;
            assert!((out[h].get(j) - exact).abs() < 1e-4, "component {j} step {h}: {}", out[h].get(j) - exact);
        }
    }
}

#[test]
fn hold_repeats_latest() {
    let history = vec![pg(&[1.0, 2.0]), pg(&[3.0, 4.0])];
    let out = forecast_pg(&ForecasterConfig::default(), &history, 3).unwrap();
    assert!(out.iter().all(|p| p.as_slice() == [3.0, 4.0]));
}

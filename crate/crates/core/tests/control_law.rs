mod common;

use common::{cg_minimize, instance, mfac_scalar, norm, Instance};
use mfapc_core::controller::{mfac_control_increment, mfapc_control_increment, mfapc_nu1_control_increment};
use mfapc_core::model::assemble_prediction;
use mfapc_core::{ControlWindow, MfapcConfig, PgVector, ReferencePreview};
use proptest::prelude::*;

fn solve(inst: &Instance, rho: Vec<f64>, lambda: f64) -> Vec<f64> {
    let cfg = MfapcConfig {
        horizon: inst.horizon,
        control_horizon: inst.control_horizon,
        order: inst.order,
        lambda,
        rho,
    };
    let seq: Vec<PgVector> = inst.phi_seq.iter().map(|p| PgVector::from_slice(p).unwrap()).collect();
    let pm = assemble_prediction(&seq, inst.horizon, inst.control_horizon).unwrap();
    let preview = ReferencePreview::new(inst.target.clone()).unwrap();
    let window = ControlWindow::from_newest_first(inst.past.clone()).unwrap();
    mfapc_control_increment(&cfg, &pm, inst.y_k, &preview, &window).unwrap().as_slice().to_vec()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn closed_form_minimizes_cost(inst in instance(6, 3, 4, (1e-3, 10.0))) {
        let closed = solve(&inst, vec![1.0; inst.order + 1], inst.lambda);
        let numeric = cg_minimize(inst.y_k, &inst.phi_seq, &inst.past, &inst.target, inst.lambda, inst.control_horizon);
        let diff: Vec<f64> = closed.iter().zip(&numeric).map(|(a, b)| a - b).collect();
        prop_assert!(norm(&diff) <= 1e-8 * norm(&numeric).max(1e-12), "closed {closed:?} numeric {numeric:?}");
    }

    #[test]
    fn one_step_reduces_to_mfac(
        phi in prop::collection::vec(-2.0..2.0f64, 1..6),
        past_seed in prop::collection::vec(-3.0..3.0f64, 6),
        rho_seed in prop::collection::vec(0.01..=1.0f64, 7),
        y in -10.0..10.0f64,
        y_star in -10.0..10.0f64,
        lambda in 1e-3..10.0f64,
    ) {
        let l = phi.len();
        let rho = rho_seed[..=l].to_vec();
        let past = past_seed[..l].to_vec();
        let cfg = MfapcConfig::one_step(l, lambda, rho.clone());
        let pg = PgVector::from_slice(&phi).unwrap();
        let pm = assemble_prediction(core::slice::from_ref(&pg), 1, 1).unwrap();
        let preview = ReferencePreview::constant(y_star, 1).unwrap();
        let window = ControlWindow::from_newest_first(past.clone()).unwrap();

        let general = mfapc_control_increment(&cfg, &pm, y, &preview, &window).unwrap()[0];
        let scalar = mfapc_nu1_control_increment(&cfg, &pm, y, &preview, &window).unwrap();
        let mfac = mfac_control_increment(&pg, y, y_star, &window, lambda, &rho).unwrap();
        let oracle = mfac_scalar(&phi, y, y_star, &past, lambda, &rho);
        prop_assert!((general - oracle).abs() <= 1e-12);
        prop_assert!((scalar - oracle).abs() <= 1e-12);
        prop_assert!((mfac - oracle).abs() <= 1e-12);
    }

    #[test]
    fn scalar_law_matches_general_for_nu1(
        inst in instance(6, 1, 4, (1e-3, 10.0)),
        rho_seed in prop::collection::vec(0.01..=1.0f64, 5),
    ) {
        let rho = rho_seed[..=inst.order].to_vec();
        let cfg = MfapcConfig { horizon: inst.horizon, control_horizon: 1, order: inst.order, lambda: inst.lambda, rho };
        let seq: Vec<PgVector> = inst.phi_seq.iter().map(|p| PgVector::from_slice(p).unwrap()).collect();
        let pm = assemble_prediction(&seq, inst.horizon, 1).unwrap();
        let preview = ReferencePreview::new(inst.target.clone()).unwrap();
        let window = ControlWindow::from_newest_first(inst.past.clone()).unwrap();
        let general = mfapc_control_increment(&cfg, &pm, inst.y_k, &preview, &window).unwrap()[0];
        let scalar = mfapc_nu1_control_increment(&cfg, &pm, inst.y_k, &preview, &window).unwrap();
        prop_assert!((general - scalar).abs() <= 1e-12);
    }

    #[test]
    fn larger_lambda_shrinks_increments(inst in instance(6, 3, 4, (1e-3, 1.0)), factor in 1.5..100.0f64) {
        let rho = vec![1.0; inst.order + 1];
        let small = norm(&solve(&inst, rho.clone(), inst.lambda));
        let large = norm(&solve(&inst, rho, inst.lambda * factor));
        prop_assert!(large <= small * (1.0 + 1e-12) + 1e-15);
    }

    #[test]
    fn no_action_at_rest_on_target(inst in instance(6, 3, 4, (1e-3, 10.0))) {
        let mut inst = inst;
        inst.past = vec![0.0; inst.order];
        inst.target = vec![inst.y_k; inst.horizon];
        let du = solve(&inst, vec![0.5; inst.order + 1], inst.lambda);
        prop_assert!(du.iter().all(|d| *d == 0.0));
    }
}

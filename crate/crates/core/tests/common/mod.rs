//! Reference implementations written with plain loops and slices. They
//! share no code with the library's matrix paths.
#![allow(dead_code)]

use proptest::prelude::*;

/// Unrolls `y(j+1) = y(j) + φ(j)ᵀ ΔU_L(j)` for `j = k … k+N−1`.
///
/// `future[i]` is `Δu(k+i)` (missing entries are zero), `past` is
/// `[Δu(k−1), …, Δu(k−L)]`.
pub fn recursive_predict(y_k: f64, phi_seq: &[Vec<f64>], future: &[f64], past: &[f64]) -> Vec<f64> {
    let order = past.len();
    // Chronological increments: Δu(k−L) … Δu(k−1), Δu(k) …
    let mut incs: Vec<f64> = past.iter().rev().copied().collect();
    let mut y = y_k;
    let mut out = Vec::with_capacity(phi_seq.len());
    for (i, phi) in phi_seq.iter().enumerate() {
        incs.push(future.get(i).copied().unwrap_or(0.0));
        let newest = incs.len() - 1;
        let mut dy = 0.0;
        for j in 0..order {
            dy += phi[j] * incs[newest - j];
        }
        y += dy;
        out.push(y);
    }
    out
}

/// `J = Σ (y*(k+i) − ŷ(k+i))² + λ Σ Δu²` with predictions from the
/// recursion and unit weights.
pub fn cost(y_k: f64, phi_seq: &[Vec<f64>], future: &[f64], past: &[f64], target: &[f64], lambda: f64) -> f64 {
    let pred = recursive_predict(y_k, phi_seq, future, past);
    let track: f64 = pred.iter().zip(target).map(|(p, t)| (t - p) * (t - p)).sum();
    track + lambda * future.iter().map(|d| d * d).sum::<f64>()
}

/// Minimizes [`cost`] over `nu` future increments by conjugate gradients.
///
/// The predictor is affine in the increments, so its sensitivity columns
/// are probed with unit inputs and the quadratic is then minimized
/// iteratively with restarts until the gradient vanishes.
pub fn cg_minimize(
    y_k: f64,
    phi_seq: &[Vec<f64>],
    past: &[f64],
    target: &[f64],
    lambda: f64,
    nu: usize,
) -> Vec<f64> {
    let n = phi_seq.len();
    let base = recursive_predict(y_k, phi_seq, &[], past);
    let cols: Vec<Vec<f64>> = (0..nu)
        .map(|c| {
            let mut unit = vec![0.0; nu];
            unit[c] = 1.0;
            let p = recursive_predict(y_k, phi_seq, &unit, past);
            (0..n).map(|r| p[r] - base[r]).collect()
        })
        .collect();
    let resid: Vec<f64> = (0..n).map(|r| target[r] - base[r]).collect();
    // H x = b with H = MᵀM + λI, b = Mᵀ resid; H applied without forming it.
    let apply_h = |x: &[f64]| -> Vec<f64> {
        let mx: Vec<f64> = (0..n).map(|r| (0..nu).map(|c| cols[c][r] * x[c]).sum()).collect();
        (0..nu).map(|c| dot(&cols[c], &mx) + lambda * x[c]).collect()
    };
    let b: Vec<f64> = (0..nu).map(|c| dot(&cols[c], &resid)).collect();
    let mut x = vec![0.0; nu];
    for _restart in 0..20 {
        let hx = apply_h(&x);
        let mut r: Vec<f64> = (0..nu).map(|i| b[i] - hx[i]).collect();
        if dot(&r, &r).sqrt() <= 1e-15 * dot(&b, &b).sqrt().max(1e-300) {
            break;
        }
        let mut p = r.clone();
        for _ in 0..nu {
            let hp = apply_h(&p);
            let rr = dot(&r, &r);
            let php = dot(&p, &hp);
            if rr == 0.0 || php == 0.0 {
                break;
            }
            let alpha = rr / php;
            for i in 0..nu {
                x[i] += alpha * p[i];
                r[i] -= alpha * hp[i];
            }
            let beta = dot(&r, &r) / rr;
            for i in 0..nu {
                p[i] = r[i] + beta * p[i];
            }
        }
    }
    x
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// One-step MFAC increment written straight from the scalar formula.
pub fn mfac_scalar(phi: &[f64], y: f64, y_star: f64, past: &[f64], lambda: f64, rho: &[f64]) -> f64 {
    let mut memory = 0.0;
    for i in 1..phi.len() {
        memory += rho[i] * phi[i] * past[i - 1];
    }
    phi[0] * (rho[0] * (y_star - y) - memory) / (lambda + phi[0] * phi[0])
}

/// All roots of `z^n − a₁z^{n−1} − … − a_n` by Durand–Kerner iteration,
/// returned as `(re, im)` pairs.
pub fn companion_roots(first_row: &[f64]) -> Vec<(f64, f64)> {
    let n = first_row.len();
    let eval = |z: (f64, f64)| {
        let mut acc = (1.0, 0.0);
        for &a in first_row {
            acc = cadd(cmul(acc, z), (-a, 0.0));
        }
        acc
    };
    let radius = 1.0 + first_row.iter().map(|a| a.abs()).fold(0.0, f64::max);
    let mut roots: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let t = 0.4 + 2.0 * std::f64::consts::PI * i as f64 / n as f64;
            (radius * t.cos(), radius * t.sin())
        })
        .collect();
    for _ in 0..2000 {
        let mut moved: f64 = 0.0;
        for i in 0..n {
            let mut denom = (1.0, 0.0);
            for j in 0..n {
                if i != j {
                    denom = cmul(denom, csub(roots[i], roots[j]));
                }
            }
            let step = cdiv(eval(roots[i]), denom);
            roots[i] = csub(roots[i], step);
            moved = moved.max(cabs(step));
        }
        if moved < 1e-15 {
            break;
        }
    }
    roots
}

pub fn cabs(z: (f64, f64)) -> f64 {
    z.0.hypot(z.1)
}
fn cadd(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    (a.0 + b.0, a.1 + b.1)
}
fn csub(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    (a.0 - b.0, a.1 - b.1)
}
fn cmul(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
}
fn cdiv(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    let d = b.0 * b.0 + b.1 * b.1;
    ((a.0 * b.0 + a.1 * b.1) / d, (a.1 * b.0 - a.0 * b.1) / d)
}

/// A random predictive-control instance.
#[derive(Debug, Clone)]
pub struct Instance {
    pub horizon: usize,
    pub control_horizon: usize,
    pub order: usize,
    pub lambda: f64,
    pub y_k: f64,
    pub phi_seq: Vec<Vec<f64>>,
    pub past: Vec<f64>,
    pub target: Vec<f64>,
}

pub fn instance(max_n: usize, max_nu: usize, max_l: usize, lambda: (f64, f64)) -> impl Strategy<Value = Instance> {
    (1..=max_n, 1..=max_nu, 1..=max_l)
        .prop_flat_map(move |(n, nu, l)| {
            let nu = nu.min(n);
            (
                Just((n, nu, l)),
                // λ log-uniform on the given range.
                (lambda.0.ln()..=lambda.1.ln()).prop_map(f64::exp),
                -10.0..10.0f64,
                prop::collection::vec(prop::collection::vec(-2.0..2.0f64, l), n),
                prop::collection::vec(-3.0..3.0f64, l),
                prop::collection::vec(-10.0..10.0f64, n),
            )
        })
        .prop_map(|((horizon, control_horizon, order), lambda, y_k, phi_seq, past, target)| Instance {
            horizon,
            control_horizon,
            order,
            lambda,
            y_k,
            phi_seq,
            past,
            target,
        })
}

/// Drives the synthetic PFDL plant with uniformly random inputs and feeds
/// the projection estimator. Returns the ∞-norm estimation error after
/// each step.
pub fn identify_synthetic(phi_true: &[f64], eta: f64, mu: f64, steps: usize, seed: u64) -> Vec<f64> {
    use mfapc_core::estimator::{Estimator, EstimatorConfig};
    use mfapc_core::{ControlWindow, PgVector, Plant, SyntheticPfdlPlant};
    use rand::{rngs::SmallRng, Rng, SeedableRng};

    let l = phi_true.len();
    let mut rng = SmallRng::seed_from_u64(seed);
    let mut plant = SyntheticPfdlPlant::new(PgVector::from_slice(phi_true).unwrap(), 0.0);
    let mut init = vec![0.0; l];
    init[0] = 1.0;
    let cfg = EstimatorConfig { eta, mu, epsilon: 1e-5, pg_bound: None };
    let mut est = Estimator::new(cfg, PgVector::from_slice(&init).unwrap()).unwrap();
    let mut window = ControlWindow::zeros(l).unwrap();
    let mut u_prev = 0.0;
    let mut errors = Vec::with_capacity(steps);
    for _ in 0..steps {
        let u = rng.random_range(-1.0..1.0);
        let y_prev = plant.output();
        let y = plant.step(u).unwrap();
        window.push(u - u_prev);
        u_prev = u;
        est.estimate(y - y_prev, &window).unwrap();
        est.reset();
        let err = est
            .phi_hat()
            .as_slice()
            .iter()
            .zip(phi_true)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        errors.push(err);
    }
    errors
}

//! L2-regularized logistic regression, full-batch gradient descent with
//! backtracking line search and a fixed diagonal step scaling.
//! Deterministic: zero start, no sampling.

use serde::{Deserialize, Serialize};

use super::ClassifyError;
use crate::corpus::Class;
use crate::features::SparseFeatureMatrix;
use crate::num::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogisticParams<F> {
    pub lambda: F,
    pub max_iter: usize,
    pub tol: F,
}

impl<F: Real> Default for LogisticParams<F> {
    fn default() -> Self {
        LogisticParams {
            lambda: F::lit(1e-4),
            max_iter: 1000,
            tol: F::lit(1e-8),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticModel<F> {
    pub hyperparameters: LogisticParams<F>,
    pub weights: Vec<F>,
    pub bias: F,
    pub initial_loss: F,
    pub loss: F,
    pub iterations: usize,
}

/// `log(1 + exp(t))` without overflow.
#[inline]
fn softplus<F: Real>(t: F) -> F {
    t.max(F::zero()) + (-t.abs()).exp().ln_1p()
}

#[inline]
pub fn sigmoid<F: Real>(t: F) -> F {
    if t >= F::zero() {
        F::one() / (F::one() + (-t).exp())
    } else {
        let e = t.exp();
        e / (F::one() + e)
    }
}

#[inline]
fn dot<F: Real>(w: &[F], row: &[(u32, F)]) -> F {
    row.iter()
        .filter_map(|&(o, v)| w.get(o as usize).map(|&wi| wi * v))
        .sum()
}

#[inline]
fn signed(c: Class) -> f64 {
    if c == Class::Bug {
        1.0
    } else {
        -1.0
    }
}

/// Objective `(1/N) Σ log(1 + exp(-y (w·x + b))) + (λ/2)‖w‖²` with
/// `y ∈ {-1, +1}`.
pub fn objective<F: Real>(m: &SparseFeatureMatrix<F>, w: &[F], b: F, lambda: F) -> F {
    let n = F::from_count(m.len());
    let data: F = m
        .rows
        .iter()
        .map(|r| softplus(-F::lit(signed(r.label)) * (dot(w, &r.values) + b)))
        .sum();
    let reg: F = w.iter().map(|&x| x * x).sum();
    data / n + lambda * F::lit(0.5) * reg
}

/// Gradient of [`objective`] with respect to `(w, b)`.
pub fn gradient<F: Real>(m: &SparseFeatureMatrix<F>, w: &[F], b: F, lambda: F) -> (Vec<F>, F) {
    let n = F::from_count(m.len());
    let mut gw: Vec<F> = w.iter().map(|&x| lambda * x).collect();
    let mut gb = F::zero();
    for r in &m.rows {
        let y = F::lit(signed(r.label));
        // d/dz softplus(-y z) = -y * sigmoid(-y z)
        let coef = -y * sigmoid(-y * (dot(w, &r.values) + b)) / n;
        gb = gb + coef;
        for &(o, v) in &r.values {
            if let Some(g) = gw.get_mut(o as usize) {
                *g = *g + coef * v;
            }
        }
    }
    (gw, gb)
}

pub fn train_logistic<F: Real>(
    m: &SparseFeatureMatrix<F>,
    params: &LogisticParams<F>,
) -> Result<LogisticModel<F>, ClassifyError> {
    super::require_both_classes(m)?;
    let lambda = params.lambda;
    // Diagonal bound on the Hessian: sigmoid' <= 1/4, so each coordinate's
    // curvature is at most mean(x_j^2)/4 + lambda (bias: 1/4). Steps are
    // scaled by its inverse; the line search handles the rest.
    let n = F::from_count(m.len());
    let mut curvature = vec![lambda; m.num_features];
    for r in &m.rows {
        for &(o, v) in &r.values {
            curvature[o as usize] = curvature[o as usize] + F::lit(0.25) * v * v / n;
        }
    }
    let precond: Vec<F> = curvature
        .iter()
        .map(|&c| if c > F::zero() { c.recip() } else { F::one() })
        .collect();
    let precond_b = F::lit(4.0);

    let mut w = vec![F::zero(); m.num_features];
    let mut b = F::zero();
    let mut loss = objective(m, &w, b, lambda);
    let initial_loss = loss;
    let mut step = F::one();
    let mut iterations = 0;

    while iterations < params.max_iter {
        let (gw, gb) = gradient(m, &w, b, lambda);
        let dw: Vec<F> = gw.iter().zip(&precond).map(|(&g, &p)| g * p).collect();
        let db = gb * precond_b;
        let decrease = gw.iter().zip(&dw).map(|(&g, &d)| g * d).sum::<F>() + gb * db;
        if decrease == F::zero() {
            break;
        }
        // Armijo backtracking; halve the step until the loss drops enough.
        let accepted = loop {
            let cw: Vec<F> = w.iter().zip(&dw).map(|(&x, &d)| x - step * d).collect();
            let cb = b - step * db;
            let closs = objective(m, &cw, cb, lambda);
            if closs <= loss - F::lit(0.5) * step * decrease {
                break Some((cw, cb, closs));
            }
            step = step * F::lit(0.5);
            if step < F::epsilon() * F::epsilon() {
                break None;
            }
        };
        let Some((cw, cb, closs)) = accepted else { break };
        iterations += 1;
        let rel = (loss - closs) / loss.abs().max(F::min_positive_value());
        w = cw;
        b = cb;
        loss = closs;
        step = (step * F::lit(2.0)).min(F::lit(1e6));
        if rel < params.tol {
            break;
        }
    }

    Ok(LogisticModel {
        hyperparameters: *params,
        weights: w,
        bias: b,
        initial_loss,
        loss,
        iterations,
    })
}

/// `p = sigmoid(w·x + b)`; BUG iff `p >= 0.5`.
pub fn predict_logistic<F: Real>(model: &LogisticModel<F>, row: &[(u32, F)]) -> (Class, F) {
    let p = sigmoid(dot(&model.weights, row) + model.bias);
    let class = if p >= F::lit(0.5) { Class::Bug } else { Class::NonBug };
    (class, p)
}

//! L2-regularized squared-hinge binary classification.
//!
//! Dual coordinate descent for
//!
//! ```text
//! min_w  0.5 ||w||^2 + C * sum_i max(0, 1 - y_i w^T x_i)^2
//! ```
//!
//! following the standard dual formulation: minimize
//! `0.5 a^T (Q + D) a - e^T a` over `a >= 0` with `Q_ij = y_i y_j x_i^T x_j`
//! and `D = I / (2C)`, maintaining `w = sum_i a_i y_i x_i`. One coordinate
//! pass visits every instance in a seeded random order; the solver stops when
//! the maximum absolute projected gradient over a pass drops below `tol`.
//! No shrinking, so every pass scans all instances and the stopping test is
//! exact.
//!
//! A bias term, when wanted, is an appended constant feature on the input
//! matrix; this module never special-cases it.

use crate::error::{Error, Result};
use crate::rng::SplitMix64;
use crate::sparse::SparseMat;

/// Solver hyperparameters. `C` is the loss penalty from the training setup;
/// the defaults mirror the usual linear-SVM configuration.
#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    pub c: f64,
    pub max_iters: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            c: 1.0,
            max_iters: 1000,
            tol: 1e-4,
            seed: 0,
        }
    }
}

/// Trained weights plus convergence diagnostics.
#[derive(Debug, Clone)]
pub struct SolverOutput {
    /// Dense weight vector over the matrix's column space.
    pub weights: Vec<f64>,
    pub outer_iters: usize,
    pub converged: bool,
    /// Dual objective after each outer pass; non-increasing by construction.
    pub dual_objective: Vec<f64>,
}

/// Train on rows of `x` with targets in {-1, +1}.
pub fn train_squared_hinge(x: &SparseMat, y: &[f64], opts: &SolverOptions) -> Result<SolverOutput> {
    if x.rows() != y.len() {
        return Err(Error::DimMismatch {
            left: x.rows(),
            right: y.len(),
        });
    }
    if x.rows() == 0 {
        return Err(Error::BadInput("no training instances".into()));
    }
    if let Some(bad) = y.iter().find(|&&t| t != 1.0 && t != -1.0) {
        return Err(Error::BadInput(format!("target {bad} is not +/-1")));
    }
    if !(opts.c.is_finite() && opts.c > 0.0) {
        return Err(Error::BadInput(format!("C must be positive, got {}", opts.c)));
    }

    let n = x.rows();
    let diag = 0.5 / opts.c;
    let mut w = vec![0.0f64; x.cols()];
    let mut alpha = vec![0.0f64; n];
    // Q_ii + D_ii per instance; empty rows would divide by zero without diag.
    let qd: Vec<f64> = (0..n).map(|i| x.row(i).squared_norm() + diag).collect();

    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = SplitMix64::new(opts.seed);
    let mut dual_objective = Vec::new();
    let mut converged = false;
    let mut outer_iters = 0;

    for _ in 0..opts.max_iters {
        outer_iters += 1;
        rng.shuffle(&mut order);
        let mut max_pg: f64 = 0.0;
        for &i in &order {
            let row = x.row(i);
            let g = y[i] * row.dot_dense(&w) - 1.0 + diag * alpha[i];
            let pg = if alpha[i] == 0.0 { g.min(0.0) } else { g };
            max_pg = max_pg.max(pg.abs());
            if pg.abs() > 1e-12 {
                let old = alpha[i];
                let new = (old - g / qd[i]).max(0.0);
                alpha[i] = new;
                row.add_scaled_into((new - old) * y[i], &mut w);
            }
        }
        let w_sq: f64 = w.iter().map(|v| v * v).sum();
        let alpha_sum: f64 = alpha.iter().sum();
        let alpha_sq_sum: f64 = alpha.iter().map(|a| a * a).sum();
        dual_objective.push(0.5 * w_sq + 0.5 * diag * alpha_sq_sum - alpha_sum);
        if max_pg < opts.tol {
            converged = true;
            break;
        }
    }

    Ok(SolverOutput {
        weights: w,
        outer_iters,
        converged,
        dual_objective,
    })
}

/// Primal objective `0.5 ||w||^2 + C sum_i max(0, 1 - y_i w^T x_i)^2`.
pub fn primal_objective(x: &SparseMat, y: &[f64], w: &[f64], c: f64) -> f64 {
    let reg = 0.5 * w.iter().map(|v| v * v).sum::<f64>();
    let loss: f64 = (0..x.rows())
        .map(|i| {
            let slack = (1.0 - y[i] * x.row(i).dot_dense(w)).max(0.0);
            slack * slack
        })
        .sum();
    reg + c * loss
}

/// Gradient of the primal objective; the loss term is differentiable because
/// the hinge is squared.
pub fn primal_gradient(x: &SparseMat, y: &[f64], w: &[f64], c: f64) -> Vec<f64> {
    let mut grad = w.to_vec();
    for (i, &target) in y.iter().enumerate() {
        let row = x.row(i);
        let slack = 1.0 - target * row.dot_dense(w);
        if slack > 0.0 {
            row.add_scaled_into(-2.0 * c * slack * target, &mut grad);
        }
    }
    grad
}

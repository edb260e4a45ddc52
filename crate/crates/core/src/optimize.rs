//! L-BFGS minimization for smooth convex objectives.
//!
//! Deterministic by construction: fixed iteration order, no randomness, no
//! parallel reductions, so identical inputs give bit-identical results.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::math;

/// Number of curvature pairs kept for the inverse-Hessian approximation.
const HISTORY: usize = 5;
/// Armijo sufficient-decrease constant.
const ARMIJO_C1: f64 = 1e-4;
/// Step-size reduction factor during backtracking.
const BACKTRACK: f64 = 0.5;
/// Maximum halvings before the line search gives up.
const MAX_BACKTRACKS: usize = 60;

#[derive(Debug, Clone, Copy)]
pub struct OptimizeParams {
    /// Stop when the gradient max-norm falls to this value.
    pub tolerance: f64,
    pub max_iterations: usize,
}

/// Where minimization ended and what it found.
#[derive(Debug, Clone)]
pub struct OptimizeOutcome {
    pub position: Vec<f64>,
    pub value: f64,
    pub gradient_max_norm: f64,
    pub iterations: usize,
    /// True when the gradient tolerance was reached (as opposed to hitting
    /// the iteration cap or stalling in the line search).
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OptimizeError {
    /// The objective or gradient became NaN/infinite.
    NonFinite { iteration: usize },
}

impl fmt::Display for OptimizeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OptimizeError::NonFinite { iteration } => {
                write!(f, "non-finite objective or gradient at iteration {iteration}")
            }
        }
    }
}

impl core::error::Error for OptimizeError {}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut sum = 0.0;
    for (x, y) in a.iter().zip(b) {
        sum += x * y;
    }
    sum
}

fn max_norm(v: &[f64]) -> f64 {
    let mut best = 0.0f64;
    for &x in v {
        best = best.max(math::abs(x));
    }
    best
}

fn all_finite(v: &[f64]) -> bool {
    v.iter().all(|x| x.is_finite())
}

/// Two-loop recursion: turns the gradient into a descent direction using the
/// stored (s, y) curvature pairs.
fn search_direction(gradient: &[f64], history: &VecDeque<(Vec<f64>, Vec<f64>, f64)>) -> Vec<f64> {
    let mut q: Vec<f64> = gradient.to_vec();
    let mut alphas = Vec::with_capacity(history.len());
    for (s, y, rho) in history.iter().rev() {
        let alpha = rho * dot(s, &q);
        for (qi, yi) in q.iter_mut().zip(y) {
            *qi -= alpha * yi;
        }
        alphas.push(alpha);
    }
    if let Some((s, y, _)) = history.back() {
        let yy = dot(y, y);
        if yy > 0.0 {
            let gamma = dot(s, y) / yy;
            for qi in q.iter_mut() {
                *qi *= gamma;
            }
        }
    }
    for ((s, y, rho), alpha) in history.iter().zip(alphas.into_iter().rev()) {
        let beta = rho * dot(y, &q);
        for (qi, si) in q.iter_mut().zip(s) {
            *qi += (alpha - beta) * si;
        }
    }
    for qi in q.iter_mut() {
        *qi = -*qi;
    }
    q
}

/// Minimizes `eval`, which must write the gradient at `x` into its second
/// argument and return the objective value. Starts from `x0`.
pub fn minimize<F>(
    x0: Vec<f64>,
    params: OptimizeParams,
    mut eval: F,
) -> Result<OptimizeOutcome, OptimizeError>
where
    F: FnMut(&[f64], &mut [f64]) -> f64,
{
    let dim = x0.len();
    let mut x = x0;
    let mut gradient = vec![0.0; dim];
    let mut value = eval(&x, &mut gradient);
    if !value.is_finite() || !all_finite(&gradient) {
        return Err(OptimizeError::NonFinite { iteration: 0 });
    }

    let mut history: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::new();
    let mut trial = vec![0.0; dim];
    let mut trial_gradient = vec![0.0; dim];
    let mut iterations = 0;
    let mut converged = max_norm(&gradient) <= params.tolerance;

    while !converged && iterations < params.max_iterations {
        iterations += 1;
        let mut direction = search_direction(&gradient, &history);
        let mut slope = dot(&direction, &gradient);
        if slope >= 0.0 {
            // Curvature information went stale; fall back to steepest descent.
            history.clear();
            for (d, g) in direction.iter_mut().zip(&gradient) {
                *d = -g;
            }
            slope = dot(&direction, &gradient);
            if slope >= 0.0 {
                break; // gradient is numerically zero
            }
        }

        let mut step = if history.is_empty() {
            1.0 / f64::max(1.0, max_norm(&direction))
        } else {
            1.0
        };
        let mut accepted_value = None;
        for _ in 0..MAX_BACKTRACKS {
            for ((t, xi), di) in trial.iter_mut().zip(&x).zip(&direction) {
                *t = xi + step * di;
            }
            let trial_value = eval(&trial, &mut trial_gradient);
            if !trial_value.is_finite() || !all_finite(&trial_gradient) {
                return Err(OptimizeError::NonFinite { iteration: iterations });
            }
            if trial_value <= value + ARMIJO_C1 * step * slope {
                accepted_value = Some(trial_value);
                break;
            }
            step *= BACKTRACK;
        }
        let Some(trial_value) = accepted_value else {
            break; // no further progress representable
        };

        let mut s = vec![0.0; dim];
        let mut y = vec![0.0; dim];
        for i in 0..dim {
            s[i] = trial[i] - x[i];
            y[i] = trial_gradient[i] - gradient[i];
        }
        let sy = dot(&s, &y);
        if sy > 1e-12 * dot(&y, &y).max(1e-300) {
            if history.len() == HISTORY {
                history.pop_front();
            }
            history.push_back((s, y, 1.0 / sy));
        }

        core::mem::swap(&mut x, &mut trial);
        core::mem::swap(&mut gradient, &mut trial_gradient);
        value = trial_value;
        converged = max_norm(&gradient) <= params.tolerance;
    }

    Ok(OptimizeOutcome {
        gradient_max_norm: max_norm(&gradient),
        position: x,
        value,
        iterations,
        converged,
    })
}

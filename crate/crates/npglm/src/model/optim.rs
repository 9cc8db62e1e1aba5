//! Damped-Newton minimizer for the convex inner objective. The outer
//! contract is only a stationarity residual, so any descent method would do;
//! Newton with an Armijo backtracking line search keeps inner solves to a
//! handful of steps at these dimensions.

use ndarray::{Array1, Array2};

use crate::survival::LinkFunction;

use super::objective::{objective_hessian, objective_value_grad, Design};
use super::FitError;

pub(crate) struct InnerSettings {
    pub gradient_tolerance: f64,
    pub max_steps: usize,
    pub l2: f64,
}

/// Minimizes the penalized objective over `w` starting from `w0`.
/// Converged when the per-sample sup-norm of the gradient drops below the
/// tolerance; a line search that cannot improve the objective any further
/// (floating-point floor) also terminates.
pub(crate) fn minimize(
    design: &Design,
    exposure: &[f64],
    w0: &Array1<f64>,
    link: LinkFunction,
    settings: &InnerSettings,
) -> Result<Array1<f64>, FitError> {
    let n = design.n() as f64;
    let mut w = w0.clone();
    let (mut value, mut grad) = objective_value_grad(design, exposure, &w, link, settings.l2)?;
    for _ in 0..settings.max_steps {
        if sup_norm(&grad) / n <= settings.gradient_tolerance {
            break;
        }
        let hess = objective_hessian(design, exposure, &w, link, settings.l2);
        let direction = newton_direction(&hess, &grad);
        let slope: f64 = grad.dot(&direction);
        debug_assert!(slope <= 0.0, "newton direction must descend");

        let mut step = 1.0;
        let mut advanced = false;
        for _ in 0..60 {
            let candidate = &w + &(step * &direction);
            match objective_value_grad(design, exposure, &candidate, link, settings.l2) {
                Ok((cv, cg)) if cv <= value + 1e-4 * step * slope => {
                    w = candidate;
                    value = cv;
                    grad = cg;
                    advanced = true;
                    break;
                }
                _ => step *= 0.5,
            }
        }
        if !advanced {
            // No representable improvement left; w is as stationary as the
            // arithmetic allows.
            break;
        }
    }
    Ok(w)
}

/// Solves `(H + jitter I) p = -grad`, escalating the jitter until the
/// factorization succeeds. The Hessian is positive semidefinite, so a tiny
/// diagonal shift is enough whenever exposures leave it rank-deficient.
fn newton_direction(hess: &Array2<f64>, grad: &Array1<f64>) -> Array1<f64> {
    let p = hess.nrows();
    let scale = (0..p).map(|j| hess[[j, j]].abs()).fold(0.0f64, f64::max).max(1.0);
    let mut jitter = 0.0;
    loop {
        let mut shifted = hess.clone();
        for j in 0..p {
            shifted[[j, j]] += jitter;
        }
        if let Some(direction) = cholesky_solve(&shifted, &(-grad)) {
            if direction.iter().all(|v| v.is_finite()) && grad.dot(&direction) <= 0.0 {
                return direction;
            }
        }
        jitter = if jitter == 0.0 { scale * 1e-12 } else { jitter * 100.0 };
        if jitter > scale * 1e6 {
            // Hopeless curvature; fall back to steepest descent.
            return -grad;
        }
    }
}

/// Dense Cholesky solve for small symmetric positive-definite systems.
fn cholesky_solve(a: &Array2<f64>, b: &Array1<f64>) -> Option<Array1<f64>> {
    let p = a.nrows();
    let mut l = Array2::<f64>::zeros((p, p));
    for i in 0..p {
        for j in 0..=i {
            let mut sum = a[[i, j]];
            for k in 0..j {
                sum -= l[[i, k]] * l[[j, k]];
            }
            if i == j {
                if sum <= 0.0 || !sum.is_finite() {
                    return None;
                }
                l[[i, i]] = sum.sqrt();
            } else {
                l[[i, j]] = sum / l[[j, j]];
            }
        }
    }
    // Forward then backward substitution.
    let mut y = Array1::<f64>::zeros(p);
    for i in 0..p {
        let mut sum = b[i];
        for k in 0..i {
            sum -= l[[i, k]] * y[k];
        }
        y[i] = sum / l[[i, i]];
    }
    let mut x = Array1::<f64>::zeros(p);
    for i in (0..p).rev() {
        let mut sum = y[i];
        for k in i + 1..p {
            sum -= l[[k, i]] * x[k];
        }
        x[i] = sum / l[[i, i]];
    }
    Some(x)
}

pub(crate) fn sup_norm(v: &Array1<f64>) -> f64 {
    v.iter().fold(0.0f64, |acc, x| acc.max(x.abs()))
}

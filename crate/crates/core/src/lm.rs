//! Damped least squares (Levenberg–Marquardt) for small real residual systems.

use nalgebra::{DMatrix, DVector};

#[derive(Clone, Copy, Debug)]
pub struct LmOptions {
    pub max_iter: usize,
    pub grad_tol: f64,
    pub residual_tol: f64,
    /// Central-difference step.
    pub h: f64,
}

impl Default for LmOptions {
    fn default() -> Self {
        Self { max_iter: 400, grad_tol: 1e-12, residual_tol: 1e-15, h: 1e-6 }
    }
}

#[derive(Clone, Debug)]
pub struct LmResult {
    pub x: Vec<f64>,
    /// Max-abs residual at `x`.
    pub residual: f64,
    pub iterations: usize,
}

fn jacobian(f: &dyn Fn(&[f64]) -> Vec<f64>, x: &[f64], m: usize, h: f64) -> DMatrix<f64> {
    let n = x.len();
    let mut jac = DMatrix::zeros(m, n);
    let mut xp = x.to_vec();
    for j in 0..n {
        let x0 = xp[j];
        xp[j] = x0 + h;
        let fp = f(&xp);
        xp[j] = x0 - h;
        let fm = f(&xp);
        xp[j] = x0;
        for i in 0..m {
            jac[(i, j)] = (fp[i] - fm[i]) / (2.0 * h);
        }
    }
    jac
}

fn sq(r: &[f64]) -> f64 {
    r.iter().map(|v| v * v).sum()
}

pub fn minimize(f: &dyn Fn(&[f64]) -> Vec<f64>, x0: &[f64], opts: LmOptions) -> LmResult {
    let mut x = x0.to_vec();
    let mut r = f(&x);
    let m = r.len();
    let mut cost = sq(&r);
    let mut lambda = 1e-3;
    let mut it = 0;
    while it < opts.max_iter {
        it += 1;
        let max_r = r.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if max_r < opts.residual_tol {
            break;
        }
        let jac = jacobian(f, &x, m, opts.h);
        let rv = DVector::from_column_slice(&r);
        let g = jac.transpose() * &rv;
        if g.amax() < opts.grad_tol {
            break;
        }
        let jtj = jac.transpose() * &jac;
        let mut improved = false;
        for _ in 0..30 {
            let mut a = jtj.clone();
            for i in 0..a.nrows() {
                a[(i, i)] += lambda * (1.0 + jtj[(i, i)]);
            }
            let Some(step) = a.cholesky().map(|ch| ch.solve(&(-&g))) else {
                lambda *= 10.0;
                continue;
            };
            let xn: Vec<f64> = x.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
            let rn = f(&xn);
            let cn = sq(&rn);
            if cn < cost {
                x = xn;
                r = rn;
                cost = cn;
                lambda = (lambda / 10.0).max(1e-15);
                improved = true;
                break;
            }
            lambda *= 10.0;
        }
        if !improved {
            break;
        }
    }
    let residual = r.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    LmResult { x, residual, iterations: it }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_rosenbrock_as_least_squares() {
        let f = |x: &[f64]| vec![10.0 * (x[1] - x[0] * x[0]), 1.0 - x[0]];
        let res = minimize(&f, &[-1.2, 1.0], LmOptions::default());
        assert!((res.x[0] - 1.0).abs() < 1e-9 && (res.x[1] - 1.0).abs() < 1e-9, "{res:?}");
    }

    #[test]
    fn quadratic_system_two_roots() {
        // x² = 1
        let f = |x: &[f64]| vec![x[0] * x[0] - 1.0];
        assert!((minimize(&f, &[0.3], LmOptions::default()).x[0] - 1.0).abs() < 1e-10);
        assert!((minimize(&f, &[-2.0], LmOptions::default()).x[0] + 1.0).abs() < 1e-10);
    }
}

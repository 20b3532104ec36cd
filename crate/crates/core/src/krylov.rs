//! Restarted GMRES with right preconditioning.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct GmresOutcome {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// Final `‖b − A x‖ / ‖b‖`.
    pub relative_residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GmresOptions {
    pub tol: f64,
    pub max_iters: usize,
    pub restart: usize,
}

impl Default for GmresOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iters: 500,
            restart: 50,
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Solves `A x = b` where `A` is only available through `apply`.
///
/// `precondition` applies `P^{-1}`; the Krylov space is built for `A P^{-1}`
/// so the reported residual is the true one. Counts one iteration per
/// operator application.
pub fn gmres(
    mut apply: impl FnMut(&[f64]) -> Result<Vec<f64>>,
    mut precondition: impl FnMut(&[f64]) -> Result<Vec<f64>>,
    b: &[f64],
    options: &GmresOptions,
) -> Result<GmresOutcome> {
    let n = b.len();
    let b_norm = norm(b);
    if b_norm == 0.0 {
        return Ok(GmresOutcome {
            x: vec![0.0; n],
            iterations: 0,
            relative_residual: 0.0,
        });
    }
    let m = options.restart.max(1);
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut iterations = 0;
    let mut rel = 1.0;

    while iterations < options.max_iters {
        let beta = norm(&r);
        rel = beta / b_norm;
        if rel <= options.tol {
            break;
        }
        let mut basis: Vec<Vec<f64>> = vec![r.iter().map(|v| v / beta).collect()];
        let mut hess: Vec<Vec<f64>> = Vec::with_capacity(m);
        let mut cs: Vec<f64> = Vec::with_capacity(m);
        let mut sn: Vec<f64> = Vec::with_capacity(m);
        let mut g = vec![0.0; m + 1];
        g[0] = beta;
        let mut cols = 0;

        while cols < m && iterations < options.max_iters {
            let z = precondition(&basis[cols])?;
            let mut w = apply(&z)?;
            iterations += 1;
            // modified Gram-Schmidt
            let mut h = vec![0.0; cols + 2];
            for (i, v) in basis.iter().enumerate() {
                h[i] = dot(&w, v);
                for (wk, vk) in w.iter_mut().zip(v) {
                    *wk -= h[i] * vk;
                }
            }
            h[cols + 1] = norm(&w);
            for i in 0..cols {
                let t = cs[i] * h[i] + sn[i] * h[i + 1];
                h[i + 1] = -sn[i] * h[i] + cs[i] * h[i + 1];
                h[i] = t;
            }
            let denom = h[cols].hypot(h[cols + 1]);
            let (c, s) = if denom == 0.0 { (1.0, 0.0) } else { (h[cols] / denom, h[cols + 1] / denom) };
            let next_norm = h[cols + 1];
            h[cols] = denom;
            h[cols + 1] = 0.0;
            cs.push(c);
            sn.push(s);
            g[cols + 1] = -s * g[cols];
            g[cols] *= c;
            hess.push(h);
            cols += 1;
            rel = g[cols].abs() / b_norm;
            if rel <= options.tol || next_norm == 0.0 {
                break;
            }
            basis.push(w.iter().map(|v| v / next_norm).collect());
        }

        // back substitution for the least-squares coefficients
        let mut y = vec![0.0; cols];
        for i in (0..cols).rev() {
            let mut s = g[i];
            for j in (i + 1)..cols {
                s -= hess[j][i] * y[j];
            }
            y[i] = s / hess[i][i];
        }
        let mut update = vec![0.0; n];
        for (yj, v) in y.iter().zip(&basis) {
            for (u, vk) in update.iter_mut().zip(v) {
                *u += yj * vk;
            }
        }
        let dx = precondition(&update)?;
        for (xi, d) in x.iter_mut().zip(&dx) {
            *xi += d;
        }
        let ax = apply(&x)?;
        for ((ri, bi), ai) in r.iter_mut().zip(b).zip(&ax) {
            *ri = bi - ai;
        }
        rel = norm(&r) / b_norm;
        if rel <= options.tol {
            break;
        }
    }

    if rel <= options.tol && rel.is_finite() {
        Ok(GmresOutcome {
            x,
            iterations,
            relative_residual: rel,
        })
    } else {
        Err(Error::KrylovNoConvergence {
            iterations,
            residual: rel,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn dense(a: &[Vec<f64>]) -> impl FnMut(&[f64]) -> Result<Vec<f64>> + '_ {
        move |x: &[f64]| Ok(a.iter().map(|row| dot(row, x)).collect())
    }

    #[test]
    fn solves_nonsymmetric_system() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(5);
        let n = 40;
        let a: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { 4.0 } else { rng.gen_range(-0.1..0.1) })
                    .collect()
            })
            .collect();
        let x_true: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let b: Vec<f64> = a.iter().map(|row| dot(row, &x_true)).collect();
        let opts = GmresOptions {
            tol: 1e-12,
            restart: 10,
            ..Default::default()
        };
        let out = gmres(dense(&a), |v| Ok(v.to_vec()), &b, &opts).unwrap();
        for (x, t) in out.x.iter().zip(&x_true) {
            assert!((x - t).abs() < 1e-10);
        }
    }

    #[test]
    fn exact_preconditioner_converges_in_one_iteration() {
        let d: Vec<f64> = (1..=20).map(|i| i as f64).collect();
        let b = vec![1.0; 20];
        let out = gmres(
            |x| Ok(x.iter().zip(&d).map(|(x, d)| x * d).collect()),
            |x| Ok(x.iter().zip(&d).map(|(x, d)| x / d).collect()),
            &b,
            &GmresOptions::default(),
        )
        .unwrap();
        assert_eq!(out.iterations, 1);
        for (x, d) in out.x.iter().zip(&d) {
            assert!((x - 1.0 / d).abs() < 1e-14);
        }
    }

    #[test]
    fn reports_stall() {
        // rotation by 90 degrees: GMRES(1) makes no progress
        let b = vec![1.0, 0.0];
        let err = gmres(
            |x| Ok(vec![-x[1], x[0]]),
            |x| Ok(x.to_vec()),
            &b,
            &GmresOptions {
                tol: 1e-10,
                max_iters: 20,
                restart: 1,
            },
        )
        .unwrap_err();
        assert!(matches!(err, Error::KrylovNoConvergence { .. }));
    }
}

//! Legendre–Gauss–Lobatto collocation on a single interval.
//!
//! Nodes are the roots of `(1 - x^2) L_N'(x)` on the reference interval
//! `[-1, 1]`, found by Newton iteration from Chebyshev–Gauss–Lobatto guesses.
//! The associated quadrature integrates every polynomial of degree `2N - 1`
//! exactly, which is what makes the discrete Legendre transform below exact
//! for polynomials of degree `N`.

use crate::error::{Error, Result};

const NEWTON_TOL: f64 = 1e-14;
const NEWTON_MAX_ITERS: usize = 100;

/// Evaluates `(L_n(x), L_n'(x))` by the three-term recurrence.
pub fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let (mut p_prev, mut p) = (1.0, x);
    let (mut d_prev, mut d) = (0.0, 1.0);
    for k in 1..n {
        let kf = k as f64;
        let p_next = ((2.0 * kf + 1.0) * x * p - kf * p_prev) / (kf + 1.0);
        // L'_{k+1} = L'_{k-1} + (2k+1) L_k
        let d_next = d_prev + (2.0 * kf + 1.0) * p;
        p_prev = p;
        p = p_next;
        d_prev = d;
        d = d_next;
    }
    (p, d)
}

/// Returns the `N + 1` Legendre–Gauss–Lobatto nodes (ascending, including
/// `±1`) and weights on the reference interval `[-1, 1]`.
pub fn lgl_nodes_weights(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if n < 2 {
        return Err(Error::InvalidGrid(format!(
            "LGL degree must be at least 2, got {n}"
        )));
    }
    let nf = n as f64;
    let mut nodes = vec![0.0; n + 1];
    nodes[0] = -1.0;
    nodes[n] = 1.0;

    // Interior roots of L_N'. Only the left half is iterated; the right half
    // follows by symmetry so the node set is exactly symmetric.
    for j in 1..=(n / 2) {
        if 2 * j == n {
            nodes[j] = 0.0;
            continue;
        }
        let mut x = -(std::f64::consts::PI * j as f64 / nf).cos();
        let mut converged = false;
        for _ in 0..NEWTON_MAX_ITERS {
            let (p, dp) = legendre_and_derivative(n, x);
            // Legendre ODE: (1 - x^2) L'' = 2x L' - N(N+1) L
            let ddp = (2.0 * x * dp - nf * (nf + 1.0) * p) / (1.0 - x * x);
            let step = dp / ddp;
            x -= step;
            if step.abs() <= NEWTON_TOL {
                converged = true;
                break;
            }
        }
        if !converged || !x.is_finite() {
            return Err(Error::LglNewton { index: j });
        }
        nodes[j] = x;
        nodes[n - j] = -x;
    }

    let weights = nodes
        .iter()
        .map(|&x| {
            let (p, _) = legendre_and_derivative(n, x);
            2.0 / (nf * (nf + 1.0) * p * p)
        })
        .collect();
    Ok((nodes, weights))
}

/// Precomputed LGL data on the reference interval.
#[derive(Debug, Clone)]
pub(crate) struct LglBasis {
    pub degree: usize,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// `vandermonde[j * (N+1) + k] = L_k(x_j)`
    pub vandermonde: Vec<f64>,
    /// Collocation first-derivative matrix, row-major.
    pub diff: Vec<f64>,
}

impl LglBasis {
    pub fn new(degree: usize) -> Result<Self> {
        let (nodes, weights) = lgl_nodes_weights(degree)?;
        let m = degree + 1;
        let mut vandermonde = vec![0.0; m * m];
        for (j, &x) in nodes.iter().enumerate() {
            let (mut p_prev, mut p) = (1.0, x);
            vandermonde[j * m] = 1.0;
            vandermonde[j * m + 1] = x;
            for k in 1..degree {
                let kf = k as f64;
                let next = ((2.0 * kf + 1.0) * x * p - kf * p_prev) / (kf + 1.0);
                p_prev = p;
                p = next;
                vandermonde[j * m + k + 1] = p;
            }
        }

        let ln: Vec<f64> = (0..m).map(|j| vandermonde[j * m + degree]).collect();
        let mut diff = vec![0.0; m * m];
        for i in 0..m {
            let mut row_sum = 0.0;
            for j in 0..m {
                if i != j {
                    let d = ln[i] / (ln[j] * (nodes[i] - nodes[j]));
                    diff[i * m + j] = d;
                    row_sum += d;
                }
            }
            // negative row sum: differentiates constants to zero exactly
            diff[i * m + i] = -row_sum;
        }

        Ok(Self {
            degree,
            nodes,
            weights,
            vandermonde,
            diff,
        })
    }

    fn size(&self) -> usize {
        self.degree + 1
    }

    /// Normalization `(L_k, L_k)_N` of the discrete inner product.
    fn discrete_norm(&self, k: usize) -> f64 {
        if k == self.degree {
            2.0 / self.degree as f64
        } else {
            2.0 / (2.0 * k as f64 + 1.0)
        }
    }

    /// Legendre coefficients of the interpolant through `values`.
    pub fn forward(&self, values: &[f64]) -> Vec<f64> {
        let m = self.size();
        (0..m)
            .map(|k| {
                let s: f64 = (0..m)
                    .map(|j| self.weights[j] * values[j] * self.vandermonde[j * m + k])
                    .sum();
                s / self.discrete_norm(k)
            })
            .collect()
    }

    pub fn inverse(&self, coeffs: &[f64]) -> Vec<f64> {
        let m = self.size();
        (0..m)
            .map(|j| {
                (0..m)
                    .map(|k| coeffs[k] * self.vandermonde[j * m + k])
                    .sum()
            })
            .collect()
    }

    /// Applies the reference-interval derivative matrix.
    pub fn differentiate(&self, values: &[f64]) -> Vec<f64> {
        let m = self.size();
        (0..m)
            .map(|i| {
                (0..m)
                    .map(|j| self.diff[i * m + j] * values[j])
                    .sum()
            })
            .collect()
    }

    /// Galerkin solve of `(sigma - nu * scale^2 * d^2/dx^2) u = f` with
    /// homogeneous Dirichlet conditions, in the basis `L_k - L_{k+2}`.
    ///
    /// The system splits into even and odd modes, each tridiagonal.
    pub fn solve_dirichlet(&self, rhs: &[f64], sigma: f64, nu_scaled: f64) -> Result<Vec<f64>> {
        let n = self.degree;
        let a = self.forward(rhs);
        let modes = n - 1; // phi_0 .. phi_{N-2}
        let norm = |k: usize| 2.0 / (2.0 * k as f64 + 1.0);
        let load: Vec<f64> = (0..modes)
            .map(|k| a[k] * norm(k) - a[k + 2] * norm(k + 2))
            .collect();

        let mut u_hat = vec![0.0; modes];
        for parity in 0..2 {
            let idx: Vec<usize> = (parity..modes).step_by(2).collect();
            if idx.is_empty() {
                continue;
            }
            let diag: Vec<f64> = idx
                .iter()
                .map(|&k| sigma * (norm(k) + norm(k + 2)) + nu_scaled * (4.0 * k as f64 + 6.0))
                .collect();
            // coupling between k and k + 2
            let off: Vec<f64> = idx
                .iter()
                .take(idx.len() - 1)
                .map(|&k| -sigma * norm(k + 2))
                .collect();
            let b: Vec<f64> = idx.iter().map(|&k| load[k]).collect();
            let x = thomas(&off, &diag, &off, &b)?;
            for (&k, v) in idx.iter().zip(x) {
                u_hat[k] = v;
            }
        }

        let mut coeffs = vec![0.0; n + 1];
        for (k, &v) in u_hat.iter().enumerate() {
            coeffs[k] += v;
            coeffs[k + 2] -= v;
        }
        let mut u = self.inverse(&coeffs);
        // the basis vanishes at the endpoints; remove rounding residue
        u[0] = 0.0;
        u[n] = 0.0;
        Ok(u)
    }
}

/// Tridiagonal solve with sub-diagonal `lower`, diagonal `diag` and
/// super-diagonal `upper`.
fn thomas(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut pivot = diag[0];
    if pivot == 0.0 {
        return Err(Error::Singular("zero pivot in tridiagonal solve".into()));
    }
    if n > 1 {
        c[0] = upper[0] / pivot;
    }
    d[0] = rhs[0] / pivot;
    for i in 1..n {
        pivot = diag[i] - lower[i - 1] * c[i - 1];
        if pivot == 0.0 {
            return Err(Error::Singular("zero pivot in tridiagonal solve".into()));
        }
        if i < n - 1 {
            c[i] = upper[i] / pivot;
        }
        d[i] = (rhs[i] - lower[i - 1] * d[i - 1]) / pivot;
    }
    for i in (0..n - 1).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    Ok(d)
}

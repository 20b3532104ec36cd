//! Brute-force reference computations for testing.
//!
//! Nothing here calls into the correctors, the spectral machinery or the
//! time integrators; each routine is a deliberately naive, independent way of
//! computing a quantity the main code also computes.

use crate::error::{Error, Result};

/// Number of candidates scanned by [`projection_oracle`].
pub const PROJECTION_CANDIDATES: usize = 1_000_000;

/// Projection of `v` onto `[a, b]` by exhaustive search over a uniform grid
/// of [`PROJECTION_CANDIDATES`] points (endpoints included).
///
/// Accurate to the candidate spacing, `(b - a) / (PROJECTION_CANDIDATES - 1)`.
pub fn projection_oracle(v: f64, a: f64, b: f64) -> f64 {
    assert!(b > a, "projection_oracle needs b > a");
    let h = (b - a) / (PROJECTION_CANDIDATES - 1) as f64;
    let mut best = a;
    let mut best_dist = f64::INFINITY;
    for i in 0..PROJECTION_CANDIDATES {
        let u = if i + 1 == PROJECTION_CANDIDATES { b } else { a + h * i as f64 };
        let d = (u - v) * (u - v);
        if d < best_dist {
            best_dist = d;
            best = u;
        }
    }
    best
}

/// Plain bisection on `[lo, hi]`, which must bracket a sign change.
///
/// Stops when the bracket is narrower than `tol` or cannot be split further.
pub fn bisection_oracle(
    mut residual: impl FnMut(f64) -> f64,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
) -> Result<f64> {
    let mut flo = residual(lo);
    let fhi = residual(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo * fhi > 0.0 {
        return Err(Error::RootFinding(format!(
            "[{lo}, {hi}] does not bracket a root"
        )));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = residual(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Problems supported by [`dense_fd_reference`], all on a periodic interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FdProblem {
    /// `u_t = u_xx`
    Heat,
    /// `u_t = u_xx - (u^3 - u) / epsilon2`
    AllenCahn { epsilon2: f64 },
    /// `u_t = (x u (1 - u) + u_x)_x`
    FokkerPlanck,
}

/// Second-order centered differences with forward Euler on a uniform
/// periodic grid over `extent` (left endpoint included, right excluded).
///
/// `dt` must satisfy `dt <= h^2 / 4`.
pub fn dense_fd_reference(
    problem: FdProblem,
    extent: (f64, f64),
    u0: &[f64],
    dt: f64,
    steps: usize,
) -> Result<Vec<f64>> {
    let n = u0.len();
    if n < 3 {
        return Err(Error::InvalidParameter("need at least 3 points".into()));
    }
    let h = (extent.1 - extent.0) / n as f64;
    if !(dt > 0.0 && dt <= h * h / 4.0) {
        return Err(Error::InvalidParameter(format!(
            "explicit step {dt} exceeds h^2/4 = {}",
            h * h / 4.0
        )));
    }
    let x: Vec<f64> = (0..n).map(|i| extent.0 + h * i as f64).collect();
    let mut u = u0.to_vec();
    let mut next = vec![0.0; n];
    let mut flux = vec![0.0; n];
    for _ in 0..steps {
        if let FdProblem::FokkerPlanck = problem {
            for i in 0..n {
                flux[i] = x[i] * u[i] * (1.0 - u[i]);
            }
        }
        for i in 0..n {
            let l = (i + n - 1) % n;
            let r = (i + 1) % n;
            let diffusion = (u[l] - 2.0 * u[i] + u[r]) / (h * h);
            let reaction = match problem {
                FdProblem::Heat => 0.0,
                FdProblem::AllenCahn { epsilon2 } => -(u[i] * u[i] * u[i] - u[i]) / epsilon2,
                FdProblem::FokkerPlanck => (flux[r] - flux[l]) / (2.0 * h),
            };
            next[i] = u[i] + dt * (diffusion + reaction);
        }
        std::mem::swap(&mut u, &mut next);
    }
    Ok(u)
}

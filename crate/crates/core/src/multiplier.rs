//! Pointwise KKT correctors.
//!
//! The bound corrector solves, node by node,
//!
//! ```text
//! (u - (ũ + η)) / τ = λ g'(u),   λ ≥ 0,   g(u) ≥ 0,   λ g(u) = 0
//! ```
//!
//! with `g(u) = (b - u)(u - a)` and `τ = δt / α` (the "dt over alpha" factor
//! of the time scheme). Its solution is the projection of `ũ + η` onto
//! `[a, b]`, with `λ` recovered from the residual. The mass-conserving
//! variant adds a spatially constant multiplier `ξ` chosen so the discrete
//! mass hits a target; `ξ` is the root of a monotone piecewise-linear
//! function and is found by a secant iteration with a bisection fallback.

use crate::error::{Error, Result};
use crate::grid::Field;

/// Box constraint `a <= u <= b`, encoded as `g(u) = (b - u)(u - a) >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct BoundConstraint {
    a: f64,
    b: f64,
}

impl BoundConstraint {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && b > a) {
            return Err(Error::InvalidBounds { a, b });
        }
        Ok(Self { a, b })
    }

    pub fn lower(&self) -> f64 {
        self.a
    }

    pub fn upper(&self) -> f64 {
        self.b
    }

    pub fn g(&self, u: f64) -> f64 {
        (self.b - u) * (u - self.a)
    }

    pub fn g_prime(&self, u: f64) -> f64 {
        self.a + self.b - 2.0 * u
    }

    pub fn contains(&self, u: f64) -> bool {
        self.a <= u && u <= self.b
    }

    pub fn clamp(&self, u: f64) -> f64 {
        u.clamp(self.a, self.b)
    }

    /// Corrected value and multiplier for a single node with shifted
    /// predictor value `v = ũ + η`.
    #[inline]
    pub fn correct_node(&self, v: f64, dt_over_alpha: f64) -> (f64, f64) {
        if v <= self.a {
            (self.a, (self.a - v) / (dt_over_alpha * self.g_prime(self.a)))
        } else if v >= self.b {
            (self.b, (self.b - v) / (dt_over_alpha * self.g_prime(self.b)))
        } else {
            (v, 0.0)
        }
    }
}

#[derive(Debug, Clone)]
pub struct CorrectorOutput {
    pub u: Field,
    pub lambda: Field,
}

#[derive(Debug, Clone)]
pub struct MassCorrectorOutput {
    pub u: Field,
    pub lambda: Field,
    pub xi: f64,
    pub secant_iters: usize,
}

fn check_tau(dt_over_alpha: f64) -> Result<()> {
    if dt_over_alpha > 0.0 && dt_over_alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "dt_over_alpha must be positive, got {dt_over_alpha}"
        )))
    }
}

/// Three-case closed-form solution of the bound corrector.
pub fn corrector_pointwise(
    u_tilde: &Field,
    eta: &Field,
    bc: &BoundConstraint,
    dt_over_alpha: f64,
) -> Result<CorrectorOutput> {
    check_tau(dt_over_alpha)?;
    u_tilde.check_same_grid(eta)?;
    let n = u_tilde.len();
    let mut u = Vec::with_capacity(n);
    let mut lambda = Vec::with_capacity(n);
    for (ut, e) in u_tilde.values().iter().zip(eta.values()) {
        let (uz, lz) = bc.correct_node(ut + e, dt_over_alpha);
        u.push(uz);
        lambda.push(lz);
    }
    let grid = u_tilde.grid().clone();
    Ok(CorrectorOutput {
        u: Field::new(grid.clone(), u)?,
        lambda: Field::new(grid, lambda)?,
    })
}

/// Clamp `ũ` into `[a, b]`.
///
/// With a `dt_over_alpha` the multiplier is back-computed so that
/// `(u - ũ) / τ = λ g'(u)` holds; without one it is the magnitude of the
/// clamp, `|u - ũ|`.
pub fn cutoff_corrector(
    u_tilde: &Field,
    bc: &BoundConstraint,
    dt_over_alpha: Option<f64>,
) -> Result<CorrectorOutput> {
    if let Some(tau) = dt_over_alpha {
        check_tau(tau)?;
    }
    let u = u_tilde.map(|v| bc.clamp(v));
    let lambda = u.zip_map(u_tilde, |uz, ut| {
        if uz == ut {
            0.0
        } else {
            match dt_over_alpha {
                Some(tau) => (uz - ut) / (tau * bc.g_prime(uz)),
                None => (uz - ut).abs(),
            }
        }
    })?;
    Ok(CorrectorOutput { u, lambda })
}

/// Clamped-mass deficit `sum_z w_z clamp(ũ(z) + η, a, b) - target`.
///
/// Continuous, piecewise linear and nondecreasing in `η`.
pub fn mass_residual(u_tilde: &Field, eta: f64, bc: &BoundConstraint, target_mass: f64) -> f64 {
    u_tilde
        .grid()
        .weights()
        .iter()
        .zip(u_tilde.values())
        .map(|(w, v)| w * bc.clamp(v + eta))
        .sum::<f64>()
        - target_mass
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecantSolution {
    pub root: f64,
    /// Residual evaluations after the two starting points.
    pub iterations: usize,
    pub used_bisection: bool,
}

const BRACKET_LIMIT: f64 = 1e6;
const MAX_BISECTIONS: usize = 200;

/// Secant iteration for `residual(x) = 0` started from `x0`, `x1`.
///
/// On stagnation (flat secant, non-finite step) or when `max_iters` is
/// exhausted, a bracket is searched within `[-1e6, 1e6]` and bisection
/// takes over.
pub fn secant_solve(
    mut residual: impl FnMut(f64) -> f64,
    x0: f64,
    x1: f64,
    tol: f64,
    max_iters: usize,
) -> Result<SecantSolution> {
    if x0 == x1 {
        return Err(Error::RootFinding("secant starts must differ".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::RootFinding(format!("tolerance must be positive, got {tol}")));
    }

    let mut evaluated: Vec<(f64, f64)> = Vec::new();
    let (mut xa, mut fa) = (x0, residual(x0));
    evaluated.push((xa, fa));
    if fa.abs() <= tol {
        return Ok(SecantSolution { root: xa, iterations: 0, used_bisection: false });
    }
    let (mut xb, mut fb) = (x1, residual(x1));
    evaluated.push((xb, fb));
    if fb.abs() <= tol {
        return Ok(SecantSolution { root: xb, iterations: 0, used_bisection: false });
    }

    let mut iterations = 0;
    while iterations < max_iters {
        let denom = fb - fa;
        let floor = 4.0 * f64::EPSILON * fa.abs().max(fb.abs());
        if denom.abs() <= floor {
            break;
        }
        let xc = xb - fb * (xb - xa) / denom;
        if !xc.is_finite() {
            break;
        }
        let fc = residual(xc);
        iterations += 1;
        evaluated.push((xc, fc));
        if fc.abs() <= tol {
            return Ok(SecantSolution { root: xc, iterations, used_bisection: false });
        }
        (xa, fa, xb, fb) = (xb, fb, xc, fc);
    }

    bisection_fallback(&mut residual, &evaluated, tol, iterations)
}

fn bisection_fallback(
    residual: &mut impl FnMut(f64) -> f64,
    evaluated: &[(f64, f64)],
    tol: f64,
    mut iterations: usize,
) -> Result<SecantSolution> {
    let finite = |p: &&(f64, f64)| p.0.is_finite() && p.1.is_finite();
    let (xc, fc) = *evaluated
        .iter()
        .filter(finite)
        .min_by(|p, q| p.1.abs().total_cmp(&q.1.abs()))
        .ok_or_else(|| Error::RootFinding("no finite residual evaluations".into()))?;

    // Prefer a bracket among points already seen.
    let mut bracket = evaluated
        .iter()
        .filter(finite)
        .filter(|p| p.1.signum() != fc.signum())
        .min_by(|p, q| (p.0 - xc).abs().total_cmp(&(q.0 - xc).abs()))
        .map(|&(x, f)| ((xc, fc), (x, f)));

    if bracket.is_none() {
        let mut step = evaluated
            .windows(2)
            .map(|w| (w[1].0 - w[0].0).abs())
            .fold(0.0, f64::max)
            .max(1e-3 * xc.abs().max(1.0));
        while bracket.is_none() {
            let mut any_inside = false;
            for x in [xc - step, xc + step] {
                if x.abs() > BRACKET_LIMIT {
                    continue;
                }
                any_inside = true;
                let f = residual(x);
                iterations += 1;
                if f.abs() <= tol {
                    return Ok(SecantSolution { root: x, iterations, used_bisection: true });
                }
                if f.is_finite() && f.signum() != fc.signum() {
                    bracket = Some(((xc, fc), (x, f)));
                    break;
                }
            }
            if !any_inside {
                return Err(Error::RootFinding(format!(
                    "no sign change found within [-{BRACKET_LIMIT:e}, {BRACKET_LIMIT:e}]"
                )));
            }
            step *= 2.0;
        }
    }

    let ((mut lo, mut flo), (mut hi, _)) = bracket.expect("bracket established");
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        let fm = residual(mid);
        iterations += 1;
        if fm.abs() <= tol {
            return Ok(SecantSolution { root: mid, iterations, used_bisection: true });
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Err(Error::RootFinding(format!(
        "bisection reached floating-point resolution near {lo} without meeting tolerance {tol:e}"
    )))
}

/// Knobs for [`mass_corrector`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassCorrectorOptions {
    /// First secant start.
    pub xi0: f64,
    /// Second secant start; `None` uses `dt_over_alpha`.
    pub xi1: Option<f64>,
    /// Absolute mass tolerance; `None` uses `1e-12 * max(1, |target|)`.
    pub tol: Option<f64>,
    pub max_iters: usize,
}

impl Default for MassCorrectorOptions {
    fn default() -> Self {
        Self {
            xi0: 0.0,
            xi1: None,
            tol: None,
            max_iters: 50,
        }
    }
}

impl MassCorrectorOptions {
    /// Starts `0` and `dt`.
    pub fn for_step(dt: f64) -> Self {
        Self {
            xi1: Some(dt),
            ..Self::default()
        }
    }
}

/// Bound corrector with an additional scalar multiplier `ξ` that makes
/// `(u, 1)_h` equal `target_mass`.
///
/// The shift applied at node `z` is
/// `η(z) = τ (ξ - xi_lag - lag_terms(z))`.
pub fn mass_corrector(
    u_tilde: &Field,
    bc: &BoundConstraint,
    dt_over_alpha: f64,
    lag_terms: &Field,
    xi_lag: f64,
    target_mass: f64,
    options: &MassCorrectorOptions,
) -> Result<MassCorrectorOutput> {
    check_tau(dt_over_alpha)?;
    u_tilde.check_same_grid(lag_terms)?;
    let grid = u_tilde.grid().clone();
    let measure: f64 = grid.weights().iter().sum();
    let (lo, hi) = (bc.lower() * measure, bc.upper() * measure);
    let slack = 1e-14 * lo.abs().max(hi.abs()).max(1.0);
    if !(target_mass.is_finite() && target_mass >= lo - slack && target_mass <= hi + slack) {
        return Err(Error::InfeasibleMass { target: target_mass, lo, hi });
    }

    let tau = dt_over_alpha;
    // Everything except the ξ shift.
    let base = u_tilde.zip_map(lag_terms, |ut, lag| ut - tau * (xi_lag + lag))?;
    let tol = options
        .tol
        .unwrap_or_else(|| 1e-12 * target_mass.abs().max(1.0));
    let solution = secant_solve(
        |xi| mass_residual(&base, tau * xi, bc, target_mass),
        options.xi0,
        options.xi1.unwrap_or(tau),
        tol,
        options.max_iters,
    )?;
    let xi = solution.root;

    let n = grid.len();
    let mut u = Vec::with_capacity(n);
    let mut lambda = Vec::with_capacity(n);
    for &w in base.values() {
        let (uz, lz) = bc.correct_node(w + tau * xi, tau);
        u.push(uz);
        lambda.push(lz);
    }
    Ok(MassCorrectorOutput {
        u: Field::new(grid.clone(), u)?,
        lambda: Field::new(grid, lambda)?,
        xi,
        secant_iters: solution.iterations,
    })
}

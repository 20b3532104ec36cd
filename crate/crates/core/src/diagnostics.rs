//! Scalar monitors, error norms and observed convergence orders.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::Field;
use crate::integrator::SolverState;
use crate::problems::CahnHilliardSpec;
use crate::spectral::{discrete_inner_product, gradient};

/// `(f, 1)_h`.
pub fn mass(f: &Field) -> f64 {
    f.grid().weights().iter().zip(f.values()).map(|(w, v)| w * v).sum()
}

/// Discrete `L²` norm induced by `(·,·)_h`.
pub fn l2_norm(f: &Field) -> f64 {
    f.grid()
        .weights()
        .iter()
        .zip(f.values())
        .map(|(w, v)| w * v * v)
        .sum::<f64>()
        .sqrt()
}

pub fn linf_error(f: &Field, reference: &Field) -> Result<f64> {
    Ok(f.zip_map(reference, |a, b| a - b)?.norm_inf())
}

pub fn l2_error(f: &Field, reference: &Field) -> Result<f64> {
    Ok(l2_norm(&f.zip_map(reference, |a, b| a - b)?))
}

/// `log(e_{i−1}/e_i) / log(δt_{i−1}/δt_i)` for consecutive pairs.
pub fn convergence_order(errors: &[(f64, f64)]) -> Result<Vec<f64>> {
    for w in errors.windows(2) {
        if !(w[1].0 < w[0].0) {
            return Err(Error::InvalidParameter("time steps must be strictly decreasing".into()));
        }
    }
    if errors.iter().any(|&(dt, e)| !(dt > 0.0 && e > 0.0)) {
        return Err(Error::InvalidParameter("time steps and errors must be positive".into()));
    }
    Ok(errors
        .windows(2)
        .map(|w| (w[0].1 / w[1].1).ln() / (w[0].0 / w[1].0).ln())
        .collect())
}

/// `s ln s`, continuously extended by `0` at `s = 0`.
fn xlogx(s: f64) -> f64 {
    if s == 0.0 {
        0.0
    } else {
        s * s.ln()
    }
}

/// Free energy
/// `∫ (1+u)ln(1+u) + (1−u)ln(1−u) − θ₀u²/2 + ε²|∇u|²/2`.
pub fn ch_energy(u: &Field, spec: &CahnHilliardSpec) -> Result<f64> {
    if let Some((index, &value)) = u.values().iter().enumerate().find(|(_, v)| !(v.abs() <= 1.0)) {
        return Err(Error::LogDomain { index, value });
    }
    let grad = gradient(u)?;
    let e2 = spec.epsilon * spec.epsilon;
    let w = u.grid().weights();
    Ok((0..u.len())
        .map(|i| {
            let v = u.values()[i];
            let g2: f64 = grad.iter().map(|g| g.values()[i] * g.values()[i]).sum();
            w[i] * (xlogx(1.0 + v) + xlogx(1.0 - v) - 0.5 * spec.theta0 * v * v + 0.5 * e2 * g2)
        })
        .sum())
}

/// Value of the Fokker–Planck entropy and whether any log argument had to
/// be clamped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Entropy {
    pub value: f64,
    pub clamped: bool,
}

const LOG_FLOOR: f64 = 1e-300;

/// `∫ x²u/2 + u log u + (1−u) log(1−u)` with log arguments floored at
/// `1e-300`.
pub fn fp_entropy(u: &Field) -> Entropy {
    let grid = u.grid();
    let mut clamped = false;
    let value = u
        .values()
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let x = grid.node(i)[0];
            let (p, q) = (v, 1.0 - v);
            if p <= 0.0 || q <= 0.0 {
                clamped = true;
            }
            grid.weights()[i] * (0.5 * x * x * v + p * p.max(LOG_FLOOR).ln() + q * q.max(LOG_FLOOR).ln())
        })
        .sum();
    Entropy { value, clamped }
}

/// `4‖uᵐ‖² + ‖2uᵐ − uᵐ⁻¹‖² + (4/3)δt²‖λᵐg'(uᵐ) + ξᵐ‖²`, with `uᵐ⁻¹ = uᵐ`
/// when only one level is stored.
pub fn stability_functional(state: &SolverState) -> Result<f64> {
    let cur = state.current();
    let prev = state.level(1).map_or(&cur.u, |l| &l.u);
    let extrap = Field::linear_combination(&[(2.0, &cur.u), (-1.0, prev)])?;
    let xi = cur.xi;
    let forcing = cur.force.map(|f| f + xi);
    let dt = state.dt();
    Ok(4.0 * discrete_inner_product(&cur.u, &cur.u)?
        + discrete_inner_product(&extrap, &extrap)?
        + 4.0 / 3.0 * dt * dt * discrete_inner_product(&forcing, &forcing)?)
}

/// One row of `diagnostics.csv`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepDiagnostics {
    pub t: f64,
    pub mass: f64,
    pub min_u: f64,
    pub max_u: f64,
    pub energy: Option<f64>,
    pub max_lambda: f64,
    pub xi: f64,
    pub secant_iters: usize,
    pub stability_functional: Option<f64>,
}

impl StepDiagnostics {
    pub const HEADER: [&'static str; 9] = [
        "t",
        "mass",
        "min_u",
        "max_u",
        "energy",
        "max_lambda",
        "xi",
        "secant_iters",
        "stability_functional",
    ];

    pub fn collect(state: &SolverState, energy: Option<f64>) -> Self {
        let u = state.u();
        let info = state.last_step();
        Self {
            t: state.t(),
            mass: mass(u),
            min_u: u.min(),
            max_u: u.max(),
            energy,
            max_lambda: info.max_lambda,
            xi: info.xi,
            secant_iters: info.secant_iters,
            stability_functional: stability_functional(state).ok(),
        }
    }
}

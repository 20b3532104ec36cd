//! IMEX predictors (BDF-k and modified Crank–Nicolson) composed with the
//! KKT correctors into full time steps.
//!
//! A step first solves a standard semi-implicit scheme for `ũ`, carrying the
//! previous multipliers as explicit forcing, and then projects `ũ` onto the
//! bounds (and optionally onto the prescribed mass) with the correctors in
//! [`crate::multiplier`].

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Field, Grid};
use crate::multiplier::{
    corrector_pointwise, cutoff_corrector, mass_corrector, BoundConstraint, MassCorrectorOptions,
};
use crate::spectral::discrete_inner_product;

/// Coefficients of the order-`k` BDF scheme.
///
/// `a_weights` define `A_k(v) = sum_j a_j v^{n-j}`, `b_weights` the
/// extrapolation `B_k` and `blag_weights` the lower-order extrapolation
/// `B_{k-1}` used for the multiplier lags.
#[derive(Debug, Clone, PartialEq)]
pub struct BdfScheme {
    order: usize,
    alpha: f64,
    a_weights: Vec<f64>,
    b_weights: Vec<f64>,
    blag_weights: Vec<f64>,
}

impl BdfScheme {
    pub fn new(order: usize) -> Result<Self> {
        let (alpha, a, b, blag): (f64, &[f64], &[f64], &[f64]) = match order {
            1 => (1.0, &[1.0], &[1.0], &[]),
            2 => (1.5, &[2.0, -0.5], &[2.0, -1.0], &[1.0]),
            3 => (
                11.0 / 6.0,
                &[3.0, -1.5, 1.0 / 3.0],
                &[3.0, -3.0, 1.0],
                &[2.0, -1.0],
            ),
            _ => {
                return Err(Error::InvalidParameter(format!(
                    "BDF order must be 1, 2 or 3, got {order}"
                )))
            }
        };
        Ok(Self {
            order,
            alpha,
            a_weights: a.to_vec(),
            b_weights: b.to_vec(),
            blag_weights: blag.to_vec(),
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn a_weights(&self) -> &[f64] {
        &self.a_weights
    }

    pub fn b_weights(&self) -> &[f64] {
        &self.b_weights
    }

    pub fn blag_weights(&self) -> &[f64] {
        &self.blag_weights
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TimeScheme {
    Bdf1,
    Bdf2,
    Bdf3,
    /// Modified Crank–Nicolson: implicit part weighted `(3ũ^{n+1} + ũ^{n-1}) / 4`.
    Mcn,
}

impl TimeScheme {
    /// History depth the scheme needs.
    pub fn depth(&self) -> usize {
        match self {
            TimeScheme::Bdf1 => 1,
            TimeScheme::Bdf2 | TimeScheme::Mcn => 2,
            TimeScheme::Bdf3 => 3,
        }
    }

    pub fn bdf(&self) -> Option<BdfScheme> {
        match self {
            TimeScheme::Bdf1 => BdfScheme::new(1).ok(),
            TimeScheme::Bdf2 => BdfScheme::new(2).ok(),
            TimeScheme::Bdf3 => BdfScheme::new(3).ok(),
            TimeScheme::Mcn => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CorrectorKind {
    /// KKT corrector with the multiplier lag carried between steps.
    #[serde(rename = "lagrange")]
    LagrangeMultiplier,
    /// Lag-free corrector, equivalent to clamping.
    #[serde(rename = "cutoff")]
    CutOff,
    /// No correction: the plain semi-implicit scheme.
    #[serde(rename = "none")]
    None,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOptions {
    pub scheme: TimeScheme,
    pub corrector: CorrectorKind,
    pub conserve_mass: bool,
}

/// Spatial operators of `u_t + L u + N(u) = 0`.
///
/// `L` may depend on a frozen, explicitly extrapolated state (variable
/// mobility); problems with a constant `L` ignore `frozen`.
pub trait ProblemOps {
    fn grid(&self) -> &Grid;

    fn bounds(&self) -> BoundConstraint;

    /// Solves `(sigma I + L) v = rhs`.
    fn linear_solve(&self, rhs: &Field, sigma: f64, frozen: &Field) -> Result<Field>;

    /// Applies `L`.
    fn apply_linear(&self, v: &Field, frozen: &Field) -> Result<Field>;

    /// Evaluates `N(u)`.
    fn nonlinear_eval(&self, u: &Field) -> Result<Field>;
}

/// One committed time level.
#[derive(Debug, Clone)]
pub struct Level {
    pub u: Field,
    pub lambda: Field,
    /// `λ g'(u)`, the quantity the next steps extrapolate.
    pub force: Field,
    pub xi: f64,
    /// Predictor output that produced `u` (`u` itself at the initial level).
    pub u_tilde: Field,
}

/// Per-step corrector statistics.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StepInfo {
    pub xi: f64,
    pub secant_iters: usize,
    pub max_lambda: f64,
}

/// Time, step counter and the history of recent levels (newest first).
#[derive(Debug, Clone)]
pub struct SolverState {
    history: VecDeque<Level>,
    depth: usize,
    t: f64,
    n: usize,
    dt: f64,
    mass0: f64,
    last: StepInfo,
}

impl SolverState {
    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// `(u^0, 1)_h`, the target of the mass-conserving corrector.
    pub fn initial_mass(&self) -> f64 {
        self.mass0
    }

    pub fn u(&self) -> &Field {
        &self.history[0].u
    }

    pub fn current(&self) -> &Level {
        &self.history[0]
    }

    /// Level `n - back`, if still stored.
    pub fn level(&self, back: usize) -> Option<&Level> {
        self.history.get(back)
    }

    pub fn history_len(&self) -> usize {
        self.history.len()
    }

    pub fn last_step(&self) -> StepInfo {
        self.last
    }

    fn push(&mut self, level: Level) {
        self.history.push_front(level);
        self.history.truncate(self.depth);
    }
}

const INITIAL_BOUND_SLACK: f64 = 1e-12;

/// Seeds the state with `u0`, zero multipliers and `t = 0`.
///
/// Values outside the bounds by at most `1e-12` are clamped (with a
/// warning); larger violations are rejected. Schemes needing more history
/// than one level are started by [`full_step`] itself.
pub fn initialize(
    scheme: TimeScheme,
    u0: &Field,
    dt: f64,
    ops: &dyn ProblemOps,
) -> Result<SolverState> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidParameter(format!("time step must be positive, got {dt}")));
    }
    u0.check_finite()?;
    if u0.grid() != ops.grid() {
        return Err(Error::GridMismatch);
    }
    let bc = ops.bounds();
    let excess = u0
        .values()
        .iter()
        .map(|&v| (bc.lower() - v).max(v - bc.upper()).max(0.0))
        .fold(0.0, f64::max);
    if excess > INITIAL_BOUND_SLACK {
        return Err(Error::InitialOutOfBounds { excess });
    }
    let u = if excess > 0.0 {
        log::warn!("initial data exceeds the bounds by {excess:e}; clamping");
        u0.map(|v| bc.clamp(v))
    } else {
        u0.clone()
    };
    let mass0 = discrete_inner_product(&u, &Field::constant(u.grid(), 1.0))?;
    let zero = Field::zeros(u.grid());
    let mut state = SolverState {
        history: VecDeque::with_capacity(scheme.depth()),
        depth: scheme.depth(),
        t: 0.0,
        n: 0,
        dt,
        mass0,
        last: StepInfo::default(),
    };
    state.push(Level {
        u_tilde: u.clone(),
        u,
        lambda: zero.clone(),
        force: zero,
        xi: 0.0,
    });
    Ok(state)
}

fn combine(weights: &[f64], fields: impl Iterator<Item = Field>) -> Result<Option<Field>> {
    let fields: Vec<Field> = fields.take(weights.len()).collect();
    if fields.is_empty() {
        return Ok(None);
    }
    let terms: Vec<(f64, &Field)> = weights.iter().copied().zip(fields.iter()).collect();
    Field::linear_combination(&terms).map(Some)
}

fn combine_scalar(weights: &[f64], values: impl Iterator<Item = f64>) -> f64 {
    weights.iter().zip(values).map(|(w, v)| w * v).sum()
}

fn multiplier_forcing(opts: &StepOptions) -> bool {
    opts.corrector == CorrectorKind::LagrangeMultiplier
}

fn xi_forcing(opts: &StepOptions) -> bool {
    opts.conserve_mass && opts.corrector != CorrectorKind::None
}

/// BDF-k predictor: solves
/// `(α/δt + L) ũ = A_k(u)/δt − N(B_k(u)) + B_{k−1}(λ g'(u)) [+ B_{k−1}(ξ)]`.
///
/// Requires `k` stored levels.
pub fn bdf_predictor_step(
    state: &SolverState,
    scheme: &BdfScheme,
    opts: &StepOptions,
    ops: &dyn ProblemOps,
) -> Result<Field> {
    let k = scheme.order();
    if state.history.len() < k {
        return Err(Error::InvalidParameter(format!(
            "BDF{k} needs {k} history levels, have {}",
            state.history.len()
        )));
    }
    let dt = state.dt;
    let us = || state.history.iter().map(|l| l.u.clone());
    let a_u = combine(scheme.a_weights(), us())?.expect("k >= 1");
    let extrap = combine(scheme.b_weights(), us())?.expect("k >= 1");
    let mut rhs = a_u;
    rhs.scale(1.0 / dt);
    rhs.axpy(-1.0, &ops.nonlinear_eval(&extrap)?)?;
    if multiplier_forcing(opts) {
        let forces = state.history.iter().map(|l| l.force.clone());
        if let Some(lag) = combine(scheme.blag_weights(), forces)? {
            rhs.axpy(1.0, &lag)?;
        }
    }
    if xi_forcing(opts) {
        let xi = combine_scalar(scheme.blag_weights(), state.history.iter().map(|l| l.xi));
        rhs = rhs.map(|v| v + xi);
    }
    ops.linear_solve(&rhs, scheme.alpha() / dt, &extrap)
}

/// Modified Crank–Nicolson predictor: solves
/// `(ũ − u^n)/δt + L(3ũ/4 + ũ^{n−1}/4) + N(3u^n/2 − u^{n−1}/2) = λ^n g'(u^n) [+ ξ^n]`.
///
/// At the first step the extrapolant is `u^0` and `ũ^{-1} = u^0`.
pub fn mcn_predictor_step(
    state: &SolverState,
    opts: &StepOptions,
    ops: &dyn ProblemOps,
) -> Result<Field> {
    let dt = state.dt;
    let cur = &state.history[0];
    let (extrap, u_tilde_prev) = match state.history.get(1) {
        Some(prev) => (
            Field::linear_combination(&[(1.5, &cur.u), (-0.5, &prev.u)])?,
            &prev.u_tilde,
        ),
        None => (cur.u.clone(), &cur.u_tilde),
    };
    let mut rhs = cur.u.clone();
    rhs.scale(1.0 / dt);
    rhs.axpy(-0.25, &ops.apply_linear(u_tilde_prev, &extrap)?)?;
    rhs.axpy(-1.0, &ops.nonlinear_eval(&extrap)?)?;
    if multiplier_forcing(opts) {
        rhs.axpy(1.0, &cur.force)?;
    }
    if xi_forcing(opts) {
        let xi = cur.xi;
        rhs = rhs.map(|v| v + xi);
    }
    rhs.scale(4.0 / 3.0);
    ops.linear_solve(&rhs, 4.0 / (3.0 * dt), &extrap)
}

struct Correction {
    u: Field,
    lambda: Field,
    xi: f64,
    secant_iters: usize,
}

/// Corrector inputs besides `ũ`.
struct CorrectorSetup {
    /// `τ` of the KKT corrector.
    tau_multiplier: f64,
    /// `τ` used when the multiplier lag is off (cut-off).
    tau_cutoff: f64,
    /// Extrapolated `λ g'(u)` lag, `None` when it vanishes.
    lag: Option<Field>,
    xi_lag: f64,
}

fn correct(
    u_tilde: Field,
    setup: CorrectorSetup,
    opts: &StepOptions,
    state: &SolverState,
    bc: &BoundConstraint,
) -> Result<Correction> {
    let grid = u_tilde.grid().clone();
    match (opts.corrector, opts.conserve_mass) {
        (CorrectorKind::None, _) => Ok(Correction {
            lambda: Field::zeros(&grid),
            u: u_tilde,
            xi: 0.0,
            secant_iters: 0,
        }),
        (kind, true) => {
            let (tau, lag) = match kind {
                CorrectorKind::LagrangeMultiplier => (setup.tau_multiplier, setup.lag),
                _ => (setup.tau_cutoff, None),
            };
            let lag = lag.unwrap_or_else(|| Field::zeros(&grid));
            let out = mass_corrector(
                &u_tilde,
                bc,
                tau,
                &lag,
                setup.xi_lag,
                state.mass0,
                &MassCorrectorOptions::for_step(state.dt),
            )?;
            Ok(Correction {
                u: out.u,
                lambda: out.lambda,
                xi: out.xi,
                secant_iters: out.secant_iters,
            })
        }
        (CorrectorKind::LagrangeMultiplier, false) => {
            let tau = setup.tau_multiplier;
            let eta = match setup.lag {
                Some(lag) => lag.map(|v| -tau * v),
                None => Field::zeros(&grid),
            };
            let out = corrector_pointwise(&u_tilde, &eta, bc, tau)?;
            Ok(Correction {
                u: out.u,
                lambda: out.lambda,
                xi: 0.0,
                secant_iters: 0,
            })
        }
        (CorrectorKind::CutOff, false) => {
            let out = cutoff_corrector(&u_tilde, bc, Some(setup.tau_cutoff))?;
            Ok(Correction {
                u: out.u,
                lambda: out.lambda,
                xi: 0.0,
                secant_iters: 0,
            })
        }
    }
}

/// Largest `|ũ|` tolerated before a step is declared divergent.
pub fn blow_up_threshold(bc: &BoundConstraint) -> f64 {
    10.0 * bc.lower().abs().max(bc.upper().abs()).max(1.0)
}

fn check_blow_up(u_tilde: &Field, bc: &BoundConstraint, t: f64) -> Result<()> {
    if let Some(i) = u_tilde.values().iter().position(|v| !v.is_finite()) {
        return Err(Error::Diverged {
            t,
            reason: format!("non-finite predictor value at node {i}"),
        });
    }
    let limit = blow_up_threshold(bc);
    let peak = u_tilde.norm_inf();
    if peak > limit {
        return Err(Error::Diverged {
            t,
            reason: format!("predictor magnitude {peak:e} exceeds {limit:e}"),
        });
    }
    Ok(())
}

/// One implicit-explicit Euler predictor from `u` over `dt`.
fn euler_predict(u: &Field, dt: f64, ops: &dyn ProblemOps) -> Result<Field> {
    let mut rhs = u.clone();
    rhs.scale(1.0 / dt);
    rhs.axpy(-1.0, &ops.nonlinear_eval(u)?)?;
    ops.linear_solve(&rhs, 1.0 / dt, u)
}

/// Startup predictor for schemes whose history is still short.
///
/// BDF3 uses a Richardson-extrapolated Euler step (two half steps against
/// one full step) so the startup error does not limit its order; all other
/// schemes take a plain first-order step.
fn startup_predictor(
    state: &SolverState,
    opts: &StepOptions,
    ops: &dyn ProblemOps,
    bc: &BoundConstraint,
) -> Result<Field> {
    let dt = state.dt;
    let u = &state.history[0].u;
    let full = euler_predict(u, dt, ops)?;
    if opts.scheme != TimeScheme::Bdf3 {
        return Ok(full);
    }
    let half = euler_predict(u, 0.5 * dt, ops)?;
    check_blow_up(&half, bc, state.t)?;
    let mut half_state = state.clone();
    half_state.dt = 0.5 * dt;
    let mid = correct(
        half,
        CorrectorSetup {
            tau_multiplier: 0.5 * dt,
            tau_cutoff: 0.5 * dt,
            lag: None,
            xi_lag: 0.0,
        },
        opts,
        &half_state,
        bc,
    )?;
    let second = euler_predict(&mid.u, 0.5 * dt, ops)?;
    Field::linear_combination(&[(2.0, &second), (-1.0, &full)])
}

/// Predictor plus corrector; pushes the new level onto the history.
///
/// While fewer than `k` levels are stored the step is a first-order startup
/// step. A non-finite or exploding predictor aborts with
/// [`Error::Diverged`], leaving the state untouched.
pub fn full_step(state: &mut SolverState, opts: &StepOptions, ops: &dyn ProblemOps) -> Result<()> {
    let bc = ops.bounds();
    let dt = state.dt;
    let t_next = state.t + dt;
    let have = state.history.len();

    let (u_tilde, setup) = match opts.scheme {
        TimeScheme::Mcn => {
            let u_tilde = mcn_predictor_step(state, opts, ops)?;
            let cur = &state.history[0];
            let setup = CorrectorSetup {
                tau_multiplier: 0.5 * dt,
                tau_cutoff: dt,
                lag: multiplier_forcing(opts).then(|| cur.force.clone()),
                xi_lag: if xi_forcing(opts) { cur.xi } else { 0.0 },
            };
            (u_tilde, setup)
        }
        scheme => {
            let bdf = scheme.bdf().expect("BDF scheme");
            if have < bdf.order() {
                let u_tilde = startup_predictor(state, opts, ops, &bc)?;
                let setup = CorrectorSetup {
                    tau_multiplier: dt,
                    tau_cutoff: dt,
                    lag: None,
                    xi_lag: 0.0,
                };
                (u_tilde, setup)
            } else {
                let u_tilde = bdf_predictor_step(state, &bdf, opts, ops)?;
                let tau = dt / bdf.alpha();
                let lag = if multiplier_forcing(opts) {
                    combine(bdf.blag_weights(), state.history.iter().map(|l| l.force.clone()))?
                } else {
                    None
                };
                let xi_lag = if xi_forcing(opts) {
                    combine_scalar(bdf.blag_weights(), state.history.iter().map(|l| l.xi))
                } else {
                    0.0
                };
                let setup = CorrectorSetup {
                    tau_multiplier: tau,
                    tau_cutoff: tau,
                    lag,
                    xi_lag,
                };
                (u_tilde, setup)
            }
        }
    };

    check_blow_up(&u_tilde, &bc, t_next)?;
    let c = correct(u_tilde.clone(), setup, opts, state, &bc)?;
    let force = c.u.zip_map(&c.lambda, |u, l| l * bc.g_prime(u))?;
    state.last = StepInfo {
        xi: c.xi,
        secant_iters: c.secant_iters,
        max_lambda: c.lambda.max(),
    };
    state.push(Level {
        u: c.u,
        lambda: c.lambda,
        force,
        xi: c.xi,
        u_tilde,
    });
    state.n += 1;
    state.t = state.n as f64 * dt;
    Ok(())
}

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Field, Grid, GridKind};
use crate::integrator::{bdf_predictor_step, BdfScheme, ProblemOps, SolverState, StepOptions};
use crate::krylov::{gmres, GmresOptions};
use crate::multiplier::BoundConstraint;
use crate::spectral::{divergence, fft_forward, fft_inverse, gradient, spectral_derivative, wavenumber_sq};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CahnHilliardSpec {
    pub epsilon: f64,
    pub theta0: f64,
    /// Margin keeping `u` inside `[−1 + δ, 1 − δ]`.
    pub delta: f64,
}

impl Default for CahnHilliardSpec {
    fn default() -> Self {
        Self {
            epsilon: 0.1,
            theta0: 5.0,
            delta: 0.01,
        }
    }
}

impl CahnHilliardSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.theta0 > 0.0 && self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "Cahn-Hilliard needs epsilon, theta0 > 0 and 0 < delta < 1, got {self:?}"
            )));
        }
        Ok(())
    }

    /// Derivative of the bulk free energy,
    /// `ln(1 + u) − ln(1 − u) − θ₀ u`.
    pub fn potential_derivative(&self, u: f64) -> f64 {
        u.ln_1p() - (-u).ln_1p() - self.theta0 * u
    }
}

/// Cahn–Hilliard with mobility `M(u) = 1 − u²` and logarithmic potential:
///
/// ```text
/// u_t = ∇·(M(u) ∇μ),   μ = −ε²Δu + ln(1 + u) − ln(1 − u) − θ₀ u
/// ```
///
/// split as `L_ū v = ε² ∇·(M(ū) ∇Δv)` with the mobility frozen at an
/// extrapolated state `ū`, and `N(u) = −∇·(M(u) ∇f(u))`. The
/// variable-coefficient solve uses GMRES preconditioned by the
/// constant-mobility operator with `M̄ = max M(ū)`, which is diagonal in
/// Fourier space.
pub struct CahnHilliardOps {
    spec: CahnHilliardSpec,
    grid: Grid,
    bounds: BoundConstraint,
    /// `|k|²` per mode.
    k2: Vec<f64>,
    /// `|k|²` with the Nyquist entries of each axis removed.
    k2_odd: Vec<f64>,
    gmres: GmresOptions,
}

impl CahnHilliardOps {
    pub fn new(spec: CahnHilliardSpec, grid: Grid) -> Result<Self> {
        spec.validate()?;
        if !grid.is_periodic() {
            return Err(Error::Unsupported("Cahn-Hilliard needs a periodic grid"));
        }
        let k2 = wavenumber_sq(&grid);
        let k2_odd = match grid.kind() {
            GridKind::Fourier1D => grid.fourier[0].odd_wavenumbers.iter().map(|k| k * k).collect(),
            _ => {
                let (kx, ky) = (&grid.fourier[0].odd_wavenumbers, &grid.fourier[1].odd_wavenumbers);
                kx.iter()
                    .flat_map(|a| ky.iter().map(move |b| a * a + b * b))
                    .collect()
            }
        };
        let bounds = BoundConstraint::new(-1.0 + spec.delta, 1.0 - spec.delta)?;
        Ok(Self {
            spec,
            grid,
            bounds,
            k2,
            k2_odd,
            gmres: GmresOptions::default(),
        })
    }

    pub fn spec(&self) -> &CahnHilliardSpec {
        &self.spec
    }

    /// Overrides the Krylov tolerance, iteration cap and restart length.
    pub fn with_gmres_options(mut self, options: GmresOptions) -> Self {
        self.gmres = options;
        self
    }

    fn mobility(frozen: &Field) -> Vec<f64> {
        frozen.values().iter().map(|u| 1.0 - u * u).collect()
    }

    /// `σ v + ε² ∇·(m ∇Δv)`.
    fn apply_operator(&self, v: &[f64], sigma: f64, m: &[f64]) -> Vec<f64> {
        let grid = &self.grid;
        let lap: Vec<Complex64> = fft_forward(grid, v)
            .into_iter()
            .zip(&self.k2)
            .map(|(c, k2)| -c * k2)
            .collect();
        let mut acc = vec![Complex64::default(); v.len()];
        for axis in 0..grid.dim() {
            let grad = fft_inverse(grid, spectral_derivative(grid, &lap, axis));
            let flux: Vec<f64> = grad.iter().zip(m).map(|(g, m)| g * m).collect();
            let d = spectral_derivative(grid, &fft_forward(grid, &flux), axis);
            for (a, d) in acc.iter_mut().zip(d) {
                *a += d;
            }
        }
        let e2 = self.spec.epsilon * self.spec.epsilon;
        fft_inverse(grid, acc)
            .into_iter()
            .zip(v)
            .map(|(l, v)| sigma * v + e2 * l)
            .collect()
    }

    /// Inverse of `σ + ε² m̄ |k|²|k_odd|²`.
    fn constant_mobility_solve(&self, rhs: &[f64], sigma: f64, m_bar: f64) -> Vec<f64> {
        let e2 = self.spec.epsilon * self.spec.epsilon;
        let c: Vec<Complex64> = fft_forward(&self.grid, rhs)
            .into_iter()
            .zip(self.k2.iter().zip(&self.k2_odd))
            .map(|(c, (k2, ko))| c / (sigma + e2 * m_bar * k2 * ko))
            .collect();
        fft_inverse(&self.grid, c)
    }
}

impl ProblemOps for CahnHilliardOps {
    fn grid(&self) -> &Grid {
        &self.grid
    }

    fn bounds(&self) -> BoundConstraint {
        self.bounds
    }

    fn linear_solve(&self, rhs: &Field, sigma: f64, frozen: &Field) -> Result<Field> {
        if !(sigma > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "Cahn-Hilliard solve needs sigma > 0, got {sigma}"
            )));
        }
        rhs.check_finite()?;
        let m = Self::mobility(frozen);
        let m_bar = m.iter().copied().fold(0.0, f64::max);
        let out = gmres(
            |x| Ok(self.apply_operator(x, sigma, &m)),
            |x| Ok(self.constant_mobility_solve(x, sigma, m_bar)),
            rhs.values(),
            &self.gmres,
        )?;
        log::trace!(
            "GMRES converged in {} iterations (residual {:e})",
            out.iterations,
            out.relative_residual
        );
        Field::new(self.grid.clone(), out.x)
    }

    fn apply_linear(&self, v: &Field, frozen: &Field) -> Result<Field> {
        let m = Self::mobility(frozen);
        Field::new(self.grid.clone(), self.apply_operator(v.values(), 0.0, &m))
    }

    fn nonlinear_eval(&self, u: &Field) -> Result<Field> {
        if let Some((index, &value)) = u
            .values()
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.abs() < 1.0))
        {
            return Err(Error::LogDomain { index, value });
        }
        let f = u.map(|v| self.spec.potential_derivative(v));
        let flux: Vec<Field> = gradient(&f)?
            .into_iter()
            .map(|g| g.zip_map(u, |g, u| (1.0 - u * u) * g))
            .collect::<Result<_>>()?;
        Ok(divergence(&flux)?.map(|d| -d))
    }
}

/// BDF2 predictor for Cahn–Hilliard: mobility and chemical potential
/// extrapolated to `2uⁿ − uⁿ⁻¹`, `−ε²Δ` implicit.
pub fn cahn_hilliard_step_solve(
    state: &SolverState,
    ops: &CahnHilliardOps,
    opts: &StepOptions,
) -> Result<Field> {
    bdf_predictor_step(state, &BdfScheme::new(2)?, opts, ops)
}

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Field, Grid, GridKind};
use crate::integrator::ProblemOps;
use crate::multiplier::BoundConstraint;
use crate::spectral::{gradient, laplacian, solve_shifted_laplacian};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FokkerPlanckSpec {
    /// The domain is `(−half_width, half_width)`.
    pub half_width: f64,
}

impl Default for FokkerPlanckSpec {
    fn default() -> Self {
        Self { half_width: 2.0 * PI }
    }
}

/// `u_t = (x u (1 − u) + u_x)_x` with `L = −∂xx`,
/// `N(u) = −∂x(x u (1 − u))` and bounds `[0, 1]`.
///
/// The drift coefficient `x` is not periodic; it is sampled on the grid and
/// the product differentiated spectrally.
#[derive(Debug, Clone)]
pub struct FokkerPlanckOps {
    spec: FokkerPlanckSpec,
    grid: Grid,
}

impl FokkerPlanckOps {
    pub fn new(spec: FokkerPlanckSpec, grid: Grid) -> Result<Self> {
        if grid.kind() != GridKind::Fourier1D {
            return Err(Error::Unsupported("Fokker-Planck needs a 1D periodic grid"));
        }
        let (lo, hi) = grid.extent()[0];
        let w = spec.half_width;
        if !(w > 0.0) || (lo + w).abs() > 1e-12 * w || (hi - w).abs() > 1e-12 * w {
            return Err(Error::InvalidGrid(format!(
                "Fokker-Planck grid must span (-{w}, {w}), got ({lo}, {hi})"
            )));
        }
        Ok(Self { spec, grid })
    }

    pub fn spec(&self) -> &FokkerPlanckSpec {
        &self.spec
    }
}

impl ProblemOps for FokkerPlanckOps {
    fn grid(&self) -> &Grid {
        &self.grid
    }

    fn bounds(&self) -> BoundConstraint {
        BoundConstraint::new(0.0, 1.0).expect("valid bounds")
    }

    fn linear_solve(&self, rhs: &Field, sigma: f64, _frozen: &Field) -> Result<Field> {
        solve_shifted_laplacian(rhs, sigma, 1.0)
    }

    fn apply_linear(&self, v: &Field, _frozen: &Field) -> Result<Field> {
        Ok(laplacian(v)?.map(|x| -x))
    }

    fn nonlinear_eval(&self, u: &Field) -> Result<Field> {
        let grid = u.grid();
        let flux = Field::new(
            grid.clone(),
            u.values()
                .iter()
                .enumerate()
                .map(|(i, &v)| grid.node(i)[0] * v * (1.0 - v))
                .collect(),
        )?;
        Ok(gradient(&flux)?.remove(0).map(|d| -d))
    }
}

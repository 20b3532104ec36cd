use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Field, Grid};
use crate::integrator::ProblemOps;
use crate::multiplier::BoundConstraint;
use crate::spectral::{laplacian, solve_shifted_laplacian};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AllenCahnSpec {
    pub epsilon2: f64,
}

/// `u_t − Δu + (u³ − u)/ε² = 0` split as `L = −Δ + 1/ε²`,
/// `N(u) = (u³ − 2u)/ε²`, with bounds `[−1, 1]`.
#[derive(Debug, Clone)]
pub struct AllenCahnOps {
    spec: AllenCahnSpec,
    grid: Grid,
}

impl AllenCahnOps {
    pub fn new(spec: AllenCahnSpec, grid: Grid) -> Result<Self> {
        if !(spec.epsilon2 > 0.0 && spec.epsilon2.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "epsilon2 must be positive, got {}",
                spec.epsilon2
            )));
        }
        if !grid.is_periodic() {
            return Err(Error::Unsupported("Allen-Cahn needs a periodic grid"));
        }
        Ok(Self { spec, grid })
    }

    pub fn spec(&self) -> &AllenCahnSpec {
        &self.spec
    }
}

impl ProblemOps for AllenCahnOps {
    fn grid(&self) -> &Grid {
        &self.grid
    }

    fn bounds(&self) -> BoundConstraint {
        BoundConstraint::new(-1.0, 1.0).expect("valid bounds")
    }

    fn linear_solve(&self, rhs: &Field, sigma: f64, _frozen: &Field) -> Result<Field> {
        solve_shifted_laplacian(rhs, sigma + 1.0 / self.spec.epsilon2, 1.0)
    }

    fn apply_linear(&self, v: &Field, _frozen: &Field) -> Result<Field> {
        let inv = 1.0 / self.spec.epsilon2;
        laplacian(v)?.zip_map(v, |lap, v| inv * v - lap)
    }

    fn nonlinear_eval(&self, u: &Field) -> Result<Field> {
        let inv = 1.0 / self.spec.epsilon2;
        Ok(u.map(|v| inv * (v * v * v - 2.0 * v)))
    }
}

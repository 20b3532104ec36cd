use crate::error::Result;
use crate::grid::{Field, Grid};
use crate::integrator::ProblemOps;
use crate::multiplier::BoundConstraint;
use crate::spectral::{laplacian, solve_shifted_laplacian};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeatSpec {
    pub bounds: BoundConstraint,
}

impl Default for HeatSpec {
    fn default() -> Self {
        Self {
            bounds: BoundConstraint::new(-1.0, 1.0).expect("valid bounds"),
        }
    }
}

/// `u_t = Δu`: `L = −Δ`, `N = 0`. Periodic on Fourier grids, homogeneous
/// Dirichlet on LGL grids.
#[derive(Debug, Clone)]
pub struct HeatOps {
    spec: HeatSpec,
    grid: Grid,
}

impl HeatOps {
    pub fn new(spec: HeatSpec, grid: Grid) -> Self {
        Self { spec, grid }
    }
}

impl ProblemOps for HeatOps {
    fn grid(&self) -> &Grid {
        &self.grid
    }

    fn bounds(&self) -> BoundConstraint {
        self.spec.bounds
    }

    fn linear_solve(&self, rhs: &Field, sigma: f64, _frozen: &Field) -> Result<Field> {
        solve_shifted_laplacian(rhs, sigma, 1.0)
    }

    fn apply_linear(&self, v: &Field, _frozen: &Field) -> Result<Field> {
        Ok(laplacian(v)?.map(|x| -x))
    }

    fn nonlinear_eval(&self, u: &Field) -> Result<Field> {
        Ok(Field::zeros(u.grid()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use crate::integrator::{full_step, initialize, CorrectorKind, StepOptions, TimeScheme};

    #[test]
    fn lgl_dirichlet_decay() {
        // sin(pi x) on (-1, 1) decays like exp(-pi^2 t)
        let g = GridSpec::lgl_1d(24, (-1.0, 1.0)).unwrap();
        let ops = HeatOps::new(HeatSpec::default(), g.clone());
        let pi = std::f64::consts::PI;
        let u0 = Field::from_fn(&g, |x| (pi * x[0]).sin());
        let dt = 1e-4;
        let opts = StepOptions {
            scheme: TimeScheme::Bdf2,
            corrector: CorrectorKind::LagrangeMultiplier,
            conserve_mass: false,
        };
        let mut state = initialize(opts.scheme, &u0, dt, &ops).unwrap();
        for _ in 0..1000 {
            full_step(&mut state, &opts, &ops).unwrap();
        }
        let decay = (-pi * pi * state.t()).exp();
        for (i, v) in state.u().values().iter().enumerate() {
            assert!((v - decay * (pi * g.node(i)[0]).sin()).abs() < 1e-5);
        }
    }
}

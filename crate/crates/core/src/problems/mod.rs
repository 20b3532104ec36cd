//! Concrete operators for the model problems.

mod allen_cahn;
mod cahn_hilliard;
mod fokker_planck;
mod heat;

pub use allen_cahn::{AllenCahnOps, AllenCahnSpec};
pub use cahn_hilliard::{cahn_hilliard_step_solve, CahnHilliardOps, CahnHilliardSpec};
pub use fokker_planck::{FokkerPlanckOps, FokkerPlanckSpec};
pub use heat::{HeatOps, HeatSpec};

use crate::error::Result;
use crate::integrator::{full_step, CorrectorKind, ProblemOps, SolverState, StepOptions, TimeScheme};

/// Advances `state` by the plain semi-implicit scheme (no corrector).
pub fn semi_implicit_baseline(
    state: &mut SolverState,
    scheme: TimeScheme,
    ops: &dyn ProblemOps,
) -> Result<()> {
    let opts = StepOptions {
        scheme,
        corrector: CorrectorKind::None,
        conserve_mass: false,
    };
    full_step(state, &opts, ops)
}

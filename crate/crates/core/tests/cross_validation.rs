//! Spectral solvers against the finite-difference oracle on small 1D grids.

use std::f64::consts::PI;

use bpimex::grid::{Field, GridSpec};
use bpimex::integrator::{full_step, initialize, CorrectorKind, ProblemOps, StepOptions, TimeScheme};
use bpimex::oracle::{dense_fd_reference, FdProblem};
use bpimex::problems::{AllenCahnOps, AllenCahnSpec, FokkerPlanckOps, FokkerPlanckSpec, HeatOps, HeatSpec};

const N: usize = 64;

fn spectral_run(ops: &dyn ProblemOps, u0: &Field, dt: f64, steps: usize, corrector: CorrectorKind) -> Field {
    let opts = StepOptions {
        scheme: TimeScheme::Bdf2,
        corrector,
        conserve_mass: false,
    };
    let mut state = initialize(opts.scheme, u0, dt, ops).unwrap();
    for _ in 0..steps {
        full_step(&mut state, &opts, ops).unwrap();
    }
    state.u().clone()
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[test]
fn fokker_planck_matches_finite_differences() {
    let w = 2.0 * PI;
    let grid = GridSpec::fourier_1d(N, (-w, w)).unwrap();
    let ops = FokkerPlanckOps::new(FokkerPlanckSpec { half_width: w }, grid.clone()).unwrap();
    let u0 = Field::from_fn(&grid, |p| (-(p[0] - 1.0).powi(2) / 0.4).exp());
    let spectral = spectral_run(&ops, &u0, 1e-4, 500, CorrectorKind::LagrangeMultiplier);
    let fd = dense_fd_reference(FdProblem::FokkerPlanck, (-w, w), u0.values(), 1e-4, 500).unwrap();
    let err = max_diff(spectral.values(), &fd);
    assert!(err <= 5e-3, "Fokker-Planck spectral vs FD at t = 0.05: {err:e}");
}

#[test]
fn heat_matches_finite_differences_and_exact_decay() {
    let grid = GridSpec::fourier_1d(N, (0.0, 2.0 * PI)).unwrap();
    let ops = HeatOps::new(HeatSpec::default(), grid.clone());
    let u0 = Field::from_fn(&grid, |p| p[0].sin());
    let spectral = spectral_run(&ops, &u0, 1e-3, 100, CorrectorKind::None);
    let fd = dense_fd_reference(FdProblem::Heat, (0.0, 2.0 * PI), u0.values(), 1e-3, 100).unwrap();
    let exact: Vec<f64> = u0.values().iter().map(|v| v * (-0.1f64).exp()).collect();
    assert!(max_diff(spectral.values(), &exact) < 1e-6);
    assert!(max_diff(&fd, &exact) < 1e-3);
}

#[test]
fn allen_cahn_matches_finite_differences() {
    let grid = GridSpec::fourier_1d(N, (0.0, 2.0 * PI)).unwrap();
    let epsilon2 = 0.1;
    let ops = AllenCahnOps::new(AllenCahnSpec { epsilon2 }, grid.clone()).unwrap();
    let u0 = Field::from_fn(&grid, |p| 0.8 * p[0].sin());
    let spectral = spectral_run(&ops, &u0, 1e-4, 1000, CorrectorKind::LagrangeMultiplier);
    let fd = dense_fd_reference(FdProblem::AllenCahn { epsilon2 }, (0.0, 2.0 * PI), u0.values(), 1e-4, 1000)
        .unwrap();
    let err = max_diff(spectral.values(), &fd);
    assert!(err <= 5e-3, "Allen-Cahn spectral vs FD at t = 0.1: {err:e}");
}

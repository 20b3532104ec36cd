//! Experiment driver: single runs, time-step sweeps and run comparisons.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::{step_count, Problem, RunConfig};
use crate::diagnostics::{ch_energy, convergence_order, fp_entropy, l2_error, linf_error, StepDiagnostics};
use crate::error::{Error, Result};
use crate::grid::Field;
use crate::integrator::{full_step, initialize, CorrectorKind, SolverState, TimeScheme};
use crate::snapshot::{snapshot_file_name, write_snapshot};

pub const DIAGNOSTICS_FILE: &str = "diagnostics.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const ERRORS_FILE: &str = "errors.csv";
pub const COMPARE_FILE: &str = "compare.json";

/// Reference time step of the `self_fine` sweep mode.
pub const SELF_FINE_DT: f64 = 1e-6;
/// Reference time step of the `pde_fine` sweep mode.
pub const PDE_FINE_DT: f64 = 1e-7;

/// `summary.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub steps: usize,
    /// Time of the last committed level.
    pub t: f64,
    pub initial_mass: f64,
    pub final_mass: f64,
    /// Smallest `min_u` over all emitted rows.
    pub min_u: f64,
    /// Largest `max_u` over all emitted rows.
    pub max_u: f64,
    /// Time of the step that failed, if the run blew up.
    pub divergence_time: Option<f64>,
    pub divergence_reason: Option<String>,
}

impl RunSummary {
    pub fn diverged(&self) -> bool {
        self.divergence_time.is_some()
    }
}

/// Final field and summary of a run.
#[derive(Debug, Clone)]
pub struct Simulation {
    pub field: Field,
    pub summary: RunSummary,
}

fn is_blow_up(e: &Error) -> bool {
    matches!(e, Error::Diverged { .. } | Error::LogDomain { .. } | Error::NonFinite { .. })
}

fn energy(problem: &Problem, u: &Field) -> Option<f64> {
    match problem {
        Problem::CahnHilliard(ops) => ch_energy(u, ops.spec()).ok(),
        Problem::FokkerPlanck(_) => Some(fp_entropy(u).value),
        Problem::AllenCahn(_) | Problem::Heat(_) => None,
    }
}

/// Runs `cfg` with time step `dt`, calling `observe` on the initial state and
/// after every committed step.
///
/// A blow-up stops the run early and is recorded in the summary rather than
/// returned as an error.
pub fn simulate(
    cfg: &RunConfig,
    dt: f64,
    mut observe: impl FnMut(&SolverState, &StepDiagnostics) -> Result<()>,
) -> Result<Simulation> {
    let steps = step_count(dt, cfg.t_final)?;
    let problem = cfg.build_problem()?;
    let ops = problem.ops();
    let u0 = cfg
        .initial_condition
        .sample(ops.grid(), &cfg.init_context())
        .map_err(|e| Error::Config(e.to_string()))?;
    let mut state = initialize(cfg.scheme, &u0, dt, ops).map_err(|e| Error::Config(e.to_string()))?;
    let opts = cfg.step_options();

    let row = StepDiagnostics::collect(&state, energy(&problem, state.u()));
    observe(&state, &row)?;
    let (mut lo, mut hi) = (row.min_u, row.max_u);
    let mut divergence = None;
    for _ in 0..steps {
        if let Err(e) = full_step(&mut state, &opts, ops) {
            if !is_blow_up(&e) {
                return Err(e);
            }
            log::warn!("run stopped at t = {}: {e}", state.t() + dt);
            divergence = Some((state.t() + dt, e.to_string()));
            break;
        }
        let row = StepDiagnostics::collect(&state, energy(&problem, state.u()));
        lo = lo.min(row.min_u);
        hi = hi.max(row.max_u);
        observe(&state, &row)?;
    }
    let (divergence_time, divergence_reason) = divergence.unzip();
    Ok(Simulation {
        summary: RunSummary {
            steps: state.n(),
            t: state.t(),
            initial_mass: state.initial_mass(),
            final_mass: crate::diagnostics::mass(state.u()),
            min_u: lo,
            max_u: hi,
            divergence_time,
            divergence_reason,
        },
        field: state.u().clone(),
    })
}

/// Executes a run and writes `diagnostics.csv`, `summary.json` and the
/// snapshots into `out`.
pub fn run(cfg: &RunConfig, out: &Path) -> Result<RunSummary> {
    fs::create_dir_all(out)?;
    let mut csv = csv::Writer::from_path(out.join(DIAGNOSTICS_FILE)).map_err(csv_error)?;
    let every = cfg.snapshot_every;
    let sim = simulate(cfg, cfg.dt, |state, row| {
        csv.serialize(row).map_err(csv_error)?;
        if every > 0 && state.n() % every == 0 {
            write_snapshot(&out.join(snapshot_file_name(state.n())), state.u(), state.t())?;
        }
        Ok(())
    })?;
    csv.flush()?;
    let summary = sim.summary;
    fs::write(out.join(SUMMARY_FILE), serde_json::to_string_pretty(&summary)? + "\n")?;
    Ok(summary)
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Io(std::io::Error::other(format!("{other:?}"))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceMode {
    /// Same scheme and corrector at a tiny time step: error against the
    /// fully discrete problem.
    SelfFine,
    /// Uncorrected MCN at a tinier time step: error against the PDE.
    PdeFine,
}

impl ReferenceMode {
    /// Configuration of the reference run.
    pub fn reference_config(&self, cfg: &RunConfig) -> RunConfig {
        let mut r = cfg.clone();
        match self {
            ReferenceMode::SelfFine => r.dt = cfg.reference_dt.unwrap_or(SELF_FINE_DT),
            ReferenceMode::PdeFine => {
                r.scheme = TimeScheme::Mcn;
                r.corrector = CorrectorKind::None;
                r.conserve_mass = false;
                r.dt = cfg.reference_dt.unwrap_or(PDE_FINE_DT);
            }
        }
        r.snapshot_every = 0;
        r
    }
}

impl std::str::FromStr for ReferenceMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "self_fine" => Ok(ReferenceMode::SelfFine),
            "pde_fine" => Ok(ReferenceMode::PdeFine),
            _ => Err(Error::Config(format!(
                "unknown reference mode `{s}` (expected self_fine or pde_fine)"
            ))),
        }
    }
}

/// One row of `errors.csv`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub dt: f64,
    pub linf_error: f64,
    pub l2_error: f64,
    /// Observed order of the `L∞` error against the previous row.
    pub order: Option<f64>,
}

/// Error of `cfg` at each time step in `dts` against a reference run.
pub fn sweep_errors(cfg: &RunConfig, dts: &[f64], mode: ReferenceMode) -> Result<Vec<SweepRow>> {
    sweep_errors_with(cfg, dts, mode, |_, _| Ok(()))
}

/// [`sweep_errors`] that also hands every diagnostics row of the reference
/// run and of the sweep runs, keyed by time step, to `observe`.
pub fn sweep_errors_with(
    cfg: &RunConfig,
    dts: &[f64],
    mode: ReferenceMode,
    mut observe: impl FnMut(f64, &StepDiagnostics) -> Result<()>,
) -> Result<Vec<SweepRow>> {
    check_dt_list(cfg, dts)?;
    let reference = reference_solution(&mode.reference_config(cfg), &mut observe)?;
    sweep_against(cfg, dts, &reference, observe)
}

fn check_dt_list(cfg: &RunConfig, dts: &[f64]) -> Result<()> {
    if dts.is_empty() {
        return Err(Error::Config("empty time-step list".into()));
    }
    if dts.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::Config("time steps must be strictly decreasing".into()));
    }
    for &dt in dts {
        step_count(dt, cfg.t_final)?;
    }
    Ok(())
}

/// Final field of `ref_cfg` run at its own `dt`. A blow-up is an error.
pub fn reference_solution(
    ref_cfg: &RunConfig,
    mut observe: impl FnMut(f64, &StepDiagnostics) -> Result<()>,
) -> Result<Field> {
    log::info!("reference run: {:?} {:?} dt = {}", ref_cfg.scheme, ref_cfg.corrector, ref_cfg.dt);
    let reference = simulate(ref_cfg, ref_cfg.dt, |_, row| observe(ref_cfg.dt, row))?;
    if let Some(t) = reference.summary.divergence_time {
        return Err(Error::Diverged {
            t,
            reason: format!(
                "reference run failed: {}",
                reference.summary.divergence_reason.unwrap_or_default()
            ),
        });
    }
    Ok(reference.field)
}

/// Errors of `cfg` at each time step in `dts` against a given reference field.
pub fn sweep_against(
    cfg: &RunConfig,
    dts: &[f64],
    reference: &Field,
    mut observe: impl FnMut(f64, &StepDiagnostics) -> Result<()>,
) -> Result<Vec<SweepRow>> {
    check_dt_list(cfg, dts)?;
    let mut rows: Vec<SweepRow> = Vec::with_capacity(dts.len());
    for &dt in dts {
        log::info!("sweep run dt = {dt}");
        let sim = simulate(cfg, dt, |_, row| observe(dt, row))?;
        if let Some(t) = sim.summary.divergence_time {
            return Err(Error::Diverged {
                t,
                reason: format!("sweep run with dt = {dt} failed"),
            });
        }
        let linf = linf_error(&sim.field, reference)?;
        let order = match rows.last() {
            Some(prev) if prev.linf_error > 0.0 && linf > 0.0 => {
                convergence_order(&[(prev.dt, prev.linf_error), (dt, linf)])?.first().copied()
            }
            _ => None,
        };
        rows.push(SweepRow {
            dt,
            linf_error: linf,
            l2_error: l2_error(&sim.field, reference)?,
            order,
        });
    }
    Ok(rows)
}

/// Runs [`sweep_errors`] and writes `errors.csv` into `out`.
pub fn sweep(cfg: &RunConfig, dts: &[f64], mode: ReferenceMode, out: &Path) -> Result<Vec<SweepRow>> {
    let rows = sweep_errors(cfg, dts, mode)?;
    fs::create_dir_all(out)?;
    let mut csv = csv::Writer::from_path(out.join(ERRORS_FILE)).map_err(csv_error)?;
    for row in &rows {
        csv.serialize(row).map_err(csv_error)?;
    }
    csv.flush()?;
    Ok(rows)
}

/// Difference between the final fields of two runs on the same grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub linf_difference: f64,
    pub l2_difference: f64,
    pub a: RunSummary,
    pub b: RunSummary,
}

pub fn compare(a: &RunConfig, b: &RunConfig) -> Result<Comparison> {
    let sa = simulate(a, a.dt, |_, _| Ok(()))?;
    let sb = simulate(b, b.dt, |_, _| Ok(()))?;
    if sa.field.grid() != sb.field.grid() {
        return Err(Error::Config("the two configurations use different grids".into()));
    }
    Ok(Comparison {
        linf_difference: linf_error(&sa.field, &sb.field)?,
        l2_difference: l2_error(&sa.field, &sb.field)?,
        a: sa.summary,
        b: sb.summary,
    })
}

/// Runs [`compare`] and writes `compare.json` into `out`.
pub fn compare_to_dir(a: &RunConfig, b: &RunConfig, out: &Path) -> Result<Comparison> {
    let c = compare(a, b)?;
    fs::create_dir_all(out)?;
    fs::write(out.join(COMPARE_FILE), serde_json::to_string_pretty(&c)? + "\n")?;
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn heat_cfg(corrector: &str) -> RunConfig {
        RunConfig::from_json(&format!(
            r#"{{"problem": "heat", "scheme": "bdf2", "corrector": "{corrector}",
                "grid": {{"points": [16]}}, "dt": 0.01, "t_final": 0.1,
                "initial_condition": {{"kind": "sine"}}}}"#
        ))
        .unwrap()
    }

    #[test]
    fn simulate_heat_decay() {
        let cfg = heat_cfg("lagrange");
        let mut rows = 0;
        let sim = simulate(&cfg, cfg.dt, |_, _| {
            rows += 1;
            Ok(())
        })
        .unwrap();
        assert_eq!(rows, 11);
        assert_eq!(sim.summary.steps, 10);
        assert!(!sim.summary.diverged());
        // sin(x) decays like e^{-t}
        let decay = sim.field.norm_inf();
        assert!((decay - (-0.1f64).exp()).abs() < 2e-3, "{decay}");
    }

    #[test]
    fn reference_modes() {
        let cfg = heat_cfg("lagrange");
        let r = ReferenceMode::SelfFine.reference_config(&cfg);
        assert_eq!((r.scheme, r.corrector, r.dt), (TimeScheme::Bdf2, CorrectorKind::LagrangeMultiplier, 1e-6));
        let r = ReferenceMode::PdeFine.reference_config(&cfg);
        assert_eq!((r.scheme, r.corrector, r.dt), (TimeScheme::Mcn, CorrectorKind::None, 1e-7));
        assert!("fine".parse::<ReferenceMode>().is_err());
        assert_eq!("pde_fine".parse::<ReferenceMode>().unwrap(), ReferenceMode::PdeFine);
    }

    #[test]
    fn sweep_rejects_bad_lists() {
        let cfg = heat_cfg("none");
        assert!(sweep_errors(&cfg, &[0.01, 0.02], ReferenceMode::SelfFine).is_err());
        assert!(sweep_errors(&cfg, &[], ReferenceMode::SelfFine).is_err());
        assert!(sweep_errors(&cfg, &[0.03], ReferenceMode::SelfFine).is_err());
    }
}

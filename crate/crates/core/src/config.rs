//! JSON run configuration.
//!
//! ```json
//! {
//!   "problem": "allen_cahn",
//!   "scheme": "mcn",
//!   "corrector": "lagrange",
//!   "grid": { "points": [128, 128] },
//!   "dt": 1e-5,
//!   "t_final": 0.01,
//!   "params": { "epsilon2": 0.001 },
//!   "initial_condition": { "kind": "ac_disc" },
//!   "output": "out/ac"
//! }
//! ```

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Grid, GridSpec};
use crate::init::{InitContext, InitialCondition};
use crate::integrator::{CorrectorKind, ProblemOps, StepOptions, TimeScheme};
use crate::multiplier::BoundConstraint;
use crate::problems::{
    AllenCahnOps, AllenCahnSpec, CahnHilliardOps, CahnHilliardSpec, FokkerPlanckOps, FokkerPlanckSpec,
    HeatOps, HeatSpec,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    AllenCahn,
    CahnHilliard,
    FokkerPlanck,
    Heat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridKindConfig {
    #[default]
    Fourier,
    /// Legendre–Gauss–Lobatto collocation with homogeneous Dirichlet data.
    Lgl,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default)]
    pub kind: GridKindConfig,
    /// Nodes per axis.
    pub points: Vec<usize>,
    /// `[lo, hi]` per axis. Defaults to `[0, 2π]` (Fourier), `[−1, 1]`
    /// (LGL) and `[−half_width, half_width]` for Fokker–Planck.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extent: Option<Vec<[f64; 2]>>,
}

/// Problem parameters. Only the keys relevant to the chosen problem may be
/// set.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    /// Allen–Cahn `ε²` (default `0.001`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon2: Option<f64>,
    /// Cahn–Hilliard `ε` (default `0.1`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    /// Cahn–Hilliard `θ₀` (default `5`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta0: Option<f64>,
    /// Cahn–Hilliard bound margin `δ` (default `0.01`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    /// Fokker–Planck domain half width (default `2π`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub half_width: Option<f64>,
    /// Heat equation bounds `[a, b]` (default `[−1, 1]`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<[f64; 2]>,
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub problem: ProblemKind,
    pub scheme: TimeScheme,
    pub corrector: CorrectorKind,
    #[serde(default)]
    pub conserve_mass: bool,
    pub grid: GridConfig,
    pub dt: f64,
    pub t_final: f64,
    #[serde(default)]
    pub params: Params,
    pub initial_condition: InitialCondition,
    #[serde(default = "default_output")]
    pub output: PathBuf,
    /// Write a snapshot every this many steps; `0` disables snapshots.
    #[serde(default)]
    pub snapshot_every: usize,
    #[serde(default)]
    pub seed: u64,
    /// Overrides the reference time step used by `sweep`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_dt: Option<f64>,
}

/// Relative slack allowed when checking that `t_final / dt` is an integer.
const STEP_COUNT_SLACK: f64 = 1e-9;

/// Number of steps of size `dt` that reach `t_final`.
pub fn step_count(dt: f64, t_final: f64) -> Result<usize> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Config(format!("dt must be positive, got {dt}")));
    }
    if !(t_final > 0.0 && t_final.is_finite()) {
        return Err(Error::Config(format!("t_final must be positive, got {t_final}")));
    }
    let steps = (t_final / dt).round();
    if steps < 1.0 || (steps * dt - t_final).abs() > STEP_COUNT_SLACK * t_final {
        return Err(Error::Config(format!(
            "t_final = {t_final} is not an integer multiple of dt = {dt}"
        )));
    }
    Ok(steps as usize)
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn step_options(&self) -> StepOptions {
        StepOptions {
            scheme: self.scheme,
            corrector: self.corrector,
            conserve_mass: self.conserve_mass,
        }
    }

    pub fn steps(&self) -> Result<usize> {
        step_count(self.dt, self.t_final)
    }

    /// Checks everything that can be checked without allocating the grid.
    pub fn validate(&self) -> Result<()> {
        self.steps()?;
        if let Some(r) = self.reference_dt {
            if !(r > 0.0 && r.is_finite()) {
                return Err(Error::Config(format!("reference_dt must be positive, got {r}")));
            }
        }
        let p = &self.params;
        let used: &[(&str, bool)] = &[
            ("epsilon2", p.epsilon2.is_some()),
            ("epsilon", p.epsilon.is_some()),
            ("theta0", p.theta0.is_some()),
            ("delta", p.delta.is_some()),
            ("half_width", p.half_width.is_some()),
            ("bounds", p.bounds.is_some()),
        ];
        let allowed: &[&str] = match self.problem {
            ProblemKind::AllenCahn => &["epsilon2"],
            ProblemKind::CahnHilliard => &["epsilon", "theta0", "delta"],
            ProblemKind::FokkerPlanck => &["half_width"],
            ProblemKind::Heat => &["bounds"],
        };
        if let Some((name, _)) = used.iter().find(|(name, set)| *set && !allowed.contains(name)) {
            return Err(Error::Config(format!(
                "parameter `{name}` does not apply to {:?}",
                self.problem
            )));
        }
        let dim = self.grid.points.len();
        let dims_ok = match (self.problem, self.grid.kind) {
            (ProblemKind::AllenCahn | ProblemKind::CahnHilliard, GridKindConfig::Fourier) => dim == 2,
            (ProblemKind::FokkerPlanck, GridKindConfig::Fourier) => dim == 1,
            (ProblemKind::Heat, GridKindConfig::Fourier) => dim == 1 || dim == 2,
            (ProblemKind::Heat, GridKindConfig::Lgl) => dim == 1,
            _ => false,
        };
        if !dims_ok {
            return Err(Error::Config(format!(
                "{:?} does not support a {dim}D {:?} grid",
                self.problem, self.grid.kind
            )));
        }
        if let Some(extent) = &self.grid.extent {
            if extent.len() != dim {
                return Err(Error::Config(format!(
                    "grid has {dim} axes but {} extents",
                    extent.len()
                )));
            }
        }
        Ok(())
    }

    fn half_width(&self) -> f64 {
        self.params.half_width.unwrap_or(FokkerPlanckSpec::default().half_width)
    }

    pub fn build_grid(&self) -> Result<Grid> {
        let default_extent = match (self.problem, self.grid.kind) {
            (ProblemKind::FokkerPlanck, _) => [-self.half_width(), self.half_width()],
            (_, GridKindConfig::Lgl) => [-1.0, 1.0],
            _ => [0.0, 2.0 * PI],
        };
        let dim = self.grid.points.len();
        let extent = self
            .grid
            .extent
            .clone()
            .unwrap_or_else(|| vec![default_extent; dim]);
        let e = |i: usize| (extent[i][0], extent[i][1]);
        let pts = &self.grid.points;
        let grid = match (self.grid.kind, dim) {
            (GridKindConfig::Fourier, 1) => GridSpec::fourier_1d(pts[0], e(0)),
            (GridKindConfig::Fourier, 2) => GridSpec::fourier_2d((pts[0], pts[1]), e(0), e(1)),
            (GridKindConfig::Lgl, 1) => {
                if pts[0] < 2 {
                    return Err(Error::Config("an LGL grid needs at least 2 nodes".into()));
                }
                GridSpec::lgl_1d(pts[0] - 1, e(0))
            }
            _ => return Err(Error::Config(format!("unsupported {dim}D grid"))),
        };
        grid.map_err(|e| Error::Config(e.to_string()))
    }

    pub fn allen_cahn_spec(&self) -> AllenCahnSpec {
        AllenCahnSpec {
            epsilon2: self.params.epsilon2.unwrap_or(0.001),
        }
    }

    pub fn cahn_hilliard_spec(&self) -> CahnHilliardSpec {
        let d = CahnHilliardSpec::default();
        CahnHilliardSpec {
            epsilon: self.params.epsilon.unwrap_or(d.epsilon),
            theta0: self.params.theta0.unwrap_or(d.theta0),
            delta: self.params.delta.unwrap_or(d.delta),
        }
    }

    /// Builds the grid and the problem operators.
    pub fn build_problem(&self) -> Result<Problem> {
        let grid = self.build_grid()?;
        let config_err = |e: Error| Error::Config(e.to_string());
        let problem = match self.problem {
            ProblemKind::AllenCahn => {
                Problem::AllenCahn(AllenCahnOps::new(self.allen_cahn_spec(), grid).map_err(config_err)?)
            }
            ProblemKind::CahnHilliard => Problem::CahnHilliard(
                CahnHilliardOps::new(self.cahn_hilliard_spec(), grid).map_err(config_err)?,
            ),
            ProblemKind::FokkerPlanck => Problem::FokkerPlanck(
                FokkerPlanckOps::new(
                    FokkerPlanckSpec {
                        half_width: self.half_width(),
                    },
                    grid,
                )
                .map_err(config_err)?,
            ),
            ProblemKind::Heat => {
                let [a, b] = self.params.bounds.unwrap_or([-1.0, 1.0]);
                let bounds = BoundConstraint::new(a, b).map_err(config_err)?;
                Problem::Heat(HeatOps::new(HeatSpec { bounds }, grid))
            }
        };
        Ok(problem)
    }

    pub fn init_context(&self) -> InitContext {
        InitContext {
            epsilon2: match self.problem {
                ProblemKind::AllenCahn => Some(self.allen_cahn_spec().epsilon2),
                _ => None,
            },
            seed: self.seed,
        }
    }
}

/// Operators for one of the supported problems.
pub enum Problem {
    AllenCahn(AllenCahnOps),
    CahnHilliard(CahnHilliardOps),
    FokkerPlanck(FokkerPlanckOps),
    Heat(HeatOps),
}

impl Problem {
    pub fn ops(&self) -> &dyn ProblemOps {
        match self {
            Problem::AllenCahn(o) => o,
            Problem::CahnHilliard(o) => o,
            Problem::FokkerPlanck(o) => o,
            Problem::Heat(o) => o,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const AC: &str = r#"{
        "problem": "allen_cahn", "scheme": "bdf2", "corrector": "lagrange",
        "grid": {"points": [16, 16]}, "dt": 1e-3, "t_final": 0.01,
        "params": {"epsilon2": 0.01}, "initial_condition": {"kind": "ac_disc"}
    }"#;

    #[test]
    fn parses_minimal_config() {
        let cfg = RunConfig::from_json(AC).unwrap();
        assert_eq!(cfg.problem, ProblemKind::AllenCahn);
        assert_eq!(cfg.steps().unwrap(), 10);
        assert_eq!(cfg.output, PathBuf::from("out"));
        assert!(!cfg.conserve_mass);
        let p = cfg.build_problem().unwrap();
        assert_eq!(p.ops().grid().extent()[1], (0.0, 2.0 * PI));
    }

    #[test]
    fn rejects_unknown_and_misplaced_keys() {
        let bad = AC.replace("\"dt\"", "\"extra\": 1, \"dt\"");
        assert!(matches!(RunConfig::from_json(&bad), Err(Error::Config(_))));
        let bad = AC.replace("\"epsilon2\": 0.01", "\"theta0\": 5");
        assert!(matches!(RunConfig::from_json(&bad), Err(Error::Config(_))));
        let bad = AC.replace("[16, 16]", "[16]");
        assert!(matches!(RunConfig::from_json(&bad), Err(Error::Config(_))));
        let bad = AC.replace("0.01,", "0.0105,");
        assert!(matches!(RunConfig::from_json(&bad), Err(Error::Config(_))));
    }

    #[test]
    fn step_count_tolerates_rounding() {
        assert_eq!(step_count(1e-5, 0.01).unwrap(), 1000);
        assert_eq!(step_count(2.5e-6, 0.01).unwrap(), 4000);
        assert_eq!(step_count(8e-4, 0.4).unwrap(), 500);
        assert!(step_count(3e-3, 0.01).is_err());
        assert!(step_count(0.0, 1.0).is_err());
    }

    #[test]
    fn fokker_planck_default_extent() {
        let cfg = RunConfig::from_json(
            r#"{"problem": "fokker_planck", "scheme": "bdf2", "corrector": "lagrange",
                "conserve_mass": true, "grid": {"points": [32]}, "dt": 1e-4, "t_final": 0.4,
                "initial_condition": {"kind": "fp_gaussian"}}"#,
        )
        .unwrap();
        let p = cfg.build_problem().unwrap();
        assert_eq!(p.ops().grid().extent()[0], (-2.0 * PI, 2.0 * PI));
    }
}

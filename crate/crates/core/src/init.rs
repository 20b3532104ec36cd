//! Initial-condition presets and the reproducible random generator.

use std::f64::consts::{PI, SQRT_2};
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Field, Grid};
use crate::snapshot::read_snapshot;

/// 64-bit linear congruential generator
/// `s ← 6364136223846793005 s + 1442695040888963407 (mod 2⁶⁴)`.
///
/// Each draw advances the state first and returns the top 53 bits as a
/// double in `[0, 1)`.
#[derive(Debug, Clone)]
pub struct Lcg {
    state: u64,
}

impl Lcg {
    pub const MULTIPLIER: u64 = 6364136223846793005;
    pub const INCREMENT: u64 = 1442695040888963407;

    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self
            .state
            .wrapping_mul(Self::MULTIPLIER)
            .wrapping_add(Self::INCREMENT);
        self.state
    }

    /// Uniform in `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    /// Uniform in `[−1, 1)`.
    pub fn next_symmetric(&mut self) -> f64 {
        2.0 * self.next_f64() - 1.0
    }
}

/// Named initial data. Serialized with a `kind` tag, e.g.
/// `{"kind": "ch_random", "mean": 0.2, "amplitude": 0.05}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialCondition {
    /// `tanh((1 − |x − (π, π)|) / (√2 ε))`.
    AcDisc,
    /// Two discs centred at `(π, 3π/2)` and `(π, 3π/4)`:
    /// sum of the two tanh profiles plus one.
    AcTwoBumps,
    /// `mean + amplitude · rand` with `rand` drawn from [`Lcg`] in row-major
    /// node order.
    ChRandom {
        #[serde(default = "default_ch_mean")]
        mean: f64,
        #[serde(default = "default_ch_amplitude")]
        amplitude: f64,
    },
    /// `exp(−(x − 1)² / 0.4)`.
    FpGaussian,
    /// `amplitude · Π_d sin(2π mode (x_d − lo_d) / L_d)`.
    Sine {
        #[serde(default = "one")]
        amplitude: f64,
        #[serde(default = "one")]
        mode: f64,
    },
    Constant { value: f64 },
    /// Values read from a snapshot file written by the runner.
    Snapshot { path: PathBuf },
}

fn default_ch_mean() -> f64 {
    0.2
}

fn default_ch_amplitude() -> f64 {
    0.05
}

fn one() -> f64 {
    1.0
}

/// Problem parameters some presets depend on.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct InitContext {
    pub epsilon2: Option<f64>,
    pub seed: u64,
}

fn tanh_disc(p: &[f64], center: (f64, f64), epsilon: f64) -> f64 {
    let r = ((p[0] - center.0).powi(2) + (p[1] - center.1).powi(2)).sqrt();
    ((1.0 - r) / (SQRT_2 * epsilon)).tanh()
}

impl InitialCondition {
    pub fn sample(&self, grid: &Grid, ctx: &InitContext) -> Result<Field> {
        let need_2d = || {
            if grid.dim() == 2 {
                Ok(())
            } else {
                Err(Error::Config(format!("{self:?} needs a 2D grid")))
            }
        };
        let epsilon = || {
            ctx.epsilon2
                .map(f64::sqrt)
                .ok_or_else(|| Error::Config("this initial condition needs epsilon2".into()))
        };
        match self {
            InitialCondition::AcDisc => {
                need_2d()?;
                let eps = epsilon()?;
                Ok(Field::from_fn(grid, |p| tanh_disc(p, (PI, PI), eps)))
            }
            InitialCondition::AcTwoBumps => {
                need_2d()?;
                let eps = epsilon()?;
                Ok(Field::from_fn(grid, |p| {
                    tanh_disc(p, (PI, 1.5 * PI), eps) + tanh_disc(p, (PI, 0.75 * PI), eps) + 1.0
                }))
            }
            InitialCondition::ChRandom { mean, amplitude } => {
                let mut rng = Lcg::new(ctx.seed);
                Ok(Field::from_fn(grid, |_| mean + amplitude * rng.next_symmetric()))
            }
            InitialCondition::FpGaussian => {
                Ok(Field::from_fn(grid, |p| (-(p[0] - 1.0).powi(2) / 0.4).exp()))
            }
            InitialCondition::Sine { amplitude, mode } => {
                let extent = grid.extent().to_vec();
                Ok(Field::from_fn(grid, |p| {
                    amplitude
                        * p.iter()
                            .zip(&extent)
                            .map(|(x, (lo, hi))| (2.0 * PI * mode * (x - lo) / (hi - lo)).sin())
                            .product::<f64>()
                }))
            }
            InitialCondition::Constant { value } => Ok(Field::constant(grid, *value)),
            InitialCondition::Snapshot { path } => {
                let (header, values) = read_snapshot(path)?;
                if header.dims != grid.points_per_axis() {
                    return Err(Error::Config(format!(
                        "snapshot {} has dims {:?}, grid has {:?}",
                        path.display(),
                        header.dims,
                        grid.points_per_axis()
                    )));
                }
                Field::new(grid.clone(), values)
            }
        }
    }
}

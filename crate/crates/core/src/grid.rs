//! Collocation grids and the grid functions that live on them.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::lgl::LglBasis;

/// Shared handle to a grid. Fields hold one of these.
pub type Grid = Arc<GridSpec>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum GridKind {
    Fourier1D,
    Fourier2D,
    Lgl1D,
}

/// One periodic axis: FFT plans and wavenumbers.
pub(crate) struct FourierAxis {
    pub n: usize,
    pub forward: Arc<dyn Fft<f64>>,
    pub inverse: Arc<dyn Fft<f64>>,
    /// Wavenumbers in FFT order; the Nyquist entry is `-n/2 * 2pi/L`.
    pub wavenumbers: Vec<f64>,
    /// Same as `wavenumbers` but with the Nyquist mode zeroed, for odd
    /// derivatives.
    pub odd_wavenumbers: Vec<f64>,
}

impl FourierAxis {
    fn new(n: usize, length: f64, planner: &mut FftPlanner<f64>) -> Self {
        let scale = 2.0 * PI / length;
        let wavenumbers: Vec<f64> = (0..n)
            .map(|i| {
                let k = if i < n.div_ceil(2) { i as f64 } else { i as f64 - n as f64 };
                k * scale
            })
            .collect();
        let mut odd_wavenumbers = wavenumbers.clone();
        if n % 2 == 0 {
            odd_wavenumbers[n / 2] = 0.0;
        }
        Self {
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
            wavenumbers,
            odd_wavenumbers,
        }
    }
}

/// Collocation grid descriptor.
///
/// Fourier grids are uniform and exclude the right endpoint; 2D data are
/// stored row-major with `y` varying fastest. LGL grids carry `N + 1` nodes
/// including both endpoints.
pub struct GridSpec {
    kind: GridKind,
    extent: Vec<(f64, f64)>,
    points: Vec<usize>,
    /// Flattened coordinates: `nodes[i * dim + d]`.
    nodes: Vec<f64>,
    weights: Vec<f64>,
    pub(crate) fourier: Vec<FourierAxis>,
    pub(crate) lgl: Option<LglBasis>,
}

impl fmt::Debug for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GridSpec")
            .field("kind", &self.kind)
            .field("extent", &self.extent)
            .field("points", &self.points)
            .finish()
    }
}

impl PartialEq for GridSpec {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && self.extent == other.extent && self.points == other.points
    }
}

fn check_interval((lo, hi): (f64, f64)) -> Result<()> {
    if !(lo.is_finite() && hi.is_finite() && hi > lo) {
        return Err(Error::InvalidGrid(format!("bad interval [{lo}, {hi}]")));
    }
    Ok(())
}

impl GridSpec {
    /// Uniform periodic grid of `n` points on `[lo, hi)`.
    pub fn fourier_1d(n: usize, extent: (f64, f64)) -> Result<Grid> {
        if n < 2 {
            return Err(Error::InvalidGrid("need at least 2 points".into()));
        }
        check_interval(extent)?;
        let (lo, hi) = extent;
        let h = (hi - lo) / n as f64;
        let mut planner = FftPlanner::new();
        Ok(Arc::new(Self {
            kind: GridKind::Fourier1D,
            extent: vec![extent],
            points: vec![n],
            nodes: (0..n).map(|i| lo + i as f64 * h).collect(),
            weights: vec![h; n],
            fourier: vec![FourierAxis::new(n, hi - lo, &mut planner)],
            lgl: None,
        }))
    }

    /// Uniform periodic tensor grid on `[x0, x1) x [y0, y1)`.
    pub fn fourier_2d(points: (usize, usize), x: (f64, f64), y: (f64, f64)) -> Result<Grid> {
        let (nx, ny) = points;
        if nx < 2 || ny < 2 {
            return Err(Error::InvalidGrid("need at least 2 points per axis".into()));
        }
        check_interval(x)?;
        check_interval(y)?;
        let hx = (x.1 - x.0) / nx as f64;
        let hy = (y.1 - y.0) / ny as f64;
        let mut nodes = Vec::with_capacity(2 * nx * ny);
        for i in 0..nx {
            for j in 0..ny {
                nodes.push(x.0 + i as f64 * hx);
                nodes.push(y.0 + j as f64 * hy);
            }
        }
        let mut planner = FftPlanner::new();
        let fourier = vec![
            FourierAxis::new(nx, x.1 - x.0, &mut planner),
            FourierAxis::new(ny, y.1 - y.0, &mut planner),
        ];
        Ok(Arc::new(Self {
            kind: GridKind::Fourier2D,
            extent: vec![x, y],
            points: vec![nx, ny],
            nodes,
            weights: vec![hx * hy; nx * ny],
            fourier,
            lgl: None,
        }))
    }

    /// Legendre–Gauss–Lobatto grid of polynomial degree `degree`
    /// (`degree + 1` nodes) mapped onto `[lo, hi]`.
    pub fn lgl_1d(degree: usize, extent: (f64, f64)) -> Result<Grid> {
        check_interval(extent)?;
        let basis = LglBasis::new(degree)?;
        let (lo, hi) = extent;
        let half = 0.5 * (hi - lo);
        let nodes = basis.nodes.iter().map(|x| lo + (x + 1.0) * half).collect();
        let weights = basis.weights.iter().map(|w| w * half).collect();
        Ok(Arc::new(Self {
            kind: GridKind::Lgl1D,
            extent: vec![extent],
            points: vec![degree + 1],
            nodes,
            weights,
            fourier: Vec::new(),
            lgl: Some(basis),
        }))
    }

    pub fn kind(&self) -> GridKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.points.len()
    }

    pub fn extent(&self) -> &[(f64, f64)] {
        &self.extent
    }

    pub fn points_per_axis(&self) -> &[usize] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Coordinates of node `index` (one entry per axis).
    pub fn node(&self, index: usize) -> &[f64] {
        let d = self.dim();
        &self.nodes[index * d..(index + 1) * d]
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Lebesgue measure of the domain.
    pub fn measure(&self) -> f64 {
        self.extent.iter().map(|(lo, hi)| hi - lo).product()
    }

    pub fn is_periodic(&self) -> bool {
        matches!(self.kind, GridKind::Fourier1D | GridKind::Fourier2D)
    }
}

/// Real-valued grid function: one value per node.
#[derive(Clone)]
pub struct Field {
    grid: Grid,
    values: Vec<f64>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field")
            .field("grid", &self.grid)
            .field("len", &self.values.len())
            .finish()
    }
}

impl Field {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: &Grid) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn constant(grid: &Grid, value: f64) -> Self {
        Self {
            values: vec![value; grid.len()],
            grid: Arc::clone(grid),
        }
    }

    /// Samples `f` at every node.
    pub fn from_fn(grid: &Grid, mut f: impl FnMut(&[f64]) -> f64) -> Self {
        let values = (0..grid.len()).map(|i| f(grid.node(i))).collect();
        Self {
            grid: Arc::clone(grid),
            values,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn same_grid(&self, other: &Field) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid) || *self.grid == *other.grid
    }

    pub fn check_same_grid(&self, other: &Field) -> Result<()> {
        if self.same_grid(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// First non-finite node, if any.
    pub fn check_finite(&self) -> Result<()> {
        match self.values.iter().position(|v| !v.is_finite()) {
            Some(index) => Err(Error::NonFinite { index }),
            None => Ok(()),
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Field {
        Field {
            grid: Arc::clone(&self.grid),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Pointwise combination of two fields on the same grid.
    pub fn zip_map(&self, other: &Field, f: impl Fn(f64, f64) -> f64) -> Result<Field> {
        self.check_same_grid(other)?;
        Ok(Field {
            grid: Arc::clone(&self.grid),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    /// `self += alpha * other`
    pub fn axpy(&mut self, alpha: f64, other: &Field) -> Result<()> {
        self.check_same_grid(other)?;
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += alpha * b;
        }
        Ok(())
    }

    pub fn scale(&mut self, alpha: f64) {
        for v in &mut self.values {
            *v *= alpha;
        }
    }

    /// Linear combination `sum_i c_i f_i` of fields on a common grid.
    pub fn linear_combination(terms: &[(f64, &Field)]) -> Result<Field> {
        let (_, first) = terms
            .first()
            .ok_or_else(|| Error::InvalidParameter("empty linear combination".into()))?;
        let mut out = Field::zeros(&first.grid);
        for (c, f) in terms {
            out.axpy(*c, f)?;
        }
        Ok(out)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn norm_inf(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Spectral coefficients of a field's interpolant.
#[derive(Debug, Clone)]
pub struct SpectralCoeffs {
    pub grid: Grid,
    pub coeffs: Coefficients,
}

#[derive(Debug, Clone)]
pub enum Coefficients {
    /// FFT-ordered Fourier coefficients, normalized so a constant field `c`
    /// has zero mode `c`.
    Fourier(Vec<Complex64>),
    /// Legendre coefficients `a_0 .. a_N`.
    Legendre(Vec<f64>),
}

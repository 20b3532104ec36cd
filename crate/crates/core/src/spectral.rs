//! Spectral transforms, differentiation and constant-coefficient solves.
//!
//! Periodic grids use FFT-based Fourier collocation; LGL grids use the
//! Legendre basis with collocation derivatives and a Galerkin Dirichlet
//! solver. Odd derivatives drop the Nyquist mode. Nonlinear products are
//! never dealiased.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{Coefficients, Field, GridKind, GridSpec, SpectralCoeffs};

/// Forward FFT of real nodal values, normalized by the node count.
pub(crate) fn fft_forward(grid: &GridSpec, values: &[f64]) -> Vec<Complex64> {
    let mut data: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    transform(grid, &mut data, false);
    let norm = 1.0 / values.len() as f64;
    for c in &mut data {
        *c *= norm;
    }
    data
}

/// Inverse FFT, keeping the real part.
pub(crate) fn fft_inverse(grid: &GridSpec, mut coeffs: Vec<Complex64>) -> Vec<f64> {
    transform(grid, &mut coeffs, true);
    coeffs.into_iter().map(|c| c.re).collect()
}

fn transform(grid: &GridSpec, data: &mut [Complex64], inverse: bool) {
    let plan = |axis: usize| {
        let a = &grid.fourier[axis];
        if inverse {
            a.inverse.clone()
        } else {
            a.forward.clone()
        }
    };
    match grid.kind() {
        GridKind::Fourier1D => plan(0).process(data),
        GridKind::Fourier2D => {
            let (nx, ny) = (grid.fourier[0].n, grid.fourier[1].n);
            plan(1).process(data);
            let mut t = vec![Complex64::default(); nx * ny];
            for i in 0..nx {
                for j in 0..ny {
                    t[j * nx + i] = data[i * ny + j];
                }
            }
            plan(0).process(&mut t);
            for i in 0..nx {
                for j in 0..ny {
                    data[i * ny + j] = t[j * nx + i];
                }
            }
        }
        GridKind::Lgl1D => unreachable!("FFT requested on an LGL grid"),
    }
}

/// `|k|^2` for every Fourier mode, in storage order.
pub(crate) fn wavenumber_sq(grid: &GridSpec) -> Vec<f64> {
    match grid.kind() {
        GridKind::Fourier1D => grid.fourier[0].wavenumbers.iter().map(|k| k * k).collect(),
        GridKind::Fourier2D => {
            let (kx, ky) = (&grid.fourier[0].wavenumbers, &grid.fourier[1].wavenumbers);
            kx.iter()
                .flat_map(|a| ky.iter().map(move |b| a * a + b * b))
                .collect()
        }
        GridKind::Lgl1D => unreachable!(),
    }
}

/// Multiplies coefficients by `i k_axis` (Nyquist dropped).
pub(crate) fn spectral_derivative(grid: &GridSpec, coeffs: &[Complex64], axis: usize) -> Vec<Complex64> {
    let k = &grid.fourier[axis].odd_wavenumbers;
    match grid.kind() {
        GridKind::Fourier1D => coeffs
            .iter()
            .zip(k)
            .map(|(c, &k)| c * Complex64::new(0.0, k))
            .collect(),
        GridKind::Fourier2D => {
            let ny = grid.fourier[1].n;
            coeffs
                .iter()
                .enumerate()
                .map(|(idx, c)| {
                    let kk = if axis == 0 { k[idx / ny] } else { k[idx % ny] };
                    c * Complex64::new(0.0, kk)
                })
                .collect()
        }
        GridKind::Lgl1D => unreachable!(),
    }
}

fn lgl_scale(grid: &GridSpec) -> f64 {
    let (lo, hi) = grid.extent()[0];
    2.0 / (hi - lo)
}

/// Coefficients of the interpolant of `f` in the grid's basis.
pub fn to_spectral(f: &Field) -> Result<SpectralCoeffs> {
    f.check_finite()?;
    let grid = f.grid();
    let coeffs = match grid.kind() {
        GridKind::Lgl1D => {
            let basis = grid.lgl.as_ref().expect("LGL grid without basis");
            Coefficients::Legendre(basis.forward(f.values()))
        }
        _ => Coefficients::Fourier(fft_forward(grid, f.values())),
    };
    Ok(SpectralCoeffs {
        grid: grid.clone(),
        coeffs,
    })
}

/// Evaluates a spectral expansion back at the nodes.
pub fn from_spectral(s: &SpectralCoeffs) -> Result<Field> {
    let grid = &s.grid;
    let values = match (&s.coeffs, grid.kind()) {
        (Coefficients::Legendre(c), GridKind::Lgl1D) => {
            grid.lgl.as_ref().expect("LGL grid without basis").inverse(c)
        }
        (Coefficients::Fourier(c), GridKind::Fourier1D | GridKind::Fourier2D) => {
            fft_inverse(grid, c.clone())
        }
        _ => return Err(Error::Unsupported("coefficient type does not match grid kind")),
    };
    Field::new(grid.clone(), values)
}

/// Spectral Laplacian.
pub fn laplacian(f: &Field) -> Result<Field> {
    f.check_finite()?;
    let grid = f.grid();
    let values = match grid.kind() {
        GridKind::Lgl1D => {
            let basis = grid.lgl.as_ref().expect("LGL grid without basis");
            let s = lgl_scale(grid);
            let d2 = basis.differentiate(&basis.differentiate(f.values()));
            d2.into_iter().map(|v| v * s * s).collect()
        }
        _ => {
            let k2 = wavenumber_sq(grid);
            let mut c = fft_forward(grid, f.values());
            for (c, k2) in c.iter_mut().zip(&k2) {
                *c *= -k2;
            }
            fft_inverse(grid, c)
        }
    };
    Field::new(grid.clone(), values)
}

/// Spectral first derivative along every axis.
pub fn gradient(f: &Field) -> Result<Vec<Field>> {
    f.check_finite()?;
    let grid = f.grid();
    match grid.kind() {
        GridKind::Lgl1D => {
            let basis = grid.lgl.as_ref().expect("LGL grid without basis");
            let s = lgl_scale(grid);
            let d = basis.differentiate(f.values()).into_iter().map(|v| v * s).collect();
            Ok(vec![Field::new(grid.clone(), d)?])
        }
        _ => {
            let c = fft_forward(grid, f.values());
            (0..grid.dim())
                .map(|axis| {
                    let d = spectral_derivative(grid, &c, axis);
                    Field::new(grid.clone(), fft_inverse(grid, d))
                })
                .collect()
        }
    }
}

/// Sum of per-axis spectral first derivatives.
pub fn divergence(v: &[Field]) -> Result<Field> {
    let first = v.first().ok_or(Error::AxisMismatch {
        expected: 1,
        got: 0,
    })?;
    let grid = first.grid();
    if v.len() != grid.dim() {
        return Err(Error::AxisMismatch {
            expected: grid.dim(),
            got: v.len(),
        });
    }
    for c in v {
        first.check_same_grid(c)?;
        c.check_finite()?;
    }
    match grid.kind() {
        GridKind::Lgl1D => Ok(gradient(first)?.remove(0)),
        _ => {
            let mut acc = vec![Complex64::default(); grid.len()];
            for (axis, comp) in v.iter().enumerate() {
                let c = fft_forward(grid, comp.values());
                for (a, d) in acc.iter_mut().zip(spectral_derivative(grid, &c, axis)) {
                    *a += d;
                }
            }
            Field::new(grid.clone(), fft_inverse(grid, acc))
        }
    }
}

/// Solves `(sigma I - nu Laplacian) u = rhs`.
///
/// Periodic grids invert the Fourier symbol; a vanishing symbol (only the
/// zero mode with `sigma = 0`) is accepted when the corresponding rhs
/// coefficient is negligible and the solution is then taken mean-free. LGL
/// grids impose homogeneous Dirichlet conditions when `nu > 0`.
pub fn solve_shifted_laplacian(rhs: &Field, sigma: f64, nu: f64) -> Result<Field> {
    if !(sigma >= 0.0 && nu >= 0.0 && sigma.is_finite() && nu.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "shifted Laplacian needs sigma, nu >= 0 (got {sigma}, {nu})"
        )));
    }
    rhs.check_finite()?;
    let grid = rhs.grid();
    match grid.kind() {
        GridKind::Lgl1D => {
            if nu == 0.0 {
                if sigma == 0.0 {
                    return Err(Error::Singular("sigma = nu = 0".into()));
                }
                return Ok(rhs.map(|v| v / sigma));
            }
            let basis = grid.lgl.as_ref().expect("LGL grid without basis");
            let s = lgl_scale(grid);
            let u = basis.solve_dirichlet(rhs.values(), sigma, nu * s * s)?;
            Field::new(grid.clone(), u)
        }
        _ => {
            let k2 = wavenumber_sq(grid);
            let mut c = fft_forward(grid, rhs.values());
            let scale = rhs.norm_inf().max(f64::MIN_POSITIVE);
            for (c, k2) in c.iter_mut().zip(&k2) {
                let symbol = sigma + nu * k2;
                if symbol == 0.0 {
                    if c.norm() > 1e-14 * scale {
                        return Err(Error::Singular(
                            "zero-mode rhs is nonzero but the operator annihilates constants".into(),
                        ));
                    }
                    *c = Complex64::default();
                } else {
                    *c /= symbol;
                }
            }
            Field::new(grid.clone(), fft_inverse(grid, c))
        }
    }
}

/// Quadrature-weighted inner product `sum_z w_z f(z) g(z)`.
pub fn discrete_inner_product(f: &Field, g: &Field) -> Result<f64> {
    f.check_same_grid(g)?;
    Ok(f.grid()
        .weights()
        .iter()
        .zip(f.values().iter().zip(g.values()))
        .map(|(w, (a, b))| w * a * b)
        .sum())
}

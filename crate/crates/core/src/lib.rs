//! Bound-preserving and mass-conserving IMEX time stepping for spectral
//! PDE solvers.

pub mod config;
pub mod diagnostics;
pub mod error;
pub mod grid;
pub mod init;
pub mod integrator;
pub mod krylov;
pub mod lgl;
pub mod multiplier;
pub mod oracle;
pub mod problems;
pub mod runner;
pub mod snapshot;
pub mod spectral;

pub use error::{Error, Result};
pub use grid::{Coefficients, Field, Grid, GridKind, GridSpec, SpectralCoeffs};
pub use multiplier::{BoundConstraint, CorrectorOutput, MassCorrectorOutput};

// Compiles the guide's snippets as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/bounds.md")]
    mod bounds {}
    #[doc = include_str!("../../../book/src/mass.md")]
    mod mass {}
    #[doc = include_str!("../../../book/src/stepping.md")]
    mod stepping {}
    #[doc = include_str!("../../../book/src/problems.md")]
    mod problems {}
    #[doc = include_str!("../../../book/src/running.md")]
    mod running {}
    #[doc = include_str!("../../../book/src/accuracy.md")]
    mod accuracy {}
}

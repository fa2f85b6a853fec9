//! Size-dependent plasmonic resonances of ellipsoidal nanoparticles.
//!
//! The quasi-static spectrum of an ellipsoid (its depolarization factors) is
//! corrected for finite size by a perturbation of the volume integral
//! operator. On top of that sit a resonance solver, dipole observables, and
//! a toolkit for singular integrals with star-shaped exclusion volumes.
//!
//! Conventions used throughout:
//!
//! * permittivities are relative (dimensionless);
//! * the resonance function is `λ(ω) = ε_m / (ε_m − ε_c)`, so the sphere
//!   resonates at `λ = 1/3`, i.e. `ε_c = −2 ε_m`;
//! * the reference shape `B` is normalized to unit largest semi-axis and the
//!   physical size enters through `δ`, so `δk = δ·k_m` is dimensionless.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constants;
pub mod geometry;
pub mod materials;
pub mod observables;
pub mod quadrature;
pub mod singular;
pub mod solver;
pub mod spectral;

pub use geometry::{Ellipsoid, ParticleScale, StarDomain, SurfaceQuadrature};
pub use materials::{DrudeModel, Material, Medium, TabulatedPermittivity};
pub use spectral::{DepolarizationFactors, PerturbationConvention, PerturbationMatrix};

use thiserror::Error;

/// Umbrella error for callers that do not care which stage failed.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Material(#[from] materials::MaterialError),
    #[error(transparent)]
    Geometry(#[from] geometry::GeometryError),
    #[error(transparent)]
    Singular(#[from] singular::SingularError),
    #[error(transparent)]
    Spectral(#[from] spectral::SpectralError),
    #[error(transparent)]
    Solver(#[from] solver::SolverError),
    #[error(transparent)]
    Observable(#[from] observables::ObservableError),
}

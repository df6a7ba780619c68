//! Galerkin boundary element solver for time-harmonic acoustic scattering by
//! planar sound-soft and sound-hard screens in 2D and 3D, specialised to
//! fractal and prefractal screen geometries.
//!
//! The crate is organised along the pipeline:
//!
//! * [`geometry`] — prefractal screen families, dyadic grid approximations,
//!   panel meshes;
//! * [`specialfn`] — the Helmholtz fundamental solution and Hankel functions;
//! * [`quadrature`] — regular, near-singular and singular panel-pair rules;
//! * [`assembly`] — dense Galerkin matrices for the single-layer and
//!   hypersingular forms;
//! * [`solve`] — incident fields, right-hand sides, direct solves;
//! * [`potentials`] — field evaluation, far-field patterns, jump diagnostics;
//! * [`experiments`] — scripted prefractal convergence / null-field / hole
//!   effect studies.

pub mod assembly;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod io;
pub mod linalg;
pub mod potentials;
pub mod quadrature;
pub mod solve;
pub mod specialfn;

pub use assembly::{BasisKind, BasisSpec, GalerkinSystem, Problem};
pub use error::{Error, Result};
pub use geometry::{PrefractalFamily, RegionKind, ScreenPanelMesh, ScreenRegion};
pub use potentials::{FarFieldPattern, FieldGrid};
pub use solve::{DensitySolution, IncidentField};
pub use specialfn::{Ambient, Wavenumber};

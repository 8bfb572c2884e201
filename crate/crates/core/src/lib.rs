//! Pseudo-spectral Galerkin simulation of fluid PDEs driven by superlinear
//! multiplicative taming noise `B(X) = θ‖X‖^α X`, with Monte Carlo studies of
//! blow-up, uniform norm control and increment statistics.
//!
//! The crate is organised bottom up:
//!
//! - [`spectral`]: periodic fields, Sobolev norms, Galerkin projection.
//! - [`models`]: drift operators (Burgers, shallow water, vorticity).
//! - [`noise`]: the taming noise, Wiener paths, the scalar SDE lab.
//! - [`integrators`]: time stepping and blow-up detection.
//! - [`control`]: the deterministic/stochastic switching strategy.
//! - [`experiments`]: ensembles, audits and statistical checks.
//! - [`io`]: configuration files, trajectory and table output.
//!
//! ```
//! use stochtame::spectral::{SpectralField, TorusGrid, sobolev_norm};
//!
//! let grid = TorusGrid::new(1, 16).unwrap();
//! let f = SpectralField::from_fn(grid, 1, |x| vec![x[0].sin()]);
//! assert!((sobolev_norm(&f, 1.0).unwrap() - 1.0).abs() < 1e-12);
//! ```

pub mod cli;
pub mod control;
pub mod error;
pub mod experiments;
pub mod integrators;
pub mod io;
pub mod models;
pub mod noise;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};

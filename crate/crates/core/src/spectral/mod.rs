//! Periodic fields on the 2π-torus in Fourier representation.
//!
//! Coefficients follow `f̂_k = (2π)^{-dim} ∫ f e^{-ik·x} dx`, so a field's
//! physical samples are recovered by an unnormalised inverse FFT. Sobolev
//! norms use the weight `(1+|k|²)^s`.

mod field;
mod grid;
mod norms;
mod projection;
mod random;
mod snapshot;
mod transform;

pub use field::SpectralField;
pub use grid::TorusGrid;
pub use norms::{
    duality_pairing, inner_product, interpolation_check, sobolev_norm, sobolev_norm_sq,
    SpaceLadder, Space,
};
pub use projection::{dealias, galerkin_grid_for, galerkin_project, GalerkinProjector};
pub use random::random_field;
pub use snapshot::{read_snapshot, snapshot_from_bytes, snapshot_to_bytes, write_snapshot};
pub use transform::{fft_forward, fft_inverse};

pub use rustfft::num_complex::Complex64;

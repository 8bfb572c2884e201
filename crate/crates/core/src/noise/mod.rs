//! The taming noise `B(X) = θ‖X‖^α X`, scalar Brownian paths, and the
//! one-dimensional SDE laboratory.

mod advisor;
mod gbm;
mod martingale;
mod revuz_yor;
mod scale;
mod taming;
mod wiener;

pub use advisor::{theta_advisor, theta_advisor_with_margin, Advice};
pub use gbm::{gbm_decay_criterion, gbm_exact, sample_gbm_terminal, GbmSpec};
pub use martingale::{bridge_max, track_martingale, track_martingale_bridged, MartingaleDiagnostics};
pub use revuz_yor::{brownian_sup_exact, revuz_yor_bound};
pub use scale::{scale_function, ScaleFunctionSpec};
pub use taming::{noise_coefficient, noise_factor, CaseLabel, NoiseSpec, NormSpace};
pub use wiener::{WienerPath, TICKS_PER_STEP};

/// Standard normal from two uniforms in `[0, 1)` (Box–Muller, cosine branch).
#[inline]
pub fn box_muller(u1: f64, u2: f64) -> f64 {
    (-2.0 * (1.0 - u1).ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

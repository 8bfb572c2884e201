use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{geostrophic_state, leray_project, DriftOperator, ModelKind};
use crate::spectral::{galerkin_project, random_field, read_snapshot, GalerkinProjector, SpectralField, TorusGrid};

/// Initial data, built on whatever grid a run uses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialCondition {
    /// `amplitude·sin(x_c)` in component `c` (axis `c mod dim`). A shallow-water
    /// height becomes `depth + amplitude·sin x`.
    Sine {
        amplitude: f64,
        #[serde(default = "unit")]
        depth: f64,
    },
    Random {
        decay: f64,
        amplitude: f64,
        seed: u64,
    },
    /// Shallow water: height `depth` plus a random perturbation, velocity in
    /// geostrophic balance with it.
    Geostrophic {
        depth: f64,
        amplitude: f64,
        decay: f64,
        seed: u64,
    },
    Snapshot {
        path: String,
    },
}

fn unit() -> f64 {
    1.0
}

fn is_rsw(kind: ModelKind) -> bool {
    matches!(kind, ModelKind::RswViscous | ModelKind::RswInviscid)
}

impl InitialCondition {
    pub fn build(&self, op: &DriftOperator, grid: TorusGrid, cutoff: usize) -> Result<SpectralField> {
        let comps = op.kind.components().unwrap_or(1);
        let dim = grid.dim();
        let f = match self {
            InitialCondition::Sine { amplitude, depth } => {
                let rsw = is_rsw(op.kind);
                SpectralField::from_fn(grid, comps, |x| {
                    (0..comps)
                        .map(|c| {
                            let s = amplitude * x[c % dim].sin();
                            if rsw && c == 2 {
                                depth + s
                            } else {
                                s
                            }
                        })
                        .collect()
                })
            }
            InitialCondition::Random { decay, amplitude, seed } => {
                let f = random_field(grid, comps, *decay, *amplitude, *seed);
                if op.kind == ModelKind::Vorticity3d {
                    leray_project(&f)?
                } else {
                    f
                }
            }
            InitialCondition::Geostrophic { depth, amplitude, decay, seed } => {
                if !is_rsw(op.kind) {
                    return Err(Error::Config("geostrophic initial data needs a shallow-water model".into()));
                }
                let mut h = random_field(grid, 1, *decay, *amplitude, *seed);
                h.comp_mut(0)[0].re += depth;
                h.comp_mut(0)[0].im = 0.0;
                geostrophic_state(&h, &op.params)?
            }
            InitialCondition::Snapshot { path } => {
                let f = read_snapshot(std::path::Path::new(path))?;
                if f.grid() != grid {
                    return Err(Error::Shape(format!(
                        "snapshot {path} is on an n = {} grid, the run uses n = {}",
                        f.grid().n(),
                        grid.n()
                    )));
                }
                f
            }
        };
        op.check_field(&f)?;
        galerkin_project(&f, GalerkinProjector::new(cutoff))
    }
}

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Check;
use crate::error::Result;
use crate::experiments::{run_ensemble, EnsembleConfig, InitialCondition};
use crate::integrators::{integrate_path, ProjectedSde, Scheme, StepperConfig, TrajectoryRow};
use crate::io::{parse_config, RunConfig};
use crate::models::{biot_savart, curl, default_ladder, divergence, leray_project, DriftOperator, ModelKind, ModelParams};
use crate::noise::{scale_function, CaseLabel, NoiseSpec, ScaleFunctionSpec, WienerPath};
use crate::spectral::{
    galerkin_project, inner_product, interpolation_check, random_field, snapshot_from_bytes, snapshot_to_bytes,
    sobolev_norm, GalerkinProjector, SpaceLadder, SpectralField, TorusGrid,
};

fn max_abs(f: &SpectralField) -> f64 {
    f.comps().iter().flatten().map(|v| v.norm()).fold(0.0, f64::max)
}

/// Zero out the Nyquist modes, where derivatives are not invertible.
fn strip_nyquist(f: &SpectralField) -> SpectralField {
    let g = f.grid();
    let mut out = f.clone();
    out.map_modes(|i| {
        if g.is_nyquist(i) {
            Default::default()
        } else {
            crate::spectral::Complex64::new(1.0, 0.0)
        }
    });
    out
}

fn interpolation() -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let ladders = [
        default_ladder(ModelKind::Burgers1d, &ModelParams::default()),
        default_ladder(ModelKind::RswViscous, &ModelParams::default()),
        default_ladder(ModelKind::Vorticity3d, &ModelParams::default()),
        SpaceLadder::new(-1.0, 0.5, 2.5, 4.0)?,
    ];
    let grids = [TorusGrid::new(1, 32)?, TorusGrid::new(2, 16)?, TorusGrid::new(3, 8)?];
    let n = 10_000;
    let mut worst = 0.0f64;
    let mut bad = 0;
    for i in 0..n {
        let g = grids[i % grids.len()];
        let l = &ladders[(i / grids.len()) % ladders.len()];
        let decay = rng.random_range(0.5..6.0);
        let amp = 10f64.powf(rng.random_range(-3.0..3.0));
        let f = random_field(g, 1 + i % 3, decay, amp, i as u64);
        let (lhs, rhs) = interpolation_check(&f, l)?;
        let r = lhs / rhs;
        worst = worst.max(r);
        if lhs > rhs * (1.0 + 1e-12) {
            bad += 1;
        }
    }
    Ok((bad == 0, format!("{bad} violations in {n} fields, max ratio {worst:.6}")))
}

fn projection() -> Result<(bool, String)> {
    let g = TorusGrid::new(2, 32)?;
    let mut ok = true;
    let mut worst_growth = 0.0f64;
    for seed in 0..50u64 {
        let f = random_field(g, 2, 2.0, 1.0, seed);
        for cutoff in [1usize, 4, 10, 16] {
            let p = GalerkinProjector::new(cutoff);
            let once = galerkin_project(&f, p)?;
            ok &= galerkin_project(&once, p)? == once;
            for s in [-1.0, 0.0, 1.5, 3.0] {
                let growth = sobolev_norm(&once, s)? / sobolev_norm(&f, s)?;
                worst_growth = worst_growth.max(growth);
            }
        }
    }
    ok &= worst_growth <= 1.0;
    Ok((ok, format!("idempotent, max norm ratio {worst_growth:.6}")))
}

fn biot_savart_identities() -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for seed in 0..10u64 {
        let g2 = TorusGrid::new(2, 32)?;
        let mut w = strip_nyquist(&random_field(g2, 1, 2.5, 1.0, seed));
        w.comp_mut(0)[0] = Default::default();
        let u = biot_savart(&w)?;
        worst = worst.max(max_abs(&curl(&u)?.sub(&w)) / max_abs(&w));
        worst = worst.max(max_abs(&divergence(&u)?) / max_abs(&w));

        let g3 = TorusGrid::new(3, 16)?;
        let v = strip_nyquist(&leray_project(&random_field(g3, 3, 3.0, 1.0, seed))?);
        let w3 = strip_nyquist(&curl(&v)?);
        let u3 = biot_savart(&w3)?;
        worst = worst.max(max_abs(&curl(&u3)?.sub(&w3)) / max_abs(&w3));
        worst = worst.max(max_abs(&divergence(&u3)?) / max_abs(&w3));
    }
    Ok((worst <= 1e-12, format!("max relative defect {worst:.2e}")))
}

fn enstrophy() -> Result<(bool, String)> {
    let op = DriftOperator::new(ModelKind::Vorticity2d, ModelParams::default())?;
    let g = TorusGrid::new(2, 64)?;
    let mut worst = 0.0f64;
    for seed in 0..20u64 {
        let w = galerkin_project(&random_field(g, 1, 3.0, 1.0, seed), GalerkinProjector::new(21))?;
        let a = op.eval(&w)?;
        let rel = inner_product(&w, &a, 0.0)?.abs() / (sobolev_norm(&w, 0.0)? * sobolev_norm(&a, 0.0)?);
        worst = worst.max(rel);
    }
    Ok((worst <= 1e-10, format!("max |⟨ω, A(ω)⟩| / (‖ω‖‖A(ω)‖) = {worst:.2e}")))
}

fn rsw_mass() -> Result<(bool, String)> {
    let g = TorusGrid::new(2, 32)?;
    let mut worst = 0.0f64;
    for (kind, nu) in [(ModelKind::RswViscous, 0.05), (ModelKind::RswInviscid, 0.0)] {
        let op = DriftOperator::new(kind, ModelParams { nu, eta: nu, ..Default::default() })?;
        for seed in 0..20u64 {
            let mut x = random_field(g, 3, 3.0, 0.1, seed);
            x.comp_mut(2)[0] = crate::spectral::Complex64::new(1.0, 0.0);
            let x = galerkin_project(&x, GalerkinProjector::new(10))?;
            let a = op.eval(&x)?;
            worst = worst.max(a.comp(2)[0].norm() / max_abs(&a));
        }
    }
    Ok((worst <= 1e-12, format!("max |d/dt mean h| relative to the tendency {worst:.2e}")))
}

fn scale_quadrature() -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for (a, b) in [(1.0, 2.0), (1.0, 0.5), (0.5, 1.0), (-0.3, 0.8)] {
        let spec = ScaleFunctionSpec::gbm(a, b, 1.0);
        for x in [0.25, 0.5, 2.0, 4.0] {
            let q = scale_function(&spec, x)?;
            let c = ScaleFunctionSpec::gbm_closed_form(a, b, 1.0, x);
            worst = worst.max((q - c).abs() / c.abs().max(1.0));
        }
    }
    Ok((worst <= 1e-6, format!("max relative error {worst:.2e}")))
}

const ROUND_TRIP_CONFIG: &str = r#"
seed = 9

[model]
kind = "rsw_viscous"
resolution = 32
params = { nu = 0.1, eta = 0.1 }
topography = { amplitude = 0.01, decay = 3.0, seed = 2 }

[initial]
space = "F0"
field = { type = "geostrophic", depth = 1.0, amplitude = 0.05, decay = 4.0, seed = 1 }

[noise]
theta = 1.5
alpha = 0.5
case = "I"

[stepper]
scheme = "milstein"
t_end = 0.1

[control]
K = 2.0
"#;

fn round_trips() -> Result<(bool, String)> {
    let c: RunConfig = parse_config(ROUND_TRIP_CONFIG)?;
    let config_ok = parse_config(&c.to_toml()?)? == c;
    let g = TorusGrid::new(3, 8)?;
    let f = random_field(g, 3, 2.0, 1.0, 4);
    let snap_ok = snapshot_from_bytes(&snapshot_to_bytes(&f))? == f;
    let row = TrajectoryRow {
        t: 0.1,
        norm_g: 1.0 / 3.0,
        norm_f0: 2.0f64.sqrt(),
        norm_f1: 1e-300,
        norm_d: 7.0,
        int_f1sq: 0.0,
        regime: crate::integrators::Regime::Stochastic,
        m: -0.5,
        qv: 0.25,
        flags: "tau".into(),
    };
    let text = serde_json::to_string(&row).map_err(|e| crate::Error::Parse(e.to_string()))?;
    let back: TrajectoryRow = serde_json::from_str(&text).map_err(|e| crate::Error::Parse(e.to_string()))?;
    let row_ok = back == row;
    Ok((
        config_ok && snap_ok && row_ok,
        format!("config {config_ok}, snapshot {snap_ok}, trajectory row {row_ok}"),
    ))
}

fn reproducibility() -> Result<(bool, String)> {
    let op = DriftOperator::new(ModelKind::Burgers1d, ModelParams::default())?;
    let sys = ProjectedSde::new(op, Some(NoiseSpec::new(2.0, 1.5, CaseLabel::I)?), 21);
    let g = TorusGrid::new(1, 64)?;
    let x0 = galerkin_project(&SpectralField::from_fn(g, 1, |x| vec![x[0].sin()]), GalerkinProjector::new(21))?;
    let cfg = StepperConfig { scheme: Scheme::Milstein, t_end: 0.5, ..Default::default() };
    let a = integrate_path(&x0, &sys, &cfg, Some(WienerPath::new(42, cfg.dt)?), 0.25)?;
    let b = integrate_path(&x0, &sys, &cfg, Some(WienerPath::new(42, cfg.dt)?), 0.25)?;
    let c = integrate_path(&x0, &sys, &cfg, Some(WienerPath::new(43, cfg.dt)?), 0.25)?;
    let bits = |r: &crate::integrators::TrajectoryRecord| {
        r.rows.iter().flat_map(|row| [row.t, row.norm_f0, row.m, row.qv]).map(f64::to_bits).collect::<Vec<_>>()
    };
    let path_ok = bits(&a) == bits(&b) && bits(&a) != bits(&c);
    let ens = EnsembleConfig {
        n_paths: 6,
        base_seed: 11,
        d_list: vec![4, 8],
        kind: ModelKind::Burgers1d,
        params: ModelParams::default(),
        dim: None,
        initial: InitialCondition::Sine { amplitude: 1.0, depth: 1.0 },
        noise: sys.noise,
        stepper: StepperConfig { t_end: 0.2, ..cfg },
        k_grid: vec![0.5, 1.0, 2.0],
        epsilon: 0.25,
        control: None,
        aldous: None,
        ci_level: 0.95,
    };
    let ens_ok = run_ensemble(&ens, false)?.stats == run_ensemble(&ens, false)?.stats;
    Ok((path_ok && ens_ok, format!("path {path_ok}, ensemble {ens_ok}")))
}

/// Identities of the spectral layer and models, and serialization round trips.
pub fn structural_suite() -> Vec<Check> {
    vec![
        Check::timed("interpolation inequality", interpolation),
        Check::timed("projection idempotence and contraction", projection),
        Check::timed("biot-savart curl and divergence", biot_savart_identities),
        Check::timed("2d euler enstrophy pairing", enstrophy),
        Check::timed("shallow-water mass conservation", rsw_mass),
        Check::timed("scale function quadrature", scale_quadrature),
        Check::timed("serialization round trips", round_trips),
        Check::timed("seed reproducibility", reproducibility),
    ]
}

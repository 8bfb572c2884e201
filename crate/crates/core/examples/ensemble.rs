//! A small Monte Carlo ensemble over several Galerkin cutoffs: threshold
//! probabilities for the supremum and the integral norm, the smallest `K`
//! reaching a target level, and the Aldous increment table.
//!
//! Burgers conserves `‖X‖_L²`, so the norm follows the same scalar SDE at
//! every cutoff and the rows agree across `d` for a shared seed.

use stochtame::experiments::{
    aldous_table, run_ensemble, uniform_control_report, AldousConfig, EnsembleConfig, InitialCondition,
};
use stochtame::integrators::{Scheme, StepperConfig};
use stochtame::models::{ModelKind, ModelParams};
use stochtame::noise::{CaseLabel, NoiseSpec};

pub fn run_example() -> stochtame::Result<()> {
    let cfg = EnsembleConfig {
        n_paths: 24,
        base_seed: 100,
        d_list: vec![8, 16, 32],
        kind: ModelKind::Burgers1d,
        params: ModelParams::default(),
        dim: None,
        initial: InitialCondition::Sine { amplitude: 1.0, depth: 1.0 },
        noise: Some(NoiseSpec::new(6.7, 1.55, CaseLabel::I)?),
        stepper: StepperConfig { scheme: Scheme::Milstein, t_end: 1.0, save_every: 10, ..Default::default() },
        k_grid: vec![1.0, 2.0, 5.0, 10.0, 100.0],
        epsilon: 0.25,
        control: None,
        aldous: Some(AldousConfig { delta_grid: vec![0.002, 0.01, 0.05], eta: None, pilot_paths: 8 }),
        ci_level: 0.95,
    };
    let out = run_ensemble(&cfg, false)?;
    let report = uniform_control_report(&out.stats, 0.1)?;
    println!("sup_t ‖X‖²_F0 ≥ K");
    for r in &report.sup.rows {
        println!("  d = {:3}  K = {:6}  p̂ = {:.3}  [{:.3}, {:.3}]", r.d, r.k, r.p_hat, r.ci_lo, r.ci_hi);
    }
    println!("K₁ = {:?}, K₂ = {:?}", report.k1(), report.k2());

    let table = aldous_table(&out.stats, None)?;
    println!("Aldous increments, η = {:.4}", table.eta);
    for r in &table.rows {
        println!("  d = {:3}  δ = {:5}  p̂ = {:.3}", r.d, r.delta, r.p_hat);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> stochtame::Result<()> {
    run_example()
}

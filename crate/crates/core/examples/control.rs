//! The switching strategy on Burgers: deterministic flow until `‖X‖` reaches
//! `L_hi`, tamed noise until it falls back to `L_lo`, and so on. Each path is
//! checked against the schedule rules.

use stochtame::control::validate_schedule;
use stochtame::experiments::run_ensemble;
use stochtame::integrators::EventKind;
use stochtame::verify::{burgers_advice, burgers_control_config, deterministic_flag_time};

pub fn run_example() -> stochtame::Result<()> {
    let (advice, _) = burgers_advice()?;
    let cfg = burgers_control_config(&advice, 8)?;
    let sched = cfg.control.clone().expect("control schedule");
    println!("K = {}, L_hi = {:.4}, L_lo = {:.4}", sched.k, sched.l_hi(), sched.l_lo());
    if let Some(t) = deterministic_flag_time(0.5)? {
        println!("without noise the run is flagged at t = {t:.4}");
    }

    let out = run_ensemble(&cfg, true)?;
    for (i, rec) in &out.records {
        let v = validate_schedule(rec, &sched);
        let tau = rec.events_of(EventKind::Tau).next().map(|e| e.time);
        let rho = rec.events_of(EventKind::Rho).next().map(|e| e.time);
        println!(
            "path {i}: τ₀ = {}, ρ₀ = {}, α = {}, valid = {}",
            tau.map_or("-".into(), |t| format!("{t:.4}")),
            rho.map_or("-".into(), |t| format!("{t:.4}")),
            v.alpha.map_or("-".into(), |a| format!("{a:.4}")),
            v.pass
        );
    }
    let s = &out.stats;
    println!("{}/{} paths completed a cycle without a flag", s.with_cycle[0].hits, s.with_cycle[0].n);
    Ok(())
}

#[allow(dead_code)]
fn main() -> stochtame::Result<()> {
    run_example()
}

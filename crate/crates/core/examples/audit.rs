//! Fit the structural constants of several drifts on random fields and turn
//! them into a noise intensity for each case.

use stochtame::experiments::{assumption_audit, AuditConfig};
use stochtame::models::{DriftOperator, ModelKind, ModelParams};
use stochtame::noise::{theta_advisor, CaseLabel};

pub fn run_example() -> stochtame::Result<()> {
    let models = [
        (ModelKind::Burgers1d, 21, CaseLabel::I),
        (ModelKind::RswInviscid, 10, CaseLabel::II),
        (ModelKind::Vorticity2d, 10, CaseLabel::III),
    ];
    for (kind, cutoff, case) in models {
        let op = DriftOperator::new(kind, ModelParams::default())?;
        let mut cfg = AuditConfig::for_operator(&op, cutoff, 120, 1);
        cfg.ascent_starts = 1;
        cfg.ascent_iters = 10;
        let r = assumption_audit(&op, &cfg)?;
        let k = &r.constants;
        println!(
            "{kind:?} (cutoff {cutoff}): c1 = {:.3}, γ1 = {:.2} (fitted {:.2}), c2 = {:.3}, γ2 = {:.2}",
            k.c1, k.gamma1, r.fitted_gamma1, k.c2, k.gamma2
        );
        match theta_advisor(case, k, 0.25) {
            Ok(a) => println!("  case {case:?}: θ = {:.3}, α = {:.3}", a.theta, a.alpha),
            Err(e) => println!("  case {case:?}: no advice ({e})"),
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> stochtame::Result<()> {
    run_example()
}

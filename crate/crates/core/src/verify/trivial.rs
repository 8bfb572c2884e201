use super::Check;
use crate::control::{control_run, scale_inverse, scale_value, validate_schedule, ControlSchedule};
use crate::experiments::{assumption_audit, wilson_interval, AuditConfig};
use crate::integrators::{integrate_path, ProjectedSde, Scheme, StepperConfig, TrajectoryRecord};
use crate::models::{DriftOperator, ModelKind, ModelParams};
use crate::noise::{gbm_decay_criterion, revuz_yor_bound, CaseLabel, GbmSpec, NoiseSpec, WienerPath};
use crate::spectral::{sobolev_norm, SpectralField, TorusGrid};

fn heat() -> (ProjectedSde, SpectralField) {
    let op = DriftOperator::new(ModelKind::Heat, ModelParams { nu: 1.0, ..Default::default() }).unwrap();
    let g = TorusGrid::new(1, 32).unwrap();
    let x0 = SpectralField::from_fn(g, 1, |x| vec![x[0].sin()]);
    (ProjectedSde::new(op, None, 10), x0)
}

/// Seconds-long checks with exact or boundary answers.
pub fn trivial_suite() -> Vec<Check> {
    let mut out = Vec::new();

    out.push(Check::timed("scale function values", || {
        let s = ControlSchedule::new(1.0, 1.0)?;
        let a = scale_value(0.0, &s)?;
        let b = scale_value((1f64.exp() - 1.0).sqrt(), &s)?;
        let back = scale_inverse(b, &s)?;
        let ok = a == 0.0 && (b - 1.0).abs() < 1e-15 && (back - (1f64.exp() - 1.0).sqrt()).abs() < 1e-12;
        Ok((ok, format!("φ(0) = {a}, φ(√(e−1)) = {b}")))
    }));

    out.push(Check::timed("heat decay", || {
        let (sys, x0) = heat();
        let cfg = StepperConfig { scheme: Scheme::Rk4Deterministic, dt: 1e-3, t_end: 1.0, ..Default::default() };
        let rec = integrate_path(&x0, &sys, &cfg, None, 0.25)?;
        let l2 = |f: &SpectralField| sobolev_norm(f, 0.0);
        let want = (-1.0f64).exp() * l2(&x0)?;
        let got = rec.final_row().map(|r| r.norm_g).unwrap_or(f64::NAN);
        Ok(((got - want).abs() < 1e-6, format!("‖u(1)‖ = {got:.12}, e^-1‖u0‖ = {want:.12}")))
    }));

    out.push(Check::timed("heat needs no control", || {
        let (sys, x0) = heat();
        let sys = ProjectedSde::new(sys.op, Some(NoiseSpec::new(1.0, 1.0, CaseLabel::I)?), 10);
        let sched = ControlSchedule::new(1.0, 1.0)?;
        let cfg = StepperConfig { t_end: 0.5, ..Default::default() };
        let rec = control_run(&x0, &sys, &sched, &cfg, WienerPath::new(1, cfg.dt)?, 0.25)?;
        let v = validate_schedule(&rec, &sched);
        Ok((rec.events.is_empty() && v.pass && v.alpha.is_none(), format!("{} events", rec.events.len())))
    }));

    out.push(Check::timed("empty schedule validates", || {
        let v = validate_schedule(&TrajectoryRecord::default(), &ControlSchedule::new(1.0, 1.0)?);
        Ok((v.pass && v.alpha.is_none(), format!("pass = {}", v.pass)))
    }));

    out.push(Check::timed("gbm decay criterion", || {
        let yes = gbm_decay_criterion(&GbmSpec::new(1.0, 2.0, 1.0)?);
        let no = gbm_decay_criterion(&GbmSpec::new(1.0, 0.5, 1.0)?);
        let tie = gbm_decay_criterion(&GbmSpec::new(1.0, 2f64.sqrt(), 1.0)?);
        Ok((yes && !no && !tie, format!("(1,2) {yes}, (1,0.5) {no}, (1,√2) {tie}")))
    }));

    out.push(Check::timed("zero drift audit", || {
        let op = DriftOperator::new(ModelKind::Zero, ModelParams::default())?;
        let mut cfg = AuditConfig::for_operator(&op, 5, 100, 1);
        cfg.amplitudes = vec![1.0];
        let r = assumption_audit(&op, &cfg)?;
        let k = r.constants;
        let ok = k.c1 == 0.0 && k.c1_a2 == 0.0 && k.c1_a3 == 0.0 && k.c3 == 0.0;
        Ok((ok, format!("C₁ = {}, C₃ = {}", k.c1, k.c3)))
    }));

    out.push(Check::timed("wilson interval", || {
        let (lo, hi) = wilson_interval(0, 10, 0.95);
        let (lo2, hi2) = wilson_interval(10, 10, 0.95);
        Ok((lo == 0.0 && hi > 0.0 && hi2 == 1.0 && lo2 < 1.0, format!("[{lo}, {hi:.4}], [{lo2:.4}, {hi2}]")))
    }));

    out.push(Check::timed("revuz-yor bound at zero", || {
        let b = revuz_yor_bound(1e-12, 1.0)?;
        Ok(((b - 1.0).abs() < 1e-15, format!("bound(0+, 1) = {b}")))
    }));

    out
}

use std::time::Instant;

use super::{structural_suite, Check};
use crate::control::{validate_schedule, ControlSchedule};
use crate::error::{Error, Result};
use crate::experiments::{
    aldous_table, assumption_audit, d_space_control_report, exp_law_study, gbm_study, median, revuz_yor_study,
    run_ensemble, strong_order_study, uniform_control_report, AldousConfig, AuditConfig, AuditReport,
    EnsembleConfig, InitialCondition, SummaryStats,
};
use crate::integrators::{integrate_path, ProjectedSde, Scheme, StepperConfig};
use crate::models::{DriftOperator, ModelKind, ModelParams};
use crate::noise::{theta_advisor, Advice, CaseLabel, GbmSpec, NoiseSpec};
use crate::spectral::{galerkin_grid_for, SpectralField, TorusGrid};

/// Cutoff of the fine-resolution Burgers runs (`n = 1024`).
const BURGERS_CUTOFF: usize = 341;
/// Control level of the Burgers control experiment.
const CONTROL_K: f64 = 0.13;

fn pct(c: &crate::experiments::Counts) -> String {
    format!("{}/{}", c.hits, c.n)
}

/// GBM: exact-sample decay fraction and the strong order of tamed EM.
pub fn ac1_gbm() -> Vec<Check> {
    let t0 = Instant::now();
    let spec = GbmSpec::new(1.0, 2.0, 1.0);
    let a = Check::timed("AC-1a", || {
        let row = gbm_study(&[spec?], 1000, 10.0, 100)?.remove(0);
        Ok((
            row.frac_small >= 0.99,
            format!(
                "P̂(f_T < 1e-2) = {:.3} [{:.3}, {:.3}] (need ≥ 0.99; exact {:.4})",
                row.frac_small, row.ci_lo, row.ci_hi, row.frac_small_exact
            ),
        ))
    });
    let b = Check::timed("AC-1b", || {
        let spec = GbmSpec::new(1.0, 2.0, 1.0)?;
        let dts = [2f64.powi(-9), 2f64.powi(-10), 2f64.powi(-11)];
        let tamed = strong_order_study(&spec, Scheme::TamedEulerMaruyama, &dts, 1000, 1.0, 101)?;
        let plain = strong_order_study(&spec, Scheme::EulerMaruyama, &dts, 1000, 1.0, 101)?;
        let ratios: Vec<String> = tamed.errors.windows(2).map(|w| format!("{:.3}", w[0] / w[1])).collect();
        let secs = t0.elapsed().as_secs_f64();
        Ok((
            (0.4..=0.6).contains(&tamed.order) && secs < 10.0,
            format!(
                "tamed EM order {:.3}, error ratios [{}] (need order in [0.4, 0.6]); untamed EM order {:.3}; AC-1 runtime {secs:.1}s",
                tamed.order,
                ratios.join(", "),
                plain.order
            ),
        ))
    });
    vec![a, b]
}

pub fn ac2_exp_law() -> Check {
    Check::timed("AC-2", || {
        let t0 = Instant::now();
        let r = exp_law_study(1.0, 10_000, 1e-3, 50.0, 200)?;
        let secs = t0.elapsed().as_secs_f64();
        let ok = (r.survival_at_1 - r.survival_exact).abs() <= 0.03 && r.ks.p_value >= 0.01 && secs < 60.0;
        Ok((
            ok,
            format!(
                "P̂(E ≥ 1) = {:.4} vs e^-1 = {:.4}; KS D = {:.4}, p = {:.3}",
                r.survival_at_1, r.survival_exact, r.ks.statistic, r.ks.p_value
            ),
        ))
    })
}

pub fn ac3_revuz_yor() -> Check {
    Check::timed("AC-3", || {
        let t0 = Instant::now();
        let xs = [0.25, 0.5, 1.0, 1.5, 2.0];
        let ys = [0.5, 1.0, 2.0, 3.0, 4.0];
        let rows = revuz_yor_study(&xs, &ys, 10_000, 1e-3, 0.999, 300)?;
        let below = rows.iter().filter(|r| r.below_bound()).count();
        let exact = rows.iter().filter(|r| r.matches_exact()).count();
        let secs = t0.elapsed().as_secs_f64();
        Ok((
            below == rows.len() && exact == rows.len() && secs < 60.0,
            format!(
                "CI upper edge below bound at {below}/{} points, exact value inside CI at {exact}/{} (99.9% Wilson)",
                rows.len(),
                rows.len()
            ),
        ))
    })
}

/// Audit of inviscid Burgers at `n = 1024` and the Case I advice with ε = 1/4.
pub fn burgers_advice() -> Result<(Advice, AuditReport)> {
    let op = DriftOperator::new(ModelKind::Burgers1d, ModelParams::default())?;
    let mut cfg = AuditConfig::for_operator(&op, BURGERS_CUTOFF, 200, 1);
    cfg.ascent_starts = 2;
    cfg.ascent_iters = 40;
    let audit = assumption_audit(&op, &cfg)?;
    Ok((theta_advisor(CaseLabel::I, &audit.constants, 0.25)?, audit))
}

fn burgers_stepper(t_end: f64, save_every: usize) -> StepperConfig {
    StepperConfig {
        scheme: Scheme::Milstein,
        dt: 1e-3,
        t_end,
        save_every,
        resolution_tail: Some(1e-3),
        ..Default::default()
    }
}

/// Flag time of the noise-free Burgers run from `amplitude·sin x`.
pub fn deterministic_flag_time(amplitude: f64) -> Result<Option<f64>> {
    let op = DriftOperator::new(ModelKind::Burgers1d, ModelParams::default())?;
    let g = TorusGrid::new(1, galerkin_grid_for(BURGERS_CUTOFF))?;
    let x0 = SpectralField::from_fn(g, 1, |x| vec![amplitude * x[0].sin()]);
    let sys = ProjectedSde::new(op, None, BURGERS_CUTOFF);
    let cfg = StepperConfig { scheme: Scheme::Rk4Deterministic, ..burgers_stepper(2.0, 100) };
    Ok(integrate_path(&x0, &sys, &cfg, None, 0.25)?.blowup.map(|b| b.0))
}

fn burgers_ensemble(noise: NoiseSpec, n_paths: usize, base_seed: u64, d_list: Vec<usize>) -> EnsembleConfig {
    EnsembleConfig {
        n_paths,
        base_seed,
        d_list,
        kind: ModelKind::Burgers1d,
        params: ModelParams::default(),
        dim: None,
        initial: InitialCondition::Sine { amplitude: 1.0, depth: 1.0 },
        noise: Some(noise),
        stepper: burgers_stepper(2.0, 100),
        k_grid: vec![1.0],
        epsilon: 0.25,
        control: None,
        aldous: None,
        ci_level: 0.95,
    }
}

fn advised_noise(advice: &Advice) -> Result<NoiseSpec> {
    NoiseSpec::new(advice.theta, advice.alpha, advice.case)
}

pub fn ac4_blowup_vs_taming(advice: &Advice) -> Check {
    Check::timed("AC-4", || {
        let t0 = Instant::now();
        let flag = deterministic_flag_time(1.0)?;
        let flag_ok = flag.is_some_and(|t| (0.9..=1.1).contains(&t));
        let cfg = burgers_ensemble(advised_noise(advice)?, 200, 4000, vec![BURGERS_CUTOFF]);
        let out = run_ensemble(&cfg, false)?;
        let b = &out.stats.blowups[0];
        let survived = 1.0 - b.p_hat();
        let secs = t0.elapsed().as_secs_f64();
        Ok((
            flag_ok && survived >= 0.8 && secs < 600.0,
            format!(
                "θ = 0 flagged at t = {}; θ = {:.3}, α = {:.3}: {:.1}% of {} paths reach T = 2 unflagged (need ≥ 80%)",
                flag.map_or("never".into(), |t| format!("{t:.4}")),
                advice.theta,
                advice.alpha,
                100.0 * survived,
                b.n
            ),
        ))
    })
}

/// Statistics of the AC-5 Burgers ensemble, reused by AC-6.
#[derive(Debug, Clone)]
pub struct Ac5Artifacts {
    pub burgers: SummaryStats,
}

fn rsw_case_ii() -> Result<(Advice, EnsembleConfig)> {
    let op = DriftOperator::new(ModelKind::RswInviscid, ModelParams::default())?;
    let mut audit = AuditConfig::for_operator(&op, 10, 200, 3);
    audit.ascent_starts = 2;
    audit.ascent_iters = 20;
    let k = assumption_audit(&op, &audit)?.constants;
    let advice = theta_advisor(CaseLabel::II, &k, 0.25)?;
    let cfg = EnsembleConfig {
        n_paths: 40,
        base_seed: 6000,
        d_list: vec![10],
        kind: ModelKind::RswInviscid,
        params: ModelParams::default(),
        dim: None,
        initial: InitialCondition::Geostrophic { depth: 1.0, amplitude: 0.05, decay: 5.5, seed: 1 },
        noise: Some(advised_noise(&advice)?),
        stepper: StepperConfig { scheme: Scheme::Milstein, t_end: 0.5, save_every: 50, ..Default::default() },
        k_grid: vec![0.01, 0.1, 1.0, 10.0, 100.0, 1e3, 1e4],
        epsilon: 0.25,
        control: None,
        aldous: None,
        ci_level: 0.95,
    };
    Ok((advice, cfg))
}

pub fn ac5_uniform_control(advice: &Advice) -> (Check, Option<Ac5Artifacts>) {
    let mut artifacts = None;
    let check = Check::timed("AC-5", || {
        let t0 = Instant::now();
        let mut cfg = burgers_ensemble(advised_noise(advice)?, 200, 5000, vec![8, 16, 32, 64]);
        cfg.stepper.resolution_tail = None;
        cfg.stepper.save_every = 10;
        cfg.k_grid = vec![1.0, 1.5, 2.0, 3.0, 5.0, 10.0, 20.0, 50.0, 100.0, 1e3, 1e4, 1e6];
        cfg.aldous = Some(AldousConfig {
            delta_grid: vec![0.001, 0.002, 0.005, 0.01, 0.02, 0.05, 0.1, 0.2],
            eta: None,
            pilot_paths: 16,
        });
        let out = run_ensemble(&cfg, false)?;
        let u = uniform_control_report(&out.stats, 0.1)?;
        let p = |t: &Option<crate::experiments::MannKendall>| t.as_ref().map_or(f64::NAN, |m| m.p_increasing);
        let (p1, p2) = (p(&u.sup.trend), p(&u.integral.trend));
        let burgers_ok = u.k1().is_some() && u.k2().is_some() && p1 > 0.05 && p2 > 0.05;

        let (rsw_advice, rsw_cfg) = rsw_case_ii()?;
        let rsw = run_ensemble(&rsw_cfg, false)?;
        let d_report = d_space_control_report(&rsw.stats, 0.1)?;
        let rsw_ok = !d_report.rows.is_empty();
        let secs = t0.elapsed().as_secs_f64();
        artifacts = Some(Ac5Artifacts { burgers: out.stats.clone() });
        let show = |k: Option<f64>| k.map_or("not attained".to_string(), |v| format!("{v}"));
        Ok((
            burgers_ok && rsw_ok && secs < 1800.0,
            format!(
                "Burgers d ∈ {{8,16,32,64}}: K₁ = {}, K₂ = {}, Mann–Kendall p = {:.3}, {:.3}, blow-ups {}; \
                 shallow water Case II (θ = {:.2}, α = {:.2}, 32²): 𝒟-norm report with {} rows, K = {}",
                show(u.k1()),
                show(u.k2()),
                p1,
                p2,
                out.stats.blowups.iter().map(pct).collect::<Vec<_>>().join(" "),
                rsw_advice.theta,
                rsw_advice.alpha,
                d_report.rows.len(),
                show(d_report.k_attained)
            ),
        ))
    });
    (check, artifacts)
}

pub fn ac6_aldous(stats: Option<&SummaryStats>) -> Check {
    Check::timed("AC-6", || {
        let stats = stats.ok_or_else(|| Error::Validation("the AC-5 ensemble did not run".into()))?;
        let table = aldous_table(stats, None)?;
        let smallest = stats.delta_grid.iter().cloned().fold(f64::INFINITY, f64::min);
        let rows: Vec<_> = stats.d_list.iter().filter_map(|&d| table.at(d, smallest)).collect();
        let below = rows.iter().all(|r| r.p_hat < 0.1);
        let lo = rows.iter().map(|r| r.ci_lo).fold(f64::NEG_INFINITY, f64::max);
        let hi = rows.iter().map(|r| r.ci_hi).fold(f64::INFINITY, f64::min);
        let overlap = lo <= hi;
        Ok((
            below && overlap && rows.len() == stats.d_list.len(),
            format!(
                "η = {:.4}; at δ = {smallest}: p̂ = [{}], CIs overlap: {overlap}",
                table.eta,
                rows.iter().map(|r| format!("{:.3}", r.p_hat)).collect::<Vec<_>>().join(", ")
            ),
        ))
    })
}

pub fn ac7_structural() -> Check {
    Check::timed("AC-7", || {
        let t0 = Instant::now();
        let checks = structural_suite();
        let failed: Vec<&str> = checks.iter().filter(|c| !c.pass).map(|c| c.id.as_str()).collect();
        let secs = t0.elapsed().as_secs_f64();
        Ok((
            failed.is_empty() && secs < 120.0,
            if failed.is_empty() {
                format!("{} structural checks pass", checks.len())
            } else {
                format!("failed: {}", failed.join(", "))
            },
        ))
    })
}

/// The Burgers control experiment: `0.5 sin x` at `n = 1024` with
/// `K = 0.13`, so `L_hi ≈ 0.54` sits below the pre-shock norm peak.
pub fn burgers_control_config(advice: &Advice, n_paths: usize) -> Result<EnsembleConfig> {
    let mut cfg = burgers_ensemble(advised_noise(advice)?, n_paths, 7000, vec![BURGERS_CUTOFF]);
    cfg.initial = InitialCondition::Sine { amplitude: 0.5, depth: 1.0 };
    cfg.stepper.save_every = 50;
    cfg.control = Some(ControlSchedule::new(CONTROL_K, 1.0)?);
    Ok(cfg)
}

pub fn ac8_control_schedule(advice: &Advice) -> Check {
    Check::timed("AC-8", || {
        let cfg = burgers_control_config(advice, 200)?;
        let sched = cfg.control.expect("control config");
        let out = run_ensemble(&cfg, true)?;
        let s = &out.stats;
        let alphas: Vec<f64> = out
            .records
            .iter()
            .filter_map(|(_, r)| validate_schedule(r, &sched).alpha)
            .collect();
        let alpha_ok = alphas.iter().all(|a| *a > 0.0) && s.min_dwell[0].is_some_and(|a| a > 0.0);
        let all_ok = s.schedule_ok[0].hits == s.schedule_ok[0].n && s.schedule_ok[0].n == cfg.n_paths as u64;
        let flag = deterministic_flag_time(0.5)?;
        Ok((
            all_ok && alpha_ok,
            format!(
                "{} schedules valid; dwell α min {:.4}, median {:.4}; paths with a (τ, ρ) pair and no flag {}; θ = 0 flagged at t = {}",
                pct(&s.schedule_ok[0]),
                s.min_dwell[0].unwrap_or(f64::NAN),
                median(&alphas).unwrap_or(f64::NAN),
                pct(&s.with_cycle[0]),
                flag.map_or("never".into(), |t| format!("{t:.4}"))
            ),
        ))
    })
}

/// Every acceptance criterion in order, one check per line item.
pub fn acceptance_suite() -> Vec<Check> {
    let mut out = ac1_gbm();
    out.push(ac2_exp_law());
    out.push(ac3_revuz_yor());
    match burgers_advice() {
        Ok((advice, _)) => {
            out.push(ac4_blowup_vs_taming(&advice));
            let (c5, art) = ac5_uniform_control(&advice);
            out.push(c5);
            out.push(ac6_aldous(art.as_ref().map(|a| &a.burgers)));
            out.push(ac7_structural());
            out.push(ac8_control_schedule(&advice));
        }
        Err(e) => {
            for id in ["AC-4", "AC-5", "AC-6"] {
                out.push(Check::new(id, false, format!("audit failed: {e}")));
            }
            out.push(ac7_structural());
            out.push(Check::new("AC-8", false, format!("audit failed: {e}")));
        }
    }
    out
}

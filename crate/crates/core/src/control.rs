//! Deterministic/stochastic switching on the `F0` norm.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrators::{
    Advance, Event, EventKind, PathRunner, ProjectedSde, Regime, StepperConfig, TrajectoryRecord,
};
use crate::noise::WienerPath;
use crate::spectral::SpectralField;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControlSchedule {
    /// Level `K`: the noise switches on at `φ = 2K` and off at `φ = K`.
    #[serde(rename = "K")]
    pub k: f64,
    #[serde(rename = "C", default = "one")]
    pub c: f64,
    /// Absolute band half-width for event norms; defaults to `1e-3·level`.
    #[serde(default)]
    pub tol: Option<f64>,
    /// After this long in one stochastic phase, `K` is doubled.
    #[serde(default)]
    pub max_stochastic_duration: Option<f64>,
}

fn one() -> f64 {
    1.0
}

impl ControlSchedule {
    pub fn new(k: f64, c: f64) -> Result<Self> {
        let s = ControlSchedule {
            k,
            c,
            tol: None,
            max_stochastic_duration: None,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::Parameter(format!("scale offset C must be positive, got {}", self.c)));
        }
        if !(self.k.is_finite() && self.k > 0.0 && self.k > self.c.ln()) {
            return Err(Error::Parameter(format!(
                "K = {} must exceed max(0, log C) so that L_lo < L_hi",
                self.k
            )));
        }
        if let Some(t) = self.tol {
            if !(t > 0.0) {
                return Err(Error::Parameter("tol must be positive".into()));
            }
        }
        if let Some(d) = self.max_stochastic_duration {
            if !(d > 0.0) {
                return Err(Error::Parameter("max_stochastic_duration must be positive".into()));
            }
        }
        Ok(())
    }

    pub fn l_hi(&self) -> f64 {
        self.levels_for(self.k).1
    }

    pub fn l_lo(&self) -> f64 {
        self.levels_for(self.k).0
    }

    /// `(φ⁻¹(K), φ⁻¹(2K))` for a given `K`.
    pub fn levels_for(&self, k: f64) -> (f64, f64) {
        (
            scale_inverse(k, self).unwrap_or(0.0),
            scale_inverse(2.0 * k, self).unwrap_or(0.0),
        )
    }

    pub fn tolerance(&self, level: f64) -> f64 {
        self.tol.unwrap_or(1e-3 * level)
    }
}

/// `φ(m) = log(C + m²)`.
pub fn scale_value(m: f64, sched: &ControlSchedule) -> Result<f64> {
    if !(m >= 0.0) || !m.is_finite() {
        return Err(Error::Domain(format!("scale_value needs a finite m >= 0, got {m}")));
    }
    Ok(sched.c.ln() + (m * m / sched.c).ln_1p())
}

pub fn scale_inverse(y: f64, sched: &ControlSchedule) -> Result<f64> {
    let lc = sched.c.ln();
    if !(y >= lc) || !y.is_finite() {
        return Err(Error::Domain(format!("scale_inverse needs y >= log C = {lc}, got {y}")));
    }
    Ok((sched.c * (y - lc).exp_m1()).sqrt())
}

/// Run the switching strategy up to `cfg.t_end`. The noise in `sys` is only
/// applied on stochastic phases.
pub fn control_run(
    x0: &SpectralField,
    sys: &ProjectedSde,
    sched: &ControlSchedule,
    cfg: &StepperConfig,
    wiener: WienerPath,
    epsilon: f64,
) -> Result<TrajectoryRecord> {
    sched.validate()?;
    if !sys.has_noise() {
        return Err(Error::Config("control_run needs a noise specification".into()));
    }
    let mut r = PathRunner::new(x0, sys, cfg, Some(wiener), epsilon)?;
    r.set_regime(Regime::Deterministic);
    let mut k = sched.k;
    let mut index = 0usize;
    let mut residual = f64::NEG_INFINITY;

    'outer: loop {
        let (_, l_hi) = sched.levels_for(k);
        while r.norm_f0() < l_hi {
            let above = move |n: f64| n >= l_hi;
            match r.advance(false, Some(&above))? {
                Advance::Stepped => {}
                Advance::Crossed => break,
                Advance::Finished | Advance::Blowup(_) => break 'outer,
            }
        }
        r.rec.events.push(Event {
            kind: EventKind::Tau,
            index,
            time: r.time(),
            norm: r.norm_f0(),
            level: l_hi,
        });
        r.set_regime(Regime::Stochastic);
        r.mark("tau");

        let t_tau = r.time();
        let phi_tau = (sched.c + r.envelope_sq()).ln();
        let y_tau = r.diagnostics().envelope();
        let mut phase_start = t_tau;
        loop {
            let (l_lo, _) = sched.levels_for(k);
            if r.norm_f0() <= l_lo {
                break;
            }
            let below = move |n: f64| n <= l_lo;
            let out = r.advance(true, Some(&below))?;
            if matches!(out, Advance::Stepped | Advance::Crossed) {
                let dt = r.time() - t_tau;
                if dt > 0.0 {
                    let phi = (sched.c + r.envelope_sq()).ln();
                    let dy = r.diagnostics().envelope() - y_tau;
                    residual = residual.max((phi - phi_tau - dy) / dt);
                }
            }
            match out {
                Advance::Stepped => {}
                Advance::Crossed => break,
                Advance::Finished | Advance::Blowup(_) => break 'outer,
            }
            if let Some(d) = sched.max_stochastic_duration {
                if r.time() - phase_start > d {
                    k *= 2.0;
                    phase_start = r.time();
                    r.rec.events.push(Event {
                        kind: EventKind::Escalate,
                        index,
                        time: r.time(),
                        norm: r.norm_f0(),
                        level: k,
                    });
                    r.mark("escalate");
                }
            }
        }
        let (l_lo, _) = sched.levels_for(k);
        r.rec.events.push(Event {
            kind: EventKind::Rho,
            index,
            time: r.time(),
            norm: r.norm_f0(),
            level: l_lo,
        });
        r.set_regime(Regime::Deterministic);
        r.mark("rho");
        index += 1;
        if r.finished() {
            break;
        }
    }
    let mut rec = r.finish();
    rec.envelope_residual = if residual.is_finite() { residual } else { 0.0 };
    Ok(rec)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub pass: bool,
    pub failures: Vec<String>,
    /// Shortest deterministic dwell `min_i (τ_i − ρ_{i−1})`, if any interval counts.
    pub alpha: Option<f64>,
    pub n_tau: usize,
    pub n_rho: usize,
}

/// Check alternation, ordering, level bands and regime labels of a control record.
pub fn validate_schedule(rec: &TrajectoryRecord, sched: &ControlSchedule) -> ValidationReport {
    let mut failures = Vec::new();
    let mut k = sched.k;
    let mut expect = EventKind::Tau;
    let mut index = 0usize;
    let mut last_rho = 0.0;
    let mut last_time = 0.0;
    let mut alpha: Option<f64> = None;
    let (mut n_tau, mut n_rho) = (0, 0);
    // stochastic intervals [τ_i, ρ_i)
    let mut intervals: Vec<(f64, f64)> = Vec::new();

    for (j, e) in rec.events.iter().enumerate() {
        if e.time < last_time {
            failures.push(format!("event {j}: time {} precedes {}", e.time, last_time));
        }
        last_time = last_time.max(e.time);
        if e.kind == EventKind::Escalate {
            if e.level <= k {
                failures.push(format!("event {j}: escalation does not raise K"));
            }
            k = e.level;
            continue;
        }
        if e.kind != expect {
            failures.push(format!("event {j}: expected {expect:?}, found {:?}", e.kind));
        }
        if e.index != index {
            failures.push(format!("event {j}: index {} where {index} was expected", e.index));
        }
        let (l_lo, l_hi) = sched.levels_for(k);
        match e.kind {
            EventKind::Tau => {
                n_tau += 1;
                if e.time < last_rho {
                    failures.push(format!("tau {}: before rho {}", e.index, e.index.wrapping_sub(1)));
                }
                let at_start = e.index == 0 && e.time == 0.0;
                let tol = sched.tolerance(l_hi);
                let in_band = (e.norm - l_hi).abs() <= tol;
                if !(in_band || (at_start && e.norm >= l_hi - tol)) {
                    failures.push(format!("tau {}: norm {} outside L_hi = {l_hi} ± {tol}", e.index, e.norm));
                }
                if !at_start {
                    let dwell = e.time - last_rho;
                    alpha = Some(alpha.map_or(dwell, |a: f64| a.min(dwell)));
                }
                intervals.push((e.time, f64::INFINITY));
                expect = EventKind::Rho;
            }
            EventKind::Rho => {
                n_rho += 1;
                let tol = sched.tolerance(l_lo);
                if (e.norm - l_lo).abs() > tol {
                    failures.push(format!("rho {}: norm {} outside L_lo = {l_lo} ± {tol}", e.index, e.norm));
                }
                if let Some(last) = intervals.last_mut() {
                    if e.time < last.0 {
                        failures.push(format!("rho {}: before its tau", e.index));
                    }
                    last.1 = e.time;
                }
                last_rho = e.time;
                index += 1;
                expect = EventKind::Tau;
            }
            EventKind::Escalate => unreachable!(),
        }
    }
    if let Some(a) = alpha {
        if !(a > 0.0) {
            failures.push(format!("dwell time {a} is not positive"));
        }
    }
    for row in &rec.rows {
        let stochastic = intervals.iter().any(|&(a, b)| row.t >= a && row.t < b);
        let want = if stochastic {
            Regime::Stochastic
        } else {
            Regime::Deterministic
        };
        // a blow-up row sits at the end of whatever phase was running
        if row.regime != want && !row.flags.contains("blowup") {
            failures.push(format!("row at t = {}: regime {:?}, expected {want:?}", row.t, row.regime));
            break;
        }
    }
    ValidationReport {
        pass: failures.is_empty(),
        failures,
        alpha,
        n_tau,
        n_rho,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrators::Scheme;
    use crate::models::{DriftOperator, ModelKind, ModelParams};
    use crate::noise::{CaseLabel, NoiseSpec};
    use crate::spectral::TorusGrid;

    fn sched() -> ControlSchedule {
        ControlSchedule::new(0.175, 1.0).unwrap()
    }

    #[test]
    fn scale_examples() {
        let s = sched();
        assert_eq!(scale_value(0.0, &s).unwrap(), 0.0);
        let m = (1f64.exp() - 1.0).sqrt();
        assert!((scale_value(m, &s).unwrap() - 1.0).abs() < 1e-15);
        assert!(scale_inverse(-0.1, &s).is_err());
        let s3 = ControlSchedule::new(2.0, 3.0).unwrap();
        assert!((scale_value(0.0, &s3).unwrap() - 3f64.ln()).abs() < 1e-15);
        assert!(s.l_lo() < s.l_hi());
        assert!((s.l_hi() - (0.35f64.exp() - 1.0).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn bad_levels_rejected() {
        assert!(ControlSchedule::new(0.0, 1.0).is_err());
        assert!(ControlSchedule::new(1.0, 10.0).is_err());
        assert!(ControlSchedule::new(1.0, 0.0).is_err());
    }

    fn heat() -> (SpectralField, ProjectedSde) {
        let g = TorusGrid::new(1, 16).unwrap();
        let x0 = SpectralField::from_fn(g, 1, |p| vec![0.3 * p[0].sin()]);
        let op = DriftOperator::new(ModelKind::Heat, ModelParams { nu: 1.0, ..Default::default() }).unwrap();
        let noise = NoiseSpec::new(1.0, 1.0, CaseLabel::I).unwrap();
        (x0, ProjectedSde::new(op, Some(noise), 5))
    }

    #[test]
    fn heat_needs_no_control() {
        let (x0, sys) = heat();
        let cfg = StepperConfig { t_end: 1.0, ..Default::default() };
        let rec = control_run(&x0, &sys, &sched(), &cfg, WienerPath::new(1, cfg.dt).unwrap(), 0.25).unwrap();
        assert!(rec.events.is_empty());
        assert!(rec.rows.iter().all(|r| r.regime == Regime::Deterministic));
        let v = validate_schedule(&rec, &sched());
        assert!(v.pass && v.alpha.is_none());
    }

    #[test]
    fn start_above_level_is_tau_zero() {
        let (x0, sys) = heat();
        let x0 = x0.scaled(5.0);
        let cfg = StepperConfig { t_end: 0.5, ..Default::default() };
        let rec = control_run(&x0, &sys, &sched(), &cfg, WienerPath::new(3, cfg.dt).unwrap(), 0.25).unwrap();
        let e = rec.events[0];
        assert_eq!((e.kind, e.index, e.time), (EventKind::Tau, 0, 0.0));
        let v = validate_schedule(&rec, &sched());
        assert!(v.pass, "{:?}", v.failures);
    }

    #[test]
    fn inverted_events_fail() {
        let s = sched();
        let mk = |kind, index, time, level| Event { kind, index, time, norm: level, level };
        let rec = TrajectoryRecord {
            events: vec![
                mk(EventKind::Tau, 0, 0.5, s.l_hi()),
                mk(EventKind::Rho, 0, 0.3, s.l_lo()),
            ],
            ..Default::default()
        };
        let v = validate_schedule(&rec, &s);
        assert!(!v.pass);
        assert!(v.failures[0].starts_with("event 1"));
    }

    #[test]
    fn burgers_control_cycles() {
        let g = TorusGrid::new(1, 256).unwrap();
        let x0 = SpectralField::from_fn(g, 1, |p| vec![0.5 * p[0].sin()]);
        let op = DriftOperator::new(ModelKind::Burgers1d, ModelParams::default()).unwrap();
        let noise = NoiseSpec::new(6.0, 1.0, CaseLabel::I).unwrap();
        let sys = ProjectedSde::new(op, Some(noise), 85);
        let cfg = StepperConfig {
            scheme: Scheme::TamedEulerMaruyama,
            t_end: 2.0,
            resolution_tail: Some(1e-3),
            ..Default::default()
        };
        let s = sched();
        let rec = control_run(&x0, &sys, &s, &cfg, WienerPath::new(11, cfg.dt).unwrap(), 0.25).unwrap();
        assert!(rec.events_of(EventKind::Tau).count() >= 1);
        let v = validate_schedule(&rec, &s);
        assert!(v.pass, "{:?}", v.failures);
        assert!(rec.envelope_residual.is_finite());
    }
}

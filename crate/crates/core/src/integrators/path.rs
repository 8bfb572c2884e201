use super::config::{Scheme, StepperConfig};
use super::record::{BlowupReason, Regime, TrajectoryRecord, TrajectoryRow};
use super::steppers::{envelope_norm_sq, step, ProjectedSde};
use crate::error::{Error, Result};
use crate::noise::{track_martingale, CaseLabel, MartingaleDiagnostics, WienerPath, TICKS_PER_STEP};
use crate::spectral::{Space, SpectralField};

/// Offset `C` of the log-norm envelope `log(C + ‖X‖²)`.
pub const ENVELOPE_OFFSET: f64 = 1.0;

/// Share of `‖X‖²_F0` carried by modes with `|k|_∞ > 2·cutoff/3`.
pub fn resolution_tail_share(x: &SpectralField, s_f0: f64, cutoff: usize) -> f64 {
    let g = x.grid();
    let w = g.weights(s_f0);
    let edge = (2 * cutoff) as f64 / 3.0;
    let (mut tail, mut total) = (0.0, 0.0);
    for c in x.comps() {
        for (i, v) in c.iter().enumerate() {
            let e = w[i] * v.norm_sqr();
            total += e;
            if g.kmax(i) as f64 > edge {
                tail += e;
            }
        }
    }
    if total == 0.0 {
        0.0
    } else {
        tail / total
    }
}

/// Result of one adaptive step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Advance {
    Stepped,
    /// The step was shortened to end just past the requested level crossing.
    Crossed,
    Finished,
    Blowup(BlowupReason),
}

/// Owns one path: state, Brownian path, diagnostics and record.
pub struct PathRunner<'a> {
    pub sys: &'a ProjectedSde,
    pub cfg: &'a StepperConfig,
    wiener: Option<WienerPath>,
    x: SpectralField,
    tick: u64,
    end_tick: u64,
    level: u32,
    max_level: u32,
    norms: [f64; 4],
    env_sq: f64,
    threshold: f64,
    diag: MartingaleDiagnostics,
    env_space: Space,
    pub rec: TrajectoryRecord,
    pub regime: Regime,
    steps_since_save: u64,
}

impl<'a> PathRunner<'a> {
    pub fn new(
        x0: &SpectralField,
        sys: &'a ProjectedSde,
        cfg: &'a StepperConfig,
        wiener: Option<WienerPath>,
        epsilon: f64,
    ) -> Result<Self> {
        sys.op.check_field(x0)?;
        if !x0.is_finite() {
            return Err(Error::NonFinite("initial condition"));
        }
        let x = sys.project(x0)?;
        let norms = sys.op.ladder.norms(&x)?;
        cfg.validate(norms[1])?;
        if sys.has_noise() && wiener.is_none() {
            return Err(Error::Config("a noisy run needs a Wiener path".into()));
        }
        if let Some(w) = &wiener {
            if w.dt_base() != cfg.dt {
                return Err(Error::Config("Wiener path and stepper disagree on dt".into()));
            }
        }
        let case = sys.noise.map(|n| n.case).unwrap_or(CaseLabel::I);
        let env_space = case.envelope_space();
        let max_level = (cfg.dt / cfg.dt_min()).log2().floor().max(0.0) as u32;
        let end_tick = (cfg.t_end / cfg.dt * TICKS_PER_STEP as f64).round() as u64;
        let env_sq = envelope_norm_sq(&x, sys, env_space)?;
        let mut r = PathRunner {
            sys,
            cfg,
            wiener,
            x,
            tick: 0,
            end_tick,
            level: 0,
            max_level,
            norms,
            env_sq,
            threshold: cfg.threshold(norms[1]),
            diag: MartingaleDiagnostics::new(epsilon)?,
            env_space,
            rec: TrajectoryRecord {
                sup_f0sq: norms[1] * norms[1],
                sup_dsq: norms[3] * norms[3],
                min_f0: norms[1],
                ..Default::default()
            },
            regime: if sys.has_noise() {
                Regime::Stochastic
            } else {
                Regime::Deterministic
            },
            steps_since_save: 0,
        };
        r.rec.seed = r.wiener.as_ref().map(|w| w.seed());
        r.push_row(String::new());
        if cfg.keep_snapshots {
            r.rec.snapshots.push((0.0, r.x.clone()));
        }
        Ok(r)
    }

    pub fn state(&self) -> &SpectralField {
        &self.x
    }

    pub fn time(&self) -> f64 {
        self.tick as f64 / TICKS_PER_STEP as f64 * self.cfg.dt
    }

    pub fn norm_f0(&self) -> f64 {
        self.norms[1]
    }

    pub fn norms(&self) -> [f64; 4] {
        self.norms
    }

    /// `‖X‖²` in the space driving the martingale envelope.
    pub fn envelope_sq(&self) -> f64 {
        self.env_sq
    }

    pub fn set_regime(&mut self, regime: Regime) {
        self.regime = regime;
        let t = self.time();
        if let Some(last) = self.rec.rows.last_mut() {
            if last.t == t {
                last.regime = regime;
            }
        }
    }

    pub fn diagnostics(&self) -> MartingaleDiagnostics {
        self.diag
    }

    pub fn finished(&self) -> bool {
        self.tick >= self.end_tick || self.rec.blowup.is_some()
    }

    fn push_row(&mut self, flags: String) {
        let [g, f0, f1, d] = self.norms;
        let mut flags = flags;
        if self.sys.op.positivity_violated(&self.x) {
            self.rec.positivity_warnings += 1;
            if !flags.is_empty() {
                flags.push('|');
            }
            flags.push_str("h_nonpositive");
        }
        let t = self.time();
        if let Some(last) = self.rec.rows.last_mut() {
            if last.t == t {
                // same instant: keep one row, merge flags
                if !flags.is_empty() {
                    if !last.flags.is_empty() {
                        last.flags.push('|');
                    }
                    last.flags.push_str(&flags);
                }
                last.regime = self.regime;
                return;
            }
        }
        self.rec.rows.push(TrajectoryRow {
            t,
            norm_g: g,
            norm_f0: f0,
            norm_f1: f1,
            norm_d: d,
            int_f1sq: self.rec.int_f1sq,
            regime: self.regime,
            m: self.diag.m,
            qv: self.diag.qv,
            flags,
        });
    }

    /// Save a row at the current time (used at regime switches).
    pub fn mark(&mut self, flag: &str) {
        self.push_row(flag.to_string());
    }

    fn step_ticks(&self) -> u64 {
        let h = TICKS_PER_STEP >> self.level;
        let to_boundary = TICKS_PER_STEP - self.tick % TICKS_PER_STEP;
        h.min(to_boundary).min(self.end_tick - self.tick)
    }

    fn candidate(&mut self, h: u64, noisy: bool, scheme: Scheme) -> Result<(SpectralField, f64)> {
        let dt = h as f64 / TICKS_PER_STEP as f64 * self.cfg.dt;
        let dw = match (&mut self.wiener, noisy && self.sys.has_noise()) {
            (Some(w), true) => w.increment(self.tick, self.tick + h),
            _ => 0.0,
        };
        let scheme = if noisy { scheme } else { Scheme::Rk4Deterministic };
        Ok((step(scheme, &self.x, self.sys, dw, dt)?, dw))
    }

    fn commit(&mut self, y: SpectralField, h: u64, dw: f64, noisy: bool) -> Result<Option<BlowupReason>> {
        let dt = h as f64 / TICKS_PER_STEP as f64 * self.cfg.dt;
        if noisy && self.sys.has_noise() {
            let b = self.sys.noise_factor(&self.x)?;
            let coef = 2.0 * b * self.env_sq / (ENVELOPE_OFFSET + self.env_sq);
            self.diag = track_martingale(self.diag, coef * dw, coef * coef * dt)?;
            self.rec.e_record = self.diag.e_record;
        }
        let new_norms = self.sys.op.ladder.norms(&y)?;
        self.rec.int_f1sq += 0.5 * dt * (self.norms[2].powi(2) + new_norms[2].powi(2));
        self.x = y;
        self.norms = new_norms;
        self.env_sq = envelope_norm_sq(&self.x, self.sys, self.env_space)?;
        self.tick += h;
        self.rec.accepted_steps += 1;
        self.rec.sup_f0sq = self.rec.sup_f0sq.max(new_norms[1].powi(2));
        self.rec.sup_dsq = self.rec.sup_dsq.max(new_norms[3].powi(2));
        self.rec.min_f0 = self.rec.min_f0.min(new_norms[1]);
        if let Some(w) = &mut self.wiener {
            if self.tick % TICKS_PER_STEP == 0 {
                w.prune_before(self.tick);
            }
        }
        if self.level > 0 && self.tick % (TICKS_PER_STEP >> (self.level - 1)) == 0 {
            self.level -= 1;
        }
        if new_norms[1] >= self.threshold {
            return Ok(Some(BlowupReason::Threshold));
        }
        if let Some(tol) = self.cfg.resolution_tail {
            let share = resolution_tail_share(&self.x, self.sys.op.ladder.s_f0, self.sys.projector.cutoff);
            if share > tol {
                return Ok(Some(BlowupReason::ResolutionLoss));
            }
        }
        if self.tick % TICKS_PER_STEP == 0 {
            self.steps_since_save += 1;
            if self.steps_since_save as usize >= self.cfg.save_every {
                self.steps_since_save = 0;
                self.push_row(String::new());
                if self.cfg.keep_snapshots {
                    self.rec.snapshots.push((self.time(), self.x.clone()));
                }
            }
        }
        Ok(None)
    }

    fn flag_blowup(&mut self, reason: BlowupReason) -> Advance {
        self.rec.blowup = Some((self.time(), reason));
        self.push_row(format!("blowup:{}", reason.as_str()));
        Advance::Blowup(reason)
    }

    /// One accepted step with adaptive halving. With `crossing`, a step whose
    /// end state satisfies the predicate (on `‖X‖_F0`) is shortened by
    /// bisection to the first crossing within `dt_min`.
    pub fn advance(
        &mut self,
        noisy: bool,
        crossing: Option<&dyn Fn(f64) -> bool>,
    ) -> Result<Advance> {
        if self.rec.blowup.is_some() {
            return Ok(Advance::Blowup(self.rec.blowup.unwrap().1));
        }
        if self.tick >= self.end_tick {
            return Ok(Advance::Finished);
        }
        let scheme = self.cfg.scheme;
        loop {
            let h = self.step_ticks();
            let cand = self.candidate(h, noisy, scheme);
            let ok = match &cand {
                Ok((y, _)) => {
                    let n0 = self.sys.op.ladder.norm(y, Space::F0)?;
                    let base = self.norms[1];
                    let growth = if base > 0.0 { (n0 - base) / base } else { 0.0 };
                    !(self.cfg.adapt && growth > self.cfg.growth_trigger)
                }
                Err(Error::NonFinite(_)) => false,
                Err(_) => {
                    return Err(cand.err().unwrap());
                }
            };
            if !ok {
                let can_halve = self.cfg.adapt && self.level < self.max_level && h > 1;
                if can_halve {
                    self.level += 1;
                    self.rec.rejected_steps += 1;
                    continue;
                }
                let reason = if cand.is_err() {
                    BlowupReason::NonFinite
                } else {
                    BlowupReason::DtMin
                };
                return Ok(self.flag_blowup(reason));
            }
            let (mut y, mut dw) = cand.unwrap();
            let mut h_used = h;
            let mut crossed = false;
            if let Some(pred) = crossing {
                if pred(self.sys.op.ladder.norm(&y, Space::F0)?) {
                    crossed = true;
                    let min_ticks = ((self.cfg.dt_min() / self.cfg.dt) * TICKS_PER_STEP as f64)
                        .ceil()
                        .max(1.0) as u64;
                    let (mut lo, mut hi) = (0u64, h);
                    while hi - lo > min_ticks {
                        let mid = lo + (hi - lo) / 2;
                        let (ym, dwm) = self.candidate(mid, noisy, scheme)?;
                        if pred(self.sys.op.ladder.norm(&ym, Space::F0)?) {
                            hi = mid;
                            y = ym;
                            dw = dwm;
                        } else {
                            lo = mid;
                        }
                    }
                    h_used = hi;
                }
            }
            if let Some(reason) = self.commit(y, h_used, dw, noisy)? {
                return Ok(self.flag_blowup(reason));
            }
            if self.tick >= self.end_tick {
                self.push_row(String::new());
                if self.cfg.keep_snapshots
                    && self.rec.snapshots.last().map(|s| s.0) != Some(self.time())
                {
                    self.rec.snapshots.push((self.time(), self.x.clone()));
                }
            }
            return Ok(if crossed { Advance::Crossed } else { Advance::Stepped });
        }
    }

    pub fn finish(self) -> TrajectoryRecord {
        self.rec
    }
}

/// Integrate from `x0` to `cfg.t_end` or blow-up. Noise needs a Wiener path.
pub fn integrate_path(
    x0: &SpectralField,
    sys: &ProjectedSde,
    cfg: &StepperConfig,
    wiener: Option<WienerPath>,
    epsilon: f64,
) -> Result<TrajectoryRecord> {
    let noisy = sys.has_noise();
    let mut r = PathRunner::new(x0, sys, cfg, wiener, epsilon)?;
    while !r.finished() {
        r.advance(noisy, None)?;
    }
    Ok(r.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{DriftOperator, ModelKind, ModelParams};
    use crate::noise::NoiseSpec;
    use crate::spectral::TorusGrid;

    fn heat_sys() -> ProjectedSde {
        let op = DriftOperator::new(ModelKind::Heat, ModelParams { nu: 1.0, ..Default::default() }).unwrap();
        ProjectedSde::new(op, None, 5)
    }

    #[test]
    fn heat_decay() {
        let g = TorusGrid::new(1, 16).unwrap();
        let x0 = SpectralField::from_fn(g, 1, |p| vec![p[0].sin()]);
        let sys = heat_sys();
        let cfg = StepperConfig {
            scheme: Scheme::Rk4Deterministic,
            t_end: 1.0,
            ..Default::default()
        };
        let rec = integrate_path(&x0, &sys, &cfg, None, 0.25).unwrap();
        let last = rec.final_row().unwrap();
        assert!((last.t - 1.0).abs() < 1e-12);
        let want = 0.5f64.sqrt() * (-1.0f64).exp();
        assert!((last.norm_g - want).abs() < 1e-8);
        assert!(rec.blowup.is_none());
        for w in rec.rows.windows(2) {
            assert!(w[1].t > w[0].t);
            assert!(w[1].int_f1sq >= w[0].int_f1sq);
        }
    }

    #[test]
    fn zero_horizon() {
        let g = TorusGrid::new(1, 16).unwrap();
        let x0 = SpectralField::from_fn(g, 1, |p| vec![p[0].sin()]);
        let sys = heat_sys();
        let cfg = StepperConfig {
            t_end: 0.0,
            ..Default::default()
        };
        let rec = integrate_path(&x0, &sys, &cfg, None, 0.25).unwrap();
        assert_eq!(rec.rows.len(), 1);
    }

    #[test]
    fn reproducible_with_noise() {
        let g = TorusGrid::new(1, 32).unwrap();
        let x0 = SpectralField::from_fn(g, 1, |p| vec![0.5 * p[0].sin()]);
        let op = DriftOperator::new(ModelKind::Burgers1d, ModelParams::default()).unwrap();
        let sys = ProjectedSde::new(op, Some(NoiseSpec::new(2.0, 1.0, CaseLabel::I).unwrap()), 10);
        let cfg = StepperConfig {
            t_end: 0.5,
            ..Default::default()
        };
        let run = || {
            integrate_path(&x0, &sys, &cfg, Some(WienerPath::new(17, cfg.dt).unwrap()), 0.25).unwrap()
        };
        let (a, b) = (run(), run());
        assert_eq!(a, b);
        assert!(a.rows.last().unwrap().qv > 0.0);
    }

    #[test]
    fn noisy_run_requires_path() {
        let g = TorusGrid::new(1, 32).unwrap();
        let x0 = SpectralField::from_fn(g, 1, |p| vec![p[0].sin()]);
        let op = DriftOperator::new(ModelKind::Burgers1d, ModelParams::default()).unwrap();
        let sys = ProjectedSde::new(op, Some(NoiseSpec::new(2.0, 1.0, CaseLabel::I).unwrap()), 10);
        let cfg = StepperConfig::default();
        assert!(integrate_path(&x0, &sys, &cfg, None, 0.25).is_err());
    }

    #[test]
    fn inviscid_burgers_flags_near_shock_time() {
        let g = TorusGrid::new(1, 1024).unwrap();
        let x0 = SpectralField::from_fn(g, 1, |p| vec![p[0].sin()]);
        let op = DriftOperator::new(ModelKind::Burgers1d, ModelParams::default()).unwrap();
        let sys = ProjectedSde::new(op, None, 341);
        let cfg = StepperConfig {
            scheme: Scheme::Rk4Deterministic,
            t_end: 2.0,
            save_every: 100,
            resolution_tail: Some(1e-3),
            ..Default::default()
        };
        let rec = integrate_path(&x0, &sys, &cfg, None, 0.25).unwrap();
        let (t, _) = rec.blowup.expect("no blow-up flagged");
        assert!((0.9..=1.1).contains(&t), "flagged at {t}");
    }
}

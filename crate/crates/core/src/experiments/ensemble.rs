use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::initial::InitialCondition;
use super::stats::{mann_kendall, median, Counts, MannKendall};
use crate::control::{control_run, validate_schedule, ControlSchedule};
use crate::error::{Error, Result};
use crate::integrators::{integrate_path, ProjectedSde, StepperConfig, TrajectoryRecord};
use crate::models::{DriftOperator, ModelKind, ModelParams};
use crate::noise::{NoiseSpec, WienerPath};
use crate::spectral::{galerkin_grid_for, Space, SpectralField, TorusGrid};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AldousConfig {
    pub delta_grid: Vec<f64>,
    /// Increment threshold; `None` takes the pooled median increment at the
    /// largest δ.
    #[serde(default)]
    pub eta: Option<f64>,
    /// Paths used to fix the hitting level, per cutoff.
    #[serde(default = "pilot_default")]
    pub pilot_paths: usize,
}

fn pilot_default() -> usize {
    16
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleConfig {
    pub n_paths: usize,
    pub base_seed: u64,
    pub d_list: Vec<usize>,
    pub kind: ModelKind,
    #[serde(default)]
    pub params: ModelParams,
    /// Spatial dimension for the dimension-free test drifts.
    #[serde(default)]
    pub dim: Option<usize>,
    pub initial: InitialCondition,
    pub noise: Option<NoiseSpec>,
    pub stepper: StepperConfig,
    pub k_grid: Vec<f64>,
    pub epsilon: f64,
    #[serde(default)]
    pub control: Option<ControlSchedule>,
    #[serde(default)]
    pub aldous: Option<AldousConfig>,
    #[serde(default = "level_default")]
    pub ci_level: f64,
}

fn level_default() -> f64 {
    0.95
}

impl EnsembleConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_paths == 0 {
            return Err(Error::Config("n_paths must be positive".into()));
        }
        if self.d_list.is_empty() || self.d_list.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("d_list must be non-empty and increasing".into()));
        }
        if self.k_grid.is_empty() || self.k_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("k_grid must be non-empty and increasing".into()));
        }
        if !(self.ci_level > 0.0 && self.ci_level < 1.0) {
            return Err(Error::Config("ci_level must lie in (0, 1)".into()));
        }
        if let Some(a) = &self.aldous {
            let max = a.delta_grid.iter().cloned().fold(0.0, f64::max);
            if a.delta_grid.is_empty() || a.delta_grid.iter().any(|d| !(*d > 0.0)) {
                return Err(Error::Config("delta_grid must hold positive values".into()));
            }
            if max > 0.5 * self.stepper.t_end {
                return Err(Error::Config(format!("largest δ = {max} exceeds T/2")));
            }
        }
        if self.control.is_some() && self.noise.is_none() {
            return Err(Error::Config("control runs need a noise section".into()));
        }
        Ok(())
    }

    pub fn dim(&self) -> Result<usize> {
        self.kind
            .dim()
            .or(self.dim)
            .ok_or_else(|| Error::Config(format!("{:?} needs an explicit dim", self.kind)))
    }

    pub fn operator(&self) -> Result<DriftOperator> {
        DriftOperator::new(self.kind, self.params.clone())
    }

    /// Grid and projected system for one cutoff.
    pub fn system(&self, d: usize) -> Result<(TorusGrid, ProjectedSde)> {
        let grid = TorusGrid::new(self.dim()?, galerkin_grid_for(d))?;
        Ok((grid, ProjectedSde::new(self.operator()?, self.noise, d)))
    }
}

/// What one path contributes to the statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathSummary {
    pub d: usize,
    pub seed: u64,
    /// Infinite for paths that blew up.
    pub sup_f0sq: f64,
    pub int_f1sq: f64,
    pub sup_dsq: f64,
    pub blew_up: bool,
    pub e_record: f64,
    pub schedule_ok: Option<bool>,
    pub dwell: Option<f64>,
    /// Number of completed (tau, rho) pairs of a control run.
    pub control_cycles: usize,
    /// `sup_{θ≤δ} ‖X_{τ+θ} - X_τ‖_G` per δ of the Aldous grid.
    pub increments: Vec<f64>,
}

/// Aggregated ensemble statistics. Every field merges by addition or
/// concatenation, so the fold order does not matter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub d_list: Vec<usize>,
    pub k_grid: Vec<f64>,
    pub ci_level: f64,
    /// `[d][K]`: `sup_t ‖X‖²_F0 ≥ K`.
    pub sup_f0: Vec<Vec<Counts>>,
    /// `[d][K]`: `∫ ‖X‖²_F1 ≥ K`.
    pub int_f1: Vec<Vec<Counts>>,
    /// `[d][K]`: `sup_t ‖X‖²_D ≥ K`.
    pub sup_d: Vec<Vec<Counts>>,
    pub blowups: Vec<Counts>,
    /// Paths lost to numeric errors, per `d`; excluded from the counts.
    pub failures: Vec<u64>,
    /// Sorted `E(ε)` values per `d`.
    pub e_records: Vec<Vec<f64>>,
    pub schedule_ok: Vec<Counts>,
    pub min_dwell: Vec<Option<f64>>,
    pub with_cycle: Vec<Counts>,
    pub delta_grid: Vec<f64>,
    /// `[d][path][δ]`.
    pub increments: Vec<Vec<Vec<f64>>>,
}

impl SummaryStats {
    pub fn empty(d_list: &[usize], k_grid: &[f64], delta_grid: &[f64], ci_level: f64) -> Self {
        let nd = d_list.len();
        let grid = || vec![vec![Counts::default(); k_grid.len()]; nd];
        SummaryStats {
            d_list: d_list.to_vec(),
            k_grid: k_grid.to_vec(),
            ci_level,
            sup_f0: grid(),
            int_f1: grid(),
            sup_d: grid(),
            blowups: vec![Counts::default(); nd],
            failures: vec![0; nd],
            e_records: vec![Vec::new(); nd],
            schedule_ok: vec![Counts::default(); nd],
            min_dwell: vec![None; nd],
            with_cycle: vec![Counts::default(); nd],
            delta_grid: delta_grid.to_vec(),
            increments: vec![Vec::new(); nd],
        }
    }

    fn slot(&self, d: usize) -> Result<usize> {
        self.d_list
            .iter()
            .position(|&x| x == d)
            .ok_or_else(|| Error::Config(format!("cutoff {d} not in d_list")))
    }

    pub fn push(&mut self, p: &PathSummary) -> Result<()> {
        let j = self.slot(p.d)?;
        for (i, &k) in self.k_grid.iter().enumerate() {
            self.sup_f0[j][i].push(p.blew_up || p.sup_f0sq >= k);
            self.int_f1[j][i].push(p.blew_up || p.int_f1sq >= k);
            self.sup_d[j][i].push(p.blew_up || p.sup_dsq >= k);
        }
        self.blowups[j].push(p.blew_up);
        let e = &mut self.e_records[j];
        let at = e.partition_point(|v| v.total_cmp(&p.e_record).is_lt());
        e.insert(at, p.e_record);
        if let Some(ok) = p.schedule_ok {
            self.schedule_ok[j].push(ok);
            self.with_cycle[j].push(p.control_cycles > 0 && !p.blew_up);
        }
        if let Some(a) = p.dwell {
            self.min_dwell[j] = Some(self.min_dwell[j].map_or(a, |m: f64| m.min(a)));
        }
        if !p.increments.is_empty() {
            self.increments[j].push(p.increments.clone());
        }
        Ok(())
    }

    pub fn push_failure(&mut self, d: usize) -> Result<()> {
        let j = self.slot(d)?;
        self.failures[j] += 1;
        Ok(())
    }

    /// Combine statistics of disjoint path sets on the same grids.
    pub fn merge(&self, other: &SummaryStats) -> Result<SummaryStats> {
        if self.d_list != other.d_list || self.k_grid != other.k_grid || self.delta_grid != other.delta_grid {
            return Err(Error::Config("cannot merge statistics on different grids".into()));
        }
        let add = |a: &Vec<Vec<Counts>>, b: &Vec<Vec<Counts>>| {
            a.iter()
                .zip(b)
                .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p.merge(*q)).collect())
                .collect()
        };
        let add1 = |a: &Vec<Counts>, b: &Vec<Counts>| a.iter().zip(b).map(|(p, q)| p.merge(*q)).collect();
        let mut incs = self.increments.clone();
        for (a, b) in incs.iter_mut().zip(&other.increments) {
            a.extend(b.iter().cloned());
            a.sort_by(|x, y| x.iter().zip(y).map(|(p, q)| p.total_cmp(q)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal));
        }
        Ok(SummaryStats {
            d_list: self.d_list.clone(),
            k_grid: self.k_grid.clone(),
            ci_level: self.ci_level,
            sup_f0: add(&self.sup_f0, &other.sup_f0),
            int_f1: add(&self.int_f1, &other.int_f1),
            sup_d: add(&self.sup_d, &other.sup_d),
            blowups: add1(&self.blowups, &other.blowups),
            failures: self.failures.iter().zip(&other.failures).map(|(a, b)| a + b).collect(),
            e_records: self
                .e_records
                .iter()
                .zip(&other.e_records)
                .map(|(a, b)| {
                    let mut v: Vec<f64> = a.iter().chain(b).cloned().collect();
                    v.sort_by(f64::total_cmp);
                    v
                })
                .collect(),
            schedule_ok: add1(&self.schedule_ok, &other.schedule_ok),
            min_dwell: self
                .min_dwell
                .iter()
                .zip(&other.min_dwell)
                .map(|(a, b)| match (a, b) {
                    (Some(x), Some(y)) => Some(x.min(*y)),
                    (x, None) => *x,
                    (None, y) => *y,
                })
                .collect(),
            with_cycle: add1(&self.with_cycle, &other.with_cycle),
            delta_grid: self.delta_grid.clone(),
            increments: incs,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleOutput {
    pub stats: SummaryStats,
    /// Per-path records in `(d, seed)` order, when requested.
    pub records: Vec<(usize, TrajectoryRecord)>,
}

/// First saved time the `𝓕₀` norm reaches `level` from its starting side,
/// capped at `cap`.
fn hitting_time(rows: &[crate::integrators::TrajectoryRow], level: f64, cap: f64) -> f64 {
    let above = rows.first().is_some_and(|r| r.norm_f0 >= level);
    for r in rows {
        if r.t > cap {
            return cap;
        }
        if (r.norm_f0 >= level) != above {
            return r.t;
        }
    }
    cap
}

struct PathRun {
    summary: PathSummary,
    record: TrajectoryRecord,
}

fn run_one(
    cfg: &EnsembleConfig,
    sys: &ProjectedSde,
    x0: &SpectralField,
    d: usize,
    seed: u64,
    stepper: &StepperConfig,
) -> Result<PathRun> {
    let wiener = sys.noise.map(|_| WienerPath::new(seed, stepper.dt)).transpose()?;
    let (record, schedule) = match (&cfg.control, wiener) {
        (Some(sched), Some(w)) => {
            let rec = control_run(x0, sys, sched, stepper, w, cfg.epsilon)?;
            let v = validate_schedule(&rec, sched);
            (rec, Some(v))
        }
        (_, w) => (integrate_path(x0, sys, stepper, w, cfg.epsilon)?, None),
    };
    let blew_up = record.blew_up();
    let inf_if = |v: f64| if blew_up { f64::INFINITY } else { v };
    Ok(PathRun {
        summary: PathSummary {
            d,
            seed,
            sup_f0sq: inf_if(record.sup_f0sq),
            int_f1sq: inf_if(record.int_f1sq),
            sup_dsq: inf_if(record.sup_dsq),
            blew_up,
            e_record: record.e_record,
            schedule_ok: schedule.as_ref().map(|v| v.pass),
            dwell: schedule.as_ref().and_then(|v| v.alpha),
            control_cycles: schedule.as_ref().map_or(0, |v| v.n_rho),
            increments: Vec::new(),
        },
        record,
    })
}

/// Increments `sup_{θ≤δ} ‖X_{τ+θ} − X_τ‖_G` from per-step snapshots.
fn increments_after(
    rec: &TrajectoryRecord,
    sys: &ProjectedSde,
    tau: usize,
    deltas: &[f64],
    dt: f64,
) -> Result<Vec<f64>> {
    let snaps = &rec.snapshots;
    if tau >= snaps.len() {
        // the path died before τ
        return Ok(vec![f64::INFINITY; deltas.len()]);
    }
    let (t0, base) = (&snaps[tau].0, &snaps[tau].1);
    let t0 = *t0;
    deltas
        .iter()
        .map(|&delta| {
            if rec.blowup.is_some_and(|(tb, _)| tb <= t0 + delta) {
                return Ok(f64::INFINITY);
            }
            let mut sup = 0.0f64;
            for (t, x) in &snaps[tau + 1..] {
                if *t > t0 + delta + 0.5 * dt {
                    break;
                }
                sup = sup.max(sys.op.ladder.norm(&x.sub(base), Space::G)?);
            }
            Ok(sup)
        })
        .collect()
}

/// Run every path at every cutoff. Path `i` uses seed `base_seed + i` at all
/// cutoffs, so cutoffs are compared on common noise.
pub fn run_ensemble(cfg: &EnsembleConfig, keep_records: bool) -> Result<EnsembleOutput> {
    cfg.validate()?;
    let deltas = cfg.aldous.as_ref().map(|a| a.delta_grid.clone()).unwrap_or_default();
    let mut stats = SummaryStats::empty(&cfg.d_list, &cfg.k_grid, &deltas, cfg.ci_level);
    let mut records = Vec::new();
    for &d in &cfg.d_list {
        let (grid, sys) = cfg.system(d)?;
        let x0 = cfg.initial.build(&sys.op, grid, d)?;
        let mut stepper = cfg.stepper.clone();
        let mut level = None;
        if let Some(a) = &cfg.aldous {
            stepper.save_every = 1;
            stepper.keep_snapshots = true;
            // pilot paths on seeds disjoint from the ensemble
            let pilot: Vec<Vec<f64>> = (0..a.pilot_paths as u64)
                .into_par_iter()
                .map(|i| {
                    let seed = cfg.base_seed.wrapping_add(cfg.n_paths as u64 + i);
                    let r = run_one(cfg, &sys, &x0, d, seed, &stepper)?;
                    Ok(r.record
                        .rows
                        .iter()
                        .filter(|row| row.t <= 0.5 * stepper.t_end)
                        .map(|row| row.norm_f0)
                        .collect())
                })
                .collect::<Result<_>>()?;
            let all: Vec<f64> = pilot.into_iter().flatten().collect();
            level = median(&all);
        }
        let runs: Vec<Result<PathRun>> = (0..cfg.n_paths as u64)
            .into_par_iter()
            .map(|i| {
                let seed = cfg.base_seed.wrapping_add(i);
                let mut r = run_one(cfg, &sys, &x0, d, seed, &stepper)?;
                if let Some(lvl) = level {
                    let half = 0.5 * stepper.t_end;
                    let t_tau = if i % 2 == 0 {
                        hitting_time(&r.record.rows, lvl, half)
                    } else {
                        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
                        // round down to the saved grid so τ stays a stopping time
                        (half * rng.random::<f64>() / stepper.dt).floor() * stepper.dt
                    };
                    let tau = r.record.snapshots.partition_point(|s| s.0 < t_tau - 1e-9 * stepper.dt);
                    r.summary.increments = increments_after(&r.record, &sys, tau, &deltas, stepper.dt)?;
                    r.record.snapshots.clear();
                }
                Ok(r)
            })
            .collect();
        for run in runs {
            match run {
                Ok(r) => {
                    stats.push(&r.summary)?;
                    if keep_records {
                        records.push((d, r.record));
                    }
                }
                Err(Error::NonFinite(_)) => stats.push_failure(d)?,
                Err(e) => return Err(e),
            }
        }
    }
    Ok(EnsembleOutput { stats, records })
}

/// One row of a probability table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControlRow {
    pub d: usize,
    #[serde(rename = "K")]
    pub k: f64,
    pub p_hat: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub n: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub epsilon_target: f64,
    /// Smallest grid `K` with `max_d p̂ ≤ epsilon_target`, if any.
    pub k_attained: Option<f64>,
    pub rows: Vec<ControlRow>,
    /// Trend of the per-`d` estimates at `k_attained`.
    pub trend: Option<MannKendall>,
    /// Spread of the per-`d` estimates at `k_attained` is below the widest CI.
    pub spread_within_ci: Option<bool>,
}

fn threshold_report(table: &[Vec<Counts>], stats: &SummaryStats, target: f64) -> Result<ThresholdReport> {
    let mut rows = Vec::new();
    for (j, &d) in stats.d_list.iter().enumerate() {
        for (i, &k) in stats.k_grid.iter().enumerate() {
            let c = table[j][i];
            let (lo, hi) = c.wilson(stats.ci_level);
            rows.push(ControlRow {
                d,
                k,
                p_hat: c.p_hat(),
                ci_lo: lo,
                ci_hi: hi,
                n: c.n,
            });
        }
    }
    let attained = (0..stats.k_grid.len()).find(|&i| table.iter().all(|per_d| per_d[i].n > 0 && per_d[i].p_hat() <= target));
    let (trend, spread) = match attained {
        Some(i) if stats.d_list.len() >= 2 => {
            let ps: Vec<f64> = table.iter().map(|per_d| per_d[i].p_hat()).collect();
            let width = table
                .iter()
                .map(|per_d| {
                    let (lo, hi) = per_d[i].wilson(stats.ci_level);
                    hi - lo
                })
                .fold(0.0, f64::max);
            let spread = ps.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - ps.iter().cloned().fold(f64::INFINITY, f64::min);
            (Some(mann_kendall(&ps)?), Some(spread <= width))
        }
        _ => (None, None),
    };
    Ok(ThresholdReport {
        epsilon_target: target,
        k_attained: attained.map(|i| stats.k_grid[i]),
        rows,
        trend,
        spread_within_ci: spread,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniformControlReport {
    /// Threshold for `sup_t ‖X‖²_F0`.
    pub sup: ThresholdReport,
    /// Threshold for `∫‖X‖²_F1`.
    pub integral: ThresholdReport,
}

impl UniformControlReport {
    pub fn k1(&self) -> Option<f64> {
        self.sup.k_attained
    }

    pub fn k2(&self) -> Option<f64> {
        self.integral.k_attained
    }
}

pub fn uniform_control_report(stats: &SummaryStats, epsilon_target: f64) -> Result<UniformControlReport> {
    Ok(UniformControlReport {
        sup: threshold_report(&stats.sup_f0, stats, epsilon_target)?,
        integral: threshold_report(&stats.int_f1, stats, epsilon_target)?,
    })
}

/// The same threshold search for `sup_t ‖X‖²_D`.
pub fn d_space_control_report(stats: &SummaryStats, epsilon_target: f64) -> Result<ThresholdReport> {
    threshold_report(&stats.sup_d, stats, epsilon_target)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AldousRow {
    pub d: usize,
    pub delta: f64,
    pub eta: f64,
    pub p_hat: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AldousTable {
    pub eta: f64,
    pub rows: Vec<AldousRow>,
}

impl AldousTable {
    pub fn at(&self, d: usize, delta: f64) -> Option<&AldousRow> {
        self.rows.iter().find(|r| r.d == d && r.delta == delta)
    }
}

/// `P(sup_{θ≤δ} ‖X_{τ+θ} − X_τ‖_G ≥ η)` per `(d, δ)` from stored increments.
pub fn aldous_table(stats: &SummaryStats, eta: Option<f64>) -> Result<AldousTable> {
    if stats.delta_grid.is_empty() {
        return Err(Error::Config("statistics carry no increments".into()));
    }
    let last = stats
        .delta_grid
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let eta = match eta {
        Some(e) => e,
        None => {
            let pooled: Vec<f64> = stats
                .increments
                .iter()
                .flatten()
                .map(|v| v[last])
                .filter(|v| v.is_finite())
                .collect();
            median(&pooled).unwrap_or(0.0)
        }
    };
    let mut rows = Vec::new();
    for (j, &d) in stats.d_list.iter().enumerate() {
        for (i, &delta) in stats.delta_grid.iter().enumerate() {
            let mut c = Counts::default();
            for v in &stats.increments[j] {
                c.push(v[i] >= eta && eta > 0.0 || v[i].is_infinite());
            }
            let (lo, hi) = c.wilson(stats.ci_level);
            rows.push(AldousRow {
                d,
                delta,
                eta,
                p_hat: c.p_hat(),
                ci_lo: lo,
                ci_hi: hi,
            });
        }
    }
    Ok(AldousTable { eta, rows })
}

/// Run the ensemble with increment sampling on `delta_grid` and tabulate.
pub fn aldous_stats(cfg: &EnsembleConfig, delta_grid: &[f64], eta: Option<f64>) -> Result<AldousTable> {
    let mut c = cfg.clone();
    let pilot = cfg.aldous.as_ref().map_or(pilot_default(), |a| a.pilot_paths);
    c.aldous = Some(AldousConfig {
        delta_grid: delta_grid.to_vec(),
        eta,
        pilot_paths: pilot,
    });
    let out = run_ensemble(&c, false)?;
    aldous_table(&out.stats, eta)
}

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use super::stats::{ks_test, Counts, KsResult};
use crate::error::{Error, Result};
use crate::integrators::{step, ProjectedSde, Scheme};
use crate::models::{DriftOperator, ModelKind, ModelParams};
use crate::noise::{
    brownian_sup_exact, gbm_decay_criterion, gbm_exact, revuz_yor_bound, sample_gbm_terminal,
    track_martingale_bridged, CaseLabel, GbmSpec, MartingaleDiagnostics, NoiseSpec,
};
use crate::spectral::{Complex64, SpectralField, TorusGrid};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GbmRow {
    pub a: f64,
    pub b: f64,
    pub decays: bool,
    /// Fraction of samples with `f_T < 1e-2·f0`.
    pub frac_small: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    /// Exact value of that probability.
    pub frac_small_exact: f64,
    /// Median of `f_T / f0`.
    pub median_ratio: f64,
    pub n: usize,
}

/// Exact-solution sampling of `f_T` for each spec.
pub fn gbm_study(specs: &[GbmSpec], n_paths: usize, t: f64, seed: u64) -> Result<Vec<GbmRow>> {
    if !(t > 0.0) || n_paths == 0 {
        return Err(Error::Parameter("gbm_study needs t > 0 and at least one path".into()));
    }
    let normal = Normal::standard();
    Ok(specs
        .iter()
        .map(|s| {
            let fs = sample_gbm_terminal(s, t, n_paths, seed);
            let mut c = Counts::default();
            for &f in &fs {
                c.push(f < 1e-2 * s.f0);
            }
            let (ci_lo, ci_hi) = c.wilson(0.95);
            let exact = if s.b == 0.0 {
                ((s.a * t) < (1e-2f64).ln()) as u8 as f64
            } else {
                normal.cdf(((1e-2f64).ln() - s.log_drift() * t) / (s.b.abs() * t.sqrt()))
            };
            let ratios: Vec<f64> = fs.iter().map(|f| f / s.f0).collect();
            GbmRow {
                a: s.a,
                b: s.b,
                decays: gbm_decay_criterion(s),
                frac_small: c.p_hat(),
                ci_lo,
                ci_hi,
                frac_small_exact: exact,
                median_ratio: super::stats::median(&ratios).unwrap_or(f64::NAN),
                n: n_paths,
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrongOrderReport {
    pub dts: Vec<f64>,
    /// Mean `|X_T - f_T|` per step size.
    pub errors: Vec<f64>,
    /// Least-squares slope of log error against log dt.
    pub order: f64,
    pub n_paths: usize,
}

/// Strong error of a scheme on GBM, written as the linear SPDE
/// `dX = aX dt + bX dW` on a constant field. All step sizes share each
/// Brownian path: coarse increments are sums of the finest ones.
pub fn strong_order_study(
    spec: &GbmSpec,
    scheme: Scheme,
    dts: &[f64],
    n_paths: usize,
    t: f64,
    seed: u64,
) -> Result<StrongOrderReport> {
    if dts.len() < 2 || n_paths == 0 {
        return Err(Error::Parameter("need two step sizes and at least one path".into()));
    }
    let fine = dts.iter().cloned().fold(f64::INFINITY, f64::min);
    let steps_fine = (t / fine).round() as usize;
    let ratios: Vec<usize> = dts
        .iter()
        .map(|&dt| {
            let r = (dt / fine).round() as usize;
            if ((r as f64) * fine - dt).abs() > 1e-12 * dt || steps_fine % r != 0 {
                Err(Error::Parameter(format!("step {dt} is not a multiple of {fine} dividing t")))
            } else {
                Ok(r)
            }
        })
        .collect::<Result<_>>()?;
    let grid = TorusGrid::new(1, 4)?;
    let op = DriftOperator::new(
        ModelKind::Linear,
        ModelParams {
            rate: spec.a,
            ..Default::default()
        },
    )?;
    let noise = NoiseSpec::new(spec.b.abs(), 0.0, CaseLabel::I)?;
    let sys = ProjectedSde::new(op, Some(noise), 0);
    let sign = spec.b.signum();
    let mut x0 = SpectralField::zeros(grid, 1);
    x0.comp_mut(0)[0] = Complex64::new(spec.f0, 0.0);

    let per_path: Vec<Vec<f64>> = (0..n_paths as u64)
        .into_par_iter()
        .map(|i| -> Result<Vec<f64>> {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i));
            let dw: Vec<f64> = (0..steps_fine)
                .map(|_| { let z: f64 = StandardNormal.sample(&mut rng); fine.sqrt() * z })
                .collect::<Vec<f64>>();
            let w_t: f64 = dw.iter().sum();
            let exact = gbm_exact(spec, w_t, t);
            ratios
                .iter()
                .zip(dts)
                .map(|(&r, &dt)| {
                    let mut x = x0.clone();
                    for chunk in dw.chunks(r) {
                        let inc: f64 = chunk.iter().sum();
                        x = step(scheme, &x, &sys, sign * inc, dt)?;
                    }
                    Ok((x.comp(0)[0].re - exact).abs())
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let errors: Vec<f64> = (0..dts.len())
        .map(|j| per_path.iter().map(|e| e[j]).sum::<f64>() / n_paths as f64)
        .collect();
    let lx: Vec<f64> = dts.iter().map(|d| d.ln()).collect();
    let ly: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    Ok(StrongOrderReport {
        dts: dts.to_vec(),
        order: slope(&lx, &ly),
        errors,
        n_paths,
    })
}

pub(crate) fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpLawReport {
    pub epsilon: f64,
    pub n_paths: usize,
    /// Final `E(ε)` per path.
    pub records: Vec<f64>,
    /// Empirical `P(E(ε) ≥ 1)` and the oracle `e^{-ε}`.
    pub survival_at_1: f64,
    pub survival_exact: f64,
    pub ks: KsResult,
}

/// `E(ε)` for `M = W` on `[0, t]`, with the per-step maximum drawn from the
/// bridge law so that no supremum is lost between grid points.
pub fn exp_law_study(epsilon: f64, n_paths: usize, dt: f64, t: f64, seed: u64) -> Result<ExpLawReport> {
    if !(dt > 0.0 && t > 0.0) || n_paths == 0 {
        return Err(Error::Parameter("exp_law_study needs dt, t > 0 and paths".into()));
    }
    MartingaleDiagnostics::new(epsilon)?;
    let steps = (t / dt).round() as usize;
    let sq = dt.sqrt();
    let records: Vec<f64> = (0..n_paths as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i));
            let mut d = MartingaleDiagnostics::new(epsilon)?;
            for _ in 0..steps {
                let z: f64 = StandardNormal.sample(&mut rng);
                let u: f64 = 1.0 - rng.random::<f64>();
                d = track_martingale_bridged(d, sq * z, dt, Some(u))?;
            }
            Ok(d.e_record)
        })
        .collect::<Result<_>>()?;
    let survival = records.iter().filter(|&&e| e >= 1.0).count() as f64 / n_paths as f64;
    let ks = ks_test(&records, |x| if x <= 0.0 { 0.0 } else { -(-epsilon * x).exp_m1() })?;
    Ok(ExpLawReport {
        epsilon,
        n_paths,
        records,
        survival_at_1: survival,
        survival_exact: (-epsilon).exp(),
        ks,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RevuzYorRow {
    pub x: f64,
    pub y: f64,
    pub p_hat: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub bound: f64,
    pub exact: f64,
}

impl RevuzYorRow {
    pub fn below_bound(&self) -> bool {
        self.ci_hi <= self.bound
    }

    pub fn matches_exact(&self) -> bool {
        self.ci_lo <= self.exact && self.exact <= self.ci_hi
    }
}

/// Monte Carlo `P(sup_{t≤y} W_t ≥ x)` on an `(x, y)` grid against the bound
/// and the reflection formula. Each `y` must be a multiple of `dt`.
pub fn revuz_yor_study(
    xs: &[f64],
    ys: &[f64],
    n_paths: usize,
    dt: f64,
    level: f64,
    seed: u64,
) -> Result<Vec<RevuzYorRow>> {
    let mut ys_sorted = ys.to_vec();
    ys_sorted.sort_by(f64::total_cmp);
    let marks: Vec<usize> = ys_sorted
        .iter()
        .map(|&y| {
            let k = (y / dt).round();
            if !(y > 0.0) || (k * dt - y).abs() > 1e-9 * y {
                Err(Error::Parameter(format!("y = {y} is not a positive multiple of dt")))
            } else {
                Ok(k as usize)
            }
        })
        .collect::<Result<_>>()?;
    let steps = *marks.last().unwrap_or(&0);
    let sq = dt.sqrt();
    // sup at each y, per path
    let sups: Vec<Vec<f64>> = (0..n_paths as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i));
            let (mut w, mut top) = (0.0f64, 0.0f64);
            let mut out = Vec::with_capacity(marks.len());
            let mut next = 0;
            for s in 1..=steps {
                let z: f64 = StandardNormal.sample(&mut rng);
                let u: f64 = 1.0 - rng.random::<f64>();
                let w1 = w + sq * z;
                top = top.max(crate::noise::bridge_max(w, w1, dt, u));
                w = w1;
                while next < marks.len() && marks[next] == s {
                    out.push(top);
                    next += 1;
                }
            }
            out
        })
        .collect();
    let mut rows = Vec::new();
    for &x in xs {
        for (j, &y) in ys_sorted.iter().enumerate() {
            let mut c = Counts::default();
            for s in &sups {
                c.push(s[j] >= x);
            }
            let (ci_lo, ci_hi) = c.wilson(level);
            rows.push(RevuzYorRow {
                x,
                y,
                p_hat: c.p_hat(),
                ci_lo,
                ci_hi,
                bound: revuz_yor_bound(x, y)?,
                exact: brownian_sup_exact(x, y),
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn growth_case_has_median_above_one() {
        let rows = gbm_study(&[GbmSpec::new(1.0, 0.5, 1.0).unwrap()], 400, 1.0, 3).unwrap();
        assert!(!rows[0].decays);
        assert!(rows[0].median_ratio > 1.0);
    }

    #[test]
    fn exp_law_small() {
        let r = exp_law_study(1.0, 400, 1e-2, 20.0, 9).unwrap();
        assert_eq!(r.records.len(), 400);
        assert!(r.records.iter().all(|&e| e >= 0.0));
        assert!((r.survival_at_1 - r.survival_exact).abs() < 0.1);
    }

    #[test]
    fn revuz_yor_small_grid() {
        let rows = revuz_yor_study(&[1.0], &[1.0], 2000, 1e-2, 0.99, 4).unwrap();
        assert!(rows[0].below_bound());
        assert!((rows[0].p_hat - 0.3173).abs() < 0.05);
        assert!(revuz_yor_study(&[1.0], &[0.0105], 10, 1e-2, 0.99, 4).is_err());
    }

    #[test]
    fn strong_order_rejects_bad_grid() {
        let s = GbmSpec::new(1.0, 2.0, 1.0).unwrap();
        assert!(strong_order_study(&s, Scheme::TamedEulerMaruyama, &[0.1, 0.15], 4, 1.0, 1).is_err());
    }
}

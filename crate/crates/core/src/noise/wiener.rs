use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::box_muller;
use crate::error::{Error, Result};

/// Ticks per base step. Times are integer tick counts so bridge refinement
/// down to `dt·2^-24` is exact.
pub const TICKS_PER_STEP: u64 = 1 << 24;

/// A scalar Brownian path sampled lazily at dyadic times.
///
/// Base-step increments come from ChaCha8 stream 0 (word position `4n` for
/// step `n`); the bridge midpoint at tick `m` uses stream 1 at word position
/// `4m`. Every value is therefore a pure function of `(seed, dt_base, tick)`,
/// regardless of the order in which times are requested.
#[derive(Debug, Clone)]
pub struct WienerPath {
    seed: u64,
    dt_base: f64,
    coarse: Vec<f64>,
    memo: HashMap<u64, f64>,
    coarse_rng: ChaCha8Rng,
    bridge_rng: ChaCha8Rng,
}

impl WienerPath {
    pub fn new(seed: u64, dt_base: f64) -> Result<Self> {
        if !(dt_base > 0.0 && dt_base.is_finite()) {
            return Err(Error::Parameter(format!("dt_base must be positive, got {dt_base}")));
        }
        let mut coarse_rng = ChaCha8Rng::seed_from_u64(seed);
        coarse_rng.set_stream(0);
        let mut bridge_rng = ChaCha8Rng::seed_from_u64(seed);
        bridge_rng.set_stream(1);
        Ok(WienerPath {
            seed,
            dt_base,
            coarse: vec![0.0],
            memo: HashMap::new(),
            coarse_rng,
            bridge_rng,
        })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn dt_base(&self) -> f64 {
        self.dt_base
    }

    pub fn time_of(&self, tick: u64) -> f64 {
        (tick / TICKS_PER_STEP) as f64 * self.dt_base
            + (tick % TICKS_PER_STEP) as f64 / TICKS_PER_STEP as f64 * self.dt_base
    }

    fn normal(rng: &mut ChaCha8Rng, word: u64) -> f64 {
        rng.set_word_pos(4 * word as u128);
        let u1: f64 = rng.random();
        let u2: f64 = rng.random();
        box_muller(u1, u2)
    }

    fn coarse_value(&mut self, n: usize) -> f64 {
        while self.coarse.len() <= n {
            let k = self.coarse.len() - 1;
            let z = Self::normal(&mut self.coarse_rng, k as u64);
            let last = self.coarse[k];
            self.coarse.push(last + self.dt_base.sqrt() * z);
        }
        self.coarse[n]
    }

    /// `W` at the given tick.
    pub fn value(&mut self, tick: u64) -> f64 {
        let n = tick / TICKS_PER_STEP;
        let r = tick % TICKS_PER_STEP;
        if r == 0 {
            return self.coarse_value(n as usize);
        }
        let (mut lo, mut hi) = (n * TICKS_PER_STEP, (n + 1) * TICKS_PER_STEP);
        let mut wl = self.coarse_value(n as usize);
        let mut wh = self.coarse_value(n as usize + 1);
        loop {
            let mid = lo + (hi - lo) / 2;
            let wm = match self.memo.get(&mid) {
                Some(&v) => v,
                None => {
                    let var = (hi - lo) as f64 / TICKS_PER_STEP as f64 * self.dt_base / 4.0;
                    let z = Self::normal(&mut self.bridge_rng, mid);
                    let v = 0.5 * (wl + wh) + var.sqrt() * z;
                    self.memo.insert(mid, v);
                    v
                }
            };
            if mid == tick {
                return wm;
            }
            if tick < mid {
                hi = mid;
                wh = wm;
            } else {
                lo = mid;
                wl = wm;
            }
        }
    }

    /// `W(t1) - W(t0)` for ticks `t0 ≤ t1`.
    pub fn increment(&mut self, t0: u64, t1: u64) -> f64 {
        self.value(t1) - self.value(t0)
    }

    /// Drop memoised bridge points before `tick`. Values stay reproducible.
    pub fn prune_before(&mut self, tick: u64) {
        self.memo.retain(|&k, _| k >= tick);
    }

    pub fn memo_len(&self) -> usize {
        self.memo.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_independent() {
        let mut a = WienerPath::new(3, 0.01).unwrap();
        let mut b = WienerPath::new(3, 0.01).unwrap();
        let t = TICKS_PER_STEP;
        let ticks = [5 * t, t / 2, 3 * t + t / 8, 2 * t + 3 * t / 4, t / 4];
        let va: Vec<f64> = ticks.iter().map(|&k| a.value(k)).collect();
        let vb: Vec<f64> = ticks.iter().rev().map(|&k| b.value(k)).collect();
        for (x, y) in va.iter().zip(vb.iter().rev()) {
            assert_eq!(x, y);
        }
        b.prune_before(10 * t);
        assert_eq!(b.memo_len(), 0);
        assert_eq!(b.value(t / 4), va[4]);
    }

    #[test]
    fn refinement_keeps_coarse_increments() {
        let mut a = WienerPath::new(9, 0.1).unwrap();
        let mut b = WienerPath::new(9, 0.1).unwrap();
        let t = TICKS_PER_STEP;
        let coarse = a.increment(2 * t, 3 * t);
        let h = t / 16;
        let fine: f64 = (0..16).map(|i| b.increment(2 * t + i * h, 2 * t + (i + 1) * h)).sum();
        assert!((coarse - fine).abs() < 1e-14);
    }

    #[test]
    fn increment_variance() {
        let t = TICKS_PER_STEP;
        let n = 4000;
        let (mut s_coarse, mut s_fine) = (0.0, 0.0);
        for seed in 0..n {
            let mut w = WienerPath::new(seed, 0.5).unwrap();
            s_coarse += w.increment(0, t).powi(2);
            s_fine += w.increment(t / 4, t / 2).powi(2);
        }
        let (vc, vf) = (s_coarse / n as f64, s_fine / n as f64);
        assert!((vc - 0.5).abs() < 0.05, "{vc}");
        assert!((vf - 0.125).abs() < 0.0125, "{vf}");
    }
}

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// Two-sided normal quantile for a `level` confidence interval.
pub fn z_for(level: f64) -> f64 {
    Normal::new(0.0, 1.0)
        .expect("standard normal")
        .inverse_cdf(0.5 + level / 2.0)
}

/// Wilson score interval for `k` successes out of `n`.
pub fn wilson_interval(k: u64, n: u64, level: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let z = z_for(level);
    let nf = n as f64;
    let p = k as f64 / nf;
    let z2 = z * z;
    let den = 1.0 + z2 / nf;
    let centre = (p + z2 / (2.0 * nf)) / den;
    let half = z * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / den;
    // clamp so the interval always contains p despite rounding
    ((centre - half).max(0.0).min(p), (centre + half).min(1.0).max(p))
}

/// Bernoulli counter; merging is addition, so order never matters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub hits: u64,
    pub n: u64,
}

impl Counts {
    pub fn push(&mut self, hit: bool) {
        self.hits += hit as u64;
        self.n += 1;
    }

    pub fn merge(self, other: Counts) -> Counts {
        Counts {
            hits: self.hits + other.hits,
            n: self.n + other.n,
        }
    }

    pub fn p_hat(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.hits as f64 / self.n as f64
        }
    }

    pub fn wilson(&self, level: f64) -> (f64, f64) {
        wilson_interval(self.hits, self.n, level)
    }
}

/// Asymptotic Kolmogorov distribution tail `P(K > λ)`.
pub fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    for j in 1..=100 {
        let term = (-2.0 * (j * j) as f64 * lambda * lambda).exp();
        sum += if j % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
    pub n: usize,
}

/// One-sample Kolmogorov–Smirnov test against a continuous CDF.
pub fn ks_test(samples: &[f64], cdf: impl Fn(f64) -> f64) -> Result<KsResult> {
    if samples.is_empty() {
        return Err(Error::Parameter("KS test needs at least one sample".into()));
    }
    if samples.iter().any(|x| x.is_nan()) {
        return Err(Error::NonFinite("KS sample"));
    }
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
    }
    let sn = n.sqrt();
    Ok(KsResult {
        statistic: d,
        p_value: kolmogorov_q((sn + 0.12 + 0.11 / sn) * d),
        n: xs.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MannKendall {
    pub s: i64,
    /// One-sided p-value for an increasing trend.
    pub p_increasing: f64,
    pub exact: bool,
}

fn mk_s(xs: &[f64]) -> i64 {
    let mut s = 0;
    for i in 0..xs.len() {
        for j in i + 1..xs.len() {
            s += match xs[j].partial_cmp(&xs[i]) {
                Some(std::cmp::Ordering::Greater) => 1,
                Some(std::cmp::Ordering::Less) => -1,
                _ => 0,
            };
        }
    }
    s
}

fn permutations(n: usize, f: &mut impl FnMut(&[usize])) {
    // Heap's algorithm
    let mut a: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    f(&a);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            f(&a);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// Mann–Kendall trend test. Exact permutation distribution (ties kept) up to
/// eight points, normal approximation with continuity correction beyond.
pub fn mann_kendall(xs: &[f64]) -> Result<MannKendall> {
    if xs.len() < 2 {
        return Err(Error::Parameter("Mann–Kendall needs at least two points".into()));
    }
    if xs.iter().any(|x| x.is_nan()) {
        return Err(Error::NonFinite("Mann–Kendall series"));
    }
    let s = mk_s(xs);
    if xs.len() <= 8 {
        let (mut ge, mut total) = (0u64, 0u64);
        let mut buf = vec![0.0; xs.len()];
        permutations(xs.len(), &mut |p| {
            for (b, &i) in buf.iter_mut().zip(p) {
                *b = xs[i];
            }
            total += 1;
            ge += (mk_s(&buf) >= s) as u64;
        });
        return Ok(MannKendall {
            s,
            p_increasing: ge as f64 / total as f64,
            exact: true,
        });
    }
    let n = xs.len() as f64;
    let var = n * (n - 1.0) * (2.0 * n + 5.0) / 18.0;
    let z = if s > 0 {
        (s as f64 - 1.0) / var.sqrt()
    } else if s < 0 {
        (s as f64 + 1.0) / var.sqrt()
    } else {
        0.0
    };
    let p = 1.0 - Normal::new(0.0, 1.0).expect("standard normal").cdf(z);
    Ok(MannKendall {
        s,
        p_increasing: p,
        exact: false,
    })
}

/// Median of a slice (NaN-free), averaging the middle pair.
pub fn median(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    Some(if v.len() % 2 == 1 { v[m] } else { 0.5 * (v[m - 1] + v[m]) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn wilson_contains_estimate() {
        for (k, n) in [(0, 10), (10, 10), (3, 7), (500, 1000)] {
            let (lo, hi) = wilson_interval(k, n, 0.95);
            let p = k as f64 / n as f64;
            assert!(lo <= p && p <= hi);
        }
        let (lo, hi) = wilson_interval(50, 100, 0.95);
        assert!((lo - 0.4038).abs() < 1e-3 && (hi - 0.5962).abs() < 1e-3);
    }

    #[test]
    fn wilson_coverage() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let p = 0.3;
        let (n, reps) = (10_000u64, 400);
        let mut covered = 0;
        for _ in 0..reps {
            let k = (0..n).filter(|_| rng.random::<f64>() < p).count() as u64;
            let (lo, hi) = wilson_interval(k, n, 0.95);
            covered += (lo <= p && p <= hi) as u32;
        }
        let c = covered as f64 / reps as f64;
        // binomial noise on 400 reps is about 0.011
        assert!((c - 0.95).abs() < 0.035, "coverage {c}");
    }

    #[test]
    fn counts_merge() {
        let a = Counts { hits: 2, n: 5 };
        let b = Counts { hits: 1, n: 4 };
        let c = Counts { hits: 0, n: 3 };
        assert_eq!(a.merge(b), b.merge(a));
        assert_eq!(a.merge(b).merge(c), a.merge(b.merge(c)));
    }

    #[test]
    fn ks_uniform() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let xs: Vec<f64> = (0..2000).map(|_| rng.random()).collect();
        let r = ks_test(&xs, |x| x.clamp(0.0, 1.0)).unwrap();
        assert!(r.p_value > 0.01);
        let r = ks_test(&xs, |x| (x * x).clamp(0.0, 1.0)).unwrap();
        assert!(r.p_value < 1e-6);
    }

    #[test]
    fn kolmogorov_tail_values() {
        assert!((kolmogorov_q(1.36) - 0.0494).abs() < 1e-3);
        assert!((kolmogorov_q(1.63) - 0.0098).abs() < 5e-4);
    }

    #[test]
    fn mann_kendall_small() {
        let up = mann_kendall(&[0.1, 0.2, 0.3, 0.4]).unwrap();
        assert_eq!(up.s, 6);
        assert!((up.p_increasing - 1.0 / 24.0).abs() < 1e-12);
        let flat = mann_kendall(&[0.0; 4]).unwrap();
        assert_eq!(flat.p_increasing, 1.0);
        let down = mann_kendall(&[4.0, 3.0, 2.0, 1.0]).unwrap();
        assert_eq!(down.p_increasing, 1.0);
        let big = mann_kendall(&(0..20).map(|i| i as f64).collect::<Vec<_>>()).unwrap();
        assert!(!big.exact && big.p_increasing < 1e-6);
    }
}

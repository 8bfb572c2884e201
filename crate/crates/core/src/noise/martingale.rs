use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Running `M_t`, `⟨M⟩_t` and `E(ε) = sup_s (M_s - (ε/2)⟨M⟩_s)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MartingaleDiagnostics {
    pub epsilon: f64,
    pub m: f64,
    pub qv: f64,
    pub e_record: f64,
}

impl MartingaleDiagnostics {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::Parameter(format!("epsilon must be positive, got {epsilon}")));
        }
        Ok(MartingaleDiagnostics {
            epsilon,
            m: 0.0,
            qv: 0.0,
            e_record: 0.0,
        })
    }

    /// `M - (ε/2)⟨M⟩`.
    pub fn envelope(&self) -> f64 {
        self.m - 0.5 * self.epsilon * self.qv
    }
}

/// Add one increment, monitoring the record at the step end only.
pub fn track_martingale(
    diag: MartingaleDiagnostics,
    dm: f64,
    d_qv: f64,
) -> Result<MartingaleDiagnostics> {
    track_martingale_bridged(diag, dm, d_qv, None)
}

/// Add one increment. With `u = Some(U)`, `U` uniform in `(0,1)`, the record
/// also takes the exact maximum of the envelope over the step, sampled from
/// its Brownian-bridge law given both endpoints.
pub fn track_martingale_bridged(
    diag: MartingaleDiagnostics,
    dm: f64,
    d_qv: f64,
    u: Option<f64>,
) -> Result<MartingaleDiagnostics> {
    if !(d_qv >= 0.0) || !dm.is_finite() {
        return Err(Error::Parameter(format!(
            "martingale increment must be finite with d_qv ≥ 0, got ({dm}, {d_qv})"
        )));
    }
    let a = diag.envelope();
    let next = MartingaleDiagnostics {
        m: diag.m + dm,
        qv: diag.qv + d_qv,
        ..diag
    };
    let b = next.envelope();
    let top = match u {
        Some(u) => bridge_max(a, b, d_qv, u),
        None => b,
    };
    Ok(MartingaleDiagnostics {
        e_record: diag.e_record.max(top),
        ..next
    })
}

/// Maximum of a Brownian bridge from `a` to `b` with total variance `var`,
/// by inversion with the uniform `u`.
#[inline]
pub fn bridge_max(a: f64, b: f64, var: f64, u: f64) -> f64 {
    let d = b - a;
    0.5 * (a + b + (d * d - 2.0 * var * u.ln()).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_increments() {
        let d = MartingaleDiagnostics::new(0.25).unwrap();
        let e = track_martingale(d, 0.0, 0.0).unwrap();
        assert_eq!(d, e);
    }

    #[test]
    fn single_unit_step() {
        let d = MartingaleDiagnostics::new(0.25).unwrap();
        let e = track_martingale(d, 1.0, 0.0).unwrap();
        assert_eq!(e.e_record, 1.0);
        assert!(track_martingale(e, 0.0, -1.0).is_err());
    }

    #[test]
    fn record_monotone() {
        let mut d = MartingaleDiagnostics::new(1.0).unwrap();
        let mut last = 0.0;
        for i in 0..100 {
            let dm = if i % 3 == 0 { 0.5 } else { -0.4 };
            d = track_martingale_bridged(d, dm, 0.1, Some(0.3)).unwrap();
            assert!(d.e_record >= last);
            last = d.e_record;
        }
    }

    #[test]
    fn bridge_max_bounds() {
        assert_eq!(bridge_max(0.0, 1.0, 0.0, 0.5), 1.0);
        assert!(bridge_max(0.0, 1.0, 1.0, 0.5) > 1.0);
        assert!(bridge_max(0.0, 1.0, 1.0, 1.0) == 1.0);
    }
}

//! Self-checks runnable from the command line: quick sanity checks, the
//! structural identity suite, and the full acceptance experiments.

mod acceptance;
mod structural;
mod trivial;

use std::fmt;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use acceptance::{
    ac1_gbm, ac2_exp_law, ac3_revuz_yor, ac4_blowup_vs_taming, ac5_uniform_control, ac6_aldous, ac7_structural,
    ac8_control_schedule, acceptance_suite, burgers_advice, burgers_control_config, deterministic_flag_time,
    Ac5Artifacts,
};
pub use structural::structural_suite;
pub use trivial::trivial_suite;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub id: String,
    pub pass: bool,
    pub detail: String,
    pub seconds: f64,
}

impl Check {
    pub fn new(id: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Check {
            id: id.into(),
            pass,
            detail: detail.into(),
            seconds: 0.0,
        }
    }

    /// Time `f` and fold any error into a failed check.
    pub fn timed(id: &str, f: impl FnOnce() -> Result<(bool, String)>) -> Self {
        let t0 = Instant::now();
        let (pass, detail) = match f() {
            Ok(v) => v,
            Err(e) => (false, format!("error: {e}")),
        };
        Check {
            id: id.to_string(),
            pass,
            detail,
            seconds: t0.elapsed().as_secs_f64(),
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.pass { "PASS" } else { "FAIL" };
        write!(f, "{tag} {}: {} [{:.1}s]", self.id, self.detail, self.seconds)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Trivial,
    Structural,
    Acceptance,
    All,
}

impl std::str::FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "trivial" => Ok(Suite::Trivial),
            "structural" => Ok(Suite::Structural),
            "acceptance" => Ok(Suite::Acceptance),
            "all" => Ok(Suite::All),
            _ => Err(Error::Config(format!(
                "unknown suite {s:?}; expected trivial, structural, acceptance or all"
            ))),
        }
    }
}

pub fn run_suite(suite: Suite) -> Vec<Check> {
    match suite {
        Suite::Trivial => trivial_suite(),
        Suite::Structural => structural_suite(),
        Suite::Acceptance => acceptance_suite(),
        Suite::All => {
            let mut v = trivial_suite();
            v.extend(structural_suite());
            v.extend(acceptance_suite());
            v
        }
    }
}

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::control::ControlSchedule;
use crate::error::{Error, Result};
use crate::experiments::{assumption_audit, AldousConfig, AuditConfig, EnsembleConfig, InitialCondition};
use crate::integrators::{ProjectedSde, StepperConfig};
use crate::models::{default_ladder, DriftOperator, ModelKind, ModelParams};
use crate::noise::{theta_advisor, Advice, CaseLabel, NoiseSpec};
use crate::spectral::{random_field, Space, SpaceLadder, SpectralField, TorusGrid};

/// A complete run description, read from TOML.
///
/// ```toml
/// seed = 1
///
/// [model]
/// kind = "burgers1d"
/// resolution = 1024
///
/// [initial]
/// space = "F0"
/// field = { type = "sine", amplitude = 1.0 }
///
/// [noise]
/// theta = "advisor"
/// case = "I"
///
/// [stepper]
/// scheme = "milstein"
/// t_end = 2.0
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: u64,
    pub model: ModelSection,
    pub initial: InitialSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<NoiseSection>,
    #[serde(default)]
    pub stepper: StepperConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub control: Option<ControlSchedule>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ensemble: Option<EnsembleSection>,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub kind: ModelKind,
    #[serde(default)]
    pub params: ModelParams,
    /// Grid points per axis of single-path runs (a power of two).
    pub resolution: usize,
    /// Galerkin cutoff of single-path runs; defaults to `resolution / 3`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<usize>,
    /// Spatial dimension of the dimension-free test drifts.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ladder: Option<SpaceLadder>,
    /// Random bottom topography of the shallow-water models.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub topography: Option<Topography>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Topography {
    pub amplitude: f64,
    pub decay: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSection {
    /// Declared regularity of the data on the space ladder.
    pub space: Space,
    pub field: InitialCondition,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdvisorKeyword {
    Advisor,
}

/// A fixed θ, or `"advisor"` to fit it from an assumption audit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ThetaChoice {
    Value(f64),
    Named(AdvisorKeyword),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSection {
    pub theta: ThetaChoice,
    /// Required with a fixed θ; the advisor picks its own.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    pub case: CaseLabel,
    #[serde(default = "quarter")]
    pub epsilon: f64,
    #[serde(default = "audit_samples")]
    pub audit_samples: usize,
    #[serde(default = "one_u64")]
    pub audit_seed: u64,
    /// Gradient-ascent iterations from the two best audit samples; the
    /// random samples alone tend to underestimate `C₁`. Zero disables.
    #[serde(default = "audit_ascent")]
    pub audit_ascent: usize,
}

fn audit_ascent() -> usize {
    20
}

fn quarter() -> f64 {
    0.25
}

fn audit_samples() -> usize {
    200
}

fn one_u64() -> u64 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleSection {
    pub n_paths: usize,
    pub d_list: Vec<usize>,
    pub k_grid: Vec<f64>,
    #[serde(default = "target")]
    pub epsilon_target: f64,
    #[serde(default = "level")]
    pub ci_level: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aldous: Option<AldousConfig>,
}

fn target() -> f64 {
    0.1
}

fn level() -> f64 {
    0.95
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Jsonl,
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: String,
    /// Overrides `stepper.save_every` when set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub save_every: Option<usize>,
    pub formats: Vec<Format>,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            dir: "out".into(),
            save_every: None,
            formats: vec![Format::Jsonl, Format::Csv, Format::Json],
        }
    }
}

fn rank(s: Space) -> u8 {
    match s {
        Space::G => 0,
        Space::F0 => 1,
        Space::F1 => 2,
        Space::D => 3,
    }
}

/// Parse and validate a TOML document. Syntax errors and unknown keys carry
/// the line and column; validation errors name the offending section.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: &std::path::Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text).map_err(|e| match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        other => other,
    })
}

impl RunConfig {
    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Parse(e.to_string()))
    }

    /// SHA-256 of the canonical serialization, hex encoded.
    pub fn hash(&self) -> Result<String> {
        Ok(hex::encode(Sha256::digest(self.to_toml()?.as_bytes())))
    }

    pub fn dim(&self) -> Result<usize> {
        self.model
            .kind
            .dim()
            .or(self.model.dim)
            .ok_or_else(|| Error::Config(format!("[model] {:?} needs an explicit dim", self.model.kind)))
    }

    pub fn cutoff(&self) -> usize {
        self.model.cutoff.unwrap_or(self.model.resolution / 3)
    }

    pub fn validate(&self) -> Result<()> {
        let m = &self.model;
        let dim = self.dim()?;
        if let (Some(want), Some(got)) = (m.kind.dim(), m.dim) {
            if want != got {
                return Err(Error::Config(format!("[model] dim = {got} but {:?} is {want}-dimensional", m.kind)));
            }
        }
        TorusGrid::new(dim, m.resolution).map_err(|e| Error::Config(format!("[model] resolution: {e}")))?;
        let cutoff = self.cutoff();
        if cutoff == 0 || cutoff > m.resolution / 3 {
            return Err(Error::Config(format!(
                "[model] cutoff {cutoff} must lie in 1..={} (2/3 rule at resolution {})",
                m.resolution / 3,
                m.resolution
            )));
        }
        self.operator().map_err(|e| Error::Config(format!("[model] {e}")))?;
        if m.topography.is_some() && !matches!(m.kind, ModelKind::RswViscous | ModelKind::RswInviscid) {
            return Err(Error::Config("[model] topography applies to shallow-water models only".into()));
        }
        if let Some(n) = &self.noise {
            let want = n.case.initial_space();
            if rank(self.initial.space) < rank(want) {
                return Err(Error::Config(format!(
                    "[initial] case {:?} needs initial data in {:?} (noise in the {:?} norm), but the data are declared in {:?} only",
                    n.case,
                    want,
                    n.case.norm_space(),
                    self.initial.space
                )));
            }
            if !(n.epsilon > 0.0 && n.epsilon < 0.5) {
                return Err(Error::Config(format!("[noise] epsilon must lie in (0, 1/2), got {}", n.epsilon)));
            }
            match n.theta {
                ThetaChoice::Value(t) => {
                    let alpha = n
                        .alpha
                        .ok_or_else(|| Error::Config("[noise] alpha is required with a numeric theta".into()))?;
                    NoiseSpec::new(t, alpha, n.case).map_err(|e| Error::Config(format!("[noise] {e}")))?;
                }
                ThetaChoice::Named(_) => {
                    if n.audit_samples < 100 {
                        return Err(Error::Config("[noise] audit_samples must be at least 100".into()));
                    }
                }
            }
        }
        self.stepper.validate(0.0).map_err(|e| Error::Config(format!("[stepper] {e}")))?;
        if let Some(c) = &self.control {
            c.validate().map_err(|e| Error::Config(format!("[control] {e}")))?;
            if self.noise.is_none() {
                return Err(Error::Config("[control] needs a [noise] section".into()));
            }
        }
        if let Some(e) = &self.ensemble {
            // θ is not known before the advisor runs; any spec of the right case will do here
            let probe = self.noise.as_ref().map(|n| NoiseSpec {
                theta: 0.0,
                alpha: 0.0,
                norm_space: n.case.norm_space(),
                case: n.case,
            });
            self.ensemble_config_with(e, probe)?.validate().map_err(|x| Error::Config(format!("[ensemble] {x}")))?;
            if !(e.epsilon_target > 0.0 && e.epsilon_target < 1.0) {
                return Err(Error::Config("[ensemble] epsilon_target must lie in (0, 1)".into()));
            }
        }
        if self.output.save_every == Some(0) {
            return Err(Error::Config("[output] save_every must be at least 1".into()));
        }
        Ok(())
    }

    /// Model parameters with the topography field built on `grid`.
    fn params_on(&self, grid: Option<TorusGrid>) -> ModelParams {
        let mut p = self.model.params.clone();
        if let (Some(t), Some(g)) = (self.model.topography, grid) {
            p.topography = Some(random_field(g, 1, t.decay, t.amplitude, t.seed));
        }
        p
    }

    pub fn operator(&self) -> Result<DriftOperator> {
        self.operator_on(None)
    }

    fn operator_on(&self, grid: Option<TorusGrid>) -> Result<DriftOperator> {
        let p = self.params_on(grid);
        let ladder = self.model.ladder.unwrap_or_else(|| default_ladder(self.model.kind, &p));
        DriftOperator::with_ladder(self.model.kind, p, ladder)
    }

    /// Stepper settings with the output stride applied.
    pub fn stepper(&self) -> StepperConfig {
        let mut s = self.stepper.clone();
        if let Some(k) = self.output.save_every {
            s.save_every = k;
        }
        s
    }

    /// Noise parameters, running the audit and advisor when requested.
    pub fn resolve_noise(&self) -> Result<Option<(NoiseSpec, Option<Advice>)>> {
        let Some(n) = &self.noise else { return Ok(None) };
        match n.theta {
            ThetaChoice::Value(t) => Ok(Some((NoiseSpec::new(t, n.alpha.unwrap_or(0.0), n.case)?, None))),
            ThetaChoice::Named(_) => {
                let op = self.operator()?;
                let mut cfg = AuditConfig::for_operator(&op, self.cutoff(), n.audit_samples, n.audit_seed);
                if n.audit_ascent > 0 {
                    cfg.ascent_starts = 2;
                    cfg.ascent_iters = n.audit_ascent;
                }
                let audit = assumption_audit(&op, &cfg)?;
                let advice = theta_advisor(n.case, &audit.constants, n.epsilon)?;
                Ok(Some((NoiseSpec::new(advice.theta, advice.alpha, n.case)?, Some(advice))))
            }
        }
    }

    /// Grid, projected system and initial state of a single-path run.
    pub fn single_path(&self, noise: Option<NoiseSpec>) -> Result<(ProjectedSde, SpectralField)> {
        let grid = TorusGrid::new(self.dim()?, self.model.resolution)?;
        let op = self.operator_on(Some(grid))?;
        let cutoff = self.cutoff();
        let x0 = self.initial.field.build(&op, grid, cutoff)?;
        Ok((ProjectedSde::new(op, noise, cutoff), x0))
    }

    pub fn epsilon(&self) -> f64 {
        self.noise.as_ref().map_or(0.25, |n| n.epsilon)
    }

    /// The `[ensemble]` section as an [`EnsembleConfig`].
    pub fn ensemble_config(&self, noise: Option<NoiseSpec>) -> Result<EnsembleConfig> {
        let e = self
            .ensemble
            .as_ref()
            .ok_or_else(|| Error::Config("missing [ensemble] section".into()))?;
        self.ensemble_config_with(e, noise)
    }

    fn ensemble_config_with(&self, e: &EnsembleSection, noise: Option<NoiseSpec>) -> Result<EnsembleConfig> {
        if self.model.topography.is_some() {
            return Err(Error::Config("[ensemble] runs do not support topography".into()));
        }
        Ok(EnsembleConfig {
            n_paths: e.n_paths,
            base_seed: self.seed,
            d_list: e.d_list.clone(),
            kind: self.model.kind,
            params: self.model.params.clone(),
            dim: self.model.dim,
            initial: self.initial.field.clone(),
            noise,
            stepper: self.stepper(),
            k_grid: e.k_grid.clone(),
            epsilon: self.epsilon(),
            control: self.control,
            aldous: e.aldous.clone(),
            ci_level: e.ci_level,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[model]
kind = "heat"
dim = 1
resolution = 32

[initial]
space = "F0"
field = { type = "sine", amplitude = 1.0 }
"#;

    #[test]
    fn minimal_fills_defaults() {
        let c = parse_config(MINIMAL).unwrap();
        assert_eq!(c.seed, 0);
        assert_eq!(c.cutoff(), 10);
        assert_eq!(c.stepper, StepperConfig::default());
        assert_eq!(c.output, OutputSection::default());
        assert!(c.noise.is_none());
    }

    #[test]
    fn round_trip() {
        let text = format!(
            "{MINIMAL}\n[noise]\ntheta = 2.5\nalpha = 1.0\ncase = \"I\"\n\n[control]\nK = 0.5\n\n[ensemble]\nn_paths = 4\nd_list = [4, 8]\nk_grid = [1.0, 10.0]\n"
        );
        let c = parse_config(&text).unwrap();
        let back = parse_config(&c.to_toml().unwrap()).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.hash().unwrap(), c.hash().unwrap());
        let adv = parse_config(&format!("{MINIMAL}\n[noise]\ntheta = \"advisor\"\ncase = \"I\"\n")).unwrap();
        assert_eq!(parse_config(&adv.to_toml().unwrap()).unwrap(), adv);
    }

    #[test]
    fn unknown_key_has_location() {
        let e = parse_config(&MINIMAL.replace("resolution = 32", "resolution = 32\nresolutoin = 4")).unwrap_err();
        let m = e.to_string();
        assert!(m.contains("resolutoin") && m.contains("line"), "{m}");
    }

    #[test]
    fn case_ii_needs_d_data() {
        let text = format!("{MINIMAL}\n[noise]\ntheta = 1.0\nalpha = 0.5\ncase = \"II\"\n");
        let m = parse_config(&text).unwrap_err().to_string();
        assert!(m.contains("case II") && m.contains("D"), "{m}");
        assert!(parse_config(&text.replace("space = \"F0\"", "space = \"D\"")).is_ok());
    }

    #[test]
    fn cross_field_checks() {
        assert!(parse_config(&MINIMAL.replace("resolution = 32", "resolution = 32\ncutoff = 11")).is_err());
        assert!(parse_config(&format!("{MINIMAL}\n[control]\nK = 0.5\n")).is_err());
        let no_alpha = format!("{MINIMAL}\n[noise]\ntheta = 1.0\ncase = \"I\"\n");
        assert!(parse_config(&no_alpha).is_err());
    }

    #[test]
    fn advisor_resolves() {
        let text = MINIMAL.replace("heat", "burgers1d").replace("dim = 1\n", "")
            + "\n[noise]\ntheta = \"advisor\"\ncase = \"I\"\naudit_samples = 100\n";
        let c = parse_config(&text).unwrap();
        let (spec, advice) = c.resolve_noise().unwrap().unwrap();
        assert!(spec.theta > 0.0 && spec.alpha > 1.5);
        assert!(advice.is_some());
    }
}

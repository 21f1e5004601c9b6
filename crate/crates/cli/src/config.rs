//! Experiment configuration: a TOML (or JSON, by extension) file with the
//! group, the horizon `T`, Monte Carlo defaults and optional per-command
//! blocks.

use std::path::Path;

use holoheis::algebra::GroupConfigFile;
use holoheis::{GroupConfig, GroupElement};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    group: Option<GroupConfigFile>,
    #[serde(rename = "T")]
    t: Option<f64>,
    mc: Option<McSection>,
    #[serde(default)]
    simulate: SimulateSection,
    #[serde(default)]
    taylor: TaylorSection,
    #[serde(default)]
    isometry: IsometrySection,
    #[serde(default)]
    skeleton: SkeletonSection,
    #[serde(default)]
    chaos: ChaosSection,
    #[serde(default)]
    project: ProjectSection,
    #[serde(default)]
    bounds: BoundsSection,
    #[serde(default)]
    verify: VerifySection,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub group: GroupConfig,
    #[serde(rename = "T")]
    pub t: f64,
    pub mc: McSection,
    pub simulate: SimulateSection,
    pub taylor: TaylorSection,
    pub isometry: IsometrySection,
    pub skeleton: SkeletonSection,
    pub chaos: ChaosSection,
    pub project: ProjectSection,
    pub bounds: BoundsSection,
    pub verify: VerifySection,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McSection {
    pub steps: usize,
    pub paths: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateSection {
    pub polynomials: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TaylorSection {
    pub polynomial: String,
    pub maxrank: Option<usize>,
}

impl Default for TaylorSection {
    fn default() -> Self {
        Self {
            polynomial: "c1".into(),
            maxrank: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IsometrySection {
    pub polynomials: Vec<String>,
}

impl Default for IsometrySection {
    fn default() -> Self {
        Self {
            polynomials: vec!["c1".into()],
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SkeletonSection {
    pub polynomials: Vec<String>,
    pub points: Vec<GroupElement>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChaosSection {
    /// Ranks of the random tensors in the Itô isometry study.
    pub ranks: Vec<usize>,
    pub polynomials: Vec<String>,
    /// Step counts for the residual study; each must divide the largest.
    pub levels: Vec<usize>,
}

impl Default for ChaosSection {
    fn default() -> Self {
        Self {
            ranks: vec![1, 2, 3],
            polynomials: Vec::new(),
            levels: vec![256, 512, 1024, 2048],
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProjectSection {
    pub polynomial: String,
    pub ranks: Vec<usize>,
}

impl Default for ProjectSection {
    fn default() -> Self {
        Self {
            polynomial: "c1".into(),
            ranks: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoundsSection {
    pub polynomial: String,
    pub points: Vec<GroupElement>,
    /// Exponents for the Gaussian bound; `2` is exact, others use MC.
    pub p: Vec<f64>,
    pub segments: usize,
    pub restarts: usize,
}

impl Default for BoundsSection {
    fn default() -> Self {
        Self {
            polynomial: "w1".into(),
            points: Vec::new(),
            p: vec![2.0],
            segments: holoheis::geometry::DEFAULT_SEGMENTS,
            restarts: holoheis::geometry::DEFAULT_RESTARTS,
        }
    }
}

/// Sizes for `verify-all`. The defaults are the full acceptance budget.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifySection {
    pub isometry_cases: usize,
    pub isometry_degree: usize,
    pub worked_paths: usize,
    pub worked_steps: usize,
    pub mean_value_polynomials: usize,
    pub mean_value_paths: usize,
    pub mean_value_steps: usize,
    pub skeleton_polynomials: usize,
    pub skeleton_points: usize,
    pub skeleton_paths: usize,
    pub skeleton_steps: usize,
    pub ito_paths: usize,
    pub ito_steps: usize,
    pub chaos_polynomials: usize,
    pub chaos_degree: usize,
    pub chaos_paths: usize,
    pub chaos_levels: Vec<usize>,
    pub identity_cases: usize,
    pub grading_angles: usize,
    pub projection_k: usize,
    pub projection_d: usize,
    pub projection_polynomials: usize,
    pub projection_degree: usize,
    pub bound_cases: usize,
    pub bound_segments: usize,
    pub bound_restarts: usize,
}

impl Default for VerifySection {
    fn default() -> Self {
        Self {
            isometry_cases: 100,
            isometry_degree: 6,
            worked_paths: 100_000,
            worked_steps: 1024,
            mean_value_polynomials: 20,
            mean_value_paths: 20_000,
            mean_value_steps: 64,
            skeleton_polynomials: 5,
            skeleton_points: 10,
            skeleton_paths: 20_000,
            skeleton_steps: 64,
            ito_paths: 100_000,
            ito_steps: 1024,
            chaos_polynomials: 5,
            chaos_degree: 4,
            chaos_paths: 4000,
            chaos_levels: vec![256, 512, 1024, 2048],
            identity_cases: 50,
            grading_angles: 32,
            projection_k: 6,
            projection_d: 2,
            projection_polynomials: 3,
            projection_degree: 3,
            bound_cases: 100,
            bound_segments: 4,
            bound_restarts: 8,
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let is_json = path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("json"));
        if is_json {
            Self::from_json(&text)
        } else {
            Self::from_toml(&text)
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let file: ConfigFile = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        Self::from_file(file)
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let file: ConfigFile = serde_json::from_str(text).map_err(|e| {
            CliError::Config(format!("line {} column {}: {e}", e.line(), e.column()))
        })?;
        Self::from_file(file)
    }

    fn from_file(file: ConfigFile) -> Result<Self, CliError> {
        let group_file = file
            .group
            .ok_or_else(|| CliError::Config("group required".into()))?;
        let group = GroupConfig::try_from(group_file).map_err(CliError::from_core_config)?;
        let t = file.t.ok_or_else(|| CliError::Config("T required".into()))?;
        if !(t > 0.0 && t.is_finite()) {
            return Err(CliError::Config(format!("T must be positive, got {t}")));
        }
        let mc = file
            .mc
            .ok_or_else(|| CliError::Config("mc required".into()))?;
        if mc.steps == 0 || mc.paths == 0 {
            return Err(CliError::Config("mc.steps and mc.paths must be positive".into()));
        }
        for g in file.skeleton.points.iter().chain(&file.bounds.points) {
            group
                .check(g)
                .map_err(|e| CliError::Config(format!("point: {e}")))?;
        }
        Ok(Self {
            group,
            t,
            mc,
            simulate: file.simulate,
            taylor: file.taylor,
            isometry: file.isometry,
            skeleton: file.skeleton,
            chaos: file.chaos,
            project: file.project,
            bounds: file.bounds,
            verify: file.verify,
        })
    }

    /// First 16 hex digits of the SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(canonical.as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    pub fn mc_params(&self) -> holoheis::stochastic::MCParams {
        holoheis::stochastic::MCParams {
            t: self.t,
            steps: self.mc.steps,
            paths: self.mc.paths,
            seed: self.mc.seed,
        }
    }

    pub fn polynomial(&self, text: &str) -> Result<holoheis::Polynomial, CliError> {
        holoheis::poly::parse_polynomial(text, self.group.k(), self.group.d())
            .map_err(|e| CliError::Config(format!("polynomial {text:?}: {e}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEIS: &str = r#"
T = 1.0
[group]
k = 2
d = 1
omega = [[[[0.0, 0.0], [1.0, 0.0]], [[-1.0, 0.0], [0.0, 0.0]]]]
[mc]
steps = 16
paths = 100
seed = 7
"#;

    #[test]
    fn loads_minimal_config() {
        let cfg = ExperimentConfig::from_toml(HEIS).unwrap();
        assert_eq!(cfg.group, GroupConfig::heisenberg());
        assert_eq!(cfg.verify.isometry_cases, 100);
        assert_eq!(cfg.hash().len(), 16);
        assert_eq!(cfg.hash(), ExperimentConfig::from_toml(HEIS).unwrap().hash());
    }

    #[test]
    fn missing_omega() {
        let text = HEIS.replace("omega = [[[[0.0, 0.0], [1.0, 0.0]], [[-1.0, 0.0], [0.0, 0.0]]]]", "");
        let err = ExperimentConfig::from_toml(&text).unwrap_err();
        assert_eq!(err.to_string(), "config: omega required");
    }

    #[test]
    fn syntax_errors_carry_a_line() {
        let err = ExperimentConfig::from_toml("T = 1.0\n[group\n").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
    }

    #[test]
    fn json_config() {
        let json = r#"{"T": 0.5, "group": {"k": 1, "d": 1, "omega": [[[[0.0, 0.0]]]]},
                       "mc": {"steps": 4, "paths": 10, "seed": 1}}"#;
        let cfg = ExperimentConfig::from_json(json).unwrap();
        assert_eq!(cfg.t, 0.5);
        assert!(ExperimentConfig::from_json("{\n\"T\": }").is_err());
    }

    #[test]
    fn points_are_checked() {
        let text = format!("{HEIS}\n[skeleton]\npoints = [{{ w = [[1.0, 0.0]], c = [[0.0, 0.0]] }}]\n");
        assert!(ExperimentConfig::from_toml(&text).is_err());
    }
}

//! Run configuration: a JSON file whose fields override per-model defaults.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::continuation::ContinuationOptions;
use crate::detect::DetectOptions;
use crate::model::{user::UserModelFile, ModelSpec, Region, StatePoint, MODEL_NAMES};
use crate::prove::ProveOptions;

/// Largest admissible `r_star`; beyond this the interval boxes stop being
/// "small" and the seeds are usually far from any zero.
pub const R_STAR_MAX: f64 = 1e-6;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ContinuationConfig {
    pub step: Option<f64>,
    pub step_min: Option<f64>,
    pub step_max: Option<f64>,
    pub theta_max_deg: Option<f64>,
    pub node_tol: Option<f64>,
    pub max_nodes: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DetectionConfig {
    /// Largest parameter step of the signed SVD path.
    pub max_arc_step: Option<f64>,
    pub alignment_threshold: Option<f64>,
    pub step4_rtol: Option<f64>,
    pub step4_atol: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProofConfig {
    pub r_star: Option<f64>,
    pub newton_tol: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Bundled model name or path to a user model file.
    pub model: Option<String>,
    pub region: Option<Region>,
    /// Starting equilibrium `(x_1, ..., x_n, lambda_1, lambda_2)`.
    pub seed_point: Option<Vec<f64>>,
    pub continuation: ContinuationConfig,
    pub detection: DetectionConfig,
    pub proof: ProofConfig,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
    /// Leave wall-clock timings out of written reports so that repeated
    /// runs produce identical files.
    pub deterministic: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            model: None,
            region: None,
            seed_point: None,
            continuation: ContinuationConfig::default(),
            detection: DetectionConfig::default(),
            proof: ProofConfig::default(),
            out: None,
            threads: None,
            deterministic: true,
        }
    }
}

fn positive(name: &str, v: Option<f64>) -> Result<(), CliError> {
    match v {
        Some(x) if !(x > 0.0 && x.is_finite()) => Err(CliError::Input(format!("`{name}` must be positive, got {x}"))),
        _ => Ok(()),
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = super::read(path)?;
        let cfg: RunConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let c = &self.continuation;
        for (name, v) in [
            ("continuation.step", c.step),
            ("continuation.step_min", c.step_min),
            ("continuation.step_max", c.step_max),
            ("continuation.theta_max_deg", c.theta_max_deg),
            ("continuation.node_tol", c.node_tol),
            ("detection.max_arc_step", self.detection.max_arc_step),
            ("detection.alignment_threshold", self.detection.alignment_threshold),
            ("detection.step4_rtol", self.detection.step4_rtol),
            ("detection.step4_atol", self.detection.step4_atol),
            ("proof.r_star", self.proof.r_star),
            ("proof.newton_tol", self.proof.newton_tol),
        ] {
            positive(name, v)?;
        }
        if let Some(r) = self.proof.r_star {
            if r > R_STAR_MAX {
                return Err(CliError::Input(format!("`proof.r_star` = {r} exceeds {R_STAR_MAX}")));
            }
        }
        if let Some(t) = self.detection.alignment_threshold {
            if t >= 1.0 {
                return Err(CliError::Input("`detection.alignment_threshold` must be below 1".into()));
            }
        }
        if self.threads == Some(0) || c.max_nodes == Some(0) {
            return Err(CliError::Input("`threads` and `max_nodes` must be at least 1".into()));
        }
        Ok(())
    }

    /// Resolves the model and applies the region and seed overrides.
    pub fn model(&self) -> Result<ModelSpec, CliError> {
        let name = self
            .model
            .as_deref()
            .ok_or_else(|| CliError::Input("no model given; pass --model or set `model` in the config".into()))?;
        let mut m = load_model(name)?;
        if let Some(region) = &self.region {
            region.validate(m.dim()).map_err(|e| CliError::Input(e.to_string()))?;
            m.region = region.clone();
        }
        if let Some(seed) = &self.seed_point {
            if seed.len() != m.dim() {
                return Err(CliError::Input(format!(
                    "--seed-point needs {} values (x_1..x_{}, lambda_1, lambda_2), got {}",
                    m.dim(),
                    m.n,
                    seed.len()
                )));
            }
            m.seed = Some(StatePoint::from_z(seed));
        }
        if let Some(r) = self.proof.r_star {
            m.defaults.r_star = r;
        }
        Ok(m)
    }

    pub fn continuation(&self, m: &ModelSpec) -> Result<ContinuationOptions, CliError> {
        let mut o = ContinuationOptions::for_model(m);
        let c = &self.continuation;
        if let Some(v) = c.step {
            o.step = v;
            o.step_min = c.step_min.unwrap_or(v / 64.0).min(v);
            o.step_max = o.step_max.max(v);
        }
        o.step_min = c.step_min.unwrap_or(o.step_min);
        o.step_max = c.step_max.unwrap_or(o.step_max);
        o.theta_max_deg = c.theta_max_deg.unwrap_or(o.theta_max_deg);
        o.node_tol = c.node_tol.unwrap_or(o.node_tol);
        o.max_nodes = c.max_nodes.unwrap_or(o.max_nodes);
        o.validate().map_err(|e| CliError::Input(e.to_string()))?;
        Ok(o)
    }

    pub fn detection(&self) -> DetectOptions {
        let mut o = DetectOptions::default();
        let d = &self.detection;
        o.svd.max_step = d.max_arc_step.unwrap_or(o.svd.max_step);
        o.svd.threshold = d.alignment_threshold.unwrap_or(o.svd.threshold);
        o.step4_rtol = d.step4_rtol.unwrap_or(o.step4_rtol);
        o.step4_atol = d.step4_atol.unwrap_or(o.step4_atol);
        o
    }

    pub fn proof(&self, m: &ModelSpec) -> ProveOptions {
        let mut o = ProveOptions::for_model(m);
        o.newton_tol = self.proof.newton_tol.unwrap_or(o.newton_tol);
        o
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("out"))
    }
}

/// A bundled model by name, otherwise a user model file by path.
pub fn load_model(name: &str) -> Result<ModelSpec, CliError> {
    if MODEL_NAMES.contains(&name) {
        return ModelSpec::by_name(name).map_err(|e| CliError::Input(e.to_string()));
    }
    let path = Path::new(name);
    if !path.exists() {
        return Err(CliError::Input(format!(
            "unknown model `{name}`: not one of {} and no such file",
            MODEL_NAMES.join(", ")
        )));
    }
    let file: UserModelFile = serde_json::from_str(&super::read(path)?)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    ModelSpec::from_user(file).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

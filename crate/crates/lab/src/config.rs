//! Experiment configuration: a single JSON document, schema-validated
//! before any compute. Unknown keys are rejected everywhere, and numeric
//! ranges are checked up front so a bad config never reaches the runners.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use ergolab_core::gallery::{self, ParamValue, Params};

use crate::LabError;

pub const KINDS: &[&str] = &[
    "return-law",
    "entry-law",
    "thin-annuli",
    "doubling",
    "bad-radii",
    "dimension",
    "pressure",
    "hsv-bound",
    "parabolic-asymptotics",
];

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub system: SystemConfig,
    pub kind: String,
    pub seed: u64,
    pub output: OutputConfig,
    #[serde(default)]
    pub params: serde_json::Value,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    pub name: String,
    #[serde(default)]
    pub params: BTreeMap<String, serde_json::Value>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub csv: String,
    pub summary: String,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, LabError> {
        let config: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| LabError::Config(format!("{e}")))?;
        config.validate()?;
        Ok(config)
    }

    /// Full validation: known kind, parseable kind parameters, constructible
    /// system.
    pub fn validate(&self) -> Result<(), LabError> {
        if !KINDS.contains(&self.kind.as_str()) {
            return Err(LabError::Config(format!(
                "unknown kind `{}`; expected one of {}",
                self.kind,
                KINDS.join(", ")
            )));
        }
        KindParams::parse(&self.kind, &self.params)?;
        let params = self.system.gallery_params()?;
        gallery::make_system(&self.system.name, &params)
            .map_err(|e| LabError::Config(format!("system: {e}")))?;
        Ok(())
    }
}

impl SystemConfig {
    pub fn gallery_params(&self) -> Result<Params, LabError> {
        let mut out = Params::new();
        for (key, value) in &self.params {
            let converted = json_to_param(value).ok_or_else(|| {
                LabError::Config(format!(
                    "system parameter `{key}` must be a number, a vector, or a matrix"
                ))
            })?;
            out.insert(key.clone(), converted);
        }
        Ok(out)
    }

    pub fn build(&self) -> Result<gallery::GallerySystem, LabError> {
        let params = self.gallery_params()?;
        gallery::make_system(&self.name, &params)
            .map_err(|e| LabError::Config(format!("system: {e}")))
    }
}

fn json_to_param(value: &serde_json::Value) -> Option<ParamValue> {
    use serde_json::Value;
    match value {
        Value::Number(x) => Some(ParamValue::Number(x.as_f64()?)),
        Value::Array(items) => {
            if items.iter().all(|v| v.is_number()) {
                let v: Option<Vec<f64>> = items.iter().map(|x| x.as_f64()).collect();
                Some(ParamValue::Vector(v?))
            } else {
                let rows: Option<Vec<Vec<f64>>> = items
                    .iter()
                    .map(|row| {
                        row.as_array()?
                            .iter()
                            .map(|x| x.as_f64())
                            .collect::<Option<Vec<f64>>>()
                    })
                    .collect();
                Some(ParamValue::Matrix(rows?))
            }
        }
        _ => None,
    }
}

fn default_generation_cap() -> u32 {
    48
}

fn default_node_budget() -> u64 {
    1_000_000
}

fn default_true() -> bool {
    true
}

fn default_n_max() -> usize {
    50
}

fn default_k_factor() -> f64 {
    60.0
}

/// κ as configured: exactly one of the two supported forms.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KappaConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constant: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub log_power: Option<LogPowerConfig>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogPowerConfig {
    pub alpha: f64,
    pub beta: f64,
    #[serde(default)]
    pub offset: f64,
}

impl KappaConfig {
    pub fn build(&self) -> Result<ergolab_core::annuli::SubpolynomialFn, LabError> {
        use ergolab_core::annuli::SubpolynomialFn;
        match (&self.constant, &self.log_power) {
            (Some(c), None) => SubpolynomialFn::constant(*c)
                .map_err(|e| LabError::Config(format!("kappa: {e}"))),
            (None, Some(lp)) => SubpolynomialFn::log_power(lp.alpha, lp.beta, lp.offset)
                .map_err(|e| LabError::Config(format!("kappa: {e}"))),
            _ => Err(LabError::Config(
                "kappa needs exactly one of `constant` or `log_power`".into(),
            )),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub word: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ball: Option<BallConfig>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BallConfig {
    pub center: f64,
    pub radius: f64,
}

impl TargetConfig {
    pub fn validate(&self) -> Result<(), LabError> {
        match (&self.word, &self.ball) {
            (Some(w), None) if !w.is_empty() => Ok(()),
            (None, Some(b)) if b.radius > 0.0 => Ok(()),
            _ => Err(LabError::Config(
                "target needs exactly one of a nonempty `word` or a `ball` with positive radius"
                    .into(),
            )),
        }
    }
}

/// Kind-specific parameter blocks.
#[derive(Debug, Clone)]
pub enum KindParams {
    Pressure(PressureParams),
    Hsv(HsvParams),
    Law(LawParams),
    ThinAnnuli(ThinAnnuliParams),
    Doubling(DoublingParams),
    BadRadii(BadRadiiParams),
    Dimension(DimensionParams),
    Parabolic(ParabolicParams),
}

impl KindParams {
    pub fn parse(kind: &str, value: &serde_json::Value) -> Result<Self, LabError> {
        let value = if value.is_null() {
            serde_json::json!({})
        } else {
            value.clone()
        };
        let bad = |e: serde_json::Error| LabError::Config(format!("params: {e}"));
        let parsed = match kind {
            "pressure" => KindParams::Pressure(serde_json::from_value(value).map_err(bad)?),
            "hsv-bound" => KindParams::Hsv(serde_json::from_value(value).map_err(bad)?),
            "entry-law" | "return-law" => {
                KindParams::Law(serde_json::from_value(value).map_err(bad)?)
            }
            "thin-annuli" => KindParams::ThinAnnuli(serde_json::from_value(value).map_err(bad)?),
            "doubling" => KindParams::Doubling(serde_json::from_value(value).map_err(bad)?),
            "bad-radii" => KindParams::BadRadii(serde_json::from_value(value).map_err(bad)?),
            "dimension" => KindParams::Dimension(serde_json::from_value(value).map_err(bad)?),
            "parabolic-asymptotics" => {
                KindParams::Parabolic(serde_json::from_value(value).map_err(bad)?)
            }
            other => return Err(LabError::Config(format!("unknown kind `{other}`"))),
        };
        parsed.check_ranges()?;
        Ok(parsed)
    }

    fn check_ranges(&self) -> Result<(), LabError> {
        let err = |msg: &str| Err(LabError::Config(msg.into()));
        match self {
            KindParams::Hsv(p) => {
                if p.n_max == 0 || p.n_max > 10_000 {
                    return err("n_max must be in 1..=10000");
                }
                if !(p.k_factor >= 1.0 && p.k_factor <= 1e4) {
                    return err("k_factor must be in 1..=1e4");
                }
                if p.targets.is_none() && p.target_depths.is_none() {
                    return err("hsv-bound needs `targets` or `target_depths`");
                }
                if let Some(depths) = &p.target_depths {
                    if depths.iter().any(|&d| d == 0 || d > 12) {
                        return err("target depths must be in 1..=12");
                    }
                }
            }
            KindParams::Law(p) => {
                p.target.validate()?;
                if p.samples == 0 || p.samples > 100_000_000 {
                    return err("samples must be in 1..=1e8");
                }
            }
            KindParams::ThinAnnuli(p) => {
                if p.points == 0 || p.points > 100_000 {
                    return err("points must be in 1..=1e5");
                }
                if !(p.scale_base > 1.0) || p.j_min > p.j_max || p.j_max > 64 {
                    return err("need scale_base > 1 and j_min <= j_max <= 64");
                }
                p.kappa.build()?;
            }
            KindParams::Doubling(p) => {
                if p.points == 0 || p.points > 100_000 {
                    return err("points must be in 1..=1e5");
                }
                if p.j_min < 2 || p.j_min > p.j_max || p.j_max > 64 {
                    return err("need 2 <= j_min <= j_max <= 64");
                }
                if !(p.epsilon > 0.0) {
                    return err("epsilon must be positive");
                }
                if p.alpha_variant != "power" && p.alpha_variant != "log-squared" {
                    return err("alpha_variant must be `power` or `log-squared`");
                }
            }
            KindParams::BadRadii(p) => {
                if !(p.a > 0.0) {
                    return err("threshold a must be positive");
                }
                if p.j_min > p.j_max || p.j_max > 64 {
                    return err("need j_min <= j_max <= 64");
                }
                if !(1.0..2.0).contains(&p.gamma) {
                    return err("gamma must lie in [1, 2)");
                }
                p.kappa.build()?;
            }
            KindParams::Dimension(p) => {
                if p.at.is_none() && (p.points == 0 || p.points > 100_000) {
                    return err("points must be in 1..=1e5");
                }
                if !(p.scale_base > 1.0) || p.j_min > p.j_max || p.j_max > 64 {
                    return err("need scale_base > 1 and j_min <= j_max <= 64");
                }
            }
            KindParams::Parabolic(p) => {
                if p.n_list.is_empty() || p.n_list.iter().any(|&n| n == 0 || n > 10_000) {
                    return err("n_list entries must be in 1..=1e4");
                }
                if !(p.t > 0.5 && p.t <= 4.0) {
                    return err("t must be in (0.5, 4]");
                }
                if p.n_trunc == 0 || p.n_trunc > 100_000 {
                    return err("n_trunc must be in 1..=1e5");
                }
            }
            KindParams::Pressure(_) => {}
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PressureParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bowen_depth: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HsvParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub targets: Option<Vec<Vec<u32>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_depths: Option<Vec<usize>>,
    #[serde(default = "default_n_max")]
    pub n_max: usize,
    /// Survival curves run to `k_factor / μ(U)` steps.
    #[serde(default = "default_k_factor")]
    pub k_factor: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LawParams {
    pub target: TargetConfig,
    pub samples: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<u64>,
    #[serde(default = "default_generation_cap")]
    pub generation_cap: u32,
    #[serde(default = "default_node_budget")]
    pub node_budget: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThinAnnuliParams {
    pub points: usize,
    pub scale_base: f64,
    pub j_min: u32,
    pub j_max: u32,
    pub kappa: KappaConfig,
    #[serde(default = "default_true")]
    pub jitter: bool,
    #[serde(default = "default_generation_cap")]
    pub generation_cap: u32,
    #[serde(default = "default_node_budget")]
    pub node_budget: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DoublingParams {
    pub points: usize,
    pub j_min: u32,
    pub j_max: u32,
    pub epsilon: f64,
    #[serde(default = "default_alpha_variant")]
    pub alpha_variant: String,
    #[serde(default = "default_generation_cap")]
    pub generation_cap: u32,
    #[serde(default = "default_node_budget")]
    pub node_budget: u64,
}

fn default_alpha_variant() -> String {
    "power".into()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BadRadiiParams {
    pub a: f64,
    pub kappa: KappaConfig,
    pub j_min: u32,
    pub j_max: u32,
    #[serde(default)]
    pub jitter: bool,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    #[serde(default = "default_g_epsilon")]
    pub g_epsilon: f64,
    #[serde(default = "default_generation_cap")]
    pub generation_cap: u32,
    #[serde(default = "default_node_budget")]
    pub node_budget: u64,
}

fn default_gamma() -> f64 {
    1.3
}

fn default_g_epsilon() -> f64 {
    0.5
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DimensionParams {
    #[serde(default = "default_points_one")]
    pub points: usize,
    /// Explicit evaluation points override sampling.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub at: Option<Vec<f64>>,
    pub scale_base: f64,
    pub j_min: u32,
    pub j_max: u32,
    #[serde(default = "default_generation_cap")]
    pub generation_cap: u32,
    #[serde(default = "default_node_budget")]
    pub node_budget: u64,
}

fn default_points_one() -> usize {
    1
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParabolicParams {
    #[serde(default = "default_t")]
    pub t: f64,
    #[serde(default = "default_n_trunc")]
    pub n_trunc: usize,
    pub n_list: Vec<u64>,
}

fn default_t() -> f64 {
    0.8
}

fn default_n_trunc() -> usize {
    1000
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base(kind: &str, params: &str) -> String {
        format!(
            r#"{{"system": {{"name": "cantor"}}, "kind": "{kind}", "seed": 1,
                "output": {{"csv": "a.csv", "summary": "a.json"}}, "params": {params}}}"#
        )
    }

    #[test]
    fn parses_and_validates_a_minimal_config() {
        let cfg = ExperimentConfig::from_json(&base("pressure", "{}")).unwrap();
        assert_eq!(cfg.kind, "pressure");
    }

    #[test]
    fn rejects_unknown_keys_at_every_level() {
        assert!(ExperimentConfig::from_json(
            r#"{"system": {"name": "cantor", "oops": 1}, "kind": "pressure", "seed": 1,
                "output": {"csv": "a", "summary": "b"}}"#
        )
        .is_err());
        assert!(ExperimentConfig::from_json(&base(
            "dimension",
            r#"{"scale_base": 3.0, "j_min": 4, "j_max": 8, "spurious": 0}"#
        ))
        .is_err());
    }

    #[test]
    fn target_requires_exactly_one_shape() {
        let both = TargetConfig {
            word: Some(vec![0]),
            ball: Some(BallConfig {
                center: 0.5,
                radius: 0.1,
            }),
        };
        assert!(both.validate().is_err());
        let neither = TargetConfig {
            word: None,
            ball: None,
        };
        assert!(neither.validate().is_err());
    }

    #[test]
    fn system_params_convert_shapes() {
        let cfg: SystemConfig = serde_json::from_str(
            r#"{"name": "markov", "params": {"rows": [[0.5, 0.5], [1.0, 0.0]]}}"#,
        )
        .unwrap();
        let params = cfg.gallery_params().unwrap();
        assert!(matches!(params.get("rows"), Some(ParamValue::Matrix(_))));
        assert!(cfg.build().is_ok());
    }

    #[test]
    fn range_checks_fire() {
        assert!(ExperimentConfig::from_json(&base(
            "doubling",
            r#"{"points": 1, "j_min": 1, "j_max": 8, "epsilon": 0.5}"#
        ))
        .is_err());
        assert!(ExperimentConfig::from_json(&base(
            "parabolic-asymptotics",
            r#"{"n_list": [0]}"#
        ))
        .is_err());
    }
}

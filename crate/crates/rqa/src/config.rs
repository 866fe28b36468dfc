//! TOML configuration. Every section and key is optional.
//!
//! ```toml
//! [kinematics]
//! d1 = 0.089159          # UR5 dimensions in metres, any subset
//! negated_links = false  # tables that print a2, a3 as negative
//! # rows = [[alpha_prev, a_prev, d, theta_home], ...]  full table instead
//!
//! [decision]
//! normalization = "batch"   # batch | fixed | grouped
//! max_distance_mm = 1700.0  # fixed mode
//! rotation = "vector"       # vector | approach_axis
//! group_by = "category"     # grouped mode: category | distortion | level | reference
//!
//! [evaluation]
//! repetitions = 10
//! train_ratio = 0.8
//! split_unit = "reference"  # reference | pair
//! logistic_fit = false
//!
//! [registry.overrides]
//! 1 = [[0.4], [0.9], [1.5], [2.5], [4.0]]
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use rqa_core::distort::DistortionRegistry;
use rqa_core::kinematics::{DHRow, DHTable, Ur5Dimensions};
use rqa_core::pose::{RotationMode, DEFAULT_MAX_DISTANCE_MM};
use rqa_core::protocol::{ProtocolConfig, ScoreFamily, SplitUnit};
use rqa_core::DistortionKind;
use serde::Deserialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub kinematics: KinematicsConfig,
    pub decision: DecisionConfig,
    pub evaluation: EvaluationConfig,
    pub registry: RegistryConfig,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KinematicsConfig {
    #[serde(flatten)]
    pub dims: Ur5Dimensions,
    pub negated_links: bool,
    pub rows: Option<Vec<[f64; 4]>>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    #[default]
    Batch,
    Fixed,
    Grouped,
}

/// Grouping key for the grouped normalization mode.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupBy {
    #[default]
    Category,
    Distortion,
    Level,
    Reference,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecisionConfig {
    pub normalization: Normalization,
    pub max_distance_mm: f64,
    pub rotation: RotationMode,
    pub group_by: GroupBy,
}

impl Default for DecisionConfig {
    fn default() -> Self {
        Self {
            normalization: Normalization::Batch,
            max_distance_mm: DEFAULT_MAX_DISTANCE_MM,
            rotation: RotationMode::Vector,
            group_by: GroupBy::Category,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvaluationConfig {
    pub repetitions: usize,
    pub train_ratio: f64,
    pub split_unit: SplitUnit,
    pub logistic_fit: bool,
}

impl Default for EvaluationConfig {
    fn default() -> Self {
        let p = ProtocolConfig::default();
        Self {
            repetitions: p.repetitions,
            train_ratio: p.train_ratio,
            split_unit: p.unit,
            logistic_fit: p.logistic_fit,
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RegistryConfig {
    /// Distortion id to its five level parameter vectors.
    pub overrides: BTreeMap<String, Vec<Vec<f64>>>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let config: Config = toml::from_str(&text).map_err(|e| Error::parse(path, e))?;
        config.dh_table().map_err(|e| Error::parse(path, e))?;
        config.registry().map_err(|e| Error::parse(path, e))?;
        if config.decision.max_distance_mm.is_nan() || config.decision.max_distance_mm <= 0.0 {
            return Err(Error::parse(path, "decision.max_distance_mm must be positive"));
        }
        Ok(config)
    }

    pub fn load_or_default(path: Option<&Path>) -> Result<Self> {
        path.map_or_else(|| Ok(Self::default()), Self::load)
    }

    pub fn dh_table(&self) -> Result<DHTable> {
        let k = &self.kinematics;
        let table = match &k.rows {
            Some(rows) => {
                let rows: [[f64; 4]; 6] = rows
                    .as_slice()
                    .try_into()
                    .map_err(|_| Error::invalid(format!("kinematics.rows needs 6 rows, got {}", rows.len())))?;
                let rows = rows.map(|[alpha_prev, a_prev, d, theta_home]| DHRow { alpha_prev, a_prev, d, theta_home });
                DHTable::new(rows).map_err(Error::invalid)?
            }
            None if k.negated_links => DHTable::ur5(k.dims.negated_links()),
            None => DHTable::ur5(k.dims),
        };
        for row in table.rows() {
            row.validate().map_err(Error::invalid)?;
        }
        Ok(table)
    }

    pub fn registry(&self) -> Result<DistortionRegistry> {
        let mut reg = DistortionRegistry::default();
        for (key, levels) in &self.registry.overrides {
            let id: u8 = key
                .trim()
                .parse()
                .map_err(|_| Error::invalid(format!("registry override key {key:?} is not a distortion id")))?;
            let kind = DistortionKind::from_id(id).map_err(Error::invalid)?;
            let levels: [Vec<f64>; 5] = levels.clone().try_into().map_err(|v: Vec<_>| {
                Error::invalid(format!("registry override for {id} needs 5 levels, got {}", v.len()))
            })?;
            reg.override_levels(kind, levels).map_err(Error::invalid)?;
        }
        Ok(reg)
    }

    pub fn protocol(&self, seed: u64, family: ScoreFamily) -> ProtocolConfig {
        let e = &self.evaluation;
        ProtocolConfig {
            repetitions: e.repetitions,
            train_ratio: e.train_ratio,
            seed,
            unit: e.split_unit,
            logistic_fit: e.logistic_fit,
            family,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> std::result::Result<Config, toml::de::Error> {
        toml::from_str(text)
    }

    #[test]
    fn documented_example_parses() {
        let text: String = include_str!("config.rs")
            .lines()
            .take_while(|l| l.starts_with("//!"))
            .skip_while(|l| !l.contains("```toml"))
            .skip(1)
            .take_while(|l| !l.contains("```"))
            .map(|l| l.trim_start_matches("//!").trim_start())
            .collect::<Vec<_>>()
            .join("\n");
        let c = parse(&text).unwrap();
        assert_eq!(c.kinematics.dims.d1, 0.089159);
        assert_eq!(c.decision.normalization, Normalization::Batch);
        assert_eq!(c.registry().unwrap().templates()[0].params(rqa_core::Level::new(1).unwrap()), &[0.4]);
        assert_eq!(c.evaluation.repetitions, 10);
    }

    #[test]
    fn partial_dimensions_keep_defaults() {
        let c = parse("[kinematics]\na2 = 0.5\n").unwrap();
        assert_eq!(c.kinematics.dims.a2, 0.5);
        assert_eq!(c.kinematics.dims.d1, Ur5Dimensions::default().d1);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse("[decision]\nnormalisation = \"fixed\"\n").is_err());
        assert!(parse("[decision]\nnormalization = \"median\"\n").is_err());
        assert!(parse("[kinematics]\nd7 = 0.1\n").is_err());
        assert!(parse("[kinematics]\nrows = [[0.0, 0.0, 0.1, 0.0]]\n").unwrap().dh_table().is_err());
        assert!(parse("[registry.overrides]\n99 = [[1.0]]\n").unwrap().registry().is_err());
        assert!(parse("[registry.overrides]\n1 = [[1.0], [2.0]]\n").unwrap().registry().is_err());
    }

    #[test]
    fn fixed_mode_round_trip() {
        let c = parse("[decision]\nnormalization = \"fixed\"\nmax_distance_mm = 850.0\nrotation = \"approach_axis\"\n")
            .unwrap();
        assert_eq!(c.decision.normalization, Normalization::Fixed);
        assert_eq!(c.decision.max_distance_mm, 850.0);
        assert_eq!(c.decision.rotation, RotationMode::ApproachAxis);
        let p = c.protocol(3, ScoreFamily::Cognition);
        assert_eq!((p.seed, p.family, p.repetitions), (3, ScoreFamily::Cognition, 10));
    }
}

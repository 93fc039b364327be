//! JSON run configuration for `pathdev train`.

use std::fs;
use std::path::{Path, PathBuf};

use pathdev::liealg::AlgebraSpec;
use pathdev::train::{
    gen_rigid_motion_dataset, gen_rotation_dataset, Dataset, InputMode, RigidMotionParams, TrainConfig,
};
use serde::{Deserialize, Serialize};

use crate::csvio::{join_dataset, open_input, read_series, read_targets, source_name};
use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub algebra: AlgebraSpec,
    pub data: DataConfig,
    #[serde(default)]
    pub model: ModelConfig,
    #[serde(default)]
    pub train: TrainConfig,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("run")
}

/// Where samples come from. The first `train` samples form the training
/// split, the next `val` the validation split, the remainder the test split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case", deny_unknown_fields)]
pub enum DataConfig {
    Csv {
        series: PathBuf,
        targets: PathBuf,
        train: usize,
        val: usize,
    },
    Rotation {
        n: usize,
        noise: f64,
        seed: u64,
        train: usize,
        val: usize,
    },
    RigidMotion {
        n: usize,
        horizon: usize,
        seed: u64,
        #[serde(default)]
        params: RigidMotionParams,
        train: usize,
        val: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HeadKind {
    /// Affine readout of the flattened final state.
    #[default]
    Linear,
    /// Final SE(2) state applied to the last observed position.
    Se2Action,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelConfig {
    pub input_mode: InputMode,
    pub head: HeadKind,
}

impl RunConfig {
    pub fn parse(text: &str, source: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Input(format!("{source}: invalid run config: {e}")))
    }

    /// Reads a config file, resolving relative data and output paths against
    /// the file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let mut config = Self::parse(&text, &path.display().to_string())?;
        let base = path.parent().unwrap_or(Path::new("."));
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() && p != Path::new("-") {
                *p = base.join(&*p);
            }
        };
        if let DataConfig::Csv { series, targets, .. } = &mut config.data {
            resolve(series);
            resolve(targets);
        }
        resolve(&mut config.output_dir);
        Ok(config)
    }

    /// The config with every default spelled out.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes") + "\n"
    }

    pub fn validate(&self) -> Result<()> {
        self.train.validate()?;
        if self.model.head == HeadKind::Se2Action && self.algebra != AlgebraSpec::se2() {
            return Err(CliError::Input(format!(
                "the se2_action head needs algebra SE2(3), got {}",
                self.algebra
            )));
        }
        Ok(())
    }

    pub fn load_dataset(&self) -> Result<Dataset> {
        let (dataset, train, val) = match &self.data {
            DataConfig::Csv {
                series,
                targets,
                train,
                val,
            } => {
                let s = read_series(open_input(series)?, &source_name(series))?;
                let t = read_targets(open_input(targets)?, &source_name(targets))?;
                (join_dataset(s, t)?, *train, *val)
            }
            DataConfig::Rotation {
                n,
                noise,
                seed,
                train,
                val,
            } => (gen_rotation_dataset(*n, *noise, *seed)?, *train, *val),
            DataConfig::RigidMotion {
                n,
                horizon,
                seed,
                params,
                train,
                val,
            } => (gen_rigid_motion_dataset(*n, *horizon, *params, *seed)?, *train, *val),
        };
        if train == 0 || train + val > dataset.len() {
            return Err(CliError::Input(format!(
                "split sizes train={train}, val={val} do not fit {} samples",
                dataset.len()
            )));
        }
        Ok(dataset.assign_splits(train, val))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "algebra": {"family": "SO", "order": 4},
        "data": {"source": "rotation", "n": 20, "noise": 0.0, "seed": 1, "train": 10, "val": 5}
    }"#;

    #[test]
    fn defaults_are_materialized() {
        let config = RunConfig::parse(MINIMAL, "c").unwrap();
        let json: serde_json::Value = serde_json::from_str(&config.to_json()).unwrap();
        assert_eq!(json["train"]["learning_rate"], 1e-3);
        assert_eq!(json["train"]["lr_decay"], 0.997);
        assert_eq!(json["model"]["input_mode"], "raw");
        assert_eq!(json["model"]["head"], "linear");
        assert_eq!(json["output_dir"], "run");
        assert_eq!(RunConfig::parse(&config.to_json(), "c").unwrap(), config);
    }

    #[test]
    fn unknown_keys_rejected() {
        let extra = MINIMAL.replacen('{', r#"{"surprise": 1,"#, 1);
        assert!(RunConfig::parse(&extra, "c").is_err());
        let nested = MINIMAL.replace(r#""train": 10"#, r#""train": 10, "shuffle": true"#);
        assert!(RunConfig::parse(&nested, "c").is_err());
        let in_train = MINIMAL.replacen('{', r#"{"train": {"lr": 1},"#, 1);
        assert!(RunConfig::parse(&in_train, "c").is_err());
    }

    #[test]
    fn se2_head_requires_se2_algebra() {
        let mut config = RunConfig::parse(MINIMAL, "c").unwrap();
        config.model.head = HeadKind::Se2Action;
        assert!(config.validate().is_err());
        config.algebra = AlgebraSpec::se2();
        assert!(config.validate().is_ok());
    }

    #[test]
    fn oversized_splits_rejected() {
        let config = RunConfig::parse(&MINIMAL.replace(r#""train": 10"#, r#""train": 30"#), "c").unwrap();
        assert!(config.load_dataset().is_err());
    }
}

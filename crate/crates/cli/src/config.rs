//! Run configuration: defaults, a flat key=value config file, and
//! command-line overrides, merged in that order. Unknown keys are
//! rejected. Environment variables are never consulted.

use crate::error::CliError;
use cueball_core::imaging::Half;
use cueball_core::model::ModelParams;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Default)]
pub struct RunConfig {
    pub images: Option<PathBuf>,
    pub labels: Option<PathBuf>,
    pub weights_dir: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub groups: Option<usize>,
    pub cues_per_group: Option<usize>,
    pub pixels: Option<usize>,
    pub theta: Option<f64>,
    pub activation_threshold: Option<f64>,
    pub forward_rate: Option<f64>,
    pub backward_rate: Option<f64>,
    pub recall_threshold: Option<f64>,
    pub pattern: Option<usize>,
    pub group: Option<usize>,
    pub mask: Option<Half>,
    pub renormalize: bool,
    /// Reserved for commands that sample; accepted so config files can
    /// pin it alongside everything else.
    pub seed: Option<u64>,
}

impl RunConfig {
    /// Parses a flat `key = value` file ('#' starts a comment).
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Config(format!("cannot read config {}: {e}", path.display()))
        })?;
        let mut config = RunConfig::default();
        for (lineno, raw_line) in text.lines().enumerate() {
            let line = raw_line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Config(format!(
                    "{}:{}: expected key = value, got '{line}'",
                    path.display(),
                    lineno + 1
                ))
            })?;
            config
                .set(key.trim(), value.trim())
                .map_err(|e| CliError::Config(format!("{}:{}: {e}", path.display(), lineno + 1)))?;
        }
        Ok(config)
    }

    fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, String>
        where
            T::Err: std::fmt::Display,
        {
            value
                .parse()
                .map_err(|e| format!("bad value '{value}' for {key}: {e}"))
        }
        match key {
            "images" => self.images = Some(PathBuf::from(value)),
            "labels" => self.labels = Some(PathBuf::from(value)),
            "weights_dir" => self.weights_dir = Some(PathBuf::from(value)),
            "out_dir" => self.out_dir = Some(PathBuf::from(value)),
            "out" => self.out = Some(PathBuf::from(value)),
            "groups" => self.groups = Some(parse(key, value)?),
            "cues_per_group" => self.cues_per_group = Some(parse(key, value)?),
            "pixels" => self.pixels = Some(parse(key, value)?),
            "theta" => self.theta = Some(parse(key, value)?),
            "activation_threshold" => self.activation_threshold = Some(parse(key, value)?),
            "forward_rate" => self.forward_rate = Some(parse(key, value)?),
            "backward_rate" => self.backward_rate = Some(parse(key, value)?),
            "recall_threshold" => self.recall_threshold = Some(parse(key, value)?),
            "pattern" => self.pattern = Some(parse(key, value)?),
            "group" => self.group = Some(parse(key, value)?),
            "mask" => self.mask = Some(parse(key, value)?),
            "renormalize" => self.renormalize = parse(key, value)?,
            "seed" => self.seed = Some(parse(key, value)?),
            other => return Err(format!("unknown key '{other}'")),
        }
        Ok(())
    }

    /// Overlays `other` (command-line values) on top of this config.
    pub fn merge(mut self, other: RunConfig) -> Self {
        macro_rules! take {
            ($($field:ident),*) => {
                $(if other.$field.is_some() { self.$field = other.$field; })*
            };
        }
        take!(
            images, labels, weights_dir, out_dir, out, groups, cues_per_group, pixels, theta,
            activation_threshold, forward_rate, backward_rate, recall_threshold, pattern, group,
            mask, seed
        );
        self.renormalize |= other.renormalize;
        self
    }

    /// Model parameters for training: explicit values over the defaults.
    pub fn training_params(&self) -> ModelParams<f64> {
        let defaults = ModelParams::default();
        ModelParams {
            learning_target: self.theta.unwrap_or(defaults.learning_target),
            activation_threshold: self
                .activation_threshold
                .unwrap_or(defaults.activation_threshold),
            forward_rate: self.forward_rate.unwrap_or(defaults.forward_rate),
            backward_rate: self.backward_rate.unwrap_or(defaults.backward_rate),
            groups: self.groups.unwrap_or(defaults.groups),
            cues_per_group: self.cues_per_group.unwrap_or(defaults.cues_per_group),
            pixels: self.pixels.unwrap_or(defaults.pixels),
            recall_threshold: self.recall_threshold.unwrap_or(defaults.recall_threshold),
        }
    }

    pub fn weights_dir(&self) -> PathBuf {
        self.weights_dir.clone().unwrap_or_else(|| "weights".into())
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out_dir.clone().unwrap_or_else(|| "out".into())
    }

    pub fn require_images(&self) -> Result<&Path, CliError> {
        self.images
            .as_deref()
            .ok_or_else(|| CliError::Config("no images file given (use --images)".into()))
    }

    pub fn require_pattern(&self) -> Result<usize, CliError> {
        self.pattern
            .ok_or_else(|| CliError::Config("no pattern number given (use --pattern)".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_config(text: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(text.as_bytes()).unwrap();
        f
    }

    #[test]
    fn parses_values_and_comments() {
        let f = write_config(
            "# model\nimages = data/train.idx\ngroups = 3\ntheta = 100.0\nmask = top\nrenormalize = true\n",
        );
        let cfg = RunConfig::from_file(f.path()).unwrap();
        assert_eq!(cfg.images.unwrap(), PathBuf::from("data/train.idx"));
        assert_eq!(cfg.groups, Some(3));
        assert_eq!(cfg.theta, Some(100.0));
        assert_eq!(cfg.mask, Some(Half::Top));
        assert!(cfg.renormalize);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        let f = write_config("bogus = 1\n");
        assert!(RunConfig::from_file(f.path()).is_err());
        let f = write_config("groups = many\n");
        assert!(RunConfig::from_file(f.path()).is_err());
        let f = write_config("groups\n");
        assert!(RunConfig::from_file(f.path()).is_err());
    }

    #[test]
    fn command_line_overrides_file_values() {
        let file = RunConfig::from_file(write_config("groups = 3\ncues_per_group = 10\n").path())
            .unwrap();
        let cli = RunConfig {
            cues_per_group: Some(99),
            ..RunConfig::default()
        };
        let merged = file.merge(cli);
        assert_eq!(merged.groups, Some(3));
        assert_eq!(merged.cues_per_group, Some(99));
    }

    #[test]
    fn training_params_fall_back_to_defaults() {
        let cfg = RunConfig {
            theta: Some(120.0),
            ..RunConfig::default()
        };
        let params = cfg.training_params();
        assert_eq!(params.learning_target, 120.0);
        assert_eq!(params.activation_threshold, 90.0);
        assert_eq!(params.cues_per_group, 1000);
    }
}

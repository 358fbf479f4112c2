//! Experiment files.
//!
//! ```toml
//! channel = "amplitude_damping(0.2)"
//! scheme = "all"            # or sqpt | aapt_jsm | aapt_mub | aapt_povm | dcqd
//! mode = "sampled"          # or exact
//! shots_per_config = 10000
//! master_seed = 42
//! trials = 20
//! output_dir = "results"
//! alpha_sq = 0.8            # DCQD coherence inputs
//! input_kind = "werner(0.3)" # AAPT-JSM input: bell | werner(ε)
//! formats = ["csv", "json", "md"]
//! ```

use std::path::{Path, PathBuf};

use qpt_core::aapt_jsm::JsmInputKind;
use qpt_core::dispatch::SchemeOptions;
use qpt_core::stats::Scheme;
use qpt_core::{ChannelSpec, Mode};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeKind {
    Exact,
    Sampled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Md,
}

/// Raw file contents before validation.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    channel: String,
    #[serde(default = "default_scheme")]
    scheme: String,
    #[serde(default = "default_mode")]
    mode: ModeKind,
    #[serde(default)]
    shots_per_config: u64,
    #[serde(default)]
    master_seed: u64,
    #[serde(default = "default_trials")]
    trials: u64,
    #[serde(default = "default_output_dir")]
    output_dir: PathBuf,
    #[serde(default = "default_alpha_sq")]
    alpha_sq: f64,
    #[serde(default = "default_input_kind")]
    input_kind: String,
    #[serde(default = "default_formats")]
    formats: Vec<Format>,
}

fn default_scheme() -> String {
    "all".into()
}
fn default_mode() -> ModeKind {
    ModeKind::Exact
}
fn default_trials() -> u64 {
    1
}
fn default_output_dir() -> PathBuf {
    PathBuf::from("qpt-output")
}
fn default_alpha_sq() -> f64 {
    0.8
}
fn default_input_kind() -> String {
    "bell".into()
}
fn default_formats() -> Vec<Format> {
    vec![Format::Csv, Format::Json, Format::Md]
}

/// A validated experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub channel: ChannelSpec,
    pub schemes: Vec<Scheme>,
    pub mode: ModeKind,
    pub shots_per_config: u64,
    pub master_seed: u64,
    pub trials: u64,
    pub output_dir: PathBuf,
    pub alpha_sq: f64,
    pub input_kind: JsmInputKind,
    pub formats: Vec<Format>,
}

fn invalid(field: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Validation { field: field.to_string(), message: msg.to_string() }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, CliError> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| invalid("config", e.message()))?;
        let channel: ChannelSpec = raw.channel.parse().map_err(|e| invalid("channel", e))?;
        let schemes = if raw.scheme.trim().eq_ignore_ascii_case("all") {
            Scheme::ALL.to_vec()
        } else {
            vec![raw.scheme.parse::<Scheme>().map_err(|e| invalid("scheme", e))?]
        };
        if raw.mode == ModeKind::Sampled && raw.shots_per_config == 0 {
            return Err(invalid("shots_per_config", "sampled mode needs at least one shot per configuration"));
        }
        if raw.trials == 0 {
            return Err(invalid("trials", "at least one trial is required"));
        }
        if !(raw.alpha_sq > 0.0 && raw.alpha_sq < 1.0) || (raw.alpha_sq - 0.5).abs() < 1e-9 {
            return Err(invalid("alpha_sq", "must lie in (0, 1) and differ from 1/2"));
        }
        let input_kind = raw.input_kind.parse().map_err(|e| invalid("input_kind", e))?;
        if raw.formats.is_empty() {
            return Err(invalid("formats", "at least one output format is required"));
        }
        Ok(ExperimentConfig {
            channel,
            schemes,
            mode: raw.mode,
            shots_per_config: raw.shots_per_config,
            master_seed: raw.master_seed,
            trials: raw.trials,
            output_dir: raw.output_dir,
            alpha_sq: raw.alpha_sq,
            input_kind,
            formats: raw.formats,
        })
    }

    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)?;
        let mut cfg = Self::from_toml_str(&text)?;
        // relative channel files resolve against the config's directory
        if let ChannelSpec::KrausFile(p) = &cfg.channel {
            if p.is_relative() {
                if let Some(dir) = path.parent() {
                    cfg.channel = ChannelSpec::KrausFile(dir.join(p));
                }
            }
        }
        Ok(cfg)
    }

    pub fn options(&self) -> SchemeOptions {
        SchemeOptions { alpha_sq: self.alpha_sq, jsm_input: self.input_kind }
    }

    /// Sampling mode for one run with the given seed.
    pub fn mode_with_seed(&self, seed: u64) -> Mode {
        match self.mode {
            ModeKind::Exact => Mode::Exact,
            ModeKind::Sampled => Mode::Sampled { shots: self.shots_per_config, seed },
        }
    }
}

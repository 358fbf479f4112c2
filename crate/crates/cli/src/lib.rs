//! Experiment runner behind the `qpt` binary.
//!
//! [`run_experiment`] reconstructs a channel with the configured schemes
//! over seeded trials; [`emit_report`] writes the comparison as CSV, JSON
//! and markdown. Output is a pure function of the configuration.

pub mod config;
pub mod error;
pub mod render;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use qpt_core::channels::{kraus_to_chi, named_channel};
use qpt_core::dcqd::{dcqd_full, Amplitudes, ConfigRecord};
use qpt_core::dispatch::reconstruct;
use qpt_core::measurement::{derive_seed, RandomSource};
use qpt_core::qcore::MatrixJson;
use qpt_core::sqpt::project_psd;
use qpt_core::stats::{chi_distance_metrics, Scheme};
use qpt_core::{ChannelSpec, Mode};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use config::{ExperimentConfig, Format, ModeKind};
pub use error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

/// One scheme on one trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRow {
    pub scheme: Scheme,
    pub trial: u64,
    pub frobenius: f64,
    /// QCB between the normalized truth and the PSD-clipped estimate.
    pub qcb: f64,
    pub configs: u64,
    pub shots: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeSummary {
    pub scheme: Scheme,
    pub config_count: u64,
    pub total_shots: u64,
    pub mean_frobenius: f64,
    pub std_frobenius: f64,
    pub mean_qcb: f64,
    /// Estimate from trial 0.
    pub chi_est: MatrixJson,
    /// Scheme diagnostics from trial 0.
    pub diagnostics: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub schema_version: u32,
    pub channel: String,
    pub n: usize,
    pub mode: ModeKind,
    pub shots_per_config: u64,
    pub master_seed: u64,
    pub trials: u64,
    pub rng: String,
    pub alpha_sq: f64,
    pub input_kind: String,
    pub chi_true: MatrixJson,
    pub summaries: Vec<SchemeSummary>,
    pub rows: Vec<TrialRow>,
    /// Measured but never written to files.
    #[serde(skip)]
    pub wall_time: Duration,
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = if xs.len() > 1 { xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
    (mean, var.sqrt())
}

/// Seed for `(trial, scheme)`; independent of scheduling.
pub fn run_seed(master: u64, trial: u64, scheme: Scheme) -> u64 {
    let idx = Scheme::ALL.iter().position(|s| *s == scheme).unwrap_or(0) as u64;
    derive_seed(derive_seed(master, trial), idx)
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ComparisonReport, CliError> {
    let start = Instant::now();
    let channel = named_channel(&cfg.channel)?;
    let truth = kraus_to_chi(&channel);
    let opts = cfg.options();

    let jobs: Vec<(Scheme, u64)> =
        cfg.schemes.iter().flat_map(|&s| (0..cfg.trials).map(move |t| (s, t))).collect();
    let results: Vec<Result<(TrialRow, Option<(MatrixJson, BTreeMap<String, f64>)>), CliError>> = jobs
        .par_iter()
        .map(|&(scheme, trial)| {
            let seed = run_seed(cfg.master_seed, trial, scheme);
            let r = reconstruct(scheme, &channel, &opts, cfg.mode_with_seed(seed))?;
            let metrics = chi_distance_metrics(&project_psd(&r.chi), &truth)?;
            let row = TrialRow {
                scheme,
                trial,
                frobenius: r.chi.frobenius_distance(&truth),
                qcb: metrics.qcb,
                configs: r.config_count,
                shots: r.total_shots,
                seed,
            };
            Ok((row, (trial == 0).then(|| (MatrixJson::from(r.chi.matrix()), r.diagnostics))))
        })
        .collect();

    let mut rows = Vec::with_capacity(results.len());
    let mut first = BTreeMap::new();
    for r in results {
        let (row, chi) = r?;
        if let Some(c) = chi {
            first.insert(row.scheme, c);
        }
        rows.push(row);
    }
    let summaries = cfg
        .schemes
        .iter()
        .map(|&s| {
            let mine: Vec<&TrialRow> = rows.iter().filter(|r| r.scheme == s).collect();
            let (mean_frobenius, std_frobenius) = mean_std(&mine.iter().map(|r| r.frobenius).collect::<Vec<_>>());
            let (mean_qcb, _) = mean_std(&mine.iter().map(|r| r.qcb).collect::<Vec<_>>());
            SchemeSummary {
                scheme: s,
                config_count: mine[0].configs,
                total_shots: mine[0].shots,
                mean_frobenius,
                std_frobenius,
                mean_qcb,
                chi_est: first[&s].0.clone(),
                diagnostics: first[&s].1.clone(),
            }
        })
        .collect();

    Ok(ComparisonReport {
        schema_version: SCHEMA_VERSION,
        channel: cfg.channel.to_string(),
        n: channel.n(),
        mode: cfg.mode,
        shots_per_config: cfg.shots_per_config,
        master_seed: cfg.master_seed,
        trials: cfg.trials,
        rng: RandomSource::ALGORITHM.to_string(),
        alpha_sq: cfg.alpha_sq,
        input_kind: cfg.input_kind.to_string(),
        chi_true: MatrixJson::from(truth.matrix()),
        summaries,
        rows,
        wall_time: start.elapsed(),
    })
}

/// Writes `report.{csv,json,md}` for the requested formats into `dir`.
pub fn emit_report(report: &ComparisonReport, dir: &Path, formats: &[Format]) -> Result<Vec<PathBuf>, CliError> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for f in formats {
        let path = match f {
            Format::Csv => {
                let p = dir.join("report.csv");
                std::fs::write(&p, render::report_csv(report)?)?;
                p
            }
            Format::Json => {
                let p = dir.join("report.json");
                let mut text = serde_json::to_string_pretty(report)?;
                text.push('\n');
                std::fs::write(&p, text)?;
                p
            }
            Format::Md => {
                let p = dir.join("report.md");
                std::fs::write(&p, render::report_markdown(report))?;
                p
            }
        };
        written.push(path);
    }
    Ok(written)
}

/// JSON body of `qpt dcqd run`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DcqdRunReport {
    pub schema_version: u32,
    pub channel: String,
    pub alpha_sq: f64,
    pub shots: Option<u64>,
    pub seed: Option<u64>,
    pub rng: String,
    pub config_count: u64,
    pub total_shots: u64,
    /// Bell order Φ+, Ψ+, Ψ−, Φ−.
    pub populations: Vec<f64>,
    pub inversion_depth: [[usize; 4]; 4],
    pub asymmetry_residual: f64,
    /// Raw Bell frequencies per configuration.
    pub records: Vec<ConfigRecord>,
    pub chi: MatrixJson,
    pub frobenius_error: f64,
}

pub fn dcqd_run(spec: &ChannelSpec, alpha_sq: f64, shots: Option<u64>, seed: u64) -> Result<DcqdRunReport, CliError> {
    if !(alpha_sq > 0.0 && alpha_sq < 1.0) {
        return Err(CliError::Validation { field: "alpha_sq".into(), message: format!("must lie in (0, 1), got {alpha_sq}") });
    }
    let channel = named_channel(spec)?;
    let mode = match shots {
        Some(0) => return Err(CliError::Validation { field: "shots".into(), message: "must be at least 1".into() }),
        Some(s) => Mode::Sampled { shots: s, seed },
        None => Mode::Exact,
    };
    let r = dcqd_full(&channel, &Amplitudes::from_alpha_sq(alpha_sq), mode)?;
    let truth = kraus_to_chi(&channel);
    Ok(DcqdRunReport {
        schema_version: SCHEMA_VERSION,
        channel: spec.to_string(),
        alpha_sq,
        shots,
        seed: shots.map(|_| seed),
        rng: RandomSource::ALGORITHM.to_string(),
        config_count: r.config_count,
        total_shots: r.total_shots,
        populations: r.populations.clone(),
        inversion_depth: r.inversion_depth,
        asymmetry_residual: r.asymmetry_residual,
        frobenius_error: r.chi.frobenius_distance(&truth),
        chi: MatrixJson::from(r.chi.matrix()),
        records: r.records,
    })
}

//! The four runnable stages: feature extraction, training, cross-validated
//! comparison and table derivation.
//!
//! Every command takes a resolved [`RunConfig`] and an output directory, and
//! every file it writes starts with the configuration as `#` comments, so a
//! run can be reproduced from any of its outputs.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::evaluation::{cross_validate, CrossValidation, FoldSummary, Metric};
use crate::hrv::{extract_features, FeatureRecord, FEATURE_NAMES};
use crate::io::{
    read_features, read_means, read_record, render_history, render_loss_trace, render_weights,
    write_output, RecordData,
};
use crate::mlp::{MlpTopology, Standardizer};
use crate::published;
use crate::report::{num, AlgorithmRow, Comparison};
use crate::rng::derive_seed;
use crate::signal::{detect_r_peaks, preprocess_with, rr_from_peaks, RrSeries, Signal};
use crate::training::{train_network, MlpTrainer, Variant};

/// Files written by a command plus human-readable notes (warnings, results).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CommandOutput {
    pub files: Vec<PathBuf>,
    pub notes: Vec<String>,
}

fn header(config: &RunConfig, command: &str) -> String {
    format!("# command = {command}\n{}", config.render_with_prefix("# "))
}

/// A record file and the class label to attach to it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecordSpec {
    pub path: PathBuf,
    pub label: u8,
}

/// RR series of one record file: raw signals go through preprocessing and
/// beat detection, RR files are used as is.
pub fn record_rr(path: &Path, config: &RunConfig) -> Result<RrSeries> {
    let in_record = |e: Error| match e {
        Error::InsufficientData(m) => Error::InsufficientData(format!("{}: {m}", path.display())),
        Error::InvalidInput(m) => Error::InvalidInput(format!("{}: {m}", path.display())),
        other => other,
    };
    match read_record(path)? {
        RecordData::Rr(intervals) => RrSeries::new(intervals).map_err(in_record),
        RecordData::Signal(samples) => {
            let signal = Signal::new(samples, config.fs).map_err(in_record)?;
            let clean = preprocess_with(&signal, config.cutoff_hz, config.filter_order, config.hampel_sigmas)?;
            let peaks = detect_r_peaks(&clean);
            rr_from_peaks(&peaks, config.fs).map_err(|e| match e {
                Error::InsufficientData(_) => Error::InsufficientData(format!(
                    "{}: only {} beats detected, at least 3 are needed",
                    path.display(),
                    peaks.len()
                )),
                other => other,
            })
        }
    }
}

/// Extracts one feature row per record into `features.csv`.
pub fn cmd_extract(records: &[RecordSpec], config: &RunConfig, out_dir: &Path) -> Result<CommandOutput> {
    if records.is_empty() {
        return Err(Error::InvalidInput("no input records given".into()));
    }
    if let Some(r) = records.iter().find(|r| r.label > 1) {
        return Err(Error::InvalidInput(format!("label for {} must be 0 or 1, got {}", r.path.display(), r.label)));
    }
    let rows: Vec<FeatureRecord> = records
        .par_iter()
        .map(|r| {
            let rr = record_rr(&r.path, config)?;
            extract_features(&rr).map_err(|e| match e {
                Error::InsufficientData(m) => Error::InsufficientData(format!("{}: {m}", r.path.display())),
                other => other,
            })
        })
        .collect::<Result<_>>()?;

    let mut out = CommandOutput::default();
    let mut csv = header(config, "extract");
    let _ = writeln!(csv, "record,{},label", FEATURE_NAMES.join(","));
    for (spec, f) in records.iter().zip(&rows) {
        let values: Vec<String> = f.to_array().iter().map(|v| v.to_string()).collect();
        let _ = writeln!(csv, "{},{},{}", spec.path.display(), values.join(","), spec.label);
        if f.ratio_undefined {
            out.notes.push(format!("{}: SD1/SD2 ratio undefined (SD2 = 0), written as 0", spec.path.display()));
        }
        if f.breathing_low_confidence {
            out.notes.push(format!("{}: breathing-rate estimate has low confidence", spec.path.display()));
        }
    }
    out.files.push(write_output(out_dir, "features.csv", &csv)?);
    Ok(out)
}

/// Trains one network on a feature CSV.
///
/// Features are standardized with the training statistics (written to
/// `standardizer.csv`); the refined weights go to `weights.txt`, the
/// global-search trace to `history.csv`, the refinement trace to `loss.csv`
/// and a re-runnable configuration with the results to `manifest.txt`.
pub fn cmd_train(features: &Path, config: &RunConfig, out_dir: &Path) -> Result<CommandOutput> {
    let table = read_features(features)?;
    let inputs = config.inputs.unwrap_or(table.data.n_features());
    let topology = MlpTopology::binary(inputs, &config.hidden)?;
    let scaler = Standardizer::fit(&table.data);
    let data = scaler.transform(&table.data);
    let outcome = train_network(&data, &topology, Some(&config.codel), &config.codel, &config.local, config.seed)?;
    let codel = outcome.codel.as_ref().expect("training ran the global search");

    let head = header(config, "train");
    let mut out = CommandOutput::default();
    let comment = format!("command = train\n{}", config.render());
    out.files.push(write_output(out_dir, "weights.txt", &render_weights(&topology, &outcome.model.params, &comment))?);

    let mut scaler_csv = head.clone();
    scaler_csv.push_str("feature,mean,std\n");
    for ((name, m), s) in table.feature_names.iter().zip(&scaler.mean).zip(&scaler.std) {
        let _ = writeln!(scaler_csv, "{name},{m:e},{s:e}");
    }
    out.files.push(write_output(out_dir, "standardizer.csv", &scaler_csv)?);
    out.files.push(write_output(out_dir, "history.csv", &format!("{head}{}", render_history(&codel.history)))?);
    out.files.push(write_output(out_dir, "loss.csv", &format!("{head}{}", render_loss_trace(&outcome.refine.trace)))?);

    let r = &outcome.refine;
    let mut manifest = String::from("# command = train\n");
    let _ = writeln!(manifest, "# features = {}", features.display());
    let _ = writeln!(manifest, "# topology = {topology}");
    let _ = writeln!(manifest, "# nfe_used = {}", outcome.nfe());
    let _ = writeln!(manifest, "# global_best_error = {:e}", codel.best_fitness());
    let _ = writeln!(manifest, "# initial_train_error = {:e}", r.initial_train_error);
    let _ = writeln!(manifest, "# final_train_error = {:e}", r.final_train_error);
    let _ = writeln!(manifest, "# final_mse = {:e}", r.final_mse);
    let _ = writeln!(manifest, "# epochs_run = {}", r.trace.len());
    manifest.push_str(&config.render());
    out.files.push(write_output(out_dir, "manifest.txt", &manifest)?);

    out.notes.push(format!(
        "{} on {topology}: nfe {}, train error {:.4} -> {:.4}",
        config.local.method,
        outcome.nfe(),
        r.initial_train_error,
        r.final_train_error
    ));
    Ok(out)
}

/// Cross-validation results of every base and boosted trainer.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub variants: Vec<Variant>,
    pub results: Vec<CrossValidation>,
}

impl Evaluation {
    pub fn comparison(&self) -> Comparison {
        let rows = self
            .variants
            .iter()
            .zip(&self.results)
            .map(|(v, cv)| AlgorithmRow {
                name: v.name(),
                means: std::array::from_fn(|m| cv.summaries[m].mean * 100.0),
                summaries: Some(cv.summaries.map(|s: FoldSummary| s.scaled(100.0))),
            })
            .collect();
        Comparison::new(rows).expect("variants come in base/boosted pairs")
    }
}

/// Runs k-fold cross-validation of all twelve trainers on one dataset.
///
/// All trainers share the same folds; trainer seeds derive from the run seed
/// and the trainer name. Trainers and folds run in parallel.
pub fn evaluate_variants(data: &crate::mlp::Dataset, config: &RunConfig) -> Result<Evaluation> {
    if !data.has_both_classes() {
        return Err(Error::InvalidInput("evaluation needs both classes in the dataset".into()));
    }
    if config.folds > data.len() {
        return Err(Error::Parameter(format!(
            "k = {} exceeds the number of samples ({})",
            config.folds,
            data.len()
        )));
    }
    if let Some(inputs) = config.inputs.filter(|&i| i != data.n_features()) {
        return Err(Error::InvalidInput(format!(
            "configured inputs = {inputs} but the data has {} features",
            data.n_features()
        )));
    }
    let variants = Variant::all();
    let results = variants
        .par_iter()
        .map(|&v| {
            let trainer = MlpTrainer::for_variant(v, &config.hidden, &config.codel, &config.local);
            cross_validate(&trainer, data, config.folds, config.seed, derive_seed(config.seed, &v.name()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Evaluation { variants, results })
}

fn write_tables(comparison: &Comparison, head: &str, out_dir: &Path, out: &mut CommandOutput) -> Result<()> {
    for m in Metric::ALL {
        let body = format!("{head}{}", comparison.metric_table_csv(m));
        out.files.push(write_output(out_dir, &format!("{}.csv", m.name()), &body)?);
    }
    out.files.push(write_output(out_dir, "error_enhancement.csv", &format!("{head}{}", comparison.ee_table_csv()))?);
    out.files.push(write_output(out_dir, "mean_rank.csv", &format!("{head}{}", comparison.mean_rank_csv()))?);
    Ok(())
}

/// Cross-validates all twelve trainers and writes the comparison tables,
/// plus per-fold results in `folds.csv`.
pub fn cmd_evaluate(features: &Path, config: &RunConfig, out_dir: &Path) -> Result<CommandOutput> {
    let table = read_features(features)?;
    let evaluation = evaluate_variants(&table.data, config)?;
    let comparison = evaluation.comparison();
    let head = format!("{}# features = {}\n", header(config, "evaluate"), features.display());
    let mut out = CommandOutput::default();
    write_tables(&comparison, &head, out_dir, &mut out)?;

    let mut folds = head.clone();
    let names: Vec<&str> = Metric::ALL.iter().map(|m| m.name()).collect();
    let _ = writeln!(folds, "algorithm,fold,tp,tn,fp,fn,{}", names.join(","));
    for (v, cv) in evaluation.variants.iter().zip(&evaluation.results) {
        for (i, f) in cv.folds.iter().enumerate() {
            let c = &f.confusion;
            let values: Vec<String> = f.report.values().iter().map(|x| num(x * 100.0)).collect();
            let _ = writeln!(folds, "{v},{i},{},{},{},{},{}", c.tp, c.tn, c.fp, c.fn_, values.join(","));
        }
    }
    out.files.push(write_output(out_dir, "folds.csv", &folds)?);
    for m in [Metric::Accuracy, Metric::Specificity] {
        out.notes.push(format!("{m}: w/t/l {}", comparison.wtl(m)));
    }
    Ok(out)
}

/// Derives rank, win/tie/loss, error-enhancement and mean-rank tables from a
/// means CSV, or from the published means when `means` is `None`.
pub fn cmd_compare_tables(means: Option<&Path>, config: &RunConfig, out_dir: &Path) -> Result<CommandOutput> {
    let (comparison, source) = match means {
        Some(path) => {
            let (names, values) = read_means(path)?;
            let refs: Vec<&str> = names.iter().map(String::as_str).collect();
            (Comparison::from_means(&refs, &values)?, path.display().to_string())
        }
        None => (
            Comparison::from_means(&published::ALGORITHMS, &published::MEANS)?,
            "published".to_string(),
        ),
    };
    let head = format!("{}# means = {source}\n", header(config, "compare-tables"));
    let mut out = CommandOutput::default();
    write_tables(&comparison, &head, out_dir, &mut out)?;
    Ok(out)
}

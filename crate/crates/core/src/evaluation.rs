//! Classifier metrics, fold statistics and paired comparisons.

use std::fmt;

use rand::seq::SliceRandom;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mlp::{Dataset, Standardizer};
use crate::rng::{derive_seed, stream, substream};

/// Binary confusion counts, class 1 being "positive".
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ConfusionMatrix {
    pub tp: u64,
    pub tn: u64,
    pub fp: u64,
    pub fn_: u64,
}

impl ConfusionMatrix {
    pub fn new(tp: u64, tn: u64, fp: u64, fn_: u64) -> Self {
        Self { tp, tn, fp, fn_ }
    }

    /// Tallies `(actual, predicted)` label pairs.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (u8, u8)>) -> Self {
        let mut cm = Self::default();
        for (actual, predicted) in pairs {
            match (actual, predicted) {
                (1, 1) => cm.tp += 1,
                (0, 0) => cm.tn += 1,
                (0, _) => cm.fp += 1,
                _ => cm.fn_ += 1,
            }
        }
        cm
    }

    pub fn total(&self) -> u64 {
        self.tp + self.tn + self.fp + self.fn_
    }
}

/// The six reported metrics, in table order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Metric {
    Accuracy,
    Sensitivity,
    Specificity,
    Precision,
    FScore,
    GMean,
}

impl Metric {
    pub const ALL: [Metric; 6] = [
        Metric::Accuracy,
        Metric::Sensitivity,
        Metric::Specificity,
        Metric::Precision,
        Metric::FScore,
        Metric::GMean,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Accuracy => "accuracy",
            Metric::Sensitivity => "sensitivity",
            Metric::Specificity => "specificity",
            Metric::Precision => "precision",
            Metric::FScore => "fscore",
            Metric::GMean => "gmean",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Metric values in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricReport {
    pub accuracy: f64,
    pub sensitivity: f64,
    pub specificity: f64,
    pub precision: f64,
    pub fscore: f64,
    pub gmean: f64,
    /// Metrics whose denominator was zero (reported as 0).
    pub degenerate: [bool; 6],
}

impl MetricReport {
    pub fn get(&self, metric: Metric) -> f64 {
        self.values()[metric.index()]
    }

    pub fn values(&self) -> [f64; 6] {
        [self.accuracy, self.sensitivity, self.specificity, self.precision, self.fscore, self.gmean]
    }

    pub fn is_degenerate(&self) -> bool {
        self.degenerate.iter().any(|&d| d)
    }
}

/// Computes accuracy, sensitivity, specificity, precision, F-score and G-mean.
///
/// A ratio with a zero denominator is reported as 0 and flagged in
/// [`MetricReport::degenerate`]; G-mean inherits the flags of its factors.
pub fn metrics(cm: &ConfusionMatrix) -> Result<MetricReport> {
    if cm.total() == 0 {
        return Err(Error::InsufficientData("confusion matrix is empty".into()));
    }
    let ratio = |num: u64, den: u64| -> (f64, bool) {
        if den == 0 { (0.0, true) } else { (num as f64 / den as f64, false) }
    };
    let (accuracy, d0) = ratio(cm.tp + cm.tn, cm.total());
    let (sensitivity, d1) = ratio(cm.tp, cm.tp + cm.fn_);
    let (specificity, d2) = ratio(cm.tn, cm.tn + cm.fp);
    let (precision, d3) = ratio(cm.tp, cm.tp + cm.fp);
    let (fscore, d4) = ratio(2 * cm.tp, 2 * cm.tp + cm.fp + cm.fn_);
    Ok(MetricReport {
        accuracy,
        sensitivity,
        specificity,
        precision,
        fscore,
        gmean: (sensitivity * specificity).sqrt(),
        degenerate: [d0, d1, d2, d3, d4, d1 || d2],
    })
}

/// Relative reduction of the error `100 - metric` achieved by `improved`
/// over `base`, in percent. Inputs are percentages.
pub fn error_enhancement(base_pct: f64, improved_pct: f64) -> Result<f64> {
    if !(base_pct.is_finite() && improved_pct.is_finite()) {
        return Err(Error::InvalidInput("metric values must be finite".into()));
    }
    if base_pct >= 100.0 {
        return Err(Error::InvalidInput(format!(
            "error enhancement is undefined for a base metric of {base_pct} (no error left)"
        )));
    }
    let base_err = 100.0 - base_pct;
    let improved_err = 100.0 - improved_pct;
    Ok((base_err - improved_err) / base_err * 100.0)
}

/// Stratified k-fold partition of `0..labels.len()`.
///
/// Each class is shuffled and the concatenation is dealt round-robin, so fold
/// sizes differ by at most one and so do per-class counts. Indices inside a
/// fold are sorted.
pub fn kfold_split(labels: &[u8], k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    let n = labels.len();
    if k < 2 {
        return Err(Error::Parameter(format!("k must be >= 2, got {k}")));
    }
    if k > n {
        return Err(Error::Parameter(format!("k = {k} exceeds the number of samples ({n})")));
    }
    let mut rng = substream(seed, stream::FOLDS);
    let mut order = Vec::with_capacity(n);
    for class in [0u8, 1] {
        let mut members: Vec<usize> = (0..n).filter(|&i| labels[i] == class).collect();
        members.shuffle(&mut rng);
        order.extend(members);
    }
    order.extend((0..n).filter(|&i| labels[i] > 1));
    let mut folds = vec![Vec::with_capacity(n / k + 1); k];
    for (pos, idx) in order.into_iter().enumerate() {
        folds[pos % k].push(idx);
    }
    folds.iter_mut().for_each(|f| f.sort_unstable());
    Ok(folds)
}

/// Summary of one metric across folds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FoldSummary {
    pub mean: f64,
    /// Sample standard deviation (divisor `k - 1`).
    pub std: f64,
    pub min: f64,
    pub max: f64,
    pub median: f64,
}

impl FoldSummary {
    pub fn from_values(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InsufficientData("no values to summarize".into()));
        }
        let k = values.len() as f64;
        let mean = values.iter().sum::<f64>() / k;
        let std = if values.len() > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0)).sqrt()
        } else {
            0.0
        };
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len();
        let median = if n % 2 == 1 { sorted[n / 2] } else { 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]) };
        Ok(Self { mean, std, min: sorted[0], max: sorted[n - 1], median })
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            mean: self.mean * factor,
            std: self.std * factor,
            min: self.min * factor,
            max: self.max * factor,
            median: self.median * factor,
        }
    }
}

/// A fitted binary classifier.
pub trait Classifier {
    fn predict(&self, features: &[f64]) -> u8;
}

/// Fits a classifier on (already standardized) training data.
pub trait Trainer: Sync {
    type Model: Classifier + Send;

    fn fit(&self, train: &Dataset, seed: u64) -> Result<Self::Model>;
}

#[derive(Debug, Clone, PartialEq)]
pub struct FoldOutcome {
    pub test_indices: Vec<usize>,
    pub confusion: ConfusionMatrix,
    pub report: MetricReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossValidation {
    pub folds: Vec<FoldOutcome>,
    /// One summary per metric in [`Metric::ALL`] order, values in `[0, 1]`.
    pub summaries: [FoldSummary; 6],
}

impl CrossValidation {
    pub fn summary(&self, metric: Metric) -> &FoldSummary {
        &self.summaries[metric.index()]
    }

    pub fn fold_values(&self, metric: Metric) -> Vec<f64> {
        self.folds.iter().map(|f| f.report.get(metric)).collect()
    }
}

/// Seed handed to the trainer for fold `fold`.
pub fn fold_seed(seed: u64, fold: usize) -> u64 {
    derive_seed(seed, &format!("fold/{fold}"))
}

/// k-fold cross-validation.
///
/// Folds come from [`kfold_split`] with `split_seed`; the trainer for fold
/// `i` receives `fold_seed(train_seed, i)`. Features are standardized with
/// statistics of the training part only. Folds run in parallel and are
/// reported in fold order.
pub fn cross_validate<T: Trainer>(
    trainer: &T,
    data: &Dataset,
    k: usize,
    split_seed: u64,
    train_seed: u64,
) -> Result<CrossValidation> {
    if !data.has_both_classes() {
        return Err(Error::InvalidInput("cross-validation needs both classes in the dataset".into()));
    }
    let folds = kfold_split(data.labels(), k, split_seed)?;
    cross_validate_folds(trainer, data, &folds, train_seed)
}

/// [`cross_validate`] over a given partition; fold `i` is tested on
/// `folds[i]` and trained on the remaining indices.
pub fn cross_validate_folds<T: Trainer>(
    trainer: &T,
    data: &Dataset,
    folds: &[Vec<usize>],
    train_seed: u64,
) -> Result<CrossValidation> {
    let mut seen = vec![false; data.len()];
    for &i in folds.iter().flatten() {
        if i >= data.len() || std::mem::replace(&mut seen[i], true) {
            return Err(Error::InvalidInput("folds must partition the dataset".into()));
        }
    }
    if folds.len() < 2 || seen.contains(&false) {
        return Err(Error::InvalidInput("folds must partition the dataset".into()));
    }
    let outcomes: Vec<FoldOutcome> = folds
        .par_iter()
        .enumerate()
        .map(|(i, test_idx)| {
            let mut train_idx: Vec<usize> = folds
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .flat_map(|(_, f)| f.iter().copied())
                .collect();
            train_idx.sort_unstable();
            let train = data.subset(&train_idx);
            let scaler = Standardizer::fit(&train);
            let model = trainer.fit(&scaler.transform(&train), fold_seed(train_seed, i))?;
            let confusion = ConfusionMatrix::from_pairs(
                test_idx
                    .iter()
                    .map(|&t| (data.label(t), model.predict(&scaler.transform_row(data.row(t))))),
            );
            Ok(FoldOutcome { test_indices: test_idx.clone(), confusion, report: metrics(&confusion)? })
        })
        .collect::<Result<_>>()?;
    let summaries = summarize(&outcomes)?;
    Ok(CrossValidation { folds: outcomes, summaries })
}

fn summarize(folds: &[FoldOutcome]) -> Result<[FoldSummary; 6]> {
    let mut out = [FoldSummary { mean: 0.0, std: 0.0, min: 0.0, max: 0.0, median: 0.0 }; 6];
    for m in Metric::ALL {
        let values: Vec<f64> = folds.iter().map(|f| f.report.get(m)).collect();
        out[m.index()] = FoldSummary::from_values(&values)?;
    }
    Ok(out)
}

/// Win/tie/loss tally of improved variants against their bases.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Wtl {
    pub wins: usize,
    pub ties: usize,
    pub losses: usize,
}

impl fmt::Display for Wtl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}/{}", self.wins, self.ties, self.losses)
    }
}

/// Outcome of one paired comparison; values within `1e-9` tie.
pub fn compare(base: f64, improved: f64) -> Wtl {
    if (improved - base).abs() <= 1e-9 {
        Wtl { ties: 1, ..Wtl::default() }
    } else if improved > base {
        Wtl { wins: 1, ..Wtl::default() }
    } else {
        Wtl { losses: 1, ..Wtl::default() }
    }
}

pub fn wtl(base: &[f64], improved: &[f64]) -> Result<Wtl> {
    if base.len() != improved.len() {
        return Err(Error::Shape { expected: base.len(), actual: improved.len() });
    }
    Ok(base.iter().zip(improved).fold(Wtl::default(), |acc, (&b, &c)| {
        let r = compare(b, c);
        Wtl { wins: acc.wins + r.wins, ties: acc.ties + r.ties, losses: acc.losses + r.losses }
    }))
}

/// Ranks where the largest value gets rank 1 and ties share the mean rank.
pub fn descending_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // positions start..end hold ranks start+1..=end
        let shared = (start + 1 + end) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = shared;
        }
        start = end;
    }
    ranks
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankTable {
    /// `ranks[algorithm][metric]`.
    pub ranks: Vec<Vec<f64>>,
    pub mean_rank: Vec<f64>,
}

/// Ranks every metric column (higher is better) and averages per algorithm.
pub fn rank_and_mean_rank(table: &[Vec<f64>]) -> Result<RankTable> {
    let Some(first) = table.first() else {
        return Err(Error::InsufficientData("rank table has no rows".into()));
    };
    let n_metrics = first.len();
    if n_metrics == 0 || table.iter().any(|r| r.len() != n_metrics) {
        return Err(Error::InvalidInput("rank table rows must share a nonzero width".into()));
    }
    let mut ranks = vec![vec![0.0; n_metrics]; table.len()];
    for m in 0..n_metrics {
        let column: Vec<f64> = table.iter().map(|r| r[m]).collect();
        for (row, r) in descending_ranks(&column).into_iter().enumerate() {
            ranks[row][m] = r;
        }
    }
    let mean_rank = ranks.iter().map(|r| mean_of(r)).collect();
    Ok(RankTable { ranks, mean_rank })
}

/// Mean of a rank vector.
pub fn mean_of(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

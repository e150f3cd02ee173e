//! File formats: record and feature CSVs, weight files, traces.
//!
//! All CSVs are comma-separated with a header row and LF line endings.
//! Lines starting with `#` are comments; writers use them to embed the run
//! configuration.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::evaluation::Metric;
use crate::local_search::EpochRecord;
use crate::mlp::{Dataset, MlpTopology};
use crate::optimizer::HistoryPoint;

/// Column holding raw signal samples.
pub const SIGNAL_COLUMN: &str = "sample";
/// Column holding RR intervals in milliseconds.
pub const RR_COLUMN: &str = "rr_ms";
/// Label column of a feature CSV.
pub const LABEL_COLUMN: &str = "label";
/// Optional identifier column of a feature CSV.
pub const RECORD_COLUMN: &str = "record";

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Read { path: path.to_path_buf(), source })
}

/// Writes `contents`, creating parent directories as needed.
pub fn write_text(path: &Path, contents: &str) -> Result<()> {
    let wrap = |source| Error::Write { path: path.to_path_buf(), source };
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(wrap)?;
    }
    fs::write(path, contents).map_err(wrap)
}

/// Prefixes every line of `text` with `# `.
pub fn comment_block(text: &str) -> String {
    text.lines().map(|l| format!("# {l}\n")).collect()
}

fn csv_error(path: &Path, message: impl Into<String>) -> Error {
    Error::Csv { path: path.to_path_buf(), message: message.into() }
}

struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

fn read_table(path: &Path) -> Result<Table> {
    let text = read_text(path)?;
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| csv_error(path, e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    if header.iter().all(String::is_empty) {
        return Err(csv_error(path, "missing header row"));
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(path, e.to_string()))?;
        rows.push(record.iter().map(str::to_string).collect());
    }
    Ok(Table { header, rows })
}

fn parse_number(path: &Path, line: usize, column: &str, cell: &str) -> Result<f64> {
    cell.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| csv_error(path, format!("row {line}, column `{column}`: `{cell}` is not a finite number")))
}

/// One record's raw content.
#[derive(Debug, Clone, PartialEq)]
pub enum RecordData {
    /// Signal samples at the configured rate.
    Signal(Vec<f64>),
    /// RR intervals in milliseconds.
    Rr(Vec<f64>),
}

/// Reads a single-column record CSV whose header is `sample` or `rr_ms`.
pub fn read_record(path: &Path) -> Result<RecordData> {
    let table = read_table(path)?;
    let [column] = table.header.as_slice() else {
        return Err(csv_error(
            path,
            format!("expected one column named `{SIGNAL_COLUMN}` or `{RR_COLUMN}`"),
        ));
    };
    let values = table
        .rows
        .iter()
        .enumerate()
        .map(|(i, r)| parse_number(path, i + 1, column, &r[0]))
        .collect::<Result<Vec<_>>>()?;
    match column.as_str() {
        SIGNAL_COLUMN => Ok(RecordData::Signal(values)),
        RR_COLUMN => Ok(RecordData::Rr(values)),
        other => Err(csv_error(
            path,
            format!("unknown column `{other}`, expected `{SIGNAL_COLUMN}` or `{RR_COLUMN}`"),
        )),
    }
}

/// A feature table: named numeric columns plus binary labels.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTable {
    pub feature_names: Vec<String>,
    pub data: Dataset,
}

/// Reads a feature CSV: numeric feature columns, a `label` column and an
/// optional `record` column, in any order.
pub fn read_features(path: &Path) -> Result<FeatureTable> {
    let table = read_table(path)?;
    let label_col = table
        .header
        .iter()
        .position(|h| h == LABEL_COLUMN)
        .ok_or_else(|| csv_error(path, format!("missing `{LABEL_COLUMN}` column")))?;
    let feature_cols: Vec<usize> = (0..table.header.len())
        .filter(|&i| i != label_col && table.header[i] != RECORD_COLUMN)
        .collect();
    if feature_cols.is_empty() {
        return Err(csv_error(path, "no feature columns"));
    }
    if table.rows.is_empty() {
        return Err(csv_error(path, "no data rows"));
    }
    let mut rows = Vec::with_capacity(table.rows.len());
    let mut labels = Vec::with_capacity(table.rows.len());
    for (i, r) in table.rows.iter().enumerate() {
        let line = i + 1;
        let label = match r[label_col].as_str() {
            "0" => 0,
            "1" => 1,
            other => {
                return Err(Error::InvalidInput(format!(
                    "{}: row {line} has label `{other}`; labels must be binary (0 or 1)",
                    path.display()
                )))
            }
        };
        labels.push(label);
        rows.push(
            feature_cols
                .iter()
                .map(|&c| parse_number(path, line, &table.header[c], &r[c]))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    Ok(FeatureTable {
        feature_names: feature_cols.iter().map(|&c| table.header[c].clone()).collect(),
        data: Dataset::new(rows, labels)?,
    })
}

/// Serializes weights: optional comment lines, a `topology = a-b-c` line,
/// then one parameter per line in flat layout order.
pub fn render_weights(topology: &MlpTopology, params: &[f64], comment: &str) -> String {
    let mut out = comment_block(comment);
    let _ = writeln!(out, "topology = {topology}");
    for p in params {
        let _ = writeln!(out, "{p:e}");
    }
    out
}

pub fn read_weights(path: &Path) -> Result<(MlpTopology, Vec<f64>)> {
    let text = read_text(path)?;
    let bad = |m: String| Error::InvalidInput(format!("{}: {m}", path.display()));
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
    let first = lines.next().ok_or_else(|| bad("empty weights file".into()))?;
    let sizes = first
        .strip_prefix("topology")
        .and_then(|r| r.trim_start().strip_prefix('='))
        .ok_or_else(|| bad(format!("expected `topology = ...`, got `{first}`")))?;
    let sizes = sizes
        .trim()
        .split('-')
        .map(|s| s.parse::<usize>().map_err(|_| bad(format!("bad layer size `{s}`"))))
        .collect::<Result<Vec<_>>>()?;
    let topology = MlpTopology::new(sizes)?;
    let params = lines
        .map(|l| l.parse::<f64>().map_err(|_| bad(format!("bad weight `{l}`"))))
        .collect::<Result<Vec<_>>>()?;
    if params.len() != topology.param_count() {
        return Err(Error::Shape { expected: topology.param_count(), actual: params.len() });
    }
    Ok((topology, params))
}

pub fn render_history(history: &[HistoryPoint]) -> String {
    let mut out = String::from("iteration,nfe,best_fitness\n");
    for h in history {
        let _ = writeln!(out, "{},{},{:e}", h.iteration, h.nfe, h.best_fitness);
    }
    out
}

pub fn render_loss_trace(trace: &[EpochRecord]) -> String {
    let mut out = String::from("epoch,mse,classification_error\n");
    for e in trace {
        let _ = writeln!(out, "{},{:e},{:e}", e.epoch, e.mse, e.classification_error);
    }
    out
}

/// Reads a means table: `algorithm` followed by the six metric columns, in
/// percent, rows alternating base and boosted algorithm.
pub fn read_means(path: &Path) -> Result<(Vec<String>, Vec<[f64; 6]>)> {
    let table = read_table(path)?;
    let expected: Vec<&str> = std::iter::once("algorithm")
        .chain(Metric::ALL.iter().map(|m| m.name()))
        .collect();
    if table.header != expected {
        return Err(csv_error(path, format!("header must be `{}`", expected.join(","))));
    }
    let mut names = Vec::with_capacity(table.rows.len());
    let mut means = Vec::with_capacity(table.rows.len());
    for (i, r) in table.rows.iter().enumerate() {
        names.push(r[0].clone());
        let mut row = [0.0; 6];
        for (m, cell) in row.iter_mut().enumerate() {
            *cell = parse_number(path, i + 1, expected[m + 1], &r[m + 1])?;
        }
        means.push(row);
    }
    Ok((names, means))
}

/// Writes `contents` to `dir/name` and returns the path.
pub fn write_output(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    let path = dir.join(name);
    write_text(&path, contents)?;
    Ok(path)
}

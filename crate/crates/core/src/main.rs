use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use codel::config::{parse_config, RunConfig};
use codel::error::{Error, Result};
use codel::io::read_text;
use codel::pipeline::{cmd_compare_tables, cmd_evaluate, cmd_extract, cmd_train, CommandOutput, RecordSpec};

/// HRV feature extraction and MLP training with cluster-based opposition
/// differential evolution.
#[derive(Parser)]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Seed for every random stream of the run.
    #[arg(long)]
    seed: u64,
    /// `key = value` configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Directory for output files.
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
    /// Configuration override, e.g. `--set np=20` (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Turn signal or RR record files into a feature CSV.
    Extract {
        #[command(flatten)]
        common: Common,
        /// Record file with a `sample` or `rr_ms` column (repeatable).
        #[arg(long = "input")]
        inputs: Vec<PathBuf>,
        /// Class label for every `--input` record.
        #[arg(long)]
        label: Option<u8>,
        /// CSV of `path,label` lines; paths are relative to this file.
        #[arg(long)]
        records: Option<PathBuf>,
        /// Sampling rate of signal records in Hz.
        #[arg(long)]
        fs: Option<f64>,
    },
    /// Train one network: global search, then local refinement.
    Train {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        features: PathBuf,
        /// Local search method: RP, OSS, GD, GDM, GDA or CG-PR.
        #[arg(long)]
        method: Option<String>,
        /// Hidden layer sizes, comma separated.
        #[arg(long)]
        hidden: Option<String>,
    },
    /// Cross-validate all base and boosted trainers and write the tables.
    Evaluate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        features: PathBuf,
        /// Number of folds.
        #[arg(long)]
        k: Option<usize>,
    },
    /// Derive rank, W/T/L, error-enhancement and mean-rank tables from means.
    CompareTables {
        #[command(flatten)]
        common: Common,
        /// CSV with `algorithm` and six metric columns; defaults to the
        /// published results.
        #[arg(long)]
        means: Option<PathBuf>,
    },
}

fn resolve(common: &Common, extra: &[(&str, Option<String>)]) -> Result<RunConfig> {
    let text = common.config.as_deref().map(read_text).transpose()?;
    let mut overrides = Vec::new();
    for (k, v) in extra {
        if let Some(v) = v {
            overrides.push((k.to_string(), v.clone()));
        }
    }
    for o in &common.overrides {
        let (k, v) = o
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("override `{o}` is not KEY=VALUE")))?;
        overrides.push((k.trim().to_string(), v.trim().to_string()));
    }
    overrides.push(("seed".into(), common.seed.to_string()));
    parse_config(text.as_deref(), &overrides)
}

fn read_record_list(path: &Path) -> Result<Vec<RecordSpec>> {
    let base = path.parent().unwrap_or(Path::new(""));
    let mut specs = Vec::new();
    for (n, line) in read_text(path)?.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line == "path,label" {
            continue;
        }
        let bad = || Error::InvalidInput(format!("{}: line {} must be `path,label`", path.display(), n + 1));
        let (p, l) = line.split_once(',').ok_or_else(bad)?;
        let label = l.trim().parse().map_err(|_| bad())?;
        specs.push(RecordSpec { path: base.join(p.trim()), label });
    }
    Ok(specs)
}

fn run(cli: Cli) -> Result<CommandOutput> {
    match cli.command {
        Command::Extract { common, inputs, label, records, fs } => {
            let config = resolve(&common, &[("fs", fs.map(|f| f.to_string()))])?;
            let mut specs = match records {
                Some(list) => read_record_list(&list)?,
                None => Vec::new(),
            };
            if !inputs.is_empty() {
                let label = label.ok_or_else(|| Error::InvalidInput("--input requires --label".into()))?;
                specs.extend(inputs.into_iter().map(|path| RecordSpec { path, label }));
            }
            cmd_extract(&specs, &config, &common.out_dir)
        }
        Command::Train { common, features, method, hidden } => {
            let config = resolve(&common, &[("method", method), ("hidden", hidden)])?;
            cmd_train(&features, &config, &common.out_dir)
        }
        Command::Evaluate { common, features, k } => {
            let config = resolve(&common, &[("k", k.map(|k| k.to_string()))])?;
            cmd_evaluate(&features, &config, &common.out_dir)
        }
        Command::CompareTables { common, means } => {
            let config = resolve(&common, &[])?;
            cmd_compare_tables(means.as_deref(), &config, &common.out_dir)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(out) => {
            for note in &out.notes {
                eprintln!("{note}");
            }
            for file in &out.files {
                println!("{}", file.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

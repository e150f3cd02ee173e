//! The file-based workflow behind the `codel` binary: ECG records on disk →
//! `features.csv` → a trained network → the twelve-trainer comparison tables.
//!
//! Two synthetic groups differ in heart rate and respiratory variability.
//! Everything is written below the system temp directory.

use std::fmt::Write as _;
use std::path::PathBuf;

use codel::config::parse_config;
use codel::evaluation::Metric;
use codel::io::{read_text, write_text};
use codel::pipeline::{cmd_evaluate, cmd_extract, cmd_train, RecordSpec};
use codel::rng::substream;
use codel::synthetic::{ecg_from_rr, respiratory_rr};
use rand::Rng as _;

const CONFIG: &str = "
# small budget so the whole run takes seconds
np = 12
nfe = 600
hidden = 4
epochs = 60
k = 3
fs = 250
";

pub struct Summary {
    pub out_dir: PathBuf,
    pub files: Vec<PathBuf>,
    pub notes: Vec<String>,
}

pub fn run_example() -> codel::Result<Summary> {
    let root = std::env::temp_dir().join("codel-file-pipeline");
    let mut rng = substream(5, "records");
    let mut specs = Vec::new();
    for label in [0u8, 1] {
        for i in 0..9 {
            let (mean, amp) = if label == 0 { (900.0, 50.0) } else { (700.0, 15.0) };
            let rr = respiratory_rr(mean + rng.random_range(-40.0..40.0), amp, rng.random_range(0.2..0.3), 45.0);
            let (ecg, _) = ecg_from_rr(&rr, 250.0, 0.03, &mut rng)?;
            let mut csv = String::from("sample\n");
            for v in ecg.samples() {
                let _ = writeln!(csv, "{v:.5}");
            }
            let path = root.join("records").join(format!("c{label}_{i}.csv"));
            write_text(&path, &csv)?;
            specs.push(RecordSpec { path, label });
        }
    }

    let config = parse_config(Some(CONFIG), &[("seed".into(), "5".into())])?;
    let mut files = Vec::new();
    let mut notes = Vec::new();
    let extracted = cmd_extract(&specs, &config, &root.join("features"))?;
    let features = extracted.files[0].clone();
    for out in [extracted, cmd_train(&features, &config, &root.join("train"))?, cmd_evaluate(&features, &config, &root.join("evaluate"))?] {
        files.extend(out.files);
        notes.extend(out.notes);
    }
    Ok(Summary { out_dir: root, files, notes })
}

fn main() -> codel::Result<()> {
    let s = run_example()?;
    for n in &s.notes {
        println!("{n}");
    }
    println!("wrote {} files under {}", s.files.len(), s.out_dir.display());
    let acc = read_text(&s.out_dir.join("evaluate").join(format!("{}.csv", Metric::Accuracy.name())))?;
    print!("{}", acc.lines().filter(|l| !l.starts_with('#')).collect::<Vec<_>>().join("\n"));
    println!();
    Ok(())
}

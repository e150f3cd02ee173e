//! HRV features straight from RR intervals, including the two degenerate
//! cases the feature record flags: a perfectly regular rhythm has no Poincaré
//! ratio and no dominant breathing frequency.

use std::path::Path;

use codel::hrv::{breathing_rate, extract_features, poincare_features, time_domain_features, FeatureRecord};
use codel::io::{read_record, RecordData};
use codel::synthetic::respiratory_rr;
use codel::RrSeries;

pub struct Summary {
    pub constant: FeatureRecord,
    pub breathing: FeatureRecord,
}

pub fn run_example() -> codel::Result<Summary> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/constant_rr.csv");
    let RecordData::Rr(intervals) = read_record(&path)? else {
        unreachable!("the bundled file holds RR intervals");
    };
    let constant = extract_features(&RrSeries::new(intervals)?)?;

    // sinus arrhythmia: RR lengthens and shortens with each breath
    let rr = RrSeries::new(respiratory_rr(900.0, 60.0, 0.2, 120.0))?;
    let td = time_domain_features(&rr)?;
    let pc = poincare_features(&rr)?;
    let br = breathing_rate(&rr)?;
    println!("sdnn {:.2} ms, rmssd {:.2} ms, sd1/sd2 {:.3}", td.sdnn, td.rmssd, pc.ratio.unwrap_or(f64::NAN));
    println!("breathing {:.2}/min (peak holds {:.0}% of band power)", br.rate, 100.0 * br.peak_power_fraction);
    Ok(Summary { constant, breathing: extract_features(&rr)? })
}

fn main() -> codel::Result<()> {
    let s = run_example()?;
    let c = &s.constant;
    println!(
        "constant rhythm: bpm {} sdnn {} ratio undefined: {} low-confidence breathing: {}",
        c.bpm, c.sdnn, c.ratio_undefined, c.breathing_low_confidence
    );
    Ok(())
}

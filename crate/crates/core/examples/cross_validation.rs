//! Stratified 5-fold cross-validation of one method with random and with
//! global-search initialization on a small two-Gaussian problem.

use codel::evaluation::{cross_validate, CrossValidation, Metric};
use codel::local_search::{LocalSearchConfig, Method};
use codel::optimizer::CodelConfig;
use codel::rng::substream;
use codel::synthetic::two_gaussians;
use codel::training::{MlpTrainer, Variant};

pub fn run_example() -> codel::Result<Vec<(Variant, CrossValidation)>> {
    let data = two_gaussians(100, 13, 2.0, &mut substream(3, "example-data"))?;
    let codel = CodelConfig { np: 20, nfe_max: 1_000, ..CodelConfig::default() };
    let local = LocalSearchConfig { epochs: 100, ..LocalSearchConfig::default() };

    [false, true]
        .into_iter()
        .map(|boosted| {
            let variant = Variant { method: Method::Rp, boosted };
            let trainer = MlpTrainer::for_variant(variant, &[5], &codel, &local);
            Ok((variant, cross_validate(&trainer, &data, 5, 3, 3)?))
        })
        .collect()
}

fn main() -> codel::Result<()> {
    for (variant, cv) in run_example()? {
        println!("{variant}");
        for m in Metric::ALL {
            let s = cv.summary(m);
            println!("  {:>12} {:6.2} ± {:5.2}  (median {:6.2})", m.name(), 100.0 * s.mean, 100.0 * s.std, 100.0 * s.median);
        }
    }
    Ok(())
}

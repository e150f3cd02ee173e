//! Training a 2-4-1 network on XOR with every local-search method, with and
//! without global-search initialization.

use codel::local_search::{LocalSearchConfig, Method};
use codel::mlp::{Dataset, MlpTopology};
use codel::optimizer::CodelConfig;
use codel::training::train_network;

pub struct Row {
    pub method: Method,
    pub base_error: f64,
    pub boosted_error: f64,
    pub nfe: usize,
}

pub fn run_example() -> codel::Result<Vec<Row>> {
    let xor = Dataset::new(
        vec![vec![0.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0], vec![1.0, 1.0]],
        vec![0, 1, 1, 0],
    )?;
    let topology = MlpTopology::new(vec![2, 4, 1])?;
    let codel = CodelConfig { nfe_max: 10_000, ..CodelConfig::default() };
    let seed = 11;

    Method::ALL
        .iter()
        .map(|&method| {
            let local = LocalSearchConfig::with_method(method);
            let base = train_network(&xor, &topology, None, &codel, &local, seed)?;
            let boosted = train_network(&xor, &topology, Some(&codel), &codel, &local, seed)?;
            Ok(Row {
                method,
                base_error: base.refine.final_train_error,
                boosted_error: boosted.refine.final_train_error,
                nfe: boosted.nfe(),
            })
        })
        .collect()
}

fn main() -> codel::Result<()> {
    println!("{:>6} {:>10} {:>12} {:>6}", "method", "base err", "boosted err", "nfe");
    for r in run_example()? {
        println!("{:>6} {:>10.2} {:>12.2} {:>6}", r.method.name(), r.base_error, r.boosted_error, r.nfe);
    }
    Ok(())
}

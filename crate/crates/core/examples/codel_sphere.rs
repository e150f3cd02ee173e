//! The global optimizer on a black-box function: minimize the 5-D sphere and
//! print the convergence trace.

use codel::optimizer::{run_codel, CodelConfig, HistoryPoint};

pub fn run_example() -> codel::Result<Vec<HistoryPoint>> {
    let sphere = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>();
    let config = CodelConfig { nfe_max: 10_000, seed: 42, ..CodelConfig::default() };
    let result = run_codel(&sphere, 5, &config)?;
    println!("best f = {:.3e} after {} evaluations", result.best_fitness(), result.nfe);
    println!("x* = {:?}", result.best.params);
    Ok(result.history)
}

fn main() -> codel::Result<()> {
    let history = run_example()?;
    println!("iteration,nfe,best");
    for h in history.iter().step_by(20) {
        println!("{},{},{:.3e}", h.iteration, h.nfe, h.best_fitness);
    }
    Ok(())
}

//! Paired-comparison statistics from a table of mean metric values: ranks,
//! win/tie/loss counts, error enhancement and mean ranks.

use std::path::Path;

use codel::evaluation::Metric;
use codel::io::read_means;
use codel::report::Comparison;

pub fn run_example() -> codel::Result<Comparison> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/published_means.csv");
    let (names, means) = read_means(&path)?;
    let names: Vec<&str> = names.iter().map(String::as_str).collect();
    Comparison::from_means(&names, &means)
}

fn main() -> codel::Result<()> {
    let table = run_example()?;
    for m in Metric::ALL {
        println!("{:>12} w/t/l {}", m.name(), table.wtl(m));
    }
    println!();
    print!("{}", table.ee_table_csv());
    println!();
    print!("{}", table.mean_rank_csv());
    Ok(())
}

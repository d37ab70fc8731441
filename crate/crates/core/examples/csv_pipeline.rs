//! File-based workflow: write a universe and its price CSVs, load them back,
//! estimate strengths for one stock and save them as CSV.

use bigbuyer::io::{load_prices, load_universe, write_strengths};
use bigbuyer::synthetic::{synthetic_universe, write_universe_dir};
use bigbuyer::{estimate_series, EstimatorConfig, ModelParams};

fn main() -> bigbuyer::Result<()> {
    let dir = std::env::temp_dir().join("bigbuyer-csv-pipeline");
    write_universe_dir(&dir, &synthetic_universe(3, 600, 1)?)?;

    let universe = load_universe(dir.join("universe.csv"))?;
    for entry in &universe {
        let prices = load_prices(dir.join("prices").join(format!("{}.csv", entry.symbol)), &entry.symbol)?;
        let strengths = estimate_series(&prices, &ModelParams::default(), &EstimatorConfig::default())?;
        let out = dir.join(format!("{}_strengths.csv", entry.symbol));
        write_strengths(&out, &strengths, 3)?;
        let last = strengths.entries().last().expect("non-empty");
        println!(
            "{} (weight {}): {} closes, last estimate {} a6 {:+.4} a7 {:+.4} -> {}",
            entry.symbol,
            entry.weight,
            prices.len(),
            last.date,
            last.a6_hat,
            last.a7_hat,
            out.display()
        );
    }
    Ok(())
}

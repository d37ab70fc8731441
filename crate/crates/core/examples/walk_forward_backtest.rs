//! Walk-forward backtest of all three strategies over a 20-stock weighted
//! universe: 198 overlapping two-year intervals, five trading days apart.
//!
//! The universe file ships with the crate; prices here are synthetic stand-ins
//! generated per symbol. Pass a directory to also write the report tables:
//! `cargo run --release --example walk_forward_backtest -- out/`

use bigbuyer::io::{emit_report, load_universe, portfolio_table};
use bigbuyer::synthetic::synthetic_prices;
use bigbuyer::{run_backtest, BacktestConfig, StockInput};
use chrono::NaiveDate;

fn main() -> bigbuyer::Result<()> {
    let universe = load_universe(concat!(env!("CARGO_MANIFEST_DIR"), "/data/hsi_top20.csv"))?;
    let start = NaiveDate::from_ymd_opt(2007, 7, 3).expect("valid date");
    let stocks = universe
        .into_iter()
        .enumerate()
        .map(|(i, entry)| {
            let prices = synthetic_prices(&entry.symbol, 1477, 0.02, 100 + i as u64, start)?;
            Ok(StockInput { entry, prices })
        })
        .collect::<bigbuyer::Result<Vec<_>>>()?;

    let report = run_backtest(&BacktestConfig::default(), &stocks)?;
    print!("{}", portfolio_table(&report));

    println!("\n{:<8} {:>6}  {:>9} {:>9} {:>9}", "symbol", "weight", "followbb", "ridemood", "buyhold");
    for s in &report.stocks {
        let aar: Vec<String> = s.stats.iter().map(|st| format!("{:>8.2}%", st.aar * 100.0)).collect();
        println!("{:<8} {:>6.2}  {}", s.symbol, s.weight, aar.join(" "));
    }

    if let Some(dir) = std::env::args().nth(1) {
        let files = emit_report(&report, &dir)?;
        println!("\nwrote {} files to {dir}", files.len());
    }
    Ok(())
}

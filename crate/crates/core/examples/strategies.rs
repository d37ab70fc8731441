//! Runs FollowBB, RideMood and Buy&Hold over one synthetic two-year price
//! history and lists every buy-sell cycle.

use bigbuyer::synthetic::synthetic_prices;
use bigbuyer::{estimate_series, run_strategy, EstimatorConfig, ModelParams, StrategyKind};
use chrono::NaiveDate;

fn main() -> bigbuyer::Result<()> {
    let start = NaiveDate::from_ymd_opt(2011, 7, 4).expect("valid date");
    let prices = synthetic_prices("DEMO", 492, 0.02, 3, start)?;
    let strengths = estimate_series(&prices, &ModelParams::default(), &EstimatorConfig::default())?;

    for kind in StrategyKind::ALL {
        let run = run_strategy(&prices, &strengths, kind)?;
        println!("{kind}: {} cycle(s), accumulated {:+.2}%", run.cycles.len(), run.accumulated_return() * 100.0);
        for c in &run.cycles {
            println!(
                "  {} {:>8.3} -> {} {:>8.3}  {:+7.2}%{}",
                c.buy_date,
                c.buy_price,
                c.sell_date,
                c.sell_price,
                c.table_percent(),
                if c.forced { "  (closed at end)" } else { "" }
            );
        }
    }
    Ok(())
}

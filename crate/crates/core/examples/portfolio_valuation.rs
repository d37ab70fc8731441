//! Daily market value of a two-stock portfolio: completed cycles are banked
//! net of costs, open positions are marked at the close.

use bigbuyer::backtest::{average_portfolio_value, market_value_series, StockLedger};
use bigbuyer::strategy::TradeCycle;
use bigbuyer::{CostModel, PriceSeries};
use chrono::NaiveDate;

fn main() -> bigbuyer::Result<()> {
    let monday = NaiveDate::from_ymd_opt(2012, 3, 5).expect("valid date");
    let a = PriceSeries::on_weekdays("AAA", monday, &[10.0, 10.2, 10.8, 11.0, 10.6, 10.9, 11.4])?;
    let b = PriceSeries::on_weekdays("BBB", monday.succ_opt().expect("valid date"), &[50.0, 48.0, 47.5, 49.0, 51.0, 52.0])?;

    let cycle = |p: &PriceSeries, buy: usize, sell: usize| TradeCycle {
        buy_day: buy,
        buy_date: p.date(buy),
        buy_price: p.close(buy),
        sell_day: sell,
        sell_date: p.date(sell),
        sell_price: p.close(sell),
        forced: false,
    };
    let a_cycles = [cycle(&a, 0, 3), cycle(&a, 5, 6)];
    let b_cycles = [cycle(&b, 2, 5)];

    let ledgers = [
        StockLedger { prices: &a, cycles: &a_cycles, weight: 3.0 },
        StockLedger { prices: &b, cycles: &b_cycles, weight: 1.0 },
    ];
    let v = market_value_series(&ledgers, &["AAA", "BBB"], 100.0, &CostModel::default())?;

    println!("{:<10} {:>9} {:>9} {:>9}", "date", "AAA", "BBB", "total");
    for (date, total) in v.dates.iter().zip(&v.portfolio) {
        let at = |i: usize| {
            let s = &v.stocks[i];
            s.dates.iter().position(|d| d == date).map_or("-".to_string(), |j| format!("{:.3}", s.values[j]))
        };
        println!("{date} {:>9} {:>9} {:>9.3}", at(0), at(1), total);
    }
    let avg = average_portfolio_value(&v)?;
    println!("average value {:.3} (sdv {:.3})", avg.mean, avg.sdv);
    Ok(())
}

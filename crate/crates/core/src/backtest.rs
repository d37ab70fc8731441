//! Walk-forward evaluation: overlapping test intervals, per-stock and
//! portfolio return statistics, and cost-aware daily valuation.
//!
//! Each stock gets its own slice of the initial money in proportion to its
//! weight and is traded independently; nothing is moved between stocks.

use chrono::NaiveDate;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::{estimate_series, EstimatorConfig};
use crate::excess_demand::ModelParams;
use crate::io::UniverseEntry;
use crate::series::PriceSeries;
use crate::strategy::{run_strategy, StrategyKind, TradeCycle};

/// Years covered by one test interval; annual figures divide by this.
pub const INTERVAL_YEARS: f64 = 2.0;

/// Overlapping test intervals as inclusive `(start, end)` day indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntervalPlan {
    pub interval_length: usize,
    pub stride: usize,
    pub intervals: Vec<(usize, usize)>,
}

impl IntervalPlan {
    pub const DEFAULT_LENGTH: usize = 492;
    pub const DEFAULT_STRIDE: usize = 5;

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }
}

pub fn make_intervals(total_days: usize, length: usize, stride: usize) -> Result<IntervalPlan> {
    if length == 0 || stride == 0 {
        return Err(Error::Contract(format!(
            "interval length and stride must be >= 1 (got {length}, {stride})"
        )));
    }
    if total_days < length {
        return Err(Error::InsufficientData {
            needed: length,
            available: total_days,
        });
    }
    let count = (total_days - length) / stride + 1;
    let intervals = (0..count)
        .map(|j| (j * stride, j * stride + length - 1))
        .collect();
    Ok(IntervalPlan {
        interval_length: length,
        stride,
        intervals,
    })
}

/// Proportional costs charged on each side of a round trip.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostModel {
    pub buy_rate: f64,
    pub sell_rate: f64,
}

impl CostModel {
    /// Stamp duty, levy and trading fee on the buy side.
    pub const DEFAULT_BUY_RATE: f64 = 0.00108;
    /// The same three plus brokerage on the sell side.
    pub const DEFAULT_SELL_RATE: f64 = 0.00288;

    pub fn new(buy_rate: f64, sell_rate: f64) -> Result<Self> {
        for (name, r) in [("buy", buy_rate), ("sell", sell_rate)] {
            if !(r.is_finite() && (0.0..1.0).contains(&r)) {
                return Err(Error::Domain(format!("{name} cost rate must lie in [0, 1), got {r}")));
            }
        }
        Ok(Self { buy_rate, sell_rate })
    }

    pub fn zero() -> Self {
        Self {
            buy_rate: 0.0,
            sell_rate: 0.0,
        }
    }

    /// Buy plus sell rate, the flat cost per round trip used for net returns.
    pub fn per_cycle(&self) -> f64 {
        self.buy_rate + self.sell_rate
    }

    /// Fraction of value kept after one round trip.
    pub fn cycle_factor(&self) -> f64 {
        (1.0 - self.buy_rate) * (1.0 - self.sell_rate)
    }
}

impl Default for CostModel {
    fn default() -> Self {
        Self {
            buy_rate: Self::DEFAULT_BUY_RATE,
            sell_rate: Self::DEFAULT_SELL_RATE,
        }
    }
}

/// `(cash_out - cash_in) / (2 cash_in)`: return per year over a two-year interval.
pub fn annual_return(cash_in: f64, cash_out: f64) -> Result<f64> {
    if !(cash_in.is_finite() && cash_in > 0.0) {
        return Err(Error::Domain(format!("cash in must be finite and > 0, got {cash_in}")));
    }
    Ok((cash_out - cash_in) / (INTERVAL_YEARS * cash_in))
}

/// Mean and population standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub sdv: f64,
}

pub fn aggregate_stats(values: &[f64]) -> Result<Summary> {
    if values.is_empty() {
        return Err(Error::Contract("cannot summarise an empty sample".into()));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    Ok(Summary {
        mean,
        sdv: var.sqrt(),
    })
}

/// Weight-averaged return across stocks for one interval.
pub fn portfolio_return(returns: &[f64], weights: &[f64]) -> Result<f64> {
    if returns.len() != weights.len() || returns.is_empty() {
        return Err(Error::Contract(format!(
            "need one weight per return ({} returns, {} weights)",
            returns.len(),
            weights.len()
        )));
    }
    if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
        return Err(Error::Domain(format!("weights must be > 0, got {w}")));
    }
    let total: f64 = weights.iter().sum();
    Ok(returns.iter().zip(weights).map(|(r, w)| r * w).sum::<f64>() / total)
}

/// Trades on one stock over a full price history, for valuation.
#[derive(Debug, Clone, Copy)]
pub struct StockLedger<'a> {
    pub prices: &'a PriceSeries,
    pub cycles: &'a [TradeCycle],
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StockValuation {
    pub symbol: String,
    pub dates: Vec<NaiveDate>,
    pub values: Vec<f64>,
}

/// Daily market value per stock and for the whole portfolio, after costs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValuationSeries {
    pub initial_money: f64,
    pub stocks: Vec<StockValuation>,
    pub dates: Vec<NaiveDate>,
    pub portfolio: Vec<f64>,
}

fn index_of(prices: &PriceSeries, date: NaiveDate) -> Result<usize> {
    prices
        .records()
        .binary_search_by_key(&date, |r| r.date)
        .map_err(|_| {
            Error::Contract(format!(
                "{}: trade on {date} has no price in the series",
                prices.symbol()
            ))
        })
}

fn stock_values(ledger: &StockLedger<'_>, share: f64, costs: &CostModel) -> Result<Vec<f64>> {
    let mut spans = Vec::with_capacity(ledger.cycles.len());
    for c in ledger.cycles {
        let buy = index_of(ledger.prices, c.buy_date)?;
        let sell = index_of(ledger.prices, c.sell_date)?;
        if sell < buy || spans.last().is_some_and(|&(_, prev_sell)| buy < prev_sell) {
            return Err(Error::Contract(format!(
                "{}: trade cycles overlap or run backwards around {}",
                ledger.prices.symbol(),
                c.buy_date
            )));
        }
        spans.push((buy, sell));
    }

    let keep = costs.cycle_factor();
    let mut values = Vec::with_capacity(ledger.prices.len());
    let mut banked = share;
    let mut next = 0;
    for t in 0..ledger.prices.len() {
        while next < spans.len() && spans[next].1 <= t {
            let c = &ledger.cycles[next];
            banked *= c.sell_price / c.buy_price * keep;
            next += 1;
        }
        let v = match spans.get(next) {
            Some(&(buy, _)) if buy <= t => {
                banked * ledger.prices.close(t) / ledger.cycles[next].buy_price
            }
            _ => banked,
        };
        values.push(v);
    }
    Ok(values)
}

/// Marks every stock to market each day and sums them into the portfolio.
///
/// Completed cycles are banked at `sell / buy` less one round-trip cost; an
/// open cycle is marked at today's close over its buy price. Stocks with
/// different calendars contribute their latest value on each date of the
/// union calendar (the initial share before their first date).
pub fn market_value_series(
    ledgers: &[StockLedger<'_>],
    symbols: &[&str],
    initial_money: f64,
    costs: &CostModel,
) -> Result<ValuationSeries> {
    if !(initial_money.is_finite() && initial_money > 0.0) {
        return Err(Error::Domain(format!("initial money must be > 0, got {initial_money}")));
    }
    if ledgers.is_empty() || ledgers.len() != symbols.len() {
        return Err(Error::Contract("need one symbol per ledger and at least one ledger".into()));
    }
    let weights: Vec<f64> = ledgers.iter().map(|l| l.weight).collect();
    if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
        return Err(Error::Domain(format!("weights must be > 0, got {w}")));
    }
    let total: f64 = weights.iter().sum();

    let mut stocks = Vec::with_capacity(ledgers.len());
    for (ledger, symbol) in ledgers.iter().zip(symbols) {
        let share = initial_money * ledger.weight / total;
        stocks.push(StockValuation {
            symbol: (*symbol).to_string(),
            dates: ledger.prices.dates(),
            values: stock_values(ledger, share, costs)?,
        });
    }

    let mut dates: Vec<NaiveDate> = stocks.iter().flat_map(|s| s.dates.iter().copied()).collect();
    dates.sort_unstable();
    dates.dedup();

    let mut cursors = vec![0usize; stocks.len()];
    let portfolio = dates
        .iter()
        .map(|date| {
            stocks
                .iter()
                .zip(cursors.iter_mut())
                .zip(&weights)
                .map(|((s, cur), w)| {
                    while *cur < s.dates.len() && s.dates[*cur] <= *date {
                        *cur += 1;
                    }
                    match *cur {
                        0 => initial_money * w / total,
                        i => s.values[i - 1],
                    }
                })
                .sum()
        })
        .collect();

    Ok(ValuationSeries {
        initial_money,
        stocks,
        dates,
        portfolio,
    })
}

/// Mean and population standard deviation of the daily portfolio value.
pub fn average_portfolio_value(series: &ValuationSeries) -> Result<Summary> {
    aggregate_stats(&series.portfolio)
}

/// Everything needed to run the walk-forward evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BacktestConfig {
    pub model: ModelParams,
    pub estimator: EstimatorConfig,
    pub strategies: Vec<StrategyKind>,
    pub interval_length: usize,
    pub stride: usize,
    pub costs: CostModel,
    pub initial_money: f64,
}

impl Default for BacktestConfig {
    fn default() -> Self {
        Self {
            model: ModelParams::default(),
            estimator: EstimatorConfig::default(),
            strategies: StrategyKind::ALL.to_vec(),
            interval_length: IntervalPlan::DEFAULT_LENGTH,
            stride: IntervalPlan::DEFAULT_STRIDE,
            costs: CostModel::default(),
            initial_money: 100.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalOutcome {
    pub interval: usize,
    pub start_date: NaiveDate,
    pub end_date: NaiveDate,
    pub strategy: StrategyKind,
    pub annual_return: f64,
    pub cycles: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReturnStats {
    pub strategy: StrategyKind,
    pub aar: f64,
    pub sdv: f64,
    pub cycles_per_year: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TradeLog {
    pub strategy: StrategyKind,
    pub start_date: NaiveDate,
    pub end_date: NaiveDate,
    pub cycles: Vec<TradeCycle>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StockReport {
    pub symbol: String,
    pub name: String,
    pub weight: f64,
    pub intervals: usize,
    pub stats: Vec<ReturnStats>,
    pub interval_returns: Vec<IntervalOutcome>,
    /// Trades in the final test interval.
    pub last_interval_trades: Vec<TradeLog>,
    /// Trades over the whole history, as used for valuation.
    pub full_trades: Vec<TradeLog>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PortfolioRow {
    pub strategy: StrategyKind,
    pub aar: f64,
    pub sdv: f64,
    pub cycles_per_year: f64,
    pub cost_per_year: f64,
    pub net_return: f64,
    /// Relative change in net return against BuyHold, when BuyHold was run.
    pub switch_gain: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PortfolioInterval {
    pub interval: usize,
    pub strategy: StrategyKind,
    pub annual_return: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PortfolioReport {
    pub intervals: usize,
    pub rows: Vec<PortfolioRow>,
    pub interval_returns: Vec<PortfolioInterval>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyValuation {
    pub strategy: StrategyKind,
    pub summary: Summary,
    pub series: ValuationSeries,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BacktestReport {
    pub config: BacktestConfig,
    pub stocks: Vec<StockReport>,
    pub portfolio: PortfolioReport,
    pub valuations: Vec<StrategyValuation>,
}

impl BacktestReport {
    pub fn portfolio_row(&self, kind: StrategyKind) -> Option<&PortfolioRow> {
        self.portfolio.rows.iter().find(|r| r.strategy == kind)
    }
}

/// One stock of the universe with its price history.
#[derive(Debug, Clone)]
pub struct StockInput {
    pub entry: UniverseEntry,
    pub prices: PriceSeries,
}

fn run_cell(
    prices: &PriceSeries,
    config: &BacktestConfig,
) -> Result<Vec<crate::strategy::StrategyRun>> {
    let strengths = estimate_series(prices, &config.model, &config.estimator)?;
    config
        .strategies
        .iter()
        .map(|&kind| run_strategy(prices, &strengths, kind))
        .collect()
}

fn evaluate_stock(stock: &StockInput, config: &BacktestConfig) -> Result<StockReport> {
    let prices = &stock.prices;
    let plan = make_intervals(prices.len(), config.interval_length, config.stride)?;
    let mut interval_returns = Vec::with_capacity(plan.len() * config.strategies.len());
    let mut last_interval_trades = Vec::new();

    for (j, &(start, end)) in plan.intervals.iter().enumerate() {
        let slice = prices.slice(start, end)?;
        let runs = run_cell(&slice, config)?;
        for run in &runs {
            interval_returns.push(IntervalOutcome {
                interval: j,
                start_date: slice.date(0),
                end_date: slice.date(slice.len() - 1),
                strategy: run.kind,
                annual_return: annual_return(1.0, 1.0 + run.accumulated_return())?,
                cycles: run.cycles.len(),
            });
        }
        if j + 1 == plan.len() {
            last_interval_trades = runs
                .into_iter()
                .map(|run| TradeLog {
                    strategy: run.kind,
                    start_date: slice.date(0),
                    end_date: slice.date(slice.len() - 1),
                    cycles: run.cycles,
                })
                .collect();
        }
    }

    let stats = config
        .strategies
        .iter()
        .map(|&kind| {
            let (ars, cycles): (Vec<f64>, Vec<f64>) = interval_returns
                .iter()
                .filter(|o| o.strategy == kind)
                .map(|o| (o.annual_return, o.cycles as f64))
                .unzip();
            let s = aggregate_stats(&ars)?;
            Ok(ReturnStats {
                strategy: kind,
                aar: s.mean,
                sdv: s.sdv,
                cycles_per_year: aggregate_stats(&cycles)?.mean / INTERVAL_YEARS,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let full_trades = run_cell(prices, config)?
        .into_iter()
        .map(|run| TradeLog {
            strategy: run.kind,
            start_date: prices.date(0),
            end_date: prices.date(prices.len() - 1),
            cycles: run.cycles,
        })
        .collect();

    Ok(StockReport {
        symbol: stock.entry.symbol.clone(),
        name: stock.entry.name.clone(),
        weight: stock.entry.weight,
        intervals: plan.len(),
        stats,
        interval_returns,
        last_interval_trades,
        full_trades,
    })
}

fn portfolio_report(stocks: &[StockReport], config: &BacktestConfig) -> Result<PortfolioReport> {
    let weights: Vec<f64> = stocks.iter().map(|s| s.weight).collect();
    let intervals = stocks.iter().map(|s| s.intervals).min().unwrap_or(0);
    let mut interval_returns = Vec::new();
    let mut rows = Vec::new();

    for &kind in &config.strategies {
        let per_stock: Vec<Vec<f64>> = stocks
            .iter()
            .map(|s| {
                s.interval_returns
                    .iter()
                    .filter(|o| o.strategy == kind)
                    .map(|o| o.annual_return)
                    .collect()
            })
            .collect();
        let mut port = Vec::with_capacity(intervals);
        for j in 0..intervals {
            let returns: Vec<f64> = per_stock.iter().map(|r| r[j]).collect();
            let value = portfolio_return(&returns, &weights)?;
            port.push(value);
            interval_returns.push(PortfolioInterval {
                interval: j,
                strategy: kind,
                annual_return: value,
            });
        }
        let summary = aggregate_stats(&port)?;
        let cycles: Vec<f64> = stocks
            .iter()
            .map(|s| {
                s.stats
                    .iter()
                    .find(|st| st.strategy == kind)
                    .map_or(0.0, |st| st.cycles_per_year)
            })
            .collect();
        let cycles_per_year = portfolio_return(&cycles, &weights)?;
        let cost_per_year = cycles_per_year * config.costs.per_cycle();
        rows.push(PortfolioRow {
            strategy: kind,
            aar: summary.mean,
            sdv: summary.sdv,
            cycles_per_year,
            cost_per_year,
            net_return: summary.mean - cost_per_year,
            switch_gain: None,
        });
    }

    if let Some(base) = rows.iter().find(|r| r.strategy == StrategyKind::BuyHold).map(|r| r.net_return) {
        for row in rows.iter_mut().filter(|r| r.strategy != StrategyKind::BuyHold) {
            row.switch_gain = Some((row.net_return - base) / base);
        }
    }

    Ok(PortfolioReport {
        intervals,
        rows,
        interval_returns,
    })
}

/// Runs every (stock, interval, strategy) cell, then aggregates in universe
/// order. Stocks are evaluated in parallel; the result does not depend on
/// scheduling.
pub fn run_backtest(config: &BacktestConfig, universe: &[StockInput]) -> Result<BacktestReport> {
    if universe.is_empty() {
        return Err(Error::Contract("universe is empty".into()));
    }
    if config.strategies.is_empty() {
        return Err(Error::Contract("no strategies selected".into()));
    }
    let stocks = universe
        .par_iter()
        .map(|s| evaluate_stock(s, config))
        .collect::<Result<Vec<_>>>()?;

    let portfolio = portfolio_report(&stocks, config)?;

    let symbols: Vec<&str> = universe.iter().map(|s| s.entry.symbol.as_str()).collect();
    let valuations = config
        .strategies
        .iter()
        .map(|&kind| {
            let ledgers: Vec<StockLedger<'_>> = universe
                .iter()
                .zip(&stocks)
                .map(|(input, report)| StockLedger {
                    prices: &input.prices,
                    cycles: report
                        .full_trades
                        .iter()
                        .find(|t| t.strategy == kind)
                        .map_or(&[][..], |t| &t.cycles[..]),
                    weight: input.entry.weight,
                })
                .collect();
            let series = market_value_series(&ledgers, &symbols, config.initial_money, &config.costs)?;
            Ok(StrategyValuation {
                strategy: kind,
                summary: average_portfolio_value(&series)?,
                series,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(BacktestReport {
        config: config.clone(),
        stocks,
        portfolio,
        valuations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn interval_counts() {
        assert_eq!(make_intervals(1477, 492, 5).unwrap().len(), 198);
        let one = make_intervals(492, 492, 5).unwrap();
        assert_eq!(one.intervals, vec![(0, 491)]);
        assert!(matches!(make_intervals(491, 492, 5), Err(Error::InsufficientData { .. })));
        assert!(make_intervals(10, 0, 1).is_err());
        assert!(make_intervals(10, 3, 0).is_err());
    }

    #[test]
    fn annual_return_examples() {
        assert_abs_diff_eq!(annual_return(100.0, 120.0).unwrap(), 0.10, epsilon = 1e-15);
        assert_eq!(annual_return(100.0, 100.0).unwrap(), 0.0);
        assert_abs_diff_eq!(annual_return(100.0, 80.0).unwrap(), -0.10, epsilon = 1e-15);
        assert!(matches!(annual_return(0.0, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn aggregate_examples() {
        let s = aggregate_stats(&[0.1, 0.1, 0.1]).unwrap();
        assert_abs_diff_eq!(s.mean, 0.1, epsilon = 1e-15);
        assert_abs_diff_eq!(s.sdv, 0.0, epsilon = 1e-15);
        let s = aggregate_stats(&[0.0, 0.2]).unwrap();
        assert_abs_diff_eq!(s.mean, 0.1, epsilon = 1e-15);
        assert_abs_diff_eq!(s.sdv, 0.1, epsilon = 1e-15);
        assert_eq!(aggregate_stats(&[0.3]).unwrap(), Summary { mean: 0.3, sdv: 0.0 });
        assert!(aggregate_stats(&[]).is_err());
    }

    #[test]
    fn portfolio_return_examples() {
        assert_abs_diff_eq!(portfolio_return(&[0.1, 0.2], &[1.0, 1.0]).unwrap(), 0.15, epsilon = 1e-15);
        assert_eq!(portfolio_return(&[0.07], &[3.0]).unwrap(), 0.07);
        assert_abs_diff_eq!(portfolio_return(&[0.0, 0.2], &[15.0, 5.0]).unwrap(), 0.05, epsilon = 1e-15);
        assert!(matches!(portfolio_return(&[0.1], &[1.0, 2.0]), Err(Error::Contract(_))));
    }

    #[test]
    fn default_costs() {
        let c = CostModel::default();
        assert_abs_diff_eq!(c.per_cycle(), 0.00396, epsilon = 1e-15);
        let mult = 1.0 - c.cycle_factor();
        assert!((0.00395..=0.00397).contains(&mult), "{mult}");
        assert!(CostModel::new(-0.1, 0.0).is_err());
    }

    fn d(i: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(2020, 3, 2).unwrap() + chrono::Days::new(i as u64)
    }

    fn cyc(buy_day: usize, buy_price: f64, sell_day: usize, sell_price: f64) -> TradeCycle {
        TradeCycle {
            buy_day,
            buy_date: d(buy_day as u32),
            buy_price,
            sell_day,
            sell_date: d(sell_day as u32),
            sell_price,
            forced: false,
        }
    }

    #[test]
    fn valuation_of_one_cycle() {
        let prices = PriceSeries::on_weekdays("A", d(0), &[10.0, 10.0, 10.5, 11.0, 11.0]).unwrap();
        // Weekday calendar from Monday 2020-03-02 lines up with d(0)..d(4).
        let cycles = [cyc(1, 10.0, 3, 11.0)];
        let ledger = StockLedger { prices: &prices, cycles: &cycles, weight: 1.0 };
        let v = market_value_series(&[ledger], &["A"], 100.0, &CostModel::default()).unwrap();
        let values = &v.stocks[0].values;
        assert_eq!(values[0], 100.0);
        assert_eq!(values[1], 100.0);
        assert_abs_diff_eq!(values[2], 105.0, epsilon = 1e-12);
        assert_abs_diff_eq!(values[3], 109.56474, epsilon = 1e-5);
        assert_abs_diff_eq!(values[3], 100.0 * 1.1 * 0.99892 * 0.99712, epsilon = 1e-12);
        assert_eq!(values[4], values[3]);
        assert_eq!(v.portfolio, *values);
    }

    #[test]
    fn valuation_without_trades_is_the_share() {
        let a = PriceSeries::on_weekdays("A", d(0), &[10.0, 12.0, 9.0]).unwrap();
        let b = PriceSeries::on_weekdays("B", d(0), &[1.0, 2.0, 3.0]).unwrap();
        let ledgers = [
            StockLedger { prices: &a, cycles: &[], weight: 15.0 },
            StockLedger { prices: &b, cycles: &[], weight: 5.0 },
        ];
        let v = market_value_series(&ledgers, &["A", "B"], 100.0, &CostModel::default()).unwrap();
        assert!(v.stocks[0].values.iter().all(|&x| x == 75.0));
        assert!(v.stocks[1].values.iter().all(|&x| x == 25.0));
        assert!(v.portfolio.iter().all(|&x| x == 100.0));
    }

    #[test]
    fn missing_trade_date_is_rejected() {
        let a = PriceSeries::on_weekdays("A", d(0), &[10.0, 12.0, 9.0]).unwrap();
        let cycles = [cyc(1, 12.0, 30, 9.0)];
        let ledger = StockLedger { prices: &a, cycles: &cycles, weight: 1.0 };
        assert!(matches!(
            market_value_series(&[ledger], &["A"], 100.0, &CostModel::default()),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn calendars_are_merged_with_carry_forward() {
        let a = PriceSeries::on_weekdays("A", d(0), &[10.0, 11.0, 12.0]).unwrap();
        let b = PriceSeries::on_weekdays("B", d(1), &[5.0, 5.0, 5.0]).unwrap();
        let ca = [cyc(0, 10.0, 2, 12.0)];
        let ledgers = [
            StockLedger { prices: &a, cycles: &ca, weight: 1.0 },
            StockLedger { prices: &b, cycles: &[], weight: 1.0 },
        ];
        let v = market_value_series(&ledgers, &["A", "B"], 100.0, &CostModel::zero()).unwrap();
        assert_eq!(v.dates.len(), 4);
        assert_abs_diff_eq!(v.portfolio[0], 100.0, epsilon = 1e-12);
        assert_abs_diff_eq!(v.portfolio[1], 55.0 + 50.0, epsilon = 1e-12);
        assert_abs_diff_eq!(v.portfolio[3], 60.0 + 50.0, epsilon = 1e-12);
    }

    #[test]
    fn average_value_examples() {
        let series = |p: Vec<f64>| ValuationSeries {
            initial_money: 100.0,
            stocks: vec![],
            dates: (0..p.len() as u32).map(d).collect(),
            portfolio: p,
        };
        assert_eq!(
            average_portfolio_value(&series(vec![100.0; 4])).unwrap(),
            Summary { mean: 100.0, sdv: 0.0 }
        );
        assert_eq!(
            average_portfolio_value(&series(vec![100.0, 120.0])).unwrap(),
            Summary { mean: 110.0, sdv: 10.0 }
        );
    }
}

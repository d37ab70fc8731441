//! CSV and JSON readers and writers.
//!
//! Input schemas:
//!
//! * prices: `date,adj_close` with ISO dates, strictly increasing
//! * universe: `symbol,name,weight` (weight in percent, > 0)
//! * strength path: `start_day,a6,a7`
//!
//! Floats are written with Rust's shortest round-trip formatting, so every
//! value reloads bit-for-bit.

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::backtest::{BacktestReport, ValuationSeries};
use crate::error::{Error, Result};
use crate::estimator::StrengthSeries;
use crate::series::{PriceRecord, PriceSeries};
use crate::simulator::{SimulatedSeries, StrengthSegment};
use crate::strategy::TradeCycle;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniverseEntry {
    pub symbol: String,
    pub name: String,
    pub weight: f64,
}

fn reader(path: &Path) -> Result<csv::Reader<fs::File>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file))
}

fn writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::Writer::from_writer(file))
}

fn row_number(record: &csv::StringRecord, fallback: usize) -> usize {
    record.position().map_or(fallback, |p| p.line() as usize)
}

fn field<'r>(record: &'r csv::StringRecord, idx: usize, name: &str, path: &Path, row: usize) -> Result<&'r str> {
    record
        .get(idx)
        .ok_or_else(|| Error::load(path, row, format!("missing `{name}` column")))
}

fn parse_f64(s: &str, name: &str, path: &Path, row: usize) -> Result<f64> {
    s.parse::<f64>()
        .map_err(|_| Error::load(path, row, format!("`{name}` is not a number: `{s}`")))
}

fn parse_date(s: &str, path: &Path, row: usize) -> Result<NaiveDate> {
    NaiveDate::parse_from_str(s, "%Y-%m-%d")
        .map_err(|_| Error::load(path, row, format!("`date` is not an ISO date: `{s}`")))
}

fn opt_f64(s: &str, name: &str, path: &Path, row: usize) -> Result<Option<f64>> {
    if s.is_empty() {
        Ok(None)
    } else {
        parse_f64(s, name, path, row).map(Some)
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Loads a `date,adj_close` file. Errors name the offending line.
pub fn load_prices(path: impl AsRef<Path>, symbol: &str) -> Result<PriceSeries> {
    let path = path.as_ref();
    let mut rdr = reader(path)?;
    let mut records: Vec<PriceRecord> = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = row_number(&rec, i + 2);
        if rec.len() != 2 {
            return Err(Error::load(path, row, format!("expected 2 fields, found {}", rec.len())));
        }
        let date = parse_date(field(&rec, 0, "date", path, row)?, path, row)?;
        let adj_close = parse_f64(field(&rec, 1, "adj_close", path, row)?, "adj_close", path, row)?;
        if !(adj_close.is_finite() && adj_close > 0.0) {
            return Err(Error::load(path, row, format!("price must be > 0, got {adj_close}")));
        }
        if let Some(prev) = records.last() {
            if prev.date == date {
                return Err(Error::load(path, row, format!("duplicate date {date}")));
            }
            if prev.date > date {
                return Err(Error::load(path, row, format!("date {date} is earlier than {}", prev.date)));
            }
        }
        records.push(PriceRecord { date, adj_close });
    }
    PriceSeries::new(symbol, records)
}

pub fn write_prices(path: impl AsRef<Path>, series: &PriceSeries) -> Result<()> {
    let path = path.as_ref();
    let mut w = writer(path)?;
    w.write_record(["date", "adj_close"])?;
    for r in series.records() {
        w.write_record([r.date.to_string(), r.adj_close.to_string()])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Loads a `symbol,name,weight` universe file.
pub fn load_universe(path: impl AsRef<Path>) -> Result<Vec<UniverseEntry>> {
    let path = path.as_ref();
    let mut rdr = reader(path)?;
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = row_number(&rec, i + 2);
        let symbol = field(&rec, 0, "symbol", path, row)?.to_string();
        let name = field(&rec, 1, "name", path, row)?.to_string();
        let weight = parse_f64(field(&rec, 2, "weight", path, row)?, "weight", path, row)?;
        if symbol.is_empty() {
            return Err(Error::load(path, row, "empty symbol"));
        }
        if !(weight.is_finite() && weight > 0.0) {
            return Err(Error::load(path, row, format!("weight must be > 0, got {weight}")));
        }
        if !seen.insert(symbol.clone()) {
            return Err(Error::load(path, row, format!("duplicate symbol {symbol}")));
        }
        out.push(UniverseEntry { symbol, name, weight });
    }
    if out.is_empty() {
        return Err(Error::load(path, 1, "universe has no entries"));
    }
    Ok(out)
}

pub fn write_universe(path: impl AsRef<Path>, universe: &[UniverseEntry]) -> Result<()> {
    let path = path.as_ref();
    let mut w = writer(path)?;
    w.write_record(["symbol", "name", "weight"])?;
    for u in universe {
        w.write_record([u.symbol.clone(), u.name.clone(), u.weight.to_string()])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn load_strength_path(path: impl AsRef<Path>) -> Result<Vec<StrengthSegment>> {
    let path = path.as_ref();
    let mut rdr = reader(path)?;
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = row_number(&rec, i + 2);
        let start = field(&rec, 0, "start_day", path, row)?;
        let start_day = start
            .parse::<usize>()
            .map_err(|_| Error::load(path, row, format!("`start_day` is not a day number: `{start}`")))?;
        let a6 = parse_f64(field(&rec, 1, "a6", path, row)?, "a6", path, row)?;
        let a7 = parse_f64(field(&rec, 2, "a7", path, row)?, "a7", path, row)?;
        out.push(StrengthSegment { start_day, a6, a7 });
    }
    Ok(out)
}

pub fn write_strength_path(path: impl AsRef<Path>, segments: &[StrengthSegment]) -> Result<()> {
    let path = path.as_ref();
    let mut w = writer(path)?;
    w.write_record(["start_day", "a6", "a7"])?;
    for s in segments {
        w.write_record([s.start_day.to_string(), s.a6.to_string(), s.a7.to_string()])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// `day,price,signal,noise`; signal and noise are blank on days that did not
/// produce a next price.
pub fn write_simulated(path: impl AsRef<Path>, series: &SimulatedSeries) -> Result<()> {
    let path = path.as_ref();
    let mut w = writer(path)?;
    w.write_record(["day", "price", "signal", "noise"])?;
    for (i, price) in series.prices().iter().enumerate() {
        let day = series.first_day() + i as i64;
        let t = usize::try_from(day).ok().filter(|&t| t < series.days());
        w.write_record([
            day.to_string(),
            price.to_string(),
            fmt_opt(t.map(|t| series.signal()[t])),
            fmt_opt(t.map(|t| series.noise()[t])),
        ])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// One row of a strength export.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrengthRow {
    pub date: NaiveDate,
    pub a6_hat: f64,
    pub a7_hat: f64,
    pub a6_bar: Option<f64>,
    pub a7_bar: Option<f64>,
}

/// `date,a6_hat,a7_hat,a6_bar_k,a7_bar_k`; the averages are blank during warm-up.
pub fn write_strengths(path: impl AsRef<Path>, series: &StrengthSeries, k: usize) -> Result<()> {
    let path = path.as_ref();
    let mut w = writer(path)?;
    w.write_record(["date", "a6_hat", "a7_hat", "a6_bar_k", "a7_bar_k"])?;
    for (e, bar) in series.entries().iter().zip(series.smoothed(k)) {
        w.write_record([
            e.date.to_string(),
            e.a6_hat.to_string(),
            e.a7_hat.to_string(),
            fmt_opt(bar.map(|b| b.0)),
            fmt_opt(bar.map(|b| b.1)),
        ])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn load_strengths(path: impl AsRef<Path>) -> Result<Vec<StrengthRow>> {
    let path = path.as_ref();
    let mut rdr = reader(path)?;
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = row_number(&rec, i + 2);
        out.push(StrengthRow {
            date: parse_date(field(&rec, 0, "date", path, row)?, path, row)?,
            a6_hat: parse_f64(field(&rec, 1, "a6_hat", path, row)?, "a6_hat", path, row)?,
            a7_hat: parse_f64(field(&rec, 2, "a7_hat", path, row)?, "a7_hat", path, row)?,
            a6_bar: opt_f64(field(&rec, 3, "a6_bar_k", path, row)?, "a6_bar_k", path, row)?,
            a7_bar: opt_f64(field(&rec, 4, "a7_bar_k", path, row)?, "a7_bar_k", path, row)?,
        });
    }
    Ok(out)
}

/// `buy_date,buy_price,sell_date,sell_price,return`.
pub fn write_trades(path: impl AsRef<Path>, cycles: &[TradeCycle]) -> Result<()> {
    let path = path.as_ref();
    let mut w = writer(path)?;
    w.write_record(["buy_date", "buy_price", "sell_date", "sell_price", "return"])?;
    for c in cycles {
        w.write_record([
            c.buy_date.to_string(),
            c.buy_price.to_string(),
            c.sell_date.to_string(),
            c.sell_price.to_string(),
            c.cycle_return().to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// `date,symbol,value` rows, portfolio rows under the symbol `PORT`.
pub fn write_valuation(path: impl AsRef<Path>, series: &ValuationSeries) -> Result<()> {
    let path = path.as_ref();
    let mut w = writer(path)?;
    w.write_record(["date", "symbol", "value"])?;
    for (date, v) in series.dates.iter().zip(&series.portfolio) {
        w.write_record([date.to_string(), PORTFOLIO_SYMBOL.to_string(), v.to_string()])?;
    }
    for s in &series.stocks {
        for (date, v) in s.dates.iter().zip(&s.values) {
            w.write_record([date.to_string(), s.symbol.clone(), v.to_string()])?;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub const PORTFOLIO_SYMBOL: &str = "PORT";

/// Reads a valuation file back as `(date, symbol, value)` triples.
pub fn load_valuation(path: impl AsRef<Path>) -> Result<Vec<(NaiveDate, String, f64)>> {
    let path = path.as_ref();
    let mut rdr = reader(path)?;
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = row_number(&rec, i + 2);
        out.push((
            parse_date(field(&rec, 0, "date", path, row)?, path, row)?,
            field(&rec, 1, "symbol", path, row)?.to_string(),
            parse_f64(field(&rec, 2, "value", path, row)?, "value", path, row)?,
        ));
    }
    Ok(out)
}

pub const REPORT_JSON: &str = "report.json";

/// Writes the full report: the JSON document plus the CSV tables derived from
/// it. Returns the paths written, in a fixed order.
pub fn emit_report(report: &BacktestReport, out_dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let out_dir = out_dir.as_ref();
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let json_path = out_dir.join(REPORT_JSON);
    let json = serde_json::to_string_pretty(report)?;
    fs::write(&json_path, json + "\n").map_err(|e| Error::io(&json_path, e))?;
    let mut written = vec![json_path];
    written.extend(render_tables(report, out_dir)?);
    Ok(written)
}

pub fn load_report(dir: impl AsRef<Path>) -> Result<BacktestReport> {
    let path = dir.as_ref().join(REPORT_JSON);
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    Ok(serde_json::from_str(&text)?)
}

/// Renders the CSV tables of a report into `out_dir`.
pub fn render_tables(report: &BacktestReport, out_dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let out_dir = out_dir.as_ref();
    let mut written = Vec::new();

    let path = out_dir.join("stock_stats.csv");
    let mut w = writer(&path)?;
    w.write_record(["symbol", "name", "weight", "strategy", "aar", "sdv", "cycles_per_year", "intervals"])?;
    for s in &report.stocks {
        for st in &s.stats {
            w.write_record([
                s.symbol.clone(),
                s.name.clone(),
                s.weight.to_string(),
                st.strategy.to_string(),
                st.aar.to_string(),
                st.sdv.to_string(),
                st.cycles_per_year.to_string(),
                s.intervals.to_string(),
            ])?;
        }
    }
    w.flush().map_err(|e| Error::io(&path, e))?;
    written.push(path);

    let path = out_dir.join("portfolio.csv");
    let mut w = writer(&path)?;
    w.write_record([
        "strategy",
        "aar",
        "sdv",
        "cycles_per_year",
        "cost_per_year",
        "net_return",
        "switch_gain",
        "avg_value",
        "avg_value_sdv",
    ])?;
    for row in &report.portfolio.rows {
        let val = report.valuations.iter().find(|v| v.strategy == row.strategy);
        w.write_record([
            row.strategy.to_string(),
            row.aar.to_string(),
            row.sdv.to_string(),
            row.cycles_per_year.to_string(),
            row.cost_per_year.to_string(),
            row.net_return.to_string(),
            fmt_opt(row.switch_gain),
            fmt_opt(val.map(|v| v.summary.mean)),
            fmt_opt(val.map(|v| v.summary.sdv)),
        ])?;
    }
    w.flush().map_err(|e| Error::io(&path, e))?;
    written.push(path);

    let path = out_dir.join("interval_returns.csv");
    let mut w = writer(&path)?;
    w.write_record(["interval", "start_date", "end_date", "symbol", "strategy", "annual_return", "cycles"])?;
    for s in &report.stocks {
        for o in &s.interval_returns {
            w.write_record([
                o.interval.to_string(),
                o.start_date.to_string(),
                o.end_date.to_string(),
                s.symbol.clone(),
                o.strategy.to_string(),
                o.annual_return.to_string(),
                o.cycles.to_string(),
            ])?;
        }
    }
    for p in &report.portfolio.interval_returns {
        w.write_record([
            p.interval.to_string(),
            String::new(),
            String::new(),
            PORTFOLIO_SYMBOL.to_string(),
            p.strategy.to_string(),
            p.annual_return.to_string(),
            String::new(),
        ])?;
    }
    w.flush().map_err(|e| Error::io(&path, e))?;
    written.push(path);

    for v in &report.valuations {
        let path = out_dir.join(format!("valuation_{}.csv", v.strategy));
        write_valuation(&path, &v.series)?;
        written.push(path);
    }

    for s in &report.stocks {
        for log in &s.last_interval_trades {
            let path = out_dir
                .join("trades")
                .join(format!("{}_{}_last_interval.csv", s.symbol, log.strategy));
            write_trades(&path, &log.cycles)?;
            written.push(path);
        }
        for log in &s.full_trades {
            let path = out_dir
                .join("trades")
                .join(format!("{}_{}_full.csv", s.symbol, log.strategy));
            write_trades(&path, &log.cycles)?;
            written.push(path);
        }
    }

    Ok(written)
}

/// Plain-text portfolio summary: one row per strategy, then the average
/// portfolio values.
pub fn portfolio_table(report: &BacktestReport) -> String {
    let pct = |v: f64| format!("{:.2}%", v * 100.0);
    let mut out = format!(
        "{:<10} {:>20} {:>14} {:>14} {:>12} {:>12}\n",
        "strategy", "aar (+/- sdv)", "cycles/year", "cost/year", "net/year", "switch gain"
    );
    for r in &report.portfolio.rows {
        out.push_str(&format!(
            "{:<10} {:>20} {:>14.2} {:>14} {:>12} {:>12}\n",
            r.strategy.to_string(),
            format!("{} (+/- {})", pct(r.aar), pct(r.sdv)),
            r.cycles_per_year,
            pct(r.cost_per_year),
            pct(r.net_return),
            r.switch_gain.map(pct).unwrap_or_else(|| "-".into()),
        ));
    }
    for v in &report.valuations {
        out.push_str(&format!(
            "average portfolio value {:<9} {:.2} (sdv {:.2})\n",
            v.strategy.to_string(),
            v.summary.mean,
            v.summary.sdv
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn file(dir: &Path, name: &str, body: &str) -> PathBuf {
        let p = dir.join(name);
        let mut f = fs::File::create(&p).unwrap();
        f.write_all(body.as_bytes()).unwrap();
        p
    }

    #[test]
    fn loads_valid_prices() {
        let dir = tempfile::tempdir().unwrap();
        let p = file(dir.path(), "a.csv", "date,adj_close\n2013-06-27,4.88\n2013-06-28,4.89\n");
        let s = load_prices(&p, "HK1398").unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.symbol(), "HK1398");
        assert_eq!(s.close(1), 4.89);
    }

    #[test]
    fn price_errors_name_the_row() {
        let dir = tempfile::tempdir().unwrap();
        let p = file(dir.path(), "z.csv", "date,adj_close\n2013-06-27,4.88\n2013-06-28,0\n");
        match load_prices(&p, "X") {
            Err(Error::Load { row, .. }) => assert_eq!(row, 3),
            other => panic!("expected load error, got {other:?}"),
        }
        let p = file(dir.path(), "o.csv", "date,adj_close\n2013-06-28,4.88\n2013-06-27,4.9\n");
        assert!(matches!(load_prices(&p, "X"), Err(Error::Load { row: 3, .. })));
        let p = file(dir.path(), "d.csv", "date,adj_close\n2013-06-28,4.88\n2013-06-28,4.9\n");
        assert!(matches!(load_prices(&p, "X"), Err(Error::Load { row: 3, .. })));
        let p = file(dir.path(), "m.csv", "date,adj_close\n2013-06-28,abc\n");
        assert!(matches!(load_prices(&p, "X"), Err(Error::Load { row: 2, .. })));
        let p = file(dir.path(), "b.csv", "date,adj_close\n28/06/2013,1.0\n");
        assert!(matches!(load_prices(&p, "X"), Err(Error::Load { row: 2, .. })));
        assert!(matches!(load_prices(dir.path().join("nope.csv"), "X"), Err(Error::Io { .. })));
    }

    #[test]
    fn universe_validation() {
        let dir = tempfile::tempdir().unwrap();
        let p = file(dir.path(), "u.csv", "symbol,name,weight\nHK0005,HSBC Holdings plc,15\n");
        let u = load_universe(&p).unwrap();
        assert_eq!(u.len(), 1);
        assert_eq!(u[0].weight, 15.0);
        let p = file(dir.path(), "neg.csv", "symbol,name,weight\nA,a,-1\n");
        assert!(matches!(load_universe(&p), Err(Error::Load { row: 2, .. })));
        let p = file(dir.path(), "dup.csv", "symbol,name,weight\nA,a,1\nA,b,2\n");
        assert!(matches!(load_universe(&p), Err(Error::Load { row: 3, .. })));
    }

    #[test]
    fn bundled_universe_has_twenty_stocks() {
        let p = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/hsi_top20.csv");
        let u = load_universe(p).unwrap();
        assert_eq!(u.len(), 20);
        assert_eq!((u[0].symbol.as_str(), u[0].weight), ("HK0005", 15.0));
        assert_eq!((u[19].symbol.as_str(), u[19].weight), ("HK0011", 1.34));
    }

    #[test]
    fn empty_trade_log_is_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.csv");
        write_trades(&p, &[]).unwrap();
        assert_eq!(
            fs::read_to_string(p).unwrap(),
            "buy_date,buy_price,sell_date,sell_price,return\n"
        );
    }

    #[test]
    fn strength_path_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let segs = vec![
            StrengthSegment { start_day: 0, a6: 0.0, a7: 0.35 },
            StrengthSegment { start_day: 120, a6: 0.2, a7: -0.1 },
        ];
        let p = dir.path().join("path.csv");
        write_strength_path(&p, &segs).unwrap();
        assert_eq!(load_strength_path(&p).unwrap(), segs);
    }
}

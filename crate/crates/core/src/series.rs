//! Dated daily-close price series.

use chrono::{Datelike, Duration, NaiveDate, Weekday};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PriceRecord {
    pub date: NaiveDate,
    pub adj_close: f64,
}

/// Adjusted closes for one symbol, strictly increasing in date.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriceSeries {
    symbol: String,
    records: Vec<PriceRecord>,
}

impl PriceSeries {
    pub fn new(symbol: impl Into<String>, records: Vec<PriceRecord>) -> Result<Self> {
        for (i, r) in records.iter().enumerate() {
            if !(r.adj_close.is_finite() && r.adj_close > 0.0) {
                return Err(Error::Domain(format!(
                    "price on {} must be finite and > 0, got {}",
                    r.date, r.adj_close
                )));
            }
            if i > 0 && records[i - 1].date >= r.date {
                return Err(Error::Contract(format!(
                    "dates must be strictly increasing: {} follows {}",
                    r.date,
                    records[i - 1].date
                )));
            }
        }
        Ok(Self {
            symbol: symbol.into(),
            records,
        })
    }

    /// Builds a series on consecutive weekdays starting at `start`
    /// (rolled forward to a weekday if needed).
    pub fn on_weekdays(symbol: impl Into<String>, start: NaiveDate, prices: &[f64]) -> Result<Self> {
        let dates = weekdays_from(start).take(prices.len());
        let records = dates
            .zip(prices)
            .map(|(date, &adj_close)| PriceRecord { date, adj_close })
            .collect();
        Self::new(symbol, records)
    }

    pub fn symbol(&self) -> &str {
        &self.symbol
    }

    pub fn records(&self) -> &[PriceRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn prices(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.adj_close).collect()
    }

    pub fn dates(&self) -> Vec<NaiveDate> {
        self.records.iter().map(|r| r.date).collect()
    }

    pub fn close(&self, index: usize) -> f64 {
        self.records[index].adj_close
    }

    pub fn date(&self, index: usize) -> NaiveDate {
        self.records[index].date
    }

    /// Sub-series over the inclusive index range `start..=end`.
    pub fn slice(&self, start: usize, end: usize) -> Result<Self> {
        if start > end || end >= self.records.len() {
            return Err(Error::Contract(format!(
                "slice {start}..={end} out of range for series of length {}",
                self.records.len()
            )));
        }
        Ok(Self {
            symbol: self.symbol.clone(),
            records: self.records[start..=end].to_vec(),
        })
    }

    /// Multiplies every close by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let records = self
            .records
            .iter()
            .map(|r| PriceRecord {
                date: r.date,
                adj_close: r.adj_close * factor,
            })
            .collect();
        Self::new(self.symbol.clone(), records)
    }
}

fn weekdays_from(start: NaiveDate) -> impl Iterator<Item = NaiveDate> {
    std::iter::successors(Some(start), |d| Some(*d + Duration::days(1)))
        .filter(|d| !matches!(d.weekday(), Weekday::Sat | Weekday::Sun))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(y: i32, m: u32, day: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(y, m, day).unwrap()
    }

    #[test]
    fn rejects_unordered_and_nonpositive() {
        let r = |date, adj_close| PriceRecord { date, adj_close };
        assert!(PriceSeries::new("X", vec![r(d(2020, 1, 2), 1.0), r(d(2020, 1, 1), 1.0)]).is_err());
        assert!(PriceSeries::new("X", vec![r(d(2020, 1, 1), 1.0), r(d(2020, 1, 1), 1.0)]).is_err());
        assert!(PriceSeries::new("X", vec![r(d(2020, 1, 1), 0.0)]).is_err());
    }

    #[test]
    fn weekday_calendar_skips_weekends() {
        // 2011-07-01 is a Friday.
        let s = PriceSeries::on_weekdays("X", d(2011, 7, 1), &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(s.dates(), vec![d(2011, 7, 1), d(2011, 7, 4), d(2011, 7, 5)]);
        let s = PriceSeries::on_weekdays("X", d(2011, 7, 2), &[1.0]).unwrap();
        assert_eq!(s.date(0), d(2011, 7, 4));
    }

    #[test]
    fn slice_is_inclusive() {
        let s = PriceSeries::on_weekdays("X", d(2020, 1, 6), &[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(s.slice(1, 2).unwrap().prices(), vec![2.0, 3.0]);
        assert!(s.slice(2, 4).is_err());
    }
}

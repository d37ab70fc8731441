//! Full-cash / full-stock trading rules driven by smoothed strength estimates.
//!
//! * FollowBB enters when the big buyer shows up with no big seller around
//!   (`a7_bar > 0`, `a6_bar < 0`) and stays in for as long as `a7_bar > 0`.
//! * RideMood is long whenever `a7_bar - a6_bar > 0` and flat when it turns
//!   negative; a mood of exactly zero keeps the current position.
//! * BuyHold buys the first close and sells the last.
//!
//! Every decision executes at the close of the day it is made. An open
//! position is liquidated at the final close of the run.

use std::fmt;
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::StrengthSeries;
use crate::series::PriceSeries;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StrategyKind {
    FollowBB,
    RideMood,
    BuyHold,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 3] = [Self::FollowBB, Self::RideMood, Self::BuyHold];

    /// Moving-average window applied to the strength estimates.
    pub fn smoothing(self) -> Option<usize> {
        match self {
            Self::FollowBB => Some(3),
            Self::RideMood => Some(5),
            Self::BuyHold => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::FollowBB => "followbb",
            Self::RideMood => "ridemood",
            Self::BuyHold => "buyhold",
        }
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StrategyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace(['&', '-', '_'], "").as_str() {
            "followbb" | "followthebigbuyer" => Ok(Self::FollowBB),
            "ridemood" | "ridethemood" => Ok(Self::RideMood),
            "buyhold" | "buyandhold" => Ok(Self::BuyHold),
            other => Err(Error::Contract(format!("unknown strategy `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Position {
    Cash,
    Stock {
        entry_day: usize,
        entry_date: NaiveDate,
        entry_price: f64,
    },
}

impl Position {
    pub fn is_cash(&self) -> bool {
        matches!(self, Position::Cash)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Action {
    Buy,
    Sell,
    HoldStock,
    StayCash,
}

pub fn follow_bb_step(position: &Position, a7_bar: f64, a6_bar: f64) -> Action {
    match position {
        Position::Cash if a7_bar > 0.0 && a6_bar < 0.0 => Action::Buy,
        Position::Cash => Action::StayCash,
        Position::Stock { .. } if a7_bar > 0.0 => Action::HoldStock,
        Position::Stock { .. } => Action::Sell,
    }
}

pub fn ride_mood_step(position: &Position, mood: f64) -> Action {
    match position {
        Position::Cash if mood > 0.0 => Action::Buy,
        Position::Cash => Action::StayCash,
        Position::Stock { .. } if mood < 0.0 => Action::Sell,
        Position::Stock { .. } => Action::HoldStock,
    }
}

/// One buy-to-sell round trip.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TradeCycle {
    pub buy_day: usize,
    pub buy_date: NaiveDate,
    pub buy_price: f64,
    pub sell_day: usize,
    pub sell_date: NaiveDate,
    pub sell_price: f64,
    /// Closed by end-of-run liquidation rather than by a sell signal.
    pub forced: bool,
}

impl TradeCycle {
    pub fn cycle_return(&self) -> f64 {
        self.sell_price / self.buy_price - 1.0
    }

    /// Return in percent cut (not rounded) to two decimals, the way the
    /// published trade tables print it.
    pub fn table_percent(&self) -> f64 {
        truncate_percent(self.cycle_return())
    }
}

/// `fraction * 100` truncated toward zero at two decimals.
pub fn truncate_percent(fraction: f64) -> f64 {
    // The small nudge keeps values like 0.15 (stored as 14.999..) from
    // dropping a hundredth.
    let scaled = fraction * 10_000.0;
    let nudged = scaled + scaled.signum() * 1e-7;
    nudged.trunc() / 100.0
}

/// A decision taken on a trading day after warm-up.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Decision {
    pub day: usize,
    pub date: NaiveDate,
    pub action: Action,
    /// `(a6_bar, a7_bar)` seen by the rule; `None` for BuyHold.
    pub smoothed: Option<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyRun {
    pub kind: StrategyKind,
    pub cycles: Vec<TradeCycle>,
    pub decisions: Vec<Decision>,
    pub final_position: Position,
}

impl StrategyRun {
    /// Compounded return over all cycles; cash earns nothing in between.
    pub fn accumulated_return(&self) -> f64 {
        self.cycles.iter().map(|c| 1.0 + c.cycle_return()).product::<f64>() - 1.0
    }
}

fn check_alignment(prices: &PriceSeries, strengths: &StrengthSeries) -> Result<()> {
    for e in strengths.entries() {
        if e.day >= prices.len() || prices.date(e.day) != e.date {
            return Err(Error::Contract(format!(
                "strength estimate for {} (day {}) does not line up with the price series",
                e.date, e.day
            )));
        }
    }
    Ok(())
}

/// Runs one strategy over a price interval using estimates computed on it.
pub fn run_strategy(
    prices: &PriceSeries,
    strengths: &StrengthSeries,
    kind: StrategyKind,
) -> Result<StrategyRun> {
    if prices.is_empty() {
        return Err(Error::Contract("cannot trade an empty price series".into()));
    }
    check_alignment(prices, strengths)?;
    let last = prices.len() - 1;

    let Some(k) = kind.smoothing() else {
        let cycle = TradeCycle {
            buy_day: 0,
            buy_date: prices.date(0),
            buy_price: prices.close(0),
            sell_day: last,
            sell_date: prices.date(last),
            sell_price: prices.close(last),
            forced: true,
        };
        let decisions = vec![Decision {
            day: 0,
            date: prices.date(0),
            action: Action::Buy,
            smoothed: None,
        }];
        return Ok(StrategyRun {
            kind,
            cycles: vec![cycle],
            decisions,
            final_position: Position::Cash,
        });
    };

    let smoothed = strengths.smoothed(k);
    if smoothed.iter().all(Option::is_none) {
        return Err(Error::InsufficientData {
            needed: strengths.entries().first().map_or(0, |e| e.day) + k,
            available: prices.len(),
        });
    }

    let mut position = Position::Cash;
    let mut cycles = Vec::new();
    let mut decisions = Vec::new();
    for (entry, bar) in strengths.entries().iter().zip(smoothed) {
        let Some((a6_bar, a7_bar)) = bar else { continue };
        let action = match kind {
            StrategyKind::FollowBB => follow_bb_step(&position, a7_bar, a6_bar),
            StrategyKind::RideMood => ride_mood_step(&position, a7_bar - a6_bar),
            StrategyKind::BuyHold => unreachable!(),
        };
        let close = prices.close(entry.day);
        match (action, position) {
            (Action::Buy, Position::Cash) => {
                position = Position::Stock {
                    entry_day: entry.day,
                    entry_date: entry.date,
                    entry_price: close,
                };
            }
            (
                Action::Sell,
                Position::Stock {
                    entry_day,
                    entry_date,
                    entry_price,
                },
            ) => {
                cycles.push(TradeCycle {
                    buy_day: entry_day,
                    buy_date: entry_date,
                    buy_price: entry_price,
                    sell_day: entry.day,
                    sell_date: entry.date,
                    sell_price: close,
                    forced: false,
                });
                position = Position::Cash;
            }
            _ => {}
        }
        decisions.push(Decision {
            day: entry.day,
            date: entry.date,
            action,
            smoothed: Some((a6_bar, a7_bar)),
        });
    }

    if let Position::Stock {
        entry_day,
        entry_date,
        entry_price,
    } = position
    {
        cycles.push(TradeCycle {
            buy_day: entry_day,
            buy_date: entry_date,
            buy_price: entry_price,
            sell_day: last,
            sell_date: prices.date(last),
            sell_price: prices.close(last),
            forced: true,
        });
    }

    Ok(StrategyRun {
        kind,
        cycles,
        decisions,
        final_position: Position::Cash,
    })
}

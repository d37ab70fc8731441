//! Tracking big buyers and big sellers in daily closing prices.
//!
//! Prices move with the excess demand of two large traders. A big seller
//! leans against rallies, a big buyer leans against sell-offs, and their
//! strengths drift over time. This crate simulates that model, estimates the
//! strengths online with recursive least squares, turns the estimates into
//! trading decisions and backtests them walk-forward over a weighted universe.
//!
//! ```
//! use bigbuyer::{ed6, ed7, mood_index, ModelParams};
//!
//! let params = ModelParams::default();
//! let x = mood_index(&[10.0, 10.0, 10.3], &params).unwrap();
//! assert!(x.value() > 0.0);
//! assert!(ed6(x, params.width()) < 0.0);
//! assert_eq!(ed7(x, params.width()), 0.0);
//! ```

pub mod backtest;
pub mod cli;
pub mod error;
pub mod estimator;
pub mod excess_demand;
pub mod io;
pub mod series;
pub mod simulator;
pub mod strategy;
pub mod synthetic;

pub use backtest::{
    annual_return, make_intervals, market_value_series, run_backtest, BacktestConfig,
    BacktestReport, CostModel, IntervalPlan, StockInput,
};
pub use error::{Error, Result};
pub use estimator::{
    batch_weighted_ls, estimate_series, EstimatorConfig, EstimatorState, StrengthSeries,
};
pub use excess_demand::{ed6, ed7, mood_index, ExcessDemandPair, ModelParams, MoodIndex};
pub use series::{PriceRecord, PriceSeries};
pub use simulator::{
    signal_noise_ratio, simulate, NoiseSpec, SimulatedSeries, StrengthSegment, TrueStrengthPath,
};
pub use strategy::{run_strategy, StrategyKind, StrategyRun, TradeCycle};

//! Strength estimation by recursive least squares with exponential forgetting.
//!
//! The daily log return is regressed on the excess-demand pair of the
//! previous close, `r_{t+1} = ed_t . a_t + eps(t)`, and the slowly varying
//! strengths `a = (a6, a7)` are tracked with
//!
//! ```text
//! K    = P ed / (ed' P ed + lambda)
//! a'   = a + K (r - ed' a)
//! P'   = (I - K ed') P / lambda
//! ```
//!
//! starting from `a = 0`, `P = gamma I`. [`batch_weighted_ls`] solves the same
//! exponentially weighted problem in closed form (with the `gamma` prior as a
//! ridge term) and is used to cross-check the recursion.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::excess_demand::{mood_index, ExcessDemandPair, ModelParams};
use crate::series::PriceSeries;

pub type Vec2 = [f64; 2];
pub type Mat2 = [[f64; 2]; 2];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimatorConfig {
    lambda: f64,
    gamma: f64,
}

impl EstimatorConfig {
    pub const DEFAULT_LAMBDA: f64 = 0.95;
    pub const DEFAULT_GAMMA: f64 = 10.0;

    pub fn new(lambda: f64, gamma: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda < 1.0) {
            return Err(Error::Contract(format!(
                "forgetting factor must lie in (0, 1), got {lambda}"
            )));
        }
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(Error::Contract(format!(
                "initial covariance scale must be finite and > 0, got {gamma}"
            )));
        }
        Ok(Self { lambda, gamma })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self {
            lambda: Self::DEFAULT_LAMBDA,
            gamma: Self::DEFAULT_GAMMA,
        }
    }
}

/// Current strength estimate and its covariance-like matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimatorState {
    pub a_hat: Vec2,
    pub p: Mat2,
}

impl EstimatorState {
    pub fn init(config: &EstimatorConfig) -> Self {
        let g = config.gamma;
        Self {
            a_hat: [0.0, 0.0],
            p: [[g, 0.0], [0.0, g]],
        }
    }

    /// Consumes one `(ed_t, r_{t+1})` observation.
    pub fn step(&self, config: &EstimatorConfig, ed: &ExcessDemandPair, r_next: f64) -> Self {
        let lambda = config.lambda;
        let x = ed.as_array();
        let p = &self.p;
        let px = [
            p[0][0] * x[0] + p[0][1] * x[1],
            p[1][0] * x[0] + p[1][1] * x[1],
        ];
        let denom = x[0] * px[0] + x[1] * px[1] + lambda;
        let k = [px[0] / denom, px[1] / denom];
        let err = r_next - (x[0] * self.a_hat[0] + x[1] * self.a_hat[1]);
        let a_hat = [self.a_hat[0] + k[0] * err, self.a_hat[1] + k[1] * err];

        // (I - K x') P / lambda
        let mut next = [[0.0; 2]; 2];
        for (i, row) in next.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = (p[i][j] - k[i] * (x[0] * p[0][j] + x[1] * p[1][j])) / lambda;
            }
        }
        let off = 0.5 * (next[0][1] + next[1][0]);
        next[0][1] = off;
        next[1][0] = off;

        Self { a_hat, p: next }
    }

    /// Gain vector the next [`step`](Self::step) with regressor `ed` would use.
    pub fn gain(&self, config: &EstimatorConfig, ed: &ExcessDemandPair) -> Vec2 {
        let x = ed.as_array();
        let p = &self.p;
        let px = [
            p[0][0] * x[0] + p[0][1] * x[1],
            p[1][0] * x[0] + p[1][1] * x[1],
        ];
        let denom = x[0] * px[0] + x[1] * px[1] + config.lambda;
        [px[0] / denom, px[1] / denom]
    }
}

/// One regression observation: the excess-demand pair at day `t` and the
/// log return from `t` to `t + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub ed: ExcessDemandPair,
    pub r_next: f64,
}

/// All observations a close series supports. Observation `i` uses the window
/// ending at close `n - 1 + i` and the return into close `n + i`.
pub fn observations(closes: &[f64], params: &ModelParams) -> Result<Vec<Observation>> {
    let n = params.window();
    if closes.len() < n + 1 {
        return Err(Error::InsufficientData {
            needed: n + 1,
            available: closes.len(),
        });
    }
    (n - 1..closes.len() - 1)
        .map(|t| {
            let x = mood_index(&closes[t + 1 - n..=t], params)?;
            Ok(Observation {
                ed: ExcessDemandPair::at(x, params.width()),
                r_next: (closes[t + 1] / closes[t]).ln(),
            })
        })
        .collect()
}

/// Strength estimate available at the close of `date`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrengthEstimate {
    /// Index into the source price series of the close that completed the
    /// observation.
    pub day: usize,
    pub date: NaiveDate,
    pub a6_hat: f64,
    pub a7_hat: f64,
}

/// Per-day strength estimates for one price series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrengthSeries {
    entries: Vec<StrengthEstimate>,
}

impl StrengthSeries {
    pub fn new(entries: Vec<StrengthEstimate>) -> Result<Self> {
        if entries.windows(2).any(|w| w[1].day != w[0].day + 1 || w[1].date <= w[0].date) {
            return Err(Error::Contract(
                "strength estimates must cover consecutive days in date order".into(),
            ));
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[StrengthEstimate] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn a6_hat(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.a6_hat).collect()
    }

    pub fn a7_hat(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.a7_hat).collect()
    }

    /// `k`-day moving averages `(a6_bar, a7_bar)`, `None` during warm-up.
    pub fn smoothed(&self, k: usize) -> Vec<Option<(f64, f64)>> {
        moving_average(&self.a6_hat(), k)
            .into_iter()
            .zip(moving_average(&self.a7_hat(), k))
            .map(|(a6, a7)| a6.zip(a7))
            .collect()
    }
}

/// Runs the recursion over a whole price series from a fresh state.
pub fn estimate_series(
    prices: &PriceSeries,
    params: &ModelParams,
    config: &EstimatorConfig,
) -> Result<StrengthSeries> {
    let obs = observations(&prices.prices(), params)?;
    let n = params.window();
    let mut state = EstimatorState::init(config);
    let entries = obs
        .iter()
        .enumerate()
        .map(|(i, o)| {
            state = state.step(config, &o.ed, o.r_next);
            let day = n + i;
            StrengthEstimate {
                day,
                date: prices.date(day),
                a6_hat: state.a_hat[0],
                a7_hat: state.a_hat[1],
            }
        })
        .collect();
    StrengthSeries::new(entries)
}

/// Trailing `k`-day mean; the first `k - 1` outputs are `None`.
pub fn moving_average(values: &[f64], k: usize) -> Vec<Option<f64>> {
    assert!(k >= 1, "moving average window must be >= 1");
    (0..values.len())
        .map(|t| {
            (t + 1 >= k).then(|| values[t + 1 - k..=t].iter().sum::<f64>() / k as f64)
        })
        .collect()
}

/// Closed-form minimizer of
/// `sum_i lambda^(t-i) (r_{i+1} - ed_i . a)^2 + (lambda^t / gamma) |a|^2`
/// over the `t = history.len()` observations. Matches the recursion started
/// from `P = gamma I` exactly in exact arithmetic.
pub fn batch_weighted_ls(history: &[Observation], lambda: f64, gamma: f64) -> Vec2 {
    let t = history.len() as i32;
    let ridge = lambda.powi(t) / gamma;
    let mut m = [[ridge, 0.0], [0.0, ridge]];
    let mut b = [0.0, 0.0];
    for (i, o) in history.iter().enumerate() {
        let weight = lambda.powi(t - 1 - i as i32);
        let x = o.ed.as_array();
        for r in 0..2 {
            b[r] += weight * x[r] * o.r_next;
            for c in 0..2 {
                m[r][c] += weight * x[r] * x[c];
            }
        }
    }
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    [
        (m[1][1] * b[0] - m[0][1] * b[1]) / det,
        (m[0][0] * b[1] - m[1][0] * b[0]) / det,
    ]
}

//! Synthetic prices driven by big-buyer / big-seller excess demand plus
//! Gaussian noise.
//!
//! One simulated step maps the close `p_t` to
//!
//! ```text
//! ln p_{t+1} = ln p_t + a6(t) ed6(x_t) + a7(t) ed7(x_t) + eps(t)
//! ```
//!
//! where `x_t` is the mood index over the `n` closes ending at `p_t`. Days are
//! numbered so that the caller's `n` initial closes are `p_{-(n-1)} ..= p_0`
//! and `T` steps produce `p_1 ..= p_T`.
//!
//! Noise is drawn from ChaCha8 seeded with the caller's `u64` seed and turned
//! into standard normals with the Box-Muller transform, so a given seed yields
//! the same path on every platform.

use chrono::NaiveDate;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::{estimate_series, EstimatorConfig};
use crate::excess_demand::{mood_index, ExcessDemandPair, ModelParams};
use crate::series::PriceSeries;

/// One piecewise-constant segment of a strength schedule, in effect from
/// `start_day` until the next segment starts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrengthSegment {
    pub start_day: usize,
    pub a6: f64,
    pub a7: f64,
}

/// Per-day true strengths `a6(t)`, `a7(t)` for `t = 0..T`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrueStrengthPath {
    a6: Vec<f64>,
    a7: Vec<f64>,
}

impl TrueStrengthPath {
    pub fn new(a6: Vec<f64>, a7: Vec<f64>) -> Result<Self> {
        if a6.len() != a7.len() {
            return Err(Error::Contract(format!(
                "a6 and a7 schedules differ in length ({} vs {})",
                a6.len(),
                a7.len()
            )));
        }
        if let Some(v) = a6.iter().chain(&a7).find(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("strength must be finite, got {v}")));
        }
        Ok(Self { a6, a7 })
    }

    pub fn constant(a6: f64, a7: f64, days: usize) -> Result<Self> {
        Self::new(vec![a6; days], vec![a7; days])
    }

    /// Expands segments (sorted by `start_day`, the first starting at day 0)
    /// into a per-day schedule of `days` entries.
    pub fn from_segments(segments: &[StrengthSegment], days: usize) -> Result<Self> {
        match segments.first() {
            None => return Err(Error::Contract("strength path has no segments".into())),
            Some(s) if s.start_day != 0 => {
                return Err(Error::Contract(format!(
                    "first strength segment must start at day 0, got {}",
                    s.start_day
                )))
            }
            _ => {}
        }
        if segments.windows(2).any(|w| w[0].start_day >= w[1].start_day) {
            return Err(Error::Contract(
                "strength segments must have strictly increasing start days".into(),
            ));
        }
        let mut a6 = Vec::with_capacity(days);
        let mut a7 = Vec::with_capacity(days);
        let mut seg = 0;
        for day in 0..days {
            while seg + 1 < segments.len() && segments[seg + 1].start_day <= day {
                seg += 1;
            }
            a6.push(segments[seg].a6);
            a7.push(segments[seg].a7);
        }
        Self::new(a6, a7)
    }

    pub fn len(&self) -> usize {
        self.a6.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a6.is_empty()
    }

    pub fn a6(&self) -> &[f64] {
        &self.a6
    }

    pub fn a7(&self) -> &[f64] {
        &self.a7
    }

    /// Same schedule with every strength multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.a6.iter().map(|v| v * factor).collect(),
            self.a7.iter().map(|v| v * factor).collect(),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub sigma: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn new(sigma: f64, seed: u64) -> Result<Self> {
        if !(sigma.is_finite() && sigma >= 0.0) {
            return Err(Error::Domain(format!("sigma must be finite and >= 0, got {sigma}")));
        }
        Ok(Self { sigma, seed })
    }
}

/// Standard normal draws from ChaCha8 via Box-Muller, two per uniform pair.
#[derive(Debug, Clone)]
pub struct NormalSource {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl NormalSource {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            spare: None,
        }
    }

    pub fn next_standard(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        // u1 in (0, 1] keeps the log finite.
        let u1 = 1.0 - self.rng.random::<f64>();
        let u2 = self.rng.random::<f64>();
        let radius = (-2.0 * u1.ln()).sqrt();
        let angle = std::f64::consts::TAU * u2;
        self.spare = Some(radius * angle.sin());
        radius * angle.cos()
    }
}

/// Output of [`simulate`] with the per-day signal and noise bookkeeping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulatedSeries {
    params: ModelParams,
    /// `p_{-(n-1)} ..= p_T`.
    prices: Vec<f64>,
    /// `a6(t) ed6(x_t) + a7(t) ed7(x_t)` for `t = 0..T`.
    signal: Vec<f64>,
    /// `eps(t)` for `t = 0..T`.
    noise: Vec<f64>,
    path: TrueStrengthPath,
}

impl SimulatedSeries {
    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    /// Number of simulated steps `T`.
    pub fn days(&self) -> usize {
        self.signal.len()
    }

    /// All closes, `p_{-(n-1)}` first.
    pub fn prices(&self) -> &[f64] {
        &self.prices
    }

    /// Close on day `day`, for `-(n-1) <= day <= T`.
    pub fn price(&self, day: i64) -> f64 {
        self.prices[(day + self.params.window() as i64 - 1) as usize]
    }

    pub fn signal(&self) -> &[f64] {
        &self.signal
    }

    pub fn noise(&self) -> &[f64] {
        &self.noise
    }

    pub fn path(&self) -> &TrueStrengthPath {
        &self.path
    }

    /// Day number of the first price (`-(n-1)`).
    pub fn first_day(&self) -> i64 {
        1 - self.params.window() as i64
    }

    /// Price series on a weekday calendar starting at `start`.
    pub fn to_price_series(&self, symbol: &str, start: NaiveDate) -> Result<PriceSeries> {
        PriceSeries::on_weekdays(symbol, start, &self.prices)
    }
}

/// Iterates the price model forward `days` steps.
pub fn simulate(
    params: &ModelParams,
    path: &TrueStrengthPath,
    noise: &NoiseSpec,
    days: usize,
    initial_prices: &[f64],
) -> Result<SimulatedSeries> {
    let n = params.window();
    if days == 0 {
        return Err(Error::Contract("simulation needs at least one day".into()));
    }
    if initial_prices.len() != n {
        return Err(Error::Contract(format!(
            "expected {n} initial prices, got {}",
            initial_prices.len()
        )));
    }
    if let Some(p) = initial_prices.iter().find(|p| !(p.is_finite() && **p > 0.0)) {
        return Err(Error::Domain(format!("initial price must be finite and > 0, got {p}")));
    }
    if path.len() < days {
        return Err(Error::Contract(format!(
            "strength path covers {} days, simulation needs {days}",
            path.len()
        )));
    }

    let mut normals = NormalSource::new(noise.seed);
    let mut prices = Vec::with_capacity(n + days);
    prices.extend_from_slice(initial_prices);
    let mut signal = Vec::with_capacity(days);
    let mut eps = Vec::with_capacity(days);

    for t in 0..days {
        let window = &prices[prices.len() - n..];
        let x = mood_index(window, params)?;
        let ed = ExcessDemandPair::at(x, params.width());
        let s = path.a6[t] * ed.ed6 + path.a7[t] * ed.ed7;
        let e = noise.sigma * normals.next_standard();
        let next = prices[prices.len() - 1] * (s + e).exp();
        if !(next.is_finite() && next > 0.0) {
            return Err(Error::Domain(format!(
                "simulated price left the positive reals on day {}",
                t + 1
            )));
        }
        prices.push(next);
        signal.push(s);
        eps.push(e);
    }

    Ok(SimulatedSeries {
        params: *params,
        prices,
        signal,
        noise: eps,
        path: TrueStrengthPath::new(path.a6[..days].to_vec(), path.a7[..days].to_vec())?,
    })
}

fn rms(values: &[f64]) -> f64 {
    (values.iter().map(|v| v * v).sum::<f64>() / values.len() as f64).sqrt()
}

/// RMS of the big-trader impact over RMS of the residual noise.
pub fn signal_noise_ratio(series: &SimulatedSeries) -> Result<f64> {
    if series.days() == 0 {
        return Err(Error::Contract("signal-to-noise ratio needs at least one day".into()));
    }
    let noise = rms(&series.noise);
    if noise == 0.0 {
        return Err(Error::DegenerateRatio);
    }
    Ok(rms(&series.signal) / noise)
}

/// Estimated strengths next to the true ones for one simulated day.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrackedStrength {
    /// Simulated day `t` whose regressor `ed(x_t)` the estimate consumed.
    pub day: usize,
    pub a6_true: f64,
    pub a7_true: f64,
    pub a6_hat: f64,
    pub a7_hat: f64,
}

/// Runs the strength estimator over a simulated path and lines each estimate
/// up with the true strengths that generated its observation.
pub fn track_strengths(series: &SimulatedSeries, config: &EstimatorConfig) -> Result<Vec<TrackedStrength>> {
    let start = NaiveDate::from_ymd_opt(2000, 1, 3).expect("valid date");
    let prices = series.to_price_series("SIM", start)?;
    let estimates = estimate_series(&prices, &series.params, config)?;
    let n = series.params.window();
    Ok(estimates
        .entries()
        .iter()
        .map(|e| {
            let day = e.day - n;
            TrackedStrength {
                day,
                a6_true: series.path.a6[day],
                a7_true: series.path.a7[day],
                a6_hat: e.a6_hat,
                a7_hat: e.a7_hat,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn flat10() -> Vec<f64> {
        vec![10.0; 3]
    }

    #[test]
    fn zero_strength_zero_noise_is_flat() {
        let p = ModelParams::default();
        let path = TrueStrengthPath::constant(0.0, 0.0, 50).unwrap();
        let s = simulate(&p, &path, &NoiseSpec::new(0.0, 1).unwrap(), 50, &flat10()).unwrap();
        assert!(s.prices().iter().all(|&v| v == 10.0));
    }

    #[test]
    fn equal_start_is_a_fixed_point() {
        let p = ModelParams::default();
        let path = TrueStrengthPath::constant(0.3, 0.7, 40).unwrap();
        let s = simulate(&p, &path, &NoiseSpec::new(0.0, 9).unwrap(), 40, &flat10()).unwrap();
        assert!(s.prices().iter().all(|&v| v == 10.0));
        assert!(s.signal().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn same_seed_same_series() {
        let p = ModelParams::default();
        let path = TrueStrengthPath::constant(0.2, 0.4, 300).unwrap();
        let noise = NoiseSpec::new(0.02, 77).unwrap();
        let a = simulate(&p, &path, &noise, 300, &flat10()).unwrap();
        let b = simulate(&p, &path, &noise, 300, &flat10()).unwrap();
        assert_eq!(a, b);
        let c = simulate(&p, &path, &NoiseSpec::new(0.02, 78).unwrap(), 300, &flat10()).unwrap();
        assert_ne!(a.prices(), c.prices());
    }

    #[test]
    fn day_numbering() {
        let p = ModelParams::default();
        let path = TrueStrengthPath::constant(0.0, 0.0, 5).unwrap();
        let s = simulate(&p, &path, &NoiseSpec::new(0.01, 1).unwrap(), 5, &[8.0, 9.0, 10.0]).unwrap();
        assert_eq!(s.first_day(), -2);
        assert_eq!(s.price(-2), 8.0);
        assert_eq!(s.price(0), 10.0);
        assert_eq!(s.prices().len(), 8);
        assert_eq!(s.days(), 5);
    }

    #[test]
    fn rejects_bad_inputs() {
        let p = ModelParams::default();
        let path = TrueStrengthPath::constant(0.0, 0.0, 5).unwrap();
        let noise = NoiseSpec::new(0.01, 1).unwrap();
        assert!(matches!(
            simulate(&p, &path, &noise, 5, &[10.0, 0.0, 10.0]),
            Err(Error::Domain(_))
        ));
        assert!(matches!(simulate(&p, &path, &noise, 5, &[10.0]), Err(Error::Contract(_))));
        assert!(matches!(simulate(&p, &path, &noise, 6, &flat10()), Err(Error::Contract(_))));
        assert!(matches!(simulate(&p, &path, &noise, 0, &flat10()), Err(Error::Contract(_))));
        assert!(NoiseSpec::new(-0.1, 0).is_err());
    }

    #[test]
    fn segments_expand_per_day() {
        let segs = [
            StrengthSegment { start_day: 0, a6: 0.0, a7: 0.5 },
            StrengthSegment { start_day: 3, a6: 0.2, a7: 0.0 },
        ];
        let path = TrueStrengthPath::from_segments(&segs, 5).unwrap();
        assert_eq!(path.a7(), &[0.5, 0.5, 0.5, 0.0, 0.0]);
        assert_eq!(path.a6(), &[0.0, 0.0, 0.0, 0.2, 0.2]);
        let late = [StrengthSegment { start_day: 1, a6: 0.0, a7: 0.0 }];
        assert!(TrueStrengthPath::from_segments(&late, 5).is_err());
    }

    #[test]
    fn snr_zero_signal_and_degenerate_noise() {
        let p = ModelParams::default();
        let zero = TrueStrengthPath::constant(0.0, 0.0, 200).unwrap();
        let s = simulate(&p, &zero, &NoiseSpec::new(0.02, 3).unwrap(), 200, &flat10()).unwrap();
        assert_eq!(signal_noise_ratio(&s).unwrap(), 0.0);

        let s = simulate(&p, &zero, &NoiseSpec::new(0.0, 3).unwrap(), 200, &flat10()).unwrap();
        assert!(matches!(signal_noise_ratio(&s), Err(Error::DegenerateRatio)));
    }

    #[test]
    fn normal_source_moments() {
        let mut src = NormalSource::new(12345);
        let draws: Vec<f64> = (0..200_000).map(|_| src.next_standard()).collect();
        let mean = draws.iter().sum::<f64>() / draws.len() as f64;
        let var = draws.iter().map(|z| (z - mean).powi(2)).sum::<f64>() / draws.len() as f64;
        assert!(mean.abs() < 0.01, "mean {mean}");
        assert!((var - 1.0).abs() < 0.01, "var {var}");
    }

    #[test]
    fn tracking_lines_up_with_simulated_days() {
        let p = ModelParams::default();
        let path = TrueStrengthPath::from_segments(
            &[
                StrengthSegment { start_day: 0, a6: 0.0, a7: 0.5 },
                StrengthSegment { start_day: 10, a6: 0.5, a7: 0.0 },
            ],
            20,
        )
        .unwrap();
        let s = simulate(&p, &path, &NoiseSpec::new(0.02, 5).unwrap(), 20, &flat10()).unwrap();
        let tracked = track_strengths(&s, &EstimatorConfig::default()).unwrap();
        assert_eq!(tracked.len(), 20);
        assert_eq!(tracked[0].day, 0);
        assert_eq!(tracked[19].day, 19);
        assert_eq!((tracked[9].a7_true, tracked[10].a6_true), (0.5, 0.5));
    }

    fn regime_path(days: usize) -> TrueStrengthPath {
        TrueStrengthPath::from_segments(
            &[
                StrengthSegment { start_day: 0, a6: 0.0, a7: 0.0 },
                StrengthSegment { start_day: 100, a6: 0.0, a7: 0.6 },
                StrengthSegment { start_day: 250, a6: 0.6, a7: 0.0 },
                StrengthSegment { start_day: 400, a6: 0.3, a7: 0.3 },
                StrengthSegment { start_day: 500, a6: 0.0, a7: 0.0 },
            ],
            days,
        )
        .unwrap()
    }

    #[test]
    fn snr_rises_as_sigma_falls() {
        let p = ModelParams::default();
        let path = regime_path(600);
        for seed in 0..10 {
            let ratios: Vec<f64> = [0.16, 0.08, 0.04, 0.02, 0.01]
                .iter()
                .map(|&sigma| {
                    let s = simulate(&p, &path, &NoiseSpec::new(sigma, seed).unwrap(), 600, &flat10()).unwrap();
                    signal_noise_ratio(&s).unwrap()
                })
                .collect();
            assert!(ratios.windows(2).all(|w| w[1] > w[0]), "seed {seed}: {ratios:?}");
        }
    }

    #[test]
    fn snr_does_not_fall_with_stronger_traders() {
        let p = ModelParams::default();
        for seed in 0..10 {
            let weak = TrueStrengthPath::constant(0.3, 0.3, 400).unwrap();
            let strong = weak.scaled(2.0).unwrap();
            let noise = NoiseSpec::new(0.02, seed).unwrap();
            let a = signal_noise_ratio(&simulate(&p, &weak, &noise, 400, &flat10()).unwrap()).unwrap();
            let b = signal_noise_ratio(&simulate(&p, &strong, &noise, 400, &flat10()).unwrap()).unwrap();
            assert!(b >= a, "seed {seed}: {a} -> {b}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn log_return_reconstructs(seed in any::<u64>(), sigma in 0.0f64..0.05, a6 in -1.0f64..1.0, a7 in -1.0f64..1.0) {
            let p = ModelParams::default();
            let path = TrueStrengthPath::constant(a6, a7, 120).unwrap();
            let s = simulate(&p, &path, &NoiseSpec::new(sigma, seed).unwrap(), 120, &flat10()).unwrap();
            for t in 0..s.days() {
                let day = t as i64;
                let rebuilt = (s.signal()[t] + s.noise()[t]).exp() * s.price(day);
                let actual = s.price(day + 1);
                prop_assert!(((rebuilt - actual) / actual).abs() <= 1e-12);
                prop_assert!(actual > 0.0);
            }
        }
    }
}

//! Seeded synthetic universes for demos and end-to-end tests.

use std::path::Path;

use chrono::NaiveDate;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::backtest::StockInput;
use crate::error::Result;
use crate::excess_demand::ModelParams;
use crate::io::{write_prices, write_universe, UniverseEntry};
use crate::series::PriceSeries;
use crate::simulator::{simulate, NoiseSpec, StrengthSegment, TrueStrengthPath};

/// Random regime schedule: every 40-160 days the market switches between no
/// big traders, a big buyer, a big seller, or both.
pub fn random_segments(days: usize, seed: u64) -> Vec<StrengthSegment> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut segments = Vec::new();
    let mut start = 0;
    while start < days {
        let (a6, a7) = match rng.random_range(0..4) {
            0 => (0.0, 0.0),
            1 => (0.0, rng.random_range(0.03..0.12)),
            2 => (rng.random_range(0.03..0.12), 0.0),
            _ => (rng.random_range(0.02..0.08), rng.random_range(0.02..0.08)),
        };
        segments.push(StrengthSegment { start_day: start, a6, a7 });
        start += rng.random_range(40..160);
    }
    segments
}

/// A `days`-long close series driven by [`random_segments`] and noise of
/// standard deviation `sigma`, on a weekday calendar from `start`.
pub fn synthetic_prices(
    symbol: &str,
    days: usize,
    sigma: f64,
    seed: u64,
    start: NaiveDate,
) -> Result<PriceSeries> {
    let params = ModelParams::default();
    let n = params.window();
    let steps = days.saturating_sub(n).max(1);
    let path = TrueStrengthPath::from_segments(&random_segments(steps, seed), steps)?;
    let noise = NoiseSpec::new(sigma, seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(1))?;
    let sim = simulate(&params, &path, &noise, steps, &vec![10.0; n])?;
    let series = sim.to_price_series(symbol, start)?;
    series.slice(0, days.min(series.len()) - 1)
}

/// `count` synthetic stocks named `SYN1..`, weighted `count, count-1, ..., 1`.
pub fn synthetic_universe(count: usize, days: usize, seed: u64) -> Result<Vec<StockInput>> {
    let start = NaiveDate::from_ymd_opt(2007, 7, 3).expect("valid date");
    (0..count)
        .map(|i| {
            let symbol = format!("SYN{}", i + 1);
            let prices = synthetic_prices(&symbol, days, 0.02, seed.wrapping_add(i as u64), start)?;
            Ok(StockInput {
                entry: UniverseEntry {
                    symbol,
                    name: format!("Synthetic stock {}", i + 1),
                    weight: (count - i) as f64,
                },
                prices,
            })
        })
        .collect()
}

/// Writes a universe as `universe.csv` plus `prices/<symbol>.csv`.
pub fn write_universe_dir(dir: impl AsRef<Path>, universe: &[StockInput]) -> Result<()> {
    let dir = dir.as_ref();
    let entries: Vec<UniverseEntry> = universe.iter().map(|s| s.entry.clone()).collect();
    write_universe(dir.join("universe.csv"), &entries)?;
    for s in universe {
        write_prices(dir.join("prices").join(format!("{}.csv", s.entry.symbol)), &s.prices)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn universe_is_reproducible() {
        let a = synthetic_universe(3, 600, 11).unwrap();
        let b = synthetic_universe(3, 600, 11).unwrap();
        assert_eq!(a.len(), 3);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.prices, y.prices);
            assert_eq!(x.prices.len(), 600);
        }
        assert_ne!(a[0].prices.prices(), a[1].prices.prices());
    }

    #[test]
    fn segments_cover_the_horizon() {
        let segs = random_segments(1000, 4);
        assert_eq!(segs[0].start_day, 0);
        assert!(segs.windows(2).all(|w| w[0].start_day < w[1].start_day));
        assert!(segs.last().unwrap().start_day < 1000);
    }
}

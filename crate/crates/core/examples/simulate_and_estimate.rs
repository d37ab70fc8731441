//! Simulates prices driven by a big buyer and a big seller whose strengths
//! switch over time, then tracks the strengths back from the prices alone.
//!
//! Run with an optional noise level: `cargo run --example simulate_and_estimate -- 0.03`

use bigbuyer::estimator::moving_average;
use bigbuyer::io::load_strength_path;
use bigbuyer::simulator::track_strengths;
use bigbuyer::{signal_noise_ratio, simulate, EstimatorConfig, ModelParams, NoiseSpec, TrueStrengthPath};

fn main() -> bigbuyer::Result<()> {
    let sigma: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0.02);
    let days = 600;
    let segments = load_strength_path(concat!(env!("CARGO_MANIFEST_DIR"), "/data/sample_strength_path.csv"))?;
    let path = TrueStrengthPath::from_segments(&segments, days)?;

    let params = ModelParams::default();
    let sim = simulate(&params, &path, &NoiseSpec::new(sigma, 42)?, days, &[10.0; 3])?;
    println!("sigma {sigma}, signal-to-noise {:.3}", signal_noise_ratio(&sim)?);

    let tracked = track_strengths(&sim, &EstimatorConfig::default())?;
    let a6_bar = moving_average(&tracked.iter().map(|t| t.a6_hat).collect::<Vec<_>>(), 3);
    let a7_bar = moving_average(&tracked.iter().map(|t| t.a7_hat).collect::<Vec<_>>(), 3);

    println!("{:>4} {:>8} {:>6} {:>8} {:>6} {:>8}", "day", "price", "a6", "a6_bar", "a7", "a7_bar");
    for (i, t) in tracked.iter().enumerate().step_by(25) {
        println!(
            "{:>4} {:>8.3} {:>6.2} {:>8.3} {:>6.2} {:>8.3}",
            t.day,
            sim.price(t.day as i64 + 1),
            t.a6_true,
            a6_bar[i].unwrap_or(f64::NAN),
            t.a7_true,
            a7_bar[i].unwrap_or(f64::NAN),
        );
    }
    Ok(())
}

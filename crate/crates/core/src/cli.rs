//! Command-line front end: `simulate`, `estimate`, `backtest` and `report`.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::backtest::{run_backtest, BacktestConfig, CostModel, IntervalPlan, StockInput};
use crate::error::{Error, Result};
use crate::estimator::{estimate_series, moving_average, EstimatorConfig};
use crate::excess_demand::ModelParams;
use crate::io;
use crate::simulator::{
    signal_noise_ratio, simulate, track_strengths, NoiseSpec, StrengthSegment, TrueStrengthPath,
};
use crate::strategy::StrategyKind;

#[derive(Debug, Parser)]
#[command(
    name = "bigbuyer",
    version,
    about = "Track big buyers and big sellers in daily closes and backtest strategies that follow them"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate a price path from a strength schedule and estimate it back.
    Simulate(SimulateArgs),
    /// Estimate strength series from a `date,adj_close` CSV.
    Estimate(EstimateArgs),
    /// Walk-forward backtest over a weighted universe.
    Backtest(BacktestArgs),
    /// Re-render tables from a saved backtest report.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
struct ModelArgs {
    /// Pin n=3, w=0.01, lambda=0.95, gamma=10 (and, for backtest, the
    /// 492/5 interval plan and 0.108%/0.288% costs). Conflicts with explicit overrides.
    #[arg(long)]
    paper_defaults: bool,
    /// Mood-index averaging window in trading days.
    #[arg(long, default_value_t = ModelParams::DEFAULT_WINDOW, conflicts_with = "paper_defaults")]
    n: usize,
    /// Membership width of the excess-demand curves (log-price units).
    #[arg(long, default_value_t = ModelParams::DEFAULT_WIDTH, conflicts_with = "paper_defaults")]
    w: f64,
    /// Forgetting factor, in (0, 1).
    #[arg(long, default_value_t = EstimatorConfig::DEFAULT_LAMBDA, conflicts_with = "paper_defaults")]
    lambda: f64,
    /// Initial covariance scale.
    #[arg(long, default_value_t = EstimatorConfig::DEFAULT_GAMMA, conflicts_with = "paper_defaults")]
    gamma: f64,
}

impl ModelArgs {
    fn model(&self) -> Result<ModelParams> {
        ModelParams::new(self.n, self.w)
    }

    fn estimator(&self) -> Result<EstimatorConfig> {
        EstimatorConfig::new(self.lambda, self.gamma)
    }
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// Standard deviation of the daily noise term.
    #[arg(long, default_value_t = 0.02)]
    sigma: f64,
    /// Number of simulated days.
    #[arg(long, default_value_t = 600)]
    days: usize,
    /// Seed for the noise generator.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Strength schedule CSV (`start_day,a6,a7`); a built-in schedule is used if omitted.
    #[arg(long)]
    path: Option<PathBuf>,
    /// Starting close, repeated for the whole initial window.
    #[arg(long, default_value_t = 10.0)]
    initial_price: f64,
    /// Moving-average window for the smoothed estimates.
    #[arg(long, default_value_t = 3)]
    smoothing: usize,
    /// Output directory.
    #[arg(long, default_value = "sim-out")]
    out: PathBuf,
    #[command(flatten)]
    model: ModelArgs,
}

#[derive(Debug, Args)]
struct EstimateArgs {
    /// Price CSV (`date,adj_close`).
    #[arg(long)]
    prices: PathBuf,
    /// Moving-average window for the `*_bar_k` columns.
    #[arg(long, default_value_t = 3)]
    smoothing: usize,
    /// Output CSV (`date,a6_hat,a7_hat,a6_bar_k,a7_bar_k`).
    #[arg(long, default_value = "strengths.csv")]
    out: PathBuf,
    #[command(flatten)]
    model: ModelArgs,
}

#[derive(Debug, Args)]
struct BacktestArgs {
    /// Universe CSV (`symbol,name,weight`).
    #[arg(long)]
    universe: PathBuf,
    /// Directory holding one `<symbol>.csv` price file per universe entry.
    #[arg(long)]
    prices: PathBuf,
    /// Comma-separated strategies: followbb, ridemood, buyhold.
    #[arg(long, value_delimiter = ',', default_value = "followbb,ridemood,buyhold")]
    strategy: Vec<String>,
    /// Test interval length in trading days.
    #[arg(long, default_value_t = IntervalPlan::DEFAULT_LENGTH, conflicts_with = "paper_defaults")]
    length: usize,
    /// Trading days between consecutive interval starts.
    #[arg(long, default_value_t = IntervalPlan::DEFAULT_STRIDE, conflicts_with = "paper_defaults")]
    stride: usize,
    /// Buy-side cost as a fraction of the amount traded.
    #[arg(long, default_value_t = CostModel::DEFAULT_BUY_RATE, conflicts_with = "paper_defaults")]
    buy_cost: f64,
    /// Sell-side cost as a fraction of the amount traded.
    #[arg(long, default_value_t = CostModel::DEFAULT_SELL_RATE, conflicts_with = "paper_defaults")]
    sell_cost: f64,
    /// Initial money split across the universe by weight.
    #[arg(long, default_value_t = 100.0)]
    initial_money: f64,
    /// Output directory.
    #[arg(long, default_value = "report")]
    out: PathBuf,
    #[command(flatten)]
    model: ModelArgs,
}

#[derive(Debug, Args)]
struct ReportArgs {
    /// Directory containing `report.json` from an earlier backtest.
    #[arg(long)]
    from: PathBuf,
    /// Where to write the tables (defaults to `--from`).
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Parses `argv` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let outcome = match cli.command {
        Command::Simulate(a) => cmd_simulate(&a),
        Command::Estimate(a) => cmd_estimate(&a),
        Command::Backtest(a) => cmd_backtest(&a),
        Command::Report(a) => cmd_report(&a),
    };
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn default_segments() -> Vec<StrengthSegment> {
    vec![
        StrengthSegment { start_day: 0, a6: 0.0, a7: 0.0 },
        StrengthSegment { start_day: 100, a6: 0.0, a7: 0.6 },
        StrengthSegment { start_day: 250, a6: 0.6, a7: 0.0 },
        StrengthSegment { start_day: 400, a6: 0.3, a7: 0.3 },
        StrengthSegment { start_day: 500, a6: 0.0, a7: 0.0 },
    ]
}

#[derive(Serialize)]
struct SimulationSummary {
    days: usize,
    sigma: f64,
    seed: u64,
    signal_noise_ratio: Option<f64>,
}

fn cmd_simulate(a: &SimulateArgs) -> Result<()> {
    let model = a.model.model()?;
    let estimator = a.model.estimator()?;
    let segments = match &a.path {
        Some(p) => io::load_strength_path(p)?,
        None => default_segments(),
    };
    let path = TrueStrengthPath::from_segments(&segments, a.days)?;
    let noise = NoiseSpec::new(a.sigma, a.seed)?;
    let series = simulate(&model, &path, &noise, a.days, &vec![a.initial_price; model.window()])?;
    let ratio = match signal_noise_ratio(&series) {
        Ok(r) => Some(r),
        Err(Error::DegenerateRatio) => None,
        Err(e) => return Err(e),
    };

    fs::create_dir_all(&a.out).map_err(|e| Error::io(&a.out, e))?;
    io::write_simulated(a.out.join("series.csv"), &series)?;

    let tracked = track_strengths(&series, &estimator)?;
    let a6_bar = moving_average(&tracked.iter().map(|t| t.a6_hat).collect::<Vec<_>>(), a.smoothing);
    let a7_bar = moving_average(&tracked.iter().map(|t| t.a7_hat).collect::<Vec<_>>(), a.smoothing);
    let est_path = a.out.join("estimates.csv");
    let mut w = csv::Writer::from_path(&est_path)?;
    w.write_record(["day", "a6_true", "a7_true", "a6_hat", "a7_hat", "a6_bar_k", "a7_bar_k"])?;
    for ((t, b6), b7) in tracked.iter().zip(&a6_bar).zip(&a7_bar) {
        w.write_record([
            t.day.to_string(),
            t.a6_true.to_string(),
            t.a7_true.to_string(),
            t.a6_hat.to_string(),
            t.a7_hat.to_string(),
            b6.map(|v| v.to_string()).unwrap_or_default(),
            b7.map(|v| v.to_string()).unwrap_or_default(),
        ])?;
    }
    w.flush().map_err(|e| Error::io(&est_path, e))?;

    let summary = SimulationSummary {
        days: a.days,
        sigma: a.sigma,
        seed: a.seed,
        signal_noise_ratio: ratio,
    };
    let summary_path = a.out.join("snr.json");
    fs::write(&summary_path, serde_json::to_string_pretty(&summary)? + "\n")
        .map_err(|e| Error::io(&summary_path, e))?;

    match ratio {
        Some(r) => println!("signal-to-noise ratio: {r:.4}"),
        None => println!("signal-to-noise ratio: undefined (zero noise)"),
    }
    println!("wrote {}", a.out.display());
    Ok(())
}

fn cmd_estimate(a: &EstimateArgs) -> Result<()> {
    let symbol = a
        .prices
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let prices = io::load_prices(&a.prices, &symbol)?;
    let strengths = estimate_series(&prices, &a.model.model()?, &a.model.estimator()?)?;
    if a.smoothing == 0 {
        return Err(Error::Contract("--smoothing must be >= 1".into()));
    }
    io::write_strengths(&a.out, &strengths, a.smoothing)?;
    println!("wrote {} estimates to {}", strengths.len(), a.out.display());
    Ok(())
}

fn load_universe_prices(universe: &Path, prices_dir: &Path) -> Result<Vec<StockInput>> {
    io::load_universe(universe)?
        .into_iter()
        .map(|entry| {
            let path = prices_dir.join(format!("{}.csv", entry.symbol));
            let prices = io::load_prices(&path, &entry.symbol)?;
            Ok(StockInput { entry, prices })
        })
        .collect()
}

fn cmd_backtest(a: &BacktestArgs) -> Result<()> {
    let mut strategies = a
        .strategy
        .iter()
        .map(|s| s.parse::<StrategyKind>())
        .collect::<Result<Vec<_>>>()?;
    strategies.dedup();
    let config = BacktestConfig {
        model: a.model.model()?,
        estimator: a.model.estimator()?,
        strategies,
        interval_length: a.length,
        stride: a.stride,
        costs: CostModel::new(a.buy_cost, a.sell_cost)?,
        initial_money: a.initial_money,
    };
    let universe = load_universe_prices(&a.universe, &a.prices)?;
    let report = run_backtest(&config, &universe)?;
    let written = io::emit_report(&report, &a.out)?;
    print!("{}", io::portfolio_table(&report));
    println!("wrote {} files to {}", written.len(), a.out.display());
    Ok(())
}

fn cmd_report(a: &ReportArgs) -> Result<()> {
    let report = io::load_report(&a.from)?;
    let out = a.out.as_ref().unwrap_or(&a.from);
    let written = io::render_tables(&report, out)?;
    print!("{}", io::portfolio_table(&report));
    println!("wrote {} files to {}", written.len(), out.display());
    Ok(())
}

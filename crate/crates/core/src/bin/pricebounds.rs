use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use pricebounds::harness::{
    emit_plot_series, load_run, replay_row, run_experiment, ExperimentConfig,
};

const ENV_HELP: &str = "\
Environment:
  PRICEBOUNDS_OUTPUT_DIR  Output directory for `run`, overriding the config file
  PRICEBOUNDS_WORKERS     Worker threads for `run`, overriding the config file
  RUST_LOG                Log filter (default: info)";

#[derive(Parser)]
#[command(version, about = "Price-range estimation experiments", after_help = ENV_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment grid from a JSON configuration.
    #[command(after_help = ENV_HELP)]
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, env = "PRICEBOUNDS_OUTPUT_DIR")]
        output_dir: Option<PathBuf>,
        #[arg(long, env = "PRICEBOUNDS_WORKERS")]
        workers: Option<usize>,
    },
    /// Recompute one results row from its seed and compare.
    Replay {
        #[arg(long)]
        results: PathBuf,
        /// Zero-based data row index in the results file.
        #[arg(long)]
        row: usize,
        /// Configuration of the run; defaults to config.json beside the results.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Write per-group trade-off curves and timing series as CSV.
    Plots {
        #[arg(long)]
        results: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn run(cli: Cli) -> pricebounds::Result<bool> {
    match cli.command {
        Command::Run {
            config,
            output_dir,
            workers,
        } => {
            let mut cfg = ExperimentConfig::from_json_file(&config)?;
            if output_dir.is_some() {
                cfg.output_dir = output_dir;
            }
            if workers.is_some() {
                cfg.workers = workers;
            }
            let result = run_experiment(&cfg)?;
            let rows: usize = result.records.iter().map(|r| r.rows.len()).sum();
            println!(
                "{} trials, {} rows, {} flagged, {} failed",
                result.records.len(),
                rows,
                result.flagged().count(),
                result.failed().count()
            );
            match &cfg.output_dir {
                Some(dir) => println!("results in {}", dir.display()),
                None => log::warn!("no output_dir configured; results were not saved"),
            }
            Ok(result.failed().count() == 0)
        }
        Command::Replay {
            results,
            row,
            config,
            tol,
        } => {
            let (cfg, rows) = load_run(&results, config.as_deref())?;
            let recorded = rows.get(row).ok_or_else(|| {
                pricebounds::Error::Config(format!("row {row} out of range ({} rows)", rows.len()))
            })?;
            let outcome = replay_row(&cfg, recorded)?;
            let (a, b) = (&outcome.recorded, &outcome.replayed);
            println!(
                "m={} n={} delta={} {} {}={} trial={} seed={}",
                a.m,
                a.n,
                a.delta,
                a.method.name(),
                a.method.sweep_param(),
                a.sweep_value,
                a.trial,
                a.seed
            );
            println!(
                "rel_revenue  recorded {:.16e}  replayed {:.16e}",
                a.rel_revenue, b.rel_revenue
            );
            println!(
                "avg_width    recorded {:.16e}  replayed {:.16e}",
                a.avg_width, b.avg_width
            );
            println!("max abs diff {:.3e}", outcome.max_abs_diff);
            let ok = outcome.matches(tol);
            println!("{}", if ok { "MATCH" } else { "MISMATCH" });
            Ok(ok)
        }
        Command::Plots { results, out } => {
            let file =
                std::fs::File::open(&results).map_err(|e| pricebounds::Error::io(&results, e))?;
            let rows = pricebounds::harness::read_results_csv(std::io::BufReader::new(file))?;
            let written = emit_plot_series(&rows, &out)?;
            println!("wrote {} files to {}", written.len(), out.display());
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

//! Command line front end: acquire event logs, reduce them to metrics,
//! rebuild the named figures, and run the permanent cross-check.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use photon_logic::eventlog::EventLog;
use photon_logic::experiments::{
    analyze, log_labels, permanent_cross_check, preset, report_tables, run, run_figure,
    simulate, ExperimentConfig, ExperimentKind, RunReport, FIGURE_IDS,
};
use photon_logic::{Error, Result};

/// Simulator and analysis toolkit for a two-photon linear-optics bench.
#[derive(Parser)]
#[command(name = "photon-logic", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Acquire detection-event logs and write them to the output directory.
    Simulate(JobArgs),
    /// Reduce previously written event logs to a metrics report.
    Analyze(JobArgs),
    /// Simulate and analyze in one step.
    Run(JobArgs),
    /// Rebuild one named figure's data tables, as JSON and CSV.
    Figure(FigureArgs),
    /// Cross-check two-photon transport against the permanent formula.
    Oracle(OracleArgs),
}

#[derive(Args)]
struct JobArgs {
    /// Experiment config, TOML.
    #[arg(long, value_name = "FILE", conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in config instead of a file: hbt, hom, cnot_truth_table,
    /// bell_zz or bell_xx.
    #[arg(long, value_name = "KIND")]
    preset: Option<String>,
    /// Override the config's random seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the acquisition length, in nanoseconds per log.
    #[arg(long, value_name = "NS")]
    duration: Option<f64>,
    /// Output directory; falls back to PHOTON_LOGIC_OUT_DIR, then ".".
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct FigureArgs {
    /// Figure id: 1d, 1e, 2b, 2c, 3ab or 3e.
    id: String,
    /// Seed for the figure's runs.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output directory; falls back to PHOTON_LOGIC_OUT_DIR, then ".".
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    /// Seed for the random interferometer draws.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Number of random interferometers to check.
    #[arg(long, default_value_t = 100)]
    trials: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Simulate(args) => cmd_simulate(&args),
        Command::Analyze(args) => cmd_analyze(&args),
        Command::Run(args) => cmd_run(&args),
        Command::Figure(args) => cmd_figure(&args),
        Command::Oracle(args) => cmd_oracle(&args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}

fn load_config(args: &JobArgs) -> Result<ExperimentConfig> {
    let mut cfg = match (&args.config, &args.preset) {
        (Some(path), None) => ExperimentConfig::load(path)?,
        (None, Some(kind)) => preset(ExperimentKind::parse(kind)?, 0),
        _ => return Err(Error::argument("pass exactly one of --config or --preset")),
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(duration) = args.duration {
        cfg.duration_ns = duration;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn out_dir(requested: &Option<PathBuf>) -> Result<PathBuf> {
    let dir = requested
        .clone()
        .or_else(|| std::env::var_os("PHOTON_LOGIC_OUT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir)?;
    Ok(dir)
}

fn log_path(dir: &Path, cfg: &ExperimentConfig, label: &str) -> PathBuf {
    dir.join(format!("{}-{}-s{}.log", cfg.kind.as_str(), label, cfg.seed))
}

fn report_path(dir: &Path, cfg: &ExperimentConfig, format: Format) -> PathBuf {
    dir.join(format!("{}-report-s{}.{}", cfg.kind.as_str(), cfg.seed, format.extension()))
}

fn save_logs(dir: &Path, cfg: &ExperimentConfig, logs: &[EventLog]) -> Result<()> {
    for (label, log) in log_labels(cfg.kind).iter().zip(logs) {
        let path = log_path(dir, cfg, label);
        log.save(&path)?;
        println!("wrote {} ({} events)", path.display(), log.events.len());
    }
    Ok(())
}

fn load_logs(dir: &Path, cfg: &ExperimentConfig) -> Result<Vec<EventLog>> {
    log_labels(cfg.kind).iter().map(|label| EventLog::load(log_path(dir, cfg, label))).collect()
}

fn report_csv(report: &RunReport) -> String {
    let (tables, summary) = report_tables(report);
    let mut out = format!(
        "# report {} seed {} config {}\n",
        report.kind.as_str(),
        report.seed,
        report.config_hash
    );
    for (key, value) in &summary {
        out.push_str(&format!("# {key} = {value}\n"));
    }
    for table in &tables {
        out.push_str(&table.to_csv_block());
    }
    out
}

fn save_report(dir: &Path, cfg: &ExperimentConfig, report: &RunReport, format: Format) -> Result<()> {
    let rendered = match format {
        Format::Json => report.to_json()?,
        Format::Csv => report_csv(report),
    };
    let path = report_path(dir, cfg, format);
    std::fs::write(&path, rendered)?;
    let (_, summary) = report_tables(report);
    for (key, value) in &summary {
        println!("{key} = {value}");
    }
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_simulate(args: &JobArgs) -> Result<()> {
    let cfg = load_config(args)?;
    let dir = out_dir(&args.out)?;
    let logs = simulate(&cfg)?;
    save_logs(&dir, &cfg, &logs)
}

fn cmd_analyze(args: &JobArgs) -> Result<()> {
    let cfg = load_config(args)?;
    let dir = out_dir(&args.out)?;
    let logs = load_logs(&dir, &cfg)?;
    let report = analyze(&cfg, &logs)?;
    save_report(&dir, &cfg, &report, args.format)
}

fn cmd_run(args: &JobArgs) -> Result<()> {
    let cfg = load_config(args)?;
    let dir = out_dir(&args.out)?;
    let out = run(&cfg)?;
    save_logs(&dir, &cfg, &out.logs)?;
    save_report(&dir, &cfg, &out.report, args.format)
}

fn cmd_figure(args: &FigureArgs) -> Result<()> {
    if !FIGURE_IDS.contains(&args.id.as_str()) {
        return Err(Error::argument(format!(
            "unknown figure {:?}; known ids: {}",
            args.id,
            FIGURE_IDS.join(", ")
        )));
    }
    let dir = out_dir(&args.out)?;
    let report = run_figure(&args.id, args.seed)?;
    for (key, value) in &report.summary {
        println!("{key} = {value}");
    }
    let json_path = dir.join(format!("figure-{}-s{}.json", report.id, report.seed));
    std::fs::write(&json_path, report.to_json()?)?;
    println!("wrote {}", json_path.display());
    let csv_path = dir.join(format!("figure-{}-s{}.csv", report.id, report.seed));
    std::fs::write(&csv_path, report.to_csv())?;
    println!("wrote {}", csv_path.display());
    Ok(())
}

fn cmd_oracle(args: &OracleArgs) -> Result<()> {
    let check = permanent_cross_check(args.seed, args.trials)?;
    println!("trials = {}", check.trials);
    println!("outcomes = {}", check.outcomes);
    println!("max_abs_delta = {:.3e}", check.max_abs_delta);
    if check.max_abs_delta >= 1e-8 {
        return Err(Error::domain(format!(
            "transport disagrees with the permanent formula by {:.3e}",
            check.max_abs_delta
        )));
    }
    Ok(())
}

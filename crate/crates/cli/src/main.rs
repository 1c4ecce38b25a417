mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use iesplan_core::analysis::Extreme;
use iesplan_core::model::ExclusivityMode;

use commands::{Failure, EXIT_INPUT};
use config::RunConfig;

/// Low-carbon building energy system planning under uncertainty.
#[derive(Debug, Parser)]
#[command(name = "iesplan", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Scenario generation.
    Scen {
        #[command(subcommand)]
        action: ScenAction,
    },
    /// Solve one planning problem and write all reports.
    Plan,
    /// Solve once per carbon-tax level.
    Sweep,
    /// Write the assembled model as MPS.
    ExportMps,
    /// Check catalog, tariffs and scenario files.
    Validate,
}

#[derive(Debug, Subcommand)]
enum ScenAction {
    /// Generate scenarios from history by moment matching.
    Gen,
}

#[derive(Debug, Args)]
struct Overrides {
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    zeta: Option<f64>,
    /// Comma-separated ¥/t levels; `plan` takes a single value.
    #[arg(long, global = true, value_delimiter = ',', num_args = 1..)]
    carbon_tax: Option<Vec<f64>>,
    #[arg(long, global = true, value_parser = parse_mode)]
    mode: Option<ExclusivityMode>,
    #[arg(long, global = true, value_parser = parse_extreme)]
    extreme: Option<Extreme>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Number of scenarios to generate.
    #[arg(long, global = true)]
    n: Option<usize>,
    /// Read scenarios from this load CSV instead of generating them.
    #[arg(long, global = true)]
    scenarios: Option<PathBuf>,
    #[arg(long, global = true, requires = "scenarios")]
    scenarios_ev: Option<PathBuf>,
    /// Also write model.mps when planning.
    #[arg(long, global = true)]
    export_mps: bool,
    /// Solver wall-clock limit in seconds.
    #[arg(long, global = true)]
    time_limit: Option<f64>,
}

fn parse_mode(s: &str) -> Result<ExclusivityMode, String> {
    match s {
        "binary" => Ok(ExclusivityMode::Binary),
        "relaxed" => Ok(ExclusivityMode::Relaxed),
        _ => Err(format!("expected binary or relaxed, got {s}")),
    }
}

fn parse_extreme(s: &str) -> Result<Extreme, String> {
    match s {
        "elec" => Ok(Extreme::Elec),
        "heat" => Ok(Extreme::Heat),
        _ => Err(format!("expected elec or heat, got {s}")),
    }
}

fn build_config(o: &Overrides, command: &Command) -> Result<RunConfig, Failure> {
    let mut cfg = match &o.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(v) = o.seed {
        cfg.seed = v;
    }
    if let Some(v) = o.zeta {
        cfg.zeta = v;
    }
    if let Some(v) = o.n {
        cfg.n_scenarios = v;
    }
    if let Some(v) = o.mode {
        cfg.exclusivity_mode = v;
    }
    if let Some(v) = o.extreme {
        cfg.extreme = Some(v);
    }
    if let Some(v) = &o.out {
        cfg.out_dir = v.clone();
    }
    if let Some(v) = &o.scenarios {
        cfg.scenarios = Some(v.clone());
        cfg.scenarios_ev = o.scenarios_ev.clone();
        cfg.use_existing_scenarios = true;
    }
    if o.export_mps {
        cfg.export_mps = true;
    }
    if let Some(v) = o.time_limit {
        cfg.solver.time_limit_s = Some(v);
    }
    if let Some(taxes) = &o.carbon_tax {
        match command {
            Command::Plan | Command::ExportMps => match taxes.as_slice() {
                [t] => cfg.carbon_tax = Some(*t),
                _ => {
                    return Err(Failure(format!(
                        "{} takes a single carbon tax, got {}",
                        command_name(command),
                        taxes.len()
                    )))
                }
            },
            _ => cfg.carbon_taxes = taxes.clone(),
        }
    }
    cfg.check().map_err(Failure)?;
    Ok(cfg)
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Scen { .. } => "scen gen",
        Command::Plan => "plan",
        Command::Sweep => "sweep",
        Command::ExportMps => "export-mps",
        Command::Validate => "validate",
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let result = build_config(&cli.overrides, &cli.command).and_then(|cfg| match cli.command {
        Command::Scen { action: ScenAction::Gen } => commands::scen_gen(&cfg),
        Command::Plan => commands::plan(&cfg),
        Command::Sweep => commands::sweep(&cfg),
        Command::ExportMps => commands::export_mps(&cfg),
        Command::Validate => commands::validate(&cfg),
    });
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INPUT as u8)
        }
    }
}

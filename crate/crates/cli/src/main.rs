//! `isobath`: run simulated contour-mapping missions from a config file.
//!
//! Exit codes: 0 success, 1 configuration error, 2 runtime fault.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use isobath_core::config::{ConfigError, MissionConfig, Mode};
use isobath_core::gp::GpModel;
use isobath_core::output::{self, OutputError};
use isobath_core::planner::{rh_execute, rh_execute_baseline, Arm, MissionError, MissionOutcome};

#[derive(Parser)]
#[command(name = "isobath", version, about = "Receding-horizon isobath mapping simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Override the planner and sensor seeds.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write artifacts here instead of the configured output directory.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// terminal-rewards, baseline or both.
    #[arg(long, global = true, value_parser = parse_mode)]
    mode: Option<Mode>,
}

#[derive(Subcommand)]
enum Command {
    /// Execute the configured mission arm(s) and write logs and posterior grids.
    Run { config: PathBuf },
    /// Parse and check a config without running anything.
    Validate { config: PathBuf },
    /// Write the prior-mean depth grid.
    DumpPrior { config: PathBuf },
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    Mode::parse(s).ok_or_else(|| format!("unknown mode `{s}` (terminal-rewards, baseline, both)"))
}

enum Fault {
    Config(ConfigError),
    Runtime(String),
}

impl From<ConfigError> for Fault {
    fn from(e: ConfigError) -> Self {
        Fault::Config(e)
    }
}

impl From<MissionError> for Fault {
    fn from(e: MissionError) -> Self {
        Fault::Runtime(e.to_string())
    }
}

impl From<OutputError> for Fault {
    fn from(e: OutputError) -> Self {
        Fault::Runtime(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Fault::Config(e)) => {
            eprintln!("config error: {e}");
            ExitCode::from(1)
        }
        Err(Fault::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn load(cli: &Cli, path: &Path) -> Result<MissionConfig, Fault> {
    let mut cfg = MissionConfig::load(path)?;
    if let Some(seed) = cli.seed {
        cfg.reseed(seed);
    }
    if let Some(dir) = &cli.out_dir {
        cfg.output_dir = dir.clone();
    }
    if let Some(mode) = cli.mode {
        cfg.mode = mode;
    }
    Ok(cfg)
}

fn create_dir(dir: &Path) -> Result<(), Fault> {
    std::fs::create_dir_all(dir).map_err(|e| Fault::Runtime(format!("cannot create {}: {e}", dir.display())))
}

fn dispatch(cli: &Cli) -> Result<(), Fault> {
    match &cli.command {
        Command::Validate { config } => {
            let cfg = load(cli, config)?;
            cfg.mission()?;
            println!("{}: ok", config.display());
            Ok(())
        }
        Command::DumpPrior { config } => {
            let cfg = load(cli, config)?;
            let mission = cfg.mission()?;
            let model = GpModel::new(mission.gp, mission.prior).map_err(|e| Fault::Runtime(e.to_string()))?;
            create_dir(&cfg.output_dir)?;
            let path = cfg.output_dir.join("prior.csv");
            output::dump_prior(&model, &mission.area, cfg.grid_resolution).write(&path)?;
            println!("wrote {}", path.display());
            Ok(())
        }
        Command::Run { config } => {
            let cfg = load(cli, config)?;
            let mission = cfg.mission()?;
            create_dir(&cfg.output_dir)?;
            let resolved = cfg.output_dir.join("config_resolved.txt");
            std::fs::write(&resolved, cfg.to_text())
                .map_err(|e| Fault::Runtime(format!("cannot write {}: {e}", resolved.display())))?;
            let arms: &[Arm] = match cfg.mode {
                Mode::TerminalRewards => &[Arm::TerminalReward],
                Mode::Baseline => &[Arm::Baseline],
                Mode::Both => &[Arm::TerminalReward, Arm::Baseline],
            };
            for &arm in arms {
                let outcome = match arm {
                    Arm::TerminalReward => rh_execute(&mission)?,
                    Arm::Baseline => rh_execute_baseline(&mission)?,
                };
                write_artifacts(&cfg, &mission.area, arm, &outcome)?;
                let s = &outcome.log.summary;
                println!(
                    "{}: steps {} B0 {:.3} running bound {:.3} final J {:.3} realized {:.3} guarantee {}{}",
                    arm.name(),
                    s.steps,
                    s.b0,
                    s.running_bound,
                    s.final_j,
                    s.final_realized,
                    if s.guarantee_satisfied { "satisfied" } else { "violated" },
                    if s.dead_end { " (dead end)" } else { "" }
                );
            }
            Ok(())
        }
    }
}

fn write_artifacts(
    cfg: &MissionConfig,
    area: &isobath_core::OperationalArea,
    arm: Arm,
    outcome: &MissionOutcome,
) -> Result<(), Fault> {
    let dir = &cfg.output_dir;
    let file = |suffix: &str| dir.join(format!("{}_{suffix}", arm.name()));
    output::write_mission_log(&file("log.csv"), &outcome.log.rows)?;
    output::write_measurements(&file("measurements.csv"), &outcome.samples)?;
    output::write_epochs(&file("epochs.csv"), &outcome.epochs)?;
    output::write_summary(&file("summary.txt"), &outcome.log)?;
    let grids = output::dump_posterior(&outcome.model, area, cfg.grid_resolution, &cfg.reward)
        .map_err(|e| Fault::Runtime(e.to_string()))?;
    grids.mu.write(&file("mu.csv"))?;
    grids.sigma.write(&file("sigma.csv"))?;
    grids.ambiguity.write(&file("ambiguity.csv"))?;
    Ok(())
}

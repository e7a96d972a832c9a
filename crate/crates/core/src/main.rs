use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use csma_aoi_game::cli::{cmd_analyze, cmd_simulate, cmd_sweep, cmd_table1, CliResult};
use csma_aoi_game::scenario::ScenarioFile;

/// Equilibria and simulation of the one-shot CSMA/CA age-of-information game.
#[derive(Debug, Parser)]
#[command(name = "aoi-game", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Regime, dominance, closed-form MSNE and pure Nash equilibria of a scenario.
    Analyze(ScenarioArgs),
    /// The five built-in three-node scenarios.
    Table1 {
        /// Compare against the reference values; exit 2 on mismatch.
        #[arg(long)]
        check: bool,
    },
    /// Sweep one node's starting age and write MSNE and success probabilities as CSV.
    Sweep {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// CSV destination (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo check of the slot model; optionally write an age trajectory CSV.
    Simulate {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Trajectory CSV destination.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides the scenario seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides the scenario slot count.
        #[arg(long)]
        slots: Option<u64>,
    },
}

#[derive(Debug, Args)]
struct ScenarioArgs {
    /// Scenario file (TOML).
    #[arg(long)]
    scenario: PathBuf,
}

impl ScenarioArgs {
    fn load(&self) -> CliResult<ScenarioFile> {
        Ok(ScenarioFile::load(&self.scenario)?)
    }
}

fn run(cli: Cli) -> CliResult<()> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Analyze(args) => {
            cmd_analyze(&args.load()?, &mut out)?;
        }
        Command::Table1 { check } => {
            cmd_table1(check, &mut out)?;
        }
        Command::Sweep { scenario, out: path } => {
            let scenario = scenario.load()?;
            match path {
                Some(path) => {
                    let mut file = BufWriter::new(File::create(path)?);
                    cmd_sweep(&scenario, &mut file)?;
                    file.flush()?;
                }
                None => {
                    cmd_sweep(&scenario, &mut out)?;
                }
            }
        }
        Command::Simulate {
            scenario,
            out: path,
            seed,
            slots,
        } => {
            let mut scenario = scenario.load()?;
            if let Some(seed) = seed {
                scenario.seed = seed;
            }
            if let Some(slots) = slots {
                scenario.num_slots = slots;
            }
            match path {
                Some(path) => {
                    let mut file = BufWriter::new(File::create(path)?);
                    cmd_simulate(&scenario, &mut out, Some(&mut file))?;
                    file.flush()?;
                }
                None => {
                    cmd_simulate(&scenario, &mut out, None)?;
                }
            }
        }
    }
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}


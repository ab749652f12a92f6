//! `ehcap`: closed forms, sweeps, simulations and the acceptance suite from the command line.
//!
//! Exit codes: 0 on success, 1 when `verify` finds failing criteria, 2 on
//! usage or validation errors.

mod commands;
mod settings;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::SimKind;
use settings::{CliError, Settings};

#[derive(Parser)]
#[command(name = "ehcap", version, about = "Capacity of ALOHA and CSMA networks with energy-harvesting transmitters")]
struct Cli {
    #[command(flatten)]
    flags: Flags,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Flags {
    /// Transmitter density (per m²); comma-separated list for csma, game and optimal-q
    #[arg(long, global = true, allow_hyphen_values = true)]
    lambda: Option<String>,
    /// Energy arrival probability per slot; comma-separated list for game
    #[arg(long, global = true, allow_hyphen_values = true)]
    p: Option<String>,
    /// Access probability
    #[arg(long, global = true, allow_hyphen_values = true)]
    q: Option<String>,
    /// Battery capacity: a positive integer or `inf`
    #[arg(long = "B", global = true)]
    battery: Option<String>,
    /// Path-loss exponent (> 2)
    #[arg(long, global = true, allow_hyphen_values = true)]
    alpha: Option<String>,
    /// SIR threshold, linear scale
    #[arg(long, global = true, allow_hyphen_values = true)]
    theta: Option<String>,
    /// Link length (m)
    #[arg(long, global = true, allow_hyphen_values = true)]
    d: Option<String>,
    /// CSMA packet length in slots
    #[arg(long = "L", global = true, allow_hyphen_values = true)]
    packet_len: Option<String>,
    /// Monte Carlo trials
    #[arg(long, global = true)]
    trials: Option<String>,
    /// Slots for queue simulations
    #[arg(long, global = true)]
    slots: Option<String>,
    /// Random seed
    #[arg(long, global = true)]
    seed: Option<String>,
    /// Simulation window radius (m)
    #[arg(long = "window-radius", global = true)]
    window_radius: Option<String>,
    /// Points in the aloha q sweep
    #[arg(long, global = true)]
    points: Option<String>,
    /// Write output to this file instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Plain-text key=value file; flags override its values
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Capacity as a function of the access probability q
    Aloha,
    /// CSMA back-off, failure and outage over a list of densities
    Csma,
    /// Selfish equilibria and price of anarchy over lambda x p
    Game,
    /// Capacity-maximising access probability
    OptimalQ,
    /// Compare a closed form with its Monte Carlo estimate
    Simulate {
        #[arg(value_enum)]
        kind: SimKind,
    },
    /// Run the acceptance suite
    Verify {
        /// Run only these criteria (names or numbers, comma-separated)
        #[arg(long)]
        criterion: Option<String>,
    },
}

const CSMA_DENSITIES: &str = "0.01,0.035,0.05,0.1";

fn settings(flags: &Flags) -> Result<Settings, CliError> {
    let pairs = [
        ("lambda", flags.lambda.clone()),
        ("p", flags.p.clone()),
        ("q", flags.q.clone()),
        ("B", flags.battery.clone()),
        ("alpha", flags.alpha.clone()),
        ("theta", flags.theta.clone()),
        ("d", flags.d.clone()),
        ("L", flags.packet_len.clone()),
        ("trials", flags.trials.clone()),
        ("slots", flags.slots.clone()),
        ("seed", flags.seed.clone()),
        ("window-radius", flags.window_radius.clone()),
        ("points", flags.points.clone()),
    ];
    Settings::new(&pairs, flags.config.as_deref())
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<ExitCode, CliError> {
    let mut settings = settings(&cli.flags)?;
    if matches!(cli.command, Command::Csma) {
        settings = settings.or_default("lambda", CSMA_DENSITIES);
    }
    let out = cli.flags.out.as_ref();
    let text = match &cli.command {
        Command::Aloha => commands::aloha(&settings)?,
        Command::Csma => commands::csma(&settings)?,
        Command::Game => commands::game(&settings)?,
        Command::OptimalQ => commands::optimal_q(&settings)?,
        Command::Simulate { kind } => commands::simulate(*kind, &settings)?,
        Command::Verify { criterion } => {
            let report = commands::verify(&settings, criterion.as_deref())?;
            emit(&report.render(), out)?;
            let failed = report.failures();
            if failed > 0 {
                eprintln!("{failed} acceptance criteria failed");
                return Ok(ExitCode::from(1));
            }
            return Ok(ExitCode::SUCCESS);
        }
    };
    emit(&text, out)?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

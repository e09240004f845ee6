use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use raman_lmt_cli::{run, CliError, Command, RunConfig};

/// Retroreflected Raman LMT interferometer simulator.
#[derive(Parser, Debug)]
#[command(version, about)]
struct Args {
    #[command(subcommand)]
    command: Cmd,
    /// TOML config with flat keys; defaults reproduce the paper scenario.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override one key, e.g. --set temperature_k=0 (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    set: Vec<String>,
    /// Output directory (default: the config's out_dir).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Monte Carlo seed (overrides the config's seed).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; output does not depend on this.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Print the resolved config and exit.
    #[arg(long, global = true)]
    print_config: bool,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Cmd {
    /// Single-pi-pulse Raman spectrum versus modulation frequency.
    Spectrum,
    /// Mach-Zehnder signal versus T.
    Fringe,
    /// LMT signal versus T0 with the dual-cosine fit.
    Lmt,
    /// Write the configured sequence as a text table.
    SequenceExport,
    /// Check sequence timing and channel separation.
    Validate,
}

fn execute(args: Args) -> Result<(), CliError> {
    let text = match &args.config {
        Some(p) => Some(std::fs::read_to_string(p).map_err(|e| CliError::Io(p.clone(), e))?),
        None => None,
    };
    let mut overrides = args.set.clone();
    if let Some(seed) = args.seed {
        overrides.push(format!("seed={seed}"));
    }
    let cfg = RunConfig::load(text.as_deref(), &overrides)?;
    if args.print_config {
        print!("{}", cfg.echo());
        return Ok(());
    }
    if let Some(n) = args.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    }
    let out = args.out.clone().unwrap_or_else(|| PathBuf::from(&cfg.out_dir));
    let command = match args.command {
        Cmd::Spectrum => Command::Spectrum,
        Cmd::Fringe => Command::Fringe,
        Cmd::Lmt => Command::Lmt,
        Cmd::SequenceExport => Command::SequenceExport,
        Cmd::Validate => Command::Validate,
    };
    for path in run(command, &cfg, &out)? {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

/// Epidemics on configuration-model networks: degree distributions, network
/// generation, percolation analytics, edge-based SIR dynamics and stochastic
/// simulation.
#[derive(Parser, Debug)]
#[command(name = "netperc", version)]
struct Cli {
    /// Worker threads for sweeps and ensembles (default: all cores)
    #[arg(long, global = true, env = "NETPERC_THREADS")]
    threads: Option<usize>,
    /// JSON file with this command's parameters; flags take precedence
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Summarize a degree distribution: mean, Molloy–Reed Λ, T_c, pmf
    Dist(commands::DistCmd),
    /// Check a degree sequence with the Erdős–Gallai test
    CheckSeq(commands::CheckSeqCmd),
    /// Sample a degree sequence and build a configuration-model network
    Generate(commands::GenerateCmd),
    /// Bond-percolation report at one transmissibility, or a sweep
    Percolate(commands::PercolateCmd),
    /// Integrate the edge-based SIR system, or report its final state
    Ebcm(commands::EbcmCmd),
    /// Ensemble of stochastic SIR runs (or percolation draws) on a network
    Simulate(commands::SimulateCmd),
    /// Final sizes from both analytic routes over a (beta, gamma) grid
    Compare(commands::CompareCmd),
}

fn run(cli: Cli) -> anyhow::Result<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(config::invalid("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    let cfg = cli.config.as_deref();
    match cli.command {
        Command::Dist(c) => c.run(cfg),
        Command::CheckSeq(c) => c.run(cfg),
        Command::Generate(c) => c.run(cfg),
        Command::Percolate(c) => c.run(cfg),
        Command::Ebcm(c) => c.run(cfg),
        Command::Simulate(c) => c.run(cfg),
        Command::Compare(c) => c.run(cfg),
    }
}

fn is_validation(err: &anyhow::Error) -> bool {
    err.chain().any(|c| {
        c.is::<config::Invalid>()
            || c.is::<serde_json::Error>()
            || c.downcast_ref::<netperc::Error>().is_some_and(netperc::Error::is_validation)
    })
}

fn closed_pipe(err: &anyhow::Error) -> bool {
    err.chain()
        .any(|c| c.downcast_ref::<std::io::Error>().is_some_and(|e| e.kind() == std::io::ErrorKind::BrokenPipe))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if closed_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if is_validation(&e) { 2 } else { 1 })
        }
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use recoil_sim::commands::{run_decoherence_factor, run_evolve, run_oracle, EmissionChoice, OracleKind};
use recoil_sim::{Preset, RunConfig, SimError};

#[derive(Parser)]
#[command(version, about = "Recoil-induced decoherence of an emitting atom pair")]
struct Cli {
    /// JSON run configuration; overrides --preset.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "single")]
    preset: Preset,
    /// Output directory; overrides the configured one.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate the emission factor F against separation.
    DecoherenceFactor,
    /// Reduced density matrices at the configured times.
    Evolve {
        #[arg(long, value_enum, default_value = "both")]
        emission: EmissionChoice,
        /// Comma-separated times in units of 1/Γ; an empty string runs none.
        #[arg(long)]
        times: Option<String>,
    },
    /// Compare against an independent brute-force calculation.
    Oracle {
        #[arg(long, value_enum)]
        which: OracleKind,
    },
}

fn parse_times(s: &str) -> Result<Vec<f64>, SimError> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|e| SimError::Config(format!("bad time {t:?}: {e}"))))
        .collect()
}

fn run(cli: Cli) -> Result<Vec<String>, SimError> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::preset(cli.preset),
    };
    if let Some(out) = cli.out {
        cfg.output.dir = out;
    }
    let out = cfg.output.dir.clone();
    match cli.command {
        Command::DecoherenceFactor => run_decoherence_factor(&cfg, &out),
        Command::Evolve { emission, times } => {
            if let Some(times) = times {
                cfg.times = parse_times(&times)?;
            }
            run_evolve(&cfg, &out, emission)
        }
        Command::Oracle { which } => run_oracle(&cfg, &out, which),
    }
}

fn init_threads() -> Result<(), SimError> {
    let Ok(v) = std::env::var("SIM_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| SimError::Config(format!("SIM_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| SimError::Config(e.to_string()))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    // usage errors share the config exit code; 2 belongs to the validity gate
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match init_threads().and_then(|()| run(cli)) {
        Ok(lines) => {
            for line in lines {
                println!("{line}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

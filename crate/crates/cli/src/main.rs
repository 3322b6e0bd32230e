use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Parser, ValueEnum};
use d2d_alloc::config::{self, OutputFormat, RunConfig};
use d2d_alloc::{Algorithm, Execution};

/// Monte Carlo simulator for D2D channel and power allocation.
///
/// Settings come from an optional TOML config; flags override it. The seed
/// is resolved as --seed, then `cell.seed`, then $D2D_SIM_SEED, then 1.
#[derive(Debug, Parser)]
#[command(name = "d2d-sim", version)]
struct Cli {
    /// TOML config file with [cell], [game], [sweep] and [output] sections.
    #[arg(short, long)]
    config: Option<PathBuf>,

    /// Algorithm to run; repeat for several (default: all three).
    #[arg(short, long = "algorithm", value_enum)]
    algorithms: Vec<AlgorithmArg>,

    #[arg(long)]
    seed: Option<u64>,

    /// Monte Carlo realizations per sweep point.
    #[arg(short = 'n', long)]
    realizations: Option<usize>,

    /// Output file.
    #[arg(short, long)]
    out: Option<PathBuf>,

    #[arg(long, value_enum)]
    format: Option<FormatArg>,

    /// Worker threads; 1 runs sequentially. Defaults to all cores.
    #[arg(short, long)]
    jobs: Option<usize>,

    /// Validate and print the resolved configuration without running.
    #[arg(long)]
    dry_run: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AlgorithmArg {
    Ca,
    Greedy,
    CaFixed,
}

impl From<AlgorithmArg> for Algorithm {
    fn from(a: AlgorithmArg) -> Self {
        match a {
            AlgorithmArg::Ca => Algorithm::Ca,
            AlgorithmArg::Greedy => Algorithm::Greedy,
            AlgorithmArg::CaFixed => Algorithm::CaFixed,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

fn resolve(cli: &Cli) -> Result<RunConfig> {
    let default_seed = config::default_seed_from_env()?;
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            config::parse_config_with_seed(&text, default_seed).with_context(|| format!("in {}", path.display()))?
        }
        None => config::parse_config_with_seed("", default_seed)?,
    };

    if let Some(seed) = cli.seed {
        cfg.cell.seed = seed;
    }
    if let Some(n) = cli.realizations {
        cfg.sweep.realizations = n;
    }
    if !cli.algorithms.is_empty() {
        let mut algs: Vec<Algorithm> = Vec::new();
        for &a in &cli.algorithms {
            let a = a.into();
            if !algs.contains(&a) {
                algs.push(a);
            }
        }
        cfg.sweep.algorithms = algs;
    }
    if let Some(out) = &cli.out {
        cfg.output.path = out.clone();
    }
    match cli.format {
        Some(FormatArg::Csv) => cfg.output.format = OutputFormat::Csv,
        Some(FormatArg::Json) => cfg.output.format = OutputFormat::Json,
        None => {}
    }
    cfg.validate()?;
    Ok(cfg)
}

fn execution(jobs: Option<usize>) -> Execution {
    match jobs {
        Some(n) => Execution::with_jobs(n),
        None => Execution::default(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match try_main(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

fn try_main(cli: &Cli) -> Result<()> {
    let cfg = resolve(cli)?;
    if cli.dry_run {
        print!("{}", cfg.to_toml());
        return Ok(());
    }

    let start = Instant::now();
    let rows = config::run(&cfg, execution(cli.jobs))?;
    let nonconverged: usize = rows.iter().map(|r| r.nonconverged).sum();
    eprintln!("wrote {} rows to {} in {:.1?}", rows.len(), cfg.output.path.display(), start.elapsed());
    if nonconverged > 0 {
        eprintln!("warning: {nonconverged} power games hit the iteration cap (see the nonconverged column)");
    }
    Ok(())
}

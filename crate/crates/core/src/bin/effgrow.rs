use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use effgrow::experiments::{
    parse_beta, parse_kernel, parse_traits, run_experiment, solve_query, ExperimentConfig, ExperimentId, DEFAULT_SEED,
};
use effgrow::{Error, GrowthCase};

/// Effective growth rate of heterogeneous growth-fragmentation populations.
#[derive(Parser)]
#[command(name = "effgrow", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Homogeneous vs heterogeneous size profiles
    #[command(name = "fig2")]
    Fig2(RunArgs),
    /// Effective trait against v* for uniform and quarter kernels
    #[command(name = "fig3")]
    Fig3(RunArgs),
    /// Effective trait against v* for asymmetric kernels
    #[command(name = "fig4")]
    Fig4(RunArgs),
    /// Effective trait over the (k1, k2) square
    #[command(name = "fig5_heatmap")]
    Fig5Heatmap(RunArgs),
    /// Profiles along k1 = k2 and k1 = 1 - k2
    #[command(name = "fig5_surfaces")]
    Fig5Surfaces(RunArgs),
    /// Effective trait against the number of traits
    #[command(name = "fig6_Mconvergence")]
    Fig6MConvergence(RunArgs),
    /// Effective trait against sigma and alpha for all three means
    #[command(name = "fig7_sigma_alpha")]
    Fig7SigmaAlpha(RunArgs),
    /// Arithmetic-mean pinned sweeps around the neutral kernel
    #[command(name = "fig8_neutrality")]
    Fig8Neutrality(RunArgs),
    /// Profiles with one switching probability fixed
    #[command(name = "figS1_fractions")]
    FigS1Fractions(RunArgs),
    /// Equal mitosis with linear growth
    #[command(name = "figS2_mitosis")]
    FigS2Mitosis(RunArgs),
    /// Print the eigentriplet of one model as a CSV row
    Solve(SolveArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// TOML file with [global] and per-experiment sections
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Grid step for size-resolved experiments
    #[arg(long)]
    dx: Option<f64>,
    /// Domain length for size-resolved experiments
    #[arg(long)]
    xmax: Option<f64>,
    /// Eigensolver tolerance
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    case: String,
    /// Increasing comma-separated traits, e.g. 0.5,2.5
    #[arg(long)]
    traits: String,
    /// uniform | alpha:A | alpha0 | bimodal:K1,K2 | noheredity:W.. | random[:SEED] | matrix:R1;R2.. | file:PATH
    #[arg(long)]
    kernel: String,
    /// Constant F or pow:N for x^(N-1)
    #[arg(long, default_value = "1")]
    beta: String,
    /// Seed for a bare `random` kernel
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

fn run(id: ExperimentId, args: RunArgs) -> Result<(), Error> {
    let mut config = match &args.config {
        Some(path) => ExperimentConfig::from_file(id, path)?,
        None => ExperimentConfig::new(id),
    };
    if let Some(out) = args.out {
        config.out = out;
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(threads) = args.threads {
        config.threads = Some(threads);
    }
    for (key, value) in [("dx", args.dx), ("xmax", args.xmax), ("tol", args.tol)] {
        if let Some(v) = value {
            config.set_override(key, v)?;
        }
    }
    let manifest = run_experiment(&config)?;
    for f in &manifest.files {
        println!("{}: {} rows", config.out.join(&f.path).display(), f.rows);
    }
    println!("config hash {}", manifest.config_hash);
    Ok(())
}

fn solve(args: SolveArgs) -> Result<(), Error> {
    let case: GrowthCase = args.case.parse().map_err(|e: Error| Error::Config(e.to_string()))?;
    let traits = parse_traits(&args.traits).map_err(|e| Error::Config(e.to_string()))?;
    let kernel = parse_kernel(&args.kernel, traits.len(), args.seed).map_err(|e| match e {
        Error::Config(_) => e,
        other => Error::Config(other.to_string()),
    })?;
    let beta = parse_beta(&args.beta)?;
    let triplet = solve_query(case, &traits, &kernel, beta)?;
    print!("{}", triplet.to_table().render());
    Ok(())
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::Domain { .. } | Error::DimensionMismatch { .. } | Error::InvalidKernel(_) => 2,
        Error::Convergence { .. } => 3,
        Error::CheckFailed { .. } => 4,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(args) => solve(args),
        Command::Fig2(a) => run(ExperimentId::Fig2, a),
        Command::Fig3(a) => run(ExperimentId::Fig3, a),
        Command::Fig4(a) => run(ExperimentId::Fig4, a),
        Command::Fig5Heatmap(a) => run(ExperimentId::Fig5Heatmap, a),
        Command::Fig5Surfaces(a) => run(ExperimentId::Fig5Surfaces, a),
        Command::Fig6MConvergence(a) => run(ExperimentId::Fig6MConvergence, a),
        Command::Fig7SigmaAlpha(a) => run(ExperimentId::Fig7SigmaAlpha, a),
        Command::Fig8Neutrality(a) => run(ExperimentId::Fig8Neutrality, a),
        Command::FigS1Fractions(a) => run(ExperimentId::FigS1Fractions, a),
        Command::FigS2Mitosis(a) => run(ExperimentId::FigS2Mitosis, a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("effgrow: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

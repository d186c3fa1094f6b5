use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use bosebound::report::{
    emit, run, run_limits, run_solve, run_verify, BoundsReport, EmitFormat, HarnessError, RunConfig,
};
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Bounds toolkit for bosonic Coulomb and Newton ground-state energies.
#[derive(Parser)]
#[command(name = "bosebound", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the identity suite only: pair decomposition, graph bond identity,
    /// dilation scaling, chain telescoping.
    Verify(CommonArgs),
    /// Two-body and mean-field solves for the configured system.
    Solve(CommonArgs),
    /// Full sweep: solves, bound table, normalized sequences, ordering checks.
    Sweep(CommonArgs),
    /// Minima of the two limiting one-orbital functionals.
    Limits(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// JSON run configuration; built-in defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Table format written to --out.
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    /// Output directory; results are printed only when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the config's RNG seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for EmitFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => EmitFormat::Csv,
            FormatArg::Json => EmitFormat::Json,
        }
    }
}

fn load_config(args: &CommonArgs) -> Result<RunConfig, HarnessError> {
    let mut config = match &args.config {
        Some(path) => RunConfig::from_json(&std::fs::read_to_string(path)?)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = args.seed {
        config.rng_seed = seed;
    }
    config.validate()?;
    Ok(config)
}

fn finish(args: &CommonArgs, name: &str, mut report: BoundsReport) -> Result<i32, HarnessError> {
    let config = &report.provenance.config;
    println!(
        "bosebound {name}: {} | rows: {}",
        config.spec_at(config.n_range.min).label(),
        report.rows.len()
    );
    for a in &report.assertions {
        let status = if a.passed { "PASS" } else { "FAIL" };
        println!(
            "  [{status}] {:<42} residual {:>10.3e}  {}",
            a.name, a.residual, a.detail
        );
    }
    let failed = report.assertions.iter().filter(|a| !a.passed).count();
    println!(
        "  assertions: {} passed, {} failed",
        report.assertions.len() - failed,
        failed
    );
    if let Some(dir) = &args.out {
        // Wall clock lives only in the JSON provenance; the CSV stays
        // byte-identical across runs of the same config.
        report.provenance.generated_at = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .ok()
            .map(|d| d.as_secs().to_string());
        let path = emit(&report, dir, args.format.into())?;
        println!("  wrote {}", path.display());
    }
    Ok(if failed == 0 { 0 } else { 1 })
}

fn main() {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Verify(args) => load_config(args)
            .and_then(|c| run_verify(&c))
            .and_then(|r| finish(args, "verify", r)),
        Command::Solve(args) => load_config(args)
            .and_then(|c| run_solve(&c))
            .and_then(|r| finish(args, "solve", r)),
        Command::Sweep(args) => load_config(args)
            .and_then(|c| run(&c))
            .and_then(|r| finish(args, "sweep", r)),
        Command::Limits(args) => load_config(args)
            .and_then(|c| run_limits(&c))
            .and_then(|r| finish(args, "limits", r)),
    };
    match result {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(2);
        }
    }
}

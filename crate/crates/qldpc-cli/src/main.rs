//! Command-line front end: code generation and validation, Fisher/CRB
//! tables, Monte-Carlo sweeps and SVG plots.
//!
//! Exit codes: 0 success, 1 usage error, 2 data/config error.

mod config;
mod csvout;
mod plot;

use anyhow::{anyhow, bail, Context, Result};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use config::{config_hash, parse_sweep_config, CONFIG_KEY_HELP};
use qldpc::codes::{bicycle_code, load_code, save_code, validate_code, BicycleParams};
use qldpc::estimation::{crb_variance, fisher_entangled, fisher_unentangled};
use qldpc::montecarlo::run_sweep;
use qldpc::stabilizer::StabilizerMatrix;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "qldpc",
    version,
    about = "Stabilizer quantum LDPC code simulation over the depolarizing channel",
    after_help = "Environment:\n  QLDPC_THREADS  caps worker parallelism (default: hardware concurrency)"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a stabilizer code and write it to a code file
    GenCode(GenCodeArgs),
    /// Load a code file and print its structural report
    Validate(ValidateArgs),
    /// Print Fisher information and Cramer-Rao variances over an f grid
    Fisher(FisherArgs),
    /// Run a Monte-Carlo sweep from a config file and emit result CSV
    Simulate(SimulateArgs),
    /// Render QBER/FER curves from result CSVs as a standalone SVG
    Plot(PlotArgs),
}

#[derive(Args)]
struct GenCodeArgs {
    /// Built-in code name (`five-qubit`)
    #[arg(long, conflicts_with = "bicycle")]
    builtin: Option<String>,
    /// Generate a dual-containing bicycle code
    #[arg(long)]
    bicycle: bool,
    /// Qubit count (bicycle; even)
    #[arg(short = 'n', long = "qubits", default_value_t = 400)]
    n: usize,
    /// Stabilizer row weight (bicycle; even)
    #[arg(short = 'w', long, default_value_t = 16)]
    row_weight: usize,
    /// Rows kept per block after deletion (bicycle)
    #[arg(short = 'm', long, default_value_t = 100)]
    m_target: usize,
    /// Construction seed (bicycle)
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output code file
    #[arg(short = 'o', long, required = true)]
    output: PathBuf,
}

#[derive(Args)]
struct ValidateArgs {
    /// Code file to check
    path: PathBuf,
}

#[derive(Args)]
struct FisherArgs {
    /// Comma/space separated f values in (0, 1)
    #[arg(long = "f-grid", required = true)]
    f_grid: String,
    /// Number of probe measurements in the variance
    #[arg(long = "n-m", default_value_t = 1)]
    n_m: u64,
    /// Extra block-length factor in the variance
    #[arg(long = "scale-n", default_value_t = 1)]
    scale_n: u64,
}

#[derive(Args)]
#[command(after_long_help = CONFIG_KEY_HELP)]
struct SimulateArgs {
    /// Sweep config file
    config: PathBuf,
    /// Output CSV path (stdout when omitted)
    #[arg(short = 'o', long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct PlotArgs {
    /// Result CSV files
    #[arg(required = true)]
    csv: Vec<PathBuf>,
    /// Output SVG path
    #[arg(short = 'o', long, required = true)]
    output: PathBuf,
    /// Plot title
    #[arg(long, default_value = "QBER / FER vs flip probability")]
    title: String,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    if let Err(e) = init_thread_pool() {
        eprintln!("error: {e:#}");
        std::process::exit(2);
    }
    if let Err(e) = run(cli) {
        eprintln!("error: {e:#}");
        std::process::exit(2);
    }
}

fn init_thread_pool() -> Result<()> {
    if let Ok(raw) = std::env::var("QLDPC_THREADS") {
        let threads: usize = raw
            .parse()
            .map_err(|_| anyhow!("QLDPC_THREADS = {raw:?} is not a thread count"))?;
        if threads == 0 {
            bail!("QLDPC_THREADS must be at least 1");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .context("building the worker pool")?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::GenCode(args) => cmd_gen_code(args),
        Cmd::Validate(args) => cmd_validate(args),
        Cmd::Fisher(args) => cmd_fisher(args),
        Cmd::Simulate(args) => cmd_simulate(args),
        Cmd::Plot(args) => cmd_plot(args),
    }
}

fn cmd_gen_code(args: GenCodeArgs) -> Result<()> {
    let (matrix, label) = match (&args.builtin, args.bicycle) {
        (Some(name), false) => match name.as_str() {
            "five-qubit" => (StabilizerMatrix::five_qubit(), "five-qubit".to_string()),
            other => bail!("unknown builtin code {other:?} (available: five-qubit)"),
        },
        (None, true) => {
            let params = BicycleParams {
                n: args.n,
                row_weight: args.row_weight,
                m_target: args.m_target,
                seed: args.seed,
            };
            (bicycle_code(&params)?, params.id())
        }
        (None, false) => bail!("pick a code: --builtin <name> or --bicycle"),
        (Some(_), true) => unreachable!("clap conflict"),
    };
    save_code(&matrix, &args.output)
        .with_context(|| format!("writing {}", args.output.display()))?;
    println!("wrote {} ({label})", args.output.display());
    println!("{}", validate_code(&matrix));
    Ok(())
}

fn cmd_validate(args: ValidateArgs) -> Result<()> {
    let matrix =
        load_code(&args.path).with_context(|| format!("loading {}", args.path.display()))?;
    println!("{}", validate_code(&matrix));
    Ok(())
}

fn cmd_fisher(args: FisherArgs) -> Result<()> {
    let grid: Vec<f64> = args
        .f_grid
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| anyhow!("invalid f value {t:?}")))
        .collect::<Result<_>>()?;
    if grid.is_empty() {
        bail!("empty f grid");
    }
    let scale = args
        .n_m
        .checked_mul(args.scale_n)
        .ok_or_else(|| anyhow!("n-m * scale-n overflows"))?;
    println!(
        "{:>10} {:>14} {:>14} {:>14} {:>14}",
        "f", "J_unent", "J_ent", "var_unent", "var_ent"
    );
    for f in grid {
        let j_u = fisher_unentangled(f)?;
        let j_e = fisher_entangled(f)?;
        let v_u = crb_variance(j_u, scale)?;
        let v_e = crb_variance(j_e, scale)?;
        println!("{f:>10.6} {j_u:>14.6} {j_e:>14.6} {v_u:>14.8} {v_e:>14.8}");
    }
    Ok(())
}

fn cmd_simulate(args: SimulateArgs) -> Result<()> {
    let text = std::fs::read_to_string(&args.config)
        .with_context(|| format!("reading {}", args.config.display()))?;
    let parsed = parse_sweep_config(&text)
        .with_context(|| format!("config {}", args.config.display()))?;
    parsed.sweep.validate()?;
    let hash = config_hash(&parsed.canonical);
    let table = run_sweep(&parsed.sweep)?;
    let csv = csvout::render_csv(&table, &parsed.canonical, &hash);
    match &args.output {
        Some(path) => {
            std::fs::write(path, &csv).with_context(|| format!("writing {}", path.display()))?;
            eprintln!(
                "wrote {} ({} rows, config {hash}, seed {})",
                path.display(),
                table.rows.len(),
                table.master_seed
            );
        }
        None => print!("{csv}"),
    }
    Ok(())
}

fn cmd_plot(args: PlotArgs) -> Result<()> {
    let mut rows = Vec::new();
    let multi = args.csv.len() > 1;
    for path in &args.csv {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))?;
        let parsed =
            csvout::parse_csv(&text).with_context(|| format!("parsing {}", path.display()))?;
        if parsed.is_empty() {
            bail!("{} has no data rows", path.display());
        }
        let label = if multi {
            path.file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default()
        } else {
            String::new()
        };
        rows.extend(parsed.into_iter().map(|r| (label.clone(), r)));
    }
    let (svg, dropped) = plot::render_svg(&rows, &args.title);
    if dropped > 0 {
        eprintln!("warning: dropped {dropped} non-positive values from the log axis");
    }
    std::fs::write(&args.output, svg)
        .with_context(|| format!("writing {}", args.output.display()))?;
    eprintln!("wrote {}", args.output.display());
    Ok(())
}

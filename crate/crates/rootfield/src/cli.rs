//! Command-line interface: `root`, `bench`, `genprime`, `residue`.
//!
//! Field elements and moduli are lowercase hex without prefix; r, bits and
//! counts are decimal. Results go to stdout, diagnostics to stderr. The
//! seed is taken from `--seed`, then the `ROOTFIELD_SEED` environment
//! variable, then 0.

use std::io::Write;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};

use crate::bench::{self, BenchConfig};
use crate::error::{Error, Result};
use crate::fp::{self, FieldCtx};
use crate::roots::{self, AlgoId, RootProblem};

pub const SEED_ENV_VAR: &str = "ROOTFIELD_SEED";

const EXIT_CODES_HELP: &str = "exit codes:\n  \
    0   success (residue: c is an r-th power)\n  \
    2   NON_RESIDUE\n  \
    3   NOT_APPLICABLE\n  \
    4   WITNESS_SEARCH_FAILED\n  \
    5   INTERNAL_INCONSISTENCY\n  \
    64  usage error\n  \
    1   other failures";

#[derive(Debug, Parser)]
#[command(
    name = "rootfield",
    about = "r-th root extraction in prime fields F_p (p ≡ 1 mod r)",
    after_help = EXIT_CODES_HELP
)]
pub struct Cli {
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Extract one r-th root of c in F_p
    Root(RootArgs),
    /// Sweep (algorithm, r) cells and report mean time and multiplication counts
    Bench(BenchArgs),
    /// Generate a prime p ≡ 1 (mod r) of the requested size
    Genprime(GenprimeArgs),
    /// Test whether c is an r-th power residue in F_p
    Residue(ResidueArgs),
}

#[derive(Debug, Args)]
pub struct RootArgs {
    /// Field modulus (hex, no prefix); verified prime
    #[arg(long)]
    pub p: String,
    /// Root degree r > 1 with p ≡ 1 (mod r)
    #[arg(long)]
    pub r: u64,
    /// Target residue (hex)
    #[arg(long)]
    pub c: String,
    /// Algorithm: hc | wh | new
    #[arg(long, default_value = "new")]
    pub alg: AlgoId,
    /// Witness-search seed (falls back to ROOTFIELD_SEED, then 0)
    #[arg(long)]
    pub seed: Option<u64>,
    /// Also print the full sorted root set
    #[arg(long)]
    pub all: bool,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Prime size in bits
    #[arg(long, default_value_t = 512)]
    pub bits: u64,
    /// Comma-separated r values
    #[arg(long = "r-list", value_delimiter = ',', default_value = "3,4,43,101")]
    pub r_list: Vec<u64>,
    /// Comma-separated subset of hc,wh,new
    #[arg(long, value_delimiter = ',', default_value = "hc,wh,new")]
    pub algos: Vec<AlgoId>,
    /// Trials per cell
    #[arg(long, default_value_t = 5)]
    pub trials: u32,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output format: csv | json
    #[arg(long, default_value = "csv")]
    pub format: OutputFormat,
    /// Per-cell wall-clock cap in seconds
    #[arg(long = "time-budget", default_value_t = 600)]
    pub time_budget: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::Usage(format!(
                "unknown format {other:?} (expected csv or json)"
            ))),
        }
    }
}

#[derive(Debug, Args)]
pub struct GenprimeArgs {
    #[arg(long)]
    pub bits: u64,
    #[arg(long)]
    pub r: u64,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct ResidueArgs {
    #[arg(long)]
    pub p: String,
    #[arg(long)]
    pub r: u64,
    #[arg(long)]
    pub c: String,
}

fn resolve_seed(flag: Option<u64>) -> u64 {
    flag.or_else(|| {
        std::env::var(SEED_ENV_VAR)
            .ok()
            .and_then(|v| v.parse().ok())
    })
    .unwrap_or(0)
}

fn parse_problem(p_hex: &str, r: u64, c_hex: &str) -> Result<RootProblem> {
    let p = fp::parse_hex(p_hex)?;
    let field = FieldCtx::new(p)?;
    let c = field.parse_hex(c_hex)?;
    RootProblem::new(field, r, c)
}

/// Execute a parsed command; returns the process exit code.
pub fn run(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    match cli.cmd {
        Cmd::Root(args) => cmd_root(args, stdout),
        Cmd::Bench(args) => cmd_bench(args, stdout, stderr),
        Cmd::Genprime(args) => cmd_genprime(args, stdout),
        Cmd::Residue(args) => cmd_residue(args, stdout),
    }
}

fn cmd_root(args: RootArgs, out: &mut dyn Write) -> Result<i32> {
    let prob = parse_problem(&args.p, args.r, &args.c)?;
    let seed = resolve_seed(args.seed);
    let extraction = roots::extract(&prob, args.alg, seed)?;

    let wr = |e: std::io::Error| Error::Usage(format!("write failed: {e}"));
    writeln!(out, "x = {}", extraction.x.to_hex()).map_err(wr)?;
    if let Some(w) = &extraction.witness {
        writeln!(out, "b = {}", w.b().to_hex()).map_err(wr)?;
        writeln!(out, "omega = {}", w.omega().to_hex()).map_err(wr)?;
        writeln!(out, "witness_trials = {}", w.trials()).map_err(wr)?;
    }
    let c = &extraction.counts;
    writeln!(out, "mults_witness_search = {}", c.witness_search).map_err(wr)?;
    writeln!(out, "mults_accumulation = {}", c.accumulation).map_err(wr)?;
    writeln!(out, "mults_exponentiation = {}", c.exponentiation).map_err(wr)?;
    writeln!(out, "mults_assembly = {}", c.assembly).map_err(wr)?;
    writeln!(out, "mults_total = {}", c.total()).map_err(wr)?;
    if args.all {
        let set = match &extraction.witness {
            Some(w) => roots::all_roots(&prob, &extraction.x, w)?,
            None => vec![extraction.x.clone()], // c = 0: the only root is 0
        };
        let hex: Vec<String> = set.iter().map(|f| f.to_hex()).collect();
        writeln!(out, "roots = {}", hex.join(",")).map_err(wr)?;
    }
    Ok(0)
}

fn cmd_bench(args: BenchArgs, out: &mut dyn Write, diag: &mut dyn Write) -> Result<i32> {
    let cfg = BenchConfig {
        bits: args.bits,
        r_list: args.r_list,
        algos: args.algos,
        trials: args.trials,
        seed: resolve_seed(args.seed),
        time_budget: Duration::from_secs(args.time_budget),
    };
    let cells = bench::run(&cfg, diag)?;
    let rendered = match args.format {
        OutputFormat::Csv => bench::to_csv(&cells),
        OutputFormat::Json => bench::to_json(&cells) + "\n",
    };
    out.write_all(rendered.as_bytes())
        .map_err(|e| Error::Usage(format!("write failed: {e}")))?;
    Ok(0)
}

fn cmd_genprime(args: GenprimeArgs, out: &mut dyn Write) -> Result<i32> {
    let p = fp::gen_prime_1_mod_r(args.bits, args.r, resolve_seed(args.seed))?;
    writeln!(out, "{}", fp::to_hex(&p)).map_err(|e| Error::Usage(format!("write failed: {e}")))?;
    Ok(0)
}

fn cmd_residue(args: ResidueArgs, out: &mut dyn Write) -> Result<i32> {
    let prob = parse_problem(&args.p, args.r, &args.c)?;
    // 0 is trivially the r-th power of 0
    let is_residue = prob.c().is_zero() || roots::is_rth_residue(&prob);
    writeln!(out, "{is_residue}").map_err(|e| Error::Usage(format!("write failed: {e}")))?;
    Ok(if is_residue { 0 } else { Error::NonResidue.exit_code() })
}

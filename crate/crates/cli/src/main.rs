mod coloring;
mod commands;
mod error;
mod literal;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::CliError;

const THREADS_ENV: &str = "IDEALFORGE_THREADS";

#[derive(Debug, Parser)]
#[command(name = "idealforge", version, about = "Finite-scale workbench for Ramsey-type ideals on the naturals")]
struct Cli {
    #[command(flatten)]
    opts: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
struct GlobalOpts {
    /// Scale window; also the domain of builtin colorings when given.
    #[arg(long, global = true)]
    window: Option<u64>,
    #[arg(long, global = true)]
    ap_len: Option<usize>,
    #[arg(long, global = true)]
    clique_size: Option<usize>,
    #[arg(long, global = true)]
    fs_size: Option<usize>,
    /// Reciprocal-sum threshold, as `p/q` or an integer.
    #[arg(long, global = true)]
    tau: Option<String>,
    #[arg(long, global = true)]
    nmax: Option<usize>,
    #[arg(long, global = true)]
    budget_max_element: Option<u64>,
    #[arg(long, global = true)]
    candidate_cap: Option<usize>,
    /// Seed for `random:<max>` colorings.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the report here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Positivity proxies and their witnesses.
    Oracle {
        #[arg(long)]
        ideal: String,
        /// Set literal for VDW, HINDMAN, SUMMABLE and FIN.
        #[arg(long)]
        set: Option<String>,
        /// Edge literal `i-j ...` for RAMSEY.
        #[arg(long)]
        edges: Option<String>,
        /// Vertex count for RAMSEY (defaults to one past the largest vertex).
        #[arg(long)]
        vertices: Option<u64>,
        /// Grid literal `column:index ...` for FIN2.
        #[arg(long)]
        grid: Option<String>,
        /// Also look for a subset of this size that avoids the proxy.
        #[arg(long)]
        tall: Option<usize>,
    },
    /// Finite sums and sparse bases.
    Fs {
        #[arg(long, value_enum)]
        op: FsOp,
        #[arg(long)]
        set: Option<String>,
        #[arg(long)]
        pool: Option<String>,
        #[arg(long)]
        x: Option<u64>,
        #[arg(long)]
        y: Option<u64>,
        #[arg(long)]
        k: Option<usize>,
    },
    /// Canonical-case classifiers.
    Canonize {
        #[arg(long, value_enum)]
        op: CanonOp,
        #[arg(long)]
        phi: String,
        /// Subset `T` for classify-pairs.
        #[arg(long)]
        set: Option<String>,
        /// Block basis for classify-fs, or the pool for find-block-basis.
        #[arg(long)]
        basis: Option<String>,
        #[arg(long)]
        m: Option<usize>,
    },
    /// Replayable adversary strategies.
    Adversary {
        #[arg(long, value_enum)]
        strategy: StrategyArg,
        #[arg(long)]
        phi: String,
        /// Canonical case; classified from the input when omitted.
        #[arg(long)]
        case: Option<String>,
        /// `T` for r-summable.
        #[arg(long)]
        set: Option<String>,
        /// Block basis `C` for h-summable, sparse basis `D` for r-hindman.
        #[arg(long)]
        basis: Option<String>,
        /// For r-hindman: replay the closing argument against this `C`.
        #[arg(long)]
        replay: Option<String>,
    },
    /// Bounded search for a reduction between finite truncations.
    Search {
        #[arg(long)]
        src_ideal: String,
        /// `segment:a..b`, `pairs:n`, `grid:CxR` or `fs:<set literal>`.
        #[arg(long)]
        src_ground: String,
        #[arg(long)]
        dst_ideal: String,
        #[arg(long)]
        dst_ground: String,
        /// Node budget per top-level branch.
        #[arg(long)]
        node_limit: Option<u64>,
    },
    /// Checkers for supplied maps, bundles and reports.
    Verify {
        #[arg(long, value_enum)]
        kind: VerifyKind,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        phi: Option<String>,
        /// Table `y z0 z1` for rnh bundles.
        #[arg(long)]
        gamma: Option<String>,
        #[arg(long)]
        basis: Option<String>,
        #[arg(long)]
        set: Option<String>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FsOp {
    Fs,
    IsSparse,
    Alpha,
    VerySparse,
    VerySparseSubset,
    FindFsSubset,
    ConflictSet,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CanonOp {
    ClassifyPairs,
    FindSubset,
    ClassifyFs,
    FindBlockBasis,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum StrategyArg {
    WSummable,
    HSummable,
    RSummable,
    RHindman,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum VerifyKind {
    Reduction,
    Transcript,
    Hnr,
    Rnh,
    Replay,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Oracle { .. } => "oracle",
            Command::Fs { .. } => "fs",
            Command::Canonize { .. } => "canonize",
            Command::Adversary { .. } => "adversary",
            Command::Search { .. } => "search",
            Command::Verify { .. } => "verify",
        }
    }
}

#[derive(Serialize)]
struct Header {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    threads: usize,
}

#[derive(Serialize)]
struct Envelope {
    header: Header,
    body: Value,
}

/// What a command produced: the report body and whether some construction
/// ran out of budget.
pub struct Outcome {
    pub body: Value,
    pub exhausted: bool,
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got '{raw}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(format!("cannot size the thread pool: {e}")))
}

fn error_body(e: &CliError) -> Value {
    let status = if e.is_exhaustion() { "exhausted" } else { "error" };
    json!({ "status": status, "error": { "code": e.code(), "message": e.to_string() } })
}

fn emit(envelope: &Envelope, output: Option<&PathBuf>) -> std::io::Result<()> {
    let mut text = serde_json::to_string_pretty(envelope).expect("reports serialize");
    text.push('\n');
    match output {
        Some(path) => std::fs::write(path, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let command = cli.command.name();
    let result = configure_threads().and_then(|()| commands::run(&cli.opts, &cli.command));
    let (body, code) = match result {
        Ok(Outcome { body, exhausted }) => (body, if exhausted { 2 } else { 0 }),
        Err(e) => {
            let code = if e.is_exhaustion() { 2 } else { 1 };
            (error_body(&e), code)
        }
    };
    let envelope = Envelope {
        header: Header {
            tool: "idealforge",
            version: env!("CARGO_PKG_VERSION"),
            command,
            threads: rayon::current_num_threads(),
        },
        body,
    };
    if let Err(e) = emit(&envelope, cli.opts.output.as_ref()) {
        eprintln!("idealforge: cannot write report: {e}");
        return ExitCode::from(1);
    }
    ExitCode::from(code)
}

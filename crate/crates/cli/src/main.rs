//! `fnef`: F-nef checks, certified cone containment, proof replay and the
//! Mori pipeline from the command line.
//!
//! Exit codes: 0 success, 1 a negative verdict (counterexample, failing
//! step, non-F-nef divisor), 2 malformed input or usage.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

/// Caps the worker threads used for per-target and per-setup parallelism.
const THREADS_VAR: &str = "FNEF_THREADS";

#[derive(Parser)]
#[command(name = "fnef", version, about = "Exact F-nef and effectivity checks on M̄_{0,n}")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tests a divisor file against every F-curve.
    FnefCheck {
        file: PathBuf,
    },
    /// Pulls a divisor back along the attaching map that keeps the points A.
    Pullback {
        #[arg(long = "A", value_delimiter = ',', required = true)]
        kept: Vec<u32>,
        /// Label of the node on the reduced space; must not be a point of the divisor.
        #[arg(long)]
        q: u32,
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Certifies that every invariant F-nef divisor is effective.
    Verify {
        #[command(flatten)]
        range: Range,
        /// Report file; without it the report goes to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Replays the induction proof and checks every derivation.
    Replay {
        #[command(flatten)]
        range: Range,
        #[arg(long)]
        emit_script: Option<PathBuf>,
        /// Replays this script instead of the built-in one.
        #[arg(long, conflicts_with = "all")]
        script: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Runs the genus-zero checks behind the Mori cone statement.
    Mori {
        #[arg(long, required_unless_present = "all")]
        g: Option<u32>,
        #[arg(long, required_unless_present = "all")]
        n: Option<u32>,
        /// Every supported (g, n).
        #[arg(long, conflicts_with_all = ["g", "n"])]
        all: bool,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Writes the symmetrized inequality system as JSON and as H-representation text.
    ExportSystem {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        m: u32,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
}

#[derive(Args)]
struct Range {
    #[arg(long, required_unless_present = "all")]
    n: Option<u32>,
    #[arg(long, required_unless_present = "all")]
    m: Option<u32>,
    /// Every (n, m) with 4 <= n <= NMAX and n-3 <= m <= n.
    #[arg(long, conflicts_with_all = ["n", "m"], requires = "nmax")]
    all: bool,
    #[arg(long)]
    nmax: Option<u32>,
}

fn main() -> ExitCode {
    // Die quietly on a closed pipe (`fnef verify ... | head`) instead of panicking.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    if let Err(message) = configure_threads() {
        eprintln!("error: {message}");
        return ExitCode::from(2);
    }
    let result = match cli.command {
        Command::FnefCheck { file } => commands::fnef_check(&file),
        Command::Pullback { kept, q, file, out } => commands::pullback(&kept, q, &file, out.as_deref()),
        Command::Verify { range, out } => commands::resolve(range).and_then(|r| commands::verify(r, out.as_deref())),
        Command::Replay {
            range,
            emit_script,
            script,
            report,
        } => commands::resolve(range).and_then(|r| {
            commands::replay(r, emit_script.as_deref(), script.as_deref(), report.as_deref())
        }),
        Command::Mori { g, n, all, report } => commands::mori(g.zip(n), all, report.as_deref()),
        Command::ExportSystem { n, m, out_dir } => commands::export_system(n, m, &out_dir),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}

fn configure_threads() -> Result<(), String> {
    let Ok(value) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let threads: usize = value
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| format!("{THREADS_VAR}={value:?} is not a positive integer"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| e.to_string())
}

impl From<Range> for commands::RangeArgs {
    fn from(r: Range) -> Self {
        commands::RangeArgs {
            single: r.n.zip(r.m),
            nmax: r.all.then_some(r.nmax).flatten(),
        }
    }
}

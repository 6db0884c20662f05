//! `cvtx`: command-line front-end for the CVT/XOR library.
//!
//! Every successful command prints exactly one report (JSON by default).
//! Exit codes: 0 success, 2 usage or parse error, 3 invariant violation.

mod commands;
mod input;
mod report;

use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

/// Caps the rayon pool used by property campaigns and tree simulation.
pub const THREADS_ENV: &str = "CVTX_THREADS";

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn usage(message: String) -> Self {
        CliError { code: 2, message }
    }
}

impl From<cvtx_core::Error> for CliError {
    fn from(e: cvtx_core::Error) -> Self {
        let code = match e {
            cvtx_core::Error::InvariantViolation(_) => 3,
            _ => 2,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Parser)]
#[command(name = "cvtx", version, about = "Carry value transformation and generalized XOR in any base")]
pub struct Cli {
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Op {
    Cvt,
    Xor,
    Both,
    Ivt,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Multi-number CVT / XOR, or a rule-table IVT.
    Transform {
        /// Decimal naturals or base-prefixed digit strings such as 3:0122.
        #[arg(required = true)]
        numbers: Vec<String>,
        #[arg(long)]
        base: Option<u32>,
        #[arg(long, value_enum, default_value_t = Op::Both)]
        op: Op,
        /// Rule index j for --op ivt.
        #[arg(long)]
        rule: Option<String>,
        /// Rule arity for --op ivt (defaults to the operand count).
        #[arg(long)]
        arity: Option<usize>,
        /// Minimum digit width for printed operands and results.
        #[arg(long)]
        width: Option<usize>,
    },
    /// Sum operands through the CVT-XOR recurrence.
    Add {
        #[arg(required = true)]
        numbers: Vec<String>,
        #[arg(long)]
        base: Option<u32>,
        /// Include every (CVT, XOR) iteration.
        #[arg(long)]
        trace: bool,
    },
    /// Adjudicate the CVT/XOR laws over a trial campaign.
    Props {
        #[arg(long, default_value_t = 2)]
        base: u32,
        /// Comma-separated ids (P1,P1g,P2a,...), P2/P6 for both parts, or all.
        #[arg(long, default_value = "all")]
        properties: String,
        /// A count, `exhaustive`, or `search[:N]`.
        #[arg(long, default_value = "10000")]
        trials: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Operand width in base digits.
        #[arg(long, default_value_t = 4)]
        width: u32,
        /// Operands per list.
        #[arg(long, default_value_t = 4)]
        k: usize,
        #[arg(long, default_value_t = cvtx_core::proplab::DEFAULT_MAX_COUNTEREXAMPLES)]
        max_counterexamples: usize,
        /// Explicit trial: operand list (scaled / concatenation laws).
        #[arg(long)]
        xs: Option<String>,
        /// Explicit trial: second operand list (concatenation laws).
        #[arg(long)]
        ys: Option<String>,
        /// Explicit trial: repeated operand (identical / power laws).
        #[arg(long)]
        x: Option<String>,
        #[arg(long)]
        copies: Option<usize>,
        #[arg(long)]
        exponent: Option<u32>,
        /// Explicit trial: scalar is base^shift.
        #[arg(long)]
        shift: Option<u32>,
    },
    /// Simulate the K-input CAM adder tree.
    Cam {
        /// Leaf count, a power of two.
        #[arg(long)]
        k: usize,
        /// Input width in bits.
        #[arg(long)]
        n: usize,
        inputs: Vec<String>,
        /// Draw the inputs from --seed instead.
        #[arg(long)]
        random: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Dump every (unit, cycle) register pair.
        #[arg(long)]
        trace: bool,
    },
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::usage(format!("{THREADS_ENV}={raw:?}: expected a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::usage(format!("{THREADS_ENV}: {e}")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let echo: Vec<String> = std::env::args().skip(1).collect();
    let result = configure_threads().and_then(|()| commands::run(&cli, &echo.join(" ")));
    match result {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("cvtx: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

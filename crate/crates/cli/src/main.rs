//! `stabkit` command-line front end.
//!
//! Exit codes: 0 success, 2 usage or input error, 3 a post-check or
//! cross-check failed, 1 anything else (such as an enumeration limit).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod commands;

#[derive(Parser)]
#[command(name = "stabkit", version, about = "Exact degenerate decoding and weight-enumerator extraction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum DecodeMode {
    Dqmld,
    Qmld,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ReductionMode {
    Chain,
    SingleInstance,
}

#[derive(Subcommand)]
enum Command {
    /// Recover the weight enumerator of a classical code from decoder answers.
    WeExtract {
        /// Generator matrix, one row of 0/1 per line.
        #[arg(long)]
        code: PathBuf,
        /// Write the query transcript as JSON.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "chain")]
        mode: ReductionMode,
        /// Compare against brute force; exit 3 on mismatch.
        #[arg(long)]
        verify: bool,
        /// Perturb crossing points with this seed (robustness experiments).
        #[arg(long, requires = "perturb_scale")]
        perturb_seed: Option<u64>,
        /// Relative perturbation scale, `a/b`.
        #[arg(long, requires = "perturb_seed")]
        perturb_scale: Option<String>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Weight enumerator of a classical code by listing codewords.
    WeBrute {
        #[arg(long)]
        code: PathBuf,
        /// Also print the enumerator of the coset `C + g` for this word.
        #[arg(long)]
        coset: Option<String>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Decode one syndrome.
    Decode {
        /// Stabilizer code file: `n k` header, then n − k Pauli strings.
        #[arg(long)]
        code: PathBuf,
        /// `xz:p=a/b`, `depol:p=a/b`, or a path to a JSON channel file.
        #[arg(long)]
        channel: String,
        /// Syndrome bits, one per generator, e.g. `10`.
        #[arg(long)]
        syndrome: String,
        #[arg(long, value_enum, default_value = "dqmld")]
        mode: DecodeMode,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Coset weight distribution `A_0..A_2n` of one syndrome and class.
    Enumerate {
        #[arg(long)]
        code: PathBuf,
        /// Defaults to the zero syndrome.
        #[arg(long)]
        syndrome: Option<String>,
        /// Logical class label such as `I`, `Z`, `XI`; defaults to trivial.
        #[arg(long = "class")]
        class: Option<String>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Count syndromes where QMLD and DQMLD name different classes.
    Compare {
        /// Stabilizer code file; omit when using --two-class.
        #[arg(long, conflicts_with = "two_class")]
        code: Option<PathBuf>,
        /// Engineered two-class code `M,W`.
        #[arg(long)]
        two_class: Option<String>,
        /// Comma-separated error rates `a/b`, each in (0, 1).
        #[arg(long)]
        p: String,
        /// Channel family for --code: `xz` or `depol`.
        #[arg(long, default_value = "xz")]
        channel: String,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Check the Shor-lattice closed forms against brute force.
    ShorValidate {
        #[arg(long)]
        n1: usize,
        #[arg(long)]
        n2: usize,
        #[arg(long)]
        p: String,
        /// Shift of the reference chain; all values 0..=n2 when omitted.
        #[arg(long)]
        ell: Option<usize>,
        /// Also evaluate the leakage bound.
        #[arg(long)]
        leakage: bool,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Randomized consistency checks of the decoder on small codes.
    Check {
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        /// Largest number of physical qubits drawn.
        #[arg(long, default_value_t = 8)]
        max_n: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}

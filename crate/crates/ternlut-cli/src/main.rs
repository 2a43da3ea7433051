//! Command-line front end for the ternlut simulator, cost model, and DSE
//! toolkit.
//!
//! Exit codes: 0 success, 1 verification failure (a `--check` or compare
//! found a mismatch), 2 usage/config/I-O errors.

mod ops;
mod support;

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use ternlut::error::Error;

#[derive(Parser)]
#[command(name = "ternlut", version, about = "LUT-based ternary GEMV simulator, cost model, and design-space explorer")]
struct Cli {
    /// Seed for randomized fixtures.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Encode a ternary matrix (text or TLUT input) into the bit-packed TLUT stream.
    Encode {
        /// Matrix file: one row per line, symbols -0+.
        #[arg(long)]
        input: PathBuf,
        /// Group size.
        #[arg(long)]
        mu: usize,
        /// Output stream file.
        #[arg(long)]
        output: PathBuf,
    },
    /// Decode a TLUT stream back to canonical matrix text.
    Decode {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
    },
    /// Run a GEMV on the simulated core and write the outputs as CSV.
    Simulate {
        /// Weights: matrix text or TLUT stream (sniffed by magic).
        #[arg(long)]
        weights: PathBuf,
        /// Activations: decimal CSV, or raw little-endian binary for `.bin`.
        #[arg(long)]
        activations: PathBuf,
        #[arg(long)]
        l: usize,
        #[arg(long)]
        mu: usize,
        #[arg(long)]
        k: usize,
        /// Activation type: int8 or fp16.
        #[arg(long)]
        act: String,
        /// Output CSV (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Verify against the architecture-order reference; mismatches exit 1.
        #[arg(long)]
        check: bool,
        /// Charge the build latency once per input tile instead of once total.
        #[arg(long)]
        no_overlap: bool,
    },
    /// Area-model breakdown rows as CSV.
    Cost {
        /// Concrete LUT count (with --mu and --k).
        #[arg(long)]
        l: Option<usize>,
        /// Group size, or a list/range (e.g. 1:5) in --n/--m form.
        #[arg(long, default_value = "1:5")]
        mu: String,
        #[arg(long)]
        k: Option<usize>,
        /// Tile input width for the smooth-model form (non-integer L allowed).
        #[arg(long)]
        n: Option<f64>,
        /// Tile output width for the smooth-model form.
        #[arg(long)]
        m: Option<f64>,
        #[arg(long)]
        act: String,
        /// Coefficient file path or builtin name (coeffs-int8, coeffs-fp16).
        #[arg(long)]
        coeffs: Option<String>,
        /// Use realized DAG build counts instead of the fitted curve.
        #[arg(long)]
        exact: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit the structural netlist for one configuration.
    Netlist {
        #[arg(long)]
        l: usize,
        #[arg(long)]
        mu: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        act: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep the design space and emit one CSV row per design point.
    Dse {
        /// TOML sweep spec file; overrides the individual range flags.
        #[arg(long)]
        spec: Option<PathBuf>,
        /// L values (list/range syntax, e.g. 1:96 or 4,8,16).
        #[arg(long)]
        l: Option<String>,
        #[arg(long)]
        mu: Option<String>,
        #[arg(long)]
        k: Option<String>,
        #[arg(long)]
        act: Option<String>,
        /// Keep only square tiles (L*mu == K); logs skipped (size, mu) combos.
        #[arg(long)]
        square: bool,
        /// Keep only tiles within the throughput band target*(1 ± eps).
        #[arg(long)]
        target: Option<f64>,
        #[arg(long, default_value_t = 0.02)]
        eps: f64,
        #[arg(long)]
        exact: bool,
        #[arg(long)]
        coeffs: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Scan rectangular tile geometries at a fixed total tile size.
    Geometry {
        /// Total tile size n*m; must be a perfect square.
        #[arg(long)]
        size: usize,
        #[arg(long)]
        act: String,
        #[arg(long)]
        coeffs: Option<String>,
        #[arg(long, default_value_t = 0.02)]
        eps: f64,
        /// Group sizes to scan.
        #[arg(long, default_value = "1:5")]
        mu: String,
        #[arg(long)]
        exact: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Area efficiency of square tiles at the optimal group size.
    Efficiency {
        #[arg(long, default_value = "8,32,64,96")]
        sizes: String,
        #[arg(long)]
        act: String,
        #[arg(long)]
        coeffs: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare published parameter sets against matched-throughput optima.
    Compare {
        /// Declarative TOML entries file; builtin entries when omitted.
        #[arg(long)]
        sota: Option<PathBuf>,
        #[arg(long)]
        coeffs: Option<String>,
        #[arg(long, default_value_t = 0.02)]
        eps: f64,
        #[arg(long)]
        exact: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate seeded random fixtures.
    Gen {
        #[command(subcommand)]
        what: GenWhat,
    },
}

#[derive(Subcommand)]
enum GenWhat {
    /// Random ternary matrix in canonical text form.
    Weights {
        #[arg(long)]
        rows: usize,
        #[arg(long)]
        cols: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Random activation vector.
    Acts {
        #[arg(long)]
        len: usize,
        #[arg(long)]
        act: String,
        /// csv or bin.
        #[arg(long, default_value = "csv")]
        format: String,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() {
    let cli = Cli::parse();
    let seed = cli.seed;
    let result = match cli.command {
        Command::Encode { input, mu, output } => ops::encode(&input, mu, &output, seed),
        Command::Decode { input, output } => ops::decode(&input, &output, seed),
        Command::Simulate { weights, activations, l, mu, k, act, out, check, no_overlap } => {
            ops::simulate(&weights, &activations, l, mu, k, &act, out.as_ref(), check, !no_overlap, seed)
        }
        Command::Cost { l, mu, k, n, m, act, coeffs, exact, out } => {
            ops::cost(l, &mu, k, n, m, &act, coeffs.as_deref(), exact, out.as_ref(), seed)
        }
        Command::Netlist { l, mu, k, act, out } => ops::netlist(l, mu, k, &act, out.as_ref(), seed),
        Command::Dse { spec, l, mu, k, act, square, target, eps, exact, coeffs, out } => ops::dse(
            spec.as_ref(),
            l.as_deref(),
            mu.as_deref(),
            k.as_deref(),
            act.as_deref(),
            square,
            target,
            eps,
            exact,
            coeffs.as_deref(),
            out.as_ref(),
            seed,
        ),
        Command::Geometry { size, act, coeffs, eps, mu, exact, out } => {
            ops::geometry(size, &act, coeffs.as_deref(), eps, &mu, exact, out.as_ref(), seed)
        }
        Command::Efficiency { sizes, act, coeffs, out } => {
            ops::efficiency(&sizes, &act, coeffs.as_deref(), out.as_ref(), seed)
        }
        Command::Compare { sota, coeffs, eps, exact, out } => {
            ops::compare(sota.as_ref(), coeffs.as_deref(), eps, exact, out.as_ref(), seed)
        }
        Command::Gen { what } => match what {
            GenWhat::Weights { rows, cols, out } => ops::gen_weights(rows, cols, &out, seed),
            GenWhat::Acts { len, act, format, out } => ops::gen_acts(len, &act, &format, &out, seed),
        },
    };
    if let Err(e) = result {
        eprintln!("error: {e}");
        let code = match e {
            Error::VerificationFailure(_) => 1,
            _ => 2,
        };
        std::process::exit(code);
    }
}

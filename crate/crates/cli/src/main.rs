use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;

#[derive(Parser, Debug)]
#[command(
    name = "bfcalc",
    version,
    about = "Stable cohomotopy tables and a Bauer-Furuta rule engine"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Cohomotopy groups.
    #[command(subcommand)]
    Group(GroupCmd),
    /// Hurewicz kernel/cokernel table for a range of n.
    Table {
        #[arg(long, default_value_t = 12)]
        n_max: i64,
        /// Evaluate on one thread.
        #[arg(long)]
        sequential: bool,
    },
    /// List catalog manifolds.
    Catalog,
    /// Create or inspect session files.
    #[command(subcommand)]
    Session(SessionCmd),
    /// Knowledge-base operations on a session file.
    Kb(KbArgs),
}

#[derive(Subcommand, Debug)]
enum GroupCmd {
    /// π^{2n-j}(CP^n).
    Cp {
        #[arg(long)]
        n: i64,
        #[arg(long)]
        j: i64,
        /// Also print the exact-sequence derivation (j in 1..=3).
        #[arg(long)]
        audit: bool,
    },
    /// π^m of a cell complex such as `S8,e10:eta`.
    Complex {
        #[arg(long)]
        cells: String,
        #[arg(long)]
        m: i64,
        #[arg(long)]
        audit: bool,
    },
    /// Kernel and cokernel of the Hurewicz map in degree 2n-j.
    Hurewicz {
        #[arg(long)]
        n: i64,
        #[arg(long)]
        j: i64,
    },
    /// Restriction π^{2n-j}(CP^n) → π^{2n-j}(CP^{n-s}).
    Restrict {
        #[arg(long)]
        n: i64,
        #[arg(long)]
        j: i64,
        #[arg(long)]
        s: i64,
    },
}

#[derive(Subcommand, Debug)]
enum SessionCmd {
    /// Write an empty session.
    Init { path: PathBuf },
    /// Print a summary of a session.
    Show { path: PathBuf },
}

#[derive(Args, Debug)]
struct KbArgs {
    /// Session file.
    #[arg(long, short)]
    session: PathBuf,
    #[command(subcommand)]
    op: KbCmd,
}

#[derive(Subcommand, Debug)]
pub(crate) enum KbCmd {
    /// Add a catalog manifold (with its seed facts).
    Add {
        name: String,
        /// Number of summands for mK3.
        #[arg(long)]
        m: Option<usize>,
    },
    /// Define a manifold from its intersection form, rows separated by `;`.
    Define {
        #[arg(long)]
        name: String,
        #[arg(long, default_value_t = 0)]
        b1: i64,
        #[arg(long, allow_hyphen_values = true)]
        form: String,
        #[arg(long)]
        symplectic: bool,
    },
    /// Record an external BF state and/or SW value for `NAME[c1]`.
    Assert {
        fact: String,
        #[arg(long)]
        bf: Option<String>,
        #[arg(long)]
        sw: Option<String>,
        #[arg(long, default_value = "user")]
        source: String,
    },
    /// Record a manifold flag such as `blowup-simple` or `cup-product-condition`.
    Flag {
        manifold: String,
        flag: String,
        #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
        value: bool,
    },
    /// Record a surface in a manifold.
    Surface {
        manifold: String,
        #[command(flatten)]
        surface: SurfaceArgs,
    },
    /// Declare `X # CP2bar` with coefficient 2r+1 on the new class.
    Blowup {
        fact: String,
        #[arg(long, allow_hyphen_values = true)]
        r: i64,
    },
    /// Declare a connected sum of structures.
    Sum {
        #[arg(required = true, num_args = 2..)]
        pieces: Vec<String>,
        #[arg(long)]
        name: Option<String>,
    },
    /// Declare a common complement between two structures.
    Complement { a: String, b: String },
    /// Run the rules to a fixed point and save.
    Infer {
        #[arg(long)]
        sequential: bool,
    },
    /// Report BF of a structure with its provenance chain.
    Query { fact: String },
    /// Condition (*) for a structure.
    Star { fact: String },
    /// BF dimension of a manifold.
    Dimension { manifold: String },
    /// Compare two gluing decompositions (comma-separated manifold names).
    CheckDecomposition {
        #[arg(long)]
        x: String,
        #[arg(long)]
        x_prime: String,
    },
    /// Test a class against a surface; records what follows.
    CheckAdjunction {
        manifold: String,
        #[arg(long, allow_hyphen_values = true)]
        k: String,
        #[command(flatten)]
        surface: SurfaceArgs,
    },
    /// Simple and homogeneous type flags.
    CheckType { manifold: String },
}

#[derive(Args, Debug)]
pub(crate) struct SurfaceArgs {
    /// Homology class, comma-separated, or `zero`.
    #[arg(long, allow_hyphen_values = true)]
    class: String,
    /// Genus of an embedded surface.
    #[arg(long)]
    genus: Option<i64>,
    /// Positive double points of an immersed sphere.
    #[arg(long)]
    positive: Option<i64>,
    #[arg(long, default_value_t = 0)]
    negative: i64,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() {
                commands::EXIT_USAGE
            } else {
                0
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    commands::run(cli)
}

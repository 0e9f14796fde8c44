mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "dsym", version, about = "Cylinders, saddle connections and Siegel-Veech constants of d-symmetric torus covers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct SurfaceArgs {
    /// Number of torus copies.
    #[arg(long)]
    d: u64,
    /// Twist "x,y": fractions p/q give exact mode, decimals floating mode.
    #[arg(long, allow_hyphen_values = true)]
    twist: String,
}

#[derive(Args, Debug, Clone)]
struct JsonArg {
    /// Emit the JSON report, to PATH or to stdout.
    #[arg(long, value_name = "PATH", num_args = 0..=1)]
    json: Option<Option<PathBuf>>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Normalized twist, degeneracy, genus, cone data and fiber cylinder.
    SurfaceInfo {
        #[command(flatten)]
        surface: SurfaceArgs,
        /// Require an exact twist.
        #[arg(long)]
        exact: bool,
        #[command(flatten)]
        out: JsonArg,
    },
    /// Cylinder decomposition in a direction.
    Decompose {
        #[command(flatten)]
        surface: SurfaceArgs,
        /// Direction "p,q".
        #[arg(long, allow_hyphen_values = true)]
        dir: String,
        #[arg(long, value_enum, default_value_t = Oracle::Formula)]
        oracle: Oracle,
        #[command(flatten)]
        out: JsonArg,
    },
    /// Exact constants.
    Constants {
        #[command(subcommand)]
        which: ConstantCmd,
    },
    /// Count cylinders or saddle connections up to each T.
    Count {
        #[arg(value_enum)]
        object: CountObject,
        #[command(flatten)]
        surface: SurfaceArgs,
        /// Ascending list of T values.
        #[arg(long = "T-list", value_delimiter = ',', required = true)]
        t_list: Vec<f64>,
        #[arg(long, env = "WORKERS")]
        workers: Option<usize>,
        /// Saddle filter: "all" or "m=K".
        #[arg(long, default_value = "all")]
        filter: String,
        #[arg(long, value_name = "PATH")]
        csv: Option<PathBuf>,
        #[command(flatten)]
        out: JsonArg,
    },
    /// Class-1 saddle constants of the order-n surfaces for d = 2 against their limit.
    Convergence {
        #[arg(long, default_value_t = 2)]
        d: u64,
        #[arg(long = "max-n", default_value_t = 40)]
        max_n: u64,
        #[arg(long, value_enum, default_value_t = Part::Lattice)]
        part: Part,
        #[command(flatten)]
        out: JsonArg,
    },
    /// Randomized agreement check of the decomposition formula and the tracer.
    Check {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        cases: u64,
        #[arg(long = "max-d", default_value_t = 6)]
        max_d: u64,
    },
}

#[derive(Subcommand, Debug)]
enum ConstantCmd {
    /// Cylinder constant of a generic surface.
    Generic {
        #[arg(long)]
        d: u64,
        #[command(flatten)]
        out: JsonArg,
    },
    /// Cylinder constant of the order-n torsion surfaces.
    Torsion {
        #[arg(long)]
        d: u64,
        #[arg(long)]
        n: u64,
        #[command(flatten)]
        out: JsonArg,
    },
    /// Saddle constant of the order-n surfaces.
    Saddle {
        #[arg(long, default_value_t = 1)]
        d: u64,
        #[arg(long)]
        n: u64,
        #[command(flatten)]
        out: JsonArg,
    },
    /// m-homologous saddle constants, generic or for the order-n orbit.
    Mhom {
        #[arg(long)]
        d: u64,
        #[arg(long)]
        m: u64,
        #[arg(long)]
        n: Option<u64>,
        #[arg(long, value_enum, default_value_t = Convention::All)]
        convention: Convention,
        #[command(flatten)]
        out: JsonArg,
    },
    /// Per-cylinder term restricted to the band a < t_v - i < b.
    Area {
        #[arg(long)]
        d: u64,
        #[arg(long)]
        i: u64,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long)]
        n: Option<u64>,
        #[command(flatten)]
        out: JsonArg,
    },
    /// Cusp count of the order-n orbit of the torus.
    Cusps {
        #[arg(long)]
        n: u64,
        #[command(flatten)]
        out: JsonArg,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Oracle {
    Formula,
    Trace,
    Both,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum CountObject {
    Cylinders,
    Saddles,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Convention {
    All,
    PerChain,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Part {
    Lattice,
    Shifted,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

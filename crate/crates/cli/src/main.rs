//! `pqmix` command-line interface.
//!
//! Exit codes: 0 success, 1 a mathematical finding (persistent inequality
//! violation or a solve that did not converge), 2 bad input.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pqmix::quadrature::{GridConfig, Scheme};

#[derive(Parser, Debug)]
#[command(name = "pqmix", version, about = "Dual curvature measures, mixed quermassintegrals and the discrete Minkowski problem")]
#[command(args_override_self = true)]
pub struct Cli {
    /// TOML file whose keys are used as default flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads (also QUERMASS_THREADS).
    #[arg(long, global = true, env = "QUERMASS_THREADS")]
    pub threads: Option<usize>,
    /// Omit the version/timestamp block so outputs are byte-reproducible.
    #[arg(long, global = true)]
    pub no_meta: bool,
    /// Write the JSON result here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Also write a CSV table (per-case slacks, convergence trace, ...).
    #[arg(long, global = true)]
    pub emit_csv: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GridArgs {
    /// Ambient dimension for bodies that do not fix one.
    #[arg(long, default_value_t = 2)]
    pub dimension: usize,
    #[arg(long, value_enum, default_value_t = SchemeArg::Auto)]
    pub scheme: SchemeArg,
    #[arg(long, default_value_t = 32)]
    pub resolution: usize,
    /// Seed for Monte Carlo grids and random cases.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl GridArgs {
    pub fn grid(&self) -> GridConfig {
        GridConfig { scheme: self.scheme.into(), resolution: self.resolution, seed: self.seed }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum SchemeArg {
    Auto,
    UniformAngle,
    ProductGauss,
    Mc,
    ConePartitioned,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Auto => Scheme::Auto,
            SchemeArg::UniformAngle => Scheme::UniformAngle,
            SchemeArg::ProductGauss => Scheme::ProductGauss,
            SchemeArg::Mc => Scheme::MonteCarlo,
            SchemeArg::ConePartitioned => Scheme::ConePartitioned,
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct Exponents {
    #[arg(long, allow_negative_numbers = true)]
    pub p: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub q: f64,
    /// Quermassintegral index, an integer in 0..n-1.
    #[arg(long, default_value_t = 0)]
    pub j: u32,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum EvalOp {
    Support,
    Radial,
    PolarCheck,
    Gauss,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate support/radial functions, the polar identity or the radial Gauss map.
    Eval {
        #[arg(long)]
        body: PathBuf,
        #[arg(long, value_enum)]
        op: EvalOp,
        /// JSON array of direction vectors.
        #[arg(long)]
        directions: PathBuf,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Atoms of the curvature measure of a polytope.
    Measure {
        #[arg(long)]
        body: PathBuf,
        /// Defaults to the unit ball.
        #[arg(long)]
        q_body: Option<PathBuf>,
        #[command(flatten)]
        exponents: Exponents,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Dual or (p,q)-mixed quermassintegrals.
    Quermass {
        #[arg(long)]
        body: PathBuf,
        /// With N the (p,q)-mixed quantity W̃_{p,q,j}(M,N,Q) is computed.
        #[arg(long)]
        n_body: Option<PathBuf>,
        #[arg(long)]
        q_body: Option<PathBuf>,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        p: f64,
        #[arg(long, allow_negative_numbers = true)]
        q: f64,
        /// Quermassintegral index, an integer in 0..n-1.
        #[arg(long, default_value_t = 0)]
        j: u32,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Randomized inequality campaign.
    CheckIneq {
        /// minkowski | monotonic | cyclic-first | cyclic-second (or 5.1 .. 5.4); repeatable.
        #[arg(long)]
        theorem: Vec<String>,
        #[arg(long, default_value_t = 100)]
        cases: usize,
        /// Origin-symmetric random polytopes.
        #[arg(long)]
        symmetric: bool,
        /// Write persistent counterexamples here, one JSON file each.
        #[arg(long)]
        dump_dir: Option<PathBuf>,
        /// Include every case report in the JSON output.
        #[arg(long)]
        full: bool,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Recover a polytope from a target measure.
    Solve {
        #[arg(long)]
        measure: PathBuf,
        #[command(flatten)]
        solve: SolveArgs,
    },
    /// Compute the measure of a polytope, solve for it and compare supports.
    RoundTrip {
        #[arg(long)]
        body: PathBuf,
        #[command(flatten)]
        solve: SolveArgs,
    },
    /// Write bundled example bodies and measures.
    Fixtures {
        #[arg(long, default_value = "fixtures")]
        dir: PathBuf,
    },
}

#[derive(Args, Debug, Clone)]
pub struct SolveArgs {
    #[arg(long)]
    pub q_body: Option<PathBuf>,
    #[command(flatten)]
    pub exponents: Exponents,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long, default_value_t = 5000)]
    pub max_iters: usize,
    #[arg(long, default_value_t = 1e-6)]
    pub verify_tol: f64,
    /// Initial body; the default is h ≡ 1.
    #[arg(long)]
    pub init_body: Option<PathBuf>,
    /// Accept measures that are not even.
    #[arg(long)]
    pub allow_odd: bool,
    /// Accept p or q outside (0, ∞).
    #[arg(long)]
    pub unsafe_params: bool,
    #[command(flatten)]
    pub grid: GridArgs,
}

fn main() -> ExitCode {
    let args = match config::expand(std::env::args_os().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match commands::run(&cli) {
        Ok(commands::Outcome::Ok) => ExitCode::SUCCESS,
        Ok(commands::Outcome::Finding(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

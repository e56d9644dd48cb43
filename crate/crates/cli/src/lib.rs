//! Command-line front end for the `wdvv-core` checks.
//!
//! Exit codes: `0` when every check passes, `1` when a mathematical check
//! fails, `2` for any input problem.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

pub mod commands;
pub mod problem;
pub mod report;

pub use problem::{load_problem, parse_problem, InputError, Problem};
pub use report::{Check, Report};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "wdvv", version, about = "Exact checks for associativity equations and related structures")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Problem file (JSON).
    pub problem: PathBuf,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Largest residual (in terms) printed in full.
    #[arg(long, default_value_t = 200)]
    pub max_terms: usize,
    /// Include wall-clock timings (makes reports non-reproducible).
    #[arg(long)]
    pub timings: bool,
}

/// Scale `c` of `μ = η/c` used when a potential is reduced to a ψ-system.
#[derive(Args, Debug, Clone)]
pub struct Reduction {
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run an exact verification.
    Verify {
        #[command(subcommand)]
        check: VerifyCommand,
    },
    /// Reduce a potential to the ψ-system `ψ_α = ∂_α Φ`, `μ = η/c`.
    Reduce {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        reduction: Reduction,
    },
    /// Build the bi-Hamiltonian hierarchy of a ψ-system.
    Hierarchy {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        reduction: Reduction,
        #[arg(long, default_value_t = 2)]
        depth: usize,
    },
    /// Integrate the frame equations on a grid and check the fundamental forms.
    Realize {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        reduction: Reduction,
        #[command(flatten)]
        numeric: RealizeArgs,
        /// Grid origin, comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        origin: Option<Vec<f64>>,
        #[arg(long)]
        spacing: Option<f64>,
        /// Nodes per axis.
        #[arg(long)]
        count: Option<usize>,
        /// Finite-difference offset of the second-form check.
        #[arg(long)]
        delta: Option<f64>,
        /// Write the sampled frames as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Integrate around a closed square and report the frame mismatch.
    LoopTest {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        reduction: Reduction,
        #[command(flatten)]
        numeric: RealizeArgs,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        corner: Option<Vec<f64>>,
        /// Two one-based coordinate indices, e.g. `2,3`.
        #[arg(long, value_delimiter = ',')]
        plane: Option<Vec<usize>>,
        #[arg(long)]
        side: Option<f64>,
    },
    /// Simulate a hydrodynamic flow and monitor conserved functionals.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// One-based index of the structural flow.
        #[arg(long, default_value_t = 1)]
        flow: usize,
        #[arg(long)]
        t_end: Option<f64>,
        #[arg(long)]
        dt: Option<f64>,
        /// Grid points.
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        amplitude: Option<f64>,
        /// Largest accepted relative drift.
        #[arg(long, default_value_t = 1e-4)]
        tol: f64,
        /// Steps between recorded states.
        #[arg(long, default_value_t = 10)]
        record_every: usize,
        /// Write the recorded trajectory as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Args, Debug, Clone)]
pub struct RealizeArgs {
    /// Base point, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub base: Option<Vec<f64>>,
    /// RK4 step length along paths.
    #[arg(long)]
    pub step: Option<f64>,
    /// Tolerance of the numeric checks.
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Subcommand, Debug)]
pub enum VerifyCommand {
    /// Associativity (WDVV) residual of a potential.
    Wdvv(Common),
    /// Frobenius algebra axioms and unit of a potential.
    Frobenius(Common),
    /// Gauss, Ricci and Codazzi equations of a ψ-system.
    Submanifold {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        reduction: Reduction,
    },
    /// Zero curvature of the linear problem, with symbolic spectral parameters.
    Lax {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        reduction: Reduction,
    },
    /// Hamiltonian coefficient relations of the nonlocal operator.
    Hamop {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        reduction: Reduction,
    },
    /// Compatibility with the constant-metric operator.
    Pencil {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        reduction: Reduction,
    },
    /// Locality of the Hamiltonian system generated by a density.
    Locality {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        reduction: Reduction,
        /// Density `h` as an expression.
        #[arg(long)]
        h: String,
    },
    /// Involution of the integrals built from ψ or from the potential.
    Involution {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        reduction: Reduction,
    },
    /// Equations making `∫Φ dx` commute with the integrals `∫∂_nΦ dx`.
    PotentialInvolution(Common),
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Verify { check } => match check {
                VerifyCommand::Wdvv(c) | VerifyCommand::Frobenius(c) | VerifyCommand::PotentialInvolution(c) => c,
                VerifyCommand::Submanifold { common, .. }
                | VerifyCommand::Lax { common, .. }
                | VerifyCommand::Hamop { common, .. }
                | VerifyCommand::Pencil { common, .. }
                | VerifyCommand::Locality { common, .. }
                | VerifyCommand::Involution { common, .. } => common,
            },
            Command::Reduce { common, .. }
            | Command::Hierarchy { common, .. }
            | Command::Realize { common, .. }
            | Command::LoopTest { common, .. }
            | Command::Simulate { common, .. } => common,
        }
    }
}

/// What a command produced.
pub enum Outcome {
    Report(Report),
    /// A problem file (from `reduce`); always a success.
    Document(String),
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit code. Output goes to `stdout`, diagnostics to `stderr`.
pub fn run_cli<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_PASS };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    let common = cli.command.common().clone();
    let start = Instant::now();
    let outcome = load_problem(&common.problem).and_then(|p| commands::run(&cli.command, &p));
    let (text, code) = match outcome {
        Ok(Outcome::Report(mut r)) => {
            if common.timings {
                r.timings_ms = Some(start.elapsed().as_secs_f64() * 1e3);
            }
            let code = if r.passes() { EXIT_PASS } else { EXIT_FAIL };
            (r.render(), code)
        }
        Ok(Outcome::Document(d)) => (d, EXIT_PASS),
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_INPUT;
        }
    };
    match &common.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                let _ = writeln!(stderr, "error: cannot write {}: {e}", path.display());
                return EXIT_INPUT;
            }
        }
        None => {
            let _ = stdout.write_all(text.as_bytes());
        }
    }
    code
}

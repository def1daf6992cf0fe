use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod commands;

use commands::Failure;

#[derive(Parser, Debug)]
#[command(
    name = "lie-prelim",
    version,
    about = "Lie symmetries, equivalence algebras and preliminary group classification of u_t = f(x,u) u_x^2 + g(x,u) u_xx"
)]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Seed for the randomized identity oracle (LIE_PRELIM_SEED takes precedence).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Relative tolerance of the identity oracle.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Latex,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Determining equations of Lie symmetries, or the residuals of a given operator.
    Derive {
        /// Class file, or the name of a built-in class (genDiff, heat, linear).
        #[arg(long)]
        class: String,
        /// `Q=<field>` on (t, x, u); unknown coefficient functions give the
        /// determining system of that ansatz, a concrete field its residuals.
        #[arg(long)]
        ansatz: Option<String>,
        /// Extra function declarations `name:arg,arg`.
        #[arg(long = "fn")]
        functions: Vec<String>,
    },
    /// Check that a field on (t, x, u, elements) generates equivalence transformations.
    CheckEquiv {
        #[arg(long)]
        class: String,
        #[arg(long)]
        field: String,
        #[arg(long = "fn")]
        functions: Vec<String>,
    },
    /// Image of (f, g) under an equivalence transformation
    /// t~ = a1 t + a0, x~ = b1 x + b0, u~ = U(u).
    Transform {
        #[arg(long)]
        f: String,
        #[arg(long)]
        g: String,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        a0: String,
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        a1: String,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        b0: String,
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        b1: String,
        /// U(u): affine, exp(k*u), u^p or ln(u).
        #[arg(long = "u-map", default_value = "u", allow_hyphen_values = true)]
        u_map: String,
    },
    /// Lie bracket of two vector fields.
    Commutator {
        v: String,
        w: String,
        /// Comma-separated coordinates.
        #[arg(long, default_value = "t,x,u")]
        coords: String,
        /// Semicolon-separated fields; report whether the bracket lies in their span.
        #[arg(long)]
        span: Option<String>,
        #[arg(long = "fn")]
        functions: Vec<String>,
    },
    /// Ad(exp(eps v)) w for elements of the equivalence algebra.
    Adjoint {
        v: String,
        w: String,
        #[arg(long, default_value = "eps")]
        eps: String,
        #[arg(long, default_value_t = 12)]
        order: usize,
    },
    /// Canonical form and appropriateness of a subalgebra.
    Classify {
        /// JSON file `{"basis": [...], "f": ..., "g": ...}`.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Basis elements, e.g. `Dx + 3*Dt + 5*dx`.
        basis: Vec<String>,
        /// Candidate solution of the invariant surface conditions.
        #[arg(long, requires = "g")]
        f: Option<String>,
        #[arg(long, requires = "f")]
        g: Option<String>,
    },
    /// Verify the classification tables.
    Verify {
        #[arg(long, default_value = "all")]
        table: String,
        /// Check the tables as printed and evaluate the remarks.
        #[arg(long)]
        uncorrected: bool,
    },
    /// Run the whole pipeline on the generalized diffusion class.
    Report,
}

fn seed(cli: Option<u64>) -> Result<u64, Failure> {
    match std::env::var("LIE_PRELIM_SEED") {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| Failure::Input(format!("LIE_PRELIM_SEED: `{s}` is not an integer"))),
        Err(_) => Ok(cli.unwrap_or(lieprelim::expr::DEFAULT_SEED)),
    }
}

fn run(cli: Cli) -> Result<commands::Outcome, Failure> {
    let tol = cli.tol.unwrap_or(lieprelim::expr::DEFAULT_TOL);
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Failure::Input(format!("tolerance {tol} must be positive")));
    }
    lieprelim::expr::set_oracle_defaults(seed(cli.seed)?, tol);
    let fmt = cli.format;
    match cli.command {
        Command::Derive {
            class,
            ansatz,
            functions,
        } => commands::derive(fmt, &class, ansatz.as_deref(), &functions),
        Command::CheckEquiv {
            class,
            field,
            functions,
        } => commands::check_equiv(fmt, &class, &field, &functions),
        Command::Transform {
            f,
            g,
            a0,
            a1,
            b0,
            b1,
            u_map,
        } => commands::transform(fmt, &f, &g, [&a0, &a1, &b0, &b1], &u_map),
        Command::Commutator {
            v,
            w,
            coords,
            span,
            functions,
        } => commands::commutator(fmt, &v, &w, &coords, span.as_deref(), &functions),
        Command::Adjoint { v, w, eps, order } => commands::adjoint(fmt, &v, &w, &eps, order),
        Command::Classify { input, basis, f, g } => {
            let input = match input {
                Some(path) => Some(commands::ClassifyInput::load(Path::new(&path))?),
                None => None,
            };
            commands::classify(fmt, input, basis, f, g)
        }
        Command::Verify { table, uncorrected } => commands::verify(fmt, &table, uncorrected),
        Command::Report => commands::report(fmt),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            print!("{}", out.text);
            ExitCode::from(if out.pass { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}

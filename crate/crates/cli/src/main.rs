mod commands;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

/// Invariant circles and isochrons of cylinder maps.
#[derive(Parser, Debug)]
#[command(name = "circlefol", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct ModelArgs {
    /// Registered model name (linear, skew, forced_oscillator).
    #[arg(long)]
    pub model: Option<String>,
    /// Parameter override `name=value`; repeatable.
    #[arg(long = "param", value_name = "NAME=VALUE")]
    pub params: Vec<String>,
}

#[derive(Args, Debug, Clone)]
pub struct SolverArgs {
    /// Fourier modes N.
    #[arg(long, default_value_t = 64)]
    pub ntheta: usize,
    /// Taylor order L in s.
    #[arg(long, default_value_t = 8)]
    pub order: usize,
    /// Radius of the s-disk used in the norms.
    #[arg(long, default_value_t = 0.3)]
    pub delta: f64,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    #[arg(long, default_value_t = 20)]
    pub max_iters: usize,
    /// Smoothing schedule: nash_moser, fixed or none.
    #[arg(long, default_value = "nash_moser")]
    pub schedule: String,
    /// Exponent scale of the Nash-Moser schedule (default puts t_1 at N/4).
    #[arg(long)]
    pub beta: Option<f64>,
    /// Warm start from a stored solution instead of the orbit bootstrap.
    #[arg(long)]
    pub init: Option<std::path::PathBuf>,
    /// Residual threshold for the report's residual_small flag.
    #[arg(long, default_value_t = 1e-8)]
    pub residual_threshold: f64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve the invariance equation and write the solution file.
    Solve {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long)]
        out: std::path::PathBuf,
    },
    /// Continue a solution along one parameter.
    Continue {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        solver: SolverArgs,
        /// `param:start:end:step`.
        #[arg(long)]
        sweep: String,
        #[arg(long)]
        outdir: std::path::PathBuf,
    },
    /// Recompute the condition report of a stored solution.
    Verify {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        solution: std::path::PathBuf,
        #[arg(long, default_value_t = 1e-8)]
        residual_threshold: f64,
    },
    /// Solve phi = l*(phi o a) + eta for coefficient files.
    Cohom {
        /// Twist l: JSON array of [re, im] Fourier coefficients c_0..c_N.
        #[arg(long)]
        l: std::path::PathBuf,
        /// Periodic part of the lift of a, same format.
        #[arg(long)]
        a: std::path::PathBuf,
        /// Forcing eta, same format.
        #[arg(long)]
        eta: std::path::PathBuf,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Sample the leaves W(theta, s) of a stored solution.
    Export {
        #[arg(long)]
        solution: std::path::PathBuf,
        /// Number of theta values.
        #[arg(long, default_value_t = 256)]
        grid: usize,
        #[arg(long, default_value_t = 0.3)]
        smax: f64,
        /// Number of s values in [-smax, smax].
        #[arg(long, default_value_t = 11)]
        ns: usize,
        #[arg(long, default_value = "csv")]
        format: String,
        #[arg(long)]
        out: std::path::PathBuf,
    },
}

fn configure_threads() {
    if let Ok(v) = std::env::var("CIRCLEFOL_THREADS") {
        if let Ok(n) = v.trim().parse::<usize>() {
            if n > 0 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    let result = match cli.command {
        Command::Solve { model, solver, out } => commands::solve(&model, &solver, &out),
        Command::Continue { model, solver, sweep, outdir } => {
            commands::continuation(&model, &solver, &sweep, &outdir)
        }
        Command::Verify { model, solution, residual_threshold } => {
            commands::verify(&model, &solution, residual_threshold)
        }
        Command::Cohom { l, a, eta, tol } => commands::cohom(&l, &a, &eta, tol),
        Command::Export { solution, grid, smax, ns, format, out } => {
            commands::export(&solution, grid, smax, ns, &format, &out)
        }
    };
    match result {
        Ok(code) => code,
        Err(err) => commands::report_error(&err),
    }
}

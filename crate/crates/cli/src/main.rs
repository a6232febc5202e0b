use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod output;

/// Fixed-point solver for clamped fourth-order boundary value problems.
///
/// PROBLEM is a problem file path or `example:<id>` for a built-in example.
#[derive(Parser, Debug)]
#[command(name = "clampbeam", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve a problem and print a convergence summary.
    Solve {
        problem: String,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Check the existence and uniqueness conditions on the box D_M.
    Check {
        problem: String,
        #[command(flatten)]
        check: CheckArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Solve on several grids and print a convergence table.
    Table {
        problem: String,
        /// Comma-separated grid sizes.
        #[arg(long, default_value = "100,200,500,1000", value_delimiter = ',')]
        grids: Vec<usize>,
        #[arg(long, default_value_t = 1e-15)]
        tol: f64,
        #[arg(long = "max-iter", default_value_t = 200)]
        max_iter: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// List or run the built-in examples.
    Examples {
        #[arg(long, conflicts_with = "run", required_unless_present = "run")]
        list: bool,
        /// Example id (1-6): runs `check`, then `solve`.
        #[arg(long)]
        run: Option<u8>,
        #[command(flatten)]
        overrides: Overrides,
        #[command(flatten)]
        check: CheckArgs,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Args, Debug, Clone, Copy)]
pub struct SolverArgs {
    /// Number of grid intervals (even, at least 8).
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    #[arg(long, default_value_t = 1e-15)]
    pub tol: f64,
    #[arg(long = "max-iter", default_value_t = 200)]
    pub max_iter: usize,
}

#[derive(Args, Debug, Clone, Copy)]
pub struct CheckArgs {
    /// Radius of D_M; defaults to the problem's `M`.
    #[arg(long = "M")]
    pub m: Option<f64>,
    #[arg(long = "K1")]
    pub k1: Option<f64>,
    #[arg(long = "K2")]
    pub k2: Option<f64>,
    #[arg(long = "K3")]
    pub k3: Option<f64>,
    #[arg(long = "K4")]
    pub k4: Option<f64>,
    /// Lattice points per axis used for estimates.
    #[arg(long, default_value_t = 9)]
    pub lattice: usize,
}

/// Replacement interval and boundary data for `examples --run`.
#[derive(Args, Debug, Clone, Copy, Default)]
pub struct Overrides {
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub b: Option<f64>,
    #[arg(long = "A1")]
    pub a1: Option<f64>,
    #[arg(long = "B1")]
    pub b1: Option<f64>,
    #[arg(long = "A2")]
    pub a2: Option<f64>,
    #[arg(long = "B2")]
    pub b2: Option<f64>,
}

#[derive(Args, Debug, Clone)]
pub struct OutArgs {
    /// Directory for CSV artifacts; falls back to CLAMPBEAM_OUT_DIR.
    #[arg(long = "out-dir", env = "CLAMPBEAM_OUT_DIR")]
    pub out_dir: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve {
            problem,
            solver,
            out,
        } => commands::load(&problem).and_then(|p| commands::solve(&p, &solver, &out)),
        Command::Check {
            problem,
            check,
            out,
        } => commands::load(&problem).and_then(|p| commands::check(&p, &check, &out)),
        Command::Table {
            problem,
            grids,
            tol,
            max_iter,
            out,
        } => {
            commands::load(&problem).and_then(|p| commands::table(&p, &grids, tol, max_iter, &out))
        }
        Command::Examples { list: true, .. } => {
            commands::list_examples();
            Ok(())
        }
        Command::Examples {
            run,
            overrides,
            check,
            solver,
            out,
            ..
        } => commands::run_example(
            run.expect("clap requires --run"),
            &overrides,
            &check,
            &solver,
            &out,
        ),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn grid_list_splits_on_commas() {
        let cli =
            Cli::try_parse_from(["clampbeam", "table", "example:1", "--grids", "100,200"]).unwrap();
        match cli.command {
            Command::Table { grids, .. } => assert_eq!(grids, [100, 200]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn examples_needs_list_or_run() {
        assert!(Cli::try_parse_from(["clampbeam", "examples"]).is_err());
        assert!(Cli::try_parse_from(["clampbeam", "examples", "--list", "--run", "1"]).is_err());
    }
}

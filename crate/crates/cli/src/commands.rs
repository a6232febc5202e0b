use std::fmt::Write as _;
use std::path::PathBuf;

use clampbeam::analysis::{AnalysisError, CheckInput, ConditionReport, Lattice, Provenance};
use clampbeam::catalog::{self, Example};
use clampbeam::problem::{BoundaryData, CanonicalProblem, ProblemFile, RawProblem};
use clampbeam::solver::SolveError;
use clampbeam::{check_conditions, solve as run_solver, Grid, SolveReport, SolverConfig};
use rayon::prelude::*;
use thiserror::Error;

use crate::output::{self, TableRow};
use crate::{CheckArgs, OutArgs, Overrides, SolverArgs};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Failed(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Csv { path: PathBuf, source: csv::Error },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Failed(_) => 1,
            _ => 2,
        }
    }
}

pub struct Loaded {
    pub label: String,
    pub file: ProblemFile,
}

pub fn load(spec: &str) -> Result<Loaded, CliError> {
    if let Some(id) = spec.strip_prefix("example:") {
        let example = id
            .parse()
            .ok()
            .and_then(catalog::get)
            .ok_or_else(|| CliError::Input(format!("unknown example `{id}` (expected 1-6)")))?;
        return Ok(Loaded {
            label: spec.to_string(),
            file: example.problem(),
        });
    }
    let source = std::fs::read_to_string(spec).map_err(|source| CliError::Io {
        path: spec.into(),
        source,
    })?;
    let file = ProblemFile::parse(&source).map_err(|e| CliError::Input(format!("{spec}: {e}")))?;
    Ok(Loaded {
        label: spec.to_string(),
        file,
    })
}

struct SolveRun {
    canonical: CanonicalProblem,
    report: SolveReport,
    /// Why the run stopped early, if it did.
    failure: Option<String>,
}

fn run_solve(raw: &RawProblem, args: &SolverArgs) -> Result<SolveRun, CliError> {
    let grid = Grid::new(args.n).map_err(|e| CliError::Input(format!("--n: {e}")))?;
    let canonical = raw.canonicalize();
    let exact = canonical
        .exact_on(grid)
        .transpose()
        .map_err(|e| CliError::Input(e.to_string()))?;
    let config = SolverConfig {
        n: args.n,
        tol: args.tol,
        max_iter: args.max_iter,
        ..Default::default()
    };
    match run_solver(&canonical, &config, exact.as_ref()) {
        Ok(report) => Ok(SolveRun {
            canonical,
            report,
            failure: None,
        }),
        Err(SolveError::Config(msg)) => Err(CliError::Input(msg)),
        Err(e) => match e.report() {
            Some(report) => Ok(SolveRun {
                canonical,
                report: report.clone(),
                failure: Some(e.to_string()),
            }),
            None => Err(CliError::Failed(e.to_string())),
        },
    }
}

pub fn solve(p: &Loaded, args: &SolverArgs, out: &OutArgs) -> Result<(), CliError> {
    let run = run_solve(&p.file.raw, args)?;
    println!("problem: {}", p.label);
    let status = run.failure.clone().unwrap_or_else(|| "converged".into());
    let row = TableRow::from_report(args.n, &run.report, status);
    output::print_table(&[row], run.report.eu_history.is_some());
    if let Some(dir) = &out.out_dir {
        let conv = output::write_convergence(dir, &run.report)?;
        let sol = output::write_solution(dir, &run.canonical, &run.report)?;
        println!("wrote {} and {}", conv.display(), sol.display());
    }
    match run.failure {
        Some(msg) => Err(CliError::Failed(msg)),
        None => Ok(()),
    }
}

pub fn table(
    p: &Loaded,
    grids: &[usize],
    tol: f64,
    max_iter: usize,
    out: &OutArgs,
) -> Result<(), CliError> {
    if grids.is_empty() {
        return Err(CliError::Input("--grids is empty".into()));
    }
    let results: Vec<(usize, Result<SolveRun, CliError>)> = grids
        .par_iter()
        .map(|&n| (n, run_solve(&p.file.raw, &SolverArgs { n, tol, max_iter })))
        .collect();
    let mut worst: Option<CliError> = None;
    let mut rows: Vec<TableRow> = results
        .into_iter()
        .map(|(n, result)| match result {
            Ok(run) => {
                let status = match &run.failure {
                    Some(msg) => {
                        worst.get_or_insert(CliError::Failed(format!("N = {n}: {msg}")));
                        msg.clone()
                    }
                    None => "converged".into(),
                };
                TableRow::from_report(n, &run.report, status)
            }
            Err(e) => {
                let status = e.to_string();
                if worst.as_ref().is_none_or(|w| e.exit_code() > w.exit_code()) {
                    worst = Some(e);
                }
                TableRow::failed(n, status)
            }
        })
        .collect();
    rows.sort_by_key(|r| r.n);
    let with_eu = p.file.raw.exact().is_some();
    println!("problem: {}", p.label);
    output::print_table(&rows, with_eu);
    if let Some(dir) = &out.out_dir {
        let path = output::write_table(dir, &rows, with_eu)?;
        println!("wrote {}", path.display());
    }
    worst.map_or(Ok(()), Err)
}

fn check_input(file: &ProblemFile, args: &CheckArgs) -> Result<(f64, CheckInput), CliError> {
    let cert = file.certificate;
    let m = args.m.or(cert.m).ok_or_else(|| {
        CliError::Input("no box radius: pass --M or set `M` in the problem".into())
    })?;
    // constants certified for the file's M stay valid on smaller boxes
    let file_k = match cert.m {
        Some(file_m) if m <= file_m => cert.k,
        _ => [None; 4],
    };
    let flags = [args.k1, args.k2, args.k3, args.k4];
    let mut k = [None; 4];
    for i in 0..4 {
        k[i] = flags[i].or(file_k[i]);
    }
    let input = CheckInput {
        k,
        sup_f: None,
        lattice: Lattice {
            points_per_axis: args.lattice,
        },
    };
    Ok((m, input))
}

fn provenance(p: Provenance) -> &'static str {
    match p {
        Provenance::Supplied => "supplied",
        Provenance::Symbolic => "estimate, symbolic derivative",
        Provenance::FiniteDifference => "estimate, finite differences",
        Provenance::Sampled => "estimate, lattice sample",
    }
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "yes"
    } else {
        "no"
    }
}

fn describe(r: &ConditionReport, lattice: usize) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "M        = {}", r.m);
    let _ = writeln!(
        s,
        "sup |f|  = {:.6e} ({})",
        r.sup_f,
        provenance(r.sup_f_provenance)
    );
    for (i, (k, p)) in r.k.iter().zip(r.k_provenance).enumerate() {
        let _ = writeln!(s, "K{}       = {k:.6e} ({})", i + 1, provenance(p));
    }
    let _ = writeln!(s, "q        = {:.6}", r.q);
    let _ = writeln!(
        s,
        "existence  (sup |f| <= M/2 = {}): {}",
        r.m / 2.0,
        verdict(r.lemma1_ok)
    );
    let _ = writeln!(s, "uniqueness (also q < 1/2): {}", verdict(r.theorem1_ok));
    if r.is_estimate() {
        let _ = writeln!(
            s,
            "note: estimates come from a {lattice}^5 lattice and are not a proof"
        );
    }
    s
}

pub fn check(p: &Loaded, args: &CheckArgs, out: &OutArgs) -> Result<(), CliError> {
    let (m, input) = check_input(&p.file, args)?;
    let canonical = p.file.raw.canonicalize();
    println!("problem: {}", p.label);
    let text = match check_conditions(canonical.rhs(), m, &input) {
        Ok(report) => {
            let text = describe(&report, args.lattice);
            print!("{text}");
            if let Some(dir) = &out.out_dir {
                output::write_text(dir, "conditions.txt", &text)?;
            }
            if report.theorem1_ok {
                return Ok(());
            }
            return Err(CliError::Failed("conditions not satisfied".into()));
        }
        Err(e @ AnalysisError::Undefined { .. }) => format!("{e}\n"),
        Err(e) => return Err(CliError::Input(e.to_string())),
    };
    print!("{text}");
    if let Some(dir) = &out.out_dir {
        output::write_text(dir, "conditions.txt", &text)?;
    }
    Err(CliError::Failed("f is not defined on all of D_M".into()))
}

pub fn list_examples() {
    for ex in &catalog::EXAMPLES {
        let file = ex.problem();
        let (a, b) = file.raw.interval();
        let BoundaryData { a1, b1, a2, b2 } = file.raw.boundary();
        println!("{}. {}", ex.id, ex.title);
        println!("   {}", ex.equation);
        println!("   f = {}", file.raw.rhs());
        println!("   [a, b] = [{a}, {b}], A1 = {a1}, B1 = {b1}, A2 = {a2}, B2 = {b2}");
        let c = file.certificate;
        if ex.is_certified() {
            let k = c.k.map(Option::unwrap);
            let q =
                clampbeam::analysis::contraction_factor(k).expect("certified constants are valid");
            println!(
                "   certified: M = {}, K = ({:.6}, {:.6}, {:.6}, {:.6}), q = {q:.4}",
                c.m.unwrap(),
                k[0],
                k[1],
                k[2],
                k[3]
            );
        } else {
            println!("   not certified: existence only");
        }
        if let Some(k) = ex.expected_iterations {
            println!("   reported iterations: {k}");
        }
        println!("   {}", ex.note);
    }
}

fn apply_overrides(ex: &Example, o: &Overrides) -> Result<ProblemFile, CliError> {
    let mut file = ex.problem();
    let given = [o.a, o.b, o.a1, o.b1, o.a2, o.b2];
    if given.iter().all(Option::is_none) {
        return Ok(file);
    }
    let (a, b) = file.raw.interval();
    let d = file.raw.boundary();
    let boundary = BoundaryData {
        a1: o.a1.unwrap_or(d.a1),
        b1: o.b1.unwrap_or(d.b1),
        a2: o.a2.unwrap_or(d.a2),
        b2: o.b2.unwrap_or(d.b2),
    };
    let raw = RawProblem::new(
        o.a.unwrap_or(a),
        o.b.unwrap_or(b),
        boundary,
        file.raw.rhs().clone(),
    )
    .map_err(|e| CliError::Input(e.to_string()))?;
    // the shipped constants were derived for the original data
    file.raw = raw;
    file.certificate.k = [None; 4];
    Ok(file)
}

pub fn run_example(
    id: u8,
    overrides: &Overrides,
    check_args: &CheckArgs,
    solver: &SolverArgs,
    out: &OutArgs,
) -> Result<(), CliError> {
    let ex = catalog::get(id)
        .ok_or_else(|| CliError::Input(format!("unknown example {id} (expected 1-6)")))?;
    let file = apply_overrides(ex, overrides)?;
    let strict = ex.is_certified() && file.certificate.k.iter().all(Option::is_some);
    let loaded = Loaded {
        label: format!("example:{id}"),
        file,
    };
    println!("{}", ex.equation);
    let checked = check(&loaded, check_args, out);
    let check_failure = match checked {
        Ok(()) => None,
        Err(CliError::Failed(msg)) if strict => Some(msg),
        Err(CliError::Failed(msg)) => {
            println!("warning: {msg}; uniqueness is not established, solving anyway");
            None
        }
        Err(e) => return Err(e),
    };
    println!();
    solve(&loaded, solver, out)?;
    match check_failure {
        Some(msg) => Err(CliError::Failed(msg)),
        None => Ok(()),
    }
}

//! CSV artifacts and console tables.

use std::fs::{self, File};
use std::path::{Path, PathBuf};

use clampbeam::problem::CanonicalProblem;
use clampbeam::SolveReport;

use crate::commands::CliError;

/// 17 significant digits; parses back to the same `f64`.
pub fn number(x: f64) -> String {
    format!("{x:.16e}")
}

fn io_error(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn csv_writer(dir: &Path, name: &str) -> Result<(csv::Writer<File>, PathBuf), CliError> {
    fs::create_dir_all(dir).map_err(io_error(dir))?;
    let path = dir.join(name);
    let file = File::create(&path).map_err(io_error(&path))?;
    let writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(file);
    Ok((writer, path))
}

fn write_rows<I>(dir: &Path, name: &str, header: &[&str], rows: I) -> Result<PathBuf, CliError>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let (mut w, path) = csv_writer(dir, name)?;
    let csv_error = |e: csv::Error| CliError::Csv {
        path: path.clone(),
        source: e,
    };
    w.write_record(header).map_err(csv_error)?;
    for row in rows {
        w.write_record(&row).map_err(csv_error)?;
    }
    w.flush().map_err(io_error(&path))?;
    Ok(path)
}

/// `k, e(k)` and, with an exact solution, `eu(k)`.
pub fn write_convergence(dir: &Path, report: &SolveReport) -> Result<PathBuf, CliError> {
    let eu = report.eu_history.as_ref();
    let mut header = vec!["k", "e"];
    if eu.is_some() {
        header.push("eu");
    }
    let rows = report.e_history.iter().enumerate().map(|(i, e)| {
        let mut row = vec![(i + 1).to_string(), number(*e)];
        if let Some(eu) = eu {
            row.push(number(eu[i]));
        }
        row
    });
    write_rows(dir, "convergence.csv", &header, rows)
}

/// Whether the problem was rescaled or homogenized.
pub fn is_transformed(problem: &CanonicalProblem) -> bool {
    problem.raw().interval() != (0.0, 1.0) || !problem.cubic().is_zero()
}

/// Nodes and the final profile; `t, w` are added for transformed problems.
pub fn write_solution(
    dir: &Path,
    problem: &CanonicalProblem,
    report: &SolveReport,
) -> Result<PathBuf, CliError> {
    let p = &report.profile;
    let grid = p.u.grid();
    let recovered = is_transformed(problem).then(|| problem.recover(&p.u));
    let mut header = vec!["x", "u", "y", "v", "z"];
    if recovered.is_some() {
        header.extend(["t", "w"]);
    }
    let rows = grid.nodes().enumerate().map(|(i, x)| {
        let mut row: Vec<String> = [x, p.u[i], p.y[i], p.v[i], p.z[i]]
            .into_iter()
            .map(number)
            .collect();
        if let Some(r) = &recovered {
            row.push(number(r.t[i]));
            row.push(number(r.w[i]));
        }
        row
    });
    write_rows(dir, "solution.csv", &header, rows)
}

pub struct TableRow {
    pub n: usize,
    pub iterations: Option<usize>,
    pub eu: Option<f64>,
    pub e: Option<f64>,
    pub residual: Option<f64>,
    pub status: String,
}

impl TableRow {
    pub fn from_report(n: usize, report: &SolveReport, status: String) -> Self {
        Self {
            n,
            iterations: Some(report.iterations),
            eu: report.eu_history.as_ref().and_then(|h| h.last().copied()),
            e: report.e_history.last().copied(),
            residual: Some(report.residual),
            status,
        }
    }

    pub fn failed(n: usize, status: String) -> Self {
        Self {
            n,
            iterations: None,
            eu: None,
            e: None,
            residual: None,
            status,
        }
    }
}

fn short(x: Option<f64>) -> String {
    x.map_or_else(|| "-".to_string(), |v| format!("{v:.4e}"))
}

pub fn print_table(rows: &[TableRow], with_eu: bool) {
    if with_eu {
        println!(
            "{:>6} {:>4} {:>12} {:>12} {:>12}  status",
            "N", "K", "eu(K)", "e(K)", "residual"
        );
    } else {
        println!(
            "{:>6} {:>4} {:>12} {:>12}  status",
            "N", "K", "e(K)", "residual"
        );
    }
    for r in rows {
        let k = r
            .iterations
            .map_or_else(|| "-".to_string(), |k| k.to_string());
        if with_eu {
            println!(
                "{:>6} {:>4} {:>12} {:>12} {:>12}  {}",
                r.n,
                k,
                short(r.eu),
                short(r.e),
                short(r.residual),
                r.status
            );
        } else {
            println!(
                "{:>6} {:>4} {:>12} {:>12}  {}",
                r.n,
                k,
                short(r.e),
                short(r.residual),
                r.status
            );
        }
    }
}

pub fn write_table(dir: &Path, rows: &[TableRow], with_eu: bool) -> Result<PathBuf, CliError> {
    let mut header = vec!["N", "K"];
    if with_eu {
        header.push("eu");
    }
    header.extend(["e", "residual", "status"]);
    let opt = |x: Option<f64>| x.map(number).unwrap_or_default();
    let records = rows.iter().map(|r| {
        let mut row = vec![
            r.n.to_string(),
            r.iterations.map(|k| k.to_string()).unwrap_or_default(),
        ];
        if with_eu {
            row.push(opt(r.eu));
        }
        row.extend([opt(r.e), opt(r.residual), r.status.clone()]);
        row
    });
    write_rows(dir, "table.csv", &header, records)
}

pub fn write_text(dir: &Path, name: &str, text: &str) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir).map_err(io_error(dir))?;
    let path = dir.join(name);
    fs::write(&path, text).map_err(io_error(&path))?;
    Ok(path)
}

//! Run reports and trajectory tables.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::linear_bvp::{SolvabilityReport, Trajectory};
use crate::linalg::Vector;
use crate::nonlinear::{GeneratingRoot, IterationTrace, SufficiencyCheck, SweepPoint};

use super::problem::ProblemFile;
use super::CliError;

/// What a trajectory file is expected to solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrajectoryKind {
    /// `z(n+1) = A z + f`, `l z = α`.
    Particular,
    /// `z(n+1) = A z`, `l z = 0`.
    Kernel,
    /// Generating solution `z₀(·, c⁰)`, same equations as `Particular`.
    Generating,
    /// `z(n+1) = A z + f + εZ(z, n, ε)`, `l z = α`.
    Nonlinear,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryEntry {
    pub file: String,
    pub kind: TrajectoryKind,
    pub recurrence_residual: f64,
    pub boundary_residual: f64,
    pub nonnegative: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonlinearReport {
    pub epsilon: f64,
    pub root: GeneratingRoot,
    /// `B₀`, row by row.
    pub b0: Vec<Vec<f64>>,
    /// Absent when no generating root was found.
    pub gate: Option<SufficiencyCheck>,
    pub converged: bool,
    pub diverged: bool,
    pub forced: bool,
    pub iterations: usize,
    pub final_increment: Option<f64>,
    pub trace_file: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub eps_min: f64,
    pub eps_max: f64,
    pub count: usize,
    pub branch_file: String,
    pub points: Vec<SweepPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub problem: ProblemFile,
    pub solvability: SolvabilityReport,
    pub trajectories: Vec<TrajectoryEntry>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub nonlinear: Option<NonlinearReport>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub sweep: Option<SweepReport>,
    pub exit_code: i32,
}

impl RunReport {
    pub fn write(&self, dir: &Path) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        write_file(&dir.join("report.json"), &text)
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = read_file(path)?;
        let de = &mut serde_json::Deserializer::from_str(&text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            CliError::Parse(format!("{}: field `{}`: {}", path.display(), e.path(), e.inner()))
        })
    }
}

pub fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Shortest decimal that parses back to the same `f64`.
pub fn format_float(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || (1e-5..1e16).contains(&a) || !v.is_finite() {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

fn csv_error(path: &Path, e: csv::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

/// Writes a table with a header row and pre-formatted cells.
pub fn write_table(path: &Path, header: &[String], rows: &[Vec<String>]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    w.write_record(header).map_err(|e| csv_error(path, e))?;
    for row in rows {
        w.write_record(row).map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// `n, z1, …, zN`.
pub fn write_trajectory(path: &Path, z: &Trajectory) -> Result<(), CliError> {
    let header: Vec<String> =
        std::iter::once("n".to_string()).chain((1..=z.dim()).map(|i| format!("z{i}"))).collect();
    let rows: Vec<Vec<String>> = z
        .values()
        .iter()
        .enumerate()
        .map(|(n, v)| std::iter::once(n.to_string()).chain(v.iter().map(|x| format_float(*x))).collect())
        .collect();
    write_table(path, &header, &rows)
}

pub fn read_trajectory(path: &Path) -> Result<Trajectory, CliError> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    let header = r.headers().map_err(|e| csv_error(path, e))?.clone();
    if header.get(0) != Some("n") || header.len() < 2 {
        return Err(CliError::Parse(format!("{}: header must start with `n` and one state column", path.display())));
    }
    let dim = header.len() - 1;
    let mut values = Vec::new();
    for (row, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        let line = row + 2;
        let n: usize = rec[0]
            .parse()
            .map_err(|_| CliError::Parse(format!("{}:{line}: bad index `{}`", path.display(), &rec[0])))?;
        if n != row {
            return Err(CliError::Parse(format!("{}:{line}: expected n = {row}, found {n}", path.display())));
        }
        let v = (1..=dim)
            .map(|i| {
                rec[i].parse::<f64>().map_err(|_| {
                    CliError::Parse(format!("{}:{line}: bad value `{}` in column {}", path.display(), &rec[i], i + 1))
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        values.push(Vector::from_vec(v));
    }
    Ok(Trajectory::new(values)?)
}

pub fn write_trace(path: &Path, trace: &IterationTrace) -> Result<(), CliError> {
    let header: Vec<String> = [
        "k",
        "c_norm",
        "ubar_norm",
        "increment",
        "recurrence_residual",
        "boundary_residual",
        "condition_residual",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    let rows: Vec<Vec<String>> = trace
        .records
        .iter()
        .map(|r| {
            let mut row = vec![r.k.to_string()];
            row.extend(
                [r.c_norm, r.ubar_norm, r.increment, r.recurrence_residual, r.boundary_residual, r.condition_residual]
                    .iter()
                    .map(|x| format_float(*x)),
            );
            row
        })
        .collect();
    write_table(path, &header, &rows)
}

pub fn write_branch(path: &Path, r: usize, points: &[SweepPoint]) -> Result<(), CliError> {
    let mut header: Vec<String> = vec!["epsilon".into(), "roots_found".into(), "root_converged".into()];
    header.extend((1..=r).map(|i| format!("c{i}")));
    header.extend(
        ["f_norm", "sufficient", "converged", "iterations", "recurrence_residual", "boundary_residual"]
            .iter()
            .map(|s| s.to_string()),
    );
    let rows: Vec<Vec<String>> = points
        .iter()
        .map(|p| {
            let mut row = vec![format_float(p.epsilon), p.roots_found.to_string(), p.root_converged.to_string()];
            row.extend(p.c0.iter().map(|c| format_float(*c)));
            row.push(format_float(p.f_norm));
            row.push(p.sufficient.to_string());
            row.push(p.converged.to_string());
            row.push(p.iterations.to_string());
            for x in [p.recurrence_residual, p.boundary_residual] {
                row.push(x.map(format_float).unwrap_or_default());
            }
            row
        })
        .collect();
    write_table(path, &header, &rows)
}

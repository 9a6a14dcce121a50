use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::linear_bvp::{solve_family, SolutionFamily, Trajectory};
use crate::lotka_volterra::{fib_check, FibCheck};
use crate::nonlinear::{
    assemble_b0, check_sufficient, find_roots, iterate, solve_generating, sweep, GeneratingRoot,
};

use super::problem::ProblemFile;
use super::report::{
    read_file, read_trajectory, write_branch, write_file, write_trace, write_trajectory, NonlinearReport, RunReport,
    SweepReport, TrajectoryEntry, TrajectoryKind,
};
use super::{exit, CliError};

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Default)]
pub struct GlobalOptions {
    /// Overrides `tolerances.iteration`.
    pub tol: Option<f64>,
    /// Overrides `solver.max_iter`.
    pub max_iter: Option<usize>,
    pub allow_quasi: bool,
    /// Print the effective problem and stop.
    pub dump_canonical: bool,
}

/// Exit status plus everything meant for standard output.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
}

/// Agreement required between a reported residual and its recomputation.
pub const VERIFY_TOL: f64 = 1e-12;

pub fn load_problem(path: &Path, g: &GlobalOptions) -> Result<ProblemFile, CliError> {
    let text = read_file(path)?;
    let mut p = ProblemFile::parse(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    if let Some(tol) = g.tol {
        p.tolerances.iteration = tol;
    }
    if let Some(max_iter) = g.max_iter {
        p.solver.max_iter = max_iter;
    }
    Ok(p)
}

/// `(recurrence residual, boundary residual)` of `z` against the equations
/// its kind claims to solve.
pub fn measure(problem: &ProblemFile, kind: TrajectoryKind, z: &Trajectory) -> Result<(f64, f64), CliError> {
    let linear = problem.linear()?;
    if z.dim() != linear.dim() || z.horizon() != linear.horizon() {
        return Err(CliError::Parse(format!(
            "trajectory has {} rows of {} components, problem needs {} rows of {}",
            z.horizon() + 1,
            z.dim(),
            linear.horizon() + 1,
            linear.dim()
        )));
    }
    Ok(match kind {
        TrajectoryKind::Particular | TrajectoryKind::Generating => (
            z.recurrence_residual(&linear.system, &linear.forcing),
            linear.boundary.residual(z)?,
        ),
        TrajectoryKind::Kernel => (
            z.recurrence_residual(&linear.system, &Trajectory::zeros(linear.dim(), linear.horizon())),
            linear.boundary.apply(z)?.norm(),
        ),
        TrajectoryKind::Nonlinear => problem.nonlinear()?.residuals(z)?,
    })
}

fn emit(
    dir: &Path,
    problem: &ProblemFile,
    file: &str,
    kind: TrajectoryKind,
    z: &Trajectory,
) -> Result<TrajectoryEntry, CliError> {
    write_trajectory(&dir.join(file), z)?;
    let (recurrence_residual, boundary_residual) = measure(problem, kind, z)?;
    Ok(TrajectoryEntry {
        file: file.to_string(),
        kind,
        recurrence_residual,
        boundary_residual,
        nonnegative: z.min_entry() >= 0.0,
    })
}

fn make_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))
}

fn family_of(problem: &ProblemFile) -> Result<(crate::linear_bvp::SolvabilityReport, SolutionFamily), CliError> {
    Ok(solve_family(&problem.linear()?, &problem.solve_options())?)
}

fn summary(out: &mut String, r: &crate::linear_bvp::SolvabilityReport) {
    let class = serde_json::to_value(r.classification).expect("serializes");
    let _ = writeln!(out, "classification: {}", class.as_str().unwrap_or_default());
    let _ = writeln!(
        out,
        "rank {}  kernel dim r = {}  cokernel dim d = {}  index r - d = {}",
        r.rank, r.kernel_dim, r.cokernel_dim, r.fredholm_index
    );
    let _ = writeln!(out, "defect ‖P_N(Qᵀ) h‖ = {:e}", r.defect_norm);
}

fn entries_line(out: &mut String, entries: &[TrajectoryEntry]) {
    for e in entries {
        let _ = writeln!(
            out,
            "{}  recurrence {:e}  boundary {:e}",
            e.file, e.recurrence_residual, e.boundary_residual
        );
    }
}

pub fn solve_linear(path: &Path, dir: &Path, g: &GlobalOptions) -> Result<Outcome, CliError> {
    let problem = load_problem(path, g)?;
    if g.dump_canonical {
        return Ok(Outcome { code: exit::OK, stdout: problem.canonical() });
    }
    let (solvability, family) = family_of(&problem)?;
    make_dir(dir)?;
    let mut trajectories = vec![emit(dir, &problem, "particular.csv", TrajectoryKind::Particular, &family.particular)?];
    for (j, w) in family.kernel_basis.iter().enumerate() {
        trajectories.push(emit(dir, &problem, &format!("kernel_{}.csv", j + 1), TrajectoryKind::Kernel, w)?);
    }
    let quasi = !solvability.classification.is_exact();
    let code = if quasi && !g.allow_quasi { exit::QUASISOLUTION } else { exit::OK };
    let mut out = String::new();
    summary(&mut out, &solvability);
    entries_line(&mut out, &trajectories);
    if code == exit::QUASISOLUTION {
        let _ = writeln!(out, "least-squares quasisolution only; pass --allow-quasi to accept");
    }
    RunReport {
        command: "solve-linear".into(),
        problem,
        solvability,
        trajectories,
        nonlinear: None,
        sweep: None,
        exit_code: code,
    }
    .write(dir)?;
    Ok(Outcome { code, stdout: out })
}

fn root_search(problem: &ProblemFile, nl: &crate::nonlinear::NonlinearProblem, family: &SolutionFamily) -> Result<GeneratingRoot, CliError> {
    let newton = problem.newton_options();
    let c_init = problem.c_init(family.kernel_dim())?;
    let root = solve_generating(nl, family, &c_init, &newton)?;
    if root.converged {
        return Ok(root);
    }
    if let Some(grid) = &problem.solver.seed_grid {
        if let Some(best) = find_roots(nl, family, grid, &newton)?.into_iter().next() {
            return Ok(best);
        }
    }
    Ok(root)
}

pub fn solve_nonlinear(path: &Path, dir: &Path, force: bool, g: &GlobalOptions) -> Result<Outcome, CliError> {
    let problem = load_problem(path, g)?;
    if g.dump_canonical {
        return Ok(Outcome { code: exit::OK, stdout: problem.canonical() });
    }
    let nl = problem.nonlinear()?;
    let (solvability, family) = family_of(&problem)?;
    make_dir(dir)?;
    let mut out = String::new();
    summary(&mut out, &solvability);
    let mut report = RunReport {
        command: "solve-nonlinear".into(),
        problem: problem.clone(),
        solvability,
        trajectories: Vec::new(),
        nonlinear: None,
        sweep: None,
        exit_code: exit::OK,
    };
    if !solvability.classification.is_exact() {
        let _ = writeln!(out, "generating problem has no exact solutions; nonlinear solve refused");
        report.exit_code = exit::QUASISOLUTION;
        report.write(dir)?;
        return Ok(Outcome { code: exit::QUASISOLUTION, stdout: out });
    }

    let root = root_search(&problem, &nl, &family)?;
    let c0 = root.c0_vector();
    let _ = writeln!(
        out,
        "generating constants c0 = {:?}  ‖F(c0)‖ = {:e}  newton iterations {}",
        root.c0, root.residual_norm, root.iterations
    );
    let mut nreport = NonlinearReport {
        epsilon: problem.epsilon,
        root: root.clone(),
        b0: Vec::new(),
        gate: None,
        converged: false,
        diverged: false,
        forced: false,
        iterations: 0,
        final_increment: None,
        trace_file: None,
    };
    if !root.converged {
        let _ = writeln!(out, "no root of the equation for generating constants found");
        report.nonlinear = Some(nreport);
        report.exit_code = exit::NO_ROOT;
        report.write(dir)?;
        return Ok(Outcome { code: exit::NO_ROOT, stdout: out });
    }
    report.trajectories.push(emit(dir, &problem, "generating.csv", TrajectoryKind::Generating, &family.member(&c0))?);

    let b0 = assemble_b0(&nl, &family, &c0)?;
    nreport.b0 = b0.row_iter().map(|r| r.iter().copied().collect()).collect();
    let gate = check_sufficient(&b0)?;
    let _ = writeln!(
        out,
        "B0 rank {} of {} required  ‖P_N(B0ᵀ)‖ = {:e}",
        gate.rank, gate.required_rank, gate.product_norm
    );
    let holds = gate.holds;
    nreport.gate = Some(gate);
    if !holds && !force {
        let _ = writeln!(out, "sufficient condition fails; pass --force to iterate anyway");
        report.nonlinear = Some(nreport);
        report.exit_code = exit::INSUFFICIENT;
        report.write(dir)?;
        return Ok(Outcome { code: exit::INSUFFICIENT, stdout: out });
    }

    let (z, trace) = iterate(&nl, &family, &c0, &problem.iteration_options(force))?;
    write_trace(&dir.join("iteration.csv"), &trace)?;
    report.trajectories.push(emit(dir, &problem, "solution.csv", TrajectoryKind::Nonlinear, &z)?);
    nreport.converged = trace.converged;
    nreport.diverged = trace.diverged;
    nreport.forced = trace.forced;
    nreport.iterations = trace.iterations;
    nreport.final_increment = trace.records.last().map(|r| r.increment);
    nreport.trace_file = Some("iteration.csv".into());
    let code = if trace.converged { exit::OK } else { exit::NOT_CONVERGED };
    let _ = writeln!(
        out,
        "iteration {} after {} steps",
        if trace.converged { "converged" } else if trace.diverged { "diverged" } else { "did not converge" },
        trace.iterations
    );
    entries_line(&mut out, &report.trajectories);
    report.nonlinear = Some(nreport);
    report.exit_code = code;
    report.write(dir)?;
    Ok(Outcome { code, stdout: out })
}

/// `count` evenly spaced values from `lo` to `hi`.
pub fn eps_grid(lo: f64, hi: f64, count: usize) -> Result<Vec<f64>, CliError> {
    if count == 0 || !lo.is_finite() || !hi.is_finite() || hi < lo {
        return Err(CliError::Parse(format!("invalid ε grid: min {lo}, max {hi}, count {count}")));
    }
    if count == 1 {
        return Ok(vec![lo]);
    }
    Ok((0..count).map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64).collect())
}

pub fn sweep_cmd(
    path: &Path,
    eps_min: f64,
    eps_max: f64,
    count: usize,
    dir: &Path,
    g: &GlobalOptions,
) -> Result<Outcome, CliError> {
    let problem = load_problem(path, g)?;
    if g.dump_canonical {
        return Ok(Outcome { code: exit::OK, stdout: problem.canonical() });
    }
    let grid = eps_grid(eps_min, eps_max, count)?;
    let nl = problem.nonlinear()?;
    let (solvability, family) = family_of(&problem)?;
    make_dir(dir)?;
    let mut out = String::new();
    summary(&mut out, &solvability);
    let mut report = RunReport {
        command: "sweep".into(),
        problem: problem.clone(),
        solvability,
        trajectories: Vec::new(),
        nonlinear: None,
        sweep: None,
        exit_code: exit::OK,
    };
    if !solvability.classification.is_exact() {
        let _ = writeln!(out, "generating problem has no exact solutions; sweep refused");
        report.exit_code = exit::QUASISOLUTION;
        report.write(dir)?;
        return Ok(Outcome { code: exit::QUASISOLUTION, stdout: out });
    }
    let points = sweep(
        &nl,
        &family,
        &grid,
        &problem.c_init(family.kernel_dim())?,
        problem.solver.seed_grid.as_ref(),
        &problem.newton_options(),
        &problem.iteration_options(false),
    )?;
    write_branch(&dir.join("branch.csv"), family.kernel_dim(), &points)?;
    let _ = writeln!(out, "{:>14}  {:>5}  {:>12}  {:>9}", "epsilon", "roots", "‖F‖", "converged");
    for p in &points {
        let _ = writeln!(out, "{:>14e}  {:>5}  {:>12e}  {:>9}", p.epsilon, p.roots_found, p.f_norm, p.converged);
    }
    report.sweep = Some(SweepReport { eps_min, eps_max, count, branch_file: "branch.csv".into(), points });
    report.write(dir)?;
    Ok(Outcome { code: exit::OK, stdout: out })
}

/// Text table for [`fib_check`].
pub fn render_fib_check(check: &FibCheck) -> String {
    let mut out = String::new();
    match check.offset {
        Some(o) => {
            let _ = writeln!(out, "exponent convention: Φ(m, 0) ↔ A^(m{o:+}), Δ(m) = det(A^(m{o:+}) - I) for every m");
        }
        None => {
            let _ = writeln!(out, "exponent convention: none consistent across m");
        }
    }
    let _ = writeln!(
        out,
        "{:>3} {:>16} {:>12} {:>9} {:>9} {:>9} {:>9} {:>10}",
        "m", "Δ(m)", "matching k", "a11", "a12", "a21", "a22", "solver"
    );
    for r in &check.rows {
        let ks: Vec<String> = r.matching.iter().map(|k| k.to_string()).collect();
        let ks = if ks.is_empty() { "-".to_string() } else { ks.join(",") };
        let cells: Vec<String> =
            r.coefficient_agree.iter().map(|a| format!("{a}/{}", r.coefficient_total)).collect();
        let _ = writeln!(
            out,
            "{:>3} {:>16} {:>12} {:>9} {:>9} {:>9} {:>9} {:>10.2e}",
            r.m, r.delta, ks, cells[0], cells[1], cells[2], cells[3], r.solver_deviation
        );
    }
    let totals: Vec<String> =
        check.coefficient_agree.iter().map(|a| format!("{a}/{}", check.coefficient_total)).collect();
    let _ = writeln!(
        out,
        "closed-form coefficient agreement with the exact matrix product: a11 {}  a12 {}  a21 {}  a22 {}",
        totals[0], totals[1], totals[2], totals[3]
    );
    let _ = writeln!(out, "max solver deviation from closed-form Green values: {:.3e}", check.max_solver_deviation);
    out
}

pub const FIB_SOLVER_TOL: f64 = 1e-9;

pub fn fib_check_cmd(m_max: usize, dir: Option<&Path>) -> Result<Outcome, CliError> {
    let check = fib_check(m_max)?;
    let stdout = render_fib_check(&check);
    if let Some(dir) = dir {
        make_dir(dir)?;
        let mut text = serde_json::to_string_pretty(&check).expect("serializes");
        text.push('\n');
        write_file(&dir.join("fib_check.json"), &text)?;
    }
    let code = if check.consistent(FIB_SOLVER_TOL) { exit::OK } else { exit::DISAGREEMENT };
    Ok(Outcome { code, stdout })
}

fn agrees(a: f64, b: f64) -> bool {
    (a - b).abs() <= VERIFY_TOL * a.abs().max(b.abs()).max(1.0)
}

pub fn verify(report_path: &Path, trajectory_path: &Path) -> Result<Outcome, CliError> {
    let report = RunReport::read(report_path)?;
    let name = trajectory_path
        .file_name()
        .and_then(|s| s.to_str())
        .ok_or_else(|| CliError::Parse(format!("{}: not a file path", trajectory_path.display())))?;
    let entry = report
        .trajectories
        .iter()
        .find(|e| e.file == name)
        .ok_or_else(|| CliError::Parse(format!("{name} is not listed in {}", report_path.display())))?;
    let z = read_trajectory(trajectory_path)?;
    let (rec, bnd) = measure(&report.problem, entry.kind, &z)?;
    let nonneg = z.min_entry() >= 0.0;
    let ok = agrees(rec, entry.recurrence_residual) && agrees(bnd, entry.boundary_residual) && nonneg == entry.nonnegative;
    let mut out = String::new();
    let _ = writeln!(out, "recurrence residual: reported {:e}, recomputed {:e}", entry.recurrence_residual, rec);
    let _ = writeln!(out, "boundary residual:   reported {:e}, recomputed {:e}", entry.boundary_residual, bnd);
    let _ = writeln!(out, "{}", if ok { "verified" } else { "MISMATCH" });
    Ok(Outcome { code: if ok { exit::OK } else { exit::DISAGREEMENT }, stdout: out })
}

/// Files a subcommand writes into its output directory, for callers that
/// want to compare runs.
pub fn output_files(dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file())
        .collect();
    files.sort();
    Ok(files)
}

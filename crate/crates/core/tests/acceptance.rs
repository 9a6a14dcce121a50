//! Acceptance suite: one line per criterion, nonzero exit on any failure.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use resonance_bvp::boundary::{BoundaryOperator, MultipointGroup, Sample};
use resonance_bvp::cli::{ProblemFile, RunReport};
use resonance_bvp::linalg::{numerical_rank, GeneralizedInverse, Matrix, Tolerance, Vector};
use resonance_bvp::linear_bvp::{
    solve_family, Classification, LinearProblem, OperatorSequence, SolutionFamily, SolveOptions, Trajectory,
};
use resonance_bvp::lotka_volterra::{fib_check, lv_derivative, lv_nonlinearity, LvNonlinearity, Series};
use resonance_bvp::nonlinear::{
    assemble_b0, check_sufficient, generating_f, iterate, solve_generating, IterationOptions, NewtonOptions,
    NonlinearProblem,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0))
}

fn random_vector(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> Vector {
    Vector::from_fn(n, |_, _| rng.random_range(-scale..scale))
}

fn rel(diff: f64, scale: f64) -> f64 {
    diff / scale.max(f64::MIN_POSITIVE)
}

fn penrose() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for case in 0..200 {
        let rows = rng.random_range(1..=50);
        let cols = rng.random_range(1..=50);
        let full = rows.min(cols);
        let k = match case % 3 {
            0 => full,
            1 => 1,
            _ => (full / 2).max(1),
        };
        let a = random_matrix(&mut rng, rows, k) * random_matrix(&mut rng, k, cols);
        let g = GeneralizedInverse::new_allow_empty(&a, Tolerance::Default).map_err(|e| e.to_string())?;
        ensure(g.rank.rank == k, || format!("case {case}: {rows}x{cols} rank {} expected {k}", g.rank.rank))?;
        let p = &g.pinv;
        let ap = &a * p;
        let pa = p * &a;
        let errs = [
            rel((&ap * &a - &a).norm(), a.norm()),
            rel((&pa * p - p).norm(), p.norm()),
            rel((&ap - ap.transpose()).norm(), ap.norm()),
            rel((&pa - pa.transpose()).norm(), pa.norm()),
        ];
        let mut proj = Vec::new();
        for (pr, dim) in [(&g.kernel_projector, cols), (&g.cokernel_projector, rows)] {
            let scale = 1.0f64.max(pr.norm());
            proj.push(rel((pr * pr - pr).norm(), scale));
            proj.push(rel((pr - pr.transpose()).norm(), scale));
            ensure(pr.nrows() == dim, || format!("case {case}: projector shape"))?;
        }
        proj.push(rel((&a * &g.kernel_projector).norm(), a.norm()));
        proj.push(rel((g.cokernel_projector.transpose() * &a).norm(), a.norm()));
        let e = errs.iter().chain(&proj).fold(0.0f64, |m, &x| m.max(x));
        ensure(e <= 1e-10, || format!("case {case}: {rows}x{cols} rank {k}: error {e:e}"))?;
        worst = worst.max(e);
        let rd = numerical_rank(&a, Tolerance::Default).map_err(|e| e.to_string())?;
        ensure(rd.rank == k, || format!("case {case}: numerical_rank disagrees"))?;
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 10.0, || format!("runtime {secs:.2} s"))?;
    Ok(format!("200 matrices, worst relative error {worst:.1e}, {secs:.2} s"))
}

enum BoundaryKind {
    Periodic,
    Multipoint,
    Generic,
}

fn random_bvp(rng: &mut ChaCha8Rng, case: usize) -> LinearProblem {
    let n = rng.random_range(1..=6);
    let m = rng.random_range(1..=10);
    let resonant = case.is_multiple_of(2);
    // Upper triangular with some unit diagonal entries: `Φ(m, 0) - I` is singular.
    let cut = rng.random_range(0..n);
    let matrices: Vec<Matrix> = (0..m)
        .map(|_| {
            if resonant {
                Matrix::from_fn(n, n, |i, j| match i.cmp(&j) {
                    std::cmp::Ordering::Less => rng.random_range(-1.0..1.0),
                    std::cmp::Ordering::Equal if i < cut => rng.random_range(-1.5..1.5),
                    std::cmp::Ordering::Equal => 1.0,
                    std::cmp::Ordering::Greater => 0.0,
                })
            } else {
                random_matrix(rng, n, n) + Matrix::identity(n, n)
            }
        })
        .collect();
    let system = OperatorSequence::new(n, matrices).unwrap();
    let forcing = Trajectory::from_fn(n, m, |_| random_vector(rng, n, 1.0));
    let kind = match case % 3 {
        0 => BoundaryKind::Periodic,
        1 => BoundaryKind::Multipoint,
        _ => BoundaryKind::Generic,
    };
    let boundary = match kind {
        BoundaryKind::Periodic => BoundaryOperator::periodic(n, m).unwrap(),
        BoundaryKind::Multipoint => {
            let q = rng.random_range(1..=n + 1);
            let groups: Vec<MultipointGroup> = (0..q)
                .map(|_| {
                    let mut components: Vec<usize> = (0..n).filter(|_| rng.random_bool(0.5)).collect();
                    if components.is_empty() {
                        components.push(rng.random_range(0..n));
                    }
                    let mut points: Vec<usize> = (0..=m).filter(|_| rng.random_bool(0.4)).collect();
                    if points.is_empty() {
                        points.push(rng.random_range(0..=m));
                    }
                    MultipointGroup { components, points }
                })
                .collect();
            let targets: Vec<f64> = (0..q).map(|_| rng.random_range(-1.0..1.0)).collect();
            BoundaryOperator::multipoint(n, m, &groups, &targets).unwrap()
        }
        BoundaryKind::Generic => {
            let q = rng.random_range(1..=n + 2);
            let count = rng.random_range(1..=3);
            let samples: Vec<Sample> = (0..count)
                .map(|_| {
                    let r = rng.random_range(1..=q.min(n));
                    Sample {
                        point: rng.random_range(0..=m),
                        weights: random_matrix(rng, q, r) * random_matrix(rng, r, n),
                    }
                })
                .collect();
            BoundaryOperator::generic(n, samples, random_vector(rng, q, 1.0)).unwrap()
        }
    };
    LinearProblem::new(system, forcing, boundary).unwrap()
}

/// Exact trajectory of the recurrence from `x0`, by direct unrolling.
fn unroll(system: &OperatorSequence, forcing: &Trajectory, x0: &Vector) -> Trajectory {
    let mut values = vec![x0.clone()];
    for k in 0..system.horizon() {
        let next = system.matrix(k) * &values[k] + forcing.at(k);
        values.push(next);
    }
    Trajectory::new(values).unwrap()
}

fn check_family(p: &LinearProblem, family: &SolutionFamily, rng: &mut ChaCha8Rng) -> Result<f64, String> {
    let zero = Trajectory::zeros(p.dim(), p.horizon());
    let mut worst = 0.0f64;
    let zp = &family.particular;
    let rec = zp.recurrence_residual(&p.system, &p.forcing);
    ensure(rec <= 1e-10 * (1.0 + zp.sup_norm()), || format!("particular recurrence residual {rec:e}"))?;
    worst = worst.max(rec / (1.0 + zp.sup_norm()));
    let bnd = p.boundary.residual(zp).unwrap();
    if family.classification.is_exact() {
        let limit = 1e-8 * (1.0 + p.boundary.target().norm());
        ensure(bnd <= limit, || format!("exact classification with boundary residual {bnd:e}"))?;
    }
    for w in &family.kernel_basis {
        let rec = w.recurrence_residual(&p.system, &zero);
        ensure(rec <= 1e-10 * (1.0 + w.sup_norm()), || format!("kernel recurrence residual {rec:e}"))?;
        let lw = p.boundary.apply(w).unwrap().norm();
        let limit = 1e-8 * (1.0 + w.sup_norm());
        ensure(lw <= limit, || format!("kernel boundary defect {lw:e}"))?;
    }
    let c = random_vector(rng, family.kernel_dim(), 2.0);
    let member = family.member(&c);
    let rec = member.recurrence_residual(&p.system, &p.forcing);
    ensure(rec <= 1e-10 * (1.0 + member.sup_norm()), || format!("member recurrence residual {rec:e}"))?;
    let member_bnd = p.boundary.residual(&member).unwrap();
    ensure((member_bnd - bnd).abs() <= 1e-8 * (1.0 + member.sup_norm()), || {
        format!("member boundary residual {member_bnd:e} differs from particular {bnd:e}")
    })?;
    if family.classification == Classification::Quasisolution {
        for _ in 0..100 {
            let x0 = random_vector(rng, p.dim(), 3.0);
            let z = unroll(&p.system, &p.forcing, &x0);
            let other = p.boundary.residual(&z).unwrap();
            ensure(bnd <= other + 1e-8, || format!("quasisolution residual {bnd:e} beaten by {other:e}"))?;
        }
    }
    Ok(worst)
}

fn linear_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut counts = [0usize; 3];
    let mut worst = 0.0f64;
    for case in 0..100 {
        let p = random_bvp(&mut rng, case);
        let (report, family) = solve_family(&p, &SolveOptions::default()).map_err(|e| format!("case {case}: {e}"))?;
        counts[match report.classification {
            Classification::UniqueClassical => 0,
            Classification::Family => 1,
            Classification::Quasisolution => 2,
        }] += 1;
        worst = worst.max(check_family(&p, &family, &mut rng).map_err(|e| format!("case {case}: {e}"))?);
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 30.0, || format!("runtime {secs:.2} s"))?;
    Ok(format!(
        "100 problems ({} unique, {} family, {} quasisolution), worst scaled recurrence residual {worst:.1e}, {secs:.2} s",
        counts[0], counts[1], counts[2]
    ))
}

fn identity_resonance() -> Outcome {
    for n in 1..=6 {
        for m in [1, 4, 9] {
            let system = OperatorSequence::identity(n, m).unwrap();
            let p = LinearProblem::new(system, Trajectory::zeros(n, m), BoundaryOperator::periodic(n, m).unwrap())
                .unwrap();
            let (report, _) = solve_family(&p, &SolveOptions::default()).map_err(|e| e.to_string())?;
            ensure(report.kernel_dim == n && report.fredholm_index == 0, || {
                format!("N = {n}, m = {m}: r = {}, index = {}", report.kernel_dim, report.fredholm_index)
            })?;
        }
    }
    Ok("r = N and index 0 for N = 1..6".into())
}

fn fibonacci() -> Outcome {
    let start = Instant::now();
    let check = fib_check(20).map_err(|e| e.to_string())?;
    let secs = start.elapsed().as_secs_f64();
    ensure(check.offset.is_some(), || "no single exponent offset".into())?;
    for row in &check.rows {
        ensure(row.matching.len() == 1, || format!("m = {}: exponents {:?}", row.m, row.matching))?;
    }
    ensure(check.max_solver_deviation <= 1e-9, || format!("solver deviation {:e}", check.max_solver_deviation))?;
    ensure(secs < 5.0, || format!("runtime {secs:.2} s"))?;
    let t = check.coefficient_total;
    let a = check.coefficient_agree;
    Ok(format!(
        "exponent offset {:+}, a11 {}/{t} a12 {}/{t} a21 {}/{t} a22 {}/{t}, solver deviation {:.1e}, {secs:.2} s",
        check.offset.unwrap(),
        a[0],
        a[1],
        a[2],
        a[3],
        check.max_solver_deviation
    ))
}

fn load(name: &str) -> ProblemFile {
    let text = std::fs::read_to_string(common::problem(name)).unwrap();
    ProblemFile::parse(&text).unwrap()
}

fn benchmark() -> (ProblemFile, NonlinearProblem, SolutionFamily) {
    let file = load("rotation_lv.json");
    let problem = file.nonlinear().unwrap();
    let (_, family) = solve_family(&problem.linear, &file.solve_options()).unwrap();
    (file, problem, family)
}

/// `F(c)` by unrolling `z₀` and the forced response step by step.
fn f_oracle(problem: &NonlinearProblem, family: &SolutionFamily, c: &Vector) -> Vector {
    let lin = &problem.linear;
    let x0 = &family.initial_particular + &family.kernel_initial_basis * c;
    let z0 = unroll(&lin.system, &lin.forcing, &x0);
    let zf = Trajectory::from_fn(lin.dim(), lin.horizon(), |n| problem.nonlinearity.eval(z0.at(n), n, 0.0));
    let g = unroll(&lin.system, &zf, &Vector::zeros(lin.dim()));
    let lg = g.at(lin.horizon()) - g.at(0);
    family.cokernel_basis.transpose() * lg
}

fn generating_equation() -> Outcome {
    let (_, problem, family) = benchmark();
    ensure(family.cokernel_dim() == 2 && family.kernel_dim() == 2, || "benchmark is not fully resonant".into())?;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst_f = 0.0f64;
    for _ in 0..50 {
        let c = random_vector(&mut rng, 2, 1.0);
        let f = generating_f(&problem, &family, &c).map_err(|e| e.to_string())?;
        let o = f_oracle(&problem, &family, &c);
        worst_f = worst_f.max((f - &o).norm() / (1.0 + o.norm()));
    }
    ensure(worst_f <= 1e-10, || format!("F deviates from unrolled oracle by {worst_f:e}"))?;
    let root = solve_generating(&problem, &family, &Vector::zeros(2), &NewtonOptions::default())
        .map_err(|e| e.to_string())?;
    ensure(root.converged, || format!("no generating root, residual {:e}", root.residual_norm))?;
    let c0 = root.c0_vector();
    let b0 = assemble_b0(&problem, &family, &c0).map_err(|e| e.to_string())?;
    let h = 1e-6;
    let mut fd = Matrix::zeros(2, 2);
    for j in 0..2 {
        let mut cp = c0.clone();
        let mut cm = c0.clone();
        cp[j] += h;
        cm[j] -= h;
        let col = (f_oracle(&problem, &family, &cp) - f_oracle(&problem, &family, &cm)) / (2.0 * h);
        fd.set_column(j, &col);
    }
    let err = (&b0 + &fd).norm() / fd.norm();
    ensure(err <= 1e-5, || format!("B0 vs -dF/dc relative error {err:e}"))?;
    Ok(format!("F worst {worst_f:.1e} over 50 points, B0 vs finite differences {err:.1e}"))
}

fn iteration() -> Outcome {
    let (file, problem, family) = benchmark();
    let c_init = file.c_init(family.kernel_dim()).unwrap();
    let root = solve_generating(&problem, &family, &c_init, &NewtonOptions::default()).map_err(|e| e.to_string())?;
    ensure(root.converged, || "no generating root".into())?;
    let c0 = root.c0_vector();
    let z0 = family.member(&c0);
    let opts = IterationOptions::default();
    let mut points = Vec::new();
    let mut summary = Vec::new();
    for eps in [1e-2, 1e-3, 1e-4] {
        let p = problem.with_epsilon(eps);
        let (z, trace) = iterate(&p, &family, &c0, &opts).map_err(|e| e.to_string())?;
        ensure(trace.converged && trace.iterations <= 200, || {
            format!("eps {eps}: converged {} after {}", trace.converged, trace.iterations)
        })?;
        let (rec, bnd) = p.residuals(&z).map_err(|e| e.to_string())?;
        ensure(rec <= 1e-8 && bnd <= 1e-8, || format!("eps {eps}: residuals {rec:e}, {bnd:e}"))?;
        let dev = z.sub(&z0).sup_norm();
        points.push((eps.ln(), dev.ln()));
        summary.push(format!("{eps:e}: {} it", trace.iterations));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let slope = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
        / points.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    ensure((slope - 1.0).abs() <= 0.15, || format!("log-log slope {slope}"))?;
    let (z, _) = iterate(&problem.with_epsilon(0.0), &family, &c0, &opts).map_err(|e| e.to_string())?;
    let dev0 = z.sub(&z0).sup_norm();
    ensure(dev0 <= 16.0 * f64::EPSILON * (1.0 + z0.sup_norm()), || format!("eps = 0 deviation {dev0:e}"))?;
    Ok(format!("{}, slope {slope:.4}, eps = 0 deviation {dev0:.1e}", summary.join(", ")))
}

fn gate() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let bad = dir.path().join("bad");
    let good = dir.path().join("good");
    let args = |name: &str, out: &Path| {
        vec![
            "solve-nonlinear".to_string(),
            common::problem(name).display().to_string(),
            "-o".into(),
            out.display().to_string(),
        ]
    };
    let r = common::cli(&args("gate_fail.json", &bad));
    ensure(r.code == 4, || format!("gate_fail exit {} ({})", r.code, r.stderr.trim()))?;
    let report = RunReport::read(&bad.join("report.json")).map_err(|e| e.to_string())?;
    let nl = report.nonlinear.ok_or("gate_fail report lacks nonlinear section")?;
    let gate = nl.gate.ok_or("gate_fail report lacks gate")?;
    ensure(report.solvability.cokernel_dim > 0, || "gate_fail has d = 0".into())?;
    ensure(nl.b0.iter().flatten().all(|x| *x == 0.0) && !gate.holds, || "gate_fail B0 is not zero".into())?;
    let r = common::cli(&args("rotation_lv.json", &good));
    ensure(r.code == 0, || format!("benchmark exit {} ({})", r.code, r.stderr.trim()))?;
    let report = RunReport::read(&good.join("report.json")).map_err(|e| e.to_string())?;
    let gate = report.nonlinear.and_then(|n| n.gate).ok_or("benchmark report lacks gate")?;
    ensure(gate.holds && gate.rank == 2, || "benchmark gate does not hold".into())?;
    let (_, problem, family) = benchmark();
    let b0 = assemble_b0(&problem, &family, &Vector::from_vec(vec![0.3, -0.2])).map_err(|e| e.to_string())?;
    ensure(check_sufficient(&b0).map_err(|e| e.to_string())?.holds, || "gate fails off the root".into())?;
    Ok(format!("gate_fail refused with exit 4, benchmark passes with rank {}", gate.rank))
}

fn lv_spec(rng: &mut ChaCha8Rng, horizon: usize) -> LvNonlinearity {
    let p = 3;
    let t = 2;
    let series = |rng: &mut ChaCha8Rng| Series::Values((0..=horizon).map(|_| rng.random_range(-2.0..2.0)).collect());
    let g1 = (0..p).map(|_| series(rng)).collect();
    let g2 = (0..p).map(|_| series(rng)).collect();
    let a = (0..p).map(|_| (0..t).map(|_| series(rng)).collect()).collect();
    let b = (0..p).map(|_| (0..t).map(|_| series(rng)).collect()).collect();
    LvNonlinearity::new(p, t, g1, g2, a, b).unwrap()
}

fn lv_linearization() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let horizon = 6;
    let spec = lv_spec(&mut rng, horizon);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let z = random_vector(&mut rng, 2 * spec.p, 2.0);
        let n = rng.random_range(0..=horizon);
        let jac = lv_derivative(&spec, &z, n).map_err(|e| e.to_string())?;
        let mut fd = Matrix::zeros(z.len(), z.len());
        for j in 0..z.len() {
            let h = 1e-6 * (1.0 + z[j].abs());
            let mut zp = z.clone();
            let mut zm = z.clone();
            zp[j] += h;
            zm[j] -= h;
            let col = (lv_nonlinearity(&spec, &zp, n).unwrap() - lv_nonlinearity(&spec, &zm, n).unwrap()) / (2.0 * h);
            fd.set_column(j, &col);
        }
        worst = worst.max((&fd - &jac).norm() / jac.norm().max(1.0));
    }
    ensure(worst <= 1e-6, || format!("worst relative error {worst:e}"))?;
    Ok(format!("100 points, worst relative error {worst:.1e}"))
}

fn determinism() -> Outcome {
    let runs = common::shipped_runs();
    for (name, args, expected) in &runs {
        let a = tempfile::tempdir().map_err(|e| e.to_string())?;
        let b = tempfile::tempdir().map_err(|e| e.to_string())?;
        let ra = common::run_shipped(args, a.path());
        let rb = common::run_shipped(args, b.path());
        ensure(ra.code == *expected, || format!("{name}: exit {} expected {expected} ({})", ra.code, ra.stderr.trim()))?;
        ensure(ra == rb, || format!("{name}: output differs between runs"))?;
        let fa = common::dir_contents(a.path());
        ensure(!fa.is_empty(), || format!("{name}: no files written"))?;
        ensure(fa == common::dir_contents(b.path()), || format!("{name}: files differ between runs"))?;
    }
    Ok(format!("{} shipped runs byte-identical", runs.len()))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("penrose suite", penrose),
        ("linear oracle equivalence", linear_oracle),
        ("resonance detection", identity_resonance),
        ("fibonacci oracle", fibonacci),
        ("generating equation", generating_equation),
        ("perturbation iteration", iteration),
        ("sufficient-condition gate", gate),
        ("lotka-volterra derivative", lv_linearization),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("PASS {} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {} {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

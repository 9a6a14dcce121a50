//! A Lotka–Volterra perturbation of a resonant rotation: generating
//! constants, the sufficient condition, and the perturbation iteration for
//! a few values of ε.

use std::f64::consts::PI;
use std::sync::Arc;

use resonance_bvp::boundary::BoundaryOperator;
use resonance_bvp::linalg::Vector;
use resonance_bvp::linear_bvp::{solve_family, LinearProblem, OperatorSequence, SolveOptions, Trajectory};
use resonance_bvp::lotka_volterra::LvNonlinearity;
use resonance_bvp::nonlinear::{
    assemble_b0, check_sufficient, iterate, solve_generating, IterationOptions, NewtonOptions, NonlinearProblem,
};

fn main() -> resonance_bvp::Result<()> {
    let m = 8;
    let linear = LinearProblem::new(
        OperatorSequence::rotation(2.0 * PI / m as f64, m)?,
        Trajectory::constant(Vector::from_vec(vec![0.5, -0.25]), m),
        BoundaryOperator::periodic(2, m)?,
    )?;
    let lv = Arc::new(LvNonlinearity::uniform(1, 1, 1.0, 1.0)?);
    let problem = NonlinearProblem::new(linear, lv, 0.0)?;
    let (_, family) = solve_family(&problem.linear, &SolveOptions::default())?;

    let root = solve_generating(&problem, &family, &Vector::zeros(2), &NewtonOptions::default())?;
    println!("c0 = {:?}, ‖F(c0)‖ = {:.2e}", root.c0, root.residual_norm);
    let c0 = root.c0_vector();
    let b0 = assemble_b0(&problem, &family, &c0)?;
    let gate = check_sufficient(&b0)?;
    println!("B0 rows: {:.6?}, {:.6?}", b0.row(0).iter().collect::<Vec<_>>(), b0.row(1).iter().collect::<Vec<_>>());
    println!("rank {} of {}: {}", gate.rank, gate.required_rank, if gate.holds { "holds" } else { "fails" });

    let z0 = family.member(&c0);
    for eps in [1e-2, 1e-3, 1e-4] {
        let (z, trace) = iterate(&problem.with_epsilon(eps), &family, &c0, &IterationOptions::default())?;
        let last = trace.records.last().expect("at least one step");
        println!(
            "ε = {eps:.0e}: {} steps, ‖z - z0‖∞ = {:.3e}, residuals {:.1e} / {:.1e}",
            trace.iterations,
            z.sub(&z0).sup_norm(),
            last.recurrence_residual,
            last.boundary_residual
        );
    }
    Ok(())
}

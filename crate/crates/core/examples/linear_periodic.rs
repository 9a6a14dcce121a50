//! Periodic problems for three constant systems: the Fibonacci matrix
//! (invertible Q), the identity (fully resonant) and a rotation by 2π/8
//! (resonant, solvable only for forcings with zero mean over the period).

use std::f64::consts::PI;

use resonance_bvp::boundary::BoundaryOperator;
use resonance_bvp::linalg::Vector;
use resonance_bvp::linear_bvp::{solve_family, LinearProblem, OperatorSequence, SolveOptions, Trajectory};

fn report(name: &str, problem: &LinearProblem) -> resonance_bvp::Result<()> {
    let (r, family) = solve_family(problem, &SolveOptions::default())?;
    println!(
        "{name:>10}: {:?}, r = {}, d = {}, index {}, defect {:.2e}",
        r.classification, r.kernel_dim, r.cokernel_dim, r.fredholm_index, r.defect_norm
    );
    let z = family.member(&Vector::from_element(family.kernel_dim(), 0.5));
    println!(
        "{:>10}  member residuals: recurrence {:.2e}, boundary {:.2e}",
        "",
        z.recurrence_residual(&problem.system, &problem.forcing),
        problem.boundary.residual(&z)?
    );
    Ok(())
}

fn main() -> resonance_bvp::Result<()> {
    let m = 8;
    let forcing = Trajectory::from_fn(2, m, |n| Vector::from_vec(vec![(n as f64).sin(), 1.0]));
    let periodic = BoundaryOperator::periodic(2, m)?;

    report("fibonacci", &LinearProblem::new(OperatorSequence::fibonacci(m)?, forcing.clone(), periodic.clone())?)?;
    report("identity", &LinearProblem::new(OperatorSequence::identity(2, m)?, Trajectory::zeros(2, m), periodic.clone())?)?;

    let rotation = OperatorSequence::rotation(2.0 * PI / m as f64, m)?;
    let constant = Trajectory::constant(Vector::from_vec(vec![0.5, -0.25]), m);
    report("rotation", &LinearProblem::new(rotation.clone(), constant, periodic.clone())?)?;
    // A forcing that resonates with the rotation has no periodic solution.
    let resonant = Trajectory::from_fn(2, m, |n| {
        let t = 2.0 * PI * n as f64 / m as f64;
        Vector::from_vec(vec![t.cos(), t.sin()])
    });
    report("resonant", &LinearProblem::new(rotation, resonant, periodic)?)?;
    Ok(())
}

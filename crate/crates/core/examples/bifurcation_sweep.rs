//! ε-continuation on `z(n+1) = z(n) + ε(z² + 0.02 - ε)` with periodic
//! conditions: a pair of periodic branches is born at ε = 0.02.

use std::sync::Arc;

use resonance_bvp::boundary::BoundaryOperator;
use resonance_bvp::linalg::Vector;
use resonance_bvp::linear_bvp::{solve_family, LinearProblem, OperatorSequence, SolveOptions, Trajectory};
use resonance_bvp::nonlinear::{sweep, IterationOptions, Monomial, NewtonOptions, NonlinearProblem, Polynomial, SeedGrid};

fn main() -> resonance_bvp::Result<()> {
    let m = 4;
    let linear = LinearProblem::new(
        OperatorSequence::identity(1, m)?,
        Trajectory::zeros(1, m),
        BoundaryOperator::periodic(1, m)?,
    )?;
    let z = Polynomial::new(
        1,
        vec![
            Monomial { output: 0, coeff: 1.0, eps_coeff: 0.0, powers: vec![2] },
            Monomial { output: 0, coeff: 0.02, eps_coeff: -1.0, powers: vec![0] },
        ],
    )?;
    let problem = NonlinearProblem::new(linear, Arc::new(z), 0.0)?;
    let (_, family) = solve_family(&problem.linear, &SolveOptions::default())?;

    let grid: Vec<f64> = (0..12).map(|i| 0.0025 + 0.005 * i as f64).collect();
    let seeds = SeedGrid { lo: -1.0, hi: 1.0, count: 5 };
    let points = sweep(
        &problem,
        &family,
        &grid,
        &Vector::from_vec(vec![0.5]),
        Some(&seeds),
        &NewtonOptions::default(),
        &IterationOptions::default(),
    )?;
    println!("{:>8} {:>6} {:>10} {:>10}", "ε", "roots", "c0", "converged");
    for p in points {
        let c = if p.root_converged { format!("{:+.5}", p.c0[0]) } else { "-".into() };
        println!("{:>8.4} {:>6} {:>10} {:>10}", p.epsilon, p.roots_found, c, p.converged);
    }
    Ok(())
}

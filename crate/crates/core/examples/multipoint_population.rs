//! Two species pairs with an initial-mass condition, then a multi-point
//! condition whose targets contradict each other (least-squares answer).

use resonance_bvp::boundary::{BoundaryOperator, MultipointGroup};
use resonance_bvp::linear_bvp::{solve_family, LinearProblem, SolveOptions};
use resonance_bvp::lotka_volterra::{block_system, stacked_forcing, Series};

fn main() -> resonance_bvp::Result<()> {
    let m = 6;
    let s = |v: f64| Series::Constant(v);
    let system = block_system(&[s(0.9), s(0.85)], &[s(0.05), s(0.1)], &[s(0.1), s(0.05)], &[s(0.8), s(0.8)], m)?;
    let forcing = stacked_forcing(&[s(0.02), s(0.01)], &[s(0.01), s(0.0)], m)?;

    let mass = BoundaryOperator::initial_mass(2, 1.0, 0.6)?;
    let problem = LinearProblem::new(system.clone(), forcing.clone(), mass)?;
    let (r, family) = solve_family(&problem, &SolveOptions::default())?;
    println!("initial mass: {:?}, r = {}, d = {}", r.classification, r.kernel_dim, r.cokernel_dim);
    println!("  particular z(0) = {:.4?}", family.particular.at(0).as_slice());
    println!("  particular z(m) = {:.4?}", family.particular.at(m).as_slice());

    let groups = [
        MultipointGroup { components: vec![0, 1], points: vec![0, m] },
        MultipointGroup { components: vec![2, 3], points: vec![0, m] },
        MultipointGroup { components: vec![0, 1, 2, 3], points: vec![0, m] },
    ];
    let inconsistent = BoundaryOperator::multipoint(4, m, &groups, &[1.0, 1.0, 3.0])?;
    let problem = LinearProblem::new(system, forcing, inconsistent)?;
    let (r, family) = solve_family(&problem, &SolveOptions::default())?;
    println!("contradictory sums: {:?}, defect {:.4}", r.classification, r.defect_norm);
    println!("  boundary residual of the quasisolution {:.4}", problem.boundary.residual(&family.particular)?);
    Ok(())
}

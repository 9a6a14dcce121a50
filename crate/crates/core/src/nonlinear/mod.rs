//! Weakly nonlinear problems `z(n+1) = A_n z(n) + f(n) + ε Z(z(n), n, ε)`,
//! `l z = α`, solved by Lyapunov–Schmidt reduction onto the generating family.
//!
//! A solution that tends to the generating solution `z₀(·, c⁰)` as `ε → 0`
//! forces `c⁰` to be a root of
//!
//! ```text
//! F(c) = P_{N(Qᵀ)} l g[Z(z₀(·, c), ·, 0)]
//! ```
//!
//! (`g[φ]` is the forced response to `φ`). All projected quantities are
//! expressed in the coordinates of an orthonormal basis of `N(Qᵀ)`, so `F`
//! maps `R^r → R^d`. Writing `z = z₀(·, c⁰) + u`, the correction `u` is found
//! by the fixed-point iteration in [`iterate`], which needs the linearization
//! `B₀` of `F` to have full row rank ([`check_sufficient`]).

mod polynomial;

use std::sync::Arc;

use log::warn;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{GeneralizedInverse, Matrix, Tolerance, Vector};
use crate::linear_bvp::{LinearProblem, SolutionFamily, Trajectory};

pub use polynomial::{Monomial, Polynomial};

/// A smooth nonlinearity `Z(z, n, ε)` with its Fréchet derivative in `z`.
pub trait Nonlinearity: Send + Sync + std::fmt::Debug {
    fn dim(&self) -> usize;
    fn eval(&self, z: &Vector, n: usize, eps: f64) -> Vector;
    fn jacobian(&self, z: &Vector, n: usize, eps: f64) -> Matrix;
    /// Checks that every coefficient sequence covers `{0, …, horizon}`.
    fn validate(&self, _horizon: usize) -> Result<()> {
        Ok(())
    }
}

/// `Z ≡ 0`.
#[derive(Debug, Clone, Copy)]
pub struct ZeroNonlinearity(pub usize);

impl Nonlinearity for ZeroNonlinearity {
    fn dim(&self) -> usize {
        self.0
    }
    fn eval(&self, _: &Vector, _: usize, _: f64) -> Vector {
        Vector::zeros(self.0)
    }
    fn jacobian(&self, _: &Vector, _: usize, _: f64) -> Matrix {
        Matrix::zeros(self.0, self.0)
    }
}

/// `Z(z, n, ·) := inner(z, n, eps)`: the nonlinearity of one fixed parameter
/// value, treated as an ε-independent map.
#[derive(Debug, Clone)]
pub struct Frozen {
    inner: Arc<dyn Nonlinearity>,
    eps: f64,
}

impl Nonlinearity for Frozen {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn eval(&self, z: &Vector, n: usize, _: f64) -> Vector {
        self.inner.eval(z, n, self.eps)
    }
    fn jacobian(&self, z: &Vector, n: usize, _: f64) -> Matrix {
        self.inner.jacobian(z, n, self.eps)
    }
    fn validate(&self, horizon: usize) -> Result<()> {
        self.inner.validate(horizon)
    }
}

#[derive(Debug, Clone)]
pub struct NonlinearProblem {
    pub linear: LinearProblem,
    pub nonlinearity: Arc<dyn Nonlinearity>,
    pub epsilon: f64,
}

impl NonlinearProblem {
    pub fn new(linear: LinearProblem, nonlinearity: Arc<dyn Nonlinearity>, epsilon: f64) -> Result<Self> {
        if nonlinearity.dim() != linear.dim() {
            return Err(Error::DimensionMismatch {
                context: "nonlinearity dimension",
                expected: linear.dim(),
                found: nonlinearity.dim(),
            });
        }
        if !epsilon.is_finite() {
            return Err(Error::InvalidArgument("epsilon must be finite".into()));
        }
        nonlinearity.validate(linear.horizon())?;
        Ok(Self { linear, nonlinearity, epsilon })
    }

    pub fn with_epsilon(&self, epsilon: f64) -> Self {
        Self { epsilon, ..self.clone() }
    }

    /// The same boundary-value problem with `Z` frozen at the current `ε`.
    pub fn frozen(&self) -> Self {
        Self {
            nonlinearity: Arc::new(Frozen { inner: self.nonlinearity.clone(), eps: self.epsilon }),
            ..self.clone()
        }
    }

    /// `n ↦ Z(z(n), n, eps)`.
    pub fn nonlinear_forcing(&self, z: &Trajectory, eps: f64) -> Trajectory {
        z.map(|n, v| self.nonlinearity.eval(v, n, eps))
    }

    /// `f(n) + ε Z(z(n), n, ε)`.
    pub fn total_forcing(&self, z: &Trajectory) -> Trajectory {
        self.linear.forcing.add(&self.nonlinear_forcing(z, self.epsilon).scaled(self.epsilon))
    }

    /// `(max_n ‖z(n+1) - A_n z(n) - f(n) - εZ‖, ‖l z - α‖)`.
    pub fn residuals(&self, z: &Trajectory) -> Result<(f64, f64)> {
        let rec = z.recurrence_residual(&self.linear.system, &self.total_forcing(z));
        let bnd = self.linear.boundary.residual(z)?;
        Ok((rec, bnd))
    }
}

/// Compares `Z_du` with central differences of `Z` at `probes` random points
/// of `[-scale, scale]^N`. Returns the largest relative deviation.
pub fn check_derivative(
    nl: &dyn Nonlinearity,
    horizon: usize,
    probes: usize,
    scale: f64,
    seed: u64,
    rel_tol: f64,
) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = nl.dim();
    let mut worst = 0.0f64;
    for probe in 0..probes {
        let z = Vector::from_fn(dim, |_, _| rng.random_range(-scale..scale));
        let n = rng.random_range(0..=horizon);
        let eps = 0.0;
        let jac = nl.jacobian(&z, n, eps);
        let mut fd = Matrix::zeros(dim, dim);
        for j in 0..dim {
            let h = 1e-6 * (1.0 + z[j].abs());
            let mut plus = z.clone();
            let mut minus = z.clone();
            plus[j] += h;
            minus[j] -= h;
            fd.set_column(j, &((nl.eval(&plus, n, eps) - nl.eval(&minus, n, eps)) / (2.0 * h)));
        }
        let deviation = (&fd - &jac).norm() / (1.0 + jac.norm());
        worst = worst.max(deviation);
        if deviation > rel_tol || !deviation.is_finite() {
            return Err(Error::DerivativeMismatch { probe, deviation });
        }
    }
    Ok(worst)
}

fn require_exact(family: &SolutionFamily) -> Result<()> {
    if family.classification.is_exact() {
        Ok(())
    } else {
        Err(Error::QuasisolutionFamily { defect: family.defect_norm })
    }
}

/// `Cᵀ l g[φ]`: projected boundary image of a forcing, in cokernel coordinates.
fn projected_boundary(family: &SolutionFamily, forcing: &Trajectory) -> Result<Vector> {
    let v = family.green.forcing_to_boundary(forcing)?;
    Ok(family.cokernel_basis.transpose() * v)
}

/// The equation for generating constants, `F(c) ∈ R^d`.
pub fn generating_f(problem: &NonlinearProblem, family: &SolutionFamily, c: &Vector) -> Result<Vector> {
    require_exact(family)?;
    if c.len() != family.kernel_dim() {
        return Err(Error::DimensionMismatch {
            context: "generating constant length",
            expected: family.kernel_dim(),
            found: c.len(),
        });
    }
    let z0 = family.member(c);
    projected_boundary(family, &problem.nonlinear_forcing(&z0, 0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NewtonOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Relative central-difference step, `h_j = fd_step·(1 + |c_j|)`.
    pub fd_step: f64,
    pub min_damping: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self { tol: 1e-11, max_iter: 60, fd_step: 1e-6, min_damping: 1e-6 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratingRoot {
    pub c0: Vec<f64>,
    pub residual_norm: f64,
    pub jacobian_rank: usize,
    pub iterations: usize,
    pub converged: bool,
}

impl GeneratingRoot {
    pub fn c0_vector(&self) -> Vector {
        Vector::from_column_slice(&self.c0)
    }
}

fn fd_jacobian(
    problem: &NonlinearProblem,
    family: &SolutionFamily,
    c: &Vector,
    step: f64,
) -> Result<Matrix> {
    let r = c.len();
    let d = family.cokernel_dim();
    let mut jac = Matrix::zeros(d, r);
    for j in 0..r {
        let h = step * (1.0 + c[j].abs());
        let mut plus = c.clone();
        let mut minus = c.clone();
        plus[j] += h;
        minus[j] -= h;
        let col = (generating_f(problem, family, &plus)? - generating_f(problem, family, &minus)?) / (2.0 * h);
        jac.set_column(j, &col);
    }
    Ok(jac)
}

/// Central-difference Jacobian `∂F/∂c`.
pub fn generating_jacobian(problem: &NonlinearProblem, family: &SolutionFamily, c: &Vector) -> Result<Matrix> {
    fd_jacobian(problem, family, c, NewtonOptions::default().fd_step)
}

/// Damped Newton on `F(c) = 0` with pseudoinverse steps.
///
/// Non-convergence is not an error: the best iterate is returned with
/// `converged = false`.
pub fn solve_generating(
    problem: &NonlinearProblem,
    family: &SolutionFamily,
    c_init: &Vector,
    opts: &NewtonOptions,
) -> Result<GeneratingRoot> {
    require_exact(family)?;
    if c_init.len() != family.kernel_dim() {
        return Err(Error::DimensionMismatch {
            context: "initial generating constant length",
            expected: family.kernel_dim(),
            found: c_init.len(),
        });
    }
    if family.cokernel_dim() == 0 {
        return Ok(GeneratingRoot {
            c0: c_init.iter().copied().collect(),
            residual_norm: 0.0,
            jacobian_rank: 0,
            iterations: 0,
            converged: true,
        });
    }
    let mut c = c_init.clone();
    let mut fc = generating_f(problem, family, &c)?;
    let mut norm = fc.norm();
    let mut jacobian_rank = 0;
    let mut iterations = 0;
    while norm > opts.tol && iterations < opts.max_iter && !c.is_empty() {
        let jac = fd_jacobian(problem, family, &c, opts.fd_step)?;
        let inv = GeneralizedInverse::new_allow_empty(&jac, Tolerance::Default)?;
        jacobian_rank = inv.rank.rank;
        let step = -(&inv.pinv * &fc);
        let mut lambda = 1.0;
        let mut accepted = None;
        while lambda >= opts.min_damping {
            let trial = &c + &step * lambda;
            let ft = generating_f(problem, family, &trial)?;
            if ft.norm() < norm {
                accepted = Some((trial, ft));
                break;
            }
            lambda *= 0.5;
        }
        iterations += 1;
        match accepted {
            Some((trial, ft)) => {
                c = trial;
                norm = ft.norm();
                fc = ft;
            }
            None => break,
        }
    }
    if iterations == 0 && !c.is_empty() {
        let jac = fd_jacobian(problem, family, &c, opts.fd_step)?;
        jacobian_rank = GeneralizedInverse::new_allow_empty(&jac, Tolerance::Default)?.rank.rank;
    }
    Ok(GeneratingRoot {
        c0: c.iter().copied().collect(),
        residual_norm: norm,
        jacobian_rank,
        iterations,
        converged: norm <= opts.tol,
    })
}

/// Box of Newton seeds: `count` points per kernel coordinate on `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeedGrid {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl SeedGrid {
    pub fn points(&self, r: usize) -> Vec<Vector> {
        let axis: Vec<f64> = if self.count <= 1 {
            vec![0.5 * (self.lo + self.hi)]
        } else {
            (0..self.count)
                .map(|i| self.lo + (self.hi - self.lo) * i as f64 / (self.count - 1) as f64)
                .collect()
        };
        let total = axis.len().pow(r as u32);
        (0..total)
            .map(|mut idx| {
                Vector::from_fn(r, |_, _| {
                    let v = axis[idx % axis.len()];
                    idx /= axis.len();
                    v
                })
            })
            .collect()
    }
}

/// Distinct converged roots reached from every seed of the grid, in
/// lexicographic order of `c⁰`.
pub fn find_roots(
    problem: &NonlinearProblem,
    family: &SolutionFamily,
    grid: &SeedGrid,
    opts: &NewtonOptions,
) -> Result<Vec<GeneratingRoot>> {
    let mut roots: Vec<GeneratingRoot> = Vec::new();
    for seed in grid.points(family.kernel_dim()) {
        let root = solve_generating(problem, family, &seed, opts)?;
        if !root.converged {
            continue;
        }
        let c = root.c0_vector();
        let duplicate = roots
            .iter()
            .any(|other| (other.c0_vector() - &c).norm() <= 1e-6 * (1.0 + c.norm()));
        if !duplicate {
            roots.push(root);
        }
    }
    roots.sort_by(|a, b| {
        a.c0.iter()
            .zip(&b.c0)
            .map(|(x, y)| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(roots)
}

/// `n ↦ Z_du(z₀(n, c⁰), n, 0)`.
fn jacobians_along(problem: &NonlinearProblem, z0: &Trajectory) -> Vec<Matrix> {
    z0.values()
        .iter()
        .enumerate()
        .map(|(n, v)| problem.nonlinearity.jacobian(v, n, 0.0))
        .collect()
}

fn apply_along(jacobians: &[Matrix], u: &Trajectory) -> Trajectory {
    u.map(|n, v| &jacobians[n] * v)
}

/// `B₀ ∈ R^{d×r}`: column `j` is `-Cᵀ l g[Z_du(z₀(·, c⁰), ·, 0) w_j]`.
pub fn assemble_b0(problem: &NonlinearProblem, family: &SolutionFamily, c0: &Vector) -> Result<Matrix> {
    require_exact(family)?;
    let z0 = family.member(c0);
    let jacobians = jacobians_along(problem, &z0);
    let mut b0 = Matrix::zeros(family.cokernel_dim(), family.kernel_dim());
    for (j, w) in family.kernel_basis.iter().enumerate() {
        let col = projected_boundary(family, &apply_along(&jacobians, w))?;
        b0.set_column(j, &(-col));
    }
    Ok(b0)
}

/// Outcome of the test `P_{N(B₀ᵀ)} P_{N(Qᵀ)} = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SufficiencyCheck {
    pub holds: bool,
    /// Frobenius norm of `P_{N(B₀ᵀ)}` in cokernel coordinates.
    pub product_norm: f64,
    pub rank: usize,
    pub required_rank: usize,
    pub tolerance: f64,
    /// Orthonormal columns spanning `N(B₀ᵀ)` in cokernel coordinates.
    #[serde(skip)]
    pub null_directions: Matrix,
}

pub fn check_sufficient(b0: &Matrix) -> Result<SufficiencyCheck> {
    let d = b0.nrows();
    let inv = GeneralizedInverse::new_allow_empty(b0, Tolerance::Default)?;
    let product_norm = inv.cokernel_projector.norm();
    let rank = inv.rank.rank;
    Ok(SufficiencyCheck {
        holds: rank == d,
        product_norm,
        rank,
        required_rank: d,
        tolerance: inv.rank.tolerance,
        null_directions: inv.cokernel_basis,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IterationOptions {
    /// Sup-norm Cauchy tolerance on successive iterates.
    pub tol: f64,
    pub max_iter: usize,
    /// Abort when `‖u_k‖_∞` exceeds this.
    pub blowup: f64,
    /// Final residual confirmation: recurrence and boundary residuals must be
    /// below `residual_tol·(1 + scale)`.
    pub residual_tol: f64,
    /// Run even when the sufficient condition fails.
    pub force: bool,
}

impl Default for IterationOptions {
    fn default() -> Self {
        Self { tol: 1e-10, max_iter: 200, blowup: 1e8, residual_tol: 1e-8, force: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub k: usize,
    pub c_norm: f64,
    pub ubar_norm: f64,
    pub increment: f64,
    pub recurrence_residual: f64,
    pub boundary_residual: f64,
    /// `‖Cᵀ l g[Z(z₀,·,0) + Z_du u + ℛ(u)]‖`, the projected solvability residual.
    pub condition_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationTrace {
    pub records: Vec<IterationRecord>,
    pub converged: bool,
    pub diverged: bool,
    pub iterations: usize,
    /// `‖F(c⁰)‖` of the generating constant the iteration started from.
    pub generating_residual: f64,
    pub forced: bool,
}

/// `ℛ(u, n, ε) = Z(z₀ + u, n, ε) - Z(z₀, n, 0) - Z_du(z₀, n, 0) u`.
pub fn remainder(
    nl: &dyn Nonlinearity,
    z0: &Vector,
    u: &Vector,
    n: usize,
    eps: f64,
) -> Vector {
    nl.eval(&(z0 + u), n, eps) - nl.eval(z0, n, 0.0) - nl.jacobian(z0, n, 0.0) * u
}

/// The perturbation iteration around `z₀(·, c⁰)`.
///
/// Starting from `u₀ = c₀ = ū₀ = 0`, each step computes
///
/// ```text
/// ū_{k+1} = ε G[Z(z₀,·,0) + Z_du u_k + ℛ(u_k), 0]
/// c_{k+1} = B₀⁺ Cᵀ l g[Z_du ū_{k+1} + ℛ(u_k)]
/// u_{k+1} = Φ(·, 0) K c_{k+1} + ū_{k+1}
/// ```
///
/// where `K` is the orthonormal kernel basis, and returns `z₀(·, c⁰) + u`.
pub fn iterate(
    problem: &NonlinearProblem,
    family: &SolutionFamily,
    c0: &Vector,
    opts: &IterationOptions,
) -> Result<(Trajectory, IterationTrace)> {
    require_exact(family)?;
    let b0 = assemble_b0(problem, family, c0)?;
    let gate = check_sufficient(&b0)?;
    if !gate.holds {
        if !opts.force {
            return Err(Error::SufficientConditionFailed { rank: gate.rank, required: gate.required_rank });
        }
        warn!("sufficient condition fails (rank {} < {}); iterating anyway", gate.rank, gate.required_rank);
    }
    let b0_pinv = GeneralizedInverse::new_allow_empty(&b0, Tolerance::Default)?.pinv;
    let eps = problem.epsilon;
    let nl = problem.nonlinearity.as_ref();
    let z0 = family.member(c0);
    let generating_residual = projected_boundary(family, &problem.nonlinear_forcing(&z0, 0.0))?.norm();
    let z_at_z0 = problem.nonlinear_forcing(&z0, 0.0);
    let jacobians = jacobians_along(problem, &z0);
    let zero_target = Vector::zeros(problem.linear.boundary.codim());
    let alpha_scale = 1.0 + problem.linear.boundary.target().norm();

    let dim = problem.linear.dim();
    let m = problem.linear.horizon();
    let r = family.kernel_dim();
    let mut u = Trajectory::zeros(dim, m);
    let mut ubar = Trajectory::zeros(dim, m);
    let mut c = Vector::zeros(r);
    let mut records = Vec::new();
    let mut converged = false;
    let mut diverged = false;

    let remainders = |u: &Trajectory| -> Trajectory {
        u.map(|n, un| remainder(nl, z0.at(n), un, n, eps))
    };

    for k in 1..=opts.max_iter {
        let rem = remainders(&u);
        let phi = z_at_z0.add(&apply_along(&jacobians, &u)).add(&rem);
        let ubar_next = family.green.apply(&phi, &zero_target)?.scaled(eps);
        let psi = apply_along(&jacobians, &ubar_next).add(&rem);
        let c_next = &b0_pinv * projected_boundary(family, &psi)?;
        let u_next = family.kernel_part(&c_next).add(&ubar_next);

        let increment = u_next
            .sub(&u)
            .sup_norm()
            .max(ubar_next.sub(&ubar).sup_norm())
            .max((&c_next - &c).norm());
        u = u_next;
        ubar = ubar_next;
        c = c_next;

        let z = z0.add(&u);
        let (recurrence_residual, boundary_residual) = problem.residuals(&z)?;
        let rem_now = remainders(&u);
        let phi_now = z_at_z0.add(&apply_along(&jacobians, &u)).add(&rem_now);
        let condition_residual = projected_boundary(family, &phi_now)?.norm();
        records.push(IterationRecord {
            k,
            c_norm: c.norm(),
            ubar_norm: ubar.sup_norm(),
            increment,
            recurrence_residual,
            boundary_residual,
            condition_residual,
        });

        let size = u.sup_norm();
        if !size.is_finite() || size > opts.blowup {
            diverged = true;
            break;
        }
        if increment <= opts.tol {
            converged = recurrence_residual <= opts.residual_tol * (1.0 + z.sup_norm())
                && boundary_residual <= opts.residual_tol * alpha_scale;
            break;
        }
    }
    let iterations = records.len();
    Ok((
        z0.add(&u),
        IterationTrace { records, converged, diverged, iterations, generating_residual, forced: !gate.holds },
    ))
}

/// One grid point of an ε-sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub epsilon: f64,
    /// Distinct roots found from the seed grid (0 when no grid is given).
    pub roots_found: usize,
    pub root_converged: bool,
    pub c0: Vec<f64>,
    pub f_norm: f64,
    pub sufficient: bool,
    pub converged: bool,
    pub iterations: usize,
    /// Absent when the iteration was not run at this point.
    pub recurrence_residual: Option<f64>,
    pub boundary_residual: Option<f64>,
}

/// Parameter continuation over `eps_grid`.
///
/// At each point the nonlinearity is frozen at that ε (see
/// [`NonlinearProblem::frozen`]), the equation for generating constants is
/// solved from the previous converged root (or `seed`), and the perturbation
/// iteration is run from that root. Failures are recorded and the sweep moves
/// on.
pub fn sweep(
    problem: &NonlinearProblem,
    family: &SolutionFamily,
    eps_grid: &[f64],
    seed: &Vector,
    grid: Option<&SeedGrid>,
    newton: &NewtonOptions,
    iteration: &IterationOptions,
) -> Result<Vec<SweepPoint>> {
    require_exact(family)?;
    let mut points = Vec::with_capacity(eps_grid.len());
    let mut continuation = seed.clone();
    for &eps in eps_grid {
        let local = problem.with_epsilon(eps).frozen();
        let mut root = solve_generating(&local, family, &continuation, newton)?;
        let roots_found = match grid {
            Some(g) => {
                let all = find_roots(&local, family, g, newton)?;
                if !root.converged {
                    if let Some(best) = all.first() {
                        root = best.clone();
                    }
                }
                all.len()
            }
            None => 0,
        };
        let c0 = root.c0_vector();
        let mut point = SweepPoint {
            epsilon: eps,
            roots_found,
            root_converged: root.converged,
            c0: root.c0.clone(),
            f_norm: root.residual_norm,
            sufficient: false,
            converged: false,
            iterations: 0,
            recurrence_residual: None,
            boundary_residual: None,
        };
        if root.converged {
            continuation = c0.clone();
            let b0 = assemble_b0(&local, family, &c0)?;
            point.sufficient = check_sufficient(&b0)?.holds;
            if point.sufficient {
                let (z, trace) = iterate(&local, family, &c0, iteration)?;
                let (rec, bnd) = local.residuals(&z)?;
                point.converged = trace.converged;
                point.iterations = trace.iterations;
                point.recurrence_residual = Some(rec);
                point.boundary_residual = Some(bnd);
            }
        } else {
            continuation = seed.clone();
        }
        points.push(point);
    }
    Ok(points)
}

//! The generating linear problem `z(n+1) = A_n z(n) + f(n)`, `l z = α`.
//!
//! Index convention: `Φ(n, n) = I` and `Φ(n, i) = A_{n-1} ⋯ A_i` for `n > i`,
//! so that `z(n) = Φ(n, i) z(i)` along the homogeneous recurrence. The forced
//! response from a zero initial state is `g(n) = Σ_{i<n} Φ(n, i+1) f(i)`.
//!
//! Substituting `z(n) = Φ(n, 0) z₀ + g(n)` into the boundary form gives the
//! finite-dimensional equation `Q z₀ = h` with `Q = l Φ(·, 0)` and
//! `h = α - l g`. Its solvability is decided by `P_{N(Qᵀ)} h`; the solutions
//! (or least-squares quasisolutions) are `Q⁺h + N(Q)`.

use serde::{Deserialize, Serialize};

use crate::boundary::BoundaryOperator;
use crate::error::{Error, Result};
use crate::linalg::{self, GeneralizedInverse, Matrix, Tolerance, Vector};

/// The system matrices `A_0, …, A_{m-1}` over the window `J = {0, …, m}`.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorSequence {
    dim: usize,
    matrices: Vec<Matrix>,
}

impl OperatorSequence {
    pub fn new(dim: usize, matrices: Vec<Matrix>) -> Result<Self> {
        if matrices.is_empty() {
            return Err(Error::InvalidArgument("operator sequence needs m >= 1 matrices".into()));
        }
        for a in &matrices {
            if a.shape() != (dim, dim) {
                return Err(Error::DimensionMismatch {
                    context: "system matrix shape",
                    expected: dim,
                    found: if a.nrows() != dim { a.nrows() } else { a.ncols() },
                });
            }
            linalg::ensure_finite(a)?;
        }
        Ok(Self { dim, matrices })
    }

    pub fn constant(a: Matrix, horizon: usize) -> Result<Self> {
        let dim = a.nrows();
        Self::new(dim, vec![a; horizon])
    }

    pub fn identity(dim: usize, horizon: usize) -> Result<Self> {
        Self::constant(Matrix::identity(dim, dim), horizon)
    }

    /// Constant `[[1, 1], [1, 0]]`.
    pub fn fibonacci(horizon: usize) -> Result<Self> {
        Self::constant(Matrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 0.0]), horizon)
    }

    /// Constant planar rotation by `theta`.
    pub fn rotation(theta: f64, horizon: usize) -> Result<Self> {
        let (s, c) = theta.sin_cos();
        Self::constant(Matrix::from_row_slice(2, 2, &[c, -s, s, c]), horizon)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `m`, the last index of the window.
    pub fn horizon(&self) -> usize {
        self.matrices.len()
    }

    pub fn matrix(&self, n: usize) -> &Matrix {
        &self.matrices[n]
    }

    pub fn matrices(&self) -> &[Matrix] {
        &self.matrices
    }

    /// `Φ(n, 0)` for every `n` in the window.
    pub fn fundamental(&self) -> Vec<Matrix> {
        let mut out = Vec::with_capacity(self.horizon() + 1);
        let mut phi = Matrix::identity(self.dim, self.dim);
        out.push(phi.clone());
        for a in &self.matrices {
            phi = a * phi;
            out.push(phi.clone());
        }
        out
    }
}

/// A sequence `n ↦ v(n) ∈ R^N` over the window `{0, …, m}`.
///
/// Used both for forcings (where the value at `m` never enters the
/// recurrence) and for trajectories.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    values: Vec<Vector>,
}

/// Forcing terms `f(n)` share the representation of trajectories.
pub type ForcingSequence = Trajectory;

impl Trajectory {
    pub fn new(values: Vec<Vector>) -> Result<Self> {
        let dim = values
            .first()
            .map(Vector::len)
            .ok_or_else(|| Error::InvalidArgument("empty sequence".into()))?;
        for v in &values {
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    context: "sequence entry length",
                    expected: dim,
                    found: v.len(),
                });
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidArgument("non-finite sequence entry".into()));
            }
        }
        Ok(Self { values })
    }

    pub fn zeros(dim: usize, horizon: usize) -> Self {
        Self { values: vec![Vector::zeros(dim); horizon + 1] }
    }

    pub fn constant(v: Vector, horizon: usize) -> Self {
        Self { values: vec![v; horizon + 1] }
    }

    pub fn from_fn(dim: usize, horizon: usize, f: impl FnMut(usize) -> Vector) -> Self {
        let values: Vec<Vector> = (0..=horizon).map(f).collect();
        debug_assert!(values.iter().all(|v| v.len() == dim));
        Self { values }
    }

    pub fn dim(&self) -> usize {
        self.values[0].len()
    }

    pub fn horizon(&self) -> usize {
        self.values.len() - 1
    }

    pub fn at(&self, n: usize) -> &Vector {
        &self.values[n]
    }

    pub fn values(&self) -> &[Vector] {
        &self.values
    }

    pub fn add(&self, other: &Trajectory) -> Trajectory {
        debug_assert_eq!(self.values.len(), other.values.len());
        Trajectory {
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Trajectory) -> Trajectory {
        self.add(&other.scaled(-1.0))
    }

    pub fn scaled(&self, s: f64) -> Trajectory {
        Trajectory { values: self.values.iter().map(|v| v * s).collect() }
    }

    pub fn map(&self, mut f: impl FnMut(usize, &Vector) -> Vector) -> Trajectory {
        Trajectory { values: self.values.iter().enumerate().map(|(n, v)| f(n, v)).collect() }
    }

    /// `max_n ‖v(n)‖₂`.
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn min_entry(&self) -> f64 {
        self.values.iter().flat_map(|v| v.iter().copied()).fold(f64::INFINITY, f64::min)
    }

    /// `max_n ‖z(n+1) - A_n z(n) - f(n)‖₂` over `n < m`.
    pub fn recurrence_residual(&self, system: &OperatorSequence, forcing: &ForcingSequence) -> f64 {
        (0..system.horizon())
            .map(|n| (self.at(n + 1) - system.matrix(n) * self.at(n) - forcing.at(n)).norm())
            .fold(0.0, f64::max)
    }
}

fn check_sequence(system: &OperatorSequence, seq: &Trajectory, context: &'static str) -> Result<()> {
    if seq.dim() != system.dim() {
        return Err(Error::DimensionMismatch { context, expected: system.dim(), found: seq.dim() });
    }
    if seq.horizon() != system.horizon() {
        return Err(Error::DimensionMismatch {
            context,
            expected: system.horizon() + 1,
            found: seq.horizon() + 1,
        });
    }
    Ok(())
}

fn check_boundary(system: &OperatorSequence, l: &BoundaryOperator) -> Result<()> {
    if l.dim() != system.dim() {
        return Err(Error::DimensionMismatch {
            context: "boundary operator state dimension",
            expected: system.dim(),
            found: l.dim(),
        });
    }
    l.check_window(system.horizon())
}

/// The state-transition matrix `Φ(n, i)`.
pub fn evolution(system: &OperatorSequence, n: usize, i: usize) -> Result<Matrix> {
    let m = system.horizon();
    if n > m {
        return Err(Error::IndexOutOfWindow { index: n, horizon: m });
    }
    if i > n {
        return Err(Error::BackwardEvolution { n, i });
    }
    let mut phi = Matrix::identity(system.dim(), system.dim());
    for k in i..n {
        phi = system.matrix(k) * phi;
    }
    Ok(phi)
}

/// `g(n) = Σ_{i<n} Φ(n, i+1) f(i)`, the response to `f` from a zero initial state.
pub fn particular_forced(system: &OperatorSequence, forcing: &ForcingSequence) -> Result<Trajectory> {
    check_sequence(system, forcing, "forcing sequence")?;
    let m = system.horizon();
    let mut g = vec![Vector::zeros(system.dim()); m + 1];
    // Superpose the impulse response of every f(i), launched at time i + 1.
    for i in 0..m {
        let mut pulse = forcing.at(i).clone();
        g[i + 1] += &pulse;
        for n in i + 1..m {
            pulse = system.matrix(n) * pulse;
            g[n + 1] += &pulse;
        }
    }
    Ok(Trajectory { values: g })
}

/// `Q = Σ_k L_k Φ(n_k, 0)`, the matrix of `c ↦ l(Φ(·, 0) c)`.
pub fn assemble_q(system: &OperatorSequence, l: &BoundaryOperator) -> Result<Matrix> {
    check_boundary(system, l)?;
    let fundamental = system.fundamental();
    Ok(assemble_q_from(&fundamental, l))
}

fn assemble_q_from(fundamental: &[Matrix], l: &BoundaryOperator) -> Matrix {
    let dim = fundamental[0].nrows();
    let mut q = Matrix::zeros(l.codim(), dim);
    for s in l.samples() {
        q += &s.weights * &fundamental[s.point];
    }
    q
}

/// `h = α - l g` with `g = particular_forced(A, f)`.
pub fn assemble_h(
    system: &OperatorSequence,
    forcing: &ForcingSequence,
    l: &BoundaryOperator,
) -> Result<Vector> {
    check_boundary(system, l)?;
    let g = particular_forced(system, forcing)?;
    Ok(l.target() - l.apply(&g)?)
}

/// Default rank cutoff for an assembled `Q`.
///
/// `Q` is a sum of products of up to `m` system matrices, so its rounding
/// error scales with `Σ_k ‖L_k‖·‖Φ(n_k, 0)‖` rather than with `σ_max(Q)`; a
/// resonant `Q` that vanishes in exact arithmetic has only rounding noise left.
pub fn assembly_tolerance(system: &OperatorSequence, l: &BoundaryOperator) -> f64 {
    let fundamental = system.fundamental();
    assembly_tolerance_from(&fundamental, l)
}

fn assembly_tolerance_from(fundamental: &[Matrix], l: &BoundaryOperator) -> f64 {
    let dim = fundamental[0].nrows();
    let scale: f64 = l
        .samples()
        .iter()
        .map(|s| s.weights.norm() * fundamental[s.point].norm())
        .sum();
    let m = fundamental.len();
    8.0 * l.codim().max(dim) as f64 * m as f64 * f64::EPSILON * scale
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    /// `P_{N(Qᵀ)} h = 0` and `N(Q) = {0}`.
    UniqueClassical,
    /// `P_{N(Qᵀ)} h = 0` with a nontrivial kernel.
    Family,
    /// `P_{N(Qᵀ)} h ≠ 0`: least-squares solutions only.
    Quasisolution,
}

impl Classification {
    pub fn is_exact(self) -> bool {
        !matches!(self, Classification::Quasisolution)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolvabilityReport {
    pub classification: Classification,
    /// `‖P_{N(Qᵀ)} h‖`.
    pub defect_norm: f64,
    /// `r = dim N(Q)`.
    pub kernel_dim: usize,
    /// `d = dim N(Qᵀ)`.
    pub cokernel_dim: usize,
    /// `r - d`.
    pub fredholm_index: i64,
    pub rank: usize,
    /// Rank cutoff applied to the singular values of `Q`.
    pub tolerance_used: f64,
    /// Defects at or below this value count as zero.
    pub classification_threshold: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// `None` selects [`assembly_tolerance`].
    pub rank_tolerance: Option<Tolerance>,
    /// Relative threshold: exact iff `defect ≤ tol·(1 + ‖h‖)`.
    pub classification_tol: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { rank_tolerance: None, classification_tol: 1e-9 }
    }
}

fn report_from(g: &GeneralizedInverse, h: &Vector, classification_tol: f64) -> SolvabilityReport {
    let defect_norm = (&g.cokernel_projector * h).norm();
    let classification_threshold = classification_tol * (1.0 + h.norm());
    let kernel_dim = g.rank.kernel_dim();
    let cokernel_dim = g.rank.cokernel_dim();
    let classification = if defect_norm > classification_threshold {
        Classification::Quasisolution
    } else if kernel_dim == 0 {
        Classification::UniqueClassical
    } else {
        Classification::Family
    };
    SolvabilityReport {
        classification,
        defect_norm,
        kernel_dim,
        cokernel_dim,
        fredholm_index: kernel_dim as i64 - cokernel_dim as i64,
        rank: g.rank.rank,
        tolerance_used: g.rank.tolerance,
        classification_threshold,
    }
}

/// Solvability of `Q z₀ = h`.
pub fn classify(q: &Matrix, h: &Vector, tol: Tolerance, classification_tol: f64) -> Result<SolvabilityReport> {
    if h.len() != q.nrows() {
        return Err(Error::DimensionMismatch {
            context: "right-hand side length",
            expected: q.nrows(),
            found: h.len(),
        });
    }
    let g = GeneralizedInverse::new_allow_empty(q, tol)?;
    Ok(report_from(&g, h, classification_tol))
}

/// The generalized Green operator of one `(A, l)` pair, with `Φ(·, 0)` and
/// `Q⁺` computed once.
#[derive(Debug, Clone)]
pub struct GreenOperator {
    system: OperatorSequence,
    boundary: BoundaryOperator,
    fundamental: Vec<Matrix>,
    q: Matrix,
    inverse: GeneralizedInverse,
}

impl GreenOperator {
    pub fn new(system: &OperatorSequence, boundary: &BoundaryOperator, opts: &SolveOptions) -> Result<Self> {
        check_boundary(system, boundary)?;
        let fundamental = system.fundamental();
        let q = assemble_q_from(&fundamental, boundary);
        let tol = opts
            .rank_tolerance
            .unwrap_or_else(|| Tolerance::Absolute(assembly_tolerance_from(&fundamental, boundary)));
        let inverse = GeneralizedInverse::new_allow_empty(&q, tol)?;
        Ok(Self { system: system.clone(), boundary: boundary.clone(), fundamental, q, inverse })
    }

    pub fn system(&self) -> &OperatorSequence {
        &self.system
    }

    pub fn boundary(&self) -> &BoundaryOperator {
        &self.boundary
    }

    pub fn q(&self) -> &Matrix {
        &self.q
    }

    pub fn inverse(&self) -> &GeneralizedInverse {
        &self.inverse
    }

    pub fn fundamental(&self) -> &[Matrix] {
        &self.fundamental
    }

    /// `n ↦ Φ(n, 0) x0`.
    pub fn propagate(&self, x0: &Vector) -> Trajectory {
        Trajectory { values: self.fundamental.iter().map(|phi| phi * x0).collect() }
    }

    pub fn forced_response(&self, forcing: &ForcingSequence) -> Result<Trajectory> {
        particular_forced(&self.system, forcing)
    }

    /// `l g_φ`: the boundary image of the forced response.
    pub fn forcing_to_boundary(&self, forcing: &ForcingSequence) -> Result<Vector> {
        self.boundary.apply(&self.forced_response(forcing)?)
    }

    /// `G[φ, β](n) = Φ(n, 0) Q⁺ (β - l g_φ) + g_φ(n)`.
    pub fn apply(&self, forcing: &ForcingSequence, target: &Vector) -> Result<Trajectory> {
        if target.len() != self.boundary.codim() {
            return Err(Error::DimensionMismatch {
                context: "boundary target length",
                expected: self.boundary.codim(),
                found: target.len(),
            });
        }
        let g = self.forced_response(forcing)?;
        let h = target - self.boundary.apply(&g)?;
        Ok(self.propagate(&(&self.inverse.pinv * h)).add(&g))
    }
}

/// `G[φ, β]` for a one-off right-hand side.
pub fn green_apply(
    system: &OperatorSequence,
    l: &BoundaryOperator,
    forcing: &ForcingSequence,
    target: &Vector,
    opts: &SolveOptions,
) -> Result<Trajectory> {
    GreenOperator::new(system, l, opts)?.apply(forcing, target)
}

/// A complete linear problem.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProblem {
    pub system: OperatorSequence,
    pub forcing: ForcingSequence,
    pub boundary: BoundaryOperator,
}

impl LinearProblem {
    pub fn new(system: OperatorSequence, forcing: ForcingSequence, boundary: BoundaryOperator) -> Result<Self> {
        check_sequence(&system, &forcing, "forcing sequence")?;
        check_boundary(&system, &boundary)?;
        Ok(Self { system, forcing, boundary })
    }

    pub fn dim(&self) -> usize {
        self.system.dim()
    }

    pub fn horizon(&self) -> usize {
        self.system.horizon()
    }
}

/// `z₀(n, c) = z_p(n) + Σ_j c_j w_j(n)`.
#[derive(Debug, Clone)]
pub struct SolutionFamily {
    pub particular: Trajectory,
    /// `w_j(n) = Φ(n, 0) b_j`.
    pub kernel_basis: Vec<Trajectory>,
    /// `Q⁺ h`.
    pub initial_particular: Vector,
    /// `N × r`, orthonormal basis `b_j` of `N(Q)`.
    pub kernel_initial_basis: Matrix,
    /// `q × d`, orthonormal basis of `N(Qᵀ)`; coordinates for projected conditions.
    pub cokernel_basis: Matrix,
    pub classification: Classification,
    pub defect_norm: f64,
    pub green: GreenOperator,
}

impl SolutionFamily {
    pub fn kernel_dim(&self) -> usize {
        self.kernel_basis.len()
    }

    pub fn cokernel_dim(&self) -> usize {
        self.cokernel_basis.ncols()
    }

    pub fn member(&self, c: &Vector) -> Trajectory {
        assert_eq!(c.len(), self.kernel_dim(), "coefficient vector length");
        self.kernel_basis
            .iter()
            .zip(c.iter())
            .fold(self.particular.clone(), |acc, (w, &cj)| acc.add(&w.scaled(cj)))
    }

    /// `Σ_j c_j w_j`, the kernel part of a member.
    pub fn kernel_part(&self, c: &Vector) -> Trajectory {
        self.green.propagate(&(&self.kernel_initial_basis * c))
    }
}

/// Classifies the problem and returns the solution family (least-squares
/// family in the quasisolution branch).
pub fn solve_family(problem: &LinearProblem, opts: &SolveOptions) -> Result<(SolvabilityReport, SolutionFamily)> {
    let green = GreenOperator::new(&problem.system, &problem.boundary, opts)?;
    let g = green.forced_response(&problem.forcing)?;
    let h = problem.boundary.target() - problem.boundary.apply(&g)?;
    let report = report_from(&green.inverse, &h, opts.classification_tol);
    let initial_particular = &green.inverse.pinv * &h;
    let particular = green.propagate(&initial_particular).add(&g);
    let kernel_initial_basis = green.inverse.kernel_basis.clone();
    let kernel_basis = kernel_initial_basis
        .column_iter()
        .map(|b| green.propagate(&b.into_owned()))
        .collect();
    let cokernel_basis = green.inverse.cokernel_basis.clone();
    Ok((
        report,
        SolutionFamily {
            particular,
            kernel_basis,
            initial_particular,
            kernel_initial_basis,
            cokernel_basis,
            classification: report.classification,
            defect_norm: report.defect_norm,
            green,
        },
    ))
}

//! Generalized-inverse substrate: numerical rank, Moore–Penrose pseudoinverse
//! and the orthoprojectors onto kernel and cokernel.
//!
//! Everything here is built on one thin singular value decomposition per
//! matrix, computed by one-sided Jacobi rotations. The projectors are formed from the pseudoinverse
//! (`I - M⁺M` and `I - MM⁺`) so that the Penrose identities and the projector
//! laws hold for the same rank decision.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub type Matrix = DMatrix<f64>;
pub type Vector = DVector<f64>;

/// Builds a matrix from row slices, rejecting ragged input and non-finite entries.
pub fn matrix_from_rows(rows: &[Vec<f64>]) -> Result<Matrix> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    for row in rows {
        if row.len() != ncols {
            return Err(Error::DimensionMismatch {
                context: "matrix row length",
                expected: ncols,
                found: row.len(),
            });
        }
    }
    let m = Matrix::from_fn(nrows, ncols, |i, j| rows[i][j]);
    ensure_finite(&m)?;
    Ok(m)
}

pub fn ensure_finite(m: &Matrix) -> Result<()> {
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            if !m[(i, j)].is_finite() {
                return Err(Error::NonFinite { row: i, col: j });
            }
        }
    }
    Ok(())
}

/// How the rank cutoff is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Tolerance {
    /// `max(rows, cols) · ε_machine · σ_max`.
    #[default]
    Default,
    /// Fixed cutoff.
    Absolute(f64),
    /// Cutoff `factor · σ_max`.
    Relative(f64),
}

impl Tolerance {
    pub fn resolve(self, rows: usize, cols: usize, sigma_max: f64) -> f64 {
        match self {
            Tolerance::Default => rows.max(cols) as f64 * f64::EPSILON * sigma_max,
            Tolerance::Absolute(t) => t,
            Tolerance::Relative(r) => r * sigma_max,
        }
    }
}

/// Outcome of a rank decision, together with the factors it was taken from.
#[derive(Debug, Clone)]
pub struct RankDecision {
    pub rank: usize,
    pub tolerance: f64,
    /// Nonincreasing, length `min(rows, cols)`.
    pub singular_values: Vec<f64>,
    rows: usize,
    cols: usize,
    u: Matrix,
    v_t: Matrix,
}

impl RankDecision {
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn kernel_dim(&self) -> usize {
        self.cols - self.rank
    }

    pub fn cokernel_dim(&self) -> usize {
        self.rows - self.rank
    }
}

const MAX_SWEEPS: usize = 80;

/// Thin SVD `m = u · diag(s) · v_t` by one-sided Jacobi rotations, with `s`
/// sorted nonincreasing. `None` if the sweeps do not converge.
fn jacobi_svd(m: &Matrix) -> Option<(Matrix, Vec<f64>, Matrix)> {
    let (rows, cols) = m.shape();
    if rows < cols {
        let (u, s, v_t) = jacobi_svd(&m.transpose())?;
        return Some((v_t.transpose(), s, u.transpose()));
    }
    let mut w = m.clone();
    let mut v = Matrix::identity(cols, cols);
    let mut converged = cols < 2;
    // Columns this small are rounding noise of a zero singular value.
    let floor = (f64::EPSILON * m.norm()).powi(2);
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..cols {
            for q in p + 1..cols {
                let alpha = w.column(p).norm_squared();
                let beta = w.column(q).norm_squared();
                let gamma = w.column(p).dot(&w.column(q));
                if gamma == 0.0 || alpha <= floor || beta <= floor || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate_columns(&mut w, p, q, c, s);
                rotate_columns(&mut v, p, q, c, s);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return None;
    }
    let norms: Vec<f64> = (0..cols).map(|j| w.column(j).norm()).collect();
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&a, &b| norms[b].partial_cmp(&norms[a]).unwrap_or(std::cmp::Ordering::Equal).then(a.cmp(&b)));
    let s: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
    let u = Matrix::from_fn(rows, cols, |i, k| {
        let j = order[k];
        if norms[j] > 0.0 { w[(i, j)] / norms[j] } else { 0.0 }
    });
    let v_t = Matrix::from_fn(cols, cols, |k, i| v[(i, order[k])]);
    Some((u, s, v_t))
}

fn rotate_columns(m: &mut Matrix, p: usize, q: usize, c: f64, s: f64) {
    for i in 0..m.nrows() {
        let xp = m[(i, p)];
        let xq = m[(i, q)];
        m[(i, p)] = c * xp - s * xq;
        m[(i, q)] = s * xp + c * xq;
    }
}

/// Singular values and rank of `m` under the resolved tolerance.
pub fn numerical_rank(m: &Matrix, tol: Tolerance) -> Result<RankDecision> {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return Err(Error::EmptyMatrix { rows, cols });
    }
    ensure_finite(m)?;
    let (u, singular_values, v_t) = jacobi_svd(m).ok_or(Error::SvdNonConvergence { rows, cols })?;
    let sigma_max = singular_values.first().copied().unwrap_or(0.0);
    let tolerance = tol.resolve(rows, cols, sigma_max);
    let rank = singular_values.iter().filter(|&&s| s > tolerance).count();
    Ok(RankDecision { rank, tolerance, singular_values, rows, cols, u, v_t })
}

/// Moore–Penrose pseudoinverse from the above-tolerance singular triplets.
pub fn pseudoinverse(m: &Matrix, rd: &RankDecision) -> Matrix {
    assert_eq!(m.shape(), rd.shape(), "rank decision taken from another matrix");
    let mut pinv = Matrix::zeros(rd.cols, rd.rows);
    for k in 0..rd.rank {
        let inv = 1.0 / rd.singular_values[k];
        let v = rd.v_t.row(k).transpose();
        let u = rd.u.column(k);
        pinv += (v * u.transpose()) * inv;
    }
    pinv
}

/// `I - M⁺M`, the orthoprojector onto `N(M)`.
pub fn kernel_projector(m: &Matrix, rd: &RankDecision) -> Matrix {
    let pinv = pseudoinverse(m, rd);
    symmetrize(Matrix::identity(rd.cols, rd.cols) - &pinv * m)
}

/// `I - MM⁺`, the orthoprojector onto `N(Mᵀ)`.
pub fn cokernel_projector(m: &Matrix, rd: &RankDecision) -> Matrix {
    let pinv = pseudoinverse(m, rd);
    symmetrize(Matrix::identity(rd.rows, rd.rows) - m * &pinv)
}

fn symmetrize(p: Matrix) -> Matrix {
    (&p + p.transpose()) * 0.5
}

/// Orthonormal basis (as columns) of the range of an orthoprojector of known rank.
///
/// Each column is signed so that its largest-magnitude entry is positive.
pub fn projector_basis(p: &Matrix, dim: usize) -> Matrix {
    let n = p.nrows();
    if dim == 0 {
        return Matrix::zeros(n, 0);
    }
    // Right singular vectors of a symmetric projector: the leading `dim`
    // span its range.
    let (_, _, v_t) = jacobi_svd(p).expect("projector SVD converges");
    let mut basis = Matrix::zeros(n, dim);
    for col in 0..dim {
        let mut v = v_t.row(col).transpose();
        let pivot = v
            .iter()
            .enumerate()
            .fold((0, 0.0f64), |best, (i, x)| if x.abs() > best.1 + 1e-12 { (i, x.abs()) } else { best })
            .0;
        if v[pivot] < 0.0 {
            v = -v;
        }
        basis.set_column(col, &v);
    }
    basis
}

/// Pseudoinverse, projectors and orthonormal kernel/cokernel bases of one matrix.
#[derive(Debug, Clone)]
pub struct GeneralizedInverse {
    pub rank: RankDecision,
    pub pinv: Matrix,
    pub kernel_projector: Matrix,
    pub cokernel_projector: Matrix,
    /// `cols × r`, orthonormal columns spanning `N(M)`.
    pub kernel_basis: Matrix,
    /// `rows × d`, orthonormal columns spanning `N(Mᵀ)`.
    pub cokernel_basis: Matrix,
}

impl GeneralizedInverse {
    pub fn new(m: &Matrix, tol: Tolerance) -> Result<Self> {
        let rank = numerical_rank(m, tol)?;
        let pinv = pseudoinverse(m, &rank);
        let (rows, cols) = m.shape();
        let kernel_projector = symmetrize(Matrix::identity(cols, cols) - &pinv * m);
        let cokernel_projector = symmetrize(Matrix::identity(rows, rows) - m * &pinv);
        let kernel_basis = projector_basis(&kernel_projector, rank.kernel_dim());
        let cokernel_basis = projector_basis(&cokernel_projector, rank.cokernel_dim());
        Ok(Self {
            rank,
            pinv,
            kernel_projector,
            cokernel_projector,
            kernel_basis,
            cokernel_basis,
        })
    }

    /// Like [`GeneralizedInverse::new`], but a matrix with no rows or columns
    /// is accepted and treated as rank zero.
    pub fn new_allow_empty(m: &Matrix, tol: Tolerance) -> Result<Self> {
        let (rows, cols) = m.shape();
        if rows > 0 && cols > 0 {
            return Self::new(m, tol);
        }
        Ok(Self {
            rank: RankDecision {
                rank: 0,
                tolerance: 0.0,
                singular_values: Vec::new(),
                rows,
                cols,
                u: Matrix::zeros(rows, 0),
                v_t: Matrix::zeros(0, cols),
            },
            pinv: Matrix::zeros(cols, rows),
            kernel_projector: Matrix::identity(cols, cols),
            cokernel_projector: Matrix::identity(rows, rows),
            kernel_basis: Matrix::identity(cols, cols),
            cokernel_basis: Matrix::identity(rows, rows),
        })
    }
}

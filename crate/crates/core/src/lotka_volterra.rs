//! Discrete Lotka–Volterra systems of `p` species pairs `(x_i, y_i)`:
//!
//! ```text
//! x_i(n+1) = a_i x_i + b_i y_i + ε g¹_i x_i (1 - Σ_j a_ij y_j) + f¹_i
//! y_i(n+1) = c_i x_i + d_i y_i + ε g²_i y_i (1 - Σ_j b_ij x_j) + f²_i
//! ```
//!
//! with `j = 1, …, t`, plus an exact-integer oracle for the constant
//! Fibonacci system `A = [[1, 1], [1, 0]]` with periodic conditions.
//!
//! State vectors are stacked `(x_1, …, x_p, y_1, …, y_p)`.

use serde::{Deserialize, Serialize};

use crate::boundary::BoundaryOperator;
use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::linear_bvp::{particular_forced, solve_family, LinearProblem, OperatorSequence, SolveOptions, Trajectory};
use crate::nonlinear::Nonlinearity;

/// A scalar coefficient sequence: one value for every `n`, or one per `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Series {
    Constant(f64),
    Values(Vec<f64>),
}

impl Series {
    pub fn at(&self, n: usize) -> f64 {
        match self {
            Series::Constant(v) => *v,
            Series::Values(vs) => vs[n],
        }
    }

    fn check(&self, len: usize, what: &str) -> Result<()> {
        let finite = match self {
            Series::Constant(v) => v.is_finite(),
            Series::Values(vs) => {
                if vs.len() < len {
                    return Err(Error::InvalidArgument(format!(
                        "{what} has {} values, needs {len}",
                        vs.len()
                    )));
                }
                vs.iter().all(|v| v.is_finite())
            }
        };
        if finite {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("{what} is not finite")))
        }
    }
}

impl From<f64> for Series {
    fn from(v: f64) -> Self {
        Series::Constant(v)
    }
}

fn check_len<T>(v: &[T], expected: usize, context: &'static str) -> Result<()> {
    if v.len() == expected {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { context, expected, found: v.len() })
    }
}

/// Gains `g¹_i, g²_i` and interaction tables `a_ij, b_ij` (`p × t`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LvNonlinearity {
    pub p: usize,
    pub t: usize,
    pub g1: Vec<Series>,
    pub g2: Vec<Series>,
    pub a: Vec<Vec<Series>>,
    pub b: Vec<Vec<Series>>,
}

impl LvNonlinearity {
    pub fn new(
        p: usize,
        t: usize,
        g1: Vec<Series>,
        g2: Vec<Series>,
        a: Vec<Vec<Series>>,
        b: Vec<Vec<Series>>,
    ) -> Result<Self> {
        let out = Self { p, t, g1, g2, a, b };
        out.check_shape()?;
        Ok(out)
    }

    /// All gains equal to `gain` and all interactions equal to `interaction`.
    pub fn uniform(p: usize, t: usize, gain: f64, interaction: f64) -> Result<Self> {
        let row = vec![Series::Constant(interaction); t];
        Self::new(
            p,
            t,
            vec![gain.into(); p],
            vec![gain.into(); p],
            vec![row.clone(); p],
            vec![row; p],
        )
    }

    fn check_shape(&self) -> Result<()> {
        if self.p == 0 {
            return Err(Error::InvalidArgument("Lotka-Volterra system needs p >= 1".into()));
        }
        if self.t > self.p {
            return Err(Error::InvalidArgument(format!(
                "interaction count t = {} exceeds p = {}",
                self.t, self.p
            )));
        }
        check_len(&self.g1, self.p, "gain g1 count")?;
        check_len(&self.g2, self.p, "gain g2 count")?;
        check_len(&self.a, self.p, "interaction table a rows")?;
        check_len(&self.b, self.p, "interaction table b rows")?;
        for row in self.a.iter().chain(&self.b) {
            check_len(row, self.t, "interaction table columns")?;
        }
        Ok(())
    }

    fn check_state(&self, z: &Vector) -> Result<()> {
        if z.len() == 2 * self.p {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { context: "Lotka-Volterra state", expected: 2 * self.p, found: z.len() })
        }
    }

    fn check_horizon(&self, horizon: usize) -> Result<()> {
        let len = horizon + 1;
        for s in self.g1.iter().chain(&self.g2) {
            s.check(len, "gain sequence")?;
        }
        for s in self.a.iter().chain(&self.b).flatten() {
            s.check(len, "interaction sequence")?;
        }
        Ok(())
    }
}

/// Components `g¹_i x_i (1 - Σ_j a_ij y_j)` and `g²_i y_i (1 - Σ_j b_ij x_j)`.
pub fn lv_nonlinearity(spec: &LvNonlinearity, z: &Vector, n: usize) -> Result<Vector> {
    spec.check_state(z)?;
    let p = spec.p;
    let mut out = Vector::zeros(2 * p);
    for i in 0..p {
        let (x, y) = (z[i], z[p + i]);
        let sa: f64 = (0..spec.t).map(|j| spec.a[i][j].at(n) * z[p + j]).sum();
        let sb: f64 = (0..spec.t).map(|j| spec.b[i][j].at(n) * z[j]).sum();
        out[i] = spec.g1[i].at(n) * x * (1.0 - sa);
        out[p + i] = spec.g2[i].at(n) * y * (1.0 - sb);
    }
    Ok(out)
}

/// Exact Jacobian of [`lv_nonlinearity`] in `z`.
pub fn lv_derivative(spec: &LvNonlinearity, z: &Vector, n: usize) -> Result<Matrix> {
    spec.check_state(z)?;
    let p = spec.p;
    let mut jac = Matrix::zeros(2 * p, 2 * p);
    for i in 0..p {
        let (x, y) = (z[i], z[p + i]);
        let (g1, g2) = (spec.g1[i].at(n), spec.g2[i].at(n));
        let sa: f64 = (0..spec.t).map(|j| spec.a[i][j].at(n) * z[p + j]).sum();
        let sb: f64 = (0..spec.t).map(|j| spec.b[i][j].at(n) * z[j]).sum();
        jac[(i, i)] += g1 * (1.0 - sa);
        jac[(p + i, p + i)] += g2 * (1.0 - sb);
        for j in 0..spec.t {
            jac[(i, p + j)] -= g1 * x * spec.a[i][j].at(n);
            jac[(p + i, j)] -= g2 * y * spec.b[i][j].at(n);
        }
    }
    Ok(jac)
}

impl Nonlinearity for LvNonlinearity {
    fn dim(&self) -> usize {
        2 * self.p
    }
    fn eval(&self, z: &Vector, n: usize, _eps: f64) -> Vector {
        lv_nonlinearity(self, z, n).expect("state dimension checked by the problem")
    }
    fn jacobian(&self, z: &Vector, n: usize, _eps: f64) -> Matrix {
        lv_derivative(self, z, n).expect("state dimension checked by the problem")
    }
    fn validate(&self, horizon: usize) -> Result<()> {
        self.check_shape()?;
        self.check_horizon(horizon)
    }
}

/// Block system `A_n = [[diag a(n), diag b(n)], [diag c(n), diag d(n)]]`.
pub fn block_system(
    a: &[Series],
    b: &[Series],
    c: &[Series],
    d: &[Series],
    horizon: usize,
) -> Result<OperatorSequence> {
    let p = a.len();
    if p == 0 {
        return Err(Error::InvalidArgument("block system needs p >= 1".into()));
    }
    for blk in [b, c, d] {
        check_len(blk, p, "block coefficient count")?;
    }
    for s in a.iter().chain(b).chain(c).chain(d) {
        s.check(horizon, "block coefficient sequence")?;
    }
    let matrices = (0..horizon)
        .map(|n| {
            let mut m = Matrix::zeros(2 * p, 2 * p);
            for i in 0..p {
                m[(i, i)] = a[i].at(n);
                m[(i, p + i)] = b[i].at(n);
                m[(p + i, i)] = c[i].at(n);
                m[(p + i, p + i)] = d[i].at(n);
            }
            m
        })
        .collect();
    OperatorSequence::new(2 * p, matrices)
}

/// Stacked forcing `(f¹_1, …, f¹_p, f²_1, …, f²_p)`.
pub fn stacked_forcing(f1: &[Series], f2: &[Series], horizon: usize) -> Result<Trajectory> {
    let p = f1.len();
    check_len(f2, p, "forcing f2 count")?;
    for s in f1.iter().chain(f2) {
        s.check(horizon + 1, "forcing sequence")?;
    }
    Ok(Trajectory::from_fn(2 * p, horizon, |n| {
        Vector::from_iterator(2 * p, f1.iter().chain(f2).map(|s| s.at(n)))
    }))
}

/// A full Lotka–Volterra system with periodic conditions over `{0, …, m}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LotkaVolterra {
    pub horizon: usize,
    pub a: Vec<Series>,
    pub b: Vec<Series>,
    pub c: Vec<Series>,
    pub d: Vec<Series>,
    pub f1: Vec<Series>,
    pub f2: Vec<Series>,
    pub nonlinear: LvNonlinearity,
}

impl LotkaVolterra {
    pub fn system(&self) -> Result<OperatorSequence> {
        block_system(&self.a, &self.b, &self.c, &self.d, self.horizon)
    }

    pub fn forcing(&self) -> Result<Trajectory> {
        stacked_forcing(&self.f1, &self.f2, self.horizon)
    }

    pub fn periodic_problem(&self) -> Result<LinearProblem> {
        check_len(&self.a, self.nonlinear.p, "linear coefficient count")?;
        self.nonlinear.validate(self.horizon)?;
        LinearProblem::new(
            self.system()?,
            self.forcing()?,
            BoundaryOperator::periodic(2 * self.nonlinear.p, self.horizon)?,
        )
    }
}

type IMat = [[i128; 2]; 2];

fn imul(x: &IMat, y: &IMat) -> IMat {
    let mut out = [[0; 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = x[i][0] * y[0][j] + x[i][1] * y[1][j];
        }
    }
    out
}

fn idet(x: &IMat) -> i128 {
    x[0][0] * x[1][1] - x[0][1] * x[1][0]
}

fn adjugate(x: &IMat) -> IMat {
    [[x[1][1], -x[0][1]], [-x[1][0], x[0][0]]]
}

/// `A^k` for `A = [[1, 1], [1, 0]]` by repeated multiplication.
pub fn fibonacci_power(k: u32) -> [[i128; 2]; 2] {
    let a = [[1, 1], [1, 0]];
    (0..k).fold([[1, 0], [0, 1]], |acc, _| imul(&acc, &a))
}

/// Fibonacci numbers with `F₀ = F₁ = 1`.
#[derive(Debug, Clone)]
pub struct FibonacciOracle {
    table: Vec<i128>,
}

impl FibonacciOracle {
    pub fn new(max_index: usize) -> Self {
        let mut table = vec![1i128, 1];
        while table.len() <= max_index {
            let k = table.len();
            table.push(table[k - 1] + table[k - 2]);
        }
        Self { table }
    }

    /// Enough entries for every formula at horizon `m`.
    pub fn for_horizon(m: usize) -> Self {
        Self::new(2 * m + 4)
    }

    pub fn fib(&self, j: usize) -> i128 {
        self.table[j]
    }

    /// `[[F_{j+2}, F_{j+1}], [F_{j+1}, F_j]]`.
    pub fn entry_matrix(&self, j: usize) -> [[i128; 2]; 2] {
        [[self.fib(j + 2), self.fib(j + 1)], [self.fib(j + 1), self.fib(j)]]
    }
}

/// `Δ(m) = (F_{m+2} - 1)(F_m - 1) - F²_{m+1}`.
pub fn fib_delta(oracle: &FibonacciOracle, m: usize) -> i128 {
    let f = |j| oracle.fib(j);
    (f(m + 2) - 1) * (f(m) - 1) - f(m + 1) * f(m + 1)
}

/// The four closed-form coefficient formulas `a₁₁, a₁₂, a₂₁, a₂₂` at `(n, m, k)`.
pub fn fib_green_coeffs(oracle: &FibonacciOracle, n: usize, m: usize, k: usize) -> [i128; 4] {
    assert!(k <= m, "k = {k} exceeds m = {m}");
    let f = |j| oracle.fib(j);
    let s = m - k;
    let fs = |shift: usize| f(s + shift);
    let a11 = f(n + 2) * (f(m) * fs(2) - f(m + 1) * fs(1)) - (f(n + 2) * fs(2) + f(n + 1) * fs(1))
        + f(n + 1) * (f(m + 2) * fs(1) - f(m + 1) * fs(2));
    let a12 = f(n + 2) * (f(m) * fs(1) - f(m + 1) * fs(0)) - (f(n + 2) * fs(1) + f(n + 1) * fs(0))
        + f(n + 1) * (f(m + 2) * fs(0) - f(m + 1) * fs(1));
    let a21 = f(n + 1) * (f(m) * fs(2) - f(m + 1) * fs(1)) - (f(n + 1) * fs(2) + f(n + 1) * fs(1))
        + f(n) * (f(m + 2) * fs(1) - f(m + 1) * fs(2));
    let a22 = f(n + 1) * (f(m) * fs(1) - f(m + 1) * fs(0)) - (f(n + 2) * fs(1) + f(n + 1) * fs(0))
        + f(n + 1) * (f(m + 2) * fs(0) - f(m + 1) * fs(1));
    [a11, a12, a21, a22]
}

/// `E(n) · adj(E(m) - I) · E(m - k)` with `E(j)` the entry matrix, flattened
/// row-major: the exact integer values the closed-form coefficients stand for.
pub fn fib_green_oracle(oracle: &FibonacciOracle, n: usize, m: usize, k: usize) -> [i128; 4] {
    let mut q = oracle.entry_matrix(m);
    q[0][0] -= 1;
    q[1][1] -= 1;
    let prod = imul(&imul(&oracle.entry_matrix(n), &adjugate(&q)), &oracle.entry_matrix(m - k));
    [prod[0][0], prod[0][1], prod[1][0], prod[1][1]]
}

/// `Σ_k E(m - k) f(k)` over `k = 0, …, m`.
pub fn fib_solvability(oracle: &FibonacciOracle, f: &Trajectory, m: usize) -> Result<Vector> {
    if f.dim() != 2 || f.horizon() != m {
        return Err(Error::DimensionMismatch { context: "Fibonacci forcing horizon", expected: m, found: f.horizon() });
    }
    let mut out = Vector::zeros(2);
    for k in 0..=m {
        let e = oracle.entry_matrix(m - k);
        let fk = f.at(k);
        for i in 0..2 {
            out[i] += e[i][0] as f64 * fk[0] + e[i][1] as f64 * fk[1];
        }
    }
    Ok(out)
}

/// `n ↦ -(1/Δ(m)) Σ_k a(n, m, k) f(k)` with `a` from [`fib_green_oracle`].
pub fn fib_green_values(oracle: &FibonacciOracle, f: &Trajectory, m: usize) -> Result<Trajectory> {
    if f.dim() != 2 || f.horizon() != m {
        return Err(Error::DimensionMismatch { context: "Fibonacci forcing horizon", expected: m, found: f.horizon() });
    }
    let delta = fib_delta(oracle, m) as f64;
    Ok(Trajectory::from_fn(2, m, |n| {
        let mut acc = Vector::zeros(2);
        for k in 0..=m {
            let a = fib_green_oracle(oracle, n, m, k);
            let fk = f.at(k);
            acc[0] += a[0] as f64 * fk[0] + a[1] as f64 * fk[1];
            acc[1] += a[2] as f64 * fk[0] + a[3] as f64 * fk[1];
        }
        -acc / delta
    }))
}

/// Runs the periodic Fibonacci problem through the general solver and
/// returns the largest deviation from [`fib_green_values`], relative to the
/// largest oracle value.
///
/// The entry matrices satisfy `E(j) = A^{j+2}`, so the closed form describes
/// a periodic problem over `M = m + 2` steps with forcing `A f(k)` for
/// `k ≤ m` and zero at `k = m + 1`; its Green values are the homogeneous part
/// `z_p(n + 2) - g(n + 2)` of that problem's particular solution.
pub fn fib_solver_deviation(oracle: &FibonacciOracle, f: &Trajectory, m: usize) -> Result<f64> {
    let reference = fib_green_values(oracle, f, m)?;
    let horizon = m + 2;
    let a = Matrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 0.0]);
    let shifted = Trajectory::from_fn(2, horizon, |k| if k <= m { &a * f.at(k) } else { Vector::zeros(2) });
    let problem = LinearProblem::new(
        OperatorSequence::fibonacci(horizon)?,
        shifted.clone(),
        BoundaryOperator::periodic(2, horizon)?,
    )?;
    let (_, family) = solve_family(&problem, &SolveOptions::default())?;
    let g = particular_forced(&problem.system, &shifted)?;
    let scale = reference.sup_norm().max(f64::MIN_POSITIVE);
    let worst = (0..=m)
        .map(|n| (family.particular.at(n + 2) - g.at(n + 2) - reference.at(n)).norm())
        .fold(0.0, f64::max);
    Ok(worst / scale)
}

/// Deterministic integer-valued test forcing for the Fibonacci checks.
pub fn fib_test_forcing(m: usize) -> Trajectory {
    Trajectory::from_fn(2, m, |k| {
        Vector::from_vec(vec![(k % 5) as f64 - 2.0, ((3 * k) % 7) as f64 - 3.0])
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FibCheckRow {
    pub m: usize,
    pub delta: i128,
    /// `(k, det(A^k - I))` for every candidate exponent.
    pub dets: Vec<(u32, i128)>,
    /// Exponents `k` with `det(A^k - I) = Δ(m)`.
    pub matching: Vec<u32>,
    /// Per coefficient `a₁₁, a₁₂, a₂₁, a₂₂`: number of `(n, k)` pairs on which
    /// the closed-form formula equals the matrix oracle.
    pub coefficient_agree: [usize; 4],
    pub coefficient_total: usize,
    pub solver_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FibCheck {
    pub rows: Vec<FibCheckRow>,
    /// `k - m` when a single offset matches every `m`.
    pub offset: Option<i64>,
    pub coefficient_agree: [usize; 4],
    pub coefficient_total: usize,
    pub max_solver_deviation: f64,
}

impl FibCheck {
    /// A consistent exponent exists and the solver agrees to `tol`.
    pub fn consistent(&self, tol: f64) -> bool {
        self.offset.is_some() && self.max_solver_deviation <= tol
    }
}

/// Cross-checks for every `m = 1, …, m_max`.
pub fn fib_check(m_max: usize) -> Result<FibCheck> {
    if m_max < 1 {
        return Err(Error::InvalidArgument("fib-check needs m_max >= 1".into()));
    }
    let oracle = FibonacciOracle::for_horizon(m_max);
    let kmax = m_max as u32 + 4;
    let mut rows = Vec::with_capacity(m_max);
    for m in 1..=m_max {
        let delta = fib_delta(&oracle, m);
        let dets: Vec<(u32, i128)> = (1..=kmax)
            .map(|k| {
                let mut p = fibonacci_power(k);
                p[0][0] -= 1;
                p[1][1] -= 1;
                (k, idet(&p))
            })
            .collect();
        let matching = dets.iter().filter(|(_, d)| *d == delta).map(|(k, _)| *k).collect();
        let mut agree = [0usize; 4];
        let mut total = 0;
        for n in 0..=m {
            for k in 0..=m {
                let closed = fib_green_coeffs(&oracle, n, m, k);
                let exact = fib_green_oracle(&oracle, n, m, k);
                for c in 0..4 {
                    agree[c] += usize::from(closed[c] == exact[c]);
                }
                total += 1;
            }
        }
        let solver_deviation = fib_solver_deviation(&oracle, &fib_test_forcing(m), m)?;
        rows.push(FibCheckRow {
            m,
            delta,
            dets,
            matching,
            coefficient_agree: agree,
            coefficient_total: total,
            solver_deviation,
        });
    }
    let mut offsets = rows.iter().map(|r| {
        (r.matching.len() == 1).then(|| r.matching[0] as i64 - r.m as i64)
    });
    let first = offsets.next().flatten();
    let offset = if offsets.all(|o| o.is_some() && o == first) { first } else { None };
    let mut coefficient_agree = [0; 4];
    for r in &rows {
        for (total, c) in coefficient_agree.iter_mut().zip(r.coefficient_agree) {
            *total += c;
        }
    }
    Ok(FibCheck {
        coefficient_total: rows.iter().map(|r| r.coefficient_total).sum(),
        max_solver_deviation: rows.iter().map(|r| r.solver_deviation).fold(0.0, f64::max),
        rows,
        offset,
        coefficient_agree,
    })
}

//! Problem files: one JSON document per problem.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::boundary::{BoundaryOperator, MultipointGroup, Sample};
use crate::linalg::{Matrix, Tolerance, Vector};
use crate::linear_bvp::{LinearProblem, OperatorSequence, SolveOptions, Trajectory};
use crate::lotka_volterra::{block_system, stacked_forcing, LvNonlinearity, Series};
use crate::nonlinear::{
    IterationOptions, Monomial, NewtonOptions, NonlinearProblem, Nonlinearity, Polynomial, SeedGrid,
    ZeroNonlinearity,
};

use super::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub dim: usize,
    pub horizon: usize,
    pub matrices: MatrixSpec,
    #[serde(default)]
    pub forcing: ForcingSpec,
    pub boundary: BoundarySpec,
    #[serde(default)]
    pub nonlinearity: NonlinearitySpec,
    #[serde(default)]
    pub epsilon: f64,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub solver: SolverSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MatrixSpec {
    Identity,
    Fibonacci,
    Rotation { theta: f64 },
    /// One matrix used at every step.
    Constant { matrix: Vec<Vec<f64>> },
    /// `A_0, …, A_{m-1}`.
    Explicit { matrices: Vec<Vec<Vec<f64>>> },
    /// Species-pair block form, state `(x_1…x_p, y_1…y_p)`.
    Block { a: Vec<Series>, b: Vec<Series>, c: Vec<Series>, d: Vec<Series> },
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ForcingSpec {
    #[default]
    Zero,
    Constant { value: Vec<f64> },
    /// `f(0), …, f(m)`; `f(m)` may be omitted.
    Explicit { values: Vec<Vec<f64>> },
    Stacked { f1: Vec<Series>, f2: Vec<Series> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleSpec {
    pub point: usize,
    pub weights: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BoundarySpec {
    Periodic,
    Multipoint { groups: Vec<MultipointGroup>, targets: Vec<f64> },
    InitialMass { x_mass: f64, y_mass: f64 },
    Generic { samples: Vec<SampleSpec>, target: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum NonlinearitySpec {
    #[default]
    None,
    LotkaVolterra(LvNonlinearity),
    Polynomial { terms: Vec<Monomial> },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Absolute singular-value cutoff for `Q`; assembly-scaled when absent.
    pub rank: Option<f64>,
    pub classification: f64,
    pub newton: f64,
    pub iteration: f64,
    pub residual: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        let newton = NewtonOptions::default();
        let iteration = IterationOptions::default();
        Self {
            rank: None,
            classification: SolveOptions::default().classification_tol,
            newton: newton.tol,
            iteration: iteration.tol,
            residual: iteration.residual_tol,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSpec {
    /// Newton seed for the generating constants; zero when absent.
    pub c_init: Option<Vec<f64>>,
    /// Extra seeds tried when Newton fails from `c_init` (and, in sweeps,
    /// used to count roots at every grid point).
    pub seed_grid: Option<SeedGrid>,
    pub newton_max_iter: usize,
    pub max_iter: usize,
    pub blowup: f64,
}

impl Default for SolverSpec {
    fn default() -> Self {
        Self {
            c_init: None,
            seed_grid: None,
            newton_max_iter: NewtonOptions::default().max_iter,
            max_iter: IterationOptions::default().max_iter,
            blowup: IterationOptions::default().blowup,
        }
    }
}

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Parse(msg.into())
}

fn matrix(rows: &[Vec<f64>], n: usize, what: &str) -> Result<Matrix, CliError> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(bad(format!("{what}: expected a {n}x{n} matrix")));
    }
    Ok(Matrix::from_fn(n, n, |i, j| rows[i][j]))
}

fn rect(rows: &[Vec<f64>], cols: usize, what: &str) -> Result<Matrix, CliError> {
    if rows.iter().any(|r| r.len() != cols) {
        return Err(bad(format!("{what}: every row needs {cols} entries")));
    }
    Ok(Matrix::from_fn(rows.len(), cols, |i, j| rows[i][j]))
}

fn vector(v: &[f64], n: usize, what: &str) -> Result<Vector, CliError> {
    if v.len() != n {
        return Err(bad(format!("{what}: expected {n} entries, found {}", v.len())));
    }
    Ok(Vector::from_column_slice(v))
}

impl ProblemFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            bad(format!("field `{path}`: {inner}"))
        })
    }

    /// Pretty JSON with every default filled in.
    pub fn canonical(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("problem serializes");
        s.push('\n');
        s
    }

    fn pairs(&self) -> Result<usize, CliError> {
        if !self.dim.is_multiple_of(2) {
            return Err(bad(format!("dim = {} is not an even species-pair count", self.dim)));
        }
        Ok(self.dim / 2)
    }

    pub fn system(&self) -> Result<OperatorSequence, CliError> {
        let (n, m) = (self.dim, self.horizon);
        let need = |d: usize, what: &str| {
            if n == d {
                Ok(())
            } else {
                Err(bad(format!("matrices `{what}` need dim = {d}, found {n}")))
            }
        };
        Ok(match &self.matrices {
            MatrixSpec::Identity => OperatorSequence::identity(n, m)?,
            MatrixSpec::Fibonacci => {
                need(2, "fibonacci")?;
                OperatorSequence::fibonacci(m)?
            }
            MatrixSpec::Rotation { theta } => {
                need(2, "rotation")?;
                OperatorSequence::rotation(*theta, m)?
            }
            MatrixSpec::Constant { matrix: rows } => {
                OperatorSequence::constant(matrix(rows, n, "matrices.matrix")?, m)?
            }
            MatrixSpec::Explicit { matrices } => {
                if matrices.len() != m {
                    return Err(bad(format!("matrices.matrices: expected {m} matrices, found {}", matrices.len())));
                }
                let ms = matrices
                    .iter()
                    .enumerate()
                    .map(|(i, rows)| matrix(rows, n, &format!("matrices.matrices[{i}]")))
                    .collect::<Result<_, _>>()?;
                OperatorSequence::new(n, ms)?
            }
            MatrixSpec::Block { a, b, c, d } => {
                let p = self.pairs()?;
                if a.len() != p {
                    return Err(bad(format!("matrices.a: expected {p} sequences, found {}", a.len())));
                }
                block_system(a, b, c, d, m)?
            }
        })
    }

    pub fn forcing(&self) -> Result<Trajectory, CliError> {
        let (n, m) = (self.dim, self.horizon);
        Ok(match &self.forcing {
            ForcingSpec::Zero => Trajectory::zeros(n, m),
            ForcingSpec::Constant { value } => Trajectory::constant(vector(value, n, "forcing.value")?, m),
            ForcingSpec::Explicit { values } => {
                if values.len() != m && values.len() != m + 1 {
                    return Err(bad(format!(
                        "forcing.values: expected {m} or {} vectors, found {}",
                        m + 1,
                        values.len()
                    )));
                }
                let mut vs = values
                    .iter()
                    .enumerate()
                    .map(|(i, v)| vector(v, n, &format!("forcing.values[{i}]")))
                    .collect::<Result<Vec<_>, _>>()?;
                if vs.len() == m {
                    vs.push(Vector::zeros(n));
                }
                Trajectory::new(vs)?
            }
            ForcingSpec::Stacked { f1, f2 } => {
                let p = self.pairs()?;
                if f1.len() != p {
                    return Err(bad(format!("forcing.f1: expected {p} sequences, found {}", f1.len())));
                }
                // The value at m is never used by the recurrence.
                let pad = |s: &Series| match s {
                    Series::Values(v) if v.len() == m => {
                        Series::Values(v.iter().copied().chain([0.0]).collect())
                    }
                    other => other.clone(),
                };
                let f1: Vec<_> = f1.iter().map(pad).collect();
                let f2: Vec<_> = f2.iter().map(pad).collect();
                stacked_forcing(&f1, &f2, m)?
            }
        })
    }

    pub fn boundary(&self) -> Result<BoundaryOperator, CliError> {
        let (n, m) = (self.dim, self.horizon);
        Ok(match &self.boundary {
            BoundarySpec::Periodic => BoundaryOperator::periodic(n, m)?,
            BoundarySpec::Multipoint { groups, targets } => BoundaryOperator::multipoint(n, m, groups, targets)?,
            BoundarySpec::InitialMass { x_mass, y_mass } => BoundaryOperator::initial_mass(self.pairs()?, *x_mass, *y_mass)?,
            BoundarySpec::Generic { samples, target } => {
                let samples = samples
                    .iter()
                    .enumerate()
                    .map(|(i, s)| {
                        let weights = rect(&s.weights, n, &format!("boundary.samples[{i}].weights"))?;
                        Ok(Sample { point: s.point, weights })
                    })
                    .collect::<Result<Vec<_>, CliError>>()?;
                BoundaryOperator::generic(n, samples, Vector::from_column_slice(target))?
            }
        })
    }

    pub fn linear(&self) -> Result<LinearProblem, CliError> {
        Ok(LinearProblem::new(self.system()?, self.forcing()?, self.boundary()?)?)
    }

    pub fn has_nonlinearity(&self) -> bool {
        !matches!(self.nonlinearity, NonlinearitySpec::None)
    }

    pub fn nonlinearity(&self) -> Result<Arc<dyn Nonlinearity>, CliError> {
        Ok(match &self.nonlinearity {
            NonlinearitySpec::None => Arc::new(ZeroNonlinearity(self.dim)),
            NonlinearitySpec::LotkaVolterra(lv) => {
                let lv = LvNonlinearity::new(lv.p, lv.t, lv.g1.clone(), lv.g2.clone(), lv.a.clone(), lv.b.clone())?;
                Arc::new(lv)
            }
            NonlinearitySpec::Polynomial { terms } => Arc::new(Polynomial::new(self.dim, terms.clone())?),
        })
    }

    pub fn nonlinear(&self) -> Result<NonlinearProblem, CliError> {
        Ok(NonlinearProblem::new(self.linear()?, self.nonlinearity()?, self.epsilon)?)
    }

    pub fn solve_options(&self) -> SolveOptions {
        SolveOptions {
            rank_tolerance: self.tolerances.rank.map(Tolerance::Absolute),
            classification_tol: self.tolerances.classification,
        }
    }

    pub fn newton_options(&self) -> NewtonOptions {
        NewtonOptions { tol: self.tolerances.newton, max_iter: self.solver.newton_max_iter, ..Default::default() }
    }

    pub fn iteration_options(&self, force: bool) -> IterationOptions {
        IterationOptions {
            tol: self.tolerances.iteration,
            max_iter: self.solver.max_iter,
            blowup: self.solver.blowup,
            residual_tol: self.tolerances.residual,
            force,
        }
    }

    pub fn c_init(&self, r: usize) -> Result<Vector, CliError> {
        match &self.solver.c_init {
            Some(c) => vector(c, r, "solver.c_init"),
            None => Ok(Vector::zeros(r)),
        }
    }
}

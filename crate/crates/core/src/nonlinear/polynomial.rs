use serde::{Deserialize, Serialize};

use super::Nonlinearity;
use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};

/// `(coeff + eps_coeff·ε) · Π_j z_j^{powers_j}` added to component `output`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Monomial {
    pub output: usize,
    pub coeff: f64,
    #[serde(default)]
    pub eps_coeff: f64,
    pub powers: Vec<u32>,
}

/// A polynomial vector field, time-independent.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    dim: usize,
    terms: Vec<Monomial>,
}

impl Polynomial {
    pub fn new(dim: usize, terms: Vec<Monomial>) -> Result<Self> {
        for (i, t) in terms.iter().enumerate() {
            if t.output >= dim {
                return Err(Error::InvalidArgument(format!("term {i} writes component {} of {dim}", t.output)));
            }
            if t.powers.len() != dim {
                return Err(Error::DimensionMismatch {
                    context: "monomial exponent count",
                    expected: dim,
                    found: t.powers.len(),
                });
            }
            if !t.coeff.is_finite() || !t.eps_coeff.is_finite() {
                return Err(Error::InvalidArgument(format!("term {i} has a non-finite coefficient")));
            }
        }
        Ok(Self { dim, terms })
    }

    pub fn terms(&self) -> &[Monomial] {
        &self.terms
    }
}

fn monomial(z: &Vector, powers: &[u32], skip: Option<usize>) -> f64 {
    powers
        .iter()
        .enumerate()
        .map(|(j, &p)| {
            let p = if Some(j) == skip { p - 1 } else { p };
            z[j].powi(p as i32)
        })
        .product()
}

impl Nonlinearity for Polynomial {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, z: &Vector, _n: usize, eps: f64) -> Vector {
        let mut out = Vector::zeros(self.dim);
        for t in &self.terms {
            out[t.output] += (t.coeff + t.eps_coeff * eps) * monomial(z, &t.powers, None);
        }
        out
    }

    fn jacobian(&self, z: &Vector, _n: usize, eps: f64) -> Matrix {
        let mut jac = Matrix::zeros(self.dim, self.dim);
        for t in &self.terms {
            let c = t.coeff + t.eps_coeff * eps;
            for (j, &p) in t.powers.iter().enumerate() {
                if p > 0 {
                    jac[(t.output, j)] += c * p as f64 * monomial(z, &t.powers, Some(j));
                }
            }
        }
        jac
    }
}

//! Boundary-value problems for first-order difference systems
//! `z(n+1) = A_n z(n) + f(n) + ε Z(z(n), n, ε)` with a linear boundary
//! condition `l z = α`, aimed at the resonance case where the induced
//! boundary matrix `Q = l Φ(·, 0)` is singular.
//!
//! * [`linalg`]: numerical rank, Moore–Penrose pseudoinverse, orthoprojectors.
//! * [`boundary`]: periodic, multi-point, initial-mass and generic boundary forms.
//! * [`linear_bvp`]: evolution operator, solvability classification,
//!   generalized Green operator and solution families.
//! * [`nonlinear`]: the equation for generating constants, the operator `B₀`,
//!   the sufficient-condition gate and the perturbation iteration.
//! * [`lotka_volterra`]: discrete Lotka–Volterra nonlinearities and the
//!   Fibonacci closed-form oracle.
//! * [`cli`]: problem files, reports and the `resbvp` command line.

pub mod boundary;
pub mod cli;
pub mod error;
pub mod linalg;
pub mod linear_bvp;
pub mod lotka_volterra;
pub mod nonlinear;

pub use error::{Error, Result};

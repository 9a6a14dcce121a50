//! Boundary operators `l z = Σ_k L_k z(n_k)` and their targets `α`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::linear_bvp::Trajectory;

/// One weighted sample of a trajectory: contributes `weights · z(point)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub point: usize,
    pub weights: Matrix,
}

/// A bounded linear boundary form together with its target.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryOperator {
    dim: usize,
    samples: Vec<Sample>,
    target: Vector,
}

/// One scalar condition of a multi-point form: the sum of the selected
/// components over the selected time points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultipointGroup {
    pub components: Vec<usize>,
    pub points: Vec<usize>,
}

impl BoundaryOperator {
    /// Stores the samples verbatim after checking that every weight matrix is `q × dim`.
    pub fn generic(dim: usize, samples: Vec<Sample>, target: Vector) -> Result<Self> {
        let q = target.len();
        for s in &samples {
            if s.weights.nrows() != q {
                return Err(Error::DimensionMismatch {
                    context: "boundary weight rows",
                    expected: q,
                    found: s.weights.nrows(),
                });
            }
            if s.weights.ncols() != dim {
                return Err(Error::DimensionMismatch {
                    context: "boundary weight columns",
                    expected: dim,
                    found: s.weights.ncols(),
                });
            }
            crate::linalg::ensure_finite(&s.weights)?;
        }
        if target.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidBoundary("non-finite target".into()));
        }
        Ok(Self { dim, samples, target })
    }

    /// `z(m) - z(0) = 0`.
    pub fn periodic(dim: usize, horizon: usize) -> Result<Self> {
        if horizon < 1 {
            return Err(Error::InvalidBoundary("periodic condition needs m >= 1".into()));
        }
        let eye = Matrix::identity(dim, dim);
        Self::generic(
            dim,
            vec![
                Sample { point: horizon, weights: eye.clone() },
                Sample { point: 0, weights: -eye },
            ],
            Vector::zeros(dim),
        )
    }

    /// `z(point) = target`.
    pub fn evaluation(dim: usize, point: usize, target: Vector) -> Result<Self> {
        Self::generic(dim, vec![Sample { point, weights: Matrix::identity(dim, dim) }], target)
    }

    /// Row-summing multi-point conditions, one row per group.
    pub fn multipoint(
        dim: usize,
        horizon: usize,
        groups: &[MultipointGroup],
        targets: &[f64],
    ) -> Result<Self> {
        if groups.is_empty() {
            return Err(Error::InvalidBoundary("no multipoint groups".into()));
        }
        if groups.len() != targets.len() {
            return Err(Error::DimensionMismatch {
                context: "multipoint targets",
                expected: groups.len(),
                found: targets.len(),
            });
        }
        let q = groups.len();
        let mut points: Vec<usize> = Vec::new();
        for (row, g) in groups.iter().enumerate() {
            if g.components.is_empty() || g.points.is_empty() {
                return Err(Error::InvalidBoundary(format!("group {row} is empty")));
            }
            if let Some(&c) = g.components.iter().find(|&&c| c >= dim) {
                return Err(Error::InvalidBoundary(format!(
                    "group {row} selects component {c} of a {dim}-dimensional state"
                )));
            }
            if let Some(&p) = g.points.iter().find(|&&p| p > horizon) {
                return Err(Error::IndexOutOfWindow { index: p, horizon });
            }
            points.extend(&g.points);
        }
        points.sort_unstable();
        points.dedup();
        let samples = points
            .into_iter()
            .map(|point| {
                let mut weights = Matrix::zeros(q, dim);
                for (row, g) in groups.iter().enumerate() {
                    let hits = g.points.iter().filter(|&&p| p == point).count() as f64;
                    for &c in &g.components {
                        weights[(row, c)] += hits;
                    }
                }
                Sample { point, weights }
            })
            .collect();
        Self::generic(dim, samples, Vector::from_column_slice(targets))
    }

    /// Initial population distribution for `p` species pairs:
    /// `Σ_i x_i(0) = x_mass`, `Σ_i y_i(0) = y_mass`.
    pub fn initial_mass(p: usize, x_mass: f64, y_mass: f64) -> Result<Self> {
        let groups = [
            MultipointGroup { components: (0..p).collect(), points: vec![0] },
            MultipointGroup { components: (p..2 * p).collect(), points: vec![0] },
        ];
        Self::multipoint(2 * p, 0, &groups, &[x_mass, y_mass])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of scalar conditions `q`.
    pub fn codim(&self) -> usize {
        self.target.len()
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn target(&self) -> &Vector {
        &self.target
    }

    pub fn with_target(&self, target: Vector) -> Result<Self> {
        Self::generic(self.dim, self.samples.clone(), target)
    }

    pub fn max_point(&self) -> usize {
        self.samples.iter().map(|s| s.point).max().unwrap_or(0)
    }

    pub fn check_window(&self, horizon: usize) -> Result<()> {
        match self.samples.iter().find(|s| s.point > horizon) {
            Some(s) => Err(Error::IndexOutOfWindow { index: s.point, horizon }),
            None => Ok(()),
        }
    }

    /// `l z`.
    pub fn apply(&self, z: &Trajectory) -> Result<Vector> {
        self.check_window(z.horizon())?;
        if z.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                context: "trajectory state dimension",
                expected: self.dim,
                found: z.dim(),
            });
        }
        let mut out = Vector::zeros(self.codim());
        for s in &self.samples {
            out += &s.weights * z.at(s.point);
        }
        Ok(out)
    }

    /// `‖l z - α‖`.
    pub fn residual(&self, z: &Trajectory) -> Result<f64> {
        Ok((self.apply(z)? - &self.target).norm())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn traj(values: Vec<Vec<f64>>) -> Trajectory {
        Trajectory::new(values.into_iter().map(Vector::from_vec).collect()).unwrap()
    }

    #[test]
    fn periodic_on_simple_trajectories() {
        let l = BoundaryOperator::periodic(2, 4).unwrap();
        assert_eq!(l.codim(), 2);
        let constant = traj(vec![vec![1.5, -2.0]; 5]);
        assert_eq!(l.apply(&constant).unwrap(), Vector::zeros(2));
        let v = [0.5, -1.0];
        let linear = traj((0..=4).map(|n| vec![n as f64 * v[0], n as f64 * v[1]]).collect());
        assert_eq!(l.apply(&linear).unwrap(), Vector::from_vec(vec![2.0, -4.0]));
        assert!(BoundaryOperator::periodic(2, 0).is_err());
    }

    #[test]
    fn periodic_equals_generic() {
        let eye = Matrix::identity(3, 3);
        let g = BoundaryOperator::generic(
            3,
            vec![
                Sample { point: 5, weights: eye.clone() },
                Sample { point: 0, weights: -eye },
            ],
            Vector::zeros(3),
        )
        .unwrap();
        assert_eq!(g, BoundaryOperator::periodic(3, 5).unwrap());
    }

    #[test]
    fn single_point_multipoint_is_evaluation() {
        let groups: Vec<_> =
            (0..3).map(|c| MultipointGroup { components: vec![c], points: vec![2] }).collect();
        let l = BoundaryOperator::multipoint(3, 4, &groups, &[1.0, 2.0, 3.0]).unwrap();
        let e = BoundaryOperator::evaluation(3, 2, Vector::from_vec(vec![1.0, 2.0, 3.0])).unwrap();
        assert_eq!(l, e);
    }

    #[test]
    fn initial_mass_rows() {
        let l = BoundaryOperator::initial_mass(2, 1.0, 1.0).unwrap();
        assert_eq!(l.samples().len(), 1);
        assert_eq!(l.samples()[0].point, 0);
        let w = &l.samples()[0].weights;
        assert_eq!(w.row(0).iter().copied().collect::<Vec<_>>(), vec![1.0, 1.0, 0.0, 0.0]);
        assert_eq!(w.row(1).iter().copied().collect::<Vec<_>>(), vec![0.0, 0.0, 1.0, 1.0]);
        assert_eq!(l.target(), &Vector::from_vec(vec![1.0, 1.0]));
    }

    #[test]
    fn two_point_sum_by_hand() {
        // x(1) + x(3) and y(0) + y(2) on a hand-built trajectory.
        let groups = [
            MultipointGroup { components: vec![0], points: vec![1, 3] },
            MultipointGroup { components: vec![1], points: vec![0, 2] },
        ];
        let l = BoundaryOperator::multipoint(2, 3, &groups, &[0.0, 0.0]).unwrap();
        let z = traj(vec![vec![1.0, 10.0], vec![2.0, 20.0], vec![3.0, 30.0], vec![4.0, 40.0]]);
        assert_eq!(l.apply(&z).unwrap(), Vector::from_vec(vec![2.0 + 4.0, 10.0 + 30.0]));
    }

    #[test]
    fn multipoint_errors() {
        assert!(BoundaryOperator::multipoint(2, 3, &[], &[]).is_err());
        let empty = [MultipointGroup { components: vec![], points: vec![0] }];
        assert!(BoundaryOperator::multipoint(2, 3, &empty, &[0.0]).is_err());
        let late = [MultipointGroup { components: vec![0], points: vec![4] }];
        assert!(matches!(
            BoundaryOperator::multipoint(2, 3, &late, &[0.0]),
            Err(Error::IndexOutOfWindow { index: 4, horizon: 3 })
        ));
    }

    #[test]
    fn zero_functional() {
        let l = BoundaryOperator::generic(2, vec![], Vector::zeros(0)).unwrap();
        let z = traj(vec![vec![1.0, 2.0]; 3]);
        assert_eq!(l.apply(&z).unwrap().len(), 0);
    }

    #[test]
    fn generic_shape_errors() {
        let bad = Sample { point: 0, weights: Matrix::zeros(2, 3) };
        assert!(BoundaryOperator::generic(2, vec![bad.clone()], Vector::zeros(2)).is_err());
        assert!(BoundaryOperator::generic(3, vec![bad], Vector::zeros(1)).is_err());
    }

    proptest! {
        #[test]
        fn random_weights_match_direct_sum(
            w in proptest::collection::vec(-3.0f64..3.0, 12),
            zs in proptest::collection::vec(-5.0f64..5.0, 8),
            a in -2.0f64..2.0,
            b in -2.0f64..2.0,
        ) {
            // q = 2, N = 2, samples at n = 1 and n = 3 over a 4-point window.
            let l1 = Matrix::from_row_slice(2, 2, &w[0..4]);
            let l3 = Matrix::from_row_slice(2, 2, &w[4..8]);
            let l = BoundaryOperator::generic(
                2,
                vec![Sample { point: 1, weights: l1.clone() }, Sample { point: 3, weights: l3.clone() }],
                Vector::zeros(2),
            ).unwrap();
            let z1 = traj(zs.chunks(2).map(|c| c.to_vec()).collect());
            let z2 = traj(zs.chunks(2).map(|c| vec![c[1] * w[8], c[0] + w[9]]).collect());
            let direct = &l1 * z1.at(1) + &l3 * z1.at(3);
            prop_assert!((l.apply(&z1).unwrap() - direct).norm() < 1e-12);

            let combo = z1.scaled(a).add(&z2.scaled(b));
            let lhs = l.apply(&combo).unwrap();
            let rhs = l.apply(&z1).unwrap() * a + l.apply(&z2).unwrap() * b;
            prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + zs.iter().map(|x| x.abs()).sum::<f64>()));
        }
    }
}

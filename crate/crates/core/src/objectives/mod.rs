//! Objective functions and the single smooth level-set constraint.
//!
//! Two arithmetic regimes live side by side: [`QuadraticObjective`] is exact
//! (rational data, gradient `Mx + q`), while [`SmoothObjective`] and
//! [`SmoothLevelSetConstraint`] evaluate in binary64 with explicit
//! tolerances, which is what points like `(√3, 0)` force on us.

mod affine;
pub mod fixtures;
mod smooth;

pub use affine::{AffineConstraint, ConstraintKind, LinearInfimum};
pub use smooth::{MatrixFn, ScalarFn, SmoothLevelSetConstraint, SmoothObjective, VectorFn};

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_dim, Error, Result};
use crate::kernel::{self, Rational, RationalMatrix, RationalVector};

/// `f(x) = ½⟨Mx, x⟩ + ⟨q, x⟩ + α` with symmetric `M`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadraticObjective {
    m: RationalMatrix,
    q: RationalVector,
    #[serde(with = "crate::kernel::serde_rational")]
    alpha: Rational,
}

impl QuadraticObjective {
    pub fn new(m: RationalMatrix, q: RationalVector, alpha: Rational) -> Result<Self> {
        ensure_dim("quadratic matrix columns", m.nrows(), m.ncols())?;
        ensure_dim("linear term", m.nrows(), q.len())?;
        if let Some((row, col)) = m.asymmetry() {
            return Err(Error::NotSymmetric { row, col });
        }
        Ok(Self { m, q, alpha })
    }

    pub fn dim(&self) -> usize {
        self.q.len()
    }

    pub fn matrix(&self) -> &RationalMatrix {
        &self.m
    }

    pub fn linear(&self) -> &RationalVector {
        &self.q
    }

    pub fn constant(&self) -> &Rational {
        &self.alpha
    }

    pub fn value(&self, x: &RationalVector) -> Result<Rational> {
        let mx = self.m.mul_vec(x)?;
        Ok(mx.dot(x) / kernel::int(2) + self.q.dot(x) + &self.alpha)
    }

    /// `Mx + q`
    pub fn gradient(&self, x: &RationalVector) -> Result<RationalVector> {
        Ok(self.m.mul_vec(x)?.add(&self.q))
    }

    /// The same function in the binary64 regime.
    pub fn to_smooth(&self, name: impl Into<String>) -> SmoothObjective {
        let m = Arc::new(self.m.to_f64());
        let q = Arc::new(self.q.to_f64());
        let alpha = kernel::to_f64(&self.alpha);
        let (mv, qv) = (m.clone(), q.clone());
        let (mg, qg) = (m.clone(), q.clone());
        let mh = m.clone();
        SmoothObjective::new(
            name,
            self.dim(),
            Arc::new(move |x: &[f64]| {
                let xv = nalgebra::DVector::from_column_slice(x);
                0.5 * (&*mv * &xv).dot(&xv) + qv.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + alpha
            }),
            Arc::new(move |x: &[f64]| {
                let xv = nalgebra::DVector::from_column_slice(x);
                let g = &*mg * xv;
                g.iter().zip(qg.iter()).map(|(a, b)| a + b).collect()
            }),
        )
        .with_hessian(Arc::new(move |_x: &[f64]| (*mh).clone()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::int;

    fn quad(rows: &[&[i64]], q: &[i64]) -> QuadraticObjective {
        QuadraticObjective::new(
            RationalMatrix::from_int_rows(q.len(), rows).unwrap(),
            RationalVector::from_ints(q),
            int(0),
        )
        .unwrap()
    }

    #[test]
    fn gradients() {
        let x = RationalVector::from_ints(&[2, 3]);
        assert_eq!(quad(&[&[1, 0], &[0, 1]], &[0, 0]).gradient(&x).unwrap(), x);
        assert_eq!(
            quad(&[&[2, 0], &[0, -1]], &[1, 0])
                .gradient(&RationalVector::from_ints(&[1, 1]))
                .unwrap(),
            RationalVector::from_ints(&[3, -1])
        );
        assert_eq!(
            quad(&[&[0, 1], &[1, 0]], &[0, 0])
                .gradient(&RationalVector::from_ints(&[1, 0]))
                .unwrap(),
            RationalVector::from_ints(&[0, 1])
        );
    }

    #[test]
    fn rejects_asymmetric_matrix() {
        let err = QuadraticObjective::new(
            RationalMatrix::from_int_rows(2, &[&[1, 2], &[0, 1]]).unwrap(),
            RationalVector::zeros(2),
            int(0),
        );
        assert!(matches!(err, Err(Error::NotSymmetric { row: 0, col: 1 })));
    }

    #[test]
    fn value_includes_half_factor() {
        let f = quad(&[&[2, 0], &[0, 4]], &[1, 0]);
        // ½(2·1 + 4·1) + 1 = 4
        assert_eq!(f.value(&RationalVector::from_ints(&[1, 1])).unwrap(), int(4));
    }

    #[test]
    fn smooth_wrapper_agrees_with_exact_gradient() {
        let f = quad(&[&[3, -1], &[-1, 2]], &[1, -2]);
        let s = f.to_smooth("q");
        for x in [[0.5, -1.25], [2.0, 3.0], [-1.5, 0.75]] {
            let exact = f
                .gradient(&RationalVector::from_f64(&x).unwrap())
                .unwrap()
                .to_f64();
            let approx = s.gradient(&x).unwrap();
            for (a, b) in exact.iter().zip(&approx) {
                assert!((a - b).abs() <= 1e-12);
            }
        }
        assert_eq!(s.hessian(&[0.0, 0.0]).unwrap()[(0, 1)], -1.0);
    }
}

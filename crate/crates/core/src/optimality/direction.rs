use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{dot_f64, Scalar, Vector};
use crate::error::{ensure_dim, Error, Result};
use crate::geometry::PolyhedralCone;
use crate::kernel::RationalVector;
use crate::objectives::AffineConstraint;

/// A direction with its tangency and orthogonality flags, all computed at
/// construction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalDirection {
    pub v: Vector,
    pub in_tangent_cone: bool,
    pub negation_in_tangent_cone: bool,
    pub gradient_orthogonal: bool,
    /// `⟨∇f(x̄), v⟩`
    pub slope: Scalar,
    /// Labels of tangent-cone rows violated by `v` (polyhedral cones only).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub violated_rows: Vec<usize>,
}

fn violated_labels(t: &PolyhedralCone, v: &RationalVector) -> Result<Vec<usize>> {
    let mut rows = Vec::new();
    let g = t.inequalities();
    for i in 0..g.nrows() {
        if g.row_vector(i).dot(v).is_positive() {
            rows.push(t.labels()[i]);
        }
    }
    Ok(rows)
}

impl CriticalDirection {
    pub fn exact(v: RationalVector, t: &PolyhedralCone, gradient: &RationalVector) -> Result<Self> {
        ensure_dim("direction", t.dim(), v.len())?;
        ensure_dim("gradient", t.dim(), gradient.len())?;
        let slope = gradient.dot(&v);
        Ok(Self {
            in_tangent_cone: t.contains(&v)?,
            negation_in_tangent_cone: t.contains(&v.neg())?,
            gradient_orthogonal: slope.is_zero(),
            slope: Scalar::Exact(slope),
            violated_rows: violated_labels(t, &v)?,
            v: Vector::Exact(v),
        })
    }

    /// Rational direction, binary64 gradient: orthogonality within `tol`.
    pub fn float_polyhedral(
        v: RationalVector,
        t: &PolyhedralCone,
        gradient: &[f64],
        tol: f64,
    ) -> Result<Self> {
        ensure_dim("direction", t.dim(), v.len())?;
        ensure_dim("gradient", t.dim(), gradient.len())?;
        let slope = dot_f64(gradient, &v.to_f64());
        Ok(Self {
            in_tangent_cone: t.contains(&v)?,
            negation_in_tangent_cone: t.contains(&v.neg())?,
            gradient_orthogonal: slope.abs() <= tol,
            slope: Scalar::Float(slope),
            violated_rows: violated_labels(t, &v)?,
            v: Vector::Exact(v),
        })
    }

    /// Direction against a smooth tangent half-space or hyperplane.
    pub fn affine(v: Vec<f64>, t: &AffineConstraint, gradient: &[f64], tol: f64) -> Result<Self> {
        ensure_dim("direction", t.dim(), v.len())?;
        ensure_dim("gradient", t.dim(), gradient.len())?;
        let neg: Vec<f64> = v.iter().map(|e| -e).collect();
        let slope = dot_f64(gradient, &v);
        Ok(Self {
            in_tangent_cone: t.contains_direction(&v, tol),
            negation_in_tangent_cone: t.contains_direction(&neg, tol),
            gradient_orthogonal: slope.abs() <= tol,
            slope: Scalar::Float(slope),
            violated_rows: Vec::new(),
            v: Vector::Float(v),
        })
    }

    pub fn is_critical(&self) -> bool {
        self.in_tangent_cone && self.gradient_orthogonal
    }

    /// Critical with `−v` tangent as well.
    pub fn is_bidirectional(&self) -> bool {
        self.is_critical() && self.negation_in_tangent_cone
    }

    pub fn require_critical(&self) -> Result<()> {
        if !self.in_tangent_cone {
            return Err(Error::NotTangent {
                violated_rows: self.violated_rows.clone(),
            });
        }
        if !self.gradient_orthogonal {
            return Err(Error::NotCritical(format!(
                "⟨∇f(x̄), v⟩ = {} is not zero",
                self.slope
            )));
        }
        Ok(())
    }
}

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use super::{AffineConstraint, ConstraintKind};
use crate::error::{ensure_dim, Error, Result};

pub type ScalarFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
pub type VectorFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;
pub type MatrixFn = Arc<dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync>;

const SYMMETRY_TOLERANCE: f64 = 1e-12;

/// A C¹ (optionally C²) objective given by evaluators.
#[derive(Clone)]
pub struct SmoothObjective {
    name: String,
    dim: usize,
    value: ScalarFn,
    gradient: VectorFn,
    hessian: Option<MatrixFn>,
}

impl fmt::Debug for SmoothObjective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SmoothObjective")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("hessian", &self.hessian.is_some())
            .finish()
    }
}

impl SmoothObjective {
    pub fn new(name: impl Into<String>, dim: usize, value: ScalarFn, gradient: VectorFn) -> Self {
        Self {
            name: name.into(),
            dim,
            value,
            gradient,
            hessian: None,
        }
    }

    pub fn with_hessian(mut self, hessian: MatrixFn) -> Self {
        self.hessian = Some(hessian);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn has_hessian(&self) -> bool {
        self.hessian.is_some()
    }

    pub fn value(&self, x: &[f64]) -> Result<f64> {
        ensure_dim("objective argument", self.dim, x.len())?;
        let v = (self.value)(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Evaluation(format!("{} value is {v}", self.name)))
        }
    }

    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        ensure_dim("objective argument", self.dim, x.len())?;
        let g = (self.gradient)(x);
        ensure_dim("gradient length", self.dim, g.len())?;
        if g.iter().all(|e| e.is_finite()) {
            Ok(g)
        } else {
            Err(Error::Evaluation(format!("{} gradient is not finite", self.name)))
        }
    }

    /// Hessian at `x`, checked for symmetry to a relative `1e-12`.
    pub fn hessian(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        let h = self.hessian.as_ref().ok_or(Error::MissingHessian)?;
        ensure_dim("objective argument", self.dim, x.len())?;
        checked_hessian(h(x), self.dim)
    }

    /// `⟨∇²f(x)v, v⟩`
    pub fn hessian_quadform(&self, x: &[f64], v: &[f64]) -> Result<f64> {
        let h = self.hessian(x)?;
        ensure_dim("direction", self.dim, v.len())?;
        let v = nalgebra::DVector::from_column_slice(v);
        Ok((&h * &v).dot(&v))
    }
}

fn checked_hessian(h: DMatrix<f64>, dim: usize) -> Result<DMatrix<f64>> {
    ensure_dim("Hessian rows", dim, h.nrows())?;
    ensure_dim("Hessian columns", dim, h.ncols())?;
    let scale = h.iter().fold(1.0f64, |acc, e| acc.max(e.abs()));
    for i in 0..dim {
        for j in (i + 1)..dim {
            if (h[(i, j)] - h[(j, i)]).abs() > SYMMETRY_TOLERANCE * scale {
                return Err(Error::NotSymmetric { row: i, col: j });
            }
        }
    }
    if h.iter().all(|e| e.is_finite()) {
        Ok(h)
    } else {
        Err(Error::Evaluation("Hessian is not finite".into()))
    }
}

/// A single constraint `g(x) ≤ 0` or `h(x) = 0` with C² data.
#[derive(Clone)]
pub struct SmoothLevelSetConstraint {
    name: String,
    kind: ConstraintKind,
    dim: usize,
    value: ScalarFn,
    gradient: VectorFn,
    hessian: MatrixFn,
}

impl fmt::Debug for SmoothLevelSetConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SmoothLevelSetConstraint")
            .field("name", &self.name)
            .field("kind", &self.kind)
            .field("dim", &self.dim)
            .finish()
    }
}

impl SmoothLevelSetConstraint {
    pub fn new(
        name: impl Into<String>,
        kind: ConstraintKind,
        dim: usize,
        value: ScalarFn,
        gradient: VectorFn,
        hessian: MatrixFn,
    ) -> Self {
        Self {
            name: name.into(),
            kind,
            dim,
            value,
            gradient,
            hessian,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> ConstraintKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn value(&self, x: &[f64]) -> Result<f64> {
        ensure_dim("constraint argument", self.dim, x.len())?;
        Ok((self.value)(x))
    }

    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        ensure_dim("constraint argument", self.dim, x.len())?;
        let g = (self.gradient)(x);
        ensure_dim("constraint gradient length", self.dim, g.len())?;
        Ok(g)
    }

    pub fn hessian(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        ensure_dim("constraint argument", self.dim, x.len())?;
        checked_hessian((self.hessian)(x), self.dim)
    }

    /// Whether `x` satisfies the constraint up to `tolerance`.
    pub fn is_satisfied(&self, x: &[f64], tolerance: f64) -> Result<bool> {
        let g = self.value(x)?;
        Ok(match self.kind {
            ConstraintKind::Inequality => g <= tolerance,
            ConstraintKind::Equality => g.abs() <= tolerance,
        })
    }

    fn active_gradient(&self, x: &[f64], activity_tolerance: f64) -> Result<Vec<f64>> {
        let value = self.value(x)?;
        if value.abs() > activity_tolerance {
            return Err(Error::InactiveConstraint {
                value,
                tolerance: activity_tolerance,
            });
        }
        let g = self.gradient(x)?;
        if g.iter().all(|e| *e == 0.0) {
            return Err(Error::VanishingGradient);
        }
        Ok(g)
    }

    /// `{v | ⟨∇g(x̄), v⟩ ≤ 0}` or `{v | ⟨∇h(x̄), v⟩ = 0}` at an active point.
    pub fn tangent_cone(&self, x: &[f64], activity_tolerance: f64) -> Result<AffineConstraint> {
        let g = self.active_gradient(x, activity_tolerance)?;
        Ok(AffineConstraint::new(self.kind, g, 0.0))
    }

    /// `{w | ⟨∇g(x̄), w⟩ ≤ −⟨∇²g(x̄)v, v⟩}` (or with equality) for a direction
    /// `v` with `⟨∇g(x̄), v⟩ = 0`.
    pub fn second_order_tangent(
        &self,
        x: &[f64],
        v: &[f64],
        tolerance: f64,
    ) -> Result<AffineConstraint> {
        let g = self.active_gradient(x, tolerance)?;
        ensure_dim("direction", self.dim, v.len())?;
        let slope: f64 = g.iter().zip(v).map(|(a, b)| a * b).sum();
        if slope.abs() > tolerance {
            return Err(Error::Precondition(format!(
                "second-order tangent needs ⟨∇g, v⟩ = 0, got {slope:e}"
            )));
        }
        let h = self.hessian(x)?;
        let vv = nalgebra::DVector::from_column_slice(v);
        let curvature = (&h * &vv).dot(&vv);
        Ok(AffineConstraint::new(self.kind, g, -curvature))
    }
}

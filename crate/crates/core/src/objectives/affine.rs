use serde::{Deserialize, Serialize};

use crate::error::{ensure_dim, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstraintKind {
    Inequality,
    Equality,
}

/// `{w | ⟨normal, w⟩ ≤ rhs}` or `{w | ⟨normal, w⟩ = rhs}` in binary64.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffineConstraint {
    pub kind: ConstraintKind,
    pub normal: Vec<f64>,
    pub rhs: f64,
}

/// Infimum of a linear function over an [`AffineConstraint`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "outcome")]
pub enum LinearInfimum {
    /// `gradient = multiplier · normal`, attained at `minimizer`.
    Bounded {
        value: f64,
        multiplier: f64,
        minimizer: Vec<f64>,
    },
    /// A recession direction of the set along which the function decreases.
    Unbounded { ray: Vec<f64> },
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

impl AffineConstraint {
    pub fn new(kind: ConstraintKind, normal: Vec<f64>, rhs: f64) -> Self {
        Self { kind, normal, rhs }
    }

    pub fn dim(&self) -> usize {
        self.normal.len()
    }

    pub fn contains(&self, w: &[f64], tolerance: f64) -> bool {
        let s = dot(&self.normal, w) - self.rhs;
        match self.kind {
            ConstraintKind::Inequality => s <= tolerance,
            ConstraintKind::Equality => s.abs() <= tolerance,
        }
    }

    /// Whether `d` is a recession direction of the set.
    pub fn contains_direction(&self, d: &[f64], tolerance: f64) -> bool {
        let s = dot(&self.normal, d);
        match self.kind {
            ConstraintKind::Inequality => s <= tolerance,
            ConstraintKind::Equality => s.abs() <= tolerance,
        }
    }

    /// Same set with a unit normal; equalities are additionally oriented so
    /// the first nonzero normal entry is positive.
    pub fn unit_normal_form(&self) -> AffineConstraint {
        let mut scale = norm(&self.normal);
        if scale == 0.0 {
            return self.clone();
        }
        if self.kind == ConstraintKind::Equality
            && self.normal.iter().find(|e| **e != 0.0).is_some_and(|e| *e < 0.0)
        {
            scale = -scale;
        }
        AffineConstraint {
            kind: self.kind,
            normal: self.normal.iter().map(|e| e / scale).collect(),
            rhs: self.rhs / scale,
        }
    }

    /// Closed-form `inf {⟨gradient, w⟩ | w in the set}`. Bounded iff the
    /// gradient is parallel to the normal (residual within `tolerance`
    /// relative to `max(1, ‖gradient‖)`) and, for inequalities, points against
    /// it.
    pub fn linear_infimum(&self, gradient: &[f64], tolerance: f64) -> Result<LinearInfimum> {
        ensure_dim("gradient", self.dim(), gradient.len())?;
        let nn = dot(&self.normal, &self.normal);
        if nn == 0.0 {
            // Degenerate descriptor: the set is everything (or nothing).
            return Ok(if norm(gradient) <= tolerance {
                LinearInfimum::Bounded {
                    value: 0.0,
                    multiplier: 0.0,
                    minimizer: vec![0.0; self.dim()],
                }
            } else {
                LinearInfimum::Unbounded {
                    ray: gradient.iter().map(|e| -e).collect(),
                }
            });
        }
        let lambda = dot(gradient, &self.normal) / nn;
        let residual: Vec<f64> = gradient
            .iter()
            .zip(&self.normal)
            .map(|(g, n)| g - lambda * n)
            .collect();
        if norm(&residual) > tolerance * norm(gradient).max(1.0) {
            return Ok(LinearInfimum::Unbounded {
                ray: residual.iter().map(|e| -e).collect(),
            });
        }
        if self.kind == ConstraintKind::Inequality && lambda > tolerance {
            return Ok(LinearInfimum::Unbounded {
                ray: self.normal.iter().map(|e| -e).collect(),
            });
        }
        let lambda = if self.kind == ConstraintKind::Inequality {
            lambda.min(0.0)
        } else {
            lambda
        };
        Ok(LinearInfimum::Bounded {
            value: lambda * self.rhs,
            multiplier: lambda,
            minimizer: self.normal.iter().map(|e| e * self.rhs / nn).collect(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inequality_infimum_against_normal() {
        let set = AffineConstraint::new(ConstraintKind::Inequality, vec![2.0, 0.0], -4.0);
        match set.linear_infimum(&[-1.0, 0.0], 1e-12).unwrap() {
            LinearInfimum::Bounded { value, multiplier, .. } => {
                assert_eq!(multiplier, -0.5);
                assert_eq!(value, 2.0);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn inequality_infimum_along_normal_is_unbounded() {
        let set = AffineConstraint::new(ConstraintKind::Inequality, vec![1.0, 0.0], 0.0);
        let LinearInfimum::Unbounded { ray } = set.linear_infimum(&[1.0, 0.0], 1e-12).unwrap() else {
            panic!("expected unbounded");
        };
        assert!(set.contains_direction(&ray, 0.0));
        assert!(dot(&ray, &[1.0, 0.0]) < 0.0);
    }

    #[test]
    fn skew_gradient_is_unbounded_on_hyperplane() {
        let set = AffineConstraint::new(ConstraintKind::Equality, vec![1.0, 0.0], 3.0);
        let LinearInfimum::Unbounded { ray } = set.linear_infimum(&[1.0, 1.0], 1e-12).unwrap() else {
            panic!("expected unbounded");
        };
        assert_eq!(ray, vec![0.0, -1.0]);
    }

    #[test]
    fn unit_normal_orients_equalities() {
        let set = AffineConstraint::new(ConstraintKind::Equality, vec![-2.0, 0.0], -4.0);
        let unit = set.unit_normal_form();
        assert_eq!(unit.normal, vec![1.0, 0.0]);
        assert_eq!(unit.rhs, 2.0);
    }
}

//! Built-in fixtures, selectable by name.
//!
//! | name   | objective              | constraint set              |
//! |--------|------------------------|-----------------------------|
//! | `ex31` | `−2x₁² − x₂²`          | `2x₁² + 3x₂² − 6 ≤ 0`       |
//! | `ex32` | `−x₁² − x₂²`           | `x₁² + 2x₂² − 1 = 0`        |
//! | `ex41` | `−x²/2` on `x ≤ 0`, `x³/3` on `x ≥ 0` | `x ≥ 0`    |

use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{ConstraintKind, SmoothLevelSetConstraint, SmoothObjective};
use crate::error::{Error, Result};
use crate::geometry::Polyhedron;

pub const FIXTURE_NAMES: [&str; 3] = ["ex31", "ex32", "ex41"];

/// The feasible set attached to a fixture.
#[derive(Clone, Debug)]
pub enum FixtureConstraint {
    Smooth(SmoothLevelSetConstraint),
    Polyhedral(Polyhedron),
}

#[derive(Clone, Debug)]
pub struct Fixture {
    pub name: &'static str,
    pub objective: SmoothObjective,
    pub constraint: FixtureConstraint,
    /// Named candidate points, in the order they are usually discussed.
    pub points: Vec<(&'static str, Vec<f64>)>,
    /// Present for one-dimensional piecewise-monomial gradients.
    pub gradient_descriptor: Option<PiecewiseMonomialGradient>,
}

impl Fixture {
    pub fn point(&self, name: &str) -> Option<&[f64]> {
        self.points
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, p)| p.as_slice())
    }

    pub fn dim(&self) -> usize {
        self.objective.dim()
    }
}

/// `f'(x) = left.0 · x^left.1` for `x ≤ 0` and `right.0 · x^right.1` for `x ≥ 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseMonomialGradient {
    pub left: (f64, u32),
    pub right: (f64, u32),
}

impl PiecewiseMonomialGradient {
    pub const EX41: Self = Self {
        left: (-1.0, 1),
        right: (1.0, 2),
    };

    pub fn derivative(&self, x: f64) -> f64 {
        let (c, p) = if x <= 0.0 { self.left } else { self.right };
        c * x.powi(p as i32)
    }

    /// The antiderivative vanishing at 0.
    pub fn value(&self, x: f64) -> f64 {
        let (c, p) = if x <= 0.0 { self.left } else { self.right };
        c * x.powi(p as i32 + 1) / f64::from(p + 1)
    }

    /// Second derivative away from the origin.
    pub fn curvature(&self, x: f64) -> Option<f64> {
        let (c, p) = if x < 0.0 {
            self.left
        } else if x > 0.0 {
            self.right
        } else {
            return None;
        };
        Some(if p == 0 {
            0.0
        } else {
            c * f64::from(p) * x.powi(p as i32 - 1)
        })
    }

    pub fn objective(self, name: impl Into<String>) -> SmoothObjective {
        SmoothObjective::new(
            name,
            1,
            Arc::new(move |x: &[f64]| self.value(x[0])),
            Arc::new(move |x: &[f64]| vec![self.derivative(x[0])]),
        )
    }
}

type Parts = (super::ScalarFn, super::VectorFn, super::MatrixFn);

/// `d₁x₁² + d₂x₂² + shift` with its derivatives.
fn diag_quadratic(diag: [f64; 2], shift: f64) -> Parts {
    (
        Arc::new(move |x: &[f64]| diag[0] * x[0] * x[0] + diag[1] * x[1] * x[1] + shift),
        Arc::new(move |x: &[f64]| vec![2.0 * diag[0] * x[0], 2.0 * diag[1] * x[1]]),
        Arc::new(move |_: &[f64]| {
            DMatrix::from_row_slice(2, 2, &[2.0 * diag[0], 0.0, 0.0, 2.0 * diag[1]])
        }),
    )
}

fn diag_objective(name: &str, diag: [f64; 2]) -> SmoothObjective {
    let (value, gradient, hessian) = diag_quadratic(diag, 0.0);
    SmoothObjective::new(name, 2, value, gradient).with_hessian(hessian)
}

fn diag_constraint(
    name: &str,
    kind: ConstraintKind,
    diag: [f64; 2],
    shift: f64,
) -> SmoothLevelSetConstraint {
    let (value, gradient, hessian) = diag_quadratic(diag, shift);
    SmoothLevelSetConstraint::new(name, kind, 2, value, gradient, hessian)
}

pub fn ex31() -> Fixture {
    let r3 = 3f64.sqrt();
    let r2 = 2f64.sqrt();
    Fixture {
        name: "ex31",
        objective: diag_objective("ex31.f", [-2.0, -1.0]),
        constraint: FixtureConstraint::Smooth(diag_constraint(
            "ex31.g",
            ConstraintKind::Inequality,
            [2.0, 3.0],
            -6.0,
        )),
        points: vec![
            ("x1", vec![r3, 0.0]),
            ("x2", vec![-r3, 0.0]),
            ("x3", vec![0.0, -r2]),
            ("x4", vec![0.0, r2]),
            ("x5", vec![0.0, 0.0]),
        ],
        gradient_descriptor: None,
    }
}

pub fn ex32() -> Fixture {
    Fixture {
        name: "ex32",
        objective: diag_objective("ex32.f", [-1.0, -1.0]),
        constraint: FixtureConstraint::Smooth(diag_constraint(
            "ex32.h",
            ConstraintKind::Equality,
            [1.0, 2.0],
            -1.0,
        )),
        points: vec![("x1", vec![1.0, 0.0]), ("x2", vec![-1.0, 0.0])],
        gradient_descriptor: None,
    }
}

pub fn ex41() -> Fixture {
    let descriptor = PiecewiseMonomialGradient::EX41;
    Fixture {
        name: "ex41",
        objective: descriptor.objective("ex41.f"),
        constraint: FixtureConstraint::Polyhedral(Polyhedron::nonnegative_orthant(1)),
        points: vec![("x0", vec![0.0])],
        gradient_descriptor: Some(descriptor),
    }
}

pub fn fixture(name: &str) -> Result<Fixture> {
    match name {
        "ex31" => Ok(ex31()),
        "ex32" => Ok(ex32()),
        "ex41" => Ok(ex41()),
        other => Err(Error::UnknownFixture(other.to_string())),
    }
}

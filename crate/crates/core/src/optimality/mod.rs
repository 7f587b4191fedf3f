//! Necessary-condition checkers at a candidate point.
//!
//! Every check returns a [`ConditionReport`]. A failing report always carries
//! a witness, and [`ConditionReport::recheck`] substitutes it back into the
//! defining inequality recorded in the report's [`Evidence`]. Holding reports
//! in the exact regime carry a certificate that `recheck` verifies as well.
//!
//! Two regimes are supported. Exact checks take rational gradients and cones
//! and use no tolerance at all. Float checks take binary64 gradients; a
//! condition fails only when violated by more than the tolerance, and a
//! numerically computed margin within the tolerance of zero sets the
//! `boundary` flag.

mod copositivity;
mod direction;
mod linear;
mod theorems;

pub use copositivity::{
    check_c2_copositivity, check_c2_copositivity_float, copositivity, CopositivityConfig,
    CopositivityResult, CopositivityStatus, CopositivityTrace,
};
pub use direction::CriticalDirection;
pub use linear::{
    check_c1, check_c1_affine, check_c1_float, classical_second_order_check,
    classical_second_order_check_affine, classical_second_order_check_float, critical_cone,
    critical_cone_float, curvature_check, curvature_check_float, first_order_check,
    first_order_check_affine, first_order_check_float,
};
pub use theorems::{
    check_qp, theorem33_check, theorem33_check_quadratic, theorem33_check_smooth, QpReport,
    SetDescription, Theorem33Report,
};

use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geometry::ConeRows;
use crate::kernel::{self, Rational, RationalMatrix, RationalVector};
use crate::objectives::AffineConstraint;

pub const DEFAULT_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionId {
    /// `⟨∇f(x̄), v⟩ ≥ 0` on `T(x̄)`.
    FirstOrder,
    /// `inf_{w ∈ T²(x̄,v)} ⟨∇f(x̄), w⟩ + ⟨∇²f(x̄)v, v⟩ ≥ 0`.
    ClassicalSecondOrder,
    /// `⟨∇f(x̄), w⟩ ≥ 0` on `T²(x̄,v)`.
    SecondOrderTangentGradient,
    /// `⟨∇²f(x̄)v, v⟩ ≥ 0` at one critical `v`.
    CriticalCurvature,
    /// `⟨∇²f(x̄)v, v⟩ ≥ 0` on the whole critical cone.
    CriticalCopositivity,
    QpFirstOrder,
    QpTangentGradient,
    QpCriticalCopositivity,
    /// `⟨∇f(x̄), w⟩ ≥ 0` on `T²(x̄,v)` for a bidirectional critical `v`.
    SubdifferentialGradient,
    /// `⟨z, v⟩ ≥ 0` for a second-order subgradient `z`.
    SubdifferentialCurvature,
}

impl ConditionId {
    pub fn label(self) -> &'static str {
        match self {
            ConditionId::FirstOrder => "first-order",
            ConditionId::ClassicalSecondOrder => "classical second-order",
            ConditionId::SecondOrderTangentGradient => "gradient on second-order tangent set",
            ConditionId::CriticalCurvature => "curvature at critical direction",
            ConditionId::CriticalCopositivity => "copositivity on critical cone",
            ConditionId::QpFirstOrder => "QP first-order",
            ConditionId::QpTangentGradient => "QP gradient on second-order tangent sets",
            ConditionId::QpCriticalCopositivity => "QP copositivity on critical cone",
            ConditionId::SubdifferentialGradient => "subdifferential gradient condition",
            ConditionId::SubdifferentialCurvature => "subdifferential curvature condition",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Fails,
    Inconclusive,
}

impl Verdict {
    /// Worst of two verdicts: `Fails` dominates `Inconclusive` dominates `Holds`.
    pub fn and(self, other: Verdict) -> Verdict {
        use Verdict::*;
        match (self, other) {
            (Fails, _) | (_, Fails) => Fails,
            (Inconclusive, _) | (_, Inconclusive) => Inconclusive,
            _ => Holds,
        }
    }
}

/// A vector in either arithmetic regime.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Vector {
    Exact(RationalVector),
    Float(Vec<f64>),
}

impl Vector {
    pub fn to_f64(&self) -> Vec<f64> {
        match self {
            Vector::Exact(v) => v.to_f64(),
            Vector::Float(v) => v.clone(),
        }
    }

    /// Exact value; binary64 entries convert without rounding.
    pub fn to_exact(&self) -> Result<RationalVector> {
        match self {
            Vector::Exact(v) => Ok(v.clone()),
            Vector::Float(v) => RationalVector::from_f64(v),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Vector::Exact(v) => v.len(),
            Vector::Float(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl std::fmt::Display for Vector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Vector::Exact(v) => write!(f, "{v}"),
            Vector::Float(v) => {
                write!(f, "(")?;
                for (i, e) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{e}")?;
                }
                write!(f, ")")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scalar {
    Exact(#[serde(with = "crate::kernel::serde_rational")] Rational),
    Float(f64),
}

impl Scalar {
    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(r) => kernel::to_f64(r),
            Scalar::Float(x) => *x,
        }
    }
}

impl std::fmt::Display for Scalar {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Scalar::Exact(r) => f.write_str(&kernel::format_rational(r)),
            Scalar::Float(x) => write!(f, "{x}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessKind {
    /// A direction of the cone (or recession direction of the set) along which
    /// the condition's left-hand side is negative.
    Ray,
    /// An element of the set at which the condition's left-hand side is negative.
    Point,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub kind: WitnessKind,
    pub vector: Vector,
    /// Left-hand side of the violated inequality at the witness.
    pub value: Scalar,
}

/// `−∇f(x̄) = Σ λᵢ xᵢ* + Aᵀμ` with `λ ≥ 0`; `inequality` pairs each row label
/// with its multiplier.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LagrangeCertificate {
    pub inequality: Vec<(usize, RationalMultiplier)>,
    pub equality: RationalVector,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RationalMultiplier(#[serde(with = "crate::kernel::serde_rational")] pub Rational);

impl LagrangeCertificate {
    /// Exact check of the identity and of `λ ≥ 0` against the cone rows.
    pub fn verify(&self, gradient: &RationalVector, rows: &ConeRows) -> bool {
        if self.inequality.len() != rows.inequalities.nrows()
            || self.equality.len() != rows.equalities.nrows()
        {
            return false;
        }
        let mut combo = gradient.clone();
        for (i, (label, lambda)) in self.inequality.iter().enumerate() {
            if rows.labels.get(i) != Some(label) || lambda.0.is_negative() {
                return false;
            }
            combo = combo.axpy(&lambda.0, &rows.inequalities.row_vector(i));
        }
        for (j, mu) in self.equality.iter().enumerate() {
            combo = combo.axpy(mu, &rows.equalities.row_vector(j));
        }
        combo.is_zero()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Certificate {
    Lagrange(LagrangeCertificate),
    /// `gradient = multiplier · normal` for an affine set in unit-normal form.
    AffineMultiplier { multiplier: f64 },
    Copositivity(CopositivityTrace),
}

/// Matrix in either regime, stored row-major for serialization.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Matrix {
    Exact(RationalMatrix),
    Float(Vec<Vec<f64>>),
}

impl Matrix {
    pub fn float(m: &nalgebra::DMatrix<f64>) -> Self {
        Matrix::Float(
            (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
                .collect(),
        )
    }
}

/// The data of the defining inequality, recorded so witnesses can be
/// re-checked without the original problem.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "form")]
pub enum Evidence {
    /// `inf_{w ∈ cone} ⟨gradient, w⟩ + offset ≥ 0` (offset 0 when absent).
    ConeLinear {
        gradient: Vector,
        cone: ConeRows,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        offset: Option<Scalar>,
    },
    /// `inf_{w ∈ set} ⟨gradient, w⟩ + offset ≥ 0`.
    AffineLinear {
        gradient: Vec<f64>,
        set: AffineConstraint,
        offset: f64,
    },
    /// `⟨Mv, v⟩ ≥ 0` on the cone.
    ConeQuadratic { matrix: Matrix, cone: ConeRows },
    /// `⟨Mv, v⟩ ≥ 0` at the single direction `v`.
    Curvature { matrix: Matrix, direction: Vector },
    /// `⟨z, v⟩ ≥ 0`.
    Pairing { z: Vector, direction: Vector },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub condition: ConditionId,
    pub verdict: Verdict,
    /// The critical direction the condition was evaluated at, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction: Option<Vector>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
    /// Value of the left-hand side's infimum; absent when it is `−∞`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub margin: Option<Scalar>,
    #[serde(default)]
    pub boundary: bool,
    /// Tolerance used (float regime only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    pub evidence: Evidence,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl ConditionReport {
    pub(crate) fn new(condition: ConditionId, verdict: Verdict, evidence: Evidence) -> Self {
        Self {
            condition,
            verdict,
            direction: None,
            witness: None,
            certificate: None,
            margin: None,
            boundary: false,
            tolerance: None,
            evidence,
            notes: Vec::new(),
        }
    }

    pub(crate) fn with_direction(mut self, v: Vector) -> Self {
        self.direction = Some(v);
        self
    }

    pub(crate) fn relabel(mut self, condition: ConditionId) -> Self {
        self.condition = condition;
        self
    }

    pub fn holds(&self) -> bool {
        self.verdict == Verdict::Holds
    }

    pub fn fails(&self) -> bool {
        self.verdict == Verdict::Fails
    }

    /// Re-validates the report against its own evidence: a `Fails` verdict
    /// needs a witness that violates the recorded inequality, and a Lagrange
    /// certificate must satisfy its identity exactly.
    pub fn recheck(&self) -> Result<bool> {
        let tol = self.tolerance.unwrap_or(0.0);
        if self.verdict == Verdict::Fails {
            let Some(w) = &self.witness else {
                return Ok(false);
            };
            if !witness_violates(&self.evidence, w, tol)? {
                return Ok(false);
            }
        }
        if let Some(Certificate::Lagrange(cert)) = &self.certificate {
            let Evidence::ConeLinear {
                gradient: Vector::Exact(g),
                cone,
                ..
            } = &self.evidence
            else {
                return Ok(false);
            };
            if !cert.verify(g, cone) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

pub(crate) fn dot_f64(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn quadform_f64(m: &[Vec<f64>], v: &[f64]) -> f64 {
    m.iter().zip(v).map(|(row, vi)| vi * dot_f64(row, v)).sum()
}

fn witness_violates(evidence: &Evidence, w: &Witness, tol: f64) -> Result<bool> {
    match evidence {
        Evidence::ConeLinear {
            gradient,
            cone,
            offset,
        } => {
            let vector = w.vector.to_exact()?;
            if !cone.to_cone()?.contains(&vector)? {
                return Ok(false);
            }
            let include_offset = w.kind == WitnessKind::Point;
            match gradient {
                Vector::Exact(g) => {
                    let mut lhs = g.dot(&vector);
                    if include_offset {
                        if let Some(Scalar::Exact(o)) = offset {
                            lhs += o;
                        } else if let Some(Scalar::Float(_)) = offset {
                            return Ok(false);
                        }
                    }
                    Ok(lhs.is_negative())
                }
                Vector::Float(g) => {
                    let mut lhs = dot_f64(g, &vector.to_f64());
                    if include_offset {
                        lhs += offset.as_ref().map_or(0.0, Scalar::to_f64);
                    }
                    Ok(lhs < -tol)
                }
            }
        }
        Evidence::AffineLinear {
            gradient,
            set,
            offset,
        } => {
            let v = w.vector.to_f64();
            match w.kind {
                WitnessKind::Ray => {
                    Ok(set.contains_direction(&v, tol) && dot_f64(gradient, &v) < -tol)
                }
                WitnessKind::Point => {
                    Ok(set.contains(&v, tol) && dot_f64(gradient, &v) + offset < -tol)
                }
            }
        }
        Evidence::ConeQuadratic { matrix, cone } => {
            let vector = w.vector.to_exact()?;
            if !cone.to_cone()?.contains(&vector)? {
                return Ok(false);
            }
            // Rays scale freely, so only the sign is meaningful here.
            match matrix {
                Matrix::Exact(m) => Ok(m.quadratic_form(&vector)?.is_negative()),
                Matrix::Float(m) => Ok(quadform_f64(m, &vector.to_f64()) < 0.0),
            }
        }
        Evidence::Curvature { matrix, direction } => {
            if &w.vector != direction {
                return Ok(false);
            }
            match (matrix, direction) {
                (Matrix::Exact(m), Vector::Exact(v)) => Ok(m.quadratic_form(v)?.is_negative()),
                _ => Ok(quadform_f64(&matrix_f64(matrix), &direction.to_f64()) < -tol),
            }
        }
        Evidence::Pairing { z, direction } => match (z, direction) {
            (Vector::Exact(z), Vector::Exact(v)) => Ok(z.dot(v).is_negative()),
            _ => Ok(dot_f64(&z.to_f64(), &direction.to_f64()) < -tol),
        },
    }
}

fn matrix_f64(m: &Matrix) -> Vec<Vec<f64>> {
    match m {
        Matrix::Exact(m) => (0..m.nrows()).map(|i| m.row_vector(i).to_f64()).collect(),
        Matrix::Float(m) => m.clone(),
    }
}

/// Verdict for a numerically computed margin.
pub(crate) fn float_verdict(margin: f64, tol: f64) -> (Verdict, bool) {
    if margin < -tol {
        (Verdict::Fails, false)
    } else {
        (Verdict::Holds, margin.abs() <= tol)
    }
}

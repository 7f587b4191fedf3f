//! Conditions that are linear in the second-order variable `w`: the
//! first-order condition, the gradient condition on `T²`, and the classical
//! second-order condition `inf ⟨∇f, w⟩ + ⟨∇²f v, v⟩ ≥ 0`.
//!
//! Over a cone the infimum of a linear function is `0` or `−∞`. In the exact
//! regime it is decided by one LP whose dual solution is the Lagrange
//! certificate. In the float regime the LP is taken over the cone intersected
//! with the unit box, so its optimum measures the worst violation.

use nalgebra::DMatrix;
use num_traits::{Signed, Zero};

use super::{
    dot_f64, float_verdict, ConditionId, ConditionReport, Certificate, Evidence,
    LagrangeCertificate, Matrix, RationalMultiplier, Scalar, Vector, Verdict, Witness, WitnessKind,
};
use crate::error::{ensure_dim, Error, Result};
use crate::geometry::{ConeRows, PolyhedralCone};
use crate::kernel::{self, solve_lp, LinearProgram, LpResult, Rational, RationalMatrix, RationalVector};
use crate::objectives::{AffineConstraint, LinearInfimum};

fn cone_program(objective: RationalVector, cone: &PolyhedralCone) -> LinearProgram {
    LinearProgram::new(objective)
        .with_equalities(
            cone.equalities().clone(),
            RationalVector::zeros(cone.equalities().nrows()),
        )
        .with_inequalities(
            cone.inequalities().clone(),
            RationalVector::zeros(cone.inequalities().nrows()),
        )
}

fn cone_linear_exact(
    id: ConditionId,
    gradient: &RationalVector,
    cone: &PolyhedralCone,
    offset: Option<&Rational>,
) -> Result<ConditionReport> {
    ensure_dim("gradient", cone.dim(), gradient.len())?;
    let evidence = Evidence::ConeLinear {
        gradient: Vector::Exact(gradient.clone()),
        cone: ConeRows::from(cone),
        offset: offset.map(|o| Scalar::Exact(o.clone())),
    };
    match solve_lp(&cone_program(gradient.clone(), cone))? {
        LpResult::Optimal { duals, .. } => {
            let margin = offset.cloned().unwrap_or_else(Rational::zero);
            let certificate = LagrangeCertificate {
                inequality: cone
                    .labels()
                    .iter()
                    .copied()
                    .zip(duals.inequality.iter().cloned().map(RationalMultiplier))
                    .collect(),
                equality: duals.equality,
            };
            let mut report = if margin.is_negative() {
                let mut r = ConditionReport::new(id, Verdict::Fails, evidence);
                r.witness = Some(Witness {
                    kind: WitnessKind::Point,
                    vector: Vector::Exact(RationalVector::zeros(cone.dim())),
                    value: Scalar::Exact(margin.clone()),
                });
                r
            } else {
                ConditionReport::new(id, Verdict::Holds, evidence)
            };
            report.certificate = Some(Certificate::Lagrange(certificate));
            report.margin = Some(Scalar::Exact(margin));
            Ok(report)
        }
        LpResult::Unbounded { ray, .. } => {
            let ray = ray.primitive();
            let value = gradient.dot(&ray);
            let mut report = ConditionReport::new(id, Verdict::Fails, evidence);
            report.witness = Some(Witness {
                kind: WitnessKind::Ray,
                vector: Vector::Exact(ray),
                value: Scalar::Exact(value),
            });
            report.notes.push("infimum is unbounded below".into());
            Ok(report)
        }
        LpResult::Infeasible { .. } => Err(Error::Internal("a cone contains the origin".into())),
    }
}

fn cone_linear_float(
    id: ConditionId,
    gradient: &[f64],
    cone: &PolyhedralCone,
    offset: Option<f64>,
    tol: f64,
) -> Result<ConditionReport> {
    let n = cone.dim();
    ensure_dim("gradient", n, gradient.len())?;
    let exact = RationalVector::from_f64(gradient)?;
    let identity = RationalMatrix::identity(n);
    let mut rows = cone.inequalities().vstack(&identity)?;
    for i in 0..n {
        rows.push_row(&RationalVector::unit(n, i).neg())?;
    }
    let mut rhs = vec![Rational::zero(); cone.inequalities().nrows()];
    rhs.extend(std::iter::repeat_n(kernel::int(1), 2 * n));
    let lp = LinearProgram::new(exact)
        .with_equalities(
            cone.equalities().clone(),
            RationalVector::zeros(cone.equalities().nrows()),
        )
        .with_inequalities(rows, RationalVector::new(rhs));
    let evidence = Evidence::ConeLinear {
        gradient: Vector::Float(gradient.to_vec()),
        cone: ConeRows::from(cone),
        offset: offset.map(Scalar::Float),
    };
    let LpResult::Optimal { value, point, .. } = solve_lp(&lp)? else {
        return Err(Error::Internal("box LP over a cone is bounded and feasible".into()));
    };
    let worst = kernel::to_f64(&value);
    let mut report;
    if worst < -tol {
        report = ConditionReport::new(id, Verdict::Fails, evidence);
        let value = dot_f64(gradient, &point.to_f64());
        report.witness = Some(Witness {
            kind: WitnessKind::Ray,
            vector: Vector::Exact(point),
            value: Scalar::Float(value),
        });
        report.notes.push("infimum is unbounded below".into());
    } else {
        let margin = offset.unwrap_or(0.0);
        let (verdict, boundary) = match offset {
            Some(o) => float_verdict(o, tol),
            None => (Verdict::Holds, false),
        };
        report = ConditionReport::new(id, verdict, evidence);
        report.boundary = boundary || worst < 0.0;
        report.margin = Some(Scalar::Float(margin));
        if verdict == Verdict::Fails {
            report.witness = Some(Witness {
                kind: WitnessKind::Point,
                vector: Vector::Exact(RationalVector::zeros(n)),
                value: Scalar::Float(margin),
            });
        }
    }
    report.tolerance = Some(tol);
    Ok(report)
}

fn affine_linear(
    id: ConditionId,
    gradient: &[f64],
    set: &AffineConstraint,
    offset: f64,
    tol: f64,
) -> Result<ConditionReport> {
    let unit = set.unit_normal_form();
    let evidence = Evidence::AffineLinear {
        gradient: gradient.to_vec(),
        set: unit.clone(),
        offset,
    };
    let mut report = match unit.linear_infimum(gradient, tol)? {
        LinearInfimum::Bounded {
            value,
            multiplier,
            minimizer,
        } => {
            let margin = value + offset;
            let (verdict, mut boundary) = float_verdict(margin, tol);
            if unit.rhs == 0.0 && offset == 0.0 {
                // Infimum over a cone: exactly zero, not a numerical near-miss.
                boundary = false;
            }
            let mut r = ConditionReport::new(id, verdict, evidence);
            r.margin = Some(Scalar::Float(margin));
            r.boundary = boundary;
            r.certificate = Some(Certificate::AffineMultiplier { multiplier });
            if verdict == Verdict::Fails {
                r.witness = Some(Witness {
                    kind: WitnessKind::Point,
                    value: Scalar::Float(dot_f64(gradient, &minimizer) + offset),
                    vector: Vector::Float(minimizer),
                });
            }
            r
        }
        LinearInfimum::Unbounded { ray } => {
            let norm = dot_f64(&ray, &ray).sqrt();
            let ray: Vec<f64> = ray.iter().map(|e| e / norm).collect();
            let mut r = ConditionReport::new(id, Verdict::Fails, evidence);
            r.witness = Some(Witness {
                kind: WitnessKind::Ray,
                value: Scalar::Float(dot_f64(gradient, &ray)),
                vector: Vector::Float(ray),
            });
            r.notes.push("infimum is unbounded below".into());
            r
        }
    };
    report.tolerance = Some(tol);
    Ok(report)
}

/// `⟨∇f(x̄), v⟩ ≥ 0` for all `v ∈ T`, exactly. Holds with a Lagrange
/// certificate `−∇f(x̄) = Σ λᵢ xᵢ* + Aᵀμ`; fails with a ray of `T` along which
/// the gradient is negative.
pub fn first_order_check(gradient: &RationalVector, t: &PolyhedralCone) -> Result<ConditionReport> {
    cone_linear_exact(ConditionId::FirstOrder, gradient, t, None)
}

pub fn first_order_check_float(
    gradient: &[f64],
    t: &PolyhedralCone,
    tol: f64,
) -> Result<ConditionReport> {
    cone_linear_float(ConditionId::FirstOrder, gradient, t, None, tol)
}

/// First-order condition over a half-space or hyperplane through the origin.
pub fn first_order_check_affine(
    gradient: &[f64],
    t: &AffineConstraint,
    tol: f64,
) -> Result<ConditionReport> {
    affine_linear(ConditionId::FirstOrder, gradient, t, 0.0, tol)
}

/// `T ∩ {v | ⟨∇f(x̄), v⟩ = 0}`.
pub fn critical_cone(gradient: &RationalVector, t: &PolyhedralCone) -> Result<PolyhedralCone> {
    ensure_dim("gradient", t.dim(), gradient.len())?;
    t.intersect_hyperplane(gradient)
}

/// As [`critical_cone`], with the binary64 gradient converted exactly.
pub fn critical_cone_float(gradient: &[f64], t: &PolyhedralCone) -> Result<PolyhedralCone> {
    critical_cone(&RationalVector::from_f64(gradient)?, t)
}

/// `⟨∇f(x̄), w⟩ ≥ 0` for all `w ∈ T²`.
pub fn check_c1(gradient: &RationalVector, t2: &PolyhedralCone) -> Result<ConditionReport> {
    cone_linear_exact(ConditionId::SecondOrderTangentGradient, gradient, t2, None)
}

pub fn check_c1_float(gradient: &[f64], t2: &PolyhedralCone, tol: f64) -> Result<ConditionReport> {
    cone_linear_float(ConditionId::SecondOrderTangentGradient, gradient, t2, None, tol)
}

/// Gradient condition over an affine second-order tangent set.
pub fn check_c1_affine(
    gradient: &[f64],
    t2: &AffineConstraint,
    tol: f64,
) -> Result<ConditionReport> {
    affine_linear(ConditionId::SecondOrderTangentGradient, gradient, t2, 0.0, tol)
}

/// `inf_{w ∈ T²} ⟨∇f(x̄), w⟩ + ⟨∇²f(x̄)v, v⟩ ≥ 0` with the quadratic term given
/// as a number.
pub fn classical_second_order_check(
    gradient: &RationalVector,
    quadform: &Rational,
    t2: &PolyhedralCone,
) -> Result<ConditionReport> {
    cone_linear_exact(ConditionId::ClassicalSecondOrder, gradient, t2, Some(quadform))
}

pub fn classical_second_order_check_float(
    gradient: &[f64],
    quadform: f64,
    t2: &PolyhedralCone,
    tol: f64,
) -> Result<ConditionReport> {
    cone_linear_float(ConditionId::ClassicalSecondOrder, gradient, t2, Some(quadform), tol)
}

/// Classical condition over an affine `T²`. The infimum is finite iff the
/// gradient is `−λ` times the unit normal, with `λ ≥ 0` for a half-space.
pub fn classical_second_order_check_affine(
    gradient: &[f64],
    quadform: f64,
    t2: &AffineConstraint,
    tol: f64,
) -> Result<ConditionReport> {
    affine_linear(ConditionId::ClassicalSecondOrder, gradient, t2, quadform, tol)
}

/// `⟨Mv, v⟩ ≥ 0` at a single direction.
pub fn curvature_check(m: &RationalMatrix, v: &RationalVector) -> Result<ConditionReport> {
    let value = m.quadratic_form(v)?;
    let evidence = Evidence::Curvature {
        matrix: Matrix::Exact(m.clone()),
        direction: Vector::Exact(v.clone()),
    };
    let verdict = if value.is_negative() {
        Verdict::Fails
    } else {
        Verdict::Holds
    };
    let mut report =
        ConditionReport::new(ConditionId::CriticalCurvature, verdict, evidence)
            .with_direction(Vector::Exact(v.clone()));
    if verdict == Verdict::Fails {
        report.witness = Some(Witness {
            kind: WitnessKind::Ray,
            vector: Vector::Exact(v.clone()),
            value: Scalar::Exact(value.clone()),
        });
    }
    report.margin = Some(Scalar::Exact(value));
    Ok(report)
}

pub fn curvature_check_float(m: &DMatrix<f64>, v: &[f64], tol: f64) -> Result<ConditionReport> {
    ensure_dim("direction", m.nrows(), v.len())?;
    let vv = nalgebra::DVector::from_column_slice(v);
    let value = (m * &vv).dot(&vv);
    let evidence = Evidence::Curvature {
        matrix: Matrix::float(m),
        direction: Vector::Float(v.to_vec()),
    };
    let (verdict, boundary) = float_verdict(value, tol);
    let mut report = ConditionReport::new(ConditionId::CriticalCurvature, verdict, evidence)
        .with_direction(Vector::Float(v.to_vec()));
    if verdict == Verdict::Fails {
        report.witness = Some(Witness {
            kind: WitnessKind::Ray,
            vector: Vector::Float(v.to_vec()),
            value: Scalar::Float(value),
        });
    }
    report.margin = Some(Scalar::Float(value));
    report.boundary = boundary && value != 0.0;
    report.tolerance = Some(tol);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::int;
    use crate::objectives::ConstraintKind;

    fn v(e: &[i64]) -> RationalVector {
        RationalVector::from_ints(e)
    }

    fn half_plane(row: &[i64]) -> PolyhedralCone {
        PolyhedralCone::from_inequalities(RationalMatrix::from_int_rows(2, &[row]).unwrap()).unwrap()
    }

    #[test]
    fn first_order_on_orthant() {
        let t = PolyhedralCone::nonnegative_orthant(2);
        let holds = first_order_check(&v(&[1, 0]), &t).unwrap();
        assert!(holds.holds() && holds.recheck().unwrap());
        let Some(Certificate::Lagrange(cert)) = &holds.certificate else {
            panic!("certificate expected");
        };
        // −(1,0) = 1·(−1,0) + 0·(0,−1)
        assert_eq!(cert.inequality[0].1 .0, int(1));
        assert_eq!(cert.inequality[1].1 .0, int(0));

        let fails = first_order_check(&v(&[-1, 0]), &t).unwrap();
        assert!(fails.fails() && fails.recheck().unwrap());
        assert_eq!(fails.witness.unwrap().vector, Vector::Exact(v(&[1, 0])));
    }

    #[test]
    fn first_order_on_smooth_half_space() {
        let r = 4.0 * 3f64.sqrt();
        let t = AffineConstraint::new(ConstraintKind::Inequality, vec![r, 0.0], 0.0);
        let report = first_order_check_affine(&[-r, 0.0], &t, 1e-9).unwrap();
        assert!(report.holds() && !report.boundary);
        assert_eq!(report.margin, Some(Scalar::Float(0.0)));
    }

    #[test]
    fn critical_cones() {
        let t = PolyhedralCone::nonnegative_orthant(2);
        let k = critical_cone(&v(&[1, 0]), &t).unwrap();
        let g = k.generators().unwrap();
        assert_eq!(g.rays, vec![v(&[0, 1])]);
        assert!(g.lineality.is_empty());
        let k0 = critical_cone(&v(&[0, 0]), &t).unwrap();
        assert!(crate::geometry::cone_equal(&k0, &t).unwrap().is_equal());

        let line = PolyhedralCone::new(
            RationalMatrix::from_int_rows(2, &[&[1, 0]]).unwrap(),
            RationalMatrix::empty(2),
        )
        .unwrap();
        let k = critical_cone(&v(&[2, 0]), &line).unwrap();
        assert!(crate::geometry::cone_equal(&k, &line).unwrap().is_equal());
    }

    #[test]
    fn c1_examples() {
        assert!(check_c1(&v(&[1, 0]), &half_plane(&[-1, 0])).unwrap().holds());
        let fails = check_c1(&v(&[1, 0]), &PolyhedralCone::whole_space(2)).unwrap();
        assert!(fails.fails() && fails.recheck().unwrap());
        assert_eq!(fails.witness.unwrap().vector, Vector::Exact(v(&[-1, 0])));
        assert!(check_c1(&v(&[0, 0]), &half_plane(&[0, -1])).unwrap().holds());
    }

    #[test]
    fn classical_examples() {
        let r3 = 3f64.sqrt();
        // Smooth inequality example: T² = {4√3 w₁ ≤ −6}, ∇f = (−4√3, 0), quadform −2.
        let t2 = AffineConstraint::new(ConstraintKind::Inequality, vec![4.0 * r3, 0.0], -6.0);
        let report = classical_second_order_check_affine(&[-4.0 * r3, 0.0], -2.0, &t2, 1e-9).unwrap();
        assert!(report.holds());
        assert!((report.margin.unwrap().to_f64() - 4.0).abs() < 1e-9);

        // Smooth equality example: T² = {−2w₁ = −4}, ∇f = (2, 0).
        let t2 = AffineConstraint::new(ConstraintKind::Equality, vec![-2.0, 0.0], -4.0);
        let report = classical_second_order_check_affine(&[2.0, 0.0], -2.0, &t2, 1e-9).unwrap();
        assert!(report.holds());
        assert!((report.margin.unwrap().to_f64() - 2.0).abs() < 1e-12);

        let orthant = PolyhedralCone::nonnegative_orthant(2);
        let report = classical_second_order_check(&v(&[0, 0]), &int(-1), &orthant).unwrap();
        assert!(report.fails() && report.recheck().unwrap());
        let w = report.witness.unwrap();
        assert_eq!(w.kind, WitnessKind::Point);
        assert_eq!(w.vector, Vector::Exact(v(&[0, 0])));
    }

    #[test]
    fn affine_unbounded_witness_is_unit() {
        let t2 = AffineConstraint::new(ConstraintKind::Inequality, vec![1.0, 0.0], 0.0);
        let report = check_c1_affine(&[3.0, 0.0], &t2, 1e-9).unwrap();
        assert!(report.fails() && report.recheck().unwrap());
        assert_eq!(report.witness.unwrap().vector, Vector::Float(vec![-1.0, 0.0]));
    }

    #[test]
    fn float_cone_checks() {
        let orthant = PolyhedralCone::nonnegative_orthant(2);
        let holds = first_order_check_float(&[1e-12, 2.0], &orthant, 1e-9).unwrap();
        assert!(holds.holds());
        let near = first_order_check_float(&[-1e-12, 2.0], &orthant, 1e-9).unwrap();
        assert!(near.holds() && near.boundary);
        let fails = first_order_check_float(&[-1e-3, 2.0], &orthant, 1e-9).unwrap();
        assert!(fails.fails() && fails.recheck().unwrap());
        let fails = classical_second_order_check_float(&[1.0, 0.0], -1e-3, &orthant, 1e-9).unwrap();
        assert!(fails.fails() && fails.recheck().unwrap());
    }

    #[test]
    fn curvature() {
        let m = RationalMatrix::diagonal(&[int(-4), int(-2)]);
        let r = curvature_check(&m, &v(&[0, 1])).unwrap();
        assert!(r.fails() && r.recheck().unwrap());
        assert_eq!(r.margin, Some(Scalar::Exact(int(-2))));
    }
}

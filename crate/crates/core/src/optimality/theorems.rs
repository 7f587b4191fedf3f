//! Bundled checks at a candidate point: the quadratic-programming triple and
//! the per-direction second-order comparison for C² objectives.

use serde::{Deserialize, Serialize};

use super::{
    check_c1, check_c1_affine, check_c1_float, check_c2_copositivity,
    classical_second_order_check, classical_second_order_check_affine,
    classical_second_order_check_float, critical_cone, curvature_check, curvature_check_float,
    first_order_check, first_order_check_affine, first_order_check_float, ConditionId,
    ConditionReport, CopositivityConfig, CriticalDirection, Vector, Verdict,
};
use crate::error::Result;
use crate::geometry::{ConeDescription, ConeRows, Polyhedron};
use crate::kernel::RationalVector;
use crate::objectives::{AffineConstraint, QuadraticObjective, SmoothLevelSetConstraint, SmoothObjective};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QpReport {
    pub first_order: ConditionReport,
    /// Worst of the per-direction reports below.
    pub tangent_gradient: ConditionReport,
    pub tangent_gradient_by_direction: Vec<ConditionReport>,
    pub copositivity: ConditionReport,
    pub tangent_cone: ConeDescription,
    pub critical_cone: ConeDescription,
    /// Directions the second-order tangent condition was checked at.
    pub checked_directions: Vec<RationalVector>,
}

impl QpReport {
    pub fn reports(&self) -> [&ConditionReport; 3] {
        [&self.first_order, &self.tangent_gradient, &self.copositivity]
    }

    pub fn verdict(&self) -> Verdict {
        self.reports()
            .iter()
            .fold(Verdict::Holds, |acc, r| acc.and(r.verdict))
    }
}

/// Critical directions at which the second-order tangent condition is
/// checked: every ray, both signs of every lineality vector, and the sum of
/// the rays. The sum lies in the relative interior of the critical cone, so
/// its set of tight active rows is the smallest and its second-order tangent
/// set the largest; the condition there implies it at every critical
/// direction.
fn critical_sample(gens: &crate::kernel::ConeGenerators) -> Vec<RationalVector> {
    let mut out = gens.all_directions();
    if gens.rays.len() > 1 {
        let sum = gens
            .rays
            .iter()
            .fold(RationalVector::zeros(gens.dim), |acc, r| acc.add(r));
        out.push(sum.primitive());
    }
    if out.is_empty() {
        out.push(RationalVector::zeros(gens.dim));
    }
    out
}

/// The three quadratic-programming conditions at `x̄`, in exact arithmetic.
pub fn check_qp(
    obj: &QuadraticObjective,
    d: &Polyhedron,
    x: &RationalVector,
    config: &CopositivityConfig,
) -> Result<QpReport> {
    d.require_member(x)?;
    let grad = obj.gradient(x)?;
    let t = d.tangent_cone(x)?;
    let mut first_order = first_order_check(&grad, &t)?.relabel(ConditionId::QpFirstOrder);
    let k = critical_cone(&grad, &t)?;
    if !first_order.holds() {
        first_order
            .notes
            .push("the critical cone below is computed although this condition fails".into());
    }
    let directions = critical_sample(k.generators()?);
    let mut per_direction = Vec::with_capacity(directions.len());
    for v in &directions {
        let t2 = d.second_order_tangent_set(x, v)?;
        per_direction.push(
            check_c1(&grad, &t2.cone)?
                .relabel(ConditionId::QpTangentGradient)
                .with_direction(Vector::Exact(v.clone())),
        );
    }
    let mut tangent_gradient = per_direction
        .iter()
        .find(|r| r.fails())
        .unwrap_or(&per_direction[0])
        .clone();
    tangent_gradient.notes.push(format!(
        "checked at {} critical directions",
        directions.len()
    ));
    let copositivity =
        check_c2_copositivity(obj.matrix(), &k, config)?.relabel(ConditionId::QpCriticalCopositivity);
    Ok(QpReport {
        first_order,
        tangent_gradient,
        tangent_gradient_by_direction: per_direction,
        copositivity,
        tangent_cone: t.describe()?,
        critical_cone: k.describe()?,
        checked_directions: directions,
    })
}

/// A constraint-set description in either form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SetDescription {
    Cone(ConeRows),
    Affine(AffineConstraint),
}

/// Second-order comparison at one critical direction `v`: the gradient
/// condition on `T²(x̄,v)`, the curvature sign at `v`, and the classical
/// condition, which combines the two.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Theorem33Report {
    pub direction: CriticalDirection,
    pub first_order: ConditionReport,
    pub tangent_gradient: ConditionReport,
    pub curvature: ConditionReport,
    pub classical: ConditionReport,
    pub tangent: SetDescription,
    pub second_order_tangent: SetDescription,
}

impl Theorem33Report {
    pub fn reports(&self) -> [&ConditionReport; 4] {
        [
            &self.first_order,
            &self.tangent_gradient,
            &self.curvature,
            &self.classical,
        ]
    }
}

/// Polyhedral set, binary64 C² objective, rational `x̄` and `v`.
pub fn theorem33_check(
    obj: &SmoothObjective,
    d: &Polyhedron,
    x: &RationalVector,
    v: &RationalVector,
    tol: f64,
) -> Result<Theorem33Report> {
    d.require_member(x)?;
    let xf = x.to_f64();
    let grad = obj.gradient(&xf)?;
    let t = d.tangent_cone(x)?;
    let direction = CriticalDirection::float_polyhedral(v.clone(), &t, &grad, tol)?;
    direction.require_critical()?;
    let t2 = d.second_order_tangent_set(x, v)?.cone;
    let hessian = obj.hessian(&xf)?;
    let vf = v.to_f64();
    let quadform = obj.hessian_quadform(&xf, &vf)?;
    let dir = Vector::Exact(v.clone());
    Ok(Theorem33Report {
        first_order: first_order_check_float(&grad, &t, tol)?,
        tangent_gradient: check_c1_float(&grad, &t2, tol)?.with_direction(dir.clone()),
        curvature: curvature_check_float(&hessian, &vf, tol)?,
        classical: classical_second_order_check_float(&grad, quadform, &t2, tol)?
            .with_direction(dir),
        tangent: SetDescription::Cone(ConeRows::from(&t)),
        second_order_tangent: SetDescription::Cone(ConeRows::from(&t2)),
        direction,
    })
}

/// Exact variant for a quadratic objective.
pub fn theorem33_check_quadratic(
    obj: &QuadraticObjective,
    d: &Polyhedron,
    x: &RationalVector,
    v: &RationalVector,
) -> Result<Theorem33Report> {
    d.require_member(x)?;
    let grad = obj.gradient(x)?;
    let t = d.tangent_cone(x)?;
    let direction = CriticalDirection::exact(v.clone(), &t, &grad)?;
    direction.require_critical()?;
    let t2 = d.second_order_tangent_set(x, v)?.cone;
    let quadform = obj.matrix().quadratic_form(v)?;
    let dir = Vector::Exact(v.clone());
    Ok(Theorem33Report {
        first_order: first_order_check(&grad, &t)?,
        tangent_gradient: check_c1(&grad, &t2)?.with_direction(dir.clone()),
        curvature: curvature_check(obj.matrix(), v)?,
        classical: classical_second_order_check(&grad, &quadform, &t2)?.with_direction(dir),
        tangent: SetDescription::Cone(ConeRows::from(&t)),
        second_order_tangent: SetDescription::Cone(ConeRows::from(&t2)),
        direction,
    })
}

/// Single smooth constraint, all in binary64.
pub fn theorem33_check_smooth(
    obj: &SmoothObjective,
    c: &SmoothLevelSetConstraint,
    x: &[f64],
    v: &[f64],
    tol: f64,
) -> Result<Theorem33Report> {
    let grad = obj.gradient(x)?;
    let t = c.tangent_cone(x, tol)?;
    let direction = CriticalDirection::affine(v.to_vec(), &t, &grad, tol)?;
    direction.require_critical()?;
    let t2 = c.second_order_tangent(x, v, tol)?;
    let hessian = obj.hessian(x)?;
    let quadform = obj.hessian_quadform(x, v)?;
    let dir = Vector::Float(v.to_vec());
    Ok(Theorem33Report {
        first_order: first_order_check_affine(&grad, &t, tol)?,
        tangent_gradient: check_c1_affine(&grad, &t2, tol)?.with_direction(dir.clone()),
        curvature: curvature_check_float(&hessian, v, tol)?,
        classical: classical_second_order_check_affine(&grad, quadform, &t2, tol)?
            .with_direction(dir),
        tangent: SetDescription::Affine(t.unit_normal_form()),
        second_order_tangent: SetDescription::Affine(t2.unit_normal_form()),
        direction,
    })
}

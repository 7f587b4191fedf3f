//! Second-order subdifferential membership and the bidirectional
//! second-order condition for C¹ objectives.
//!
//! For a C¹ function `f`, `z ∈ ∂̂²f(x̄)(v)` means
//!
//! ```text
//! limsup_{x → x̄} [⟨z, x − x̄⟩ − ⟨∇f(x), v⟩ + ⟨∇f(x̄), v⟩] / (‖x − x̄‖ + ‖∇f(x) − ∇f(x̄)‖) ≤ 0.
//! ```
//!
//! The limsup is estimated by a maximum over a logarithmic mesh of points
//! `x̄ ± δ`, restricted to its tail. For C² functions the set is the single
//! point `∇²f(x̄)v`.

mod calmness;
mod mesh;

pub use calmness::{estimate_calmness, CalmnessEstimate};
pub use mesh::MeshSpec;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_dim, Error, Result};
use crate::geometry::{ConeRows, Polyhedron};
use crate::kernel::{RationalMatrix, RationalVector};
use crate::objectives::fixtures::PiecewiseMonomialGradient;
use crate::objectives::SmoothObjective;
use crate::optimality::{
    check_c1_float, dot_f64, ConditionId, ConditionReport, CriticalDirection, Evidence, Scalar,
    Vector, Verdict, Witness, WitnessKind,
};

/// `(f, x̄, v, z)` for a membership test `z ∈ ∂̂²f(x̄)(v)`.
#[derive(Clone, Debug)]
pub struct SsdQuery {
    pub objective: SmoothObjective,
    pub point: Vec<f64>,
    pub direction: Vec<f64>,
    pub candidate: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Membership {
    Member,
    NotMember,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MembershipVerdict {
    pub verdict: Membership,
    /// Estimated limsup of the quotient.
    pub worst_quotient: f64,
    pub attaining_sample: Vec<f64>,
    pub samples: usize,
    pub tolerance: f64,
    pub mesh: MeshSpec,
}

impl MembershipVerdict {
    pub fn is_member(&self) -> bool {
        self.verdict == Membership::Member
    }
}

/// The quotient at one sample `x`, or `None` when the denominator vanishes.
pub fn membership_quotient(query: &SsdQuery, x: &[f64]) -> Result<Option<f64>> {
    let gx = query.objective.gradient(x)?;
    let gbar = query.objective.gradient(&query.point)?;
    let dx: Vec<f64> = x.iter().zip(&query.point).map(|(a, b)| a - b).collect();
    let dg: Vec<f64> = gx.iter().zip(&gbar).map(|(a, b)| a - b).collect();
    let denominator = norm(&dx) + norm(&dg);
    if denominator == 0.0 {
        return Ok(None);
    }
    let numerator = dot_f64(&query.candidate, &dx) - dot_f64(&gx, &query.direction)
        + dot_f64(&gbar, &query.direction);
    Ok(Some(numerator / denominator))
}

fn norm(v: &[f64]) -> f64 {
    dot_f64(v, v).sqrt()
}

/// Mesh estimate of membership; one-dimensional objectives only.
pub fn ssd_membership(query: &SsdQuery, mesh: &MeshSpec) -> Result<MembershipVerdict> {
    let n = query.objective.dim();
    ensure_dim("base point", n, query.point.len())?;
    ensure_dim("direction", n, query.direction.len())?;
    ensure_dim("candidate", n, query.candidate.len())?;
    if n != 1 {
        return Err(Error::Unsupported(format!(
            "mesh membership is one-dimensional; use the Hessian closed form for n = {n}"
        )));
    }
    let mut worst = f64::NEG_INFINITY;
    let mut attaining = query.point.clone();
    let mut samples = 0;
    for delta in mesh.tail_steps() {
        for sign in [1.0, -1.0] {
            let x = vec![query.point[0] + sign * delta];
            if let Some(q) = membership_quotient(query, &x)? {
                samples += 1;
                if q > worst {
                    worst = q;
                    attaining = x;
                }
            }
        }
    }
    if samples == 0 {
        return Err(Error::Evaluation("every mesh sample had a zero denominator".into()));
    }
    Ok(MembershipVerdict {
        verdict: if worst <= mesh.tolerance {
            Membership::Member
        } else {
            Membership::NotMember
        },
        worst_quotient: worst,
        attaining_sample: attaining,
        samples,
        tolerance: mesh.tolerance,
        mesh: mesh.clone(),
    })
}

/// Closed interval `[lower, upper]` of second-order subgradients.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SsdInterval {
    pub lower: f64,
    pub upper: f64,
}

impl SsdInterval {
    pub fn contains(&self, z: f64, tol: f64) -> bool {
        self.lower - tol <= z && z <= self.upper + tol
    }

    /// Distance from `z` to the interval.
    pub fn distance(&self, z: f64) -> f64 {
        (self.lower - z).max(z - self.upper).max(0.0)
    }
}

/// Exact subgradient interval for the shipped piecewise family
/// `f'(x) = −x (x ≤ 0), x² (x ≥ 0)` at `x̄ = 0`: `[−v, 0]` for `v ≥ 0`.
pub fn ssd_interval_1d_example_family(
    descriptor: &PiecewiseMonomialGradient,
    point: f64,
    v: f64,
) -> Result<SsdInterval> {
    if *descriptor != PiecewiseMonomialGradient::EX41 {
        return Err(Error::Unsupported(format!(
            "no closed form for gradient pieces {descriptor:?}"
        )));
    }
    if point != 0.0 {
        return Err(Error::Unsupported(format!(
            "closed form is only known at the kink x̄ = 0, not {point}"
        )));
    }
    if !(v >= 0.0) {
        return Err(Error::Precondition(format!("direction must be nonnegative, got {v}")));
    }
    Ok(SsdInterval {
        lower: -v,
        upper: 0.0,
    })
}

/// `∇²f(x̄)ᵀv`, the only element of `∂̂²f(x̄)(v)` for C² functions.
pub fn ssd_hessian_closed_form(obj: &SmoothObjective, x: &[f64], v: &[f64]) -> Result<Vec<f64>> {
    let h = obj.hessian(x)?;
    ensure_dim("direction", obj.dim(), v.len())?;
    let v = nalgebra::DVector::from_column_slice(v);
    Ok((h.transpose() * v).iter().copied().collect())
}

/// Second-order subgradient candidates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Candidates {
    Samples(Vec<Vec<f64>>),
    /// One-dimensional interval; the pairing is checked at both endpoints,
    /// where its minimum over the interval is attained.
    Interval(SsdInterval),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Theorem41Outcome {
    /// `v`, `−v` tangent and `⟨∇f(x̄), v⟩ = 0` do not all hold; the
    /// conclusions are reported for information only.
    HypothesisViolated,
    Holds,
    Fails,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Theorem41Report {
    pub outcome: Theorem41Outcome,
    pub direction: CriticalDirection,
    /// `⟨∇f(x̄), w⟩ ≥ 0` on `T²(x̄,v)`; absent when `v` is not tangent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gradient_condition: Option<ConditionReport>,
    pub pairings: Vec<ConditionReport>,
    /// Membership of each candidate in `∂̂²f(x̄)(v)`, when decidable.
    pub memberships: Vec<MembershipVerdict>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub second_order_tangent: Option<ConeRows>,
}

fn pairing_report(z: &[f64], v: &[f64], tol: f64) -> ConditionReport {
    let value = dot_f64(z, v);
    let verdict = if value < -tol {
        Verdict::Fails
    } else {
        Verdict::Holds
    };
    let evidence = Evidence::Pairing {
        z: Vector::Float(z.to_vec()),
        direction: Vector::Float(v.to_vec()),
    };
    let mut r = ConditionReport::new(ConditionId::SubdifferentialCurvature, verdict, evidence);
    r.margin = Some(Scalar::Float(value));
    r.tolerance = Some(tol);
    r.boundary = verdict == Verdict::Holds && value.abs() <= tol && value != 0.0;
    if verdict == Verdict::Fails {
        r.witness = Some(Witness {
            kind: WitnessKind::Point,
            vector: Vector::Float(z.to_vec()),
            value: Scalar::Float(value),
        });
    }
    r
}

/// Membership of `z` in `∂̂²f(x̄)(v)`: the mesh oracle in one dimension,
/// the Hessian closed form otherwise. `None` when neither applies.
pub fn candidate_membership(
    obj: &SmoothObjective,
    x: &[f64],
    v: &[f64],
    z: &[f64],
    mesh: &MeshSpec,
) -> Result<Option<MembershipVerdict>> {
    if obj.dim() == 1 {
        let query = SsdQuery {
            objective: obj.clone(),
            point: x.to_vec(),
            direction: v.to_vec(),
            candidate: z.to_vec(),
        };
        return ssd_membership(&query, mesh).map(Some);
    }
    if !obj.has_hessian() {
        return Ok(None);
    }
    let exact = ssd_hessian_closed_form(obj, x, v)?;
    let gap: Vec<f64> = z.iter().zip(&exact).map(|(a, b)| a - b).collect();
    let distance = norm(&gap);
    Ok(Some(MembershipVerdict {
        verdict: if distance <= mesh.tolerance {
            Membership::Member
        } else {
            Membership::NotMember
        },
        worst_quotient: distance,
        attaining_sample: exact,
        samples: 0,
        tolerance: mesh.tolerance,
        mesh: mesh.clone(),
    }))
}

/// Checks the bidirectional second-order condition at `x̄` in direction `v`.
///
/// The hypothesis (`v ∈ T`, `−v ∈ T`, `⟨∇f(x̄), v⟩ = 0`) is reported as
/// flags. The gradient condition on `T²(x̄,v)` is evaluated whenever `v` is
/// tangent, and `⟨z, v⟩` for every candidate, even when the hypothesis fails.
pub fn theorem41_check(
    obj: &SmoothObjective,
    d: &Polyhedron,
    x: &RationalVector,
    v: &RationalVector,
    candidates: &Candidates,
    mesh: &MeshSpec,
    tol: f64,
) -> Result<Theorem41Report> {
    d.require_member(x)?;
    let xf = x.to_f64();
    let vf = v.to_f64();
    let grad = obj.gradient(&xf)?;
    let t = d.tangent_cone(x)?;
    let direction = CriticalDirection::float_polyhedral(v.clone(), &t, &grad, tol)?;

    let mut second_order_tangent = None;
    let gradient_condition = if direction.in_tangent_cone {
        let t2 = d.second_order_tangent_set(x, v)?.cone;
        let report = check_c1_float(&grad, &t2, tol)?
            .relabel(ConditionId::SubdifferentialGradient)
            .with_direction(Vector::Exact(v.clone()));
        second_order_tangent = Some(ConeRows::from(&t2));
        Some(report)
    } else {
        None
    };

    let zs: Vec<Vec<f64>> = match candidates {
        Candidates::Samples(zs) => {
            for z in zs {
                ensure_dim("candidate", obj.dim(), z.len())?;
            }
            zs.clone()
        }
        Candidates::Interval(i) => {
            ensure_dim("interval candidates", 1, obj.dim())?;
            if i.lower == i.upper {
                vec![vec![i.lower]]
            } else {
                vec![vec![i.lower], vec![i.upper]]
            }
        }
    };
    let pairings: Vec<ConditionReport> = zs
        .iter()
        .map(|z| pairing_report(z, &vf, tol).with_direction(Vector::Exact(v.clone())))
        .collect();
    let mut memberships = Vec::new();
    if let Candidates::Samples(_) = candidates {
        for z in &zs {
            if let Some(m) = candidate_membership(obj, &xf, &vf, z, mesh)? {
                memberships.push(m);
            }
        }
    }

    let outcome = if !direction.is_bidirectional() {
        Theorem41Outcome::HypothesisViolated
    } else {
        let verdict = gradient_condition
            .iter()
            .chain(&pairings)
            .fold(Verdict::Holds, |acc, r| acc.and(r.verdict));
        match verdict {
            Verdict::Holds => Theorem41Outcome::Holds,
            Verdict::Fails => Theorem41Outcome::Fails,
            Verdict::Inconclusive => Theorem41Outcome::Inconclusive,
        }
    };
    Ok(Theorem41Report {
        outcome,
        direction,
        gradient_condition,
        pairings,
        memberships,
        second_order_tangent,
    })
}

/// Unconstrained preset: `D = Rⁿ`.
pub fn theorem42_check(
    obj: &SmoothObjective,
    x: &RationalVector,
    v: &RationalVector,
    candidates: &Candidates,
    mesh: &MeshSpec,
    tol: f64,
) -> Result<Theorem41Report> {
    theorem41_check(obj, &Polyhedron::whole_space(x.len()), x, v, candidates, mesh, tol)
}

/// Linear-equality preset: `D = {x | Ax + b = 0}`.
#[allow(clippy::too_many_arguments)]
pub fn theorem43_check(
    obj: &SmoothObjective,
    a: &RationalMatrix,
    b: &RationalVector,
    x: &RationalVector,
    v: &RationalVector,
    candidates: &Candidates,
    mesh: &MeshSpec,
    tol: f64,
) -> Result<Theorem41Report> {
    let d = Polyhedron::affine(a.clone(), b.neg())?;
    theorem41_check(obj, &d, x, v, candidates, mesh, tol)
}

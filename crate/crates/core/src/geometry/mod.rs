//! Polyhedral constraint sets `{x | Ax = y, ⟨xᵢ*, x⟩ ≤ αᵢ}` and their
//! first- and second-order tangent constructions.
//!
//! At a feasible point `x̄` with active rows `I(x̄)`:
//!
//! * the contingent cone is `{v | Av = 0, ⟨xᵢ*, v⟩ ≤ 0, i ∈ I(x̄)}`;
//! * for `v` in that cone, the second-order tangent set is the contingent
//!   cone of the tangent cone at `v`, which is again a cone:
//!   `{w | Aw = 0, ⟨xᵢ*, w⟩ ≤ 0, i ∈ I⁰(v)}` with
//!   `I⁰(v) = {i ∈ I(x̄) | ⟨xᵢ*, v⟩ = 0}`;
//! * the normal cone is `cone{xᵢ* | i ∈ I(x̄)} + row space of A`.
//!
//! [`oracle`] decides the same memberships from the definitions (feasibility
//! of `x̄ + tv` and `x̄ + tv + ½t²w` at an explicit small `t`) and serves as
//! the cross-check for these formulas.

mod cone;
pub mod oracle;

pub use cone::{
    cone_equal, cone_included, first_escapee, ConeDescription, ConeEquality, ConeRows,
    PolyhedralCone,
};
pub use oracle::{second_order_step_oracle, tangent_step_oracle};

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{ensure_dim, Error, Result};
use crate::kernel::{
    solve_lp, LinearProgram, LpResult, Multipliers, Rational, RationalMatrix, RationalVector,
};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Polyhedron {
    eq_matrix: RationalMatrix,
    eq_rhs: RationalVector,
    ineq_matrix: RationalMatrix,
    ineq_rhs: RationalVector,
}

/// Active inequality rows at a feasible point (0-based row indices, sorted).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActiveSet {
    pub point: RationalVector,
    pub indices: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Feasibility {
    Feasible(RationalVector),
    Empty(Multipliers),
}

/// `T²_D(x̄, v)` together with `I⁰(v)`.
#[derive(Clone, Debug)]
pub struct SecondOrderTangent {
    pub cone: PolyhedralCone,
    pub zero_active: Vec<usize>,
}

impl Polyhedron {
    pub fn new(
        eq_matrix: RationalMatrix,
        eq_rhs: RationalVector,
        ineq_matrix: RationalMatrix,
        ineq_rhs: RationalVector,
    ) -> Result<Self> {
        ensure_dim("equality columns", ineq_matrix.ncols(), eq_matrix.ncols())?;
        ensure_dim("equality right-hand side", eq_matrix.nrows(), eq_rhs.len())?;
        ensure_dim("inequality bounds", ineq_matrix.nrows(), ineq_rhs.len())?;
        Ok(Self {
            eq_matrix,
            eq_rhs,
            ineq_matrix,
            ineq_rhs,
        })
    }

    pub fn from_inequalities(ineq_matrix: RationalMatrix, ineq_rhs: RationalVector) -> Result<Self> {
        let n = ineq_matrix.ncols();
        Self::new(RationalMatrix::empty(n), RationalVector::zeros(0), ineq_matrix, ineq_rhs)
    }

    pub fn whole_space(dim: usize) -> Self {
        Self::from_inequalities(RationalMatrix::empty(dim), RationalVector::zeros(0))
            .expect("consistent")
    }

    /// `{x | x ≥ 0}` written as rows `−xᵢ ≤ 0`.
    pub fn nonnegative_orthant(dim: usize) -> Self {
        let cone = PolyhedralCone::nonnegative_orthant(dim);
        cone.as_polyhedron()
    }

    /// `{x | Ax = b}`
    pub fn affine(eq_matrix: RationalMatrix, eq_rhs: RationalVector) -> Result<Self> {
        let n = eq_matrix.ncols();
        Self::new(eq_matrix, eq_rhs, RationalMatrix::empty(n), RationalVector::zeros(0))
    }

    pub fn dim(&self) -> usize {
        self.ineq_matrix.ncols()
    }

    pub fn eq_matrix(&self) -> &RationalMatrix {
        &self.eq_matrix
    }

    pub fn eq_rhs(&self) -> &RationalVector {
        &self.eq_rhs
    }

    pub fn ineq_matrix(&self) -> &RationalMatrix {
        &self.ineq_matrix
    }

    pub fn ineq_rhs(&self) -> &RationalVector {
        &self.ineq_rhs
    }

    pub fn inequality_count(&self) -> usize {
        self.ineq_matrix.nrows()
    }

    /// `⟨xᵢ*, x⟩` for every inequality row.
    pub(crate) fn row_values(&self, x: &RationalVector) -> Result<RationalVector> {
        self.ineq_matrix.mul_vec(x)
    }

    pub fn contains(&self, x: &RationalVector) -> Result<bool> {
        ensure_dim("point", self.dim(), x.len())?;
        Ok(self.eq_matrix.mul_vec(x)? == self.eq_rhs
            && self
                .row_values(x)?
                .iter()
                .zip(&self.ineq_rhs)
                .all(|(a, b)| a <= b))
    }

    /// Errors with the violated rows (and an emptiness certificate when the
    /// set has no points at all) unless `x ∈ D`.
    pub fn require_member(&self, x: &RationalVector) -> Result<()> {
        ensure_dim("point", self.dim(), x.len())?;
        let eq_values = self.eq_matrix.mul_vec(x)?;
        let equality_rows: Vec<usize> = (0..eq_values.len())
            .filter(|&i| eq_values[i] != self.eq_rhs[i])
            .collect();
        let values = self.row_values(x)?;
        let inequality_rows: Vec<usize> = (0..values.len())
            .filter(|&i| values[i] > self.ineq_rhs[i])
            .collect();
        if equality_rows.is_empty() && inequality_rows.is_empty() {
            return Ok(());
        }
        let emptiness = match self.feasibility()? {
            Feasibility::Empty(certificate) => Some(certificate),
            Feasibility::Feasible(_) => None,
        };
        Err(Error::PointOutside {
            inequality_rows,
            equality_rows,
            emptiness,
        })
    }

    pub fn feasibility(&self) -> Result<Feasibility> {
        let lp = LinearProgram::feasibility(self.dim())
            .with_equalities(self.eq_matrix.clone(), self.eq_rhs.clone())
            .with_inequalities(self.ineq_matrix.clone(), self.ineq_rhs.clone());
        Ok(match solve_lp(&lp)? {
            LpResult::Infeasible { farkas } => Feasibility::Empty(farkas),
            LpResult::Optimal { point, .. } | LpResult::Unbounded { point, .. } => {
                Feasibility::Feasible(point)
            }
        })
    }

    pub fn active_set(&self, x: &RationalVector) -> Result<ActiveSet> {
        self.require_member(x)?;
        let values = self.row_values(x)?;
        let indices = (0..values.len())
            .filter(|&i| values[i] == self.ineq_rhs[i])
            .collect();
        Ok(ActiveSet {
            point: x.clone(),
            indices,
        })
    }

    /// Contingent cone at `x̄`; inequality rows are labelled with their
    /// originating row index.
    pub fn tangent_cone(&self, x: &RationalVector) -> Result<PolyhedralCone> {
        let active = self.active_set(x)?;
        PolyhedralCone::with_labels(
            self.eq_matrix.clone(),
            self.ineq_matrix.select_rows(&active.indices),
            active.indices,
        )
    }

    /// Second-order tangent set at `x̄` in direction `v ∈ T_D(x̄)`. A
    /// non-tangent `v` is an error rather than an empty set.
    pub fn second_order_tangent_set(
        &self,
        x: &RationalVector,
        v: &RationalVector,
    ) -> Result<SecondOrderTangent> {
        let active = self.active_set(x)?;
        ensure_dim("direction", self.dim(), v.len())?;
        let values = self.row_values(v)?;
        let mut violated_rows: Vec<usize> = active
            .indices
            .iter()
            .copied()
            .filter(|&i| values[i].is_positive())
            .collect();
        if !self.eq_matrix.mul_vec(v)?.is_zero() || !violated_rows.is_empty() {
            violated_rows.sort_unstable();
            return Err(Error::NotTangent { violated_rows });
        }
        let zero_active: Vec<usize> = active
            .indices
            .into_iter()
            .filter(|&i| values[i].is_zero())
            .collect();
        let cone = PolyhedralCone::with_labels(
            self.eq_matrix.clone(),
            self.ineq_matrix.select_rows(&zero_active),
            zero_active.clone(),
        )?;
        Ok(SecondOrderTangent { cone, zero_active })
    }

    /// `cone{xᵢ* | i ∈ I(x̄)} + row space of A`
    pub fn normal_cone(&self, x: &RationalVector) -> Result<PolyhedralCone> {
        let active = self.active_set(x)?;
        let rays = active
            .indices
            .iter()
            .map(|&i| self.ineq_matrix.row_vector(i))
            .collect();
        let lineality = self.eq_matrix.row_space_basis();
        PolyhedralCone::from_generators(self.dim(), rays, lineality)
    }

    /// Inequality slacks `αᵢ − ⟨xᵢ*, x⟩`.
    pub(crate) fn slacks(&self, x: &RationalVector) -> Result<Vec<Rational>> {
        Ok(self
            .row_values(x)?
            .iter()
            .zip(&self.ineq_rhs)
            .map(|(v, b)| b - v)
            .collect())
    }

    pub fn is_empty(&self) -> Result<bool> {
        Ok(matches!(self.feasibility()?, Feasibility::Empty(_)))
    }
}

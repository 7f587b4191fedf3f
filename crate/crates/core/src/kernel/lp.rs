//! Dense two-phase simplex over exact rationals with Bland's rule.
//!
//! Problems have the shape
//!
//! ```text
//! minimize  c·x   subject to   A_eq x = b_eq,   A_in x ≤ b_in,   x free.
//! ```
//!
//! Every outcome carries a certificate that can be checked with plain
//! arithmetic: primal point plus dual multipliers on `Optimal`, a point and an
//! improving ray on `Unbounded`, and Farkas multipliers on `Infeasible`.
//!
//! Multiplier convention: `λ ≥ 0` on inequality rows and free `μ` on equality
//! rows. On `Optimal` they satisfy `A_inᵀλ + A_eqᵀμ = −c` and the optimum is
//! `−(λ·b_in + μ·b_eq)`. On `Infeasible` they satisfy `A_inᵀλ + A_eqᵀμ = 0`
//! with `λ·b_in + μ·b_eq < 0`.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{RationalMatrix, RationalVector, Rational};
use crate::error::{ensure_dim, Error, Result};

#[derive(Clone, Debug)]
pub struct LinearProgram {
    pub objective: RationalVector,
    pub eq_matrix: RationalMatrix,
    pub eq_rhs: RationalVector,
    pub ineq_matrix: RationalMatrix,
    pub ineq_rhs: RationalVector,
}

impl LinearProgram {
    /// An unconstrained problem in `dim` variables; add rows with the
    /// `with_*` builders.
    pub fn new(objective: RationalVector) -> Self {
        let n = objective.len();
        Self {
            objective,
            eq_matrix: RationalMatrix::empty(n),
            eq_rhs: RationalVector::zeros(0),
            ineq_matrix: RationalMatrix::empty(n),
            ineq_rhs: RationalVector::zeros(0),
        }
    }

    pub fn feasibility(dim: usize) -> Self {
        Self::new(RationalVector::zeros(dim))
    }

    pub fn with_equalities(mut self, matrix: RationalMatrix, rhs: RationalVector) -> Self {
        self.eq_matrix = matrix;
        self.eq_rhs = rhs;
        self
    }

    pub fn with_inequalities(mut self, matrix: RationalMatrix, rhs: RationalVector) -> Self {
        self.ineq_matrix = matrix;
        self.ineq_rhs = rhs;
        self
    }

    pub fn dim(&self) -> usize {
        self.objective.len()
    }

    fn validate(&self) -> Result<()> {
        let n = self.dim();
        ensure_dim("equality matrix columns", n, self.eq_matrix.ncols())?;
        ensure_dim("inequality matrix columns", n, self.ineq_matrix.ncols())?;
        ensure_dim("equality right-hand side", self.eq_matrix.nrows(), self.eq_rhs.len())?;
        ensure_dim(
            "inequality right-hand side",
            self.ineq_matrix.nrows(),
            self.ineq_rhs.len(),
        )
    }

    pub fn is_feasible_point(&self, x: &RationalVector) -> bool {
        x.len() == self.dim()
            && (0..self.eq_matrix.nrows())
                .all(|i| super::linalg::dot(self.eq_matrix.row(i), x.as_slice()) == self.eq_rhs[i])
            && (0..self.ineq_matrix.nrows()).all(|i| {
                super::linalg::dot(self.ineq_matrix.row(i), x.as_slice()) <= self.ineq_rhs[i]
            })
    }

    /// `A_inᵀλ + A_eqᵀμ`
    fn combine_rows(&self, m: &Multipliers) -> RationalVector {
        let mut acc = RationalVector::zeros(self.dim());
        for (i, lambda) in m.inequality.iter().enumerate() {
            acc = acc.axpy(lambda, &self.ineq_matrix.row_vector(i));
        }
        for (i, mu) in m.equality.iter().enumerate() {
            acc = acc.axpy(mu, &self.eq_matrix.row_vector(i));
        }
        acc
    }

    fn combine_rhs(&self, m: &Multipliers) -> Rational {
        m.inequality.dot(&self.ineq_rhs) + m.equality.dot(&self.eq_rhs)
    }

    fn multipliers_well_formed(&self, m: &Multipliers) -> bool {
        m.inequality.len() == self.ineq_matrix.nrows()
            && m.equality.len() == self.eq_matrix.nrows()
            && m.inequality.iter().all(|l| !l.is_negative())
    }

    /// Re-checks the certificate attached to `result` with exact arithmetic.
    pub fn verify(&self, result: &LpResult) -> bool {
        match result {
            LpResult::Optimal {
                value,
                point,
                duals,
            } => {
                self.is_feasible_point(point)
                    && &self.objective.dot(point) == value
                    && self.multipliers_well_formed(duals)
                    && self.combine_rows(duals) == self.objective.neg()
                    && -self.combine_rhs(duals) == *value
            }
            LpResult::Unbounded { point, ray } => {
                self.is_feasible_point(point)
                    && ray.len() == self.dim()
                    && self.eq_matrix.mul_vec(ray).map(|v| v.is_zero()).unwrap_or(false)
                    && self
                        .ineq_matrix
                        .mul_vec(ray)
                        .map(|v| v.iter().all(|e| !e.is_positive()))
                        .unwrap_or(false)
                    && self.objective.dot(ray).is_negative()
            }
            LpResult::Infeasible { farkas } => {
                self.multipliers_well_formed(farkas)
                    && self.combine_rows(farkas).is_zero()
                    && self.combine_rhs(farkas).is_negative()
            }
        }
    }
}

/// Row multipliers; see the module docs for the sign convention.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Multipliers {
    pub equality: RationalVector,
    pub inequality: RationalVector,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LpStatus {
    Optimal,
    Unbounded,
    Infeasible,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpResult {
    Optimal {
        value: Rational,
        point: RationalVector,
        duals: Multipliers,
    },
    Unbounded {
        point: RationalVector,
        ray: RationalVector,
    },
    Infeasible {
        farkas: Multipliers,
    },
}

impl LpResult {
    pub fn status(&self) -> LpStatus {
        match self {
            LpResult::Optimal { .. } => LpStatus::Optimal,
            LpResult::Unbounded { .. } => LpStatus::Unbounded,
            LpResult::Infeasible { .. } => LpStatus::Infeasible,
        }
    }

    pub fn optimum(&self) -> Option<&Rational> {
        match self {
            LpResult::Optimal { value, .. } => Some(value),
            _ => None,
        }
    }

    pub fn point(&self) -> Option<&RationalVector> {
        match self {
            LpResult::Optimal { point, .. } | LpResult::Unbounded { point, .. } => Some(point),
            LpResult::Infeasible { .. } => None,
        }
    }
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    ncols: usize,
}

impl Tableau {
    fn pivot(&mut self, row: usize, col: usize) {
        let inv = self.rows[row][col].recip();
        for e in self.rows[row].iter_mut() {
            *e = &*e * &inv;
        }
        self.rhs[row] = &self.rhs[row] * &inv;
        let pivot_row = self.rows[row].clone();
        let pivot_rhs = self.rhs[row].clone();
        for r in 0..self.rows.len() {
            if r == row || self.rows[r][col].is_zero() {
                continue;
            }
            let factor = self.rows[r][col].clone();
            for (e, p) in self.rows[r].iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *e -= &factor * p;
                }
            }
            self.rhs[r] -= &factor * &pivot_rhs;
        }
        self.basis[row] = col;
    }

    fn reduced_cost(&self, costs: &[Rational], col: usize) -> Rational {
        let mut d = costs[col].clone();
        for (r, &b) in self.basis.iter().enumerate() {
            if !costs[b].is_zero() && !self.rows[r][col].is_zero() {
                d -= &costs[b] * &self.rows[r][col];
            }
        }
        d
    }

    /// Runs Bland's-rule simplex on the columns `< allowed`. Returns the
    /// entering column of an unbounded direction, if one is found.
    fn optimize(&mut self, costs: &[Rational], allowed: usize) -> Option<usize> {
        loop {
            let entering = (0..allowed)
                .filter(|c| !self.basis.contains(c))
                .find(|&c| self.reduced_cost(costs, c).is_negative());
            let col = entering?;
            let mut best: Option<(usize, Rational)> = None;
            for r in 0..self.rows.len() {
                let a = &self.rows[r][col];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[r] / a;
                let better = match &best {
                    None => true,
                    Some((br, bv)) => {
                        ratio < *bv || (ratio == *bv && self.basis[r] < self.basis[*br])
                    }
                };
                if better {
                    best = Some((r, ratio));
                }
            }
            match best {
                Some((row, _)) => self.pivot(row, col),
                None => return Some(col),
            }
        }
    }

    /// `c_Bᵀ B⁻¹`, read off the artificial columns (which started as the
    /// identity).
    fn row_duals(&self, costs: &[Rational], art_start: usize) -> Vec<Rational> {
        let m = self.rows.len();
        (0..m)
            .map(|k| {
                let mut acc = Rational::zero();
                for (r, &b) in self.basis.iter().enumerate() {
                    acc += &costs[b] * &self.rows[r][art_start + k];
                }
                acc
            })
            .collect()
    }
}

/// Solves the program exactly. Deterministic: Bland's rule with
/// lowest-index tie-breaking in both the entering and leaving choice.
pub fn solve_lp(lp: &LinearProgram) -> Result<LpResult> {
    lp.validate()?;
    let n = lp.dim();
    let m_eq = lp.eq_matrix.nrows();
    let m_in = lp.ineq_matrix.nrows();
    let m = m_eq + m_in;

    // Columns: x⁺ (n), x⁻ (n), inequality slacks (m_in), artificials (m).
    let slack_start = 2 * n;
    let art_start = slack_start + m_in;
    let ncols = art_start + m;

    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    let mut signs = Vec::with_capacity(m);
    for r in 0..m {
        let (coeffs, b) = if r < m_eq {
            (lp.eq_matrix.row(r), &lp.eq_rhs[r])
        } else {
            (lp.ineq_matrix.row(r - m_eq), &lp.ineq_rhs[r - m_eq])
        };
        let sign = if b.is_negative() { -Rational::one() } else { Rational::one() };
        let mut row = vec![Rational::zero(); ncols];
        for j in 0..n {
            row[j] = &sign * &coeffs[j];
            row[n + j] = -&row[j];
        }
        if r >= m_eq {
            row[slack_start + (r - m_eq)] = sign.clone();
        }
        row[art_start + r] = Rational::one();
        rhs.push(&sign * b);
        signs.push(sign);
        rows.push(row);
    }
    let mut tableau = Tableau {
        rows,
        rhs,
        basis: (art_start..ncols).collect(),
        ncols,
    };

    let mut phase1 = vec![Rational::zero(); ncols];
    for c in phase1.iter_mut().skip(art_start) {
        *c = Rational::one();
    }
    if tableau.optimize(&phase1, ncols).is_some() {
        return Err(Error::Internal("phase-one objective unbounded".into()));
    }
    let infeasibility: Rational = tableau
        .basis
        .iter()
        .zip(&tableau.rhs)
        .filter(|(&b, _)| b >= art_start)
        .map(|(_, v)| v.clone())
        .sum();

    if infeasibility.is_positive() {
        let y = tableau.row_duals(&phase1, art_start);
        let u: Vec<Rational> = y.iter().zip(&signs).map(|(a, s)| a * s).collect();
        let farkas = Multipliers {
            equality: u[..m_eq].iter().map(|e| -e).collect(),
            inequality: u[m_eq..].iter().map(|e| -e).collect(),
        };
        return finish(lp, LpResult::Infeasible { farkas });
    }

    // Drive zero-level artificials out of the basis where possible. Rows
    // where no structural column has a nonzero entry are redundant and keep
    // their artificial at zero for good.
    for r in 0..m {
        if tableau.basis[r] < art_start {
            continue;
        }
        if let Some(col) = (0..art_start).find(|&c| !tableau.rows[r][c].is_zero()) {
            tableau.pivot(r, col);
        }
    }

    let mut phase2 = vec![Rational::zero(); tableau.ncols];
    for j in 0..n {
        phase2[j] = lp.objective[j].clone();
        phase2[n + j] = -lp.objective[j].clone();
    }
    let unbounded_col = tableau.optimize(&phase2, art_start);

    let mut z = vec![Rational::zero(); ncols];
    for (r, &b) in tableau.basis.iter().enumerate() {
        z[b] = tableau.rhs[r].clone();
    }
    let point: RationalVector = (0..n).map(|j| &z[j] - &z[n + j]).collect();

    if let Some(col) = unbounded_col {
        let mut d = vec![Rational::zero(); ncols];
        d[col] = Rational::one();
        for (r, &b) in tableau.basis.iter().enumerate() {
            d[b] = -tableau.rows[r][col].clone();
        }
        let ray: RationalVector = (0..n).map(|j| &d[j] - &d[n + j]).collect();
        return finish(lp, LpResult::Unbounded { point, ray });
    }

    let y = tableau.row_duals(&phase2, art_start);
    let u: Vec<Rational> = y.iter().zip(&signs).map(|(a, s)| a * s).collect();
    let duals = Multipliers {
        equality: u[..m_eq].iter().map(|e| -e).collect(),
        inequality: u[m_eq..].iter().map(|e| -e).collect(),
    };
    let value = lp.objective.dot(&point);
    finish(
        lp,
        LpResult::Optimal {
            value,
            point,
            duals,
        },
    )
}

fn finish(lp: &LinearProgram, result: LpResult) -> Result<LpResult> {
    if lp.verify(&result) {
        Ok(result)
    } else {
        Err(Error::Internal(format!(
            "simplex produced an invalid {:?} certificate",
            result.status()
        )))
    }
}

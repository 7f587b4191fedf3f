//! Double-description conversion from `{v | Bv = 0, Gv ≤ 0}` to generators.
//!
//! The lineality space is tracked as an explicit basis. Each inequality
//! either splits off a lineality direction (when some basis vector is not
//! orthogonal to it) or is processed with the standard pairwise combination
//! step, restricted to adjacent ray pairs by the combinatorial test: rays `p`
//! and `q` are adjacent iff no third ray is tight on every constraint that is
//! tight on both.

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{solve_lp, LinearProgram, LpStatus, RationalMatrix, RationalVector};
use crate::error::{ensure_dim, Error, Result};

pub const DEFAULT_DIMENSION_CAP: usize = 10;

/// `cone(rays) + span(lineality)`, in canonical form when produced by
/// [`double_description`]: lineality is the RREF basis of the subspace, each
/// ray is reduced modulo the lineality pivots, scaled to a primitive integer
/// vector and the rays are sorted lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ConeGenerators {
    pub dim: usize,
    pub rays: Vec<RationalVector>,
    pub lineality: Vec<RationalVector>,
}

impl ConeGenerators {
    pub fn origin(dim: usize) -> Self {
        Self {
            dim,
            rays: Vec::new(),
            lineality: Vec::new(),
        }
    }

    pub fn is_origin(&self) -> bool {
        self.rays.is_empty() && self.lineality.is_empty()
    }

    pub fn is_subspace(&self) -> bool {
        self.rays.is_empty()
    }

    /// Rays followed by each lineality vector and its negation.
    pub fn all_directions(&self) -> Vec<RationalVector> {
        let mut out = self.rays.clone();
        for l in &self.lineality {
            out.push(l.clone());
            out.push(l.neg());
        }
        out
    }

    /// Membership of `v` in the generated cone, decided by an LP over the
    /// generator coefficients.
    pub fn contains_lp(&self, v: &RationalVector) -> Result<bool> {
        ensure_dim("generator membership", self.dim, v.len())?;
        let k = self.rays.len() + self.lineality.len();
        if k == 0 {
            return Ok(v.is_zero());
        }
        let columns: Vec<&RationalVector> = self.rays.iter().chain(&self.lineality).collect();
        let mut data = Vec::with_capacity(self.dim * k);
        for i in 0..self.dim {
            for c in &columns {
                data.push(c[i].clone());
            }
        }
        let eq = RationalMatrix::new(self.dim, k, data)?;
        let mut ineq = RationalMatrix::zeros(0, k);
        for r in 0..self.rays.len() {
            ineq.push_row(&RationalVector::unit(k, r).neg())?;
        }
        let lp = LinearProgram::feasibility(k)
            .with_equalities(eq, v.clone())
            .with_inequalities(ineq, RationalVector::zeros(self.rays.len()));
        Ok(solve_lp(&lp)?.status() != LpStatus::Infeasible)
    }
}

struct Ray {
    vector: RationalVector,
    /// `tight[k]`: constraint `k` (in processing order) holds with equality.
    tight: Vec<bool>,
}

/// Generators of `{v ∈ Rⁿ | Bv = 0, Gv ≤ 0}`.
pub fn double_description(
    dim: usize,
    equalities: &RationalMatrix,
    inequalities: &RationalMatrix,
    cap: usize,
) -> Result<ConeGenerators> {
    if dim > cap {
        return Err(Error::DimensionCapExceeded { dim, cap });
    }
    ensure_dim("equality matrix columns", dim, equalities.ncols())?;
    ensure_dim("inequality matrix columns", dim, inequalities.ncols())?;

    let mut lineality: Vec<RationalVector> = (0..dim).map(|i| RationalVector::unit(dim, i)).collect();
    let mut rays: Vec<Ray> = Vec::new();
    let mut processed = 0usize;

    let constraints = equalities
        .row_vectors()
        .into_iter()
        .map(|r| (r, true))
        .chain(inequalities.row_vectors().into_iter().map(|r| (r, false)));

    for (row, is_equality) in constraints {
        if row.is_zero() {
            for ray in rays.iter_mut() {
                ray.tight.push(true);
            }
            processed += 1;
            continue;
        }
        let pivot = lineality.iter().position(|l| !row.dot(l).is_zero());
        if let Some(p) = pivot {
            let mut l0 = lineality.remove(p);
            let mut s = row.dot(&l0);
            if s.is_positive() {
                l0 = l0.neg();
                s = -s;
            }
            for l in lineality.iter_mut() {
                let a = row.dot(l);
                if !a.is_zero() {
                    *l = l.axpy(&(-(a / &s)), &l0).primitive_line();
                }
            }
            for ray in rays.iter_mut() {
                let a = row.dot(&ray.vector);
                if !a.is_zero() {
                    ray.vector = ray.vector.axpy(&(-(a / &s)), &l0).primitive();
                }
                ray.tight.push(true);
            }
            if !is_equality {
                let mut tight = vec![true; processed];
                tight.push(false);
                rays.push(Ray {
                    vector: l0.primitive(),
                    tight,
                });
            }
        } else {
            let values: Vec<_> = rays.iter().map(|r| row.dot(&r.vector)).collect();
            let mut next: Vec<Ray> = Vec::new();
            for (ray, value) in rays.iter().zip(&values) {
                if value.is_zero() || (!is_equality && value.is_negative()) {
                    let mut tight = ray.tight.clone();
                    tight.push(value.is_zero());
                    next.push(Ray {
                        vector: ray.vector.clone(),
                        tight,
                    });
                }
            }
            for (pi, vp) in values.iter().enumerate().filter(|(_, v)| v.is_positive()) {
                for (ni, vn) in values.iter().enumerate().filter(|(_, v)| v.is_negative()) {
                    if !adjacent(&rays, pi, ni) {
                        continue;
                    }
                    let combined = rays[ni]
                        .vector
                        .scale(vp)
                        .axpy(&(-vn.clone()), &rays[pi].vector)
                        .primitive();
                    let mut tight: Vec<bool> = rays[pi]
                        .tight
                        .iter()
                        .zip(&rays[ni].tight)
                        .map(|(a, b)| *a && *b)
                        .collect();
                    tight.push(true);
                    next.push(Ray {
                        vector: combined,
                        tight,
                    });
                }
            }
            rays = next;
        }
        processed += 1;
    }

    Ok(canonicalize(
        dim,
        rays.into_iter().map(|r| r.vector).collect(),
        lineality,
    ))
}

fn adjacent(rays: &[Ray], a: usize, b: usize) -> bool {
    let common: Vec<usize> = rays[a]
        .tight
        .iter()
        .zip(&rays[b].tight)
        .enumerate()
        .filter(|(_, (x, y))| **x && **y)
        .map(|(k, _)| k)
        .collect();
    !rays
        .iter()
        .enumerate()
        .any(|(i, r)| i != a && i != b && common.iter().all(|&k| r.tight[k]))
}

/// Canonical form of `cone(rays) + span(lineality)` assuming the rays are
/// extreme modulo the lineality space.
pub(crate) fn canonicalize(
    dim: usize,
    rays: Vec<RationalVector>,
    lineality: Vec<RationalVector>,
) -> ConeGenerators {
    let (basis, pivots) = if lineality.is_empty() {
        (Vec::new(), Vec::new())
    } else {
        let m = RationalMatrix::from_rows(dim, lineality).expect("lineality rows match dim");
        let (r, pivots) = m.rref();
        let basis: Vec<RationalVector> = (0..pivots.len()).map(|i| r.row_vector(i)).collect();
        (basis, pivots)
    };
    let mut reduced: Vec<RationalVector> = rays
        .into_iter()
        .map(|mut v| {
            for (b, &p) in basis.iter().zip(&pivots) {
                let coeff = v[p].clone();
                if !coeff.is_zero() {
                    v = v.axpy(&(-coeff), b);
                }
            }
            v.primitive()
        })
        .filter(|v| !v.is_zero())
        .collect();
    reduced.sort();
    reduced.dedup();
    ConeGenerators {
        dim,
        rays: reduced,
        lineality: basis.into_iter().map(|b| b.primitive_line()).collect(),
    }
}

use std::sync::OnceLock;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{ensure_dim, Result};
use crate::kernel::{
    double_description, ConeGenerators, RationalMatrix, RationalVector, DEFAULT_DIMENSION_CAP,
};

use super::Polyhedron;

/// `{v | Bv = 0, Gv ≤ 0}` with lazily computed generators.
///
/// Each inequality row carries a label recording where it came from; for
/// tangent cones this is the index of the polyhedron's inequality row.
#[derive(Debug)]
pub struct PolyhedralCone {
    dim: usize,
    equalities: RationalMatrix,
    inequalities: RationalMatrix,
    labels: Vec<usize>,
    cap: usize,
    generators: OnceLock<ConeGenerators>,
}

impl Clone for PolyhedralCone {
    fn clone(&self) -> Self {
        Self {
            dim: self.dim,
            equalities: self.equalities.clone(),
            inequalities: self.inequalities.clone(),
            labels: self.labels.clone(),
            cap: self.cap,
            generators: self.generators.clone(),
        }
    }
}

impl PolyhedralCone {
    pub fn new(equalities: RationalMatrix, inequalities: RationalMatrix) -> Result<Self> {
        let labels = (0..inequalities.nrows()).collect();
        Self::with_labels(equalities, inequalities, labels)
    }

    pub fn with_labels(
        equalities: RationalMatrix,
        inequalities: RationalMatrix,
        labels: Vec<usize>,
    ) -> Result<Self> {
        let dim = inequalities.ncols();
        ensure_dim("cone equality columns", dim, equalities.ncols())?;
        ensure_dim("cone row labels", inequalities.nrows(), labels.len())?;
        Ok(Self {
            dim,
            equalities,
            inequalities,
            labels,
            cap: DEFAULT_DIMENSION_CAP,
            generators: OnceLock::new(),
        })
    }

    /// Only inequality rows.
    pub fn from_inequalities(inequalities: RationalMatrix) -> Result<Self> {
        let dim = inequalities.ncols();
        Self::new(RationalMatrix::empty(dim), inequalities)
    }

    pub fn whole_space(dim: usize) -> Self {
        Self::new(RationalMatrix::empty(dim), RationalMatrix::empty(dim)).expect("consistent")
    }

    pub fn origin(dim: usize) -> Self {
        Self::new(RationalMatrix::identity(dim), RationalMatrix::empty(dim)).expect("consistent")
    }

    pub fn nonnegative_orthant(dim: usize) -> Self {
        let mut g = RationalMatrix::zeros(0, dim);
        for i in 0..dim {
            g.push_row(&RationalVector::unit(dim, i).neg()).expect("row length");
        }
        Self::from_inequalities(g).expect("consistent")
    }

    /// `cone(rays) + span(lineality)`. The H-representation is obtained by
    /// enumerating the generators of the polar cone.
    pub fn from_generators(
        dim: usize,
        rays: Vec<RationalVector>,
        lineality: Vec<RationalVector>,
    ) -> Result<Self> {
        Self::from_generators_with_cap(dim, rays, lineality, DEFAULT_DIMENSION_CAP)
    }

    pub fn from_generators_with_cap(
        dim: usize,
        rays: Vec<RationalVector>,
        lineality: Vec<RationalVector>,
        cap: usize,
    ) -> Result<Self> {
        let ray_rows = RationalMatrix::from_rows(dim, rays)?;
        let lin_rows = RationalMatrix::from_rows(dim, lineality)?;
        let polar = double_description(dim, &lin_rows, &ray_rows, cap)?;
        let inequalities = RationalMatrix::from_rows(dim, polar.rays)?;
        let equalities = RationalMatrix::from_rows(dim, polar.lineality)?;
        Ok(Self::new(equalities, inequalities)?.with_cap(cap))
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self.generators = OnceLock::new();
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn equalities(&self) -> &RationalMatrix {
        &self.equalities
    }

    pub fn inequalities(&self) -> &RationalMatrix {
        &self.inequalities
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn contains(&self, v: &RationalVector) -> Result<bool> {
        ensure_dim("cone membership", self.dim, v.len())?;
        Ok(self.equalities.mul_vec(v)?.is_zero()
            && self
                .inequalities
                .mul_vec(v)?
                .iter()
                .all(|e| !e.is_positive()))
    }

    /// Whether the whole line through `v` lies in the cone.
    pub fn contains_line(&self, v: &RationalVector) -> Result<bool> {
        ensure_dim("cone membership", self.dim, v.len())?;
        Ok(self.equalities.mul_vec(v)?.is_zero()
            && self.inequalities.mul_vec(v)?.iter().all(Zero::is_zero))
    }

    /// Canonical generators, computed on first use.
    pub fn generators(&self) -> Result<&ConeGenerators> {
        if let Some(g) = self.generators.get() {
            return Ok(g);
        }
        let g = double_description(self.dim, &self.equalities, &self.inequalities, self.cap)?;
        Ok(self.generators.get_or_init(|| g))
    }

    pub fn is_subspace(&self) -> Result<bool> {
        Ok(self.generators()?.is_subspace())
    }

    /// `{x* | ⟨x*, v⟩ ≤ 0 for all v in the cone}`: one inequality per ray,
    /// one equality per lineality vector.
    pub fn polar(&self) -> Result<PolyhedralCone> {
        let g = self.generators()?;
        let inequalities = RationalMatrix::from_rows(self.dim, g.rays.clone())?;
        let equalities = RationalMatrix::from_rows(self.dim, g.lineality.clone())?;
        Ok(PolyhedralCone::new(equalities, inequalities)?.with_cap(self.cap))
    }

    /// Intersection with the hyperplane `⟨normal, v⟩ = 0`.
    pub fn intersect_hyperplane(&self, normal: &RationalVector) -> Result<PolyhedralCone> {
        ensure_dim("hyperplane normal", self.dim, normal.len())?;
        let mut eq = self.equalities.clone();
        if !normal.is_zero() {
            eq.push_row(normal)?;
        }
        Ok(
            PolyhedralCone::with_labels(eq, self.inequalities.clone(), self.labels.clone())?
                .with_cap(self.cap),
        )
    }

    /// The cone as the polyhedron `{v | Bv = 0, Gv ≤ 0}` (zero right-hand
    /// sides), so tangent constructions can be applied to it.
    pub fn as_polyhedron(&self) -> Polyhedron {
        Polyhedron::new(
            self.equalities.clone(),
            RationalVector::zeros(self.equalities.nrows()),
            self.inequalities.clone(),
            RationalVector::zeros(self.inequalities.nrows()),
        )
        .expect("cone rows are consistent")
    }

    pub fn describe(&self) -> Result<ConeDescription> {
        Ok(ConeDescription {
            rows: ConeRows::from(self),
            generators: Some(self.generators()?.clone()),
        })
    }
}

/// Plain H-representation of a cone, used in reports.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConeRows {
    pub equalities: RationalMatrix,
    pub inequalities: RationalMatrix,
    pub labels: Vec<usize>,
}

impl From<&PolyhedralCone> for ConeRows {
    fn from(cone: &PolyhedralCone) -> Self {
        Self {
            equalities: cone.equalities.clone(),
            inequalities: cone.inequalities.clone(),
            labels: cone.labels.clone(),
        }
    }
}

impl ConeRows {
    pub fn to_cone(&self) -> Result<PolyhedralCone> {
        PolyhedralCone::with_labels(
            self.equalities.clone(),
            self.inequalities.clone(),
            self.labels.clone(),
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConeDescription {
    pub rows: ConeRows,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<ConeGenerators>,
}

/// Result of [`cone_equal`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "outcome")]
pub enum ConeEquality {
    Equal,
    /// `witness` lies in one cone but not the other; `in_first` says which
    /// cone contains it.
    Differ {
        witness: RationalVector,
        in_first: bool,
    },
}

impl ConeEquality {
    pub fn is_equal(&self) -> bool {
        matches!(self, ConeEquality::Equal)
    }
}

/// Mutual inclusion test: every generator of each cone is checked against the
/// H-representation of the other. Lineality vectors are checked in both
/// orientations.
pub fn cone_equal(first: &PolyhedralCone, second: &PolyhedralCone) -> Result<ConeEquality> {
    ensure_dim("cone comparison", first.dim(), second.dim())?;
    if let Some(witness) = first_escapee(first, second)? {
        return Ok(ConeEquality::Differ {
            witness,
            in_first: true,
        });
    }
    if let Some(witness) = first_escapee(second, first)? {
        return Ok(ConeEquality::Differ {
            witness,
            in_first: false,
        });
    }
    Ok(ConeEquality::Equal)
}

/// First generator of `inner` that is not contained in `outer`.
pub fn first_escapee(
    inner: &PolyhedralCone,
    outer: &PolyhedralCone,
) -> Result<Option<RationalVector>> {
    let g = inner.generators()?;
    for l in &g.lineality {
        if !outer.contains(l)? {
            return Ok(Some(l.clone()));
        }
        let neg = l.neg();
        if !outer.contains(&neg)? {
            return Ok(Some(neg));
        }
    }
    for r in &g.rays {
        if !outer.contains(r)? {
            return Ok(Some(r.clone()));
        }
    }
    Ok(None)
}

/// `inner ⊆ outer`
pub fn cone_included(inner: &PolyhedralCone, outer: &PolyhedralCone) -> Result<bool> {
    ensure_dim("cone inclusion", inner.dim(), outer.dim())?;
    Ok(first_escapee(inner, outer)?.is_none())
}

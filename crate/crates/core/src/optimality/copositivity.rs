//! Copositivity of a symmetric form on a polyhedral cone.
//!
//! The cone is first tested for a positive semidefinite restriction to its
//! linear span (exact symmetric elimination), which settles every subspace
//! and every convex case. Otherwise, with generators `g₁..g_k` (lineality in
//! both signs), copositivity on the cone is copositivity of `Q = GᵀMG` on the
//! orthant, decided by simplicial partition of the standard simplex:
//!
//! * a cell whose vertices satisfy `uᵢᵀQuⱼ ≥ 0` for all pairs is certified;
//! * a vertex with `uᵀQu < 0` is a witness;
//! * otherwise the longest edge is bisected, up to the depth limit.
//!
//! Cells left open at the depth limit make the result inconclusive unless a
//! seeded random search over the orthant finds a negative direction.

use nalgebra::DMatrix;
use num_traits::{Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{
    ConditionId, ConditionReport, Certificate, Evidence, Matrix, Scalar, Vector, Verdict, Witness,
    WitnessKind,
};
use crate::error::{ensure_dim, Error, Result};
use crate::geometry::{ConeRows, PolyhedralCone};
use crate::kernel::{self, Rational, RationalMatrix, RationalVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CopositivityConfig {
    pub depth_limit: usize,
    pub samples: usize,
    pub seed: u64,
}

impl Default for CopositivityConfig {
    fn default() -> Self {
        Self {
            depth_limit: 12,
            samples: 100_000,
            seed: 0x5eed_c0de,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CopositivityStatus {
    Copositive,
    NotCopositive,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CopositivityMethod {
    /// The cone is `{0}`.
    Trivial,
    /// Decided by the restriction of the form to the cone's linear span.
    Span,
    Simplicial,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CopositivityTrace {
    pub method: CopositivityMethod,
    pub generators: usize,
    pub depth_reached: usize,
    pub cells_certified: usize,
    pub cells_open: usize,
    pub samples: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CopositivityResult {
    pub status: CopositivityStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<RationalVector>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "crate::kernel::serde_rational::option")]
    pub value: Option<Rational>,
    pub trace: CopositivityTrace,
}

enum SpanOutcome {
    Psd,
    Negative(RationalVector),
}

/// Pivoted symmetric elimination on `span(basis)`: either the form is
/// positive semidefinite there, or a vector of the span with `vᵀMv < 0`.
fn span_psd(m: &RationalMatrix, basis: Vec<RationalVector>) -> Result<SpanOutcome> {
    let mut basis = basis;
    loop {
        if basis.is_empty() {
            return Ok(SpanOutcome::Psd);
        }
        let images: Vec<RationalVector> = basis
            .iter()
            .map(|b| m.mul_vec(b))
            .collect::<Result<_>>()?;
        let diag: Vec<Rational> = basis.iter().zip(&images).map(|(b, mb)| b.dot(mb)).collect();
        if let Some(i) = diag.iter().position(|d| d.is_negative()) {
            return Ok(SpanOutcome::Negative(basis[i].clone()));
        }
        let Some(p) = diag.iter().position(|d| d.is_positive()) else {
            // Zero diagonal: any nonzero off-diagonal entry gives a negative
            // combination, otherwise the form vanishes on the span.
            for i in 0..basis.len() {
                for j in (i + 1)..basis.len() {
                    let q = basis[i].dot(&images[j]);
                    if !q.is_zero() {
                        let sign = if q.is_positive() { kernel::int(-1) } else { kernel::int(1) };
                        return Ok(SpanOutcome::Negative(basis[i].axpy(&sign, &basis[j])));
                    }
                }
            }
            return Ok(SpanOutcome::Psd);
        };
        let pivot = basis[p].clone();
        let pivot_image = images[p].clone();
        let pivot_value = diag[p].clone();
        basis = basis
            .into_iter()
            .enumerate()
            .filter(|(j, _)| *j != p)
            .map(|(_, b)| {
                let factor = -(b.dot(&pivot_image) / &pivot_value);
                b.axpy(&factor, &pivot)
            })
            .collect();
    }
}

struct Cell {
    vertices: Vec<RationalVector>,
    depth: usize,
}

fn squared_distance(a: &RationalVector, b: &RationalVector) -> Rational {
    let d = a.sub(b);
    d.dot(&d)
}

/// Decides copositivity of symmetric `m` on `k`.
pub fn copositivity(
    m: &RationalMatrix,
    k: &PolyhedralCone,
    config: &CopositivityConfig,
) -> Result<CopositivityResult> {
    ensure_dim("form size", k.dim(), m.nrows())?;
    if let Some((row, col)) = m.asymmetry() {
        return Err(Error::NotSymmetric { row, col });
    }
    let gens = k.generators()?;
    let directions = gens.all_directions();
    let mut trace = CopositivityTrace {
        method: CopositivityMethod::Trivial,
        generators: directions.len(),
        depth_reached: 0,
        cells_certified: 0,
        cells_open: 0,
        samples: 0,
    };
    if directions.is_empty() {
        return Ok(result(CopositivityStatus::Copositive, None, m, trace));
    }

    trace.method = CopositivityMethod::Span;
    let span = RationalMatrix::from_rows(k.dim(), directions.clone())?.row_space_basis();
    match span_psd(m, span)? {
        SpanOutcome::Psd => return Ok(result(CopositivityStatus::Copositive, None, m, trace)),
        SpanOutcome::Negative(v) if gens.is_subspace() => {
            return Ok(result(CopositivityStatus::NotCopositive, Some(v), m, trace));
        }
        SpanOutcome::Negative(_) => {}
    }

    trace.method = CopositivityMethod::Simplicial;
    let kdim = directions.len();
    let images: Vec<RationalVector> = directions
        .iter()
        .map(|g| m.mul_vec(g))
        .collect::<Result<_>>()?;
    let q: Vec<Vec<Rational>> = directions
        .iter()
        .map(|gi| images.iter().map(|mgj| gi.dot(mgj)).collect())
        .collect();
    let q_matrix = RationalMatrix::new(kdim, kdim, q.into_iter().flatten().collect())?;
    let lift = |c: &RationalVector| -> RationalVector {
        let mut v = RationalVector::zeros(k.dim());
        for (ci, g) in c.iter().zip(&directions) {
            if !ci.is_zero() {
                v = v.axpy(ci, g);
            }
        }
        v
    };

    let mut stack = vec![Cell {
        vertices: (0..kdim).map(|i| RationalVector::unit(kdim, i)).collect(),
        depth: 0,
    }];
    while let Some(cell) = stack.pop() {
        trace.depth_reached = trace.depth_reached.max(cell.depth);
        let qu: Vec<RationalVector> = cell
            .vertices
            .iter()
            .map(|u| q_matrix.mul_vec(u))
            .collect::<Result<_>>()?;
        let mut certified = true;
        for (i, u) in cell.vertices.iter().enumerate() {
            let value = u.dot(&qu[i]);
            if value.is_negative() {
                let v = lift(u).primitive();
                return Ok(result(CopositivityStatus::NotCopositive, Some(v), m, trace));
            }
            for w in &qu[(i + 1)..] {
                if u.dot(w).is_negative() {
                    certified = false;
                }
            }
        }
        if certified {
            trace.cells_certified += 1;
            continue;
        }
        if cell.depth >= config.depth_limit {
            trace.cells_open += 1;
            continue;
        }
        let mut best = (0, 1, Rational::zero());
        for i in 0..kdim {
            for j in (i + 1)..kdim {
                let d = squared_distance(&cell.vertices[i], &cell.vertices[j]);
                if d > best.2 {
                    best = (i, j, d);
                }
            }
        }
        let (i, j, _) = best;
        let half = kernel::ratio(1, 2);
        let mid = cell.vertices[i].add(&cell.vertices[j]).scale(&half);
        let mut left = cell.vertices.clone();
        left[i] = mid.clone();
        let mut right = cell.vertices;
        right[j] = mid;
        // Pushed in reverse so the left child is explored first.
        stack.push(Cell {
            vertices: right,
            depth: cell.depth + 1,
        });
        stack.push(Cell {
            vertices: left,
            depth: cell.depth + 1,
        });
    }
    if trace.cells_open == 0 {
        return Ok(result(CopositivityStatus::Copositive, None, m, trace));
    }

    let q_float = q_matrix.to_f64();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    for _ in 0..config.samples {
        trace.samples += 1;
        let c: Vec<f64> = (0..kdim)
            .map(|_| {
                let x: f64 = StandardNormal.sample(&mut rng);
                x.abs()
            })
            .collect();
        let cv = nalgebra::DVector::from_column_slice(&c);
        if (&q_float * &cv).dot(&cv) < 0.0 {
            let exact = RationalVector::from_f64(&c)?;
            if q_matrix.quadratic_form(&exact)?.is_negative() {
                let v = lift(&exact).primitive();
                return Ok(result(CopositivityStatus::NotCopositive, Some(v), m, trace));
            }
        }
    }
    Ok(result(CopositivityStatus::Inconclusive, None, m, trace))
}

fn result(
    status: CopositivityStatus,
    witness: Option<RationalVector>,
    m: &RationalMatrix,
    trace: CopositivityTrace,
) -> CopositivityResult {
    let value = witness
        .as_ref()
        .map(|v| m.quadratic_form(v).expect("witness has the form's dimension"));
    CopositivityResult {
        status,
        witness,
        value,
        trace,
    }
}

fn report_from(
    result: CopositivityResult,
    matrix: Matrix,
    k: &PolyhedralCone,
    value: Option<Scalar>,
) -> ConditionReport {
    let verdict = match result.status {
        CopositivityStatus::Copositive => Verdict::Holds,
        CopositivityStatus::NotCopositive => Verdict::Fails,
        CopositivityStatus::Inconclusive => Verdict::Inconclusive,
    };
    let evidence = Evidence::ConeQuadratic {
        matrix,
        cone: ConeRows::from(k),
    };
    let mut report = ConditionReport::new(ConditionId::CriticalCopositivity, verdict, evidence);
    if let (Some(v), Some(value)) = (result.witness, value) {
        report.witness = Some(Witness {
            kind: WitnessKind::Ray,
            vector: Vector::Exact(v),
            value,
        });
    }
    if verdict == Verdict::Inconclusive {
        report.notes.push(format!(
            "{} cells left open at depth {}; {} random directions found no violation",
            result.trace.cells_open, result.trace.depth_reached, result.trace.samples
        ));
    }
    report.certificate = Some(Certificate::Copositivity(result.trace));
    report
}

/// `⟨Mv, v⟩ ≥ 0` on the whole cone `k`, exactly.
pub fn check_c2_copositivity(
    m: &RationalMatrix,
    k: &PolyhedralCone,
    config: &CopositivityConfig,
) -> Result<ConditionReport> {
    let result = copositivity(m, k, config)?;
    let value = result.value.clone().map(Scalar::Exact);
    Ok(report_from(result, Matrix::Exact(m.clone()), k, value))
}

/// Float-regime variant. On a subspace the smallest eigenvalue of the
/// restricted form is compared with `-eigen_threshold`; otherwise the
/// binary64 entries are converted exactly and the exact test is used.
pub fn check_c2_copositivity_float(
    m: &DMatrix<f64>,
    k: &PolyhedralCone,
    config: &CopositivityConfig,
    eigen_threshold: f64,
) -> Result<ConditionReport> {
    ensure_dim("form size", k.dim(), m.nrows())?;
    let gens = k.generators()?;
    if !gens.is_subspace() || gens.lineality.is_empty() {
        let exact = RationalMatrix::from_f64(m)?;
        let result = copositivity(&exact, k, config)?;
        let value = result.witness.as_ref().map(|v| {
            let vf = nalgebra::DVector::from_column_slice(&v.to_f64());
            Scalar::Float((m * &vf).dot(&vf))
        });
        let mut report = report_from(result, Matrix::float(m), k, value);
        report.tolerance = Some(eigen_threshold);
        return Ok(report);
    }

    let basis = RationalMatrix::from_rows(k.dim(), gens.lineality.clone())?
        .transpose()
        .to_f64();
    let qr = basis.clone().qr();
    let q = qr.q();
    let restricted = q.transpose() * m * &q;
    let eigen = restricted.symmetric_eigen();
    let (index, lambda) = eigen
        .eigenvalues
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, l)| if l < acc.1 { (i, l) } else { acc });
    let trace = CopositivityTrace {
        method: CopositivityMethod::Span,
        generators: 2 * gens.lineality.len(),
        depth_reached: 0,
        cells_certified: 0,
        cells_open: 0,
        samples: 0,
    };
    let mut result = CopositivityResult {
        status: CopositivityStatus::Copositive,
        witness: None,
        value: None,
        trace,
    };
    let mut value = None;
    if lambda < -eigen_threshold {
        // Express the eigenvector in the exact lineality basis so the witness
        // lies in the cone exactly.
        let direction = &q * eigen.eigenvectors.column(index);
        let coefficients = basis
            .clone()
            .svd(true, true)
            .solve(&direction, 1e-14)
            .map_err(|e| Error::Internal(e.to_string()))?;
        let mut v = RationalVector::zeros(k.dim());
        for (c, l) in coefficients.iter().zip(&gens.lineality) {
            v = v.axpy(&kernel::from_f64(*c)?, l);
        }
        let vf = nalgebra::DVector::from_column_slice(&v.to_f64());
        value = Some(Scalar::Float((m * &vf).dot(&vf)));
        result.status = CopositivityStatus::NotCopositive;
        result.witness = Some(v);
    }
    let mut report = report_from(result, Matrix::float(m), k, value);
    report.margin = Some(Scalar::Float(lambda));
    report.tolerance = Some(eigen_threshold);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::int;

    fn sym(rows: &[&[i64]]) -> RationalMatrix {
        RationalMatrix::from_int_rows(rows.len(), rows).unwrap()
    }

    fn line_v1_zero() -> PolyhedralCone {
        PolyhedralCone::new(
            RationalMatrix::from_int_rows(2, &[&[1, 0]]).unwrap(),
            RationalMatrix::empty(2),
        )
        .unwrap()
    }

    #[test]
    fn unit_set() {
        let orthant = PolyhedralCone::nonnegative_orthant(2);
        let cfg = CopositivityConfig::default();
        let r = copositivity(&sym(&[&[1, 0], &[0, 1]]), &orthant, &cfg).unwrap();
        assert_eq!(r.status, CopositivityStatus::Copositive);

        let r = copositivity(&sym(&[&[0, 1], &[1, 0]]), &orthant, &cfg).unwrap();
        assert_eq!(r.status, CopositivityStatus::Copositive);
        assert_eq!(r.trace.method, CopositivityMethod::Simplicial);

        let m = sym(&[&[1, 0], &[0, -1]]);
        let r = copositivity(&m, &orthant, &cfg).unwrap();
        assert_eq!(r.status, CopositivityStatus::NotCopositive);
        let w = r.witness.unwrap();
        assert!(orthant.contains(&w).unwrap());
        assert!(m.quadratic_form(&w).unwrap().is_negative());

        let m = sym(&[&[-4, 0], &[0, -2]]);
        let r = copositivity(&m, &line_v1_zero(), &cfg).unwrap();
        assert_eq!(r.status, CopositivityStatus::NotCopositive);
        let w = r.witness.unwrap();
        assert!(w == RationalVector::from_ints(&[0, 1]) || w == RationalVector::from_ints(&[0, -1]));
        assert_eq!(r.value, Some(int(-2)));
    }

    #[test]
    fn bisection_finds_interior_witness() {
        // x² − xy is nonnegative at both corners but negative at (1, 2).
        let m = RationalMatrix::new(
            2,
            2,
            vec![int(1), kernel::ratio(-1, 2), kernel::ratio(-1, 2), int(0)],
        )
        .unwrap();
        let orthant = PolyhedralCone::nonnegative_orthant(2);
        let r = copositivity(&m, &orthant, &CopositivityConfig::default()).unwrap();
        assert_eq!(r.status, CopositivityStatus::NotCopositive);
        assert!(r.trace.depth_reached >= 2);
        assert!(m.quadratic_form(r.witness.as_ref().unwrap()).unwrap().is_negative());
    }

    #[test]
    fn bisection_certifies_indefinite_copositive_form() {
        // PSD part (x₁ − x₂)² plus a nonnegative part; indefinite overall.
        let m = sym(&[&[1, -1, 1], &[-1, 1, 1], &[1, 1, 0]]);
        let orthant = PolyhedralCone::nonnegative_orthant(3);
        let r = copositivity(&m, &orthant, &CopositivityConfig::default()).unwrap();
        assert_eq!(r.status, CopositivityStatus::Copositive);
        assert_eq!(r.trace.method, CopositivityMethod::Simplicial);
        assert!(r.trace.depth_reached >= 1);
    }

    #[test]
    fn span_test_settles_definite_forms() {
        let m = RationalMatrix::new(
            2,
            2,
            vec![int(1), kernel::ratio(-1, 2), kernel::ratio(-1, 2), int(1)],
        )
        .unwrap();
        let orthant = PolyhedralCone::nonnegative_orthant(2);
        let r = copositivity(&m, &orthant, &CopositivityConfig::default()).unwrap();
        assert_eq!(r.status, CopositivityStatus::Copositive);
        assert_eq!(r.trace.method, CopositivityMethod::Span);
    }

    #[test]
    fn half_plane_with_lineality() {
        let k = PolyhedralCone::from_inequalities(RationalMatrix::from_int_rows(2, &[&[0, -1]]).unwrap())
            .unwrap();
        let m = sym(&[&[0, 1], &[1, 0]]);
        let r = copositivity(&m, &k, &CopositivityConfig::default()).unwrap();
        assert_eq!(r.status, CopositivityStatus::NotCopositive);
        let w = r.witness.unwrap();
        assert!(k.contains(&w).unwrap() && m.quadratic_form(&w).unwrap().is_negative());
    }

    #[test]
    fn reports_recheck() {
        let orthant = PolyhedralCone::nonnegative_orthant(2);
        let cfg = CopositivityConfig::default();
        let r = check_c2_copositivity(&sym(&[&[1, 0], &[0, -1]]), &orthant, &cfg).unwrap();
        assert!(r.fails() && r.recheck().unwrap());
        let m = DMatrix::from_row_slice(2, 2, &[-4.0, 0.0, 0.0, -2.0]);
        let r = check_c2_copositivity_float(&m, &line_v1_zero(), &cfg, 1e-10).unwrap();
        assert!(r.fails() && r.recheck().unwrap());
        assert!((r.margin.unwrap().to_f64() + 2.0).abs() < 1e-12);
    }
}

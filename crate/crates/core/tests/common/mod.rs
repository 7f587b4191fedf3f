#![allow(dead_code)]

use cone_audit_core::geometry::{PolyhedralCone, Polyhedron};
use cone_audit_core::kernel::{int, ratio, RationalMatrix, RationalVector};
use proptest::prelude::*;

pub fn ints(n: usize, range: i64) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-range..=range, n)
}

pub fn vector(n: usize, range: i64) -> impl Strategy<Value = RationalVector> {
    ints(n, range).prop_map(|v| RationalVector::from_ints(&v))
}

pub fn matrix(rows: Vec<Vec<i64>>, cols: usize) -> RationalMatrix {
    RationalMatrix::from_rows(cols, rows.iter().map(|r| RationalVector::from_ints(r)).collect())
        .unwrap()
}

/// A feasible point together with a polyhedron built around it: every
/// inequality row is either tight at the point or has a positive slack.
#[derive(Clone, Debug)]
pub struct Instance {
    pub d: Polyhedron,
    pub x: RationalVector,
}

pub fn instance(max_dim: usize) -> impl Strategy<Value = Instance> {
    (1..=max_dim).prop_flat_map(|n| {
        let rows = prop::collection::vec((ints(n, 3), prop::option::weighted(0.5, (1i64..=4, 1i64..=3))), 0..=8);
        let eqs = prop::collection::vec(ints(n, 2), 0..=2.min(n - 1));
        (ints(n, 2), rows, eqs).prop_map(move |(x, rows, eqs)| {
            let x = RationalVector::from_ints(&x);
            let bounds = rows
                .iter()
                .map(|(r, slack)| {
                    let s = slack.map_or(int(0), |(p, q)| ratio(p, q));
                    RationalVector::from_ints(r).dot(&x) + s
                })
                .collect();
            let rhs = eqs.iter().map(|r| RationalVector::from_ints(r).dot(&x)).collect();
            let d = Polyhedron::new(
                matrix(eqs, n),
                RationalVector::new(rhs),
                matrix(rows.into_iter().map(|(r, _)| r).collect(), n),
                RationalVector::new(bounds),
            )
            .unwrap();
            Instance { d, x }
        })
    })
}

pub fn cone(max_dim: usize) -> impl Strategy<Value = PolyhedralCone> {
    (1..=max_dim).prop_flat_map(|n| {
        (
            prop::collection::vec(ints(n, 2), 0..=1.min(n - 1)),
            prop::collection::vec(ints(n, 3), 0..=8),
        )
            .prop_map(move |(eqs, rows)| PolyhedralCone::new(matrix(eqs, n), matrix(rows, n)).unwrap())
    })
}

/// Nonnegative integer combination of the cone's generators.
pub fn combine(cone: &PolyhedralCone, weights: &[i64]) -> RationalVector {
    let n = cone.dim();
    cone.generators()
        .unwrap()
        .all_directions()
        .iter()
        .zip(weights.iter().cycle())
        .fold(RationalVector::zeros(n), |acc, (g, w)| acc.axpy(&int(w.abs()), g))
}

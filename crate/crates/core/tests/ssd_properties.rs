use std::sync::Arc;

use cone_audit_core::objectives::fixtures::{self, PiecewiseMonomialGradient};
use cone_audit_core::objectives::SmoothObjective;
use cone_audit_core::ssd::{
    estimate_calmness, membership_quotient, ssd_interval_1d_example_family, ssd_membership,
    MeshSpec, SsdQuery,
};
use proptest::prelude::*;

const Z_GRID: [f64; 6] = [-2.0, -1.5, -1.0, -0.5, 0.0, 0.5];
const V_GRID: [f64; 3] = [0.0, 1.0, 2.0];

fn kink_query(v: f64, z: f64) -> SsdQuery {
    SsdQuery {
        objective: fixtures::ex41().objective,
        point: vec![0.0],
        direction: vec![v],
        candidate: vec![z],
    }
}

fn quadratic_1d(m: f64, q: f64) -> SmoothObjective {
    SmoothObjective::new(
        "quadratic",
        1,
        Arc::new(move |x: &[f64]| 0.5 * m * x[0] * x[0] + q * x[0]),
        Arc::new(move |x: &[f64]| vec![m * x[0] + q]),
    )
}

#[test]
fn mesh_oracle_matches_closed_form_on_grid() {
    let mesh = MeshSpec::default();
    for v in V_GRID {
        let interval = ssd_interval_1d_example_family(&PiecewiseMonomialGradient::EX41, 0.0, v).unwrap();
        for z in Z_GRID {
            let member = ssd_membership(&kink_query(v, z), &mesh).unwrap().is_member();
            assert_eq!(member, interval.contains(z, 0.0), "z = {z}, v = {v}");
        }
    }
}

#[test]
fn membership_is_scale_invariant_on_grid() {
    let mesh = MeshSpec::default();
    for v in V_GRID {
        for z in Z_GRID {
            let one = ssd_membership(&kink_query(v, z), &mesh).unwrap().verdict;
            let two = ssd_membership(&kink_query(2.0 * v, 2.0 * z), &mesh).unwrap().verdict;
            assert_eq!(one, two, "z = {z}, v = {v}");
        }
    }
}

proptest! {
    #[test]
    fn quotient_is_scale_invariant(z in -3.0f64..3.0, v in -3.0f64..3.0, x in -0.1f64..0.1, t in 0.1f64..10.0) {
        prop_assume!(x != 0.0);
        let a = membership_quotient(&kink_query(v, z), &[x]).unwrap().unwrap();
        let b = membership_quotient(&kink_query(t * v, t * z), &[x]).unwrap().unwrap();
        prop_assert!((a * t - b).abs() <= 1e-9 * b.abs().max(1.0));
    }

    #[test]
    fn smooth_membership_is_the_hessian_action(
        m in -3i32..=3,
        q in -2i32..=2,
        v in -2i32..=2,
        xbar in -4i32..=4,
        sign in prop::bool::ANY,
    ) {
        let (m, v) = (f64::from(m), f64::from(v));
        let f = quadratic_1d(m, f64::from(q));
        let point = vec![f64::from(xbar) / 4.0];
        let mesh = MeshSpec::default();
        let query = |z: f64| SsdQuery { objective: f.clone(), point: point.clone(), direction: vec![v], candidate: vec![z] };
        prop_assert!(ssd_membership(&query(m * v), &mesh).unwrap().is_member());
        let shift = if sign { 0.5 } else { -0.5 };
        prop_assert!(!ssd_membership(&query(m * v + shift), &mesh).unwrap().is_member());
    }

    #[test]
    fn calmness_grows_with_samples(x in -1.0f64..1.0, y in -1.0f64..1.0, r in 0.05f64..2.0, a in 1usize..50, b in 1usize..50) {
        let f = fixtures::ex31().objective;
        let (small, large) = (a.min(b), a.max(b));
        let lo = estimate_calmness(&f, &[x, y], r, small).unwrap();
        let hi = estimate_calmness(&f, &[x, y], r, large).unwrap();
        prop_assert!(lo.ell <= hi.ell);
    }
}

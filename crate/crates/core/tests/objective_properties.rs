use cone_audit_core::kernel::{int, RationalMatrix, RationalVector};
use cone_audit_core::objectives::fixtures::{self, FixtureConstraint};
use cone_audit_core::objectives::{QuadraticObjective, SmoothObjective};
use proptest::prelude::*;

fn symmetric(n: usize) -> impl Strategy<Value = RationalMatrix> {
    prop::collection::vec(-4i64..=4, n * n).prop_map(move |e| {
        let mut entries = vec![int(0); n * n];
        for i in 0..n {
            for j in 0..n {
                let (a, b) = (i.min(j), i.max(j));
                entries[i * n + j] = int(e[a * n + b]);
            }
        }
        RationalMatrix::new(n, n, entries).unwrap()
    })
}

fn quadratic() -> impl Strategy<Value = QuadraticObjective> {
    (1usize..=4).prop_flat_map(|n| {
        (symmetric(n), prop::collection::vec(-4i64..=4, n), -4i64..=4).prop_map(|(m, q, a)| {
            QuadraticObjective::new(m, RationalVector::from_ints(&q), int(a)).unwrap()
        })
    })
}

/// Central differences of the gradient against the Hessian columns.
fn hessian_matches_differences(
    gradient: impl Fn(&[f64]) -> Vec<f64>,
    hessian: nalgebra::DMatrix<f64>,
    x: &[f64],
) -> bool {
    let n = x.len();
    let h = 1e-6;
    (0..n).all(|j| {
        let mut plus = x.to_vec();
        let mut minus = x.to_vec();
        plus[j] += h;
        minus[j] -= h;
        let (gp, gm) = (gradient(&plus), gradient(&minus));
        (0..n).all(|i| {
            let fd = (gp[i] - gm[i]) / (2.0 * h);
            (fd - hessian[(i, j)]).abs() <= 1e-5 * hessian[(i, j)].abs().max(1.0)
        })
    })
}

fn smooth_ok(f: &SmoothObjective, x: &[f64]) -> bool {
    hessian_matches_differences(|p| f.gradient(p).unwrap(), f.hessian(x).unwrap(), x)
}

proptest! {
    #[test]
    fn quadratic_wrapper_agrees(q in quadratic(), pt in prop::collection::vec(-8i64..=8, 4)) {
        let n = q.dim();
        let x = RationalVector::from_ints(&pt[..n]);
        let exact = q.gradient(&x).unwrap().to_f64();
        let smooth = q.to_smooth("q");
        let float = smooth.gradient(&x.to_f64()).unwrap();
        for (a, b) in exact.iter().zip(&float) {
            prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        }
        let value = cone_audit_core::kernel::to_f64(&q.value(&x).unwrap());
        prop_assert!((smooth.value(&x.to_f64()).unwrap() - value).abs() <= 1e-12 * value.abs().max(1.0));
    }

    #[test]
    fn quadratic_hessian_matches_differences(q in quadratic(), pt in prop::collection::vec(-2.0f64..=2.0, 4)) {
        let f = q.to_smooth("q");
        prop_assert!(smooth_ok(&f, &pt[..q.dim()]));
    }

    #[test]
    fn fixture_hessians_match_differences(x in -2.0f64..=2.0, y in -2.0f64..=2.0) {
        for name in ["ex31", "ex32"] {
            let fx = fixtures::fixture(name).unwrap();
            prop_assert!(smooth_ok(&fx.objective, &[x, y]));
            let FixtureConstraint::Smooth(c) = &fx.constraint else { unreachable!() };
            prop_assert!(hessian_matches_differences(|p| c.gradient(p).unwrap(), c.hessian(&[x, y]).unwrap(), &[x, y]));
        }
    }
}

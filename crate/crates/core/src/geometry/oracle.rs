//! Step-feasibility oracles.
//!
//! These decide tangency straight from the definitions: `v` is tangent at
//! `x̄` iff `x̄ + tv ∈ D` for all small `t > 0`, and `w` is second-order
//! tangent iff `x̄ + tv + ½t²w ∈ D` for all small `t > 0`. For a polyhedron a
//! single explicit step `t*` decides both, so the oracles only ever call
//! [`Polyhedron::contains`] and never look at active sets or cone formulas.

use num_traits::{One, Signed, Zero};

use super::Polyhedron;
use crate::error::{ensure_dim, Error, Result};
use crate::kernel::{int, Rational, RationalVector};

fn max_one(x: Rational) -> Rational {
    if x > Rational::one() {
        x
    } else {
        Rational::one()
    }
}

/// Step length below which the sign of every row along `x̄ + tv + ½t²w` is
/// settled. Inactive rows take `sᵢ / max(1, |aᵢ| + |bᵢ|/2)` with slack `sᵢ`,
/// `aᵢ = ⟨xᵢ*, v⟩` and `bᵢ = ⟨xᵢ*, w⟩`; tight rows with `aᵢ < 0` take
/// `|aᵢ| / max(1, |bᵢ|)`. The minimum (capped at 1) is halved.
pub(crate) fn step_threshold(
    slacks: &[Rational],
    first: &RationalVector,
    second: Option<&RationalVector>,
) -> Rational {
    let half = Rational::new(1.into(), 2.into());
    let mut t = Rational::one();
    for (i, s) in slacks.iter().enumerate() {
        let a = first[i].abs();
        let b = second.map(|w| w[i].abs()).unwrap_or_else(Rational::zero);
        let bound = if s.is_positive() {
            s / max_one(&a + &b * &half)
        } else if first[i].is_negative() {
            &a / max_one(b)
        } else {
            continue;
        };
        if bound < t {
            t = bound;
        }
    }
    t * half
}

/// Decides `v ∈ T_D(x̄)` by testing `x̄ + t*v ∈ D`.
pub fn tangent_step_oracle(d: &Polyhedron, x: &RationalVector, v: &RationalVector) -> Result<bool> {
    d.require_member(x)?;
    ensure_dim("direction", d.dim(), v.len())?;
    let slacks = d.slacks(x)?;
    let a = d.row_values(v)?;
    let t = step_threshold(&slacks, &a, None);
    d.contains(&x.axpy(&t, v))
}

/// Decides `w ∈ T²_D(x̄, v)` by testing `x̄ + t*v + ½t*²w ∈ D`.
pub fn second_order_step_oracle(
    d: &Polyhedron,
    x: &RationalVector,
    v: &RationalVector,
    w: &RationalVector,
) -> Result<bool> {
    if !tangent_step_oracle(d, x, v)? {
        return Err(Error::NotTangent {
            violated_rows: Vec::new(),
        });
    }
    ensure_dim("second-order direction", d.dim(), w.len())?;
    let slacks = d.slacks(x)?;
    let a = d.row_values(v)?;
    let b = d.row_values(w)?;
    let t = step_threshold(&slacks, &a, Some(&b));
    let half_t2 = &t * &t / int(2);
    d.contains(&x.axpy(&t, v).axpy(&half_t2, w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::RationalMatrix;

    fn v(e: &[i64]) -> RationalVector {
        RationalVector::from_ints(e)
    }

    fn segment_line() -> Polyhedron {
        Polyhedron::new(
            RationalMatrix::from_int_rows(2, &[&[1, 1]]).unwrap(),
            v(&[1]),
            RationalMatrix::from_int_rows(2, &[&[-1, 0]]).unwrap(),
            v(&[0]),
        )
        .unwrap()
    }

    #[test]
    fn first_order_steps() {
        let orthant = Polyhedron::nonnegative_orthant(2);
        assert!(tangent_step_oracle(&orthant, &v(&[0, 0]), &v(&[0, 1])).unwrap());
        assert!(!tangent_step_oracle(&orthant, &v(&[0, 0]), &v(&[-1, 0])).unwrap());
        assert!(tangent_step_oracle(&segment_line(), &v(&[0, 1]), &v(&[1, -1])).unwrap());
        assert!(!tangent_step_oracle(&segment_line(), &v(&[0, 1]), &v(&[1, 0])).unwrap());
    }

    #[test]
    fn large_steps_from_interior_points_are_limited() {
        // Point far from the boundary, direction that would overshoot at t = 1.
        let orthant = Polyhedron::nonnegative_orthant(1);
        assert!(tangent_step_oracle(&orthant, &v(&[1]), &v(&[-100])).unwrap());
    }

    #[test]
    fn second_order_steps() {
        let orthant = Polyhedron::nonnegative_orthant(2);
        let origin = v(&[0, 0]);
        assert!(second_order_step_oracle(&orthant, &origin, &v(&[1, 0]), &v(&[-5, 1])).unwrap());
        assert!(!second_order_step_oracle(&orthant, &origin, &v(&[1, 0]), &v(&[0, -1])).unwrap());
        assert!(second_order_step_oracle(&orthant, &origin, &v(&[0, 0]), &v(&[1, 1])).unwrap());
        assert!(matches!(
            second_order_step_oracle(&orthant, &origin, &v(&[-1, 0]), &v(&[0, 0])),
            Err(Error::NotTangent { .. })
        ));
    }

    #[test]
    fn quadratic_term_cannot_overturn_strict_first_order_decrease() {
        // Tight row with ⟨x*, v⟩ < 0 and a large positive ⟨x*, w⟩.
        let orthant = Polyhedron::nonnegative_orthant(1);
        assert!(second_order_step_oracle(&orthant, &v(&[0]), &v(&[1]), &v(&[-1000])).unwrap());
        // Inactive row with a large slack and a large curvature term.
        assert!(second_order_step_oracle(&orthant, &v(&[100]), &v(&[-1]), &v(&[-1000])).unwrap());
    }
}

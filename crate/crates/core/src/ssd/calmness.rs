use serde::{Deserialize, Serialize};

use crate::error::{ensure_dim, Error, Result};
use crate::objectives::SmoothObjective;

const PRIMES: [u64; 10] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29];

/// Lower estimate of the calmness modulus `ℓ` in
/// `‖∇f(x) − ∇f(x̄)‖ ≤ ℓ‖x − x̄‖` on a ball.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalmnessEstimate {
    pub ell: f64,
    pub radius: f64,
    pub samples: usize,
    pub attaining_sample: Vec<f64>,
}

fn radical_inverse(mut index: u64, base: u64) -> f64 {
    let mut inverse = 0.0;
    let mut scale = 1.0 / base as f64;
    while index > 0 {
        inverse += (index % base) as f64 * scale;
        index /= base;
        scale /= base as f64;
    }
    inverse
}

/// Halton points mapped to the unit ball by rejection, skipping the centre.
/// Prefixes of the sequence are nested, so more samples never lower the
/// estimate.
fn ball_points(dim: usize) -> impl Iterator<Item = Vec<f64>> {
    (1u64..)
        .map(move |i| {
            (0..dim)
                .map(|d| 2.0 * radical_inverse(i, PRIMES[d]) - 1.0)
                .collect::<Vec<f64>>()
        })
        .filter(|y| {
            let r2: f64 = y.iter().map(|e| e * e).sum();
            r2 <= 1.0 && r2 > 0.0
        })
}

pub fn estimate_calmness(
    obj: &SmoothObjective,
    x: &[f64],
    radius: f64,
    samples: usize,
) -> Result<CalmnessEstimate> {
    let n = obj.dim();
    ensure_dim("base point", n, x.len())?;
    if !(radius > 0.0) || samples == 0 {
        return Err(Error::Precondition("radius must be positive and samples at least 1".into()));
    }
    if n > PRIMES.len() {
        return Err(Error::DimensionCapExceeded {
            dim: n,
            cap: PRIMES.len(),
        });
    }
    let gbar = obj.gradient(x)?;
    let mut ell = 0.0f64;
    let mut attaining = x.to_vec();
    for y in ball_points(n).take(samples) {
        let point: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + radius * b).collect();
        let g = obj.gradient(&point)?;
        let dg: f64 = g.iter().zip(&gbar).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        let dx = radius * y.iter().map(|e| e * e).sum::<f64>().sqrt();
        let q = dg / dx;
        if q > ell {
            ell = q;
            attaining = point;
        }
    }
    Ok(CalmnessEstimate {
        ell,
        radius,
        samples,
        attaining_sample: attaining,
    })
}

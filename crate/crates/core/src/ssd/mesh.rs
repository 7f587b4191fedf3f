use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Offsets `δ = 10^(−e)` for `e = start, start + step, …, stop`; the limsup
/// estimate uses the tail `e ≥ tail`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshSpec {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
    pub tail: f64,
    pub tolerance: f64,
}

impl Default for MeshSpec {
    fn default() -> Self {
        Self {
            start: 1.0,
            stop: 8.0,
            step: 0.5,
            tail: 4.0,
            tolerance: 1e-6,
        }
    }
}

impl MeshSpec {
    pub fn validate(&self) -> Result<()> {
        let finite = [self.start, self.stop, self.step, self.tail, self.tolerance]
            .iter()
            .all(|x| x.is_finite());
        if !finite || self.step <= 0.0 || self.start > self.stop || self.tolerance < 0.0 {
            return Err(Error::Precondition(format!("invalid mesh {self}")));
        }
        if self.tail > self.stop {
            return Err(Error::Precondition(format!("mesh {self} has an empty tail")));
        }
        Ok(())
    }

    pub fn exponents(&self) -> Vec<f64> {
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        (0..count).map(|i| self.start + i as f64 * self.step).collect()
    }

    /// `δ` values of the tail, largest first.
    pub fn tail_steps(&self) -> Vec<f64> {
        self.exponents()
            .into_iter()
            .filter(|e| *e >= self.tail - 1e-12)
            .map(|e| 10f64.powf(-e))
            .collect()
    }
}

impl fmt::Display for MeshSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}:{}:{}",
            self.start, self.stop, self.step, self.tail
        )
    }
}

/// `start:stop:step[:tail]` in decimal exponents, e.g. `1:8:0.5:4`.
impl FromStr for MeshSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if !(3..=4).contains(&parts.len()) {
            return Err(Error::Precondition(format!(
                "mesh {s:?} must look like start:stop:step[:tail]"
            )));
        }
        let mut values = Vec::with_capacity(4);
        for p in &parts {
            values.push(
                p.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Precondition(format!("mesh entry {p:?} is not a number")))?,
            );
        }
        let default = MeshSpec::default();
        let mesh = MeshSpec {
            start: values[0],
            stop: values[1],
            step: values[2],
            tail: values.get(3).copied().unwrap_or(default.tail.clamp(values[0], values[1])),
            tolerance: default.tolerance,
        };
        mesh.validate()?;
        Ok(mesh)
    }
}

//! Inclusive `start:step:end` grids.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// An arithmetic grid that includes both end points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub start: f64,
    pub step: f64,
    pub end: f64,
}

impl GridSpec {
    pub fn new(start: f64, step: f64, end: f64) -> Result<Self> {
        let spec = GridSpec { start, step, end };
        spec.count()?;
        Ok(spec)
    }

    fn fail(&self, reason: &str) -> Error {
        Error::Grid {
            spec: self.to_string(),
            reason: reason.to_string(),
        }
    }

    /// Number of points, or an error when the span is not an integral number
    /// of steps (within 1e-9).
    pub fn count(&self) -> Result<usize> {
        if !(self.start.is_finite() && self.step.is_finite() && self.end.is_finite()) {
            return Err(self.fail("non-finite bound or step"));
        }
        if self.step == 0.0 {
            return Err(self.fail("step must be non-zero"));
        }
        let steps = (self.end - self.start) / self.step;
        if steps < -1e-9 {
            return Err(self.fail("bounds reversed relative to step sign"));
        }
        let rounded = steps.round();
        if (steps - rounded).abs() > 1e-9 {
            return Err(self.fail("span is not an integral number of steps"));
        }
        Ok(rounded as usize + 1)
    }

    pub fn points(&self) -> Result<Vec<f64>> {
        let n = self.count()?;
        let mut pts: Vec<f64> = (0..n).map(|i| self.start + self.step * i as f64).collect();
        if let Some(last) = pts.last_mut() {
            *last = self.end;
        }
        Ok(pts)
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.step, self.end)
    }
}

impl FromStr for GridSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |reason: &str| Error::Grid {
            spec: s.to_string(),
            reason: reason.to_string(),
        };
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(bad("expected start:step:end"));
        }
        let mut vals = [0.0; 3];
        for (v, p) in vals.iter_mut().zip(&parts) {
            *v = p.trim().parse::<f64>().map_err(|_| bad("not a number"))?;
        }
        GridSpec::new(vals[0], vals[1], vals[2])
    }
}

/// `n` evenly spaced points on `[lo, hi]`, end points exact.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let span = hi - lo;
            let last = (n - 1) as f64;
            (0..n)
                .map(|i| if i == n - 1 { hi } else { lo + span * (i as f64 / last) })
                .collect()
        }
    }
}

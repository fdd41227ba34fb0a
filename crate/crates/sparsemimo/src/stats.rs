use crate::error::{Error, Result};

/// Empirical distribution of a sample.
#[derive(Clone, Debug, PartialEq)]
pub struct Cdf {
    sorted: Vec<f64>,
}

impl Cdf {
    pub fn new(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Config("cdf of an empty sample".into()));
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::Config("cdf sample contains NaN".into()));
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        Ok(Cdf { sorted })
    }

    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.sorted[0]
    }

    pub fn max(&self) -> f64 {
        self.sorted[self.sorted.len() - 1]
    }

    /// Linear interpolation between order statistics; `p` is clamped to [0, 1].
    pub fn quantile(&self, p: f64) -> f64 {
        let h = p.clamp(0.0, 1.0) * (self.sorted.len() - 1) as f64;
        let lo = h.floor() as usize;
        let hi = h.ceil() as usize;
        let (a, b) = (self.sorted[lo], self.sorted[hi]);
        if lo == hi || a == b {
            a
        } else {
            a + (h - lo as f64) * (b - a)
        }
    }

    /// Empirical CDF value attached to the `i`-th sorted sample, `(i+1)/n`.
    pub fn probability(&self, i: usize) -> f64 {
        (i + 1) as f64 / self.sorted.len() as f64
    }
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

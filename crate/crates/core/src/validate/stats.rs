use serde::Serialize;

use crate::error::{Error, Result};
use crate::sampling::IntensityPair;

/// Streaming first and second moments of a pair of variables. Mergeable,
/// so chunked generation can combine partial results in a fixed order.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct PairStats {
    pub n: u64,
    mean_x: f64,
    mean_y: f64,
    m2_x: f64,
    m2_y: f64,
    c_xy: f64,
}

impl PairStats {
    pub fn push(&mut self, x: f64, y: f64) {
        self.n += 1;
        let n = self.n as f64;
        let dx = x - self.mean_x;
        let dy = y - self.mean_y;
        self.mean_x += dx / n;
        self.mean_y += dy / n;
        self.m2_x += dx * (x - self.mean_x);
        self.m2_y += dy * (y - self.mean_y);
        self.c_xy += dx * (y - self.mean_y);
    }

    pub fn merge(&mut self, o: &PairStats) {
        if o.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *o;
            return;
        }
        let (na, nb) = (self.n as f64, o.n as f64);
        let n = na + nb;
        let dx = o.mean_x - self.mean_x;
        let dy = o.mean_y - self.mean_y;
        self.m2_x += o.m2_x + dx * dx * na * nb / n;
        self.m2_y += o.m2_y + dy * dy * na * nb / n;
        self.c_xy += o.c_xy + dx * dy * na * nb / n;
        self.mean_x += dx * nb / n;
        self.mean_y += dy * nb / n;
        self.n += o.n;
    }

    pub fn mean_x(&self) -> f64 {
        self.mean_x
    }

    pub fn mean_y(&self) -> f64 {
        self.mean_y
    }

    /// Unbiased sample variances and covariance.
    pub fn variance_x(&self) -> f64 {
        self.m2_x / (self.n as f64 - 1.0)
    }

    pub fn variance_y(&self) -> f64 {
        self.m2_y / (self.n as f64 - 1.0)
    }

    pub fn covariance(&self) -> f64 {
        self.c_xy / (self.n as f64 - 1.0)
    }

    pub fn correlation(&self) -> Result<f64> {
        if self.n < 2 {
            return Err(Error::Degenerate(format!(
                "correlation needs at least two pairs, got {}",
                self.n
            )));
        }
        if !(self.m2_x > 0.0 && self.m2_y > 0.0) {
            return Err(Error::Degenerate("correlation of a constant coordinate".into()));
        }
        Ok((self.c_xy / (self.m2_x * self.m2_y).sqrt()).clamp(-1.0, 1.0))
    }
}

/// Pearson correlation of the two intensities.
pub fn empirical_correlation(pairs: &[IntensityPair]) -> Result<f64> {
    let mut s = PairStats::default();
    for p in pairs {
        s.push(p.x1, p.x2);
    }
    s.correlation()
}

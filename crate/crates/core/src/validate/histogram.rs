use serde::Serialize;

use crate::error::{Error, Result};

/// Density-normalized 1-D histogram over equal-width bins.
///
/// `density` is normalized over the in-range samples, so that
/// `sum(density * width) == 1`; samples outside `[lo, hi]` are tallied in
/// `n_below` / `n_above` and non-finite ones in `n_invalid`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub density: Vec<f64>,
    pub n_total: u64,
    pub n_below: u64,
    pub n_above: u64,
    pub n_invalid: u64,
}

impl Histogram {
    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    pub fn n_in_range(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn width(&self, i: usize) -> f64 {
        self.edges[i + 1] - self.edges[i]
    }

    pub fn center(&self, i: usize) -> f64 {
        0.5 * (self.edges[i] + self.edges[i + 1])
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.bins()).map(|i| self.center(i)).collect()
    }
}

fn linear_edges(lo: f64, hi: f64, bins: usize) -> Vec<f64> {
    let n = bins as f64;
    let mut edges: Vec<f64> = (0..=bins)
        .map(|i| {
            let t = i as f64;
            (lo * (n - t) + hi * t) / n
        })
        .collect();
    edges[bins] = hi;
    edges
}

fn check_range(bins: usize, lo: f64, hi: f64) -> Result<()> {
    if bins == 0 {
        return Err(Error::domain("histogram needs at least one bin"));
    }
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::domain(format!("histogram range needs lo < hi, got [{lo}, {hi}]")));
    }
    Ok(())
}

/// Mergeable bin counter; turn it into a [`Histogram`] with [`BinCounter::finish`].
#[derive(Debug, Clone, PartialEq)]
pub struct BinCounter {
    edges: Vec<f64>,
    scale: f64,
    counts: Vec<u64>,
    below: u64,
    above: u64,
    invalid: u64,
}

impl BinCounter {
    pub fn new(bins: usize, lo: f64, hi: f64) -> Result<Self> {
        check_range(bins, lo, hi)?;
        Ok(Self {
            edges: linear_edges(lo, hi, bins),
            scale: bins as f64 / (hi - lo),
            counts: vec![0; bins],
            below: 0,
            above: 0,
            invalid: 0,
        })
    }

    /// Bin index of `x`, with `hi` itself in the last bin.
    pub(crate) fn index_of(&self, x: f64) -> Option<usize> {
        let bins = self.counts.len();
        let lo = self.edges[0];
        let hi = self.edges[bins];
        if !(x >= lo && x <= hi) {
            return None;
        }
        let mut i = (((x - lo) * self.scale) as usize).min(bins - 1);
        // settle rounding against the stored edges
        if x < self.edges[i] {
            i -= 1;
        } else if i + 1 < bins && x >= self.edges[i + 1] {
            i += 1;
        }
        Some(i)
    }

    pub fn add(&mut self, x: f64) {
        if !x.is_finite() {
            self.invalid += 1;
            return;
        }
        match self.index_of(x) {
            Some(i) => self.counts[i] += 1,
            None if x < self.edges[0] => self.below += 1,
            None => self.above += 1,
        }
    }

    pub fn merge(&mut self, other: &BinCounter) {
        debug_assert_eq!(self.edges, other.edges);
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.below += other.below;
        self.above += other.above;
        self.invalid += other.invalid;
    }

    pub fn finish(self) -> Result<Histogram> {
        let in_range: u64 = self.counts.iter().sum();
        let n_total = in_range + self.below + self.above + self.invalid;
        if n_total == 0 {
            return Err(Error::Degenerate("histogram of an empty sample".into()));
        }
        if in_range == 0 {
            return Err(Error::Degenerate("no samples fall inside the histogram range".into()));
        }
        let n = in_range as f64;
        let density = self
            .counts
            .iter()
            .enumerate()
            .map(|(i, &c)| c as f64 / (n * (self.edges[i + 1] - self.edges[i])))
            .collect();
        Ok(Histogram {
            edges: self.edges,
            counts: self.counts,
            density,
            n_total,
            n_below: self.below,
            n_above: self.above,
            n_invalid: self.invalid,
        })
    }
}

/// Bins `samples` into `bins` equal bins over `range`.
pub fn build_histogram(samples: &[f64], bins: usize, range: (f64, f64)) -> Result<Histogram> {
    if samples.is_empty() {
        return Err(Error::Degenerate("histogram of an empty sample".into()));
    }
    let mut counter = BinCounter::new(bins, range.0, range.1)?;
    for &x in samples {
        counter.add(x);
    }
    counter.finish()
}

/// Density-normalized 2-D histogram; `counts` and `density` are row-major
/// with `x` as the row index.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram2D {
    pub x_edges: Vec<f64>,
    pub y_edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub density: Vec<f64>,
    pub n_total: u64,
    pub n_outside: u64,
}

impl Histogram2D {
    pub fn nx(&self) -> usize {
        self.x_edges.len() - 1
    }

    pub fn ny(&self) -> usize {
        self.y_edges.len() - 1
    }

    pub fn n_in_range(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn count(&self, i: usize, j: usize) -> u64 {
        self.counts[i * self.ny() + j]
    }

    pub fn density_at(&self, i: usize, j: usize) -> f64 {
        self.density[i * self.ny() + j]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BinCounter2D {
    x: BinCounter,
    y: BinCounter,
    counts: Vec<u64>,
    outside: u64,
}

impl BinCounter2D {
    pub fn new(nx: usize, x_range: (f64, f64), ny: usize, y_range: (f64, f64)) -> Result<Self> {
        Ok(Self {
            x: BinCounter::new(nx, x_range.0, x_range.1)?,
            y: BinCounter::new(ny, y_range.0, y_range.1)?,
            counts: vec![0; nx * ny],
            outside: 0,
        })
    }

    pub fn add(&mut self, x: f64, y: f64) {
        match (self.x.index_of(x), self.y.index_of(y)) {
            (Some(i), Some(j)) => self.counts[i * self.y.counts.len() + j] += 1,
            _ => self.outside += 1,
        }
    }

    pub fn merge(&mut self, other: &BinCounter2D) {
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.outside += other.outside;
    }

    pub fn finish(self) -> Result<Histogram2D> {
        let in_range: u64 = self.counts.iter().sum();
        if in_range == 0 {
            return Err(Error::Degenerate("no samples fall inside the 2-D histogram range".into()));
        }
        let ny = self.y.counts.len();
        let n = in_range as f64;
        let xe = &self.x.edges;
        let ye = &self.y.edges;
        let density = self
            .counts
            .iter()
            .enumerate()
            .map(|(idx, &c)| {
                let (i, j) = (idx / ny, idx % ny);
                c as f64 / (n * (xe[i + 1] - xe[i]) * (ye[j + 1] - ye[j]))
            })
            .collect();
        Ok(Histogram2D {
            x_edges: self.x.edges,
            y_edges: self.y.edges,
            counts: self.counts,
            density,
            n_total: in_range + self.outside,
            n_outside: self.outside,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn single_bin_occupancy() {
        let h = build_histogram(&[0.31, 0.32, 0.33], 10, (0.0, 1.0)).unwrap();
        assert_eq!(h.counts[3], 3);
        assert!((h.density[3] - 1.0 / h.width(3)).abs() < 1e-12);
    }

    #[test]
    fn out_of_range_is_reported() {
        let h = build_histogram(&[-1.0, 0.5, 2.0, 1.0, f64::NAN], 4, (0.0, 1.0)).unwrap();
        assert_eq!((h.n_below, h.n_above, h.n_invalid, h.n_total), (1, 1, 1, 5));
        // upper edge lands in the last bin
        assert_eq!(h.counts[3], 1);
        assert_eq!(h.n_in_range(), 2);
    }

    #[test]
    fn errors() {
        assert!(build_histogram(&[], 10, (0.0, 1.0)).is_err());
        assert!(build_histogram(&[0.5], 0, (0.0, 1.0)).is_err());
        assert!(build_histogram(&[0.5], 10, (1.0, 1.0)).is_err());
        assert!(build_histogram(&[5.0], 10, (0.0, 1.0)).is_err());
    }

    #[test]
    fn merge_equals_single_pass() {
        let xs: Vec<f64> = (0..1000).map(|i| (f64::from(i) * 0.618_034).fract()).collect();
        let mut a = BinCounter::new(7, 0.0, 1.0).unwrap();
        let mut b = BinCounter::new(7, 0.0, 1.0).unwrap();
        for (i, &x) in xs.iter().enumerate() {
            if i % 3 == 0 { a.add(x) } else { b.add(x) }
        }
        a.merge(&b);
        assert_eq!(a.finish().unwrap(), build_histogram(&xs, 7, (0.0, 1.0)).unwrap());
    }

    #[test]
    fn two_dimensional_normalization() {
        let mut c = BinCounter2D::new(5, (0.0, 1.0), 4, (0.0, 2.0)).unwrap();
        for i in 0..500 {
            let t = f64::from(i) / 500.0;
            c.add(t, 2.0 * (t * 7.3).fract());
        }
        c.add(3.0, 0.5);
        let h = c.finish().unwrap();
        assert_eq!(h.n_outside, 1);
        let mass: f64 = h.density.iter().map(|d| d * 0.2 * 0.5).sum();
        assert!((mass - 1.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn density_integrates_to_one(
            xs in prop::collection::vec(-0.5f64..1.5, 1..400),
            bins in 1usize..60,
        ) {
            prop_assume!(xs.iter().any(|x| (0.0..=1.0).contains(x)));
            let h = build_histogram(&xs, bins, (0.0, 1.0)).unwrap();
            let mass: f64 = (0..h.bins()).map(|i| h.density[i] * h.width(i)).sum();
            prop_assert!((mass - 1.0).abs() <= 1e-12);
            prop_assert_eq!(h.n_total, xs.len() as u64);
            prop_assert!(h.edges.windows(2).all(|w| w[0] < w[1]));
        }
    }
}

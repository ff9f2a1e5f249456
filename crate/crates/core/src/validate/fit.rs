//! Goodness of fit of histograms against closed-form densities.

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::histogram::{Histogram, Histogram2D};
use crate::error::{Error, Result};
use crate::quad::{integrate, kronrod15_rule, QuadConfig};

#[derive(Debug, Clone, Copy)]
pub struct FitConfig {
    /// Significance level of the chi-square test.
    pub alpha: f64,
    /// Cells are pooled until each expects at least this many counts.
    pub min_expected: f64,
    /// Optional extra bound on the sup distance between densities.
    pub max_sup_distance: Option<f64>,
    pub quad: QuadConfig,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            alpha: 0.01,
            min_expected: 5.0,
            max_sup_distance: None,
            quad: QuadConfig {
                abs_tol: 1e-13,
                rel_tol: 1e-11,
                max_intervals: 200,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitReport {
    /// max over bins of |empirical density - analytic density at the bin center|
    pub sup_distance: f64,
    pub chi2_stat: f64,
    pub dof: usize,
    pub p_value: f64,
    pub critical_value: f64,
    pub pass: bool,
}

/// One pooled chi-square cell.
#[derive(Debug, Clone, Copy, Default)]
struct Cell {
    observed: f64,
    expected: f64,
}

fn chi_square_report(cells: &[Cell], sup_distance: f64, cfg: &FitConfig) -> Result<FitReport> {
    if cells.len() < 2 {
        return Err(Error::Degenerate(format!(
            "chi-square needs at least two cells after pooling, got {}",
            cells.len()
        )));
    }
    let chi2_stat: f64 = cells
        .iter()
        .map(|c| (c.observed - c.expected).powi(2) / c.expected)
        .sum();
    let dof = cells.len() - 1;
    let law = ChiSquared::new(dof as f64).map_err(|e| Error::Degenerate(e.to_string()))?;
    let critical_value = law.inverse_cdf(1.0 - cfg.alpha);
    let p_value = law.sf(chi2_stat);
    let sup_ok = cfg.max_sup_distance.is_none_or(|m| sup_distance <= m);
    Ok(FitReport {
        sup_distance,
        chi2_stat,
        dof,
        p_value,
        critical_value,
        pass: chi2_stat <= critical_value && sup_ok,
    })
}

/// Merges neighbouring bins left to right until each expects `min_expected`.
fn pool_sequential(raw: &[Cell], min_expected: f64) -> Vec<Cell> {
    let mut out: Vec<Cell> = Vec::new();
    let mut acc = Cell::default();
    for c in raw {
        acc.observed += c.observed;
        acc.expected += c.expected;
        if acc.expected >= min_expected {
            out.push(acc);
            acc = Cell::default();
        }
    }
    if acc.expected > 0.0 || acc.observed > 0.0 {
        match out.last_mut() {
            Some(last) => {
                last.observed += acc.observed;
                last.expected += acc.expected;
            }
            None => out.push(acc),
        }
    }
    out
}

/// Keeps well-populated cells and pools the rest into one cell.
fn pool_sparse(raw: &[Cell], min_expected: f64) -> Vec<Cell> {
    let mut out: Vec<Cell> = raw.iter().copied().filter(|c| c.expected >= min_expected).collect();
    let mut rest = Cell::default();
    for c in raw.iter().filter(|c| c.expected < min_expected) {
        rest.observed += c.observed;
        rest.expected += c.expected;
    }
    if rest.expected >= min_expected || out.is_empty() {
        if rest.expected > 0.0 {
            out.push(rest);
        }
    } else if rest.expected > 0.0 || rest.observed > 0.0 {
        if let Some(smallest) = out.iter_mut().min_by(|a, b| a.expected.total_cmp(&b.expected)) {
            smallest.observed += rest.observed;
            smallest.expected += rest.expected;
        }
    }
    out
}

/// Compares a 1-D histogram with `pdf`. Expected bin counts come from
/// adaptive quadrature over each bin, conditioned on the histogram range.
pub fn compare_to_pdf<F>(h: &Histogram, pdf: F, cfg: &FitConfig) -> Result<FitReport>
where
    F: Fn(f64) -> Result<f64>,
{
    let probs = (0..h.bins())
        .map(|i| integrate(&pdf, h.edges[i], h.edges[i + 1], &cfg.quad).map(|q| q.value))
        .collect::<Result<Vec<f64>>>()?;
    let mass: f64 = probs.iter().sum();
    if !(mass > 0.0) {
        return Err(Error::Degenerate("density has no mass on the histogram range".into()));
    }
    let n = h.n_in_range() as f64;
    let mut sup: f64 = 0.0;
    for i in 0..h.bins() {
        sup = sup.max((h.density[i] - pdf(h.center(i))? / mass).abs());
    }
    let raw: Vec<Cell> = h
        .counts
        .iter()
        .zip(&probs)
        .map(|(&c, &p)| Cell {
            observed: c as f64,
            expected: n * p / mass,
        })
        .collect();
    chi_square_report(&pool_sequential(&raw, cfg.min_expected), sup, cfg)
}

/// Compares a 2-D histogram with `pdf`; cell probabilities use a 15x15
/// tensor Kronrod rule per cell. Also returns the analytic density at every
/// cell center (row-major, like the histogram).
pub fn compare_to_pdf_2d<F>(h: &Histogram2D, pdf: F, cfg: &FitConfig) -> Result<(FitReport, Vec<f64>)>
where
    F: Fn(f64, f64) -> Result<f64>,
{
    let rule = kronrod15_rule();
    let (nx, ny) = (h.nx(), h.ny());
    let mut probs = Vec::with_capacity(nx * ny);
    let mut centers = Vec::with_capacity(nx * ny);
    for i in 0..nx {
        let (x0, x1) = (h.x_edges[i], h.x_edges[i + 1]);
        let (cx, hx) = (0.5 * (x0 + x1), 0.5 * (x1 - x0));
        for j in 0..ny {
            let (y0, y1) = (h.y_edges[j], h.y_edges[j + 1]);
            let (cy, hy) = (0.5 * (y0 + y1), 0.5 * (y1 - y0));
            let mut acc = 0.0;
            for &(u, wu) in &rule {
                for &(v, wv) in &rule {
                    acc += wu * wv * pdf(cx + hx * u, cy + hy * v)?;
                }
            }
            probs.push(acc * hx * hy);
            centers.push(pdf(cx, cy)?);
        }
    }
    let mass: f64 = probs.iter().sum();
    if !(mass > 0.0) {
        return Err(Error::Degenerate("density has no mass on the histogram range".into()));
    }
    let n = h.n_in_range() as f64;
    let sup = h
        .density
        .iter()
        .zip(&centers)
        .map(|(d, c)| (d - c / mass).abs())
        .fold(0.0, f64::max);
    let raw: Vec<Cell> = h
        .counts
        .iter()
        .zip(&probs)
        .map(|(&c, &p)| Cell {
            observed: c as f64,
            expected: n * p / mass,
        })
        .collect();
    let report = chi_square_report(&pool_sparse(&raw, cfg.min_expected), sup, cfg)?;
    Ok((report, centers))
}

/// Kolmogorov–Smirnov distance between the sample and `cdf`. Sorts in place.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &mut [f64], cdf: F) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::Degenerate("KS statistic of an empty sample".into()));
    }
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in samples.iter().enumerate() {
        let f = cdf(x);
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    Ok(d)
}

/// Large-sample KS critical distance at the 1% level.
pub fn ks_critical_1pct(n: usize) -> f64 {
    1.63 / (n as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::validate::histogram::build_histogram;

    #[test]
    fn sequential_pooling_conserves_totals() {
        let raw: Vec<Cell> = [1.0, 2.0, 10.0, 0.5, 0.2, 7.0, 1.0]
            .iter()
            .map(|&e| Cell { observed: e, expected: e })
            .collect();
        let pooled = pool_sequential(&raw, 5.0);
        assert!(pooled.iter().all(|c| c.expected >= 5.0));
        let total: f64 = pooled.iter().map(|c| c.expected).sum();
        assert!((total - 21.7).abs() < 1e-12);
    }

    #[test]
    fn sparse_pooling_conserves_totals() {
        let raw: Vec<Cell> = [1.0, 2.0, 10.0, 0.5, 0.2, 7.0, 1.0]
            .iter()
            .map(|&e| Cell { observed: e, expected: e })
            .collect();
        let pooled = pool_sparse(&raw, 5.0);
        assert_eq!(pooled.len(), 2);
        let total: f64 = pooled.iter().map(|c| c.expected).sum();
        assert!((total - 21.7).abs() < 1e-12);
    }

    #[test]
    fn perfect_histogram_has_zero_statistic() {
        // a deterministic "sample" at evenly spaced quantiles of the uniform law
        let xs: Vec<f64> = (0..10_000).map(|i| (f64::from(i) + 0.5) / 10_000.0).collect();
        let h = build_histogram(&xs, 10, (0.0, 1.0)).unwrap();
        let r = compare_to_pdf(&h, |_| Ok(1.0), &FitConfig::default()).unwrap();
        assert!(r.chi2_stat < 1e-9);
        assert_eq!(r.dof, 9);
        assert!(r.pass);
        assert!(r.sup_distance < 1e-9);
    }

    #[test]
    fn wrong_density_fails() {
        let xs: Vec<f64> = (0..10_000).map(|i| (f64::from(i) + 0.5) / 10_000.0).collect();
        let h = build_histogram(&xs, 20, (0.0, 1.0)).unwrap();
        let r = compare_to_pdf(&h, |x| Ok(2.0 * x), &FitConfig::default()).unwrap();
        assert!(!r.pass);
        assert!(r.p_value < 1e-10);
    }

    #[test]
    fn ks_uniform_grid() {
        let mut xs: Vec<f64> = (0..1000).rev().map(|i| (f64::from(i) + 0.5) / 1000.0).collect();
        let d = ks_statistic(&mut xs, |x| x).unwrap();
        assert!((d - 0.0005).abs() < 1e-12);
        assert!(d < ks_critical_1pct(1000));
    }
}

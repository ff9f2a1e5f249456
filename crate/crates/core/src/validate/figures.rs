//! Plot-ready tables for the eight figures.

use serde::Serialize;

use super::checks::{histogram_check, joint_density_check, joint_pdf, Perturbation, Quantity};
use super::fit::FitConfig;
use super::stats::PairStats;
use crate::dist::{gamma_marginal_pdf, ndr_mean_band, ndr_moment, Formulation, FieldParams, GammaPairParams};
use crate::error::{Error, Result};
use crate::sampling::{map_chunks, sample_intensity_pair, SeedSpec};

/// A named-column numeric table. Column names and order are stable.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }
}

/// `points` evenly spaced values from `lo` to `hi` inclusive.
pub fn linear_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let n = (points - 1) as f64;
            (0..points)
                .map(|i| {
                    let t = i as f64;
                    (lo * (n - t) + hi * t) / n
                })
                .collect()
        }
    }
}

pub fn default_rho_z_grid() -> Vec<f64> {
    (0..10).map(|i| f64::from(i) / 10.0).collect()
}

/// Empirical intensity correlation against `rho_z^2` for each `rho_z`. Row
/// `i` uses stream `seed.stream_id + i`.
pub fn figure_corr_curve(rho_z_grid: &[f64], sigma_z: f64, n: usize, seed: SeedSpec) -> Result<Table> {
    if n < 2 {
        return Err(Error::domain("correlation curve needs at least two samples per point"));
    }
    let mut t = Table::new(&["rho_z", "empirical_corr", "theory_rho_z2"]);
    for (i, &rz) in rho_z_grid.iter().enumerate() {
        let fp = FieldParams::new(sigma_z, rz)?;
        let stream = seed.with_stream(seed.stream_id.wrapping_add(i as u64));
        let parts = map_chunks(n, stream, |rng, len| {
            let mut s = PairStats::default();
            for _ in 0..len {
                let pair = sample_intensity_pair(&fp, rng);
                s.push(pair.x1, pair.x2);
            }
            s
        });
        let mut acc = PairStats::default();
        for part in &parts {
            acc.merge(part);
        }
        t.push(vec![rz, acc.correlation()?, rz * rz]);
    }
    Ok(t)
}

/// 2-D histogram beside the analytic joint density at every cell center.
pub fn figure_joint_histogram(
    p: &GammaPairParams,
    bins: usize,
    n: usize,
    seed: SeedSpec,
    cfg: &FitConfig,
) -> Result<Table> {
    let check = joint_density_check(p, bins, None, n, seed, cfg, Perturbation::default())?;
    let h = &check.histogram;
    let mut t = Table::new(&["x1", "x2", "empirical_density", "analytic_density"]);
    for i in 0..h.nx() {
        let x1 = 0.5 * (h.x_edges[i] + h.x_edges[i + 1]);
        for j in 0..h.ny() {
            let x2 = 0.5 * (h.y_edges[j] + h.y_edges[j + 1]);
            t.push(vec![x1, x2, h.density_at(i, j), check.analytic[i * h.ny() + j]]);
        }
    }
    Ok(t)
}

/// Analytic joint density on a `points x points` grid with both marginals.
pub fn figure_joint_theory(k_set: &[f64], sigma: f64, rho: f64, points: usize) -> Result<Table> {
    let mut t = Table::new(&["k", "x1", "x2", "joint_pdf", "marginal_x1", "marginal_x2"]);
    for &k in k_set {
        let p = GammaPairParams::new(sigma, rho, k)?;
        let hi = super::checks::default_joint_upper(&p);
        let grid = linear_grid(0.0, hi, points);
        let marg = grid
            .iter()
            .map(|&x| gamma_marginal_pdf(&p, x))
            .collect::<Result<Vec<_>>>()?;
        for (i, &x1) in grid.iter().enumerate() {
            for (j, &x2) in grid.iter().enumerate() {
                t.push(vec![k, x1, x2, joint_pdf(&p, x1, x2)?, marg[i], marg[j]]);
            }
        }
    }
    Ok(t)
}

/// Ratio and NDR histograms with the analytic densities. The `quantity`
/// column is 0 for the ratio and 1 for `D`.
pub fn figure_ratio_ndr(p: &GammaPairParams, bins: usize, n: usize, seed: SeedSpec, cfg: &FitConfig) -> Result<Table> {
    let mut t = Table::new(&["quantity", "center", "empirical_density", "analytic_density"]);
    for (code, q) in [(0.0, Quantity::Ratio), (1.0, Quantity::Ndr)] {
        let c = histogram_check(p, q, n, bins, seed, cfg, Perturbation::default())?;
        for (i, a) in c.analytic.iter().enumerate() {
            t.push(vec![code, c.histogram.center(i), c.histogram.density[i], *a]);
        }
    }
    Ok(t)
}

/// Closed-form `<D>` against `rho` per `k`, with the spread band.
pub fn figure_ndr_vs_rho(k_set: &[f64], rho_grid: &[f64]) -> Result<Table> {
    let mut t = Table::new(&["k", "rho", "mean", "lower", "upper"]);
    for &k in k_set {
        for &rho in rho_grid {
            let p = GammaPairParams::new(1.0, rho, k)?;
            let band = ndr_mean_band(&p)?;
            t.push(vec![k, rho, band.mean, band.lower(), band.upper()]);
        }
    }
    Ok(t)
}

/// `<D^m>` at fixed `rho` against `k`, one column per order.
pub fn figure_moments_vs_k(k_grid: &[f64], m_set: &[u32], rho: f64) -> Result<Table> {
    let names: Vec<String> = std::iter::once("k".to_string())
        .chain(m_set.iter().map(|m| format!("m{m}")))
        .collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let mut t = Table::new(&refs);
    for &k in k_grid {
        let p = GammaPairParams::new(1.0, rho, k)?;
        let mut row = vec![k];
        for &m in m_set {
            row.push(ndr_moment(&p, m, Formulation::preferred(rho))?);
        }
        t.push(row);
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_endpoints_are_exact() {
        let g = linear_grid(0.1, 10.0, 100);
        assert_eq!((g[0], g[9], g[99]), (0.1, 1.0, 10.0));
        assert_eq!(linear_grid(0.0, 1.0, 11)[3], 0.3);
    }

    #[test]
    fn corr_curve_is_reproducible() {
        let a = figure_corr_curve(&[0.0, 0.8], 0.7, 50_000, SeedSpec::new(9, 0)).unwrap();
        let b = figure_corr_curve(&[0.0, 0.8], 0.7, 50_000, SeedSpec::new(9, 0)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.columns, ["rho_z", "empirical_corr", "theory_rho_z2"]);
        assert!(a.rows[0][1].abs() < 0.03);
        assert!((a.rows[1][1] - 0.64).abs() < 0.03);
    }

    #[test]
    fn ndr_vs_rho_anchor_and_monotone() {
        let grid = linear_grid(0.0, 0.99, 34);
        let t = figure_ndr_vs_rho(&[1.0, 2.0, 5.0, 12.0], &grid).unwrap();
        assert!((t.rows[0][2] - 0.5).abs() < 1e-12);
        for block in t.rows.chunks(grid.len()) {
            assert!(block.windows(2).all(|w| w[1][2] <= w[0][2]));
            assert!(block.last().unwrap()[2] < 0.1);
        }
    }

    #[test]
    fn moments_vs_k_anchors() {
        let t = figure_moments_vs_k(&[1.0, 2.0, 3.0], &[1, 2, 3, 4], 0.0).unwrap();
        assert_eq!(t.columns, ["k", "m1", "m2", "m3", "m4"]);
        assert!((t.rows[0][1] - 0.5).abs() < 1e-12);
        assert!((t.rows[0][2] - 1.0 / 3.0).abs() < 1e-12);
        assert!((t.rows[1][1] - 0.375).abs() < 1e-12);
        assert!((t.rows[2][1] - 0.3125).abs() < 1e-12);
    }

    #[test]
    fn joint_theory_marginals_match_rows() {
        let t = figure_joint_theory(&[1.0], 0.98, 0.64, 5).unwrap();
        assert_eq!(t.rows.len(), 25);
        // row (i, j) carries marginal(x_i) and marginal(x_j)
        assert_eq!(t.rows[1][4], t.rows[0][4]);
        assert_eq!(t.rows[5][5], t.rows[0][5]);
    }
}

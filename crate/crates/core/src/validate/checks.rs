//! Monte-Carlo checks of the closed forms against this crate's own sampler.

use serde::Serialize;

use super::fit::{compare_to_pdf, compare_to_pdf_2d, ks_critical_1pct, ks_statistic, FitConfig, FitReport};
use super::histogram::{BinCounter, BinCounter2D, Histogram, Histogram2D};
use crate::dist::{
    gamma_marginal_pdf, joint_pdf_exponential, joint_pdf_gamma, ndr_moment, ndr_pdf, ratio_pdf,
    Formulation, GammaPairParams,
};
use crate::error::{Error, Result};
use crate::quad::{integrate, QuadConfig};
use crate::sampling::{map_chunks, GammaPairSampler, SeedSpec};

/// Default bin count for 1-D histograms.
pub const DEFAULT_BINS: usize = 100;
/// Default bins per axis for 2-D histograms.
pub const DEFAULT_BINS_2D: usize = 50;
/// Largest moment order the Monte-Carlo table accepts.
pub const MAX_TABLE_ORDER: u32 = 8;
/// Tolerance on pairwise agreement of the three moment formulations.
pub const FORMULATION_REL_TOL: f64 = 1e-9;

/// Multiplies a density by `1 + eps (2t - 1)`, `t` the relative position in
/// the histogram range. Used to check that the fits can fail.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct Perturbation(pub f64);

impl Perturbation {
    fn apply(&self, value: f64, x: f64, lo: f64, hi: f64) -> f64 {
        if self.0 == 0.0 {
            return value;
        }
        let t = ((x - lo) / (hi - lo)).clamp(0.0, 1.0);
        value * (1.0 + self.0 * (2.0 * t - 1.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Quantity {
    /// `Z = X / Y`
    Ratio,
    /// `D = |X - Y| / (X + Y)`
    Ndr,
}

#[derive(Debug, Clone, Serialize)]
pub struct HistogramCheck {
    pub params: GammaPairParams,
    pub quantity: Quantity,
    pub histogram: Histogram,
    /// Analytic density at each bin center, conditioned on the range.
    pub analytic: Vec<f64>,
    pub report: FitReport,
}

/// CDF of `D` by quadrature of the closed-form density.
pub fn ndr_cdf(p: &GammaPairParams, r: f64) -> Result<f64> {
    let q = integrate(|t| ndr_pdf(p, t), 0.0, r.clamp(0.0, 1.0), &QuadConfig::default())?;
    Ok(q.value.min(1.0))
}

/// `[0, z_hi]` with `z_hi` the image of the 99% quantile of `D`, capped at 20.
pub fn default_ratio_range(p: &GammaPairParams) -> Result<(f64, f64)> {
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        if ndr_cdf(p, mid)? < 0.99 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let z = (1.0 + hi) / (1.0 - hi);
    Ok((0.0, z.min(20.0)))
}

/// Samples `n` pairs, histograms the ratio or `D`, and fits the closed form.
pub fn histogram_check(
    p: &GammaPairParams,
    quantity: Quantity,
    n: usize,
    bins: usize,
    seed: SeedSpec,
    cfg: &FitConfig,
    perturb: Perturbation,
) -> Result<HistogramCheck> {
    let sampler = GammaPairSampler::new(p)?;
    let (lo, hi) = match quantity {
        Quantity::Ndr => (0.0, 1.0),
        Quantity::Ratio => default_ratio_range(p)?,
    };
    BinCounter::new(bins, lo, hi)?;
    let parts = map_chunks(n, seed, |rng, len| {
        let mut c = BinCounter::new(bins, lo, hi).expect("validated above");
        for _ in 0..len {
            let pair = sampler.sample(rng);
            let v = match quantity {
                Quantity::Ndr => pair.ndr(),
                Quantity::Ratio => pair.ratio(),
            };
            c.add(v.unwrap_or(f64::NAN));
        }
        c
    });
    let mut counter = BinCounter::new(bins, lo, hi)?;
    for part in &parts {
        counter.merge(part);
    }
    let histogram = counter.finish()?;
    let pdf = |x: f64| -> Result<f64> {
        let v = match quantity {
            Quantity::Ndr => ndr_pdf(p, x)?,
            Quantity::Ratio => ratio_pdf(p, x)?,
        };
        Ok(perturb.apply(v, x, lo, hi))
    };
    let report = compare_to_pdf(&histogram, pdf, cfg)?;
    let mass: f64 = integrate(pdf, lo, hi, &cfg.quad)?.value;
    let analytic = histogram
        .centers()
        .into_iter()
        .map(|c| pdf(c).map(|v| v / mass))
        .collect::<Result<Vec<_>>>()?;
    Ok(HistogramCheck {
        params: *p,
        quantity,
        histogram,
        analytic,
        report,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MarginalRow {
    pub center: f64,
    pub empirical: f64,
    pub analytic: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct JointDensityCheck {
    pub params: GammaPairParams,
    pub histogram: Histogram2D,
    /// Analytic joint density at each cell center (row-major, x1 rows).
    pub analytic: Vec<f64>,
    pub report: FitReport,
    pub marginal_x1: Vec<MarginalRow>,
    pub marginal_x2: Vec<MarginalRow>,
}

/// Upper edge of the default 2-D range, `k sigma + 10 sqrt(k) sigma`.
pub fn default_joint_upper(p: &GammaPairParams) -> f64 {
    p.k() * p.sigma() + 10.0 * p.k().sqrt() * p.sigma()
}

/// Joint density used for a parameter set: the exponential form at `k = 1`.
pub fn joint_pdf(p: &GammaPairParams, x1: f64, x2: f64) -> Result<f64> {
    if p.k() == 1.0 {
        joint_pdf_exponential(p, x1, x2)
    } else {
        joint_pdf_gamma(p, x1, x2)
    }
}

pub fn joint_density_check(
    p: &GammaPairParams,
    bins: usize,
    upper: Option<f64>,
    n: usize,
    seed: SeedSpec,
    cfg: &FitConfig,
    perturb: Perturbation,
) -> Result<JointDensityCheck> {
    let sampler = GammaPairSampler::new(p)?;
    let hi = upper.unwrap_or_else(|| default_joint_upper(p));
    let fresh = || -> Result<(BinCounter2D, BinCounter, BinCounter)> {
        Ok((
            BinCounter2D::new(bins, (0.0, hi), bins, (0.0, hi))?,
            BinCounter::new(bins, 0.0, hi)?,
            BinCounter::new(bins, 0.0, hi)?,
        ))
    };
    fresh()?;
    let parts = map_chunks(n, seed, |rng, len| {
        let (mut joint, mut m1, mut m2) = fresh().expect("validated above");
        for _ in 0..len {
            let pair = sampler.sample(rng);
            joint.add(pair.x1, pair.x2);
            m1.add(pair.x1);
            m2.add(pair.x2);
        }
        (joint, m1, m2)
    });
    let (mut joint, mut m1, mut m2) = fresh()?;
    for (j, a, b) in &parts {
        joint.merge(j);
        m1.merge(a);
        m2.merge(b);
    }
    let histogram = joint.finish()?;
    let pdf = |x1: f64, x2: f64| -> Result<f64> { Ok(perturb.apply(joint_pdf(p, x1, x2)?, x1, 0.0, hi)) };
    let (report, analytic) = compare_to_pdf_2d(&histogram, pdf, cfg)?;
    let marginal = |h: Histogram| -> Result<Vec<MarginalRow>> {
        (0..h.bins())
            .map(|i| {
                let c = h.center(i);
                Ok(MarginalRow {
                    center: c,
                    empirical: h.density[i],
                    analytic: gamma_marginal_pdf(p, c)?,
                })
            })
            .collect()
    };
    Ok(JointDensityCheck {
        params: *p,
        marginal_x1: marginal(m1.finish()?)?,
        marginal_x2: marginal(m2.finish()?)?,
        histogram,
        analytic,
        report,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentReport {
    pub m: u32,
    pub analytic_f1: f64,
    pub analytic_f2: f64,
    pub analytic_f3: f64,
    pub mc_estimate: f64,
    pub mc_std_error: f64,
    /// `|mc_estimate - analytic_f2| <= 4 mc_std_error`
    pub mc_consistent: bool,
    /// pairwise relative agreement of the analytic columns within 1e-9
    pub formulations_agree: bool,
}

/// Relative spread of the three analytic formulations.
pub fn formulation_spread(values: [f64; 3]) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..3 {
        for j in (i + 1)..3 {
            let scale = values[i].abs().max(values[j].abs());
            if scale > 0.0 {
                worst = worst.max((values[i] - values[j]).abs() / scale);
            }
        }
    }
    worst
}

pub fn analytic_moments(p: &GammaPairParams, m: u32) -> Result<[f64; 3]> {
    Ok([
        ndr_moment(p, m, Formulation::F1)?,
        ndr_moment(p, m, Formulation::F2)?,
        ndr_moment(p, m, Formulation::F3)?,
    ])
}

/// Closed-form moments of `D` beside Monte-Carlo estimates from `n` samples.
pub fn moment_table(p: &GammaPairParams, orders: &[u32], n: usize, seed: SeedSpec) -> Result<Vec<MomentReport>> {
    if let Some(&bad) = orders.iter().find(|&&m| m > MAX_TABLE_ORDER) {
        return Err(Error::domain(format!(
            "moment orders must lie in 0..={MAX_TABLE_ORDER}, got {bad}"
        )));
    }
    if n < 2 {
        return Err(Error::domain("moment table needs at least two samples"));
    }
    let sampler = GammaPairSampler::new(p)?;
    let top = 2 * orders.iter().copied().max().unwrap_or(0) as usize;
    let parts = map_chunks(n, seed, |rng, len| {
        let mut sums = vec![0.0; top + 1];
        for _ in 0..len {
            let d = sampler.sample_ndr(rng);
            let mut pow = 1.0;
            for s in sums.iter_mut() {
                *s += pow;
                pow *= d;
            }
        }
        sums
    });
    let mut sums = vec![0.0; top + 1];
    for part in &parts {
        for (a, b) in sums.iter_mut().zip(part) {
            *a += b;
        }
    }
    let nf = n as f64;
    orders
        .iter()
        .map(|&m| {
            let analytic = analytic_moments(p, m)?;
            let mean = sums[m as usize] / nf;
            let var = ((sums[2 * m as usize] - nf * mean * mean) / (nf - 1.0)).max(0.0);
            let se = (var / nf).sqrt();
            let diff = (mean - analytic[1]).abs();
            Ok(MomentReport {
                m,
                analytic_f1: analytic[0],
                analytic_f2: analytic[1],
                analytic_f3: analytic[2],
                mc_estimate: mean,
                mc_std_error: se,
                mc_consistent: if se > 0.0 { diff <= 4.0 * se } else { diff <= 1e-12 },
                formulations_agree: formulation_spread(analytic) <= FORMULATION_REL_TOL,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KsReport {
    pub n: usize,
    pub statistic: f64,
    pub critical_value: f64,
    pub pass: bool,
}

/// KS test of `n` samples of `D` against the CDF of the closed form.
pub fn ndr_ks_check(p: &GammaPairParams, n: usize, seed: SeedSpec) -> Result<KsReport> {
    let sampler = GammaPairSampler::new(p)?;
    let mut xs: Vec<f64> = map_chunks(n, seed, |rng, len| {
        (0..len).map(|_| sampler.sample_ndr(rng)).collect::<Vec<_>>()
    })
    .into_iter()
    .flatten()
    .collect();
    // closed-form CDF in the uniform case, quadrature otherwise via a table
    let statistic = if p.k() == 1.0 && p.rho() == 0.0 {
        ks_statistic(&mut xs, |x| x)?
    } else {
        let grid = 2_000;
        let mut table = Vec::with_capacity(grid + 1);
        let mut acc = 0.0;
        table.push(0.0);
        for i in 0..grid {
            let a = i as f64 / grid as f64;
            let b = (i + 1) as f64 / grid as f64;
            acc += integrate(|t| ndr_pdf(p, t), a, b, &QuadConfig::default())?.value;
            table.push(acc);
        }
        ks_statistic(&mut xs, |x| {
            let pos = (x * grid as f64).min(grid as f64 - 1e-9);
            let i = pos as usize;
            let f = pos - i as f64;
            table[i] + f * (table[i + 1] - table[i])
        })?
    };
    let critical_value = ks_critical_1pct(n);
    Ok(KsReport {
        n,
        statistic,
        critical_value,
        pass: statistic <= critical_value,
    })
}

/// One sample statistic against its theoretical value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Agreement {
    pub estimate: f64,
    pub expected: f64,
    pub std_error: f64,
}

impl Agreement {
    /// Distance in standard errors.
    pub fn z_score(&self) -> f64 {
        (self.estimate - self.expected).abs() / self.std_error
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExponentialIdentities {
    pub n: usize,
    /// sample mean of `x1` against `sigma`
    pub mean: Agreement,
    /// sample variance of `x1` against `sigma^2`
    pub variance: Agreement,
    /// sample mean of `x1 x2` against `sigma^2 (1 + rho)`
    pub mixed: Agreement,
}

impl ExponentialIdentities {
    pub fn max_z_score(&self) -> f64 {
        self.mean.z_score().max(self.variance.z_score()).max(self.mixed.z_score())
    }
}

/// Mean, variance and mixed moment of `k = 1` intensities from the field
/// pipeline. Power sums are accumulated about `sigma` to limit cancellation.
pub fn exponential_identities(p: &GammaPairParams, n: usize, seed: SeedSpec) -> Result<ExponentialIdentities> {
    if p.k() != 1.0 {
        return Err(Error::domain(format!("exponential identities need k = 1, got {}", p.k())));
    }
    if n < 2 {
        return Err(Error::domain("exponential identities need at least two samples"));
    }
    let field = p.field();
    let s = p.sigma();
    // [sum d, d^2, d^3, d^4, x1 x2, (x1 x2)^2] with d = x1 - sigma
    let parts = map_chunks(n, seed, |rng, len| {
        let mut acc = [0.0f64; 6];
        for _ in 0..len {
            let pair = crate::sampling::sample_intensity_pair(&field, rng);
            let d = pair.x1 - s;
            let d2 = d * d;
            let m = pair.x1 * pair.x2;
            acc[0] += d;
            acc[1] += d2;
            acc[2] += d2 * d;
            acc[3] += d2 * d2;
            acc[4] += m;
            acc[5] += m * m;
        }
        acc
    });
    let mut acc = [0.0f64; 6];
    for part in &parts {
        for (a, b) in acc.iter_mut().zip(part) {
            *a += b;
        }
    }
    let nf = n as f64;
    let [s1, s2, s3, s4, sm, smm] = acc.map(|v| v / nf);
    let mean_shift = s1;
    // central moments about the sample mean
    let m2 = s2 - mean_shift * mean_shift;
    let m4 = s4 - 4.0 * mean_shift * s3 + 6.0 * mean_shift * mean_shift * s2 - 3.0 * mean_shift.powi(4);
    let var = m2 * nf / (nf - 1.0);
    let mixed_var = (smm - sm * sm) * nf / (nf - 1.0);
    Ok(ExponentialIdentities {
        n,
        mean: Agreement {
            estimate: s + mean_shift,
            expected: s,
            std_error: (var / nf).sqrt(),
        },
        variance: Agreement {
            estimate: var,
            expected: s * s,
            std_error: ((m4 - m2 * m2).max(0.0) / nf).sqrt(),
        },
        mixed: Agreement {
            estimate: sm,
            expected: s * s * (1.0 + p.rho()),
            std_error: (mixed_var / nf).sqrt(),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gp(sigma: f64, rho: f64, k: f64) -> GammaPairParams {
        GammaPairParams::new(sigma, rho, k).unwrap()
    }

    #[test]
    fn moment_table_anchors() {
        let rows = moment_table(&gp(1.0, 0.0, 1.0), &[0, 1], 100_000, SeedSpec::new(1, 0)).unwrap();
        assert_eq!(rows[0].mc_estimate, 1.0);
        assert_eq!(rows[0].mc_std_error, 0.0);
        assert!((rows[0].analytic_f2 - 1.0).abs() < 1e-12);
        assert!(rows[0].mc_consistent);
        assert!((rows[1].analytic_f2 - 0.5).abs() < 1e-12);
        assert!(rows.iter().all(|r| r.formulations_agree));
        let k2 = moment_table(&gp(1.0, 0.0, 2.0), &[1], 1_000, SeedSpec::new(1, 0)).unwrap();
        assert!((k2[0].analytic_f2 - 0.375).abs() < 1e-12);
    }

    #[test]
    fn moment_table_rejects_high_orders_and_real_shape() {
        assert!(moment_table(&gp(1.0, 0.0, 1.0), &[9], 100, SeedSpec::new(1, 0)).is_err());
        assert!(moment_table(&gp(1.0, 0.0, 1.5), &[1], 100, SeedSpec::new(1, 0)).is_err());
    }

    #[test]
    fn ratio_range_is_sensible() {
        let (lo, hi) = default_ratio_range(&gp(1.0, 0.0, 1.0)).unwrap();
        assert_eq!((lo, hi), (0.0, 20.0));
        let (_, hi) = default_ratio_range(&gp(1.0, 0.9, 12.0)).unwrap();
        assert!(hi > 1.0 && hi < 3.0, "{hi}");
    }

    #[test]
    fn histogram_check_detects_wrong_model() {
        let cfg = FitConfig::default();
        let p = gp(1.0, 0.64, 12.0);
        let seed = SeedSpec::new(2024, 0);
        let good = histogram_check(&p, Quantity::Ndr, 200_000, 100, seed, &cfg, Perturbation(0.0)).unwrap();
        assert!(good.report.pass, "{:?}", good.report);
        let bad = histogram_check(&p, Quantity::Ndr, 200_000, 100, seed, &cfg, Perturbation(0.3)).unwrap();
        assert!(!bad.report.pass);
    }

    #[test]
    fn uniform_pdf_against_k12_fails() {
        let p = gp(1.0, 0.64, 12.0);
        let h = histogram_check(&p, Quantity::Ndr, 100_000, 100, SeedSpec::new(3, 0), &FitConfig::default(), Perturbation(0.0))
            .unwrap()
            .histogram;
        let r = compare_to_pdf(&h, |_| Ok(1.0), &FitConfig::default()).unwrap();
        assert!(!r.pass);
    }

    #[test]
    fn exponential_identities_hold() {
        let r = exponential_identities(&gp(2.88, 0.64, 1.0), 200_000, SeedSpec::new(5, 0)).unwrap();
        assert!(r.max_z_score() < 5.0, "{r:?}");
        assert!(exponential_identities(&gp(2.88, 0.64, 2.0), 10, SeedSpec::new(5, 0)).is_err());
    }

    #[test]
    fn independent_joint_grid_factorizes() {
        let p = gp(2.88, 0.0, 3.0);
        for &(x1, x2) in &[(0.5, 1.0), (4.0, 9.0), (12.0, 2.0)] {
            let joint = joint_pdf(&p, x1, x2).unwrap();
            let prod = gamma_marginal_pdf(&p, x1).unwrap() * gamma_marginal_pdf(&p, x2).unwrap();
            assert!(((joint - prod) / prod).abs() < 1e-10);
        }
    }
}

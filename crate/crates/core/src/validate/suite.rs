//! The full validation suite: every check named, with its statistic and
//! threshold, and an overall verdict.

use serde::Serialize;

use super::checks::{
    analytic_moments, exponential_identities, formulation_spread, histogram_check, joint_density_check,
    moment_table, ndr_ks_check, Perturbation, Quantity, FORMULATION_REL_TOL,
};
use super::figures::{default_rho_z_grid, figure_corr_curve};
use super::fit::FitConfig;
use crate::dist::{FieldParams, GammaPairParams};
use crate::error::Result;
use crate::sampling::SeedSpec;

/// Parameter grid of the histogram fits.
pub const FIT_K: [f64; 3] = [1.0, 2.0, 12.0];
pub const FIT_RHO: [f64; 4] = [0.0, 0.3, 0.64, 0.9];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SuiteConfig {
    pub quick: bool,
    /// samples per 1-D check, correlation point and moment table
    pub n: usize,
    /// samples per 2-D joint-density check
    pub n_joint: usize,
    pub bins: usize,
    pub bins_2d: usize,
    pub seed: u64,
    /// tilt applied to every analytic density in the fits
    pub perturb: f64,
    /// bound on |empirical correlation - rho_z^2|
    pub corr_tolerance: f64,
    /// field parameters of the correlation curve and joint checks
    pub sigma_z: f64,
    pub rho_z: f64,
}

impl SuiteConfig {
    pub fn full() -> Self {
        Self {
            quick: false,
            n: 1_000_000,
            n_joint: 10_000_000,
            bins: super::checks::DEFAULT_BINS,
            bins_2d: super::checks::DEFAULT_BINS_2D,
            seed: 20_240_601,
            perturb: 0.0,
            corr_tolerance: 0.01,
            sigma_z: 0.7,
            rho_z: 0.8,
        }
    }

    /// `N = 1e5` everywhere, with the correlation bound widened to match.
    pub fn quick() -> Self {
        Self {
            quick: true,
            n: 100_000,
            n_joint: 100_000,
            bins_2d: 20,
            corr_tolerance: 0.03,
            ..Self::full()
        }
    }
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self::full()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    pub statistic: f64,
    pub threshold: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub config: SuiteConfig,
    pub checks: Vec<CheckResult>,
    pub pass: bool,
}

impl SuiteReport {
    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

fn fit_name(kind: &str, k: f64, rho: f64) -> String {
    format!("{kind}_fit[k={k},rho={rho}]")
}

/// Runs every check. Each check draws from its own stream of `cfg.seed`, so
/// results do not depend on which other checks ran.
pub fn run_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let fit = FitConfig::default();
    let tilt = Perturbation(cfg.perturb);
    let seed = |stream: u64| SeedSpec::new(cfg.seed, stream);
    let mut checks = Vec::new();

    // correlation curve, streams 0..10
    let curve = figure_corr_curve(&default_rho_z_grid(), cfg.sigma_z, cfg.n, seed(0))?;
    let worst = curve.rows.iter().map(|r| (r[1] - r[2]).abs()).fold(0.0, f64::max);
    checks.push(CheckResult {
        name: "correlation_curve".into(),
        pass: worst <= cfg.corr_tolerance,
        statistic: worst,
        threshold: cfg.corr_tolerance,
        detail: "max |empirical corr - rho_z^2| over rho_z = 0..0.9".into(),
    });

    // histogram fits, streams 100..
    let mut stream = 100;
    for &k in &FIT_K {
        for &rho in &FIT_RHO {
            let p = GammaPairParams::new(1.0, rho, k)?;
            for (label, q) in [("ratio", Quantity::Ratio), ("ndr", Quantity::Ndr)] {
                let c = histogram_check(&p, q, cfg.n, cfg.bins, seed(stream), &fit, tilt)?;
                stream += 1;
                checks.push(CheckResult {
                    name: fit_name(label, k, rho),
                    pass: c.report.pass,
                    statistic: c.report.chi2_stat,
                    threshold: c.report.critical_value,
                    detail: format!("chi-square, dof {}, p {:.4}", c.report.dof, c.report.p_value),
                });
            }
        }
    }

    // joint densities at the field parameters, streams 200..
    let field = FieldParams::new(cfg.sigma_z, cfg.rho_z)?;
    for (i, k) in [1.0, 12.0].into_iter().enumerate() {
        let p = field.gamma_pair(k)?;
        let c = joint_density_check(&p, cfg.bins_2d, None, cfg.n_joint, seed(200 + i as u64), &fit, tilt)?;
        checks.push(CheckResult {
            name: format!("joint_fit[k={k}]"),
            pass: c.report.pass,
            statistic: c.report.chi2_stat,
            threshold: c.report.critical_value,
            detail: format!("2-D chi-square, dof {}, p {:.4}", c.report.dof, c.report.p_value),
        });
    }

    // Monte-Carlo moments, streams 300..
    for (i, (k, rho)) in [(1.0, 0.0), (12.0, 0.64)].into_iter().enumerate() {
        let p = GammaPairParams::new(1.0, rho, k)?;
        let rows = moment_table(&p, &[0, 1, 2, 3, 4], cfg.n, seed(300 + i as u64))?;
        let worst = rows
            .iter()
            .filter(|r| r.mc_std_error > 0.0)
            .map(|r| (r.mc_estimate - r.analytic_f2).abs() / r.mc_std_error)
            .fold(0.0, f64::max);
        checks.push(CheckResult {
            name: format!("moment_table[k={k},rho={rho}]"),
            pass: rows.iter().all(|r| r.mc_consistent && r.formulations_agree),
            statistic: worst,
            threshold: 4.0,
            detail: "max |mc - analytic| / standard error over m = 0..4".into(),
        });
    }

    // formulation equivalence over the closed-form grid
    let mut spread: f64 = 0.0;
    for k in 1..=10 {
        for j in 0..=19 {
            let p = GammaPairParams::new(1.0, f64::from(j) * 0.05, f64::from(k))?;
            for m in 0..=4 {
                spread = spread.max(formulation_spread(analytic_moments(&p, m)?));
            }
        }
    }
    checks.push(CheckResult {
        name: "formulation_equivalence".into(),
        pass: spread <= FORMULATION_REL_TOL,
        statistic: spread,
        threshold: FORMULATION_REL_TOL,
        detail: "max pairwise relative difference, k = 1..10, m = 0..4, rho = 0..0.95".into(),
    });

    let ks = ndr_ks_check(&GammaPairParams::new(1.0, 0.0, 1.0)?, cfg.n, seed(400))?;
    checks.push(CheckResult {
        name: "uniform_ks".into(),
        pass: ks.pass,
        statistic: ks.statistic,
        threshold: ks.critical_value,
        detail: "KS distance of D (k = 1, rho = 0) to the uniform law".into(),
    });

    let ex = exponential_identities(&field.gamma_pair(1.0)?, cfg.n, seed(401))?;
    checks.push(CheckResult {
        name: "exponential_identities".into(),
        pass: ex.max_z_score() <= 5.0,
        statistic: ex.max_z_score(),
        threshold: 5.0,
        detail: "mean, variance and mixed moment of k = 1 intensities, in standard errors".into(),
    });

    let pass = checks.iter().all(|c| c.pass);
    Ok(SuiteReport {
        config: *cfg,
        checks,
        pass,
    })
}

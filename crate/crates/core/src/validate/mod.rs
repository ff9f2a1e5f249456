//! Monte-Carlo validation: histograms, goodness of fit, moment tables, the
//! figure tables and the full suite.

pub mod checks;
pub mod figures;
pub mod fit;
pub mod histogram;
pub mod stats;
pub mod suite;

pub use checks::{
    exponential_identities, histogram_check, joint_density_check, moment_table, ndr_ks_check, MomentReport,
    Perturbation, Quantity,
};
pub use figures::{figure_corr_curve, figure_moments_vs_k, figure_ndr_vs_rho, Table};
pub use fit::{compare_to_pdf, compare_to_pdf_2d, FitConfig, FitReport};
pub use histogram::{build_histogram, BinCounter, BinCounter2D, Histogram, Histogram2D};
pub use stats::{empirical_correlation, PairStats};
pub use suite::{run_suite, CheckResult, SuiteConfig, SuiteReport};

//! High-frequency ergodicity and Gaussianity diagnostics: weights and
//! functionals of the reduced trispectrum, the variance of the normalized
//! quadratic spectrum estimator, bounds, and scans over power-exponential
//! spectra.

mod scan;
mod trispectrum;
mod variance;
mod zeta;

pub use scan::{diagnose, phase_scan, ConvergenceRule, DiagnosticRecord, DiagnosticReport, ScanPoint, Verdict};
pub use trispectrum::{
    hfe_functional, hfg_functional, reduced_trispectrum_transform, transform_matrix, weights_w1, weights_w2,
    TrispectrumDiag,
};
pub use variance::{
    final_lemma_lower_bound, fourth_moment_tv_bound, gaussian_baselines, hfe_variance_q2, hfg_markov_ratio,
    sandwich_q2, GaussianBaselines, HfeVariance, Sandwich,
};
pub use zeta::riemann_zeta;

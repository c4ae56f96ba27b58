//! Seeded Monte Carlo experiments: Gaussian, squared-Gaussian,
//! counterexample and completely random coefficient arrays, their empirical
//! spectra, and cumulant estimates against analytic targets.
//!
//! Replicate `i` of a run draws from its own ChaCha stream (see
//! [`replicate_rng`]) and results are reduced in replicate order, so output
//! does not depend on the number of worker threads.

mod samplers;
mod stats;

pub use samplers::{
    completely_random_with, counterexample_spectrum, counterexample_with, gaussian_coeffs_with, replicate_rng,
    sample_completely_random, sample_counterexample, sample_gaussian_coeffs, CompletelyRandomDraw,
    COUNTEREXAMPLE_LMAX,
};
pub use stats::{estimate_cumulants, ks_standard_normal, CumulantEstimate};

use crate::coeffs::CoefficientSet;
use crate::diagnostics::hfe_variance_q2;
use crate::error::{Error, Result};
use crate::format::{fmt_f64, fmt_opt};
use crate::spectrum::PowerSpectrum;
use crate::subordination::{c_l_q2, GauntPlan};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use stats::mean_with_se;
use std::io::Write;

/// Empirical spectrum `C^_l = sum_m |a_lm|^2 / (2l+1)`, optionally with the
/// ratio `C~_l = C^_l / C_l` against a known spectrum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEstimate {
    pub values: Vec<f64>,
    pub normalized: Option<Vec<f64>>,
}

pub fn empirical_spectrum(coeffs: &CoefficientSet) -> SpectrumEstimate {
    let values = (0..=coeffs.lmax()).map(|l| coeffs.power(l) / (2 * l + 1) as f64).collect();
    SpectrumEstimate { values, normalized: None }
}

impl SpectrumEstimate {
    /// Adds `C~_l` for every `l` covered by both; entries with `C_l = 0` are NaN.
    pub fn with_truth(mut self, truth: &PowerSpectrum) -> Self {
        let n = self.values.len().min(truth.values().len());
        self.normalized = Some(self.values[..n].iter().zip(truth.values()).map(|(e, t)| e / t).collect());
        self
    }
}

/// `sqrt((2l+1)/2) (C^_l / C_l - 1)`.
pub fn clt_statistic(est: &SpectrumEstimate, truth: &PowerSpectrum, l: u32) -> Result<f64> {
    let (Some(&e), Some(&t)) = (est.values.get(l as usize), truth.values().get(l as usize)) else {
        return Err(Error::InvalidArgument(format!("multipole {l} not covered")));
    };
    if !(t > 0.0) {
        return Err(Error::Degenerate(format!("C_{l} = {t} cannot normalize the estimate")));
    }
    Ok(((2 * l + 1) as f64 / 2.0).sqrt() * (e / t - 1.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Gaussian,
    Quadratic,
    Counterexample,
    CompletelyRandom,
}

impl ExperimentKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentKind::Gaussian => "gaussian",
            ExperimentKind::Quadratic => "quadratic",
            ExperimentKind::Counterexample => "counterexample",
            ExperimentKind::CompletelyRandom => "completely_random",
        }
    }
}

impl std::str::FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "gaussian" => Ok(ExperimentKind::Gaussian),
            "quadratic" => Ok(ExperimentKind::Quadratic),
            "counterexample" => Ok(ExperimentKind::Counterexample),
            "completely_random" => Ok(ExperimentKind::CompletelyRandom),
            _ => Err(Error::Parse(format!("unknown experiment kind `{s}`"))),
        }
    }
}

/// `base` is required except for the counterexample, whose spectrum is fixed.
/// `lmax_out` applies to the quadratic experiment and defaults to the largest
/// reported multipole.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McRunConfig {
    pub kind: ExperimentKind,
    pub base: Option<PowerSpectrum>,
    pub lmax_in: u32,
    pub lmax_out: Option<u32>,
    pub ls: Vec<u32>,
    pub replicates: usize,
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Targets {
    pub variance: Option<f64>,
    pub clt_cum4: Option<f64>,
    pub second_moment: Option<f64>,
    /// `[leading, leading + 4/(2l+1)]` for the squared field.
    pub bracket: Option<[f64; 2]>,
}

/// Per-multipole summary. `component` is the standardized `a_l0`, i.e. the
/// frequency component at the north pole divided by its standard deviation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LSummary {
    pub l: u32,
    pub truth: f64,
    pub mean_estimate: f64,
    /// Sample mean of `(C~_l - 1)^2`.
    pub second_moment: f64,
    pub second_moment_se: Option<f64>,
    pub ctilde: Option<CumulantEstimate>,
    pub clt: Option<CumulantEstimate>,
    pub clt_ks: f64,
    pub component: Option<CumulantEstimate>,
    pub component_ks: f64,
    pub targets: Targets,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McRunResult {
    pub config: McRunConfig,
    pub summaries: Vec<LSummary>,
}

struct Prepared {
    base: Option<PowerSpectrum>,
    truths: Vec<f64>,
    targets: Vec<Targets>,
    plan: Option<GauntPlan>,
    lmax_out: u32,
}

fn truncate(base: &PowerSpectrum, lmax: u32) -> Result<PowerSpectrum> {
    if lmax > base.lmax() {
        return Err(Error::InvalidArgument(format!("lmax_in = {lmax} exceeds spectrum lmax {}", base.lmax())));
    }
    PowerSpectrum::from_table(base.values()[..=lmax as usize].to_vec())
}

fn prepare(cfg: &McRunConfig) -> Result<Prepared> {
    if cfg.replicates == 0 {
        return Err(Error::InvalidArgument("at least one replicate is required".into()));
    }
    if cfg.ls.is_empty() {
        return Err(Error::InvalidArgument("no multipoles requested".into()));
    }
    let lmax_ls = *cfg.ls.iter().max().unwrap();
    let need_base = || {
        cfg.base
            .as_ref()
            .ok_or_else(|| Error::InvalidArgument(format!("{} experiment needs a base spectrum", cfg.kind.as_str())))
    };
    let nl = |l: u32| (2 * l + 1) as f64;
    let mut plan = None;
    let mut lmax_out = lmax_ls;
    let (base, truths, targets) = match cfg.kind {
        ExperimentKind::Gaussian | ExperimentKind::CompletelyRandom => {
            let b = need_base()?;
            let b = if cfg.kind == ExperimentKind::Gaussian { truncate(b, cfg.lmax_in)? } else { b.clone() };
            if lmax_ls > b.lmax() {
                return Err(Error::InvalidArgument(format!("multipole {lmax_ls} beyond lmax {}", b.lmax())));
            }
            let truths: Vec<f64> = cfg.ls.iter().map(|&l| b.get(l)).collect();
            let targets = cfg
                .ls
                .iter()
                .map(|&l| match cfg.kind {
                    ExperimentKind::Gaussian => Targets {
                        variance: Some(2.0 / nl(l)),
                        clt_cum4: Some(12.0 / nl(l)),
                        second_moment: Some(2.0 / nl(l)),
                        bracket: None,
                    },
                    _ => Targets { second_moment: Some(0.0), ..Default::default() },
                })
                .collect();
            (Some(b), truths, targets)
        }
        ExperimentKind::Quadratic => {
            let b = truncate(need_base()?, cfg.lmax_in)?;
            lmax_out = cfg.lmax_out.unwrap_or(lmax_ls);
            if lmax_out > 2 * cfg.lmax_in || lmax_ls > lmax_out {
                return Err(Error::InvalidArgument(format!(
                    "need max(ls) = {lmax_ls} <= lmax_out = {lmax_out} <= 2 lmax_in = {}",
                    2 * cfg.lmax_in
                )));
            }
            let truths: Vec<f64> = cfg.ls.iter().map(|&l| c_l_q2(&b, l).value).collect();
            let targets = cfg
                .ls
                .iter()
                .map(|&l| {
                    let h = hfe_variance_q2(&b, l)?;
                    Ok(Targets { bracket: Some([h.leading, h.leading + h.r_upper]), ..Default::default() })
                })
                .collect::<Result<_>>()?;
            plan = Some(GauntPlan::new(cfg.lmax_in, &cfg.ls)?);
            (Some(b), truths, targets)
        }
        ExperimentKind::Counterexample => {
            let b = counterexample_spectrum(cfg.lmax_in)?;
            if lmax_ls > cfg.lmax_in {
                return Err(Error::InvalidArgument(format!("multipole {lmax_ls} beyond lmax_in {}", cfg.lmax_in)));
            }
            let truths = cfg.ls.iter().map(|&l| b.get(l)).collect();
            let targets = cfg.ls.iter().map(|_| Targets { second_moment: Some(0.0), ..Default::default() }).collect();
            (Some(b), truths, targets)
        }
    };
    if let Some((l, t)) = cfg.ls.iter().zip(&truths).find(|(_, t)| !(**t > 0.0)) {
        return Err(Error::Degenerate(format!("target spectrum at l = {l} is {t}")));
    }
    Ok(Prepared { base, truths, targets, plan, lmax_out })
}

/// `(C~_l, standardized a_l0)` for every requested `l` in one replicate.
fn replicate(cfg: &McRunConfig, prep: &Prepared, index: u64) -> Result<Vec<(f64, f64)>> {
    let mut rng = replicate_rng(cfg.seed, index);
    let from_coeffs = |c: &CoefficientSet| -> Vec<(f64, f64)> {
        cfg.ls
            .iter()
            .zip(&prep.truths)
            .map(|(&l, &t)| (c.power(l) / (2 * l + 1) as f64 / t, c.get(l, 0).re / t.sqrt()))
            .collect()
    };
    match cfg.kind {
        ExperimentKind::Gaussian => {
            let c = gaussian_coeffs_with(prep.base.as_ref().unwrap(), cfg.lmax_in, &mut rng)?;
            Ok(from_coeffs(&c))
        }
        ExperimentKind::Quadratic => {
            let c = gaussian_coeffs_with(prep.base.as_ref().unwrap(), cfg.lmax_in, &mut rng)?;
            let sq = prep.plan.as_ref().unwrap().apply(&c, prep.lmax_out)?;
            Ok(from_coeffs(&sq))
        }
        ExperimentKind::Counterexample => {
            let c = counterexample_with(cfg.lmax_in, &mut rng)?;
            Ok(from_coeffs(&c))
        }
        ExperimentKind::CompletelyRandom => cfg
            .ls
            .iter()
            .zip(&prep.truths)
            .map(|(&l, &t)| {
                let d = completely_random_with(l, t, &mut rng)?;
                let p = d.coeffs[0].norm_sqr() + 2.0 * d.coeffs[1..].iter().map(|z| z.norm_sqr()).sum::<f64>();
                Ok((p / (2 * l + 1) as f64 / t, d.coeffs[0].re / t.sqrt()))
            })
            .collect(),
    }
}

fn optional_cumulants(xs: &[f64]) -> Result<Option<CumulantEstimate>> {
    match estimate_cumulants(xs) {
        Ok(e) => Ok(Some(e)),
        Err(Error::InsufficientSamples { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Runs any experiment kind. Replicates run in parallel on the current rayon
/// pool; each summary is computed from replicate-ordered samples.
pub fn run_experiment(cfg: &McRunConfig) -> Result<McRunResult> {
    let prep = prepare(cfg)?;
    let draws: Vec<Vec<(f64, f64)>> = (0..cfg.replicates as u64)
        .into_par_iter()
        .map(|i| replicate(cfg, &prep, i))
        .collect::<Result<_>>()?;
    let summaries = cfg
        .ls
        .iter()
        .enumerate()
        .map(|(k, &l)| {
            let ct: Vec<f64> = draws.iter().map(|d| d[k].0).collect();
            let comp: Vec<f64> = draws.iter().map(|d| d[k].1).collect();
            let scale = ((2 * l + 1) as f64 / 2.0).sqrt();
            let clt: Vec<f64> = ct.iter().map(|x| scale * (x - 1.0)).collect();
            let dev: Vec<f64> = ct.iter().map(|x| (x - 1.0).powi(2)).collect();
            let (second_moment, second_moment_se) = mean_with_se(&dev);
            let truth = prep.truths[k];
            Ok(LSummary {
                l,
                truth,
                mean_estimate: truth * ct.iter().sum::<f64>() / ct.len() as f64,
                second_moment,
                second_moment_se,
                ctilde: optional_cumulants(&ct)?,
                clt: optional_cumulants(&clt)?,
                clt_ks: ks_standard_normal(&clt)?,
                component: optional_cumulants(&comp)?,
                component_ks: ks_standard_normal(&comp)?,
                targets: prep.targets[k],
            })
        })
        .collect::<Result<_>>()?;
    Ok(McRunResult { config: cfg.clone(), summaries })
}

fn run_kind(cfg: &McRunConfig, kind: ExperimentKind) -> Result<McRunResult> {
    if cfg.kind != kind {
        return Err(Error::InvalidArgument(format!(
            "expected a {} configuration, got {}",
            kind.as_str(),
            cfg.kind.as_str()
        )));
    }
    run_experiment(cfg)
}

pub fn run_gaussian_experiment(cfg: &McRunConfig) -> Result<McRunResult> {
    run_kind(cfg, ExperimentKind::Gaussian)
}

pub fn run_quadratic_experiment(cfg: &McRunConfig) -> Result<McRunResult> {
    run_kind(cfg, ExperimentKind::Quadratic)
}

pub fn run_counterexample_experiment(cfg: &McRunConfig) -> Result<McRunResult> {
    run_kind(cfg, ExperimentKind::Counterexample)
}

pub fn run_completely_random_experiment(cfg: &McRunConfig) -> Result<McRunResult> {
    run_kind(cfg, ExperimentKind::CompletelyRandom)
}

impl McRunResult {
    /// Per-multipole summary; empty cells mark quantities that are undefined
    /// for the sample size. The seed and replicate count close the file as a
    /// comment line.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(
            w,
            "l,truth,mean_estimate,second_moment,second_moment_se,var_ctilde,var_ctilde_se,\
             cum4_ctilde,cum4_ctilde_se,clt_var,clt_var_se,clt_skewness,clt_kurtosis,clt_cum4,clt_cum4_se,clt_ks,\
             component_kurtosis,component_kurtosis_se,component_ks,\
             target_variance,target_clt_cum4,target_second_moment,bracket_lower,bracket_upper"
        )?;
        for s in &self.summaries {
            let ct = s.ctilde.as_ref();
            let clt = s.clt.as_ref();
            let comp = s.component.as_ref();
            let cells = [
                s.l.to_string(),
                fmt_f64(s.truth),
                fmt_f64(s.mean_estimate),
                fmt_f64(s.second_moment),
                fmt_opt(s.second_moment_se),
                fmt_opt(ct.map(|e| e.variance)),
                fmt_opt(ct.map(|e| e.se_variance)),
                fmt_opt(ct.map(|e| e.cum4)),
                fmt_opt(ct.and_then(|e| e.se_cum4)),
                fmt_opt(clt.map(|e| e.variance)),
                fmt_opt(clt.map(|e| e.se_variance)),
                fmt_opt(clt.and_then(|e| e.skewness)),
                fmt_opt(clt.and_then(|e| e.kurtosis)),
                fmt_opt(clt.map(|e| e.cum4)),
                fmt_opt(clt.and_then(|e| e.se_cum4)),
                fmt_f64(s.clt_ks),
                fmt_opt(comp.and_then(|e| e.kurtosis)),
                fmt_opt(comp.and_then(|e| e.se_kurtosis)),
                fmt_f64(s.component_ks),
                fmt_opt(s.targets.variance),
                fmt_opt(s.targets.clt_cum4),
                fmt_opt(s.targets.second_moment),
                fmt_opt(s.targets.bracket.map(|b| b[0])),
                fmt_opt(s.targets.bracket.map(|b| b[1])),
            ];
            writeln!(w, "{}", cells.join(","))?;
        }
        writeln!(w, "# kind={} seed={} replicates={}", self.config.kind.as_str(), self.config.seed, self.config.replicates)?;
        Ok(())
    }
}

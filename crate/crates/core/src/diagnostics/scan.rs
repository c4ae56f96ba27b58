use super::variance::{
    final_lemma_lower_bound, gaussian_baselines, hfe_variance_q2, hfg_markov_ratio, sandwich_q2,
};
use crate::error::{Error, Result};
use crate::format::{fmt_f64, fmt_opt};
use crate::spectrum::{make_class_d, ClassDParams, PowerSpectrum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::Write;

/// Finite-`l` decision rule for "the leading term tends to zero": the
/// least-squares slope of `log(leading)` against `log(l)` must be below
/// `max_slope`, and the value at the last `l` below `terminal_factor` times
/// the Gaussian baseline `2/(2l+1)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRule {
    pub max_slope: f64,
    pub terminal_factor: f64,
}

impl Default for ConvergenceRule {
    fn default() -> Self {
        ConvergenceRule { max_slope: -0.5, terminal_factor: 10.0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Converging,
    NonConverging,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Converging => "converging",
            Verdict::NonConverging => "non_converging",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticRecord {
    pub l: u32,
    pub c_l2: f64,
    pub c_l2_tail_bound: Option<f64>,
    /// Filled only when a trispectrum is supplied.
    pub hfg_functional: Option<f64>,
    pub hfe_functional: Option<f64>,
    pub hfe_leading: f64,
    pub r_lower: f64,
    pub r_upper: f64,
    pub sandwich_lower: Option<f64>,
    pub sandwich_upper: Option<f64>,
    pub markov_ratio: f64,
    pub gauss_var: f64,
    pub tv_bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub params: Option<ClassDParams>,
    pub records: Vec<DiagnosticRecord>,
    pub slope: f64,
    pub verdict: Verdict,
    pub final_lemma_lower: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticReport {
    pub rule: ConvergenceRule,
    pub points: Vec<ScanPoint>,
}

fn log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

fn record(base: &PowerSpectrum, l: u32) -> Result<DiagnosticRecord> {
    let h = hfe_variance_q2(base, l)?;
    let g = gaussian_baselines(l);
    let sandwich = match base.class_d() {
        Some(p) if p.beta == 0.0 => Some(sandwich_q2(p, l)?),
        _ => None,
    };
    Ok(DiagnosticRecord {
        l,
        c_l2: h.c_l2,
        c_l2_tail_bound: h.tail_bound,
        hfg_functional: None,
        hfe_functional: None,
        hfe_leading: h.leading,
        r_lower: h.r_lower,
        r_upper: h.r_upper,
        sandwich_lower: sandwich.map(|s| s.lower),
        sandwich_upper: sandwich.map(|s| s.upper),
        markov_ratio: hfg_markov_ratio(base, l)?,
        gauss_var: g.variance,
        tv_bound: g.tv_bound,
    })
}

/// Diagnostics of one spectrum over `ls`, classified by `rule`.
pub fn diagnose(base: &PowerSpectrum, ls: &[u32], rule: &ConvergenceRule) -> Result<ScanPoint> {
    if ls.is_empty() {
        return Err(Error::InvalidArgument("empty multipole range".into()));
    }
    let records: Vec<DiagnosticRecord> = ls.par_iter().map(|&l| record(base, l)).collect::<Result<_>>()?;
    let xs: Vec<f64> = records.iter().map(|r| r.l as f64).collect();
    let ys: Vec<f64> = records.iter().map(|r| r.hfe_leading).collect();
    let slope = log_slope(&xs, &ys);
    let last = records.last().unwrap();
    let converging = slope < rule.max_slope && last.hfe_leading < rule.terminal_factor * last.gauss_var;
    let final_lemma_lower = match base.class_d() {
        Some(p) if p.beta == 0.0 => Some(final_lemma_lower_bound(p)?),
        _ => None,
    };
    Ok(ScanPoint {
        params: base.class_d().copied(),
        records,
        slope,
        verdict: if converging { Verdict::Converging } else { Verdict::NonConverging },
        final_lemma_lower,
    })
}

/// Runs [`diagnose`] on the power-exponential spectrum of every grid point.
/// Output order follows the grid.
pub fn phase_scan(grid: &[ClassDParams], ls: &[u32], rule: &ConvergenceRule) -> Result<DiagnosticReport> {
    let points = grid
        .par_iter()
        .map(|p| diagnose(&make_class_d(*p)?, ls, rule))
        .collect::<Result<_>>()?;
    Ok(DiagnosticReport { rule: *rule, points })
}

impl DiagnosticReport {
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "alpha,beta,l,hfe_leading,r_upper,markov_ratio,gauss_var,tv_bound,verdict")?;
        for p in &self.points {
            let alpha = fmt_opt(p.params.map(|q| q.alpha));
            let beta = fmt_opt(p.params.map(|q| q.beta));
            for r in &p.records {
                writeln!(
                    w,
                    "{alpha},{beta},{},{},{},{},{},{},{}",
                    r.l,
                    fmt_f64(r.hfe_leading),
                    fmt_f64(r.r_upper),
                    fmt_f64(r.markov_ratio),
                    fmt_f64(r.gauss_var),
                    fmt_f64(r.tv_bound),
                    p.verdict.as_str()
                )?;
            }
        }
        Ok(())
    }
}

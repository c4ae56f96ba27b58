use super::zeta::riemann_zeta;
use crate::error::{Error, Result};
use crate::spectrum::{ClassDParams, PowerSpectrum};
use crate::subordination::c_l_q2;
use crate::wigner::three_j_row_uncached;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianBaselines {
    pub variance: f64,
    pub cum4: f64,
    pub tv_bound: f64,
}

/// Closed forms for a Gaussian field at multipole `l`: `Var(C~_l)`, the
/// fourth cumulant of the normalized statistic, and the total-variation bound.
pub fn gaussian_baselines(l: u32) -> GaussianBaselines {
    let n = (2 * l + 1) as f64;
    GaussianBaselines { variance: 2.0 / n, cum4: 12.0 / n, tv_bound: (8.0 / n).sqrt() }
}

/// `2 sqrt((q-1)/(3q)) sqrt(cum4)`.
pub fn fourth_moment_tv_bound(cum4: f64, q: usize) -> Result<f64> {
    if !(cum4 >= 0.0) {
        return Err(Error::InvalidArgument(format!("fourth cumulant must be nonnegative, got {cum4}")));
    }
    if q < 2 {
        return Err(Error::InvalidArgument(format!("chaos order must be at least 2, got {q}")));
    }
    let qf = q as f64;
    Ok(2.0 * ((qf - 1.0) / (3.0 * qf)).sqrt() * cum4.sqrt())
}

/// Leading term of `E(C~_{l;2} - 1)^2` and the bracket for the remainder.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HfeVariance {
    pub leading: f64,
    pub r_lower: f64,
    pub r_upper: f64,
    pub c_l2: f64,
    pub tail_bound: Option<f64>,
}

/// `inner[l1] = sum_{l2} C_{l2} (2l2+1) 3j(l1 l2 l; 0 0 0)^2`.
fn inner_sums(c: &[f64], l: u32) -> Vec<f64> {
    let lmax = c.len() as u32 - 1;
    (0..=lmax)
        .map(|l1| {
            let row = three_j_row_uncached(l1, l, 0, 0);
            let hi = (l1 + l).min(lmax);
            let mut s = 0.0;
            let mut l2 = l1.abs_diff(l);
            while l2 <= hi {
                let w = row.get(l2);
                s += c[l2 as usize] * (2 * l2 + 1) as f64 * w * w;
                l2 += 2;
            }
            s
        })
        .collect()
}

/// `16 / C_{l;2}^2 sum C_{l1}^2 C_{l2} C_{l3} 3j(l1 l2 l)^2 3j(l1 l3 l)^2
/// (2l1+1)(2l2+1)(2l3+1) / (4pi)^2`, with `R(l)` bracketed by `[0, 4/(2l+1)]`.
pub fn hfe_variance_q2(base: &PowerSpectrum, l: u32) -> Result<HfeVariance> {
    let c2 = c_l_q2(base, l);
    if !(c2.value > 0.0) {
        return Err(Error::Degenerate(format!("C_{{{l};2}} vanishes for this spectrum")));
    }
    let c = base.values();
    let inner = inner_sums(c, l);
    let s: f64 = inner
        .iter()
        .enumerate()
        .map(|(l1, i)| c[l1] * c[l1] * (2 * l1 + 1) as f64 * i * i)
        .sum();
    let leading = 16.0 * s / (4.0 * PI).powi(2) / (c2.value * c2.value);
    Ok(HfeVariance {
        leading,
        r_lower: 0.0,
        r_upper: 4.0 / (2 * l + 1) as f64,
        c_l2: c2.value,
        tail_bound: c2.tail_bound,
    })
}

/// `sup_{l1} sum_{l3} G_{l1} G_{l3} (C^{l0}_{l1 0 l3 0})^2` over the full
/// double sum, with `G_l = (2l+1) C_l`.
pub fn hfg_markov_ratio(base: &PowerSpectrum, l: u32) -> Result<f64> {
    let c = base.values();
    let gamma: Vec<f64> = c.iter().enumerate().map(|(k, v)| (2 * k + 1) as f64 * v).collect();
    // the (2l+1) in (C^{l0})^2 cancels between numerator and denominator
    let inner = inner_sums(c, l);
    let rows: Vec<f64> = gamma.iter().zip(&inner).map(|(g, i)| g * i).collect();
    let total: f64 = rows.iter().sum();
    if !(total > 0.0) {
        return Err(Error::Degenerate(format!("Markov ratio denominator vanishes at l = {l}")));
    }
    let sup = rows.iter().cloned().fold(0.0, f64::max);
    Ok(sup / total)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sandwich {
    pub lower: f64,
    pub upper: f64,
}

/// Bounds on `C_{l;2}` for `beta = 0`:
/// `lower = 3 2^alpha / 4pi * C_l * c`,
/// `upper = c / pi * (2 zeta(alpha-1) + zeta(alpha)) * C_{floor(l/2)}`.
pub fn sandwich_q2(params: &ClassDParams, l: u32) -> Result<Sandwich> {
    params.validate()?;
    if params.beta != 0.0 {
        return Err(Error::InvalidArgument(format!("sandwich bounds need beta = 0, got {}", params.beta)));
    }
    let (a, c) = (params.alpha, params.c);
    let lower = 3.0 * 2f64.powf(a) / (4.0 * PI) * params.value(l) * c;
    let z = 2.0 * riemann_zeta(a - 1.0)? + riemann_zeta(a)?;
    let upper = c / PI * z * params.value(l / 2);
    Ok(Sandwich { lower, upper })
}

/// Large-`l` floor for the leading term when `beta = 0`:
/// `C_2^2 {(c / 2pi)(2 zeta(alpha-1) + zeta(alpha)) 2^alpha}^-2`.
pub fn final_lemma_lower_bound(params: &ClassDParams) -> Result<f64> {
    params.validate()?;
    if params.beta != 0.0 {
        return Err(Error::InvalidArgument(format!("the floor applies only to beta = 0, got {}", params.beta)));
    }
    let a = params.alpha;
    let z = 2.0 * riemann_zeta(a - 1.0)? + riemann_zeta(a)?;
    let k = params.c / (2.0 * PI) * z * 2f64.powf(a);
    Ok(params.value(2).powi(2) / (k * k))
}

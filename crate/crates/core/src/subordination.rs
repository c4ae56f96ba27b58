//! Hermite polynomials of a Gaussian field: spectra of `H_q(T)` and the
//! harmonic coefficients of `H_2(T) = T^2 - 1`.

use crate::coeffs::CoefficientSet;
use crate::error::{Error, Result};
use crate::format::{fmt_f64, fmt_opt};
use crate::spectrum::PowerSpectrum;
use crate::wigner::{cg_convolution, three_j_row_uncached, CgConvolutionPath};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::io::Write;

/// Probabilists' Hermite polynomial `H_q(x)`.
pub fn hermite(q: usize, x: f64) -> f64 {
    let (mut h0, mut h1) = (1.0, x);
    if q == 0 {
        return h0;
    }
    for k in 1..q {
        let h2 = x * h1 - k as f64 * h0;
        h0 = h1;
        h1 = h2;
    }
    h1
}

fn factorial(q: usize) -> f64 {
    (1..=q).map(|k| k as f64).product()
}

/// A truncated infinite sum and, when the base spectrum has a model, a bound
/// on the omitted part.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Truncated {
    pub value: f64,
    pub tail_bound: Option<f64>,
}

/// Bound on what the multipoles above the truncation can add to `C_{l;q}`.
fn order_tail_bound(base: &PowerSpectrum, l: u32, q: usize) -> Option<f64> {
    let v = base.tail_bound()?;
    let s = base.total_variance();
    let qf = factorial(q);
    Some(4.0 * PI / (2 * l + 1) as f64 * qf * ((s + v).powi(q as i32) - s.powi(q as i32)))
}

/// `C_{l;2} = 2 sum C_{l1} C_{l2} (2l1+1)(2l2+1)/4pi 3j(l1 l2 l; 0 0 0)^2`.
pub fn c_l_q2(base: &PowerSpectrum, l: u32) -> Truncated {
    let c = base.values();
    let lmax = base.lmax();
    let mut acc = 0.0;
    for l1 in 0..=lmax {
        let c1 = c[l1 as usize];
        if c1 == 0.0 {
            continue;
        }
        let row = three_j_row_uncached(l1, l, 0, 0);
        let hi = (l1 + l).min(lmax);
        let mut inner = 0.0;
        let mut l2 = l1.abs_diff(l);
        while l2 <= hi {
            let w = row.get(l2);
            inner += c[l2 as usize] * (2 * l2 + 1) as f64 * w * w;
            l2 += 2;
        }
        acc += c1 * (2 * l1 + 1) as f64 * inner;
    }
    Truncated { value: 2.0 * acc / (4.0 * PI), tail_bound: order_tail_bound(base, l, 2) }
}

/// `C_{l;q}` through squared Clebsch-Gordan convolutions, `q` in {2, 3}.
pub fn c_l_q(base: &PowerSpectrum, l: u32, q: usize) -> Result<Truncated> {
    if !(2..=3).contains(&q) {
        return Err(Error::UnsupportedOrder(q));
    }
    let c = base.values();
    let lmax = base.lmax();
    let w = |li: u32| c[li as usize] * (2 * li + 1) as f64 / (4.0 * PI);
    let mut acc = 0.0;
    for l1 in 0..=lmax {
        if c[l1 as usize] == 0.0 {
            continue;
        }
        for l2 in 0..=lmax {
            if c[l2 as usize] == 0.0 {
                continue;
            }
            if q == 2 {
                let v = cg_convolution(&CgConvolutionPath { leaves: vec![l1, l2], intermediates: vec![], terminal: l })?;
                acc += w(l1) * w(l2) * v * v;
                continue;
            }
            for l3 in 0..=lmax {
                if c[l3 as usize] == 0.0 {
                    continue;
                }
                let mut s = 0.0;
                for big_l1 in l1.abs_diff(l2)..=l1 + l2 {
                    let v = cg_convolution(&CgConvolutionPath {
                        leaves: vec![l1, l2, l3],
                        intermediates: vec![big_l1],
                        terminal: l,
                    })?;
                    s += v * v;
                }
                acc += w(l1) * w(l2) * w(l3) * s;
            }
        }
    }
    let value = factorial(q) * 4.0 * PI / (2 * l + 1) as f64 * acc;
    Ok(Truncated { value, tail_bound: order_tail_bound(base, l, q) })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubordinatedSpectrum {
    pub base: PowerSpectrum,
    pub q: usize,
    pub values: Vec<f64>,
    pub tail_bounds: Vec<Option<f64>>,
}

impl SubordinatedSpectrum {
    /// Tabulates `C_{l;q}` for `l = 0..=lmax_out`; `lmax_out` defaults to
    /// `q * lmax` of the base.
    pub fn compute(base: &PowerSpectrum, q: usize, lmax_out: Option<u32>) -> Result<Self> {
        if !(2..=3).contains(&q) {
            return Err(Error::UnsupportedOrder(q));
        }
        let lmax_out = lmax_out.unwrap_or(q as u32 * base.lmax());
        let rows: Vec<Truncated> = (0..=lmax_out)
            .into_par_iter()
            .map(|l| if q == 2 { Ok(c_l_q2(base, l)) } else { c_l_q(base, l, q) })
            .collect::<Result<_>>()?;
        Ok(SubordinatedSpectrum {
            base: base.clone(),
            q,
            values: rows.iter().map(|t| t.value).collect(),
            tail_bounds: rows.iter().map(|t| t.tail_bound).collect(),
        })
    }

    /// `sum_l (2l+1) C_{l;q} / 4pi`.
    pub fn total_variance(&self) -> f64 {
        self.values.iter().enumerate().map(|(l, c)| (2 * l + 1) as f64 * c).sum::<f64>() / (4.0 * PI)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "l,C_l_q,tail_bound")?;
        for (l, (c, t)) in self.values.iter().zip(&self.tail_bounds).enumerate() {
            writeln!(w, "{l},{},{}", fmt_f64(*c), fmt_opt(*t))?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug)]
struct GauntTerm {
    l1: u32,
    m1: i32,
    l2: u32,
    m2: i32,
    k: f64,
}

/// Precomputed coupling terms `a_{lm;2} = sum K a_{l1 m1} a_{l2 m2}` for a
/// chosen set of output multipoles, `m >= 0`.
#[derive(Clone, Debug)]
pub struct GauntPlan {
    lmax_in: u32,
    outputs: Vec<(u32, i32, Vec<GauntTerm>)>,
}

impl GauntPlan {
    pub fn new(lmax_in: u32, ls: &[u32]) -> Result<Self> {
        if let Some(&l) = ls.iter().find(|&&l| l > 2 * lmax_in) {
            return Err(Error::InvalidArgument(format!("output multipole {l} exceeds 2*lmax = {}", 2 * lmax_in)));
        }
        let outputs = ls
            .par_iter()
            .flat_map_iter(|&l| (0..=l as i32).map(move |m| (l, m)))
            .map(|(l, m)| (l, m, gaunt_terms(lmax_in, l, m)))
            .collect();
        Ok(GauntPlan { lmax_in, outputs })
    }

    pub fn lmax_in(&self) -> u32 {
        self.lmax_in
    }

    pub fn term_count(&self) -> usize {
        self.outputs.iter().map(|o| o.2.len()).sum()
    }

    /// Coefficients of `H_2(T)`; multipoles outside the plan are left zero
    /// except the monopole, which always carries the centering term.
    pub fn apply(&self, coeffs: &CoefficientSet, lmax_out: u32) -> Result<CoefficientSet> {
        if coeffs.lmax() != self.lmax_in {
            return Err(Error::InvalidArgument(format!(
                "plan built for lmax {} but coefficients have lmax {}",
                self.lmax_in,
                coeffs.lmax()
            )));
        }
        coeffs.validate()?;
        let mut out = CoefficientSet::zeros(lmax_out);
        for (l, m, terms) in &self.outputs {
            if *l == 0 || *l > lmax_out {
                continue;
            }
            let mut acc = Complex64::new(0.0, 0.0);
            for t in terms {
                acc += coeffs.get(t.l1, t.m1) * coeffs.get(t.l2, t.m2) * t.k;
            }
            out.set(*l, *m, acc);
        }
        let energy: f64 = (0..=coeffs.lmax()).map(|l| coeffs.power(l)).sum();
        let root = (4.0 * PI).sqrt();
        out.set(0, 0, Complex64::new(energy / root - root, 0.0));
        Ok(out)
    }
}

fn gaunt_terms(lmax_in: u32, l: u32, m: i32) -> Vec<GauntTerm> {
    let mut terms = Vec::new();
    let sign_m = if m % 2 == 0 { 1.0 } else { -1.0 };
    for l1 in 0..=lmax_in {
        let zero = three_j_row_uncached(l1, l, 0, 0);
        let lo = l1.abs_diff(l);
        let hi = (l1 + l).min(lmax_in);
        if lo > hi {
            continue;
        }
        for m1 in -(l1 as i32)..=l1 as i32 {
            let m2 = m - m1;
            // (l1 l l2; m1 -m m2) equals (l1 l2 l; m1 m2 -m) when l1+l2+l is even
            let row = three_j_row_uncached(l1, l, m1, -m);
            let mut l2 = lo;
            while l2 <= hi {
                if m2.unsigned_abs() <= l2 {
                    let n = ((2 * l1 + 1) * (2 * l2 + 1) * (2 * l + 1)) as f64 / (4.0 * PI);
                    let k = sign_m * n.sqrt() * zero.get(l2) * row.get(l2);
                    if k != 0.0 {
                        terms.push(GauntTerm { l1, m1, l2, m2, k });
                    }
                }
                l2 += 2;
            }
        }
    }
    terms
}

/// Harmonic coefficients of `H_2(T)` for all `l <= lmax_out`.
pub fn subordinate_coeffs_q2(coeffs: &CoefficientSet, lmax_out: u32) -> Result<CoefficientSet> {
    if lmax_out > 2 * coeffs.lmax() {
        return Err(Error::InvalidArgument(format!(
            "lmax_out = {lmax_out} exceeds 2*lmax = {}",
            2 * coeffs.lmax()
        )));
    }
    let ls: Vec<u32> = (1..=lmax_out).collect();
    GauntPlan::new(coeffs.lmax(), &ls)?.apply(coeffs, lmax_out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::{make_class_d, ClassDParams};
    use approx::assert_relative_eq;

    fn only_c1(c1: f64, lmax: usize) -> PowerSpectrum {
        let mut v = vec![0.0; lmax + 1];
        v[1] = c1;
        PowerSpectrum::from_table(v).unwrap()
    }

    #[test]
    fn hermite_low_orders() {
        for x in [-1.5, 0.0, 0.3, 2.0] {
            assert_eq!(hermite(0, x), 1.0);
            assert_eq!(hermite(1, x), x);
            assert_relative_eq!(hermite(2, x), x * x - 1.0, epsilon = 1e-15);
            assert_relative_eq!(hermite(4, x), x.powi(4) - 6.0 * x * x + 3.0, epsilon = 1e-13);
        }
        assert_eq!(hermite(3, 2.0), 2.0);
    }

    #[test]
    fn single_dipole_base() {
        let base = only_c1(1.0, 3);
        assert_relative_eq!(c_l_q2(&base, 2).value, 3.0 / (5.0 * PI), max_relative = 1e-12);
        assert_eq!(c_l_q2(&base, 1).value, 0.0);
        let zero = PowerSpectrum::from_table(vec![0.0; 5]).unwrap();
        assert_eq!(c_l_q(&zero, 3, 2).unwrap().value, 0.0);
        assert!(matches!(c_l_q(&base, 3, 4), Err(Error::UnsupportedOrder(4))));
    }

    #[test]
    fn convolution_form_reduces_to_closed_form() {
        let base = make_class_d(ClassDParams::new(3.0, 0.5, 1.0, 12).unwrap()).unwrap();
        for l in 0..=10 {
            let a = c_l_q2(&base, l).value;
            let b = c_l_q(&base, l, 2).unwrap().value;
            assert_relative_eq!(a, b, max_relative = 1e-10);
        }
    }

    #[test]
    fn subordinated_variances() {
        let base = make_class_d(ClassDParams::new(3.0, 1.0, 1.0, 10).unwrap())
            .unwrap()
            .normalize_unit_variance()
            .unwrap();
        let s2 = SubordinatedSpectrum::compute(&base, 2, None).unwrap();
        assert_relative_eq!(s2.total_variance(), 2.0, max_relative = 1e-12);
        let s3 = SubordinatedSpectrum::compute(&base, 3, None).unwrap();
        assert_relative_eq!(s3.total_variance(), 6.0, max_relative = 1e-10);
        assert!(s2.values.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn zero_input_gives_constant_minus_one() {
        let c = CoefficientSet::zeros(3);
        let out = subordinate_coeffs_q2(&c, 6).unwrap();
        assert_relative_eq!(out.get(0, 0).re, -(4.0 * PI).sqrt(), max_relative = 1e-15);
        for l in 1..=6 {
            assert_eq!(out.power(l), 0.0);
        }
        assert!(subordinate_coeffs_q2(&c, 7).is_err());
    }
}

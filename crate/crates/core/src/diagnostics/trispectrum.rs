use crate::error::{Error, Result};
use crate::wigner::{six_j, three_j_sq_zero_table, SixJKey};
use serde::{Deserialize, Serialize};

/// Reduced fourth-order cumulant `T_{ll}^{ll}(L)` for `L = 0..=2l`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrispectrumDiag {
    l: u32,
    values: Vec<f64>,
}

impl TrispectrumDiag {
    /// Rejects inputs of the wrong length or with any nonzero odd-`L` entry.
    pub fn new(l: u32, values: Vec<f64>) -> Result<Self> {
        if values.len() != 2 * l as usize + 1 {
            return Err(Error::InvalidArgument(format!(
                "trispectrum at l = {l} needs {} entries, got {}",
                2 * l + 1,
                values.len()
            )));
        }
        if let Some(odd) = (1..values.len()).step_by(2).find(|&i| values[i] != 0.0) {
            return Err(Error::OddSupport(odd));
        }
        Ok(TrispectrumDiag { l, values })
    }

    pub fn zeros(l: u32) -> Self {
        TrispectrumDiag { l, values: vec![0.0; 2 * l as usize + 1] }
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// `w1(L) = (C^{L0}_{l0l0})^2`, `L = 0..=2l`.
pub fn weights_w1(l: u32) -> Vec<f64> {
    three_j_sq_zero_table(l, 2 * l).expect("table length 2l is always admissible")
}

/// `w2(L) = (2L+1)/(2l+1)^2`, `L = 0..=2l`.
pub fn weights_w2(l: u32) -> Vec<f64> {
    let d = ((2 * l + 1) as f64).powi(2);
    (0..=2 * l).map(|big_l| (2 * big_l + 1) as f64 / d).collect()
}

fn weighted(trispec: &TrispectrumDiag, w: &[f64], c_lq: f64) -> Result<f64> {
    if !(c_lq > 0.0) {
        return Err(Error::InvalidArgument(format!("C_l must be positive, got {c_lq}")));
    }
    let s: f64 = w.iter().zip(&trispec.values).map(|(a, b)| a * b).sum();
    Ok(s / (c_lq * c_lq))
}

pub fn hfg_functional(trispec: &TrispectrumDiag, c_lq: f64) -> Result<f64> {
    weighted(trispec, &weights_w1(trispec.l), c_lq)
}

pub fn hfe_functional(trispec: &TrispectrumDiag, c_lq: f64) -> Result<f64> {
    weighted(trispec, &weights_w2(trispec.l), c_lq)
}

/// `M[L'][L] = (2L+1) {l l L; l l L'}`.
pub fn transform_matrix(l: u32) -> Result<Vec<Vec<f64>>> {
    (0..=2 * l)
        .map(|lp| {
            (0..=2 * l)
                .map(|big_l| Ok((2 * big_l + 1) as f64 * six_j(SixJKey::new(l, l, big_l, l, l, lp))?))
                .collect()
        })
        .collect()
}

/// Applies the 6j recoupling `T'(L') = sum_L (2L+1) {l l L; l l L'} T(L)`.
/// Odd-`L'` outputs within rounding of zero are set to exactly zero; larger
/// odd outputs are reported as an error.
pub fn reduced_trispectrum_transform(trispec: &TrispectrumDiag) -> Result<TrispectrumDiag> {
    let m = transform_matrix(trispec.l)?;
    let scale = trispec.values.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let mut out: Vec<f64> = m
        .iter()
        .map(|row| row.iter().zip(&trispec.values).map(|(a, b)| a * b).sum())
        .collect();
    for (i, v) in out.iter_mut().enumerate().skip(1).step_by(2) {
        if v.abs() > 1e-12 * scale.max(f64::MIN_POSITIVE) * (2 * trispec.l + 1) as f64 {
            return Err(Error::OddSupport(i));
        }
        *v = 0.0;
    }
    Ok(TrispectrumDiag { l: trispec.l, values: out })
}

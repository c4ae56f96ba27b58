//! Harmonic coefficients `a_lm` of a real field.

use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Triangular array of `a_lm` for `0 <= l <= lmax`. Only `m >= 0` is stored;
/// negative projections follow from `a_{l,-m} = (-1)^m conj(a_lm)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientSet {
    lmax: u32,
    data: Vec<Complex64>,
}

fn idx(l: u32, m: u32) -> usize {
    (l as usize * (l as usize + 1)) / 2 + m as usize
}

impl CoefficientSet {
    pub fn zeros(lmax: u32) -> Self {
        CoefficientSet { lmax, data: vec![Complex64::new(0.0, 0.0); idx(lmax + 1, 0)] }
    }

    pub fn lmax(&self) -> u32 {
        self.lmax
    }

    pub fn get(&self, l: u32, m: i32) -> Complex64 {
        assert!(l <= self.lmax && m.unsigned_abs() <= l, "a_{{{l},{m}}} out of range");
        let v = self.data[idx(l, m.unsigned_abs())];
        if m >= 0 {
            v
        } else if m % 2 == 0 {
            v.conj()
        } else {
            -v.conj()
        }
    }

    /// Stores `a_lm`; a negative `m` stores the mirrored `m >= 0` entry.
    pub fn set(&mut self, l: u32, m: i32, v: Complex64) {
        assert!(l <= self.lmax && m.unsigned_abs() <= l, "a_{{{l},{m}}} out of range");
        let stored = if m >= 0 {
            v
        } else if m % 2 == 0 {
            v.conj()
        } else {
            -v.conj()
        };
        self.data[idx(l, m.unsigned_abs())] = stored;
    }

    /// `sum_m |a_lm|^2` for one multipole.
    pub fn power(&self, l: u32) -> f64 {
        let row = &self.data[idx(l, 0)..idx(l + 1, 0)];
        row[0].norm_sqr() + 2.0 * row[1..].iter().map(|z| z.norm_sqr()).sum::<f64>()
    }

    /// Checks that every `a_l0` is real and all entries are finite.
    pub fn validate(&self) -> Result<()> {
        for l in 0..=self.lmax {
            let a0 = self.data[idx(l, 0)];
            if a0.im.abs() > 1e-12 * a0.re.abs().max(1.0) {
                return Err(Error::MalformedCoefficients(format!(
                    "a_{{{l},0}} = {a0} is not real"
                )));
            }
        }
        if self.data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::MalformedCoefficients("non-finite entry".into()));
        }
        Ok(())
    }

    /// Builds a set from a full `(l, m)` listing, checking the reality
    /// constraint between `m` and `-m`.
    pub fn from_full(lmax: u32, f: impl Fn(u32, i32) -> Complex64) -> Result<Self> {
        let mut out = Self::zeros(lmax);
        for l in 0..=lmax {
            for m in 0..=l as i32 {
                let pos = f(l, m);
                let neg = f(l, -m);
                let mirrored = if m % 2 == 0 { pos.conj() } else { -pos.conj() };
                if (neg - mirrored).norm() > 1e-10 * pos.norm().max(1.0) {
                    return Err(Error::MalformedCoefficients(format!(
                        "a_{{{l},{}}} is not (-1)^m conj(a_{{{l},{m}}})",
                        -m
                    )));
                }
                out.data[idx(l, m as u32)] = pos;
            }
        }
        out.validate()?;
        Ok(out)
    }
}

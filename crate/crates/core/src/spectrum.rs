//! Angular power spectra and the power-exponential family
//! `C_l = c l^{-alpha} e^{-beta l}`.

use crate::error::{Error, Result};
use crate::format::fmt_f64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::io::{Read, Write};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassDParams {
    pub alpha: f64,
    pub beta: f64,
    pub c: f64,
    pub lmax: u32,
}

impl ClassDParams {
    pub fn new(alpha: f64, beta: f64, c: f64, lmax: u32) -> Result<Self> {
        let p = ClassDParams { alpha, beta, c, lmax };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.alpha.is_finite() || !self.beta.is_finite() || !self.c.is_finite() {
            return Err(Error::InvalidClassD("parameters must be finite".into()));
        }
        if self.beta < 0.0 {
            return Err(Error::InvalidClassD(format!("beta = {} must be nonnegative", self.beta)));
        }
        if self.c <= 0.0 {
            return Err(Error::InvalidClassD(format!("amplitude c = {} must be positive", self.c)));
        }
        if self.beta == 0.0 && self.alpha <= 2.0 {
            return Err(Error::InvalidClassD(format!(
                "beta = 0 requires alpha > 2 so that sum_l l^(1-alpha) e^(-beta l) < inf (got alpha = {})",
                self.alpha
            )));
        }
        Ok(())
    }

    /// `C_l` of the model; zero at the monopole.
    pub fn value(&self, l: u32) -> f64 {
        if l == 0 {
            return 0.0;
        }
        let lf = l as f64;
        self.c * lf.powf(-self.alpha) * (-self.beta * lf).exp()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpectrumModel {
    ClassD(ClassDParams),
    Table,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerSpectrum {
    values: Vec<f64>,
    model: SpectrumModel,
    total_variance: f64,
}

fn total_variance(values: &[f64]) -> f64 {
    values
        .iter()
        .enumerate()
        .map(|(l, c)| (2 * l + 1) as f64 * c)
        .sum::<f64>()
        / (4.0 * PI)
}

pub fn make_class_d(params: ClassDParams) -> Result<PowerSpectrum> {
    params.validate()?;
    let values: Vec<f64> = (0..=params.lmax).map(|l| params.value(l)).collect();
    let tv = total_variance(&values);
    Ok(PowerSpectrum { values, model: SpectrumModel::ClassD(params), total_variance: tv })
}

/// Upper bound on `sum_{l > lmax} (2l+1) C_l / 4pi` for the model.
pub fn truncation_tail_bound(params: &ClassDParams, lmax: u32) -> f64 {
    let k = params.c / (4.0 * PI);
    let (alpha, beta) = (params.alpha, params.beta);
    if beta == 0.0 {
        if alpha <= 2.0 {
            return f64::INFINITY;
        }
        let a = lmax.max(1) as f64;
        // integral comparison for the decreasing summand (2x+1) x^-alpha
        let tail = 2.0 * a.powf(2.0 - alpha) / (alpha - 2.0) + a.powf(1.0 - alpha) / (alpha - 1.0);
        let head = if lmax == 0 { 3.0 } else { 0.0 };
        return k * (tail + head);
    }
    // beyond n0 the summand decays at least like e^{-beta l / K}
    let n0 = if alpha >= 1.0 {
        lmax.max(1)
    } else {
        lmax.max((2.0 * (1.0 - alpha) / beta).ceil() as u32).max(1)
    };
    let g = |l: u32| (2 * l + 1) as f64 * (l as f64).powf(-alpha);
    let mut explicit = 0.0;
    for l in lmax + 1..=n0 {
        explicit += g(l) * (-beta * l as f64).exp();
    }
    let kk = if alpha >= 1.0 { 1.0 } else { 2.0 };
    k * (explicit + g(n0) * (-beta * n0 as f64).exp() * kk / beta)
}

impl PowerSpectrum {
    pub fn from_table(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument("empty spectrum table".into()));
        }
        if let Some((l, c)) = values.iter().enumerate().find(|(_, c)| !(c.is_finite() && **c >= 0.0)) {
            return Err(Error::InvalidArgument(format!("C_{l} = {c} is not a finite nonnegative value")));
        }
        let tv = total_variance(&values);
        Ok(PowerSpectrum { values, model: SpectrumModel::Table, total_variance: tv })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, l: u32) -> f64 {
        self.values.get(l as usize).copied().unwrap_or(0.0)
    }

    pub fn lmax(&self) -> u32 {
        self.values.len() as u32 - 1
    }

    pub fn model(&self) -> &SpectrumModel {
        &self.model
    }

    pub fn class_d(&self) -> Option<&ClassDParams> {
        match &self.model {
            SpectrumModel::ClassD(p) => Some(p),
            SpectrumModel::Table => None,
        }
    }

    pub fn total_variance(&self) -> f64 {
        self.total_variance
    }

    /// Tail bound beyond the tabulated range; `None` for explicit tables.
    pub fn tail_bound(&self) -> Option<f64> {
        self.class_d().map(|p| truncation_tail_bound(p, self.lmax()))
    }

    pub fn scaled(&self, k: f64) -> PowerSpectrum {
        let values: Vec<f64> = self.values.iter().map(|c| c * k).collect();
        let model = match &self.model {
            SpectrumModel::ClassD(p) => SpectrumModel::ClassD(ClassDParams { c: p.c * k, ..*p }),
            SpectrumModel::Table => SpectrumModel::Table,
        };
        let tv = total_variance(&values);
        PowerSpectrum { values, model, total_variance: tv }
    }

    /// Rescales to `sum_l (2l+1) C_l / 4pi = 1` over the tabulated range.
    pub fn normalize_unit_variance(&self) -> Result<PowerSpectrum> {
        if !(self.total_variance > 0.0) {
            return Err(Error::ZeroSpectrum);
        }
        Ok(self.scaled(1.0 / self.total_variance))
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "l,C_l")?;
        for (l, c) in self.values.iter().enumerate() {
            writeln!(w, "{l},{}", fmt_f64(*c))?;
        }
        writeln!(w, "# total_variance={}", fmt_f64(self.total_variance))?;
        Ok(())
    }

    /// Reads an `l,C_l` table. Lines starting with `#` are ignored; missing
    /// multipoles are zero.
    pub fn read_csv<R: Read>(r: R) -> Result<PowerSpectrum> {
        let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(r);
        let headers = rdr.headers().map_err(|e| Error::Parse(e.to_string()))?.clone();
        if headers.len() < 2 || &headers[0] != "l" || &headers[1] != "C_l" {
            return Err(Error::Parse(format!("expected header `l,C_l`, got `{}`", headers.iter().collect::<Vec<_>>().join(","))));
        }
        let mut values: Vec<f64> = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
            let row = i + 2;
            let l: usize = rec[0].parse().map_err(|_| Error::Parse(format!("line {row}: bad multipole `{}`", &rec[0])))?;
            let c: f64 = rec[1].parse().map_err(|_| Error::Parse(format!("line {row}: bad value `{}`", &rec[1])))?;
            if values.len() <= l {
                values.resize(l + 1, 0.0);
            }
            values[l] = c;
        }
        PowerSpectrum::from_table(values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn class_d_values() {
        let s = make_class_d(ClassDParams::new(3.0, 0.0, 1.0, 10).unwrap()).unwrap();
        assert_eq!(s.get(2), 0.125);
        assert_eq!(s.get(0), 0.0);
        let s = make_class_d(ClassDParams::new(0.0, 1.0, 1.0, 10).unwrap()).unwrap();
        assert_relative_eq!(s.get(1), (-1.0f64).exp(), max_relative = 1e-15);
        assert!(matches!(ClassDParams::new(2.0, 0.0, 1.0, 10), Err(Error::InvalidClassD(_))));
        assert!(ClassDParams::new(3.0, -0.1, 1.0, 10).is_err());
        assert!(ClassDParams::new(3.0, 0.0, 0.0, 10).is_err());
    }

    #[test]
    fn unit_variance() {
        let mut v = vec![0.0; 4];
        v[1] = 4.0 * PI / 3.0;
        let s = PowerSpectrum::from_table(v).unwrap();
        let n = s.normalize_unit_variance().unwrap();
        assert_relative_eq!(n.get(1), 4.0 * PI / 3.0, max_relative = 1e-12);
        assert!(matches!(PowerSpectrum::from_table(vec![0.0; 3]).unwrap().normalize_unit_variance(), Err(Error::ZeroSpectrum)));
    }

    #[test]
    fn tail_bounds() {
        let p = ClassDParams::new(3.0, 1.0, 1.0, 60).unwrap();
        assert!(truncation_tail_bound(&p, 60) < 1e-20);
        let p = ClassDParams::new(3.0, 0.0, 1.0, 1000).unwrap();
        let b = truncation_tail_bound(&p, 1000);
        assert!((b - 1.6e-4).abs() < 0.05e-4, "{b}");
        assert!(truncation_tail_bound(&p, 1_000_000) < 2e-7);
        assert!(truncation_tail_bound(&p, 1_000_000_000) < 2e-10);
    }

    #[test]
    fn tail_bound_dominates_partial_sums() {
        for (alpha, beta) in [(3.0, 0.0), (2.5, 0.0), (0.0, 0.5), (-1.0, 0.2), (0.5, 1.0), (4.0, 0.25)] {
            let p = ClassDParams::new(alpha, beta, 1.0, 0).unwrap();
            for lmax in [1u32, 5, 20, 60] {
                let direct: f64 = (lmax + 1..200_000).map(|l| (2 * l + 1) as f64 * p.value(l)).sum::<f64>() / (4.0 * PI);
                let b = truncation_tail_bound(&p, lmax);
                assert!(b >= direct, "alpha={alpha} beta={beta} lmax={lmax}: {b} < {direct}");
            }
        }
    }

    #[test]
    fn csv_round_trip() {
        let s = make_class_d(ClassDParams::new(2.5, 0.3, 1.7, 12).unwrap()).unwrap();
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("l,C_l\n0,0\n"));
        let back = PowerSpectrum::read_csv(&buf[..]).unwrap();
        assert_eq!(back.values(), s.values());
        assert!(PowerSpectrum::read_csv("x,y\n1,2\n".as_bytes()).is_err());
        assert!(PowerSpectrum::read_csv("l,C_l\n1,-2\n".as_bytes()).is_err());
    }

    proptest! {
        #[test]
        fn ratio_to_model_is_exact(alpha in 2.01f64..6.0, beta in 0.0f64..2.0, c in 0.01f64..10.0) {
            let s = make_class_d(ClassDParams::new(alpha, beta, c, 50).unwrap()).unwrap();
            for l in 1..=50u32 {
                let lf = l as f64;
                let r = s.get(l) / (lf.powf(-alpha) * (-beta * lf).exp());
                prop_assert!((r - c).abs() <= 1e-12 * c);
                if l > 1 {
                    prop_assert!(s.get(l) < s.get(l - 1));
                }
            }
            let n = s.normalize_unit_variance().unwrap();
            prop_assert!((n.total_variance() - 1.0).abs() < 1e-12);
            let nn = n.scaled(3.0).normalize_unit_variance().unwrap();
            for l in 0..=50 {
                prop_assert!((nn.get(l) - n.get(l)).abs() <= 1e-12 * n.get(l));
            }
        }
    }
}

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

/// k-statistic estimates of the first four cumulants with jackknife
/// standard errors. Skewness and kurtosis are `None` for a sample with zero
/// variance; standard errors of fourth-order quantities need `n >= 5`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CumulantEstimate {
    pub n: usize,
    pub mean: f64,
    pub variance: f64,
    pub skewness: Option<f64>,
    /// Non-excess kurtosis, `3 + k4 / k2^2`.
    pub kurtosis: Option<f64>,
    pub cum4: f64,
    pub se_mean: f64,
    pub se_variance: f64,
    pub se_skewness: Option<f64>,
    pub se_kurtosis: Option<f64>,
    pub se_cum4: Option<f64>,
}

#[derive(Clone, Copy)]
struct Sums {
    n: f64,
    s1: f64,
    s2: f64,
    s3: f64,
    s4: f64,
}

impl Sums {
    fn without(&self, x: f64) -> Sums {
        let x2 = x * x;
        Sums { n: self.n - 1.0, s1: self.s1 - x, s2: self.s2 - x2, s3: self.s3 - x2 * x, s4: self.s4 - x2 * x2 }
    }

    fn k2(&self) -> f64 {
        let Sums { n, s1, s2, .. } = *self;
        (n * s2 - s1 * s1) / (n * (n - 1.0))
    }

    fn k3(&self) -> f64 {
        let Sums { n, s1, s2, s3, .. } = *self;
        (2.0 * s1.powi(3) - 3.0 * n * s1 * s2 + n * n * s3) / (n * (n - 1.0) * (n - 2.0))
    }

    fn k4(&self) -> f64 {
        let Sums { n, s1, s2, s3, s4 } = *self;
        let num = -6.0 * s1.powi(4) + 12.0 * n * s1 * s1 * s2 - 3.0 * n * (n - 1.0) * s2 * s2
            - 4.0 * n * (n + 1.0) * s1 * s3
            + n * n * (n + 1.0) * s4;
        num / (n * (n - 1.0) * (n - 2.0) * (n - 3.0))
    }
}

fn ratio(num: f64, k2: f64, p: i32) -> Option<f64> {
    (k2 > 0.0).then(|| num / k2.powf(p as f64 / 2.0))
}

fn jackknife(values: impl Iterator<Item = f64>, n: usize) -> f64 {
    let v: Vec<f64> = values.collect();
    let m = v.iter().sum::<f64>() / v.len() as f64;
    let ss: f64 = v.iter().map(|x| (x - m).powi(2)).sum();
    ((n as f64 - 1.0) / n as f64 * ss).sqrt()
}

/// Unbiased cumulant estimates of `samples`; needs at least four values.
/// The data are centred on their mean before the power sums are formed, and
/// leave-one-out replicates come from downdating those sums.
pub fn estimate_cumulants(samples: &[f64]) -> Result<CumulantEstimate> {
    let n = samples.len();
    if n < 4 {
        return Err(Error::InsufficientSamples { needed: 4, got: n });
    }
    if let Some(x) = samples.iter().find(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument(format!("non-finite sample {x}")));
    }
    let shift = samples.iter().sum::<f64>() / n as f64;
    let xs: Vec<f64> = samples.iter().map(|x| x - shift).collect();
    let mut all = Sums { n: n as f64, s1: 0.0, s2: 0.0, s3: 0.0, s4: 0.0 };
    for &x in &xs {
        let x2 = x * x;
        all.s1 += x;
        all.s2 += x2;
        all.s3 += x2 * x;
        all.s4 += x2 * x2;
    }
    let (k2, k3, k4) = (all.k2(), all.k3(), all.k4());
    let se_variance = jackknife(xs.iter().map(|&x| all.without(x).k2()), n);
    let se_skewness = if k2 > 0.0 {
        let loo: Option<Vec<f64>> = xs.iter().map(|&x| {
            let s = all.without(x);
            ratio(s.k3(), s.k2(), 3)
        })
        .collect();
        loo.map(|v| jackknife(v.into_iter(), n))
    } else {
        None
    };
    let (se_cum4, se_kurtosis) = if n >= 5 {
        let se_c = jackknife(xs.iter().map(|&x| all.without(x).k4()), n);
        let loo: Option<Vec<f64>> = xs.iter().map(|&x| {
            let s = all.without(x);
            ratio(s.k4(), s.k2(), 4)
        })
        .collect();
        (Some(se_c), if k2 > 0.0 { loo.map(|v| jackknife(v.into_iter(), n)) } else { None })
    } else {
        (None, None)
    };
    Ok(CumulantEstimate {
        n,
        mean: shift + all.s1 / n as f64,
        variance: k2,
        skewness: ratio(k3, k2, 3),
        kurtosis: ratio(k4, k2, 4).map(|e| 3.0 + e),
        cum4: k4,
        se_mean: (k2.max(0.0) / n as f64).sqrt(),
        se_variance,
        se_skewness,
        se_kurtosis,
        se_cum4,
    })
}

/// Kolmogorov-Smirnov distance between the empirical law of `samples` and
/// the standard normal.
pub fn ks_standard_normal(samples: &[f64]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::InsufficientSamples { needed: 1, got: 0 });
    }
    let normal = Normal::standard();
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    Ok(xs
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = normal.cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max))
}

/// Mean of `values` with the standard error of the mean, the latter only for
/// at least two values.
pub(crate) fn mean_with_se(values: &[f64]) -> (f64, Option<f64>) {
    let n = values.len() as f64;
    let m = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (m, None);
    }
    let var = values.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, Some((var / n).sqrt()))
}

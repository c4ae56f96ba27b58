use crate::coeffs::CoefficientSet;
use crate::error::{Error, Result};
use crate::harmonics::{legendre_row, SpherePoint};
use crate::spectrum::PowerSpectrum;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Largest multipole of the counterexample field; beyond it `e^{-2l}` leaves
/// the normal range of `f64`.
pub const COUNTEREXAMPLE_LMAX: u32 = 300;

/// Generator for replicate `index` of a run seeded with `seed`: one ChaCha
/// key per run, one stream per replicate.
pub fn replicate_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Isotropic Gaussian coefficients up to `lmax`. Draw order is `l`
/// ascending, then `a_l0`, then `(Re, Im)` of `a_lm` for `m = 1..=l`.
pub fn gaussian_coeffs_with<R: Rng + ?Sized>(spec: &PowerSpectrum, lmax: u32, rng: &mut R) -> Result<CoefficientSet> {
    if lmax > spec.lmax() {
        return Err(Error::InvalidArgument(format!("spectrum ends at {} < lmax = {lmax}", spec.lmax())));
    }
    let mut c = CoefficientSet::zeros(lmax);
    for l in 0..=lmax {
        let s = spec.get(l).sqrt();
        let z: f64 = rng.sample(StandardNormal);
        c.set(l, 0, Complex64::new(s * z, 0.0));
        let h = s / 2f64.sqrt();
        for m in 1..=l as i32 {
            let x: f64 = rng.sample(StandardNormal);
            let y: f64 = rng.sample(StandardNormal);
            c.set(l, m, Complex64::new(h * x, h * y));
        }
    }
    Ok(c)
}

pub fn sample_gaussian_coeffs(spec: &PowerSpectrum, lmax: u32, seed: u64) -> Result<CoefficientSet> {
    gaussian_coeffs_with(spec, lmax, &mut replicate_rng(seed, 0))
}

/// `C_l = e^{-2l} / (2l+1)`, the power spectrum of the counterexample field.
pub fn counterexample_spectrum(lmax: u32) -> Result<PowerSpectrum> {
    if lmax > COUNTEREXAMPLE_LMAX {
        return Err(Error::InvalidArgument(format!(
            "counterexample supports lmax <= {COUNTEREXAMPLE_LMAX}, got {lmax}"
        )));
    }
    PowerSpectrum::from_table((0..=lmax).map(|l| (-2.0 * l as f64).exp() / (2 * l + 1) as f64).collect())
}

/// `a_lm = sqrt(4pi/(2l+1)) Y_lm(g) xi_l` with `g` uniform on the sphere and
/// independent signs `xi_l = +-e^{-l}`. The point is drawn first, then the
/// signs in increasing `l`.
pub fn counterexample_with<R: Rng + ?Sized>(lmax: u32, rng: &mut R) -> Result<CoefficientSet> {
    if lmax == 0 || lmax > COUNTEREXAMPLE_LMAX {
        return Err(Error::InvalidArgument(format!(
            "counterexample needs 1 <= lmax <= {COUNTEREXAMPLE_LMAX}, got {lmax}"
        )));
    }
    let g = SpherePoint::random(rng);
    let mut c = CoefficientSet::zeros(lmax);
    for l in 0..=lmax {
        let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
        let xi = sign * (-(l as f64)).exp();
        let scale = xi * (4.0 * PI / (2 * l + 1) as f64).sqrt();
        for (m, p) in legendre_row(l, g.theta()).into_iter().enumerate() {
            c.set(l, m as i32, Complex64::from_polar(scale * p, m as f64 * g.phi()));
        }
    }
    Ok(c)
}

pub fn sample_counterexample(lmax: u32, seed: u64) -> Result<CoefficientSet> {
    counterexample_with(lmax, &mut replicate_rng(seed, 0))
}

/// One draw of a completely random row: `U` uniform on the unit sphere of
/// `R^{2l+1}` and the `m >= 0` coefficients it encodes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompletelyRandomDraw {
    pub l: u32,
    pub u: Vec<f64>,
    pub coeffs: Vec<Complex64>,
}

/// `a_l0 = R U_0` and `a_lm = R (U_{2m-1} + i U_{2m}) / sqrt2` for `m >= 1`,
/// with `R^2 = (2l+1) c_hat`, so that `sum_m |a_lm|^2 = (2l+1) c_hat`.
pub fn completely_random_with<R: Rng + ?Sized>(l: u32, c_hat: f64, rng: &mut R) -> Result<CompletelyRandomDraw> {
    if !(c_hat >= 0.0) || !c_hat.is_finite() {
        return Err(Error::InvalidArgument(format!("spectrum value must be finite and nonnegative, got {c_hat}")));
    }
    let dim = 2 * l as usize + 1;
    let u = loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            break v.into_iter().map(|x| x / norm).collect::<Vec<f64>>();
        }
    };
    let r = ((2 * l + 1) as f64 * c_hat).sqrt();
    let mut coeffs = vec![Complex64::new(r * u[0], 0.0)];
    for m in 1..=l as usize {
        coeffs.push(Complex64::new(u[2 * m - 1], u[2 * m]) * (r / 2f64.sqrt()));
    }
    Ok(CompletelyRandomDraw { l, u, coeffs })
}

pub fn sample_completely_random(l: u32, c_hat: f64, seed: u64) -> Result<CompletelyRandomDraw> {
    completely_random_with(l, c_hat, &mut replicate_rng(seed, 0))
}

//! Normalized associated Legendre functions and complex spherical harmonics
//! with the Condon-Shortley phase.

use crate::coeffs::CoefficientSet;
use crate::error::{Error, Result};
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpherePoint {
    theta: f64,
    phi: f64,
}

impl SpherePoint {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::InvalidArgument(format!("colatitude {theta} outside [0, pi]")));
        }
        if !(0.0..2.0 * PI).contains(&phi) {
            return Err(Error::InvalidArgument(format!("longitude {phi} outside [0, 2pi)")));
        }
        Ok(SpherePoint { theta, phi })
    }

    /// Uniformly distributed point on the sphere.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let z: f64 = rng.random_range(-1.0..=1.0);
        let phi: f64 = rng.random_range(0.0..2.0 * PI);
        SpherePoint { theta: z.acos(), phi }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }
}

/// `Pbar_l^m(cos theta)` for `m = 0..=l`, normalized so that
/// `Y_lm = Pbar_l^m(cos theta) e^{i m phi}`.
pub fn legendre_row(l: u32, theta: f64) -> Vec<f64> {
    let (x, s) = (theta.cos(), theta.sin());
    let mut out = vec![0.0; l as usize + 1];
    let mut pmm = 1.0 / (4.0 * PI).sqrt();
    for m in 0..=l {
        if m > 0 {
            pmm *= -((2 * m + 1) as f64 / (2 * m) as f64).sqrt() * s;
        }
        if m == l {
            out[m as usize] = pmm;
            break;
        }
        // climb in degree at fixed order
        let mut p_prev = pmm;
        let mut p = (2.0 * m as f64 + 3.0).sqrt() * x * pmm;
        for k in m + 2..=l {
            let kf = k as f64;
            let mf = m as f64;
            let a = ((4.0 * kf * kf - 1.0) / (kf * kf - mf * mf)).sqrt();
            let k1 = kf - 1.0;
            let a_prev = ((4.0 * k1 * k1 - 1.0) / (k1 * k1 - mf * mf)).sqrt();
            let next = a * (x * p - p_prev / a_prev);
            p_prev = p;
            p = next;
        }
        out[m as usize] = p;
    }
    out
}

pub fn sph_harm(l: u32, m: i32, x: &SpherePoint) -> Result<Complex64> {
    if m.unsigned_abs() > l {
        return Err(Error::InvalidProjection { l, m });
    }
    let p = legendre_row(l, x.theta)[m.unsigned_abs() as usize];
    let y = Complex64::from_polar(p, m.unsigned_abs() as f64 * x.phi);
    Ok(if m >= 0 {
        y
    } else if m % 2 == 0 {
        y.conj()
    } else {
        -y.conj()
    })
}

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { z } else { p1 };
            let pn1 = if n == 1 { 1.0 } else { p0 };
            dp = nf * (z * pn - pn1) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// `T_l(x) = sum_m a_lm Y_lm(x)` at each point.
pub fn synthesize_component(coeffs: &CoefficientSet, l: u32, points: &[SpherePoint]) -> Result<Vec<f64>> {
    if l > coeffs.lmax() {
        return Err(Error::InvalidArgument(format!(
            "multipole {l} exceeds coefficient lmax {}",
            coeffs.lmax()
        )));
    }
    coeffs.validate()?;
    let li = l as i32;
    points
        .iter()
        .map(|x| {
            let p = legendre_row(l, x.theta);
            let mut acc = Complex64::new(0.0, 0.0);
            let mut scale = 0.0f64;
            for m in -li..=li {
                let pm = p[m.unsigned_abs() as usize];
                let mut y = Complex64::from_polar(pm, m.unsigned_abs() as f64 * x.phi);
                if m < 0 {
                    y = if m % 2 == 0 { y.conj() } else { -y.conj() };
                }
                let t = coeffs.get(l, m) * y;
                scale = scale.max(t.norm());
                acc += t;
            }
            if acc.im.abs() > 1e-10 * scale.max(1.0) {
                return Err(Error::MalformedCoefficients(format!(
                    "synthesized component has imaginary residue {}",
                    acc.im
                )));
            }
            Ok(acc.re)
        })
        .collect()
}

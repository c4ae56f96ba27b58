use crate::error::{Error, Result};

// B_2, B_4, ..., B_20
const BERNOULLI: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
];

/// Riemann zeta function for real `s > 1` by Euler-Maclaurin summation.
pub fn riemann_zeta(s: f64) -> Result<f64> {
    if !(s > 1.0) || !s.is_finite() {
        return Err(Error::InvalidArgument(format!("zeta needs finite s > 1, got {s}")));
    }
    const N: usize = 20;
    let nf = N as f64;
    let head: f64 = (1..N).map(|n| (n as f64).powf(-s)).sum();
    let mut acc = head + nf.powf(1.0 - s) / (s - 1.0) + 0.5 * nf.powf(-s);
    // term k: B_2k / (2k)! * s (s+1) ... (s+2k-2) * N^(-s-2k+1)
    let mut rising = s;
    let mut fact = 2.0;
    let mut npow = nf.powf(-s - 1.0);
    for (k, b) in BERNOULLI.iter().enumerate() {
        if k > 0 {
            let kk = (2 * k + 2) as f64;
            rising *= (s + kk - 3.0) * (s + kk - 2.0);
            fact *= (kk - 1.0) * kk;
            npow /= nf * nf;
        }
        acc += b / fact * rising * npow;
    }
    Ok(acc)
}

//! Prime-exponent representation of factorials and products of factorials.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

/// Prime exponent vectors of `n!` for every `n <= nmax`.
#[derive(Debug)]
pub struct FactorialTable {
    primes: Vec<u32>,
    // exps[n][i] = exponent of primes[i] in n!
    exps: Vec<Vec<u32>>,
}

impl FactorialTable {
    pub fn new(nmax: u32) -> Self {
        let primes = sieve(nmax.max(2));
        let mut exps = Vec::with_capacity(nmax as usize + 1);
        let mut cur = vec![0u32; primes.len()];
        exps.push(cur.clone());
        for n in 1..=nmax {
            let mut r = n;
            for (i, &p) in primes.iter().enumerate() {
                if p > r {
                    break;
                }
                while r % p == 0 {
                    cur[i] += 1;
                    r /= p;
                }
            }
            exps.push(cur.clone());
        }
        FactorialTable { primes, exps }
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    /// Accumulates `sign * exponents(n!)` into `acc`.
    pub fn accumulate(&self, acc: &mut [i32], n: u32, sign: i32) {
        for (a, &e) in acc.iter_mut().zip(&self.exps[n as usize]) {
            *a += sign * e as i32;
        }
    }

    pub fn zeros(&self) -> Vec<i32> {
        vec![0; self.primes.len()]
    }

    /// Product of `p^e` over strictly positive exponents.
    pub fn positive_part(&self, exps: &[i32]) -> BigUint {
        let mut acc = BigUint::one();
        // fold small powers into a u64 before touching the big integer
        let mut chunk: u64 = 1;
        for (&p, &e) in self.primes.iter().zip(exps) {
            for _ in 0..e.max(0) {
                match chunk.checked_mul(p as u64) {
                    Some(c) => chunk = c,
                    None => {
                        acc *= chunk;
                        chunk = p as u64;
                    }
                }
            }
        }
        acc * chunk
    }
}

fn sieve(n: u32) -> Vec<u32> {
    let n = n as usize;
    let mut is = vec![true; n + 1];
    is[0] = false;
    if n >= 1 {
        is[1] = false;
    }
    let mut i = 2;
    while i * i <= n {
        if is[i] {
            let mut j = i * i;
            while j <= n {
                is[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    is.iter()
        .enumerate()
        .filter_map(|(k, &b)| b.then_some(k as u32))
        .collect()
}

/// `num / den` rounded to `f64`, for arbitrarily large operands.
pub fn ratio_to_f64(num: &BigUint, den: &BigUint) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    // scale so the integer quotient carries ~64 significant bits
    let shift = num.bits() as i64 - den.bits() as i64 - 64;
    let q = if shift >= 0 {
        num / (den << shift as u64)
    } else {
        (num << (-shift) as u64) / den
    };
    let mant = q.to_f64().unwrap_or(f64::INFINITY);
    scale_pow2(mant, shift)
}

fn scale_pow2(mut x: f64, mut e: i64) -> f64 {
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
    }
    x * 2f64.powi(e as i32)
}

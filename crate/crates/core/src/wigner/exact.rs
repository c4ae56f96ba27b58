//! Racah single-sum formulas evaluated in integer arithmetic.

use super::primes::{ratio_to_f64, FactorialTable};
use super::{SixJKey, ThreeJKey};
use num_bigint::BigUint;
use std::cmp::Ordering;

/// Evaluates `sqrt(prefactor) * sum_k sign_k * term_k`, where the squared
/// prefactor and each term are given as signed prime-exponent vectors.
fn racah_sum(ft: &FactorialTable, prefactor_sq: &[i32], terms: &[(bool, Vec<i32>)]) -> f64 {
    if terms.is_empty() {
        return 0.0;
    }
    let n = ft.len();
    // common factor: elementwise minimum exponent over all terms
    let mut common = terms[0].1.clone();
    for (_, e) in &terms[1..] {
        for (c, &x) in common.iter_mut().zip(e) {
            *c = (*c).min(x);
        }
    }
    let mut pos = BigUint::from(0u32);
    let mut neg = BigUint::from(0u32);
    let mut shifted = vec![0i32; n];
    for (negative, e) in terms {
        for i in 0..n {
            shifted[i] = e[i] - common[i];
        }
        let t = ft.positive_part(&shifted);
        if *negative {
            neg += t;
        } else {
            pos += t;
        }
    }
    let (s, negative) = match pos.cmp(&neg) {
        Ordering::Equal => return 0.0,
        Ordering::Greater => (pos - neg, false),
        Ordering::Less => (neg - pos, true),
    };
    // value^2 = s^2 * prod p^(prefactor + 2 common)
    let e: Vec<i32> = (0..n).map(|i| prefactor_sq[i] + 2 * common[i]).collect();
    let minus: Vec<i32> = e.iter().map(|&x| -x).collect();
    let num = &s * &s * ft.positive_part(&e);
    let den = ft.positive_part(&minus);
    let mag = ratio_to_f64(&num, &den).sqrt();
    if negative {
        -mag
    } else {
        mag
    }
}

fn triangle(a: u32, b: u32, c: u32) -> bool {
    c >= a.abs_diff(b) && c <= a + b
}

/// Accumulates the exponents of the triangle coefficient
/// `(a+b-c)!(a-b+c)!(-a+b+c)!/(a+b+c+1)!`.
fn delta_sq(ft: &FactorialTable, acc: &mut [i32], a: u32, b: u32, c: u32) {
    ft.accumulate(acc, a + b - c, 1);
    ft.accumulate(acc, a + c - b, 1);
    ft.accumulate(acc, b + c - a, 1);
    ft.accumulate(acc, a + b + c + 1, -1);
}

pub fn three_j(ft: &FactorialTable, k: &ThreeJKey) -> f64 {
    if !k.selection_allowed() {
        return 0.0;
    }
    let (l1, l2, l3) = (k.l1 as i64, k.l2 as i64, k.l3 as i64);
    let (m1, m2, m3) = (k.m1 as i64, k.m2 as i64, k.m3 as i64);

    let mut pre = ft.zeros();
    delta_sq(ft, &mut pre, k.l1, k.l2, k.l3);
    for (l, m) in [(l1, m1), (l2, m2), (l3, m3)] {
        ft.accumulate(&mut pre, (l + m) as u32, 1);
        ft.accumulate(&mut pre, (l - m) as u32, 1);
    }

    let kmin = 0.max(l2 - l3 - m1).max(l1 - l3 + m2);
    let kmax = (l1 + l2 - l3).min(l1 - m1).min(l2 + m2);
    let mut terms = Vec::new();
    for kk in kmin..=kmax {
        let mut e = ft.zeros();
        for f in [
            kk,
            l1 + l2 - l3 - kk,
            l1 - m1 - kk,
            l2 + m2 - kk,
            l3 - l2 + m1 + kk,
            l3 - l1 - m2 + kk,
        ] {
            ft.accumulate(&mut e, f as u32, -1);
        }
        terms.push((kk % 2 == 1, e));
    }
    let v = racah_sum(ft, &pre, &terms);
    if (l1 - l2 - m3).rem_euclid(2) == 1 {
        -v
    } else {
        v
    }
}

pub fn six_j(ft: &FactorialTable, k: &SixJKey) -> f64 {
    let SixJKey { a, b, e, c, d, f } = *k;
    // {j1 j2 j3; j4 j5 j6} = {a b e; c d f}
    let (j1, j2, j3, j4, j5, j6) = (a, b, e, c, d, f);
    let triads = [(j1, j2, j3), (j1, j5, j6), (j4, j2, j6), (j4, j5, j3)];
    if triads.iter().any(|&(x, y, z)| !triangle(x, y, z)) {
        return 0.0;
    }
    let mut pre = ft.zeros();
    for &(x, y, z) in &triads {
        delta_sq(ft, &mut pre, x, y, z);
    }
    let alphas = triads.map(|(x, y, z)| x + y + z);
    let betas = [j1 + j2 + j4 + j5, j2 + j3 + j5 + j6, j3 + j1 + j6 + j4];
    let tmin = *alphas.iter().max().unwrap();
    let tmax = *betas.iter().min().unwrap();
    let mut terms = Vec::new();
    for t in tmin..=tmax {
        let mut ex = ft.zeros();
        ft.accumulate(&mut ex, t + 1, 1);
        for &al in &alphas {
            ft.accumulate(&mut ex, t - al, -1);
        }
        for &be in &betas {
            ft.accumulate(&mut ex, be - t, -1);
        }
        terms.push((t % 2 == 1, ex));
    }
    racah_sum(ft, &pre, &terms)
}

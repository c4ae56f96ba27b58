//! Three-term recurrences in the third momentum for rows of 3j symbols.

/// 3j symbols `(l1 l2 j; m1 m2 -m1-m2)` for `j = jmin..=jmax`.
#[derive(Clone, Debug)]
pub struct ThreeJRow {
    pub jmin: u32,
    pub values: Vec<f64>,
}

impl ThreeJRow {
    fn empty() -> Self {
        ThreeJRow { jmin: 0, values: Vec::new() }
    }

    pub fn jmax(&self) -> Option<u32> {
        (!self.values.is_empty()).then(|| self.jmin + self.values.len() as u32 - 1)
    }

    pub fn get(&self, j: u32) -> f64 {
        if j < self.jmin {
            return 0.0;
        }
        self.values.get((j - self.jmin) as usize).copied().unwrap_or(0.0)
    }
}

const BIG: f64 = 1e250;

pub fn three_j_row(l1: u32, l2: u32, m1: i32, m2: i32) -> ThreeJRow {
    if m1.unsigned_abs() > l1 || m2.unsigned_abs() > l2 {
        return ThreeJRow::empty();
    }
    let m3 = -m1 - m2;
    let jmin = l1.abs_diff(l2).max(m3.unsigned_abs());
    let jmax = l1 + l2;
    if jmin > jmax {
        return ThreeJRow::empty();
    }
    let mut values = if m1 == 0 && m2 == 0 {
        zero_m(l1, l2)
    } else {
        general(l1, l2, m1, m2, jmin, jmax)
    };
    let norm: f64 = values
        .iter()
        .enumerate()
        .map(|(i, v)| (2.0 * (jmin as f64 + i as f64) + 1.0) * v * v)
        .sum();
    let scale = 1.0 / norm.sqrt();
    let last = *values.last().unwrap();
    let want_negative = (l1 as i64 - l2 as i64 - m3 as i64).rem_euclid(2) == 1;
    let sign = if (last < 0.0) != want_negative { -scale } else { scale };
    for v in &mut values {
        *v *= sign;
    }
    ThreeJRow { jmin, values }
}

fn zero_m(l1: u32, l2: u32) -> Vec<f64> {
    let jmin = l1.abs_diff(l2);
    let jmax = l1 + l2;
    let d2 = (l1 as f64 - l2 as f64).powi(2);
    let s2 = (l1 as f64 + l2 as f64 + 1.0).powi(2);
    let n = (jmax - jmin + 1) as usize;
    let mut v = vec![0.0; n];
    v[0] = 1.0;
    let mut j = jmin;
    while j + 2 <= jmax {
        let a = (j + 1) as f64;
        let b = (j + 2) as f64;
        let r = ((a * a - d2) * (s2 - a * a) / ((b * b - d2) * (s2 - b * b))).sqrt();
        let i = (j - jmin) as usize;
        v[i + 2] = -r * v[i];
        j += 2;
    }
    v
}

/// Unevaluated sum `hi + lo` carrying roughly twice the `f64` precision.
#[derive(Clone, Copy, Debug, Default)]
struct Dd {
    hi: f64,
    lo: f64,
}

impl Dd {
    fn new(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    fn two_sum(a: f64, b: f64) -> Self {
        let s = a + b;
        let bb = s - a;
        let e = (a - (s - bb)) + (b - bb);
        Dd { hi: s, lo: e }
    }

    fn norm(hi: f64, lo: f64) -> Self {
        let s = hi + lo;
        Dd { hi: s, lo: lo - (s - hi) }
    }

    fn add(self, o: Dd) -> Dd {
        let s = Dd::two_sum(self.hi, o.hi);
        Dd::norm(s.hi, s.lo + self.lo + o.lo)
    }

    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }

    fn mul(self, o: Dd) -> Dd {
        let p = self.hi * o.hi;
        let e = self.hi.mul_add(o.hi, -p);
        Dd::norm(p, e + self.hi * o.lo + self.lo * o.hi)
    }

    fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self.add(o.mul(Dd::new(q1)).neg());
        let q2 = r.hi / o.hi;
        let r = r.add(o.mul(Dd::new(q2)).neg());
        let q3 = r.hi / o.hi;
        Dd::two_sum(q1, q2).add(Dd::new(q3))
    }

    fn sqrt(x: Dd) -> Dd {
        if x.hi <= 0.0 {
            return Dd::default();
        }
        let s = x.hi.sqrt();
        let r = x.add(Dd::new(s).mul(Dd::new(s)).neg());
        Dd::two_sum(s, r.hi / (2.0 * s))
    }

    /// Exact only for powers of two.
    fn scale(self, k: f64) -> Dd {
        Dd { hi: self.hi * k, lo: self.lo * k }
    }

    fn abs(self) -> f64 {
        self.hi.abs()
    }
}

fn dprod(a: f64, b: f64) -> Dd {
    let p = a * b;
    Dd::norm(p, a.mul_add(b, -p))
}

struct Coeffs {
    l1: f64,
    l2: f64,
    m1: f64,
    m2: f64,
    m3: f64,
}

impl Coeffs {
    fn a(&self, j: f64) -> Dd {
        let d = self.l1 - self.l2;
        let s = self.l1 + self.l2 + 1.0;
        // each factor is an exact integer in f64
        let x = dprod((j - d) * (j + d), (s - j) * (s + j));
        Dd::sqrt(x.mul(Dd::new((j - self.m3) * (j + self.m3))))
    }

    fn b(&self, j: f64) -> Dd {
        let t1 = dprod(self.l1 * (self.l1 + 1.0) - self.l2 * (self.l2 + 1.0), self.m3);
        let t2 = dprod(j * (j + 1.0), self.m2 - self.m1);
        t1.add(t2.neg()).mul(Dd::new(-(2.0 * j + 1.0)))
    }
}

const SCALE_DOWN: f64 = 1.0 / (1u128 << 100) as f64;

// j A(j+1) f(j+1) + B(j) f(j) + (j+1) A(j) f(j-1) = 0, in double-double
fn general(l1: u32, l2: u32, m1: i32, m2: i32, jmin: u32, jmax: u32) -> Vec<f64> {
    let n = (jmax - jmin + 1) as usize;
    if n == 1 {
        return vec![1.0];
    }
    let c = Coeffs {
        l1: l1 as f64,
        l2: l2 as f64,
        m1: m1 as f64,
        m2: m2 as f64,
        m3: (-m1 - m2) as f64,
    };
    let mut f = vec![Dd::default(); n];

    // forward from jmin while the magnitude grows
    f[0] = Dd::new(1.0);
    f[1] = if jmin == 0 {
        // l1 == l2 and m3 == 0: ratio of the closed forms at j = 1 and j = 0
        Dd::new(c.m1).div(Dd::sqrt(dprod(c.l1, c.l1 + 1.0)))
    } else {
        let j = jmin as f64;
        c.b(j).neg().div(c.a(j + 1.0).mul(Dd::new(j)))
    };
    let mut fend = 1;
    while fend < n - 1 && f[fend].abs() > f[fend - 1].abs() {
        let j = (jmin as usize + fend) as f64;
        let num = c.b(j).mul(f[fend]).add(c.a(j).mul(Dd::new(j + 1.0)).mul(f[fend - 1]));
        f[fend + 1] = num.neg().div(c.a(j + 1.0).mul(Dd::new(j)));
        fend += 1;
        if f[fend].abs() > BIG {
            for x in &mut f[..=fend] {
                *x = x.scale(SCALE_DOWN);
            }
        }
    }
    if fend < n - 1 {
        // backward from jmax down to the overlap {fend-1, fend}
        let mut g = vec![Dd::default(); n];
        g[n - 1] = Dd::new(1.0);
        let j = jmax as f64;
        g[n - 2] = c.b(j).neg().div(c.a(j).mul(Dd::new(j + 1.0)));
        let mut i = n - 2;
        while i > fend - 1 {
            let j = (jmin as usize + i) as f64;
            let num = c.b(j).mul(g[i]).add(c.a(j + 1.0).mul(Dd::new(j)).mul(g[i + 1]));
            g[i - 1] = num.neg().div(c.a(j).mul(Dd::new(j + 1.0)));
            i -= 1;
            if g[i].abs() > BIG {
                for x in &mut g[i..] {
                    *x = x.scale(SCALE_DOWN);
                }
            }
        }
        let lo = fend - 1;
        let num = f[lo].mul(g[lo]).add(f[fend].mul(g[fend]));
        let den = g[lo].mul(g[lo]).add(g[fend].mul(g[fend]));
        let lambda = num.div(den);
        for k in fend + 1..n {
            f[k] = lambda.mul(g[k]);
        }
    }
    f.iter().map(|x| x.hi + x.lo).collect()
}

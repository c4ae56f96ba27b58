//! Wigner 3j and 6j symbols, Clebsch-Gordan coefficients, zero-projection
//! Gaunt factors and Clebsch-Gordan convolutions.
//!
//! Two evaluation modes are available for 3j symbols. [`Mode::Exact`] runs the
//! Racah sum over prime-factorized factorials in big-integer arithmetic and
//! rounds once at the end. [`Mode::Float`] uses three-term recurrences in the
//! third momentum, normalized by `sum_j (2j+1) (3j)^2 = 1`, and caches whole
//! rows. 6j symbols are always exact.

mod cache;
mod exact;
mod primes;
mod recurrence;

pub use recurrence::ThreeJRow;

use crate::error::{Error, Result};
use cache::MemoTable;
use once_cell::sync::OnceCell;
use primes::FactorialTable;
use std::f64::consts::PI;
use std::sync::Arc;

pub const DEFAULT_CAP: u32 = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ThreeJKey {
    pub l1: u32,
    pub l2: u32,
    pub l3: u32,
    pub m1: i32,
    pub m2: i32,
    pub m3: i32,
}

impl ThreeJKey {
    pub fn new(l1: u32, l2: u32, l3: u32, m1: i32, m2: i32, m3: i32) -> Self {
        ThreeJKey { l1, l2, l3, m1, m2, m3 }
    }

    pub fn zero_m(l1: u32, l2: u32, l3: u32) -> Self {
        Self::new(l1, l2, l3, 0, 0, 0)
    }

    fn big_j(&self) -> u32 {
        self.l1 + self.l2 + self.l3
    }

    /// Projection, triangle and zero-projection parity selection rules.
    pub fn selection_allowed(&self) -> bool {
        let proj_ok = self.m1.unsigned_abs() <= self.l1
            && self.m2.unsigned_abs() <= self.l2
            && self.m3.unsigned_abs() <= self.l3
            && self.m1 + self.m2 + self.m3 == 0;
        let tri_ok = self.l3 >= self.l1.abs_diff(self.l2) && self.l3 <= self.l1 + self.l2;
        let parity_ok = !(self.m1 == 0 && self.m2 == 0 && self.big_j() % 2 == 1);
        proj_ok && tri_ok && parity_ok
    }

    pub fn max_momentum(&self) -> u32 {
        self.l1.max(self.l2).max(self.l3)
    }

    /// Representative under the 12 classical symmetries, and the sign `s`
    /// with `symbol(self) = s * symbol(canonical)`.
    pub fn canonical(&self) -> (ThreeJKey, f64) {
        let cols = [(self.l1, self.m1), (self.l2, self.m2), (self.l3, self.m3)];
        let odd = if self.big_j() % 2 == 1 { -1.0 } else { 1.0 };
        const PERMS: [([usize; 3], bool); 6] = [
            ([0, 1, 2], false),
            ([1, 2, 0], false),
            ([2, 0, 1], false),
            ([1, 0, 2], true),
            ([0, 2, 1], true),
            ([2, 1, 0], true),
        ];
        let mut best: Option<(ThreeJKey, f64)> = None;
        for (p, is_odd) in PERMS {
            for flip in [false, true] {
                let s = if flip { -1 } else { 1 };
                let k = ThreeJKey::new(
                    cols[p[0]].0,
                    cols[p[1]].0,
                    cols[p[2]].0,
                    s * cols[p[0]].1,
                    s * cols[p[1]].1,
                    s * cols[p[2]].1,
                );
                let sign = if is_odd ^ flip { odd } else { 1.0 };
                if best.is_none_or(|(b, _)| k < b) {
                    best = Some((k, sign));
                }
            }
        }
        best.unwrap()
    }
}

/// Arguments of `{a b e; c d f}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SixJKey {
    pub a: u32,
    pub b: u32,
    pub e: u32,
    pub c: u32,
    pub d: u32,
    pub f: u32,
}

impl SixJKey {
    pub fn new(a: u32, b: u32, e: u32, c: u32, d: u32, f: u32) -> Self {
        SixJKey { a, b, e, c, d, f }
    }

    pub fn max_momentum(&self) -> u32 {
        [self.a, self.b, self.e, self.c, self.d, self.f].into_iter().max().unwrap()
    }

    fn canonical(&self) -> SixJKey {
        // columns may be permuted freely and any two columns may swap rows
        let cols = [(self.a, self.c), (self.b, self.d), (self.e, self.f)];
        let mut best = *self;
        for p in [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]] {
            for swap in [[false; 3], [true, true, false], [true, false, true], [false, true, true]] {
                let c: Vec<(u32, u32)> = (0..3)
                    .map(|i| {
                        let (u, l) = cols[p[i]];
                        if swap[i] {
                            (l, u)
                        } else {
                            (u, l)
                        }
                    })
                    .collect();
                let k = SixJKey::new(c[0].0, c[1].0, c[2].0, c[0].1, c[1].1, c[2].1);
                best = best.min(k);
            }
        }
        best
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Exact,
    Float,
}

/// Leaf momenta coupled left to right through the intermediates to the
/// terminal momentum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CgConvolutionPath {
    pub leaves: Vec<u32>,
    pub intermediates: Vec<u32>,
    pub terminal: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct RowKey {
    l1: u32,
    l2: u32,
    m1: i32,
    m2: i32,
}

/// A cached recurrence row seen through a symmetry of the 3j symbol.
#[derive(Clone, Debug)]
pub struct RowView {
    row: Arc<ThreeJRow>,
    // (-1)^(l1+l2+j) when the view is an odd image of the stored row
    odd: bool,
    l12: u32,
}

impl RowView {
    pub fn get(&self, j: u32) -> f64 {
        let v = self.row.get(j);
        if self.odd && (self.l12 + j) % 2 == 1 {
            -v
        } else {
            v
        }
    }

    pub fn jmin(&self) -> u32 {
        self.row.jmin
    }

    pub fn jmax(&self) -> Option<u32> {
        self.row.jmax()
    }
}

/// Symbol engine with an exact-mode capacity cap and shared memo tables.
#[derive(Debug)]
pub struct Wigner {
    cap: u32,
    factorials: OnceCell<FactorialTable>,
    exact3j: MemoTable<ThreeJKey, f64>,
    rows: MemoTable<RowKey, Arc<ThreeJRow>>,
    six: MemoTable<SixJKey, f64>,
}

static GLOBAL: OnceCell<Wigner> = OnceCell::new();

impl Wigner {
    pub fn new(cap: u32) -> Self {
        Wigner {
            cap,
            factorials: OnceCell::new(),
            exact3j: MemoTable::new(),
            rows: MemoTable::new(),
            six: MemoTable::new(),
        }
    }

    /// Process-wide engine. Uses [`DEFAULT_CAP`] unless
    /// [`Wigner::init_global`] ran first.
    pub fn global() -> &'static Wigner {
        GLOBAL.get_or_init(|| Wigner::new(DEFAULT_CAP))
    }

    /// Sets the cap of the global engine. Returns `false` if it already exists
    /// with a different cap.
    pub fn init_global(cap: u32) -> bool {
        GLOBAL.get_or_init(|| Wigner::new(cap)).cap == cap
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    fn factorials(&self) -> &FactorialTable {
        self.factorials.get_or_init(|| FactorialTable::new(4 * self.cap + 2))
    }

    fn check_cap(&self, momentum: u32) -> Result<()> {
        if momentum > self.cap {
            Err(Error::Capacity { momentum, cap: self.cap })
        } else {
            Ok(())
        }
    }

    pub fn three_j(&self, key: ThreeJKey, mode: Mode) -> Result<f64> {
        if !key.selection_allowed() {
            return Ok(0.0);
        }
        match mode {
            Mode::Exact => {
                self.check_cap(key.max_momentum())?;
                let (canon, sign) = key.canonical();
                let v = self
                    .exact3j
                    .get_or_insert_with(canon, || exact::three_j(self.factorials(), &canon));
                Ok(sign * v)
            }
            Mode::Float => Ok(self.row(key.l1, key.l2, key.m1, key.m2).get(key.l3)),
        }
    }

    /// Row `(l1 l2 j; m1 m2 -m1-m2)` over all admissible `j`.
    pub fn row(&self, l1: u32, l2: u32, m1: i32, m2: i32) -> RowView {
        let variants = [
            (RowKey { l1, l2, m1, m2 }, false),
            (RowKey { l1: l2, l2: l1, m1: m2, m2: m1 }, true),
            (RowKey { l1, l2, m1: -m1, m2: -m2 }, true),
            (RowKey { l1: l2, l2: l1, m1: -m2, m2: -m1 }, false),
        ];
        let (k, odd) = variants
            .into_iter()
            .min_by_key(|(k, _)| (k.l1, k.l2, k.m1, k.m2))
            .unwrap();
        let row = self
            .rows
            .get_or_insert_with(k, || Arc::new(recurrence::three_j_row(k.l1, k.l2, k.m1, k.m2)));
        RowView { row, odd, l12: l1 + l2 }
    }

    pub fn six_j(&self, key: SixJKey) -> Result<f64> {
        self.check_cap(key.max_momentum())?;
        let canon = key.canonical();
        Ok(self
            .six
            .get_or_insert_with(canon, || exact::six_j(self.factorials(), &canon)))
    }

    /// Number of cached exact 3j symbols, recurrence rows and 6j symbols.
    pub fn cache_sizes(&self) -> (usize, usize, usize) {
        (self.exact3j.len(), self.rows.len(), self.six.len())
    }
}

pub fn three_j(key: ThreeJKey, mode: Mode) -> Result<f64> {
    Wigner::global().three_j(key, mode)
}

pub fn three_j_row(l1: u32, l2: u32, m1: i32, m2: i32) -> RowView {
    Wigner::global().row(l1, l2, m1, m2)
}

/// Like [`three_j_row`] but bypasses the shared cache, for one-off rows.
pub fn three_j_row_uncached(l1: u32, l2: u32, m1: i32, m2: i32) -> ThreeJRow {
    recurrence::three_j_row(l1, l2, m1, m2)
}

pub fn six_j(key: SixJKey) -> Result<f64> {
    Wigner::global().six_j(key)
}

fn parity(n: i64) -> f64 {
    if n.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `C^{LM}_{l1 m1 l2 m2}`.
pub fn clebsch_gordan(l1: u32, m1: i32, l2: u32, m2: i32, big_l: u32, big_m: i32) -> Result<f64> {
    clebsch_gordan_mode(l1, m1, l2, m2, big_l, big_m, Mode::Float)
}

pub fn clebsch_gordan_mode(
    l1: u32,
    m1: i32,
    l2: u32,
    m2: i32,
    big_l: u32,
    big_m: i32,
    mode: Mode,
) -> Result<f64> {
    if big_m != m1 + m2 {
        return Ok(0.0);
    }
    let tj = three_j(ThreeJKey::new(l1, l2, big_l, m1, m2, -big_m), mode)?;
    Ok(parity(l1 as i64 - l2 as i64 + big_m as i64) * (2.0 * big_l as f64 + 1.0).sqrt() * tj)
}

/// `(C^{L0}_{l0l0})^2 = (2L+1) (3j(l l L; 0 0 0))^2` for `L = 0..=lmax_big`.
pub fn three_j_sq_zero_table(l: u32, lmax_big: u32) -> Result<Vec<f64>> {
    if lmax_big > 2 * l {
        return Err(Error::InvalidArgument(format!(
            "table length L = {lmax_big} exceeds 2l = {}",
            2 * l
        )));
    }
    let row = three_j_row(l, l, 0, 0);
    Ok((0..=lmax_big)
        .map(|big_l| {
            let v = row.get(big_l);
            (2.0 * big_l as f64 + 1.0) * v * v
        })
        .collect())
}

/// `sqrt((2l1+1)(2l2+1)(2l3+1)/4pi) * 3j(l1 l2 l3; 0 0 0)`.
pub fn gaunt_zero(l1: u32, l2: u32, l3: u32) -> Result<f64> {
    let tj = three_j(ThreeJKey::zero_m(l1, l2, l3), Mode::Float)?;
    let n = (2 * l1 + 1) as f64 * (2 * l2 + 1) as f64 * (2 * l3 + 1) as f64;
    Ok((n / (4.0 * PI)).sqrt() * tj)
}

/// Nested Clebsch-Gordan convolution with all leaf and terminal projections
/// equal to zero.
pub fn cg_convolution(path: &CgConvolutionPath) -> Result<f64> {
    let q = path.leaves.len();
    if !(2..=3).contains(&q) {
        return Err(Error::UnsupportedOrder(q));
    }
    if path.intermediates.len() != q - 2 {
        return Err(Error::InvalidArgument(format!(
            "order {q} needs {} intermediate momenta, got {}",
            q - 2,
            path.intermediates.len()
        )));
    }
    let l = path.terminal;
    match q {
        2 => clebsch_gordan(path.leaves[0], 0, path.leaves[1], 0, l, 0),
        _ => {
            let (l1, l2, l3) = (path.leaves[0], path.leaves[1], path.leaves[2]);
            let big_l1 = path.intermediates[0];
            let lim = big_l1 as i32;
            let mut acc = 0.0;
            for mu in -lim..=lim {
                let a = clebsch_gordan(l1, 0, l2, 0, big_l1, mu)?;
                if a == 0.0 {
                    continue;
                }
                acc += a * clebsch_gordan(big_l1, mu, l3, 0, l, 0)?;
            }
            Ok(acc)
        }
    }
}

/// Squared zero-projection symbols `3j(l1 l2 l; 0 0 0)^2` for a fixed `l`
/// and all `l1, l2 <= lmax`.
#[derive(Clone, Debug)]
pub struct ZeroMTable {
    pub l: u32,
    pub lmax: u32,
    sq: Vec<f64>,
}

impl ZeroMTable {
    pub fn new(l: u32, lmax: u32) -> Self {
        let n = lmax as usize + 1;
        let mut sq = vec![0.0; n * n];
        for l1 in 0..=lmax {
            // (l1 l j) and (l1 j l) agree whenever the symbol is nonzero
            let row = recurrence::three_j_row(l1, l, 0, 0);
            let lo = l1.abs_diff(l);
            let hi = (l1 + l).min(lmax);
            let mut l2 = lo;
            while l2 <= hi {
                let v = row.get(l2);
                sq[l1 as usize * n + l2 as usize] = v * v;
                l2 += 2;
            }
        }
        ZeroMTable { l, lmax, sq }
    }

    pub fn get(&self, l1: u32, l2: u32) -> f64 {
        let n = self.lmax as usize + 1;
        if l1 > self.lmax || l2 > self.lmax {
            return 0.0;
        }
        self.sq[l1 as usize * n + l2 as usize]
    }

    /// Nonzero range of `l2` for a given `l1`, stepping by 2.
    pub fn l2_range(&self, l1: u32) -> impl Iterator<Item = u32> {
        let lo = l1.abs_diff(self.l);
        let hi = (l1 + self.l).min(self.lmax);
        (lo..=hi).step_by(2)
    }
}

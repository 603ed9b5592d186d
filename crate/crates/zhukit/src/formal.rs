//! Two-variable expansion maps, sector decompositions of bi-indexed
//! coefficient windows, and exact coefficient identities for the untwisted
//! free boson.

use crate::error::{Error, Result};
use crate::fock::{FockVector, HeisenbergAlgebra};
use crate::rational::{binom, neg_one_pow, rat_int, Rational};
use num::Zero;
use std::collections::BTreeMap;

/// Expansion direction of `x^j y^k (x-y)^l`.
///
/// Term pairs `(e1, e2)` are exponents of, in order:
/// `XThenY` gives `(x, y)`, `YThenX` gives `(y, x)`,
/// `YThenXMinusY` gives `(y, x-y)`, `XMinusYThenY` gives `(x-y, y)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExpansionDir {
    XThenY,
    YThenX,
    YThenXMinusY,
    XMinusYThenY,
}

/// Truncated coefficient stream of one expanded monomial.
#[derive(Clone, Debug, PartialEq)]
pub struct MonomialExpansion {
    pub dir: ExpansionDir,
    pub j: Rational,
    pub k: Rational,
    pub l: i64,
    pub terms: Vec<(Rational, Rational, Rational)>,
}

/// Expands `x^j y^k (x-y)^l` in the chosen direction, keeping the first
/// `order` terms of the inner sum.
pub fn iota_expand(
    dir: ExpansionDir,
    j: &Rational,
    k: &Rational,
    l: i64,
    order: usize,
) -> MonomialExpansion {
    let lr = rat_int(l);
    let mut terms = Vec::with_capacity(order);
    for i in 0..order as i64 {
        let (e1, e2, c) = match dir {
            ExpansionDir::XThenY => (
                j + &lr - rat_int(i),
                k + rat_int(i),
                binom(&lr, i) * neg_one_pow(i),
            ),
            ExpansionDir::YThenX => (
                k + &lr - rat_int(i),
                j + rat_int(i),
                binom(&lr, i) * neg_one_pow(l - i),
            ),
            ExpansionDir::YThenXMinusY => (
                k + j - rat_int(i),
                lr.clone() + rat_int(i),
                binom(j, i),
            ),
            ExpansionDir::XMinusYThenY => (
                j + &lr - rat_int(i),
                k + rat_int(i),
                binom(j, i),
            ),
        };
        if c.is_zero() {
            continue;
        }
        terms.push((e1, e2, c));
    }
    MonomialExpansion { dir, j: j.clone(), k: k.clone(), l, terms }
}

/// Which variable of a bi-indexed window to restrict.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variable {
    First,
    Second,
}

/// A finitely supported rectangular window of vector-valued coefficients,
/// indexed over `(1/T)Z x (1/T)Z`. Indices are stored as numerators over `T`.
/// Out-of-window queries are errors, not zeros.
#[derive(Clone, Debug, PartialEq)]
pub struct BiseriesWindow {
    pub t: u32,
    pub lo1: i64,
    pub hi1: i64,
    pub lo2: i64,
    pub hi2: i64,
    data: BTreeMap<(i64, i64), FockVector>,
}

impl BiseriesWindow {
    pub fn new(t: u32, lo1: i64, hi1: i64, lo2: i64, hi2: i64) -> Self {
        assert!(t >= 1 && lo1 <= hi1 && lo2 <= hi2);
        Self { t, lo1, hi1, lo2, hi2, data: BTreeMap::new() }
    }

    fn in_window(&self, p: i64, q: i64) -> bool {
        (self.lo1..=self.hi1).contains(&p) && (self.lo2..=self.hi2).contains(&q)
    }

    pub fn set(&mut self, p: i64, q: i64, v: FockVector) {
        assert!(self.in_window(p, q), "index outside the declared window");
        if v.is_zero() {
            self.data.remove(&(p, q));
        } else {
            self.data.insert((p, q), v);
        }
    }

    pub fn get(&self, p: i64, q: i64) -> Result<FockVector> {
        if !self.in_window(p, q) {
            return Err(Error::Precondition(format!(
                "window index ({p}, {q})/{} out of bounds",
                self.t
            )));
        }
        Ok(self.data.get(&(p, q)).cloned().unwrap_or_else(FockVector::zero))
    }

    pub fn support(&self) -> impl Iterator<Item = (&(i64, i64), &FockVector)> {
        self.data.iter()
    }

    /// Restriction to exponents congruent to `s/T` mod `Z` in one variable.
    pub fn sector_component(&self, s: i64, var: Variable) -> BiseriesWindow {
        let t = self.t as i64;
        let mut out = Self::new(self.t, self.lo1, self.hi1, self.lo2, self.hi2);
        for (&(p, q), v) in &self.data {
            let probe = match var {
                Variable::First => p,
                Variable::Second => q,
            };
            if probe.rem_euclid(t) == s.rem_euclid(t) {
                out.data.insert((p, q), v.clone());
            }
        }
        out
    }

    pub fn add(&self, other: &BiseriesWindow) -> BiseriesWindow {
        assert_eq!(
            (self.t, self.lo1, self.hi1, self.lo2, self.hi2),
            (other.t, other.lo1, other.hi1, other.lo2, other.hi2)
        );
        let mut out = self.clone();
        for (&(p, q), v) in &other.data {
            let cur = out.data.remove(&(p, q)).unwrap_or_else(FockVector::zero);
            let sum = cur.add(v);
            if !sum.is_zero() {
                out.data.insert((p, q), sum);
            }
        }
        out
    }
}

/// The untwisted coefficient identity relating iterate modes to products of
/// modes:
///
/// `sum_i binom(j, i) (a_{l+i} b)_{j+k-i} w
///  = sum_i binom(l, i) (-1)^i (a_{l+j-i} b_{k+i}
///    + (-1)^{l+1} b_{l+k-i} a_{j+i}) w`,
///
/// both sides evaluated exactly and compared.
pub fn borcherds_coeff_check(
    alg: &HeisenbergAlgebra,
    a: &FockVector,
    b: &FockVector,
    w: &FockVector,
    j: i64,
    k: i64,
    l: i64,
) -> Result<bool> {
    Ok(iterate_side(alg, a, b, w, j, k, l)? == product_side(alg, a, b, w, j, k, l, 0)?)
}

/// Left-hand side: iterate modes `(a_{l+i} b)_{j+k-i} w`.
fn iterate_side(
    alg: &HeisenbergAlgebra,
    a: &FockVector,
    b: &FockVector,
    w: &FockVector,
    j: i64,
    k: i64,
    l: i64,
) -> Result<FockVector> {
    let mut acc = FockVector::zero();
    let i_max = mode_vanishing_bound(a, b) - l;
    for i in 0..=i_max {
        let c = binom(&rat_int(j), i);
        if c.is_zero() {
            continue;
        }
        let inner = alg.mode(a, l + i, b)?;
        if inner.is_zero() {
            continue;
        }
        acc = acc.add(&alg.mode(&inner, j + k - i, w)?.scale(&c));
    }
    Ok(acc)
}

/// Right-hand side with the binomial offset `m`:
/// `sum_i binom(l+m, i) (-1)^i (a_{l+m+j-i} b_{k-m+i}
///  + (-1)^{l+m+1} b_{l+k-i} a_{j+i}) w`.
fn product_side(
    alg: &HeisenbergAlgebra,
    a: &FockVector,
    b: &FockVector,
    w: &FockVector,
    j: i64,
    k: i64,
    l: i64,
    m: i64,
) -> Result<FockVector> {
    let lm = l + m;
    let mut acc = FockVector::zero();
    let i_max1 = mode_vanishing_bound(b, w) - (k - m);
    for i in 0..=i_max1 {
        let c = binom(&rat_int(lm), i) * neg_one_pow(i);
        if c.is_zero() {
            continue;
        }
        let bw = alg.mode(b, k - m + i, w)?;
        if bw.is_zero() {
            continue;
        }
        acc = acc.add(&alg.mode(a, lm + j - i, &bw)?.scale(&c));
    }
    let swap = neg_one_pow(lm + 1);
    let i_max2 = mode_vanishing_bound(a, w) - j;
    for i in 0..=i_max2 {
        let c = binom(&rat_int(lm), i) * neg_one_pow(i) * &swap;
        if c.is_zero() {
            continue;
        }
        let aw = alg.mode(a, j + i, w)?;
        if aw.is_zero() {
            continue;
        }
        acc = acc.add(&alg.mode(b, l + k - i, &aw)?.scale(&c));
    }
    Ok(acc)
}

/// Smallest `B` with `u_i v = 0` for all `i > B`, by weight positivity.
fn mode_vanishing_bound(u: &FockVector, v: &FockVector) -> i64 {
    let wu = u.max_weight().unwrap_or(0);
    let wv = v.max_weight().unwrap_or(0);
    wu + wv - 1
}

/// The triangular-inversion identity behind the iterate expansion:
/// `(a_l b)_{j+k} w = sum_{m=0}^{L-l} binom(-j, m) * RHS(l+m)`,
/// valid whenever `a_i b = 0` for `i > L`.
pub fn express_ysab_check(
    alg: &HeisenbergAlgebra,
    a: &FockVector,
    b: &FockVector,
    w: &FockVector,
    j: i64,
    k: i64,
    l: i64,
    l_bound: i64,
) -> Result<bool> {
    // The stated vanishing must actually hold.
    for i in l_bound + 1..=mode_vanishing_bound(a, b) {
        if !alg.mode(a, i, b)?.is_zero() {
            return Err(Error::Precondition(format!(
                "a_i b != 0 at i = {i} > L = {l_bound}"
            )));
        }
    }
    let lhs = if l > l_bound {
        FockVector::zero()
    } else {
        let ab = alg.mode(a, l, b)?;
        alg.mode(&ab, j + k, w)?
    };
    let mut rhs = FockVector::zero();
    for m in 0..=(l_bound - l) {
        let c = binom(&rat_int(-j), m);
        if c.is_zero() {
            continue;
        }
        rhs = rhs.add(&product_side(alg, a, b, w, j, k, l, m)?.scale(&c));
    }
    Ok(lhs == rhs)
}

/// `(a_{-2} 1)_n w = -n a_{n-1} w`.
pub fn derivation_check(
    alg: &HeisenbergAlgebra,
    a: &FockVector,
    n: i64,
    w: &FockVector,
) -> Result<bool> {
    let da = alg.mode(a, -2, &alg.vacuum())?;
    let lhs = alg.mode(&da, n, w)?;
    let rhs = alg.mode(a, n - 1, w)?.scale(&rat_int(-n));
    Ok(lhs == rhs)
}

/// Vacuum-first coefficient dichotomy: `((1)_l a)_k w = delta_{l,-1} a_k w`.
pub fn ysonea_check(
    alg: &HeisenbergAlgebra,
    a: &FockVector,
    w: &FockVector,
    k: i64,
    l: i64,
) -> Result<bool> {
    let one_a = alg.mode(&alg.vacuum(), l, a)?;
    let lhs = alg.mode(&one_a, k, w)?;
    let rhs = if l == -1 {
        alg.mode(a, k, w)?
    } else {
        FockVector::zero()
    };
    Ok(lhs == rhs)
}

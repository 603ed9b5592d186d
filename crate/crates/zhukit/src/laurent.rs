//! Sparse Laurent polynomials over the rationals.

use crate::error::{Error, Result};
use crate::rational::{rat_int, render, Rational};
use num::Zero;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// A finitely supported map from integer exponents to nonzero rational
/// coefficients. Exponents are machine integers; the windows arising here
/// are tiny, and shifts are overflow-checked.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct LaurentPoly {
    coeffs: BTreeMap<i64, Rational>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    /// `c * z^e`.
    pub fn monomial(e: i64, c: Rational) -> Self {
        let mut p = Self::zero();
        p.add_term(e, c);
        p
    }

    /// `z^e`.
    pub fn unit_monomial(e: i64) -> Self {
        Self::monomial(e, rat_int(1))
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (i64, Rational)>) -> Self {
        let mut p = Self::zero();
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, e: i64) -> Rational {
        self.coeffs.get(&e).cloned().unwrap_or_else(Rational::zero)
    }

    /// Adds `c * z^e` in place, dropping the entry if it cancels.
    pub fn add_term(&mut self, e: i64, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(e).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.coeffs.remove(&e);
        }
    }

    /// Exponent/coefficient pairs in ascending exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &Rational)> {
        self.coeffs.iter().map(|(e, c)| (*e, c))
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn support_len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            coeffs: self
                .coeffs
                .iter()
                .map(|(e, v)| (*e, v * c))
                .collect(),
        }
    }

    /// Multiplication by `z^k` with an overflow check on exponents.
    pub fn shift(&self, k: i64) -> Result<Self> {
        let mut out = BTreeMap::new();
        for (e, c) in &self.coeffs {
            let shifted = e.checked_add(k).ok_or(Error::ExponentOverflow)?;
            out.insert(shifted, c.clone());
        }
        Ok(Self { coeffs: out })
    }

    /// True iff the support lies in `[lo, hi]`.
    pub fn supported_in(&self, lo: i64, hi: i64) -> bool {
        self.coeffs.keys().all(|e| (lo..=hi).contains(e))
    }

    /// Restriction to exponents satisfying the predicate.
    pub fn filter_exponents(&self, keep: impl Fn(i64) -> bool) -> Self {
        Self {
            coeffs: self
                .coeffs
                .iter()
                .filter(|(e, _)| keep(**e))
                .map(|(e, c)| (*e, c.clone()))
                .collect(),
        }
    }
}

impl Add<&LaurentPoly> for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.coeffs {
            out.add_term(*e, c.clone());
        }
        out
    }
}

impl Sub<&LaurentPoly> for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.coeffs {
            out.add_term(*e, -c.clone());
        }
        out
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        self.scale(&-rat_int(1))
    }
}

impl Mul<&LaurentPoly> for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (e1, c1) in &self.coeffs {
            for (e2, c2) in &rhs.coeffs {
                let e = e1.checked_add(*e2).expect("exponent overflow in product");
                out.add_term(e, c1 * c2);
            }
        }
        out
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms() {
            if first {
                first = false;
            } else {
                write!(f, " + ")?;
            }
            write!(f, "{}*z^{}", render(c), e)?;
        }
        Ok(())
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// The residue `Res_x((1+x)^Q x^t sum_j S(j) x^(-j-1))`, evaluated as
/// `sum_{k >= 0} binom(Q, k) S(t+k)` over the finitely many `k` with
/// `t + k <= j_max`.
///
/// The caller certifies that `S(j) = 0` for `j > j_max`.
pub fn residue_kernel(
    q: &Rational,
    t: i64,
    j_max: i64,
    mut s: impl FnMut(i64) -> LaurentPoly,
) -> LaurentPoly {
    let mut out = LaurentPoly::zero();
    let mut row = crate::rational::BinomRow::new(q);
    let mut k = 0i64;
    while t + k <= j_max {
        let b = row.next().unwrap();
        if !b.is_zero() {
            let term = s(t + k);
            for (e, c) in term.terms() {
                out.add_term(e, c * &b);
            }
        }
        k += 1;
    }
    out
}

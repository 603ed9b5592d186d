//! Truncated rank-1 free-boson Fock space with exact rational coefficients.
//!
//! Basis monomials are partitions: `h(-n_1)...h(-n_k)|0>` with
//! `n_1 >= ... >= n_k >= 1`, of weight `sum n_i`. Modes of arbitrary states
//! are reduced to generator modes through the iterate recursion
//!
//! `(h_l a')_j = sum_i binom(l, i) (-1)^i (h_{l-i} a'_{j+i}
//!              + (-1)^{l+1} a'_{l+j-i} h_i)`
//!
//! with `l = -k` for the largest part `k`, which terminates by weight
//! induction and is memoized per basis triple. Generator modes act by
//! `[h(m), h(n)] = m delta_{m+n,0}` with `<h,h> = 1`.

use crate::error::{Error, Result};
use crate::laurent::LaurentPoly;
use crate::rational::{binom_int, neg_one_pow, render, Rational};
use num::Zero;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Mutex;

/// A partition-indexed basis monomial; parts are stored descending.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    parts: Vec<u32>,
}

impl Monomial {
    pub fn vacuum() -> Self {
        Self { parts: Vec::new() }
    }

    pub fn from_parts(mut parts: Vec<u32>) -> Self {
        assert!(parts.iter().all(|&p| p >= 1), "parts must be positive");
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Self { parts }
    }

    pub fn is_vacuum(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn weight(&self) -> i64 {
        self.parts.iter().map(|&p| p as i64).sum()
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    /// Splits off the largest part.
    fn split_first(&self) -> Option<(u32, Monomial)> {
        let (&first, rest) = self.parts.split_first()?;
        Some((first, Monomial { parts: rest.to_vec() }))
    }

    /// Adds one part `p >= 1`.
    fn with_part(&self, p: u32) -> Monomial {
        let mut parts = self.parts.clone();
        let pos = parts.partition_point(|&x| x >= p);
        parts.insert(pos, p);
        Monomial { parts }
    }

    /// Removes one copy of part `p`, if present, and counts the copies.
    fn annihilate(&self, p: u32) -> Option<(usize, Monomial)> {
        let count = self.parts.iter().filter(|&&x| x == p).count();
        if count == 0 {
            return None;
        }
        let mut parts = self.parts.clone();
        let pos = parts.iter().position(|&x| x == p).unwrap();
        parts.remove(pos);
        Some((count, Monomial { parts }))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_vacuum() {
            return write!(f, "|0>");
        }
        for &p in &self.parts {
            write!(f, "h(-{p})")?;
        }
        write!(f, "|0>")
    }
}

/// Finitely supported rational combination of basis monomials.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct FockVector {
    terms: BTreeMap<Monomial, Rational>,
}

impl FockVector {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn basis(m: Monomial) -> Self {
        let mut v = Self::zero();
        v.add_term(m, crate::rational::rat_int(1));
        v
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
            Entry::Vacant(e) => {
                e.insert(c);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self { terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    /// Highest weight present, or `None` on the zero vector.
    pub fn max_weight(&self) -> Option<i64> {
        self.terms.keys().map(Monomial::weight).max()
    }

    /// Splits into homogeneous components, ascending in weight.
    pub fn homogeneous_components(&self) -> BTreeMap<i64, FockVector> {
        let mut out: BTreeMap<i64, FockVector> = BTreeMap::new();
        for (m, c) in self.terms() {
            out.entry(m.weight())
                .or_default()
                .add_term(m.clone(), c.clone());
        }
        out
    }

    /// True iff all monomials share one weight (vacuously true for zero).
    pub fn is_homogeneous(&self) -> bool {
        self.homogeneous_components().len() <= 1
    }

    /// The common weight of a homogeneous nonzero vector.
    pub fn weight(&self) -> Option<i64> {
        let comps = self.homogeneous_components();
        if comps.len() == 1 {
            comps.keys().next().copied()
        } else {
            None
        }
    }
}

impl fmt::Display for FockVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{}*{}", render(c), m)?;
        }
        Ok(())
    }
}

/// All partitions of `w` in a fixed deterministic order.
pub fn partitions(w: i64) -> Vec<Monomial> {
    fn go(remaining: u32, max_part: u32, stack: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if remaining == 0 {
            out.push(Monomial::from_parts(stack.clone()));
            return;
        }
        let top = remaining.min(max_part);
        for p in (1..=top).rev() {
            stack.push(p);
            go(remaining - p, p, stack, out);
            stack.pop();
        }
    }
    if w < 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    go(w as u32, w as u32, &mut Vec::new(), &mut out);
    out
}

/// The truncated free-boson vertex algebra.
///
/// Every operation is exact; anything that would produce a component above
/// `cutoff` fails loudly instead of truncating.
pub struct HeisenbergAlgebra {
    cutoff: i64,
    memo: Mutex<HashMap<(Monomial, i64, Monomial), FockVector>>,
}

impl HeisenbergAlgebra {
    pub fn new(cutoff: i64) -> Self {
        assert!(cutoff >= 0);
        Self { cutoff, memo: Mutex::new(HashMap::new()) }
    }

    pub fn cutoff(&self) -> i64 {
        self.cutoff
    }

    /// The grading floor: weights start at zero.
    pub fn delta(&self) -> i64 {
        0
    }

    pub fn vacuum(&self) -> FockVector {
        FockVector::basis(Monomial::vacuum())
    }

    /// The generator state `h = h(-1)|0>`.
    pub fn h(&self) -> FockVector {
        FockVector::basis(Monomial::from_parts(vec![1]))
    }

    /// Ordered basis of the weight-`w` subspace.
    pub fn weight_basis(&self, w: i64) -> Vec<Monomial> {
        assert!(w <= self.cutoff, "basis request beyond cutoff");
        partitions(w)
    }

    /// `h(t)` applied to a vector.
    fn generator_mode(&self, t: i64, v: &FockVector) -> FockVector {
        let mut out = FockVector::zero();
        if t == 0 {
            return out;
        }
        for (m, c) in v.terms() {
            if t < 0 {
                out.add_term(m.with_part((-t) as u32), c.clone());
            } else if let Some((count, rest)) = m.annihilate(t as u32) {
                out.add_term(rest, c * crate::rational::rat_int(count as i64 * t));
            }
        }
        out
    }

    fn mode_monomial(&self, a: &Monomial, j: i64, b: &Monomial) -> FockVector {
        let target = a.weight() + b.weight() - j - 1;
        if target < 0 {
            return FockVector::zero();
        }
        if let Some((k, rest)) = a.split_first() {
            let key = (a.clone(), j, b.clone());
            if let Some(hit) = self.memo.lock().unwrap().get(&key) {
                return hit.clone();
            }
            let l = -(k as i64);
            let mut out = FockVector::zero();

            let i_max = rest.weight() + b.weight() - j - 1;
            for i in 0..=i_max {
                let c = binom_int(l, i) * neg_one_pow(i);
                if c.is_zero() {
                    continue;
                }
                let inner = self.mode_monomial(&rest, j + i, b);
                if !inner.is_zero() {
                    out = out.add(&self.generator_mode(l - i, &inner).scale(&c));
                }
            }

            let swap_sign = neg_one_pow(l + 1);
            for i in 1..=b.weight() {
                let c = binom_int(l, i) * neg_one_pow(i) * &swap_sign;
                if c.is_zero() {
                    continue;
                }
                if let Some((count, hb)) = b.annihilate(i as u32) {
                    let scaled = crate::rational::rat_int(count as i64 * i) * c;
                    let inner = self.mode_monomial(&rest, l + j - i, &hb);
                    out = out.add(&inner.scale(&scaled));
                }
            }

            debug_assert!(
                out.terms().all(|(m, _)| m.weight() == target),
                "mode grading violated for {a}_{j} {b}"
            );
            self.memo.lock().unwrap().insert(key, out.clone());
            out
        } else {
            // Vacuum modes: identity at index -1, zero otherwise.
            if j == -1 {
                FockVector::basis(b.clone())
            } else {
                FockVector::zero()
            }
        }
    }

    /// Exact bilinear mode action `a_j b`.
    pub fn mode(&self, a: &FockVector, j: i64, b: &FockVector) -> Result<FockVector> {
        let mut out = FockVector::zero();
        for (ma, ca) in a.terms() {
            for (mb, cb) in b.terms() {
                let target = ma.weight() + mb.weight() - j - 1;
                if target > self.cutoff {
                    return Err(Error::CutoffExceeded { needed: target, cutoff: self.cutoff });
                }
                let term = self.mode_monomial(ma, j, mb);
                out = out.add(&term.scale(&(ca * cb)));
            }
        }
        Ok(out)
    }

    /// Replaces each `z^j` in `p` by `a_j b`.
    pub fn substitute(&self, p: &LaurentPoly, a: &FockVector, b: &FockVector) -> Result<FockVector> {
        let mut out = FockVector::zero();
        for (e, c) in p.terms() {
            let term = self.mode(a, e, b)?;
            out = out.add(&term.scale(c));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int};

    fn alg() -> HeisenbergAlgebra {
        HeisenbergAlgebra::new(12)
    }

    #[test]
    fn partition_counts() {
        let expected = [1usize, 1, 2, 3, 5, 7, 11, 15, 22, 30];
        for (w, &n) in expected.iter().enumerate() {
            assert_eq!(partitions(w as i64).len(), n, "p({w})");
        }
    }

    #[test]
    fn generator_commutator() {
        // h(1) h(-1) |0> = |0>, h(0) kills everything in sight.
        let a = alg();
        let h = a.h();
        assert_eq!(a.mode(&h, 1, &h).unwrap(), a.vacuum());
        assert!(a.mode(&h, 0, &h).unwrap().is_zero());
    }

    #[test]
    fn creation_axiom() {
        let a = alg();
        let states = [
            a.h(),
            FockVector::basis(Monomial::from_parts(vec![2, 1])),
            FockVector::basis(Monomial::from_parts(vec![3, 3, 1])),
        ];
        for st in &states {
            assert_eq!(a.mode(st, -1, &a.vacuum()).unwrap(), *st);
            for j in 0..4 {
                assert!(a.mode(st, j, &a.vacuum()).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn heisenberg_relations_via_compositions() {
        // [h(m), h(n)] w = m delta_{m+n,0} w for |m|, |n| <= 4.
        let a = alg();
        let h = a.h();
        let ws = [
            a.vacuum(),
            a.h(),
            FockVector::basis(Monomial::from_parts(vec![2, 2])),
            FockVector::basis(Monomial::from_parts(vec![3, 1])),
        ];
        for w in &ws {
            for m in -4i64..=4 {
                for n in -4i64..=4 {
                    let lhs = a
                        .mode(&h, m, &a.mode(&h, n, w).unwrap())
                        .unwrap()
                        .sub(&a.mode(&h, n, &a.mode(&h, m, w).unwrap()).unwrap());
                    let rhs = if m + n == 0 {
                        w.scale(&rat_int(m))
                    } else {
                        FockVector::zero()
                    };
                    assert_eq!(lhs, rhs, "m={m}, n={n}");
                }
            }
        }
    }

    #[test]
    fn substitute_examples() {
        let a = alg();
        let h = a.h();
        // z^-1 against (a, vacuum) is creation.
        let p = LaurentPoly::unit_monomial(-1);
        assert_eq!(a.substitute(&p, &h, &a.vacuum()).unwrap(), h);
        assert!(a
            .substitute(&LaurentPoly::zero(), &h, &h)
            .unwrap()
            .is_zero());
        // (z^-1 + z^0) on (h, h): h_0 h drops out.
        let p2 = LaurentPoly::from_terms([(-1, rat_int(1)), (0, rat_int(1))]);
        let hh = FockVector::basis(Monomial::from_parts(vec![1, 1]));
        assert_eq!(a.substitute(&p2, &h, &h).unwrap(), hh);
    }

    #[test]
    fn cutoff_is_loud() {
        let a = HeisenbergAlgebra::new(2);
        let h = a.h();
        let res = a.mode(&h, -4, &h);
        assert!(matches!(res, Err(Error::CutoffExceeded { needed: 5, cutoff: 2 })));
    }

    #[test]
    fn translation_state() {
        // a_{-2}|0> for a = h is h(-2)|0>.
        let a = alg();
        let got = a.mode(&a.h(), -2, &a.vacuum()).unwrap();
        assert_eq!(got, FockVector::basis(Monomial::from_parts(vec![2])));
        // 1_{-2}|0> = 0.
        assert!(a.mode(&a.vacuum(), -2, &a.vacuum()).unwrap().is_zero());
    }

    #[test]
    fn mode_bilinearity() {
        let a = alg();
        let u = a.h().scale(&rat(2, 3)).add(&FockVector::basis(Monomial::from_parts(vec![2])));
        let v = a.h();
        let direct = a.mode(&u, 0, &v).unwrap();
        let split = a
            .mode(&a.h().scale(&rat(2, 3)), 0, &v)
            .unwrap()
            .add(&a.mode(&FockVector::basis(Monomial::from_parts(vec![2])), 0, &v).unwrap());
        assert_eq!(direct, split);
    }
}

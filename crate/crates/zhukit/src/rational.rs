//! Exact rational scalars and generalized binomial coefficients.
//!
//! Every coefficient in this crate is a [`Rational`] in lowest terms with a
//! positive denominator; no floating point is used anywhere.

use num::{BigInt, BigRational, One, Signed, Zero};
use std::cell::RefCell;
use std::collections::HashMap;

/// Arbitrary-precision rational number, always normalized.
pub type Rational = BigRational;

/// `num/den` as a rational. Panics on a zero denominator.
pub fn rat(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Integer as a rational.
pub fn rat_int(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

/// True iff `x` is an integer.
pub fn is_integer(x: &Rational) -> bool {
    x.denom().is_one()
}

/// `x` as an `i64`, if it is an integer that fits.
pub fn to_i64(x: &Rational) -> Option<i64> {
    if !is_integer(x) {
        return None;
    }
    i64::try_from(x.numer().clone()).ok()
}

/// Renders `n/d` with the denominator omitted when it is 1.
pub fn render(x: &Rational) -> String {
    if is_integer(x) {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses `"num"` or `"num/den"`. Decimal notation is rejected.
pub fn parse(s: &str) -> Result<Rational, String> {
    let s = s.trim();
    if s.contains('.') {
        return Err(format!("decimal input rejected, use num/den: `{s}`"));
    }
    let (numer, denom) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = numer
        .parse()
        .map_err(|_| format!("bad numerator in `{s}`"))?;
    let d: BigInt = denom
        .parse()
        .map_err(|_| format!("bad denominator in `{s}`"))?;
    if d.is_zero() {
        return Err(format!("zero denominator in `{s}`"));
    }
    Ok(BigRational::new(n, d))
}

thread_local! {
    static BINOM_CACHE: RefCell<HashMap<(Rational, i64), Rational>> =
        RefCell::new(HashMap::new());
}

/// Generalized binomial coefficient `binom(q, k) = q(q-1)...(q-k+1)/k!`.
///
/// Returns 0 for `k < 0`. The upper argument may be any rational.
/// Values are memoized per thread; the same coefficients recur thousands of
/// times across unit- and product-polynomial computations.
pub fn binom(q: &Rational, k: i64) -> Rational {
    if k < 0 {
        return Rational::zero();
    }
    if k == 0 {
        return Rational::one();
    }
    if let Some(v) = BINOM_CACHE.with(|c| c.borrow().get(&(q.clone(), k)).cloned()) {
        return v;
    }
    let mut acc = Rational::one();
    for i in 0..k {
        acc *= q - rat_int(i);
        acc /= rat_int(i + 1);
    }
    BINOM_CACHE.with(|c| c.borrow_mut().insert((q.clone(), k), acc.clone()));
    acc
}

/// `binom` with an integer upper argument.
pub fn binom_int(q: i64, k: i64) -> Rational {
    binom(&rat_int(q), k)
}

/// Streams `binom(q, 0), binom(q, 1), ...` by the multiplicative recurrence,
/// avoiding any cache traffic on dense rows.
pub struct BinomRow {
    q: Rational,
    k: i64,
    current: Rational,
}

impl BinomRow {
    pub fn new(q: &Rational) -> Self {
        Self { q: q.clone(), k: 0, current: Rational::one() }
    }
}

impl Iterator for BinomRow {
    type Item = Rational;

    fn next(&mut self) -> Option<Rational> {
        let out = self.current.clone();
        self.current *= &self.q - rat_int(self.k);
        self.current /= rat_int(self.k + 1);
        self.k += 1;
        Some(out)
    }
}

/// `(-1)^n` for any integer `n`.
pub fn neg_one_pow(n: i64) -> Rational {
    if n.rem_euclid(2) == 0 {
        Rational::one()
    } else {
        -Rational::one()
    }
}

/// 1 if `i <= j`, else 0, as an integer indicator.
pub fn delta_leq(i: &Rational, j: &Rational) -> i64 {
    if i <= j {
        1
    } else {
        0
    }
}

/// Kronecker delta on rationals.
pub fn delta_eq(i: &Rational, j: &Rational) -> i64 {
    if i == j {
        1
    } else {
        0
    }
}

/// True iff `a - b` is an integer.
pub fn congruent_mod_z(a: &Rational, b: &Rational) -> bool {
    is_integer(&(a - b))
}

/// Absolute value helper used by pivot selection.
pub fn abs(x: &Rational) -> Rational {
    x.abs()
}

/// Serde adapter rendering rationals as `"num"` / `"num/den"` strings.
pub mod serde_str {
    use super::Rational;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::render(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        super::parse(&s).map_err(de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binom_zero_lower_index_is_one() {
        assert_eq!(binom(&rat(7, 3), 0), rat_int(1));
        assert_eq!(binom(&rat(-5, 2), 0), rat_int(1));
    }

    #[test]
    fn binom_negative_lower_index_is_zero() {
        assert_eq!(binom(&rat(1, 2), -3), rat_int(0));
    }

    #[test]
    fn binom_half_two() {
        // (1/2)(-1/2)/2! = -1/8
        assert_eq!(binom(&rat(1, 2), 2), rat(-1, 8));
    }

    #[test]
    fn binom_minus_one_three() {
        // (-1)(-2)(-3)/3! = -1
        assert_eq!(binom(&rat_int(-1), 3), rat_int(-1));
    }

    #[test]
    fn parse_rejects_decimals() {
        assert!(parse("0.5").is_err());
        assert_eq!(parse("-3/6").unwrap(), rat(-1, 2));
        assert_eq!(parse("4").unwrap(), rat_int(4));
        assert!(parse("1/0").is_err());
    }

    #[test]
    fn render_round_trips() {
        for s in ["-7/3", "0", "12", "5/8"] {
            let r = parse(s).unwrap();
            assert_eq!(parse(&render(&r)).unwrap(), r);
        }
    }

    #[test]
    fn pascal_identity_sampled() {
        let qs = [rat(1, 2), rat(-3, 7), rat_int(4), rat(22, 5)];
        for q in &qs {
            for k in 0..=12i64 {
                let lhs = binom(q, k);
                let rhs = binom(&(q - rat_int(1)), k) + binom(&(q - rat_int(1)), k - 1);
                assert_eq!(lhs, rhs, "pascal failed at q={q}, k={k}");
            }
        }
    }

    #[test]
    fn negation_identity_sampled() {
        let qs = [rat(1, 3), rat(-5, 4), rat_int(2), rat(9, 2)];
        for q in &qs {
            for k in 0..=10i64 {
                let lhs = binom(&(-q.clone()), k);
                let rhs = neg_one_pow(k) * binom(&(q + rat_int(k - 1)), k);
                assert_eq!(lhs, rhs, "negation failed at q={q}, k={k}");
            }
        }
    }
}

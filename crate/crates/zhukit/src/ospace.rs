//! The subspaces `O(N, Q, q; z)` of the Laurent ring, canonical reduction
//! modulo them, the involution `phi`, and simultaneous reduction across a
//! tuple of spaces.
//!
//! `O(N, Q, q; z)` is spanned by the residue polynomials
//! `g_j = sum_{i=0}^{N-q-j} binom(Q, i) z^(i+q+j)` for `j <= 0` together with
//! every `z^i` with `i >= N+1`. Each `g_j` has lowest exponent `q+j` with
//! unit leading coefficient, so elimination from the minimum exponent upward
//! is triangular: every Laurent polynomial has a unique representative
//! supported in the window `[q+1, N]`.

use crate::error::{Error, Result};
use crate::laurent::LaurentPoly;
use crate::rational::{congruent_mod_z, neg_one_pow, render, Rational};
use num::{BigInt, Integer, One, Zero};
use serde::{Deserialize, Serialize};

/// Identifies the subspace `O(N, Q, q; z)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OSpaceSpec {
    #[serde(rename = "N")]
    pub n_cap: i64,
    #[serde(rename = "Q", with = "crate::rational::serde_str")]
    pub q_exp: Rational,
    #[serde(rename = "q")]
    pub q_floor: i64,
}

impl OSpaceSpec {
    pub fn new(n_cap: i64, q_exp: Rational, q_floor: i64) -> Self {
        Self { n_cap, q_exp, q_floor }
    }

    /// When `N <= q` the space is everything and every canonical form is 0.
    pub fn is_degenerate(&self) -> bool {
        self.n_cap <= self.q_floor
    }

    /// Quotient dimension `N - q` (0 when degenerate).
    pub fn window_dim(&self) -> i64 {
        (self.n_cap - self.q_floor).max(0)
    }

    pub fn describe(&self) -> String {
        format!("O({}, {}, {})", self.n_cap, render(&self.q_exp), self.q_floor)
    }
}

/// A canonical representative modulo an `O`-space, supported in `[q+1, N]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedForm {
    pub canonical: LaurentPoly,
    pub spec: OSpaceSpec,
}

impl ReducedForm {
    pub fn is_zero(&self) -> bool {
        self.canonical.is_zero()
    }
}

/// The spanning polynomial of `O(N, Q, q; z)` with lowest exponent `q + j`.
pub fn o_generator(spec: &OSpaceSpec, j: i64) -> LaurentPoly {
    assert!(j <= 0, "generator index must be non-positive");
    let top = spec.n_cap - spec.q_floor - j;
    let mut out = LaurentPoly::zero();
    let mut row = crate::rational::BinomRow::new(&spec.q_exp);
    for i in 0..=top {
        out.add_term(i + spec.q_floor + j, row.next().unwrap());
    }
    out
}

/// Reusable reducer for one `O`-space.
///
/// The minimum-exponent elimination is evaluated column-wise: the canonical
/// form of each monomial `z^e`, `e <= q`, satisfies the downward recurrence
/// `can(z^e) = -sum_{i=1}^{N-e} binom(Q, i) can(z^{e+i})` obtained by
/// eliminating `z^e` against its generator. The columns are cached, so
/// reducing many polynomials against the same space costs one short
/// dot product per low term, and intermediate coefficients never swell the
/// way a running remainder does.
pub struct OReducer {
    spec: OSpaceSpec,
    row: Vec<Rational>,
    stream: crate::rational::BinomRow,
    // columns[d] = denominator-cleared canonical coefficients of z^(q - d)
    // over [q+1, N]: entries / denom.
    columns: Vec<(Vec<BigInt>, BigInt)>,
}

impl OReducer {
    pub fn new(spec: OSpaceSpec) -> Self {
        let stream = crate::rational::BinomRow::new(&spec.q_exp);
        Self { spec, row: Vec::new(), stream, columns: Vec::new() }
    }

    pub fn spec(&self) -> &OSpaceSpec {
        &self.spec
    }

    fn ensure_row(&mut self, len: usize) {
        while self.row.len() < len {
            self.row.push(self.stream.next().unwrap());
        }
    }

    /// Materializes columns down to `e = q - max_depth`.
    ///
    /// `can(z^e) = -sum_i binom(Q, i) can(z^{e+i})`, evaluated over one
    /// common denominator in integer arithmetic and normalized per column.
    fn ensure_columns(&mut self, max_depth: usize) {
        let b = self.spec.window_dim() as usize;
        while self.columns.len() < max_depth {
            let d = self.columns.len(); // building column for e = q - d
            self.ensure_row(b + d + 1);
            let mut den_r = BigInt::one();
            for i in 1..=(b + d) {
                den_r = den_r.lcm(self.row[i].denom());
            }
            let mut den_c = BigInt::one();
            for i in 1..=d {
                den_c = den_c.lcm(&self.columns[d - i].1);
            }
            let den = den_r * den_c;
            let mut ints = vec![BigInt::zero(); b];
            for i in 1..=(b + d) {
                let c = &self.row[i];
                if c.is_zero() {
                    continue;
                }
                if i <= d {
                    let (pints, pden) = &self.columns[d - i];
                    let scale = c.numer() * (&den / (c.denom() * pden));
                    for (slot, p) in ints.iter_mut().zip(pints.iter()) {
                        if !p.is_zero() {
                            *slot -= &scale * p;
                        }
                    }
                } else {
                    ints[i - d - 1] -= c.numer() * (&den / c.denom());
                }
            }
            let mut g = den.clone();
            for v in &ints {
                if !v.is_zero() {
                    g = g.gcd(v);
                }
            }
            let (ints, den) = if g > BigInt::one() {
                (ints.into_iter().map(|v| v / &g).collect(), den / g)
            } else {
                (ints, den)
            };
            self.columns.push((ints, den));
        }
    }

    /// Canonical form of `f`, supported in `[q+1, N]`.
    ///
    /// The dot products against the cached columns run over one common
    /// denominator in integer arithmetic; normalization happens once per
    /// window slot at the end.
    pub fn reduce(&mut self, f: &LaurentPoly) -> LaurentPoly {
        let q_floor = self.spec.q_floor;
        let slots = self.reduce_scaled(f);
        match slots {
            Scaled::Passthrough(p) => p,
            Scaled::Window(ints, den) => LaurentPoly::from_terms(
                ints.into_iter()
                    .enumerate()
                    .map(|(i, n)| (q_floor + 1 + i as i64, Rational::new(n, den.clone()))),
            ),
        }
    }

    pub fn member(&mut self, f: &LaurentPoly) -> bool {
        match self.reduce_scaled(f) {
            Scaled::Passthrough(p) => p.is_zero(),
            Scaled::Window(ints, _) => ints.iter().all(Zero::is_zero),
        }
    }

    fn reduce_scaled(&mut self, f: &LaurentPoly) -> Scaled {
        if self.spec.is_degenerate() {
            return Scaled::Passthrough(LaurentPoly::zero());
        }
        let n_cap = self.spec.n_cap;
        let q_floor = self.spec.q_floor;
        let b = self.spec.window_dim() as usize;
        match f.min_exp() {
            None => return Scaled::Passthrough(LaurentPoly::zero()),
            Some(lo) if lo > q_floor => {
                return Scaled::Passthrough(f.filter_exponents(|e| e <= n_cap));
            }
            Some(lo) => self.ensure_columns((q_floor - lo) as usize + 1),
        }

        // One common denominator across the f-coefficients and the columns;
        // the product of the two lcms is divisible by every per-term product.
        let mut den_f = BigInt::one();
        let mut den_c = BigInt::one();
        for (e, c) in f.terms() {
            if e > n_cap {
                continue;
            }
            den_f = den_f.lcm(c.denom());
            if e <= q_floor {
                den_c = den_c.lcm(&self.columns[(q_floor - e) as usize].1);
            }
        }
        let den = den_f * den_c;

        let mut slots = vec![BigInt::zero(); b];
        for (e, c) in f.terms() {
            if e > n_cap {
                continue;
            }
            if e > q_floor {
                slots[(e - q_floor - 1) as usize] += c.numer() * (&den / c.denom());
            } else {
                let (ints, col_den) = &self.columns[(q_floor - e) as usize];
                let scale = c.numer() * (&den / (c.denom() * col_den));
                for (slot, p) in slots.iter_mut().zip(ints.iter()) {
                    if !p.is_zero() {
                        *slot += &scale * p;
                    }
                }
            }
        }
        Scaled::Window(slots, den)
    }
}

enum Scaled {
    Passthrough(LaurentPoly),
    Window(Vec<BigInt>, BigInt),
}

/// Canonical form of `f` modulo `O(N, Q, q; z)`.
pub fn reduce_mod_o(f: &LaurentPoly, spec: &OSpaceSpec) -> ReducedForm {
    let canonical = OReducer::new(spec.clone()).reduce(f);
    ReducedForm { canonical, spec: spec.clone() }
}

/// Exact membership in `O(N, Q, q; z)`.
pub fn member_o(f: &LaurentPoly, spec: &OSpaceSpec) -> bool {
    reduce_mod_o(f, spec).is_zero()
}

/// The involutive automorphism `phi_{N,gamma}`.
///
/// Acts on monomials by
/// `z^i -> (-1)^(i+1) sum_{j=0}^{N-i} binom(gamma - i, j) z^(i+j)` for
/// `i <= N` and fixes `z^i` for `i >= N+1`; extended linearly.
pub fn phi(n_cap: i64, gamma: &Rational, f: &LaurentPoly) -> LaurentPoly {
    let mut out = LaurentPoly::zero();
    for (i, c) in f.terms() {
        if i >= n_cap + 1 {
            out.add_term(i, c.clone());
            continue;
        }
        let sign = neg_one_pow(i + 1);
        let upper = gamma - crate::rational::rat_int(i);
        let mut row = crate::rational::BinomRow::new(&upper);
        for j in 0..=(n_cap - i) {
            out.add_term(i + j, &sign * c * row.next().unwrap());
        }
    }
    out
}

/// `phi` evaluator that caches monomial images; applying the map to many
/// polynomials with shared support costs one binomial row per distinct
/// exponent.
pub struct PhiCache {
    n_cap: i64,
    gamma: Rational,
    images: std::collections::HashMap<i64, LaurentPoly>,
}

impl PhiCache {
    pub fn new(n_cap: i64, gamma: Rational) -> Self {
        Self { n_cap, gamma, images: std::collections::HashMap::new() }
    }

    fn image(&mut self, i: i64) -> &LaurentPoly {
        let (n_cap, gamma) = (self.n_cap, self.gamma.clone());
        self.images.entry(i).or_insert_with(|| {
            phi(n_cap, &gamma, &LaurentPoly::unit_monomial(i))
        })
    }

    pub fn apply(&mut self, f: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (e, c) in f.terms() {
            let img = self.image(e);
            for (ie, ic) in img.terms() {
                out.add_term(ie, c * ic);
            }
        }
        out
    }
}

/// Reduces `f` simultaneously modulo each space in `specs`.
///
/// Requires the `Q` values to be pairwise non-congruent mod Z, the hypothesis
/// under which the quotient by the intersection splits as the direct sum of
/// the individual quotients. `f` lies in the intersection iff every canonical
/// form is zero.
pub fn reduce_mod_intersection(f: &LaurentPoly, specs: &[OSpaceSpec]) -> Result<Vec<ReducedForm>> {
    for (a, b) in pairs(specs.len()) {
        if congruent_mod_z(&specs[a].q_exp, &specs[b].q_exp) {
            return Err(Error::CongruentSectors(
                render(&specs[a].q_exp),
                render(&specs[b].q_exp),
            ));
        }
    }
    Ok(specs.iter().map(|s| reduce_mod_o(f, s)).collect())
}

/// Membership in the intersection of the given spaces.
pub fn member_intersection(f: &LaurentPoly, specs: &[OSpaceSpec]) -> Result<bool> {
    Ok(reduce_mod_intersection(f, specs)?.iter().all(ReducedForm::is_zero))
}

fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |a| (a + 1..n).map(move |b| (a, b)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{binom, rat, rat_int};

    /// Independent route for the canonical form of a monomial `z^i`, `i <= N`:
    /// the closed double sum
    /// `sum_{k=1}^{N-q} sum_{j=1}^{k} binom(-Q, -i+q+j) binom(Q, k-j) z^(q+k)`.
    fn monomial_canonical_closed_form(i: i64, spec: &OSpaceSpec) -> LaurentPoly {
        assert!(i <= spec.n_cap);
        let mut out = LaurentPoly::zero();
        for k in 1..=(spec.n_cap - spec.q_floor) {
            for j in 1..=k {
                let c = binom(&-spec.q_exp.clone(), -i + spec.q_floor + j)
                    * binom(&spec.q_exp, k - j);
                out.add_term(spec.q_floor + k, c);
            }
        }
        out
    }

    #[test]
    fn generator_example_half() {
        // (N, Q, q) = (0, 1/2, -2), j = 0: z^-2 + (1/2) z^-1 - (1/8) z^0
        let spec = OSpaceSpec::new(0, rat(1, 2), -2);
        let g = o_generator(&spec, 0);
        let expected = LaurentPoly::from_terms([
            (-2, rat_int(1)),
            (-1, rat(1, 2)),
            (0, rat(-1, 8)),
        ]);
        assert_eq!(g, expected);
    }

    #[test]
    fn generator_example_q_zero() {
        // Q = 0 kills all terms above the lowest.
        let spec = OSpaceSpec::new(-1, rat_int(0), -2);
        assert_eq!(o_generator(&spec, 0), LaurentPoly::unit_monomial(-2));
    }

    #[test]
    fn reduce_monomial_matches_closed_form() {
        let spec = OSpaceSpec::new(0, rat(1, 2), -2);
        let f = LaurentPoly::unit_monomial(-2);
        let red = reduce_mod_o(&f, &spec);
        let expected =
            LaurentPoly::from_terms([(-1, rat(-1, 2)), (0, rat(1, 8))]);
        assert_eq!(red.canonical, expected);
        assert_eq!(red.canonical, monomial_canonical_closed_form(-2, &spec));
    }

    #[test]
    fn closed_form_cross_check_grid() {
        for n_cap in -1..=3i64 {
            for q in -4..=-1i64 {
                if n_cap <= q {
                    continue;
                }
                for qe in [rat_int(0), rat(1, 2), rat(5, 3), rat_int(-2)] {
                    let spec = OSpaceSpec::new(n_cap, qe, q);
                    for i in (q - 3)..=n_cap {
                        let red = reduce_mod_o(&LaurentPoly::unit_monomial(i), &spec);
                        assert_eq!(
                            red.canonical,
                            monomial_canonical_closed_form(i, &spec),
                            "mismatch at i={i}, spec={}",
                            spec.describe()
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn generators_reduce_to_zero() {
        let spec = OSpaceSpec::new(2, rat(-3, 4), -3);
        for j in (-6..=0).rev() {
            assert!(member_o(&o_generator(&spec, j), &spec));
        }
    }

    #[test]
    fn high_monomials_are_members() {
        let spec = OSpaceSpec::new(1, rat(2, 3), -2);
        assert!(member_o(&LaurentPoly::unit_monomial(2), &spec));
        assert!(member_o(&LaurentPoly::unit_monomial(7), &spec));
    }

    #[test]
    fn window_monomials_are_canonical() {
        let spec = OSpaceSpec::new(2, rat(1, 2), -2);
        for i in -1..=2 {
            let red = reduce_mod_o(&LaurentPoly::unit_monomial(i), &spec);
            assert_eq!(red.canonical, LaurentPoly::unit_monomial(i));
        }
        let below = reduce_mod_o(&LaurentPoly::unit_monomial(-2), &spec);
        assert_ne!(below.canonical, LaurentPoly::unit_monomial(-2));
    }

    #[test]
    fn degenerate_space_is_everything() {
        let spec = OSpaceSpec::new(-3, rat(1, 2), -2);
        assert!(spec.is_degenerate());
        assert!(member_o(&LaurentPoly::unit_monomial(5), &spec));
        assert!(member_o(
            &LaurentPoly::from_terms([(-9, rat(2, 7)), (4, rat_int(3))]),
            &spec
        ));
    }

    #[test]
    fn member_half_generator() {
        let spec = OSpaceSpec::new(0, rat(1, 2), -2);
        let f = LaurentPoly::from_terms([
            (-2, rat_int(1)),
            (-1, rat(1, 2)),
            (0, rat(-1, 8)),
        ]);
        assert!(member_o(&f, &spec));
        assert!(!member_o(&LaurentPoly::unit_monomial(-1), &spec));
    }

    #[test]
    fn phi_monomial_examples() {
        let g = rat_int(0);
        assert_eq!(
            phi(0, &g, &LaurentPoly::unit_monomial(0)),
            LaurentPoly::monomial(0, rat_int(-1))
        );
        let img = phi(0, &g, &LaurentPoly::unit_monomial(-1));
        assert_eq!(img, LaurentPoly::from_terms([(-1, rat_int(1)), (0, rat_int(1))]));
        assert_eq!(phi(0, &g, &img), LaurentPoly::unit_monomial(-1));
        // Above the window the map is the identity.
        assert_eq!(
            phi(2, &rat(7, 3), &LaurentPoly::unit_monomial(5)),
            LaurentPoly::unit_monomial(5)
        );
    }

    #[test]
    fn intersection_rejects_congruent_sectors() {
        let a = OSpaceSpec::new(1, rat(1, 2), -2);
        let b = OSpaceSpec::new(1, rat(3, 2), -3);
        let err = reduce_mod_intersection(&LaurentPoly::unit_monomial(0), &[a, b]);
        assert!(err.is_err());
    }

    #[test]
    fn intersection_componentwise() {
        let a = OSpaceSpec::new(1, rat(1, 2), -2);
        let b = OSpaceSpec::new(1, rat_int(0), -2);
        let f = o_generator(&a, 0);
        let reds = reduce_mod_intersection(&f, &[a.clone(), b]).unwrap();
        assert!(reds[0].is_zero());
        assert!(!reds[1].is_zero());
        let zero = reduce_mod_intersection(&LaurentPoly::zero(), &[a]).unwrap();
        assert!(zero.iter().all(ReducedForm::is_zero));
    }
}

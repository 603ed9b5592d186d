//! Sector-indexed Laurent subspaces, their generators, the unit polynomials
//! `mu`, and the product polynomials `pi`.
//!
//! Grades live in `(1/T)N` and are stored as an integer part plus a
//! fractional residue. For a pair of grades `(n, m)` and a sector
//! `s in 0..T`, the space `O^{T,s}_{n,m}(alpha, beta; z)` is an `O(N, Q, q)`
//! instance whose parameters mix the integer parts, the residues, and the
//! grading floor. The unit polynomial `mu(r, i)` is the unique polynomial
//! supported in a fixed window that reduces to `delta_{r,s} z^i` modulo every
//! sector space; it exists because the sector reduction matrix is
//! non-singular, and it is computed here by one exact matrix inversion per
//! parameter window.

use crate::error::{Error, Result};
use crate::laurent::LaurentPoly;
use crate::matrix::{nullspace, RationalMatrix};
use crate::ospace::{o_generator, OReducer, OSpaceSpec};
use crate::rational::{is_integer, rat, rat_int, render, Rational};
use num::Zero;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;

/// An element of `(1/T)N`: value `l + i/T` with `0 <= i <= T-1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Grade {
    pub l: i64,
    pub i: i64,
}

impl Grade {
    pub fn new(l: i64, i: i64, t: u32) -> Result<Self> {
        if l < 0 || i < 0 || i >= t as i64 {
            return Err(Error::Precondition(format!(
                "grade {l}+{i}/{t} outside (1/{t})N"
            )));
        }
        Ok(Self { l, i })
    }

    pub fn zero() -> Self {
        Self { l: 0, i: 0 }
    }

    pub fn value(&self, t: u32) -> Rational {
        rat_int(self.l) + rat(self.i, t as i64)
    }

    /// Recovers a grade from a non-negative rational with `T*v` integral.
    pub fn from_rational(v: &Rational, t: u32) -> Result<Self> {
        let scaled = v * rat_int(t as i64);
        if v < &Rational::zero() || !is_integer(&scaled) {
            return Err(Error::Precondition(format!(
                "{} is not in (1/{t})N",
                render(v)
            )));
        }
        let num = crate::rational::to_i64(&scaled)
            .ok_or_else(|| Error::Precondition("grade out of range".into()))?;
        Ok(Self { l: num.div_euclid(t as i64), i: num.rem_euclid(t as i64) })
    }

    pub fn render(&self, t: u32) -> String {
        render(&self.value(t))
    }
}

/// The index data `(T, Delta, n, m[, p])` of a Zhu space.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ZhuIndex {
    pub t: u32,
    pub delta: i64,
    pub n: Grade,
    pub m: Grade,
    pub p: Option<Grade>,
}

impl ZhuIndex {
    pub fn new(t: u32, delta: i64, n: Grade, m: Grade) -> Result<Self> {
        if t == 0 {
            return Err(Error::Precondition("T must be positive".into()));
        }
        if delta > 0 {
            return Err(Error::Precondition(format!(
                "grading floor must be non-positive, got {delta}"
            )));
        }
        for g in [&n, &m] {
            Grade::new(g.l, g.i, t)?;
        }
        Ok(Self { t, delta, n, m, p: None })
    }

    pub fn with_p(mut self, p: Grade) -> Result<Self> {
        Grade::new(p.l, p.i, self.t)?;
        self.p = Some(p);
        Ok(self)
    }

    pub fn require_p(&self) -> Result<Grade> {
        self.p.ok_or_else(|| Error::Precondition("index needs the middle grade p".into()))
    }

    /// The sector residue `r` with `p - n = r/T (mod Z)`.
    pub fn r_of_p_n(&self) -> Result<i64> {
        let p = self.require_p()?;
        Ok((p.i - self.n.i).rem_euclid(self.t as i64))
    }

    /// `s_vee`: the sector with `m.i - n.i = s + s_vee (mod T)`.
    pub fn s_vee(&self, s: i64) -> i64 {
        (self.m.i - self.n.i - s).rem_euclid(self.t as i64)
    }

    pub fn check_weights(&self, alpha: i64, beta: i64) -> Result<()> {
        if alpha < self.delta || beta < self.delta {
            return Err(Error::Precondition(format!(
                "weights ({alpha}, {beta}) below the grading floor {}",
                self.delta
            )));
        }
        Ok(())
    }

    /// `m + n - p`, needed by the commutation identity; errors when `p > m + n`.
    pub fn reflected_p(&self) -> Result<Grade> {
        let p = self.require_p()?;
        let v = self.m.value(self.t) + self.n.value(self.t) - p.value(self.t);
        Grade::from_rational(&v, self.t)
    }

    pub fn describe(&self) -> String {
        let t = self.t;
        match self.p {
            Some(p) => format!(
                "T={t} d={} n={} p={} m={}",
                self.delta,
                self.n.render(t),
                p.render(t),
                self.m.render(t)
            ),
            None => format!(
                "T={t} d={} n={} m={}",
                self.delta,
                self.n.render(t),
                self.m.render(t)
            ),
        }
    }
}

impl fmt::Display for ZhuIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.describe())
    }
}

fn ind(cond: bool) -> i64 {
    cond as i64
}

/// The `O(N, Q, q)` parameters of the sector space
/// `O^{T,s}_{n,m}(alpha, beta; z)`.
pub fn sector_space(idx: &ZhuIndex, s: i64, alpha: i64, beta: i64) -> OSpaceSpec {
    let t = idx.t as i64;
    let (l1, i1) = (idx.m.l, idx.m.i);
    let (l3, i3) = (idx.n.l, idx.n.i);
    let n_cap = alpha + beta - 1 - idx.delta;
    let q_exp = rat_int(alpha - 1 + l1 + ind(s <= i1)) + rat(s, t);
    let q_floor = -l1 - l3 - ind(s <= i1) - ind(t <= s + i3) - 1;
    OSpaceSpec::new(n_cap, q_exp, q_floor)
}

/// All `T` sector spaces at `(alpha, beta)`.
pub fn sector_spaces(idx: &ZhuIndex, alpha: i64, beta: i64) -> Vec<OSpaceSpec> {
    (0..idx.t as i64).map(|s| sector_space(idx, s, alpha, beta)).collect()
}

/// The depth-`j` spanning polynomial of the sector space.
pub fn f_generator(idx: &ZhuIndex, s: i64, alpha: i64, beta: i64, j: i64) -> LaurentPoly {
    o_generator(&sector_space(idx, s, alpha, beta), j)
}

/// Window floor used by the unit polynomials: `q = -l1 - l3 - 3`.
fn mu_floor(idx: &ZhuIndex) -> i64 {
    -idx.m.l - idx.n.l - 3
}

/// Support window `[lo, hi]` of the unit and product polynomials.
pub fn mu_window(idx: &ZhuIndex, alpha: i64, beta: i64) -> (i64, i64) {
    let hi = alpha + beta - 1 - idx.delta;
    let b = hi - mu_floor(idx);
    (hi + 1 - idx.t as i64 * b, hi)
}

/// Shift-normalized key identifying one unit-polynomial linear system.
///
/// The defining data of the system is the sector count, the window size
/// `b = N - q`, the residue `i1` of `m`, and the integer `A = alpha - 1 + l1`;
/// everything else enters only as a uniform exponent shift.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MuKey {
    pub t: u32,
    pub b: i64,
    pub i1: i64,
    pub a_int: i64,
}

impl MuKey {
    pub fn of(idx: &ZhuIndex, alpha: i64, beta: i64) -> Self {
        Self {
            t: idx.t,
            b: (alpha + beta - 1 - idx.delta) - mu_floor(idx),
            i1: idx.m.i,
            a_int: alpha - 1 + idx.m.l,
        }
    }
}

/// The solved linear system behind the unit polynomials of one window.
///
/// Works in shift-normalized coordinates: spaces `O(b, Q_s, 0)` with
/// `Q_s = A + delta(s <= i1) + s/T`, window `[b(1-T)+1, b]`, square system of
/// order `T*b`. The inverse is computed once; each `mu` is then a sparse
/// matrix-vector product.
pub struct MuBattery {
    key: MuKey,
    reducers: Vec<OReducer>,
    window: Vec<i64>,
    solver: Option<crate::matrix::BareissSolver>,
    // Dense window coordinates of each solved unit polynomial.
    cache: HashMap<(i64, i64), std::rc::Rc<Vec<Rational>>>,
}

impl MuBattery {
    pub fn new(key: MuKey) -> Result<Self> {
        let t = key.t as i64;
        let b = key.b;
        if b <= 0 {
            return Ok(Self {
                key,
                reducers: Vec::new(),
                window: Vec::new(),
                solver: None,
                cache: HashMap::new(),
            });
        }
        let mut reducers: Vec<OReducer> = (0..t)
            .map(|s| {
                OReducer::new(OSpaceSpec::new(
                    b,
                    rat_int(key.a_int + ind(s <= key.i1)) + rat(s, t),
                    0,
                ))
            })
            .collect();
        let window: Vec<i64> = (b * (1 - t) + 1..=b).collect();
        let dim = window.len();
        assert_eq!(dim as i64, t * b, "unit-polynomial system must be square");

        let mut m = RationalMatrix::zeros(dim, dim);
        for (col, &e) in window.iter().enumerate() {
            for (s, red) in reducers.iter_mut().enumerate() {
                let canonical = red.reduce(&LaurentPoly::unit_monomial(e));
                for (exp, c) in canonical.terms() {
                    let row = s * b as usize + (exp - 1) as usize;
                    m.set(row, col, c.clone());
                }
            }
        }
        let solver = crate::matrix::BareissSolver::new(&m)?;
        Ok(Self { key, reducers, window, solver: Some(solver), cache: HashMap::new() })
    }

    pub fn key(&self) -> MuKey {
        self.key
    }

    /// Dense window coordinates of `mu_hat(r, i_hat)`.
    fn mu_dense(&mut self, r: i64, i_hat: i64) -> std::rc::Rc<Vec<Rational>> {
        let b = self.key.b;
        let dim = self.window.len();
        if b <= 0 || i_hat > b {
            return std::rc::Rc::new(vec![Rational::zero(); dim]);
        }
        if let Some(v) = self.cache.get(&(r, i_hat)) {
            return v.clone();
        }
        let solver = self.solver.as_ref().expect("non-degenerate battery has a solver");
        // Right-hand side: the canonical form of z^i_hat in block r only.
        let canonical = self.reducers[r as usize].reduce(&LaurentPoly::unit_monomial(i_hat));
        let mut rhs = vec![Rational::zero(); dim];
        for (exp, c) in canonical.terms() {
            rhs[r as usize * b as usize + (exp - 1) as usize] = c.clone();
        }
        let sol = std::rc::Rc::new(solver.solve(&rhs));
        self.cache.insert((r, i_hat), sol.clone());
        sol
    }

    /// Normalized unit polynomial `mu_hat(r, i_hat)`, window-supported.
    pub fn mu_hat(&mut self, r: i64, i_hat: i64) -> LaurentPoly {
        let dense = self.mu_dense(r, i_hat);
        LaurentPoly::from_terms(
            self.window.iter().copied().zip(dense.iter().cloned()),
        )
    }

    /// Unit polynomial in original coordinates for a window with this key.
    pub fn mu_shifted(&mut self, r: i64, i: i64, q_floor: i64) -> LaurentPoly {
        self.mu_hat(r, i - q_floor)
            .shift(q_floor)
            .expect("window exponents are tiny")
    }

    /// `sum_j w_j sum_{k>=0} binom(q, k) mu_hat(r, t_j + k)`, accumulated on
    /// the dense window.
    pub fn weighted_kernel(
        &mut self,
        r: i64,
        q: &Rational,
        terms: &[(Rational, i64)],
    ) -> LaurentPoly {
        let b = self.key.b;
        let dim = self.window.len();
        let mut dense = vec![Rational::zero(); dim];
        for (w, t_hat) in terms {
            if w.is_zero() {
                continue;
            }
            let mut row = crate::rational::BinomRow::new(q);
            let mut k = 0i64;
            while t_hat + k <= b {
                let c = w * row.next().unwrap();
                if !c.is_zero() {
                    let mu = self.mu_dense(r, t_hat + k);
                    for (slot, v) in dense.iter_mut().zip(mu.iter()) {
                        if !v.is_zero() {
                            *slot += v * &c;
                        }
                    }
                }
                k += 1;
            }
        }
        LaurentPoly::from_terms(self.window.iter().copied().zip(dense.into_iter()))
    }
}

/// A provider of solved batteries, letting grouped grid runs share work.
#[derive(Default)]
pub struct MuContext {
    batteries: HashMap<MuKey, MuBattery>,
}

impl MuContext {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn battery(&mut self, key: MuKey) -> Result<&mut MuBattery> {
        if !self.batteries.contains_key(&key) {
            // Keep the footprint bounded; batteries are cheap to rebuild
            // relative to holding hundreds of inverses.
            if self.batteries.len() >= 64 {
                self.batteries.clear();
            }
            self.batteries.insert(key, MuBattery::new(key)?);
        }
        Ok(self.batteries.get_mut(&key).unwrap())
    }

    /// `mu^{T,r}_{n,m}(alpha, beta, i; z)`.
    ///
    /// Zero for `i >= alpha + beta - delta` and for degenerate windows;
    /// otherwise the unique window-supported polynomial reducing to
    /// `delta_{r,s} z^i` modulo every sector modulus.
    pub fn mu(
        &mut self,
        idx: &ZhuIndex,
        alpha: i64,
        beta: i64,
        r: i64,
        i: i64,
    ) -> Result<LaurentPoly> {
        idx.check_weights(alpha, beta)?;
        if r < 0 || r >= idx.t as i64 {
            return Err(Error::Precondition(format!("sector {r} outside 0..{}", idx.t)));
        }
        if i >= alpha + beta - idx.delta {
            return Ok(LaurentPoly::zero());
        }
        let key = MuKey::of(idx, alpha, beta);
        let q_floor = mu_floor(idx);
        Ok(self.battery(key)?.mu_shifted(r, i, q_floor))
    }

    /// `pi^T_{n,p,m}(alpha, beta; z)`.
    pub fn pi(&mut self, idx: &ZhuIndex, alpha: i64, beta: i64) -> Result<LaurentPoly> {
        idx.check_weights(alpha, beta)?;
        let t = idx.t as i64;
        let (l1, i1) = (idx.m.l, idx.m.i);
        let (l3, i3) = (idx.n.l, idx.n.i);
        let l2 = idx.require_p()?.l;
        let r = idx.r_of_p_n()?;

        let d_exp = -l1 - l3 + l2 - ind(r <= i1) - ind(t <= r + i3);
        let q_r = rat_int(alpha - 1 + l1 + ind(r <= i1)) + rat(r, t);

        let key = MuKey::of(idx, alpha, beta);
        let q_floor = mu_floor(idx);
        let battery = self.battery(key)?;

        let mut terms = Vec::with_capacity(l2 as usize + 1);
        let mut row = crate::rational::BinomRow::new(&rat_int(d_exp));
        for i in 0..=l2 {
            let c = row.next().unwrap();
            if !c.is_zero() {
                terms.push((c, d_exp - i - q_floor));
            }
        }
        let normalized = battery.weighted_kernel(r, &q_r, &terms);
        Ok(normalized.shift(q_floor)?)
    }

    /// `sum_{k>=0} binom(q, k) mu(r, t + k; z)`, the residue of
    /// `(1+x)^q x^t` against the unit-polynomial generating series.
    pub fn mu_residue_kernel(
        &mut self,
        idx: &ZhuIndex,
        alpha: i64,
        beta: i64,
        r: i64,
        q: &Rational,
        t: i64,
    ) -> Result<LaurentPoly> {
        idx.check_weights(alpha, beta)?;
        let key = MuKey::of(idx, alpha, beta);
        let q_floor = mu_floor(idx);
        let battery = self.battery(key)?;
        let normalized =
            battery.weighted_kernel(r, q, &[(rat_int(1), t - q_floor)]);
        Ok(normalized.shift(q_floor)?)
    }

    /// A spanning family of the intersection of all sector spaces at
    /// `(alpha, beta)`, restricted to lowest exponent `>= lo - depth`.
    ///
    /// The family consists of a basis of the window-supported part (the exact
    /// nullspace of the joint sector reduction) together with the elements
    /// `z^i - sum_r mu(r, i)` for `lo - depth <= i < lo`.
    pub fn intersection_family(
        &mut self,
        idx: &ZhuIndex,
        alpha: i64,
        beta: i64,
        depth: i64,
    ) -> Result<Vec<LaurentPoly>> {
        idx.check_weights(alpha, beta)?;
        let t = idx.t as i64;
        let (lo, hi) = mu_window(idx, alpha, beta);
        if hi < lo {
            return Ok(Vec::new());
        }
        let specs = sector_spaces(idx, alpha, beta);
        let window: Vec<i64> = (lo..=hi).collect();

        // Joint reduction matrix of the window monomials.
        let total_rows: usize = specs.iter().map(|s| s.window_dim() as usize).sum();
        let mut reducers: Vec<OReducer> = specs.iter().cloned().map(OReducer::new).collect();
        let mut m = RationalMatrix::zeros(total_rows, window.len());
        for (col, &e) in window.iter().enumerate() {
            let mut row_base = 0usize;
            for (spec, red) in specs.iter().zip(reducers.iter_mut()) {
                let canonical = red.reduce(&LaurentPoly::unit_monomial(e));
                for (exp, c) in canonical.terms() {
                    let row = row_base + (exp - spec.q_floor - 1) as usize;
                    m.set(row, col, c.clone());
                }
                row_base += spec.window_dim() as usize;
            }
        }

        let mut family: Vec<LaurentPoly> = nullspace(&m)
            .into_iter()
            .map(|v| {
                LaurentPoly::from_terms(
                    window.iter().copied().zip(v.into_iter()),
                )
            })
            .collect();

        for i in (lo - depth..lo).rev() {
            let mut g = LaurentPoly::unit_monomial(i);
            for r in 0..t {
                g = &g - &self.mu(idx, alpha, beta, r, i)?;
            }
            family.push(g);
        }
        Ok(family)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ospace::{member_intersection, member_o, reduce_mod_o};

    fn idx(t: u32, delta: i64, n: (i64, i64), m: (i64, i64)) -> ZhuIndex {
        ZhuIndex::new(
            t,
            delta,
            Grade::new(n.0, n.1, t).unwrap(),
            Grade::new(m.0, m.1, t).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn sector_space_base_cases() {
        let i0 = idx(1, 0, (0, 0), (0, 0));
        let s = sector_space(&i0, 0, 0, 0);
        assert_eq!((s.n_cap, s.q_exp.clone(), s.q_floor), (-1, rat_int(0), -2));
        let s1 = sector_space(&i0, 0, 1, 1);
        assert_eq!((s1.n_cap, s1.q_exp.clone(), s1.q_floor), (1, rat_int(1), -2));
    }

    #[test]
    fn sector_q_values_never_congruent() {
        for t in 1..=4u32 {
            for i1 in 0..t as i64 {
                for i3 in 0..t as i64 {
                    let ix = idx(t, 0, (1, i3), (0, i1));
                    let specs = sector_spaces(&ix, 2, 1);
                    for a in 0..specs.len() {
                        for b in a + 1..specs.len() {
                            assert!(!crate::rational::congruent_mod_z(
                                &specs[a].q_exp,
                                &specs[b].q_exp
                            ));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn f_generator_weight_one() {
        let i0 = idx(1, 0, (0, 0), (0, 0));
        let g = f_generator(&i0, 0, 1, 1, 0);
        let expected =
            LaurentPoly::from_terms([(-2, rat_int(1)), (-1, rat_int(1))]);
        assert_eq!(g, expected);
        assert!(member_o(&g, &sector_space(&i0, 0, 1, 1)));
    }

    #[test]
    fn mu_identity_window_weight_zero() {
        let i0 = idx(1, 0, (0, 0), (0, 0));
        let mut ctx = MuContext::new();
        assert_eq!(
            ctx.mu(&i0, 0, 0, 0, -1).unwrap(),
            LaurentPoly::unit_monomial(-1)
        );
        assert_eq!(
            ctx.mu(&i0, 0, 0, 0, -2).unwrap(),
            LaurentPoly::unit_monomial(-2)
        );
        assert!(ctx.mu(&i0, 0, 0, 0, 0).unwrap().is_zero());
    }

    #[test]
    fn mu_identity_window_weight_one() {
        let i0 = idx(1, 0, (0, 0), (0, 0));
        let mut ctx = MuContext::new();
        for i in -2..=1 {
            assert_eq!(
                ctx.mu(&i0, 1, 1, 0, i).unwrap(),
                LaurentPoly::unit_monomial(i),
                "i={i}"
            );
        }
        assert!(ctx.mu(&i0, 1, 1, 0, 2).unwrap().is_zero());
    }

    #[test]
    fn mu_defining_property_twisted() {
        let ix = idx(2, 0, (0, 1), (1, 0));
        let mut ctx = MuContext::new();
        let (lo, hi) = mu_window(&ix, 1, 1);
        for r in 0..2 {
            for i in lo - 2..=hi {
                let mu = ctx.mu(&ix, 1, 1, r, i).unwrap();
                assert!(mu.supported_in(lo, hi));
                for s in 0..2 {
                    let spec = sector_space(&ix, s, 1, 1);
                    let mut diff = mu.clone();
                    if r == s {
                        diff = &diff - &LaurentPoly::unit_monomial(i);
                    }
                    assert!(
                        member_o(&diff, &spec),
                        "unit property failed at r={r}, s={s}, i={i}"
                    );
                }
            }
        }
    }

    #[test]
    fn mu_sum_is_monomial_mod_intersection() {
        let ix = idx(2, -1, (0, 1), (0, 0));
        let mut ctx = MuContext::new();
        let specs = sector_spaces(&ix, 1, 2);
        let (lo, hi) = mu_window(&ix, 1, 2);
        for i in lo - 1..=hi + 1 {
            let mut acc = LaurentPoly::unit_monomial(i);
            for r in 0..2 {
                acc = &acc - &ctx.mu(&ix, 1, 2, r, i).unwrap();
            }
            assert!(member_intersection(&acc, &specs).unwrap(), "i={i}");
        }
    }

    #[test]
    fn pi_base_examples() {
        let mut ctx = MuContext::new();
        let i0 = idx(1, 0, (0, 0), (0, 0)).with_p(Grade::zero()).unwrap();
        assert_eq!(ctx.pi(&i0, 0, 0).unwrap(), LaurentPoly::unit_monomial(-1));
        assert_eq!(
            ctx.pi(&i0, 1, 1).unwrap(),
            LaurentPoly::from_terms([(-1, rat_int(1)), (0, rat_int(1))])
        );
        assert_eq!(
            ctx.pi(&i0, 1, 0).unwrap(),
            LaurentPoly::from_terms([(-1, rat_int(1)), (0, rat_int(1))])
        );
    }

    #[test]
    fn pi_supported_in_window() {
        let ix = idx(3, -1, (1, 2), (0, 1))
            .with_p(Grade::new(1, 1, 3).unwrap())
            .unwrap();
        let mut ctx = MuContext::new();
        let p = ctx.pi(&ix, 2, 1).unwrap();
        let (lo, hi) = mu_window(&ix, 2, 1);
        assert!(p.supported_in(lo, hi));
    }

    #[test]
    fn intersection_family_members() {
        let ix = idx(2, 0, (0, 0), (0, 1));
        let mut ctx = MuContext::new();
        let specs = sector_spaces(&ix, 1, 1);
        let family = ctx.intersection_family(&ix, 1, 1, 4).unwrap();
        assert!(!family.is_empty());
        for f in &family {
            assert!(member_intersection(f, &specs).unwrap());
        }
    }

    #[test]
    fn mu_solution_is_permutation_invariant() {
        // Re-solving with the sector constraint order reversed must give the
        // same coefficients: uniqueness of the window representative.
        let ix = idx(2, 0, (0, 1), (0, 0));
        let mut ctx = MuContext::new();
        let direct = ctx.mu(&ix, 1, 1, 1, -1).unwrap();

        // Modulus spaces of the unit polynomials, with the common floor.
        let q_floor = -ix.m.l - ix.n.l - 3;
        let n_cap = 1 + 1 - 1 - ix.delta;
        let t = ix.t as i64;
        let specs: Vec<OSpaceSpec> = (0..t)
            .map(|s| {
                let zs = sector_space(&ix, s, 1, 1);
                OSpaceSpec::new(n_cap, zs.q_exp, q_floor)
            })
            .collect();
        let (lo, hi) = mu_window(&ix, 1, 1);
        let window: Vec<i64> = (lo..=hi).collect();
        let b = specs[0].window_dim() as usize;
        let dim = window.len();
        let mut m = RationalMatrix::zeros(dim, dim);
        let order = [1usize, 0usize];
        for (col, &e) in window.iter().enumerate() {
            for (block, &s) in order.iter().enumerate() {
                let red = reduce_mod_o(&LaurentPoly::unit_monomial(e), &specs[s]);
                for (exp, c) in red.canonical.terms() {
                    let row = block * b + (exp - q_floor - 1) as usize;
                    m.set(row, col, c.clone());
                }
            }
        }
        // r = 1 sits in block 0 under the permuted constraint order.
        let red = reduce_mod_o(&LaurentPoly::unit_monomial(-1), &specs[1]);
        let mut rhs = vec![Rational::zero(); dim];
        for (exp, c) in red.canonical.terms() {
            rhs[(exp - q_floor - 1) as usize] = c.clone();
        }
        let sol = crate::matrix::solve_batch(&m, &[rhs]).unwrap();
        let rebuilt =
            LaurentPoly::from_terms(window.iter().copied().zip(sol[0].clone()));
        assert_eq!(rebuilt, direct);
    }
}

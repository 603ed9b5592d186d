//! The vertex-algebra layer: images of the unit and product polynomials in
//! the free boson, the quotient-space spanning sets, and membership tests.

use crate::error::{Error, Result};
use crate::fock::{FockVector, HeisenbergAlgebra, Monomial};
use crate::laurent::{residue_kernel, LaurentPoly};
use crate::rational::{is_integer, rat_int, render, to_i64, Rational};
use crate::zhu::{MuContext, ZhuIndex};
use num::Zero;
use std::collections::BTreeMap;
use std::fmt;

/// `mu(wt a, wt b, i; z)` substituted at `z^j = a_j b`, for homogeneous
/// nonzero `a` and `b`.
pub fn hat_mu(
    ctx: &mut MuContext,
    alg: &HeisenbergAlgebra,
    idx: &ZhuIndex,
    a: &FockVector,
    b: &FockVector,
    s: i64,
    i: i64,
) -> Result<FockVector> {
    let (wa, wb) = homogeneous_weights(a, b)?;
    let mu = ctx.mu(idx, wa, wb, s, i)?;
    alg.substitute(&mu, a, b)
}

/// The product `a *^T_{n,p,m} b`, extended bilinearly over homogeneous
/// components.
pub fn star(
    ctx: &mut MuContext,
    alg: &HeisenbergAlgebra,
    idx: &ZhuIndex,
    a: &FockVector,
    b: &FockVector,
) -> Result<FockVector> {
    let mut out = FockVector::zero();
    for (wa, ca) in a.homogeneous_components() {
        for (wb, cb) in b.homogeneous_components() {
            let pi = ctx.pi(idx, wa, wb)?;
            out = out.add(&alg.substitute(&pi, &ca, &cb)?);
        }
    }
    Ok(out)
}

/// The elementary map `o_{n,m}(a) = a_{wt a + m - n - 1}` applied to `w`.
///
/// On the untwisted module the mode index must be an integer, so `m - n`
/// must be integral.
pub fn o_map(
    alg: &HeisenbergAlgebra,
    idx: &ZhuIndex,
    a: &FockVector,
    w: &FockVector,
) -> Result<FockVector> {
    let shift = idx.m.value(idx.t) - idx.n.value(idx.t);
    if !is_integer(&shift) {
        return Err(Error::NonIntegralModeIndex(render(&shift)));
    }
    let shift = to_i64(&shift).unwrap();
    let mut out = FockVector::zero();
    for (wa, ca) in a.homogeneous_components() {
        out = out.add(&alg.mode(&ca, wa + shift - 1, w)?);
    }
    Ok(out)
}

/// One element of the enumerated spanning set, with its provenance.
#[derive(Clone, Debug)]
pub enum Generator {
    /// `a_{-2}1 + (wt a + m - n) a` for a basis monomial `a`.
    Weight(Monomial),
    /// A polynomial from the sector intersection substituted on a basis pair.
    Substituted { a: Monomial, b: Monomial, min_exp: i64 },
    /// An associativity defect `(a*b)*c - a*(b*c)`.
    Associator { a: Monomial, b: Monomial, c: Monomial, p1: String, p2: String },
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::Weight(m) => write!(f, "w[{m}]"),
            Generator::Substituted { a, b, min_exp } => {
                write!(f, "s[{a};{b};{min_exp}]")
            }
            Generator::Associator { a, b, c, p1, p2 } => {
                write!(f, "assoc[{a};{b};{c};{p1};{p2}]")
            }
        }
    }
}

/// The translation-plus-scalar generator for a basis monomial.
pub fn weight_generator(
    alg: &HeisenbergAlgebra,
    idx: &ZhuIndex,
    a: &Monomial,
) -> Result<FockVector> {
    let av = FockVector::basis(a.clone());
    let translated = alg.mode(&av, -2, &alg.vacuum())?;
    let scalar = rat_int(a.weight()) + idx.m.value(idx.t) - idx.n.value(idx.t);
    Ok(translated.add(&av.scale(&scalar)))
}

/// Enumerates the spanning set of the quotient-defining subspace up to
/// weight `w_bound` and generator depth `depth`.
///
/// Yields the weight generators for all basis `a` with `wt a + 1 <= w_bound`
/// and the substituted sector-intersection family over basis pairs, keeping
/// exactly the elements all of whose components stay within `w_bound`.
pub fn o_generators(
    ctx: &mut MuContext,
    alg: &HeisenbergAlgebra,
    idx: &ZhuIndex,
    w_bound: i64,
    depth: i64,
) -> Result<Vec<(Generator, FockVector)>> {
    assert!(w_bound <= alg.cutoff(), "span bound beyond cutoff");
    let mut out = Vec::new();

    for w in 0..=(w_bound - 1) {
        for a in alg.weight_basis(w) {
            let g = weight_generator(alg, idx, &a)?;
            if !g.is_zero() {
                out.push((Generator::Weight(a), g));
            }
        }
    }

    for alpha in 0..=w_bound {
        for beta in 0..=(w_bound - alpha) {
            let family = ctx.intersection_family(idx, alpha, beta, depth)?;
            let usable: Vec<&LaurentPoly> = family
                .iter()
                .filter(|p| {
                    p.min_exp()
                        .map(|e| alpha + beta - e - 1 <= w_bound)
                        .unwrap_or(false)
                })
                .collect();
            if usable.is_empty() {
                continue;
            }
            for a in alg.weight_basis(alpha) {
                let av = FockVector::basis(a.clone());
                for b in alg.weight_basis(beta) {
                    let bv = FockVector::basis(b.clone());
                    for p in &usable {
                        let g = alg.substitute(p, &av, &bv)?;
                        if !g.is_zero() {
                            out.push((
                                Generator::Substituted {
                                    a: a.clone(),
                                    b: b.clone(),
                                    min_exp: p.min_exp().unwrap(),
                                },
                                g,
                            ));
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Outcome of a span-membership query.
#[derive(Clone, Debug)]
pub enum Membership {
    /// A witness combination over the generator list indices.
    Member { witness: Vec<(usize, Rational)> },
    /// Not resolved within the enumerated span; never asserts non-membership.
    Inconclusive { w_bound: i64, depth: i64 },
}

impl Membership {
    pub fn is_member(&self) -> bool {
        matches!(self, Membership::Member { .. })
    }
}

struct EchelonRow {
    vector: FockVector,
    combo: Vec<(usize, Rational)>,
}

/// Incremental exact echelon over the monomial coordinates.
///
/// Rows are kept reduced against earlier pivots; the target remainder is
/// re-reduced as new pivots appear, so membership is detected as soon as the
/// span covers the target.
struct SpanSolver {
    rows: BTreeMap<Monomial, EchelonRow>,
}

impl SpanSolver {
    fn new() -> Self {
        Self { rows: BTreeMap::new() }
    }

    /// Reduces `v` in place against the current rows, tracking the applied
    /// combination of original generators.
    fn reduce(&self, v: &mut FockVector, combo: &mut Vec<(usize, Rational)>) {
        loop {
            let Some(hit) = v
                .terms()
                .find_map(|(m, c)| self.rows.get(m).map(|row| (c.clone(), row)))
            else {
                return;
            };
            let (c, row) = hit;
            *v = v.sub(&row.vector.scale(&c));
            for (gi, gc) in &row.combo {
                combo.push((*gi, gc * &c));
            }
        }
    }

    /// Inserts generator `idx` if it enlarges the span.
    fn insert(&mut self, idx: usize, g: &FockVector) -> Option<Monomial> {
        let mut v = g.clone();
        let mut combo = vec![(idx, rat_int(1))];
        // combo tracks v = sum combo_i * gen_i, so reductions subtract.
        let mut sub_combo = Vec::new();
        self.reduce(&mut v, &mut sub_combo);
        for (gi, gc) in sub_combo {
            combo.push((gi, -gc));
        }
        let pivot = v.terms().next().map(|(m, _)| m.clone())?;
        let lead = v.coeff(&pivot);
        let inv = rat_int(1) / lead;
        let vector = v.scale(&inv);
        let combo = combo.into_iter().map(|(gi, gc)| (gi, gc * &inv)).collect();
        self.rows.insert(pivot.clone(), EchelonRow { vector, combo });
        Some(pivot)
    }
}

fn compress_witness(w: Vec<(usize, Rational)>) -> Vec<(usize, Rational)> {
    let mut acc: BTreeMap<usize, Rational> = BTreeMap::new();
    for (i, c) in w {
        let e = acc.entry(i).or_insert_with(Rational::zero);
        *e += c;
    }
    acc.into_iter().filter(|(_, c)| !c.is_zero()).collect()
}

/// Sound membership test of `v` in the span of `gens`.
///
/// `Member` comes with a witness combination; anything else is reported as
/// inconclusive together with the bounds used.
pub fn member_span(
    v: &FockVector,
    gens: &[(Generator, FockVector)],
    w_bound: i64,
    depth: i64,
) -> Membership {
    if v.is_zero() {
        return Membership::Member { witness: Vec::new() };
    }
    let mut solver = SpanSolver::new();
    let mut v_res = v.clone();
    let mut v_combo: Vec<(usize, Rational)> = Vec::new();
    solver.reduce(&mut v_res, &mut v_combo);
    for (i, (_, g)) in gens.iter().enumerate() {
        if v_res.is_zero() {
            break;
        }
        let Some(pivot) = solver.insert(i, g) else {
            continue;
        };
        if !v_res.coeff(&pivot).is_zero() {
            solver.reduce(&mut v_res, &mut v_combo);
        }
    }
    if v_res.is_zero() {
        Membership::Member { witness: compress_witness(v_combo) }
    } else {
        Membership::Inconclusive { w_bound, depth }
    }
}

/// Membership of `v` in the span of the quotient generators, sound and
/// witness-producing; inconclusive answers carry the `(W, J)` provenance.
pub fn member_ov(
    ctx: &mut MuContext,
    alg: &HeisenbergAlgebra,
    idx: &ZhuIndex,
    v: &FockVector,
    w_bound: i64,
    depth: i64,
) -> Result<Membership> {
    if let Some(top) = v.max_weight() {
        if top > w_bound {
            return Ok(Membership::Inconclusive { w_bound, depth });
        }
    }
    let gens = o_generators(ctx, alg, idx, w_bound, depth)?;
    Ok(member_span(v, &gens, w_bound, depth))
}

/// Exact decision for the weight-generator span alone.
///
/// Generators above the top weight of the target cannot contribute: their
/// leading parts are translation images and the translation map has trivial
/// kernel above weight zero, so a definitive answer only needs generators up
/// to the target's top weight.
pub fn decide_weight_span(
    alg: &HeisenbergAlgebra,
    idx: &ZhuIndex,
    v: &FockVector,
) -> Result<bool> {
    if v.is_zero() {
        return Ok(true);
    }
    let top = v.max_weight().unwrap();
    let mut gens = Vec::new();
    for w in 0..=top {
        for a in alg.weight_basis(w) {
            let g = weight_generator(alg, idx, &a)?;
            if !g.is_zero() {
                gens.push((Generator::Weight(a), g));
            }
        }
    }
    Ok(member_span(v, &gens, top, 0).is_member())
}

fn homogeneous_weights(a: &FockVector, b: &FockVector) -> Result<(i64, i64)> {
    let wa = a.weight().ok_or_else(|| {
        Error::Precondition("first argument must be homogeneous and nonzero".into())
    })?;
    let wb = b.weight().ok_or_else(|| {
        Error::Precondition("second argument must be homogeneous and nonzero".into())
    })?;
    Ok((wa, wb))
}

/// `Res_x (1+x)^q  sum_j hat_mu(a, b, j) x^(-j-1)`, the correction term of
/// the commutation identity, for homogeneous `a`, `b`.
pub fn hat_mu_residue(
    ctx: &mut MuContext,
    alg: &HeisenbergAlgebra,
    idx: &ZhuIndex,
    a: &FockVector,
    b: &FockVector,
    q: &Rational,
    r: i64,
) -> Result<FockVector> {
    let (wa, wb) = homogeneous_weights(a, b)?;
    let hi = wa + wb - 1 - idx.delta;
    let key_poly = residue_kernel(q, 0, hi, |j| {
        // Collect the polynomial combination first; substitution is linear.
        ctx.mu(idx, wa, wb, r, j).expect("validated above")
    });
    alg.substitute(&key_poly, a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zhu::Grade;

    fn idx0(t: u32, n: (i64, i64), m: (i64, i64)) -> ZhuIndex {
        ZhuIndex::new(
            t,
            0,
            Grade::new(n.0, n.1, t).unwrap(),
            Grade::new(m.0, m.1, t).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn star_identity_cases() {
        let alg = HeisenbergAlgebra::new(10);
        let mut ctx = MuContext::new();
        let idx = idx0(1, (0, 0), (0, 0)).with_p(Grade::zero()).unwrap();
        let h = alg.h();
        // 1 * a = a when n = p.
        assert_eq!(star(&mut ctx, &alg, &idx, &alg.vacuum(), &h).unwrap(), h);
        // h * h = h(-1)^2 |0>.
        let hh = FockVector::basis(Monomial::from_parts(vec![1, 1]));
        assert_eq!(star(&mut ctx, &alg, &idx, &h, &h).unwrap(), hh);
        // h * 1 = h.
        assert_eq!(star(&mut ctx, &alg, &idx, &h, &alg.vacuum()).unwrap(), h);
    }

    #[test]
    fn star_identity_vanishes_off_diagonal() {
        let alg = HeisenbergAlgebra::new(10);
        let mut ctx = MuContext::new();
        let idx = idx0(1, (1, 0), (0, 0))
            .with_p(Grade::zero())
            .unwrap();
        // n = 1, p = 0: 1 * a = 0.
        let out = star(&mut ctx, &alg, &idx, &alg.vacuum(), &alg.h()).unwrap();
        assert!(out.is_zero());
    }

    #[test]
    fn hat_mu_base_case() {
        let alg = HeisenbergAlgebra::new(10);
        let mut ctx = MuContext::new();
        let idx = idx0(1, (0, 0), (0, 0));
        let h = alg.h();
        let hh = FockVector::basis(Monomial::from_parts(vec![1, 1]));
        assert_eq!(hat_mu(&mut ctx, &alg, &idx, &h, &h, 0, -1).unwrap(), hh);
        // Above the vanishing threshold the unit polynomial is zero.
        assert!(hat_mu(&mut ctx, &alg, &idx, &h, &h, 0, 2).unwrap().is_zero());
    }

    #[test]
    fn o_map_grading() {
        let alg = HeisenbergAlgebra::new(10);
        let idx = idx0(1, (0, 0), (0, 0));
        let h = alg.h();
        // o(h) |0> = h_0 |0> = 0.
        assert!(o_map(&alg, &idx, &h, &alg.vacuum()).unwrap().is_zero());
        // o(h) h = h_0 h = 0, but o(h(-1)^2) h has weight 1.
        let hh = FockVector::basis(Monomial::from_parts(vec![1, 1]));
        let out = o_map(&alg, &idx, &hh, &h).unwrap();
        assert_eq!(out.weight(), Some(1));
        // Vacuum acts as the identity only through its -1 mode.
        assert_eq!(o_map(&alg, &idx, &alg.vacuum(), &h).unwrap(), h);
    }

    #[test]
    fn o_map_rejects_fractional_shift() {
        let alg = HeisenbergAlgebra::new(6);
        let idx = idx0(2, (0, 1), (0, 0));
        let res = o_map(&alg, &idx, &alg.h(), &alg.vacuum());
        assert!(matches!(res, Err(Error::NonIntegralModeIndex(_))));
    }

    #[test]
    fn weight_generator_example() {
        let alg = HeisenbergAlgebra::new(8);
        let idx = idx0(1, (0, 0), (0, 0));
        let g = weight_generator(&alg, &idx, &Monomial::from_parts(vec![1])).unwrap();
        // h(-2)|0> + 1*h for wt h = 1, m = n.
        let mut expected = FockVector::basis(Monomial::from_parts(vec![2]));
        expected = expected.add(&alg.h());
        assert_eq!(g, expected);
        // The vacuum generator vanishes when m = n.
        let gv = weight_generator(&alg, &idx, &Monomial::vacuum()).unwrap();
        assert!(gv.is_zero());
    }

    #[test]
    fn generators_are_members() {
        let alg = HeisenbergAlgebra::new(9);
        let mut ctx = MuContext::new();
        let idx = idx0(1, (0, 0), (0, 0));
        let gens = o_generators(&mut ctx, &alg, &idx, 6, 3).unwrap();
        assert!(!gens.is_empty());
        for (_, g) in gens.iter().take(12) {
            let m = member_span(g, &gens, 6, 3);
            assert!(m.is_member());
        }
        // Zero is trivially a member.
        assert!(member_span(&FockVector::zero(), &gens, 6, 3).is_member());
    }

    #[test]
    fn weight_span_decision() {
        let alg = HeisenbergAlgebra::new(8);
        let idx = idx0(1, (0, 0), (0, 0));
        // h(-2)|0> + h is a generator; h(-2)|0> alone is not in the span.
        let g = weight_generator(&alg, &idx, &Monomial::from_parts(vec![1])).unwrap();
        assert!(decide_weight_span(&alg, &idx, &g).unwrap());
        let alone = FockVector::basis(Monomial::from_parts(vec![2]));
        assert!(!decide_weight_span(&alg, &idx, &alone).unwrap());
    }

    #[test]
    fn witness_reconstructs_target() {
        let alg = HeisenbergAlgebra::new(9);
        let mut ctx = MuContext::new();
        let idx = idx0(1, (0, 0), (0, 0));
        let gens = o_generators(&mut ctx, &alg, &idx, 7, 4).unwrap();
        // Combination of two generators.
        let v = gens[0].1.scale(&rat_int(3)).add(&gens[gens.len() / 2].1);
        let m = member_span(&v, &gens, 7, 4);
        let Membership::Member { witness } = m else {
            panic!("expected membership");
        };
        let mut rebuilt = FockVector::zero();
        for (i, c) in &witness {
            rebuilt = rebuilt.add(&gens[*i].1.scale(c));
        }
        assert_eq!(rebuilt, v);
    }
}

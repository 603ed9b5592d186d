//! Grid checks over the polynomial layer: every identity is verified with
//! exact arithmetic, point by point, and failures carry witnesses.

use crate::laurent::LaurentPoly;
use crate::matrix::{build_binomial_matrix, build_gamma, det_closed_form, det_exact};
use crate::ospace::{
    member_intersection, member_o, o_generator, phi, reduce_mod_intersection, reduce_mod_o,
    OSpaceSpec,
};
use crate::rational::{rat, rat_int, render, Rational};
use crate::zhu::{f_generator, mu_window, sector_space, sector_spaces, Grade, MuContext, MuKey, ZhuIndex};
use num::Zero;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

#[derive(Clone, Debug, Serialize)]
pub struct PointOutcome {
    pub params: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl PointOutcome {
    pub fn pass(params: String) -> Self {
        Self { params, status: Status::Pass, witness: None }
    }
    pub fn fail(params: String, witness: String) -> Self {
        Self { params, status: Status::Fail, witness: Some(witness) }
    }
    pub fn skip(params: String, note: String) -> Self {
        Self { params, status: Status::Skip, witness: Some(note) }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub pass: usize,
    pub fail: usize,
    pub skip: usize,
    pub points: Vec<PointOutcome>,
}

impl CheckReport {
    pub fn new(check: &str, points: Vec<PointOutcome>) -> Self {
        let pass = points.iter().filter(|p| p.status == Status::Pass).count();
        let fail = points.iter().filter(|p| p.status == Status::Fail).count();
        let skip = points.iter().filter(|p| p.status == Status::Skip).count();
        Self { check: check.to_string(), pass, fail, skip, points }
    }

    pub fn all_pass(&self) -> bool {
        self.fail == 0
    }

    pub fn failures(&self) -> impl Iterator<Item = &PointOutcome> {
        self.points.iter().filter(|p| p.status == Status::Fail)
    }
}

/// Default verification grid.
///
/// Sector counts up to 3, integer parts up to 2, every fractional residue,
/// weights from the grading floor up to 3, floors 0 and -1. Small enough to
/// finish quickly, wide enough to hit every indicator branch.
#[derive(Clone, Debug)]
pub struct Grid {
    pub ts: Vec<u32>,
    pub l_max: i64,
    pub deltas: Vec<i64>,
    pub weight_hi: i64,
    pub depth: i64,
}

impl Default for Grid {
    fn default() -> Self {
        Self { ts: vec![1, 2, 3], l_max: 2, deltas: vec![0, -1], weight_hi: 3, depth: 6 }
    }
}

#[derive(Clone, Debug)]
pub struct GridPoint {
    pub idx: ZhuIndex,
    pub alpha: i64,
    pub beta: i64,
}

impl GridPoint {
    pub fn describe(&self) -> String {
        format!("{} a={} b={}", self.idx.describe(), self.alpha, self.beta)
    }
}

impl Grid {
    fn grades(&self, t: u32) -> Vec<Grade> {
        let mut out = Vec::new();
        for l in 0..=self.l_max {
            for i in 0..t as i64 {
                out.push(Grade::new(l, i, t).unwrap());
            }
        }
        out
    }

    /// All `(T, delta, n, m, alpha, beta)` points.
    pub fn points(&self) -> Vec<GridPoint> {
        let mut out = Vec::new();
        for &t in &self.ts {
            for &delta in &self.deltas {
                for n in self.grades(t) {
                    for m in self.grades(t) {
                        let idx = ZhuIndex::new(t, delta, n, m).unwrap();
                        for alpha in delta..=self.weight_hi {
                            for beta in delta..=self.weight_hi {
                                out.push(GridPoint { idx: idx.clone(), alpha, beta });
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// All points extended with the middle grade `p`.
    pub fn points_with_p(&self) -> Vec<GridPoint> {
        let mut out = Vec::new();
        for point in self.points() {
            for p in self.grades(point.idx.t) {
                let idx = point.idx.clone().with_p(p).unwrap();
                out.push(GridPoint { idx, alpha: point.alpha, beta: point.beta });
            }
        }
        out
    }
}

/// Deterministic splitmix64 stream for sampled checks.
pub struct Rng(u64);

impl Rng {
    pub fn new(seed: u64) -> Self {
        Self(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    pub fn range(&mut self, lo: i64, hi: i64) -> i64 {
        lo + (self.next_u64() % (hi - lo + 1) as u64) as i64
    }

    /// A rational with numerator in `[-9, 9]` and denominator in `[1, den_max]`.
    pub fn rational(&mut self, den_max: i64) -> Rational {
        rat(self.range(-9, 9), self.range(1, den_max))
    }

    pub fn laurent(&mut self, lo: i64, hi: i64, terms: usize) -> LaurentPoly {
        let mut p = LaurentPoly::zero();
        for _ in 0..terms {
            p.add_term(self.range(lo, hi), self.rational(7));
        }
        p
    }
}

/// Groups work items by key, runs groups in parallel with one fresh
/// battery context each, and restores the original deterministic order.
fn run_grouped_with<K, P, S, F>(items: Vec<(K, P)>, eval: F) -> Vec<PointOutcome>
where
    K: Ord + Send,
    P: Send,
    S: Default,
    F: Fn(&mut MuContext, &mut S, &P) -> PointOutcome + Send + Sync,
{
    let mut groups: BTreeMap<K, Vec<(usize, P)>> = BTreeMap::new();
    for (seq, (key, p)) in items.into_iter().enumerate() {
        groups.entry(key).or_default().push((seq, p));
    }
    let groups: Vec<Vec<(usize, P)>> = groups.into_values().collect();
    let mut outcomes: Vec<(usize, PointOutcome)> = groups
        .into_par_iter()
        .flat_map_iter(|group| {
            let mut ctx = MuContext::new();
            let mut state = S::default();
            group
                .into_iter()
                .map(|(seq, p)| (seq, eval(&mut ctx, &mut state, &p)))
                .collect::<Vec<_>>()
        })
        .collect();
    outcomes.sort_by_key(|(seq, _)| *seq);
    outcomes.into_iter().map(|(_, o)| o).collect()
}

fn run_grouped<K, P, F>(items: Vec<(K, P)>, eval: F) -> Vec<PointOutcome>
where
    K: Ord + Send,
    P: Send,
    F: Fn(&mut MuContext, &P) -> PointOutcome + Send + Sync,
{
    run_grouped_with::<K, P, (), _>(items, |ctx, _state, p| eval(ctx, p))
}

fn err_outcome(params: String, e: crate::error::Error) -> PointOutcome {
    PointOutcome::fail(params, format!("error: {e}"))
}

/// Per-group cache of reducers keyed by space, for checks that test many
/// intersection memberships against recurring sector spaces.
#[derive(Default)]
struct ReducerCache {
    map: std::collections::HashMap<OSpaceSpec, crate::ospace::OReducer>,
}

impl ReducerCache {
    fn member_intersection(
        &mut self,
        f: &LaurentPoly,
        specs: &[OSpaceSpec],
    ) -> crate::error::Result<bool> {
        for a in 0..specs.len() {
            for b in a + 1..specs.len() {
                if crate::rational::congruent_mod_z(&specs[a].q_exp, &specs[b].q_exp) {
                    return Err(crate::error::Error::CongruentSectors(
                        render(&specs[a].q_exp),
                        render(&specs[b].q_exp),
                    ));
                }
            }
        }
        for spec in specs {
            let red = self
                .map
                .entry(spec.clone())
                .or_insert_with(|| crate::ospace::OReducer::new(spec.clone()));
            if !red.member(f) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Determinant product identity on random rational points,
/// `(t, b)` over `{1,2,3}^2` with `samples` points per cell.
pub fn check_det_identity(samples: usize, seed: u64) -> CheckReport {
    let mut items = Vec::new();
    let mut rng = Rng::new(seed);
    for t in 1..=3usize {
        for b in 1..=3i64 {
            for s in 0..samples {
                let xs: Vec<Rational> = (0..t).map(|_| rng.rational(7)).collect();
                items.push(((t, b), (t, b, s, xs)));
            }
        }
    }
    let points = run_grouped(items, |_, (t, b, s, xs)| {
        let params = format!(
            "t={t} b={b} sample={s} xs=[{}]",
            xs.iter().map(render).collect::<Vec<_>>().join(",")
        );
        let direct = match det_exact(&build_binomial_matrix(xs, *b)) {
            Ok(d) => d,
            Err(e) => return err_outcome(params, e),
        };
        let closed = det_closed_form(xs, *b);
        if direct == closed {
            PointOutcome::pass(params)
        } else {
            PointOutcome::fail(
                params,
                format!("det={} closed={}", render(&direct), render(&closed)),
            )
        }
    });
    CheckReport::new("det_identity", points)
}

/// Non-singularity of the sector reduction matrix over the whole grid.
pub fn check_gamma_nonsingular(grid: &Grid) -> CheckReport {
    // The matrix depends only on (T, window size, residue of m, alpha-1+l1);
    // deduplicate before computing exact determinants.
    let mut seen = BTreeMap::new();
    for point in grid.points() {
        let key = MuKey::of(&point.idx, point.alpha, point.beta);
        seen.entry(key).or_insert_with(|| point.describe());
    }
    let items: Vec<_> = seen.into_iter().map(|(k, d)| (k, (k, d))).collect();
    let points = run_grouped(items, |_, (key, describe)| {
        let params = format!(
            "T={} b={} i1={} A={} [{describe}]",
            key.t, key.b, key.i1, key.a_int
        );
        if key.b <= 0 {
            return PointOutcome::skip(params, "degenerate window".into());
        }
        let t = key.t as i64;
        let qs: Vec<Rational> = (0..t)
            .map(|s| rat_int(key.a_int + i64::from(s <= key.i1)) + rat(s, t))
            .collect();
        let gamma = match build_gamma(key.b, 0, &qs) {
            Ok(g) => g,
            Err(e) => return err_outcome(params, e),
        };
        match det_exact(&gamma) {
            Ok(d) if !d.is_zero() => PointOutcome::pass(params),
            Ok(_) => PointOutcome::fail(params, "determinant vanished".into()),
            Err(e) => err_outcome(params, e),
        }
    });
    CheckReport::new("gamma_nonsingular", points)
}

/// One shift-normalized verification class: battery key plus the residue of
/// `n`. Every grid point in a class differs from the representative by a
/// uniform exponent shift, which carries spaces to spaces and unit
/// polynomials to unit polynomials.
type UnitClass = (MuKey, i64);

/// Normalized sector spaces `O(b, Q_s, 2 - ind(s<=i1) - ind(T<=s+i3))`.
fn normalized_sector_reducers(key: &MuKey, i3: i64) -> Vec<crate::ospace::OReducer> {
    let t = key.t as i64;
    (0..t)
        .map(|s| {
            let q_exp = rat_int(key.a_int + i64::from(s <= key.i1)) + rat(s, t);
            let q_floor = 2 - i64::from(s <= key.i1) - i64::from(t <= s + i3);
            crate::ospace::OReducer::new(OSpaceSpec::new(key.b, q_exp, q_floor))
        })
        .collect()
}

/// Runs one evaluation per class (grouped by battery) and fans the outcome
/// out to every grid point in the class, preserving point order.
fn run_classes<F>(
    classes: BTreeMap<UnitClass, Vec<(usize, String)>>,
    eval: F,
) -> Vec<PointOutcome>
where
    F: Fn(&mut MuContext, &UnitClass) -> Result<(), String> + Send + Sync,
{
    let items: Vec<_> = classes
        .into_iter()
        .map(|(class, members)| (class.0, (class, members)))
        .collect();
    let nested: Vec<Vec<(usize, PointOutcome)>> = {
        let mut groups: BTreeMap<MuKey, Vec<(UnitClass, Vec<(usize, String)>)>> = BTreeMap::new();
        for (key, payload) in items {
            groups.entry(key).or_default().push(payload);
        }
        groups
            .into_values()
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|group| {
                let mut ctx = MuContext::new();
                let mut out = Vec::new();
                for (class, members) in group {
                    let verdict = eval(&mut ctx, &class);
                    for (seq, params) in members {
                        let outcome = match &verdict {
                            Ok(()) => PointOutcome::pass(params),
                            Err(w) => PointOutcome::fail(params, w.clone()),
                        };
                        out.push((seq, outcome));
                    }
                }
                out
            })
            .collect()
    };
    let mut flat: Vec<(usize, PointOutcome)> = nested.into_iter().flatten().collect();
    flat.sort_by_key(|(seq, _)| *seq);
    flat.into_iter().map(|(_, o)| o).collect()
}

fn unit_classes(grid: &Grid) -> BTreeMap<UnitClass, Vec<(usize, String)>> {
    let mut classes: BTreeMap<UnitClass, Vec<(usize, String)>> = BTreeMap::new();
    for (seq, p) in grid.points().into_iter().enumerate() {
        let key = (MuKey::of(&p.idx, p.alpha, p.beta), p.idx.n.i);
        classes.entry(key).or_default().push((seq, p.describe()));
    }
    classes
}

/// Defining property of the unit polynomials: window support and
/// `mu = delta_{r,s} z^i` modulo every sector space, for `i` through the
/// window with margin 2 on both sides. Verified once per shift class.
pub fn check_unit_property(grid: &Grid) -> CheckReport {
    let points = run_classes(unit_classes(grid), |ctx, (key, i3)| {
        let t = key.t as i64;
        let b = key.b;
        let lo = b * (1 - t) + 1;
        let battery = ctx.battery(*key).map_err(|e| e.to_string())?;
        let mut reducers = normalized_sector_reducers(key, *i3);
        for r in 0..t {
            for i in lo - 2..=b + 2 {
                let mu = battery.mu_hat(r, i);
                if !mu.supported_in(lo, b) {
                    return Err(format!("mu(r={r}, i={i}) escapes the window"));
                }
                for (s, red) in reducers.iter_mut().enumerate() {
                    let mut diff = mu.clone();
                    if s as i64 == r {
                        diff = &diff - &LaurentPoly::unit_monomial(i);
                    }
                    if !red.member(&diff) {
                        return Err(format!("unit property fails at r={r}, s={s}, i={i}"));
                    }
                }
            }
        }
        Ok(())
    });
    CheckReport::new("unit_property", points)
}

/// `sum_s mu(s, i) = z^i` modulo the sector intersection, once per class.
pub fn check_unit_sum(grid: &Grid) -> CheckReport {
    let points = run_classes(unit_classes(grid), |ctx, (key, i3)| {
        let t = key.t as i64;
        let b = key.b;
        let lo = b * (1 - t) + 1;
        let battery = ctx.battery(*key).map_err(|e| e.to_string())?;
        let mut reducers = normalized_sector_reducers(key, *i3);
        for i in lo - 2..=b + 2 {
            let mut acc = LaurentPoly::unit_monomial(i);
            for r in 0..t {
                acc = &acc - &battery.mu_hat(r, i);
            }
            for red in reducers.iter_mut() {
                if !red.member(&acc) {
                    return Err(format!("sum differs at i={i}"));
                }
            }
        }
        Ok(())
    });
    CheckReport::new("unit_sum", points)
}

/// Weight-zero first argument: the `z^-1` coefficient of `mu(0, alpha, r, j)`
/// is `delta_{r,0} delta_{j,-1}`.
pub fn check_unit_weight_zero(grid: &Grid) -> CheckReport {
    let mut items = Vec::new();
    for point in grid.points() {
        if point.beta != point.alpha {
            continue;
        }
        // Reuse the (alpha, alpha) enumeration as the single weight argument.
        let p = GridPoint { idx: point.idx, alpha: 0, beta: point.alpha };
        items.push((MuKey::of(&p.idx, 0, p.beta), p));
    }
    let points = run_grouped(items, |ctx, point| {
        let params = point.describe();
        let idx = &point.idx;
        let (lo, hi) = mu_window(idx, 0, point.beta);
        for r in 0..idx.t as i64 {
            for j in lo - 2..=hi + 2 {
                let mu = match ctx.mu(idx, 0, point.beta, r, j) {
                    Ok(m) => m,
                    Err(e) => return err_outcome(params, e),
                };
                let expect = if r == 0 && j == -1 { rat_int(1) } else { rat_int(0) };
                if mu.coeff(-1) != expect {
                    return PointOutcome::fail(
                        params,
                        format!(
                            "z^-1 coefficient of mu(r={r}, j={j}) is {}",
                            render(&mu.coeff(-1))
                        ),
                    );
                }
            }
        }
        PointOutcome::pass(params)
    });
    CheckReport::new("unit_weight_zero", points)
}

/// The `z^-1` coefficient of `pi(0, alpha)` is `delta_{n,p}`.
pub fn check_one_poly(grid: &Grid) -> CheckReport {
    let mut items = Vec::new();
    for point in grid.points_with_p() {
        if point.beta != point.alpha {
            continue;
        }
        let p = GridPoint { idx: point.idx, alpha: 0, beta: point.alpha };
        items.push((MuKey::of(&p.idx, 0, p.beta), p));
    }
    let points = run_grouped(items, |ctx, point| {
        let params = point.describe();
        let idx = &point.idx;
        let pi = match ctx.pi(idx, 0, point.beta) {
            Ok(p) => p,
            Err(e) => return err_outcome(params, e),
        };
        let p = idx.p.unwrap();
        let expect = if p == idx.n { rat_int(1) } else { rat_int(0) };
        if pi.coeff(-1) == expect {
            PointOutcome::pass(params)
        } else {
            PointOutcome::fail(
                params,
                format!("z^-1 coefficient is {}", render(&pi.coeff(-1))),
            )
        }
    });
    CheckReport::new("one_poly", points)
}

/// Group state for the commutation check: reducers and involution tables.
#[derive(Default)]
struct CommState {
    reds: ReducerCache,
    phis: std::collections::HashMap<(i64, Rational), crate::ospace::PhiCache>,
}

/// Commutation identity of the product polynomials:
/// `pi_{n,p,m}(a,b) - phi(pi_{n,m+n-p,m}(b,a)) - Res-term` lies in the
/// sector intersection. Points with `p > m + n` are skipped.
pub fn check_comm_poly(grid: &Grid) -> CheckReport {
    let items: Vec<_> = grid
        .points_with_p()
        .into_iter()
        .map(|p| {
            let k1 = MuKey::of(&p.idx, p.alpha, p.beta);
            let k2 = MuKey::of(&p.idx, p.beta, p.alpha);
            ((k1.min(k2), k1.max(k2)), p)
        })
        .collect();
    let points = run_grouped_with::<_, _, CommState, _>(items, |ctx, state, point| {
        let params = point.describe();
        let idx = &point.idx;
        let (alpha, beta) = (point.alpha, point.beta);
        let reflected = match idx.reflected_p() {
            Ok(g) => g,
            Err(_) => {
                return PointOutcome::skip(params, "p exceeds m + n".into());
            }
        };
        let mut run = || -> crate::error::Result<PointOutcome> {
            let t = idx.t;
            let pi1 = ctx.pi(idx, alpha, beta)?;
            let idx2 = ZhuIndex::new(t, idx.delta, idx.n, idx.m)?.with_p(reflected)?;
            let pi2 = ctx.pi(&idx2, beta, alpha)?;
            let n_cap = alpha + beta - 1 - idx.delta;
            let gamma = rat_int(alpha + beta - 2) + idx.m.value(t) - idx.n.value(t);
            let phi_pi2 = state
                .phis
                .entry((n_cap, gamma.clone()))
                .or_insert_with(|| crate::ospace::PhiCache::new(n_cap, gamma))
                .apply(&pi2);

            let r = idx.r_of_p_n()?;
            let q = rat_int(alpha - 1) + idx.p.unwrap().value(t) - idx.n.value(t);
            let res_term = ctx.mu_residue_kernel(idx, alpha, beta, r, &q, 0)?;

            let diff = &(&pi1 - &phi_pi2) - &res_term;
            let specs = sector_spaces(idx, alpha, beta);
            if state.reds.member_intersection(&diff, &specs)? {
                Ok(PointOutcome::pass(params.clone()))
            } else {
                Ok(PointOutcome::fail(params.clone(), "difference not in intersection".into()))
            }
        };
        run().unwrap_or_else(|e| err_outcome(point.describe(), e))
    });
    CheckReport::new("comm_poly", points)
}

/// Grade shifts: `pi_{n,p,m} = pi_{n-l,p-l,m-l}` modulo the shifted
/// intersection, for every grid-representable `l <= min(n, p, m)`.
pub fn check_multi_descend(grid: &Grid) -> CheckReport {
    let items: Vec<_> = grid
        .points_with_p()
        .into_iter()
        .map(|p| (MuKey::of(&p.idx, p.alpha, p.beta), p))
        .collect();
    let points = run_grouped_with::<_, _, ReducerCache, _>(items, |ctx, cache, point| {
        let params = point.describe();
        let idx = &point.idx;
        let t = idx.t;
        let (alpha, beta) = (point.alpha, point.beta);
        let p = idx.p.unwrap();
        let min = idx
            .n
            .value(t)
            .min(idx.m.value(t))
            .min(p.value(t));
        let mut run = || -> crate::error::Result<PointOutcome> {
            let pi0 = ctx.pi(idx, alpha, beta)?;
            let mut checked = 0;
            // Enumerate l = 1/T, 2/T, ... up to min(n, p, m).
            let t_i = t as i64;
            let mut num = 1i64;
            loop {
                let l = rat(num, t_i);
                if l > min {
                    break;
                }
                let sub = |g: Grade| Grade::from_rational(&(g.value(t) - &l), t);
                let idx_l = ZhuIndex::new(t, idx.delta, sub(idx.n)?, sub(idx.m)?)?
                    .with_p(sub(p)?)?;
                let pi_l = ctx.pi(&idx_l, alpha, beta)?;
                let diff = &pi0 - &pi_l;
                let specs = sector_spaces(&idx_l, alpha, beta);
                if !cache.member_intersection(&diff, &specs)? {
                    return Ok(PointOutcome::fail(
                        params.clone(),
                        format!("descent fails at l={}", render(&l)),
                    ));
                }
                checked += 1;
                num += 1;
            }
            if checked == 0 {
                Ok(PointOutcome::pass(format!("{params} (only l=0)")))
            } else {
                Ok(PointOutcome::pass(params.clone()))
            }
        };
        run().unwrap_or_else(|e| err_outcome(point.describe(), e))
    });
    CheckReport::new("multi_descend", points)
}

/// Sector refinement: the product polynomial computed over `T' = dT`
/// coincides with the `T` one modulo the `T` sector intersection.
pub fn check_sector_refine(grid: &Grid, multipliers: &[u32]) -> CheckReport {
    let mut items = Vec::new();
    for point in grid.points_with_p() {
        for &d in multipliers {
            let t2 = point.idx.t * d;
            let lift = |g: Grade| Grade::new(g.l, g.i * d as i64, t2).unwrap();
            let idx2 = ZhuIndex::new(t2, point.idx.delta, lift(point.idx.n), lift(point.idx.m))
                .unwrap()
                .with_p(lift(point.idx.p.unwrap()))
                .unwrap();
            // Group by the refined battery; it dominates the cost.
            let key = MuKey::of(&idx2, point.alpha, point.beta);
            items.push((key, (point.clone(), idx2, d)));
        }
    }
    let points = run_grouped(items, |ctx, (point, idx2, d)| {
        let params = format!("{} T'={}", point.describe(), idx2.t);
        let mut run = || -> crate::error::Result<PointOutcome> {
            let pi_fine = ctx.pi(idx2, point.alpha, point.beta)?;
            let pi_base = ctx.pi(&point.idx, point.alpha, point.beta)?;
            let specs = sector_spaces(&point.idx, point.alpha, point.beta);
            if member_intersection(&(&pi_fine - &pi_base), &specs)? {
                Ok(PointOutcome::pass(params.clone()))
            } else {
                Ok(PointOutcome::fail(params.clone(), format!("T'={} disagrees", d)))
            }
        };
        run().unwrap_or_else(|e| err_outcome(params.clone(), e))
    });
    CheckReport::new("sector_refine", points)
}

/// Space shrinkage under grade descent: generators of the `(n, m)` sector
/// space belong to every dominated `(n', m')` space.
pub fn check_descend(grid: &Grid) -> CheckReport {
    let items: Vec<_> = grid
        .points()
        .into_iter()
        .map(|p| ((), p))
        .collect();
    let depth = grid.depth;
    let points = run_grouped(items, |_, point| {
        let params = point.describe();
        let idx = &point.idx;
        let t = idx.t;
        let step_down = |g: Grade| -> Option<Grade> {
            if g.i > 0 {
                Some(Grade::new(g.l, g.i - 1, t).unwrap())
            } else if g.l > 0 {
                Some(Grade::new(g.l - 1, t as i64 - 1, t).unwrap())
            } else {
                None
            }
        };
        let mut targets: Vec<(Grade, Grade)> = Vec::new();
        if let Some(n2) = step_down(idx.n) {
            targets.push((n2, idx.m));
        }
        if let Some(m2) = step_down(idx.m) {
            targets.push((idx.n, m2));
        }
        if let (Some(n2), Some(m2)) = (step_down(idx.n), step_down(idx.m)) {
            targets.push((n2, m2));
        }
        targets.push((Grade::zero(), Grade::zero()));
        targets.push((idx.n, idx.m));
        targets.dedup();

        for (n2, m2) in targets {
            let idx2 = ZhuIndex::new(t, idx.delta, n2, m2).unwrap();
            for s in 0..t as i64 {
                let spec2 = sector_space(&idx2, s, point.alpha, point.beta);
                let mut red = crate::ospace::OReducer::new(spec2);
                for j in (-depth..=0).rev() {
                    let gen = f_generator(idx, s, point.alpha, point.beta, j);
                    if !red.member(&gen) {
                        return PointOutcome::fail(
                            params,
                            format!(
                                "generator (s={s}, j={j}) escapes n'={} m'={}",
                                n2.render(t),
                                m2.render(t)
                            ),
                        );
                    }
                }
            }
        }
        PointOutcome::pass(params)
    });
    CheckReport::new("descend", points)
}

/// The involution exchanges the `(beta, alpha)` dual-sector space with the
/// `(alpha, beta)` one: images of generators stay inside, both directions.
pub fn check_phi_map(grid: &Grid) -> CheckReport {
    let items: Vec<_> = grid.points().into_iter().map(|p| ((), p)).collect();
    let depth = grid.depth;
    let points = run_grouped(items, |_, point| {
        let params = point.describe();
        let idx = &point.idx;
        let t = idx.t as i64;
        let (alpha, beta) = (point.alpha, point.beta);
        let n_cap = alpha + beta - 1 - idx.delta;
        let gamma = rat_int(alpha + beta - 2) + idx.m.value(idx.t) - idx.n.value(idx.t);
        let mut phi_map = crate::ospace::PhiCache::new(n_cap, gamma);
        for s in 0..t {
            let sv = idx.s_vee(s);
            let mut red_ab = crate::ospace::OReducer::new(sector_space(idx, s, alpha, beta));
            let mut red_ba = crate::ospace::OReducer::new(sector_space(idx, sv, beta, alpha));
            for j in (-depth..=0).rev() {
                let fwd = phi_map.apply(&f_generator(idx, sv, beta, alpha, j));
                if !red_ab.member(&fwd) {
                    return PointOutcome::fail(
                        params,
                        format!("phi image (s={s}, j={j}) escapes the (a,b) space"),
                    );
                }
                let bwd = phi_map.apply(&f_generator(idx, s, alpha, beta, j));
                if !red_ba.member(&bwd) {
                    return PointOutcome::fail(
                        params,
                        format!("phi image (s={s}, j={j}) escapes the (b,a) space"),
                    );
                }
            }
        }
        PointOutcome::pass(params)
    });
    CheckReport::new("phi_map", points)
}

/// Involution and image property of `phi` on random polynomials.
pub fn check_phi_involution(samples: usize, seed: u64) -> CheckReport {
    let n_caps = [-2i64, -1, 0, 1, 2, 3];
    let gammas = [rat_int(0), rat_int(1), rat_int(-1), rat(1, 2), rat(-3, 2), rat(7, 3)];
    let mut items = Vec::new();
    for &n_cap in &n_caps {
        for gamma in &gammas {
            items.push(((), (n_cap, gamma.clone())));
        }
    }
    let points = run_grouped(items, |_, (n_cap, gamma)| {
        let params = format!("N={n_cap} gamma={}", render(gamma));
        let mut rng = Rng::new(seed ^ (*n_cap as u64).wrapping_mul(0x1234567));
        for s in 0..samples {
            let f = rng.laurent(-6, n_cap + 3, 6);
            let twice = phi(*n_cap, gamma, &phi(*n_cap, gamma, &f));
            if twice != f {
                return PointOutcome::fail(params, format!("involution fails on sample {s}"));
            }
        }
        // Image property: generators map into the reflected space, both ways.
        for q_exp in [rat_int(0), rat_int(1), rat_int(-1), rat(1, 2), rat(5, 3), rat(-3, 4)] {
            for q_floor in -3..=1i64 {
                let spec = OSpaceSpec::new(*n_cap, q_exp.clone(), q_floor);
                let mirror = OSpaceSpec::new(
                    *n_cap,
                    gamma - &q_exp - rat_int(q_floor),
                    q_floor,
                );
                for j in -6..=0 {
                    let img = phi(*n_cap, gamma, &o_generator(&spec, j));
                    if !member_o(&img, &mirror) {
                        return PointOutcome::fail(
                            params,
                            format!("image escapes at Q={}, q={q_floor}, j={j}", render(&q_exp)),
                        );
                    }
                    let back = phi(*n_cap, gamma, &o_generator(&mirror, j));
                    if !member_o(&back, &spec) {
                        return PointOutcome::fail(
                            params,
                            format!(
                                "reverse image escapes at Q={}, q={q_floor}, j={j}",
                                render(&q_exp)
                            ),
                        );
                    }
                }
            }
        }
        PointOutcome::pass(params)
    });
    CheckReport::new("phi_involution", points)
}

/// Frozen scalar and polynomial values reproduced bit-exactly.
pub fn check_fixed_values() -> CheckReport {
    let mut points = Vec::new();

    let spec = OSpaceSpec::new(0, rat(1, 2), -2);
    let red = reduce_mod_o(&LaurentPoly::unit_monomial(-2), &spec);
    let expect = LaurentPoly::from_terms([(-1, rat(-1, 2)), (0, rat(1, 8))]);
    points.push(if red.canonical == expect {
        PointOutcome::pass("reduce z^-2 mod O(0,1/2,-2)".into())
    } else {
        PointOutcome::fail("reduce z^-2 mod O(0,1/2,-2)".into(), format!("{}", red.canonical))
    });

    let mut ctx = MuContext::new();
    let idx = ZhuIndex::new(1, 0, Grade::zero(), Grade::zero()).unwrap();
    let mu = ctx.mu(&idx, 0, 0, 0, -1).unwrap();
    points.push(if mu == LaurentPoly::unit_monomial(-1) {
        PointOutcome::pass("mu(0,0,-1) = z^-1".into())
    } else {
        PointOutcome::fail("mu(0,0,-1) = z^-1".into(), format!("{mu}"))
    });

    let idxp = idx.clone().with_p(Grade::zero()).unwrap();
    let pi00 = ctx.pi(&idxp, 0, 0).unwrap();
    points.push(if pi00 == LaurentPoly::unit_monomial(-1) {
        PointOutcome::pass("pi(0,0) = z^-1".into())
    } else {
        PointOutcome::fail("pi(0,0) = z^-1".into(), format!("{pi00}"))
    });

    let pi11 = ctx.pi(&idxp, 1, 1).unwrap();
    let expect11 = LaurentPoly::from_terms([(-1, rat_int(1)), (0, rat_int(1))]);
    points.push(if pi11 == expect11 {
        PointOutcome::pass("pi(1,1) = z^-1 + z^0".into())
    } else {
        PointOutcome::fail("pi(1,1) = z^-1 + z^0".into(), format!("{pi11}"))
    });

    let det = det_exact(&build_binomial_matrix(&[rat(3, 2), rat(1, 3)], 1)).unwrap();
    points.push(if det == rat(7, 6) {
        PointOutcome::pass("det at (3/2, 1/3), b=1".into())
    } else {
        PointOutcome::fail("det at (3/2, 1/3), b=1".into(), render(&det))
    });

    CheckReport::new("fixed_values", points)
}

/// Joint reduction shape: every window monomial stays canonical and the
/// reduction of the full window is consistent component by component.
pub fn check_reduction_consistency(grid: &Grid) -> CheckReport {
    let items: Vec<_> = grid
        .points()
        .into_iter()
        .map(|p| (MuKey::of(&p.idx, p.alpha, p.beta), p))
        .collect();
    let points = run_grouped(items, |_, point| {
        let params = point.describe();
        let idx = &point.idx;
        let specs = sector_spaces(idx, point.alpha, point.beta);
        match reduce_mod_intersection(&LaurentPoly::unit_monomial(0), &specs) {
            Ok(reds) => {
                for (red, spec) in reds.iter().zip(&specs) {
                    if !red.canonical.supported_in(spec.q_floor + 1, spec.n_cap) {
                        return PointOutcome::fail(params, "canonical escaped window".into());
                    }
                }
                PointOutcome::pass(params)
            }
            Err(e) => err_outcome(params, e),
        }
    });
    CheckReport::new("reduction_consistency", points)
}

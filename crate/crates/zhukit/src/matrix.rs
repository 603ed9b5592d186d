//! Dense exact rational matrices: fraction-free determinants, linear solves,
//! and the binomial matrices whose nonsingularity backs the unit polynomials.

use crate::error::{Error, Result};
use crate::rational::{binom, rat_int, Rational};
use num::{BigInt, BigRational, Integer, One, Zero};

#[derive(Clone, Debug, PartialEq)]
pub struct RationalMatrix {
    pub rows: usize,
    pub cols: usize,
    entries: Vec<Rational>,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, entries: vec![Rational::zero(); rows * cols] }
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> Rational) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                entries.push(f(r, c));
            }
        }
        Self { rows, cols, entries }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |r, c| if r == c { Rational::one() } else { Rational::zero() })
    }

    pub fn at(&self, r: usize, c: usize) -> &Rational {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Rational) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }
}

/// Exact determinant by fraction-free (Bareiss) elimination.
///
/// Rows are first scaled to integers; the Bareiss recurrence then keeps every
/// intermediate entry an exact minor of the scaled matrix, avoiding gcd work
/// on every step.
pub fn det_exact(m: &RationalMatrix) -> Result<Rational> {
    if !m.is_square() {
        return Err(Error::NotSquare { rows: m.rows, cols: m.cols });
    }
    let n = m.rows;
    if n == 0 {
        return Ok(Rational::one());
    }

    // Clear denominators row by row.
    let mut scale = BigInt::one();
    let mut a: Vec<Vec<BigInt>> = Vec::with_capacity(n);
    for r in 0..n {
        let mut lcm = BigInt::one();
        for c in 0..n {
            lcm = lcm.lcm(m.at(r, c).denom());
        }
        a.push((0..n).map(|c| m.at(r, c).numer() * (&lcm / m.at(r, c).denom())).collect());
        scale *= lcm;
    }

    let mut sign = 1i64;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return Ok(Rational::zero()),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = num / &prev;
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    let det = BigRational::new(a[n - 1][n - 1].clone() * BigInt::from(sign), scale);
    Ok(det)
}

/// Solves `M x = b` for several right-hand sides at once by Gauss-Jordan
/// elimination with partial pivoting, exactly.
///
/// Errors with [`Error::SingularSystem`] if the matrix is singular.
pub fn solve_batch(m: &RationalMatrix, rhs: &[Vec<Rational>]) -> Result<Vec<Vec<Rational>>> {
    if !m.is_square() {
        return Err(Error::NotSquare { rows: m.rows, cols: m.cols });
    }
    let n = m.rows;
    let k = rhs.len();
    for b in rhs {
        assert_eq!(b.len(), n, "rhs length mismatch");
    }
    let width = n + k;
    let mut a: Vec<Vec<Rational>> = (0..n)
        .map(|r| {
            let mut row: Vec<Rational> = (0..n).map(|c| m.at(r, c).clone()).collect();
            row.extend(rhs.iter().map(|b| b[r].clone()));
            row
        })
        .collect();

    for col in 0..n {
        // Pick the structurally cheapest nonzero pivot to limit growth.
        let pivot = (col..n)
            .filter(|&r| !a[r][col].is_zero())
            .min_by_key(|&r| {
                a[r][col].numer().magnitude().bits() + a[r][col].denom().magnitude().bits()
            })
            .ok_or(Error::SingularSystem)?;
        a.swap(col, pivot);
        let inv = a[col][col].clone();
        for j in col..width {
            a[col][j] /= &inv;
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col].clone();
            for j in col..width {
                let sub = &factor * &a[col][j];
                a[r][j] -= sub;
            }
        }
    }

    Ok((0..k)
        .map(|b| (0..n).map(|r| a[r][n + b].clone()).collect())
        .collect())
}

/// Fraction-free LU-style factorization for repeated exact solves.
///
/// Rows are scaled to integers and eliminated with the Bareiss one-step
/// recurrence, so every stored intermediate is a minor of the scaled matrix.
/// Each right-hand side is then replayed through the recorded eliminations
/// and finished with fraction-free back substitution: all divisions are
/// exact and no rational normalization happens until the very end.
pub struct BareissSolver {
    n: usize,
    // Scale of each original row, in the pre-permutation order.
    row_scales: Vec<BigInt>,
    // swap_with[k] = row exchanged into position k at step k, if any.
    swap_with: Vec<Option<usize>>,
    // Upper triangle after elimination, including the diagonal of pivots.
    upper: Vec<Vec<BigInt>>,
    // lower[k][i - k - 1] = entry (i, k) at the time column k was eliminated.
    lower: Vec<Vec<BigInt>>,
    pivots: Vec<BigInt>,
}

impl BareissSolver {
    pub fn new(m: &RationalMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::NotSquare { rows: m.rows, cols: m.cols });
        }
        let n = m.rows;
        let mut row_scales = Vec::with_capacity(n);
        let mut a: Vec<Vec<BigInt>> = Vec::with_capacity(n);
        for r in 0..n {
            let mut lcm = BigInt::one();
            for c in 0..n {
                lcm = lcm.lcm(m.at(r, c).denom());
            }
            a.push((0..n).map(|c| m.at(r, c).numer() * (&lcm / m.at(r, c).denom())).collect());
            row_scales.push(lcm);
        }

        let mut swap_with = vec![None; n];
        let mut lower: Vec<Vec<BigInt>> = Vec::with_capacity(n);
        let mut pivots = Vec::with_capacity(n);
        let mut prev = BigInt::one();
        for k in 0..n {
            if a[k][k].is_zero() {
                let Some(r) = (k + 1..n).find(|&r| !a[r][k].is_zero()) else {
                    return Err(Error::SingularSystem);
                };
                a.swap(k, r);
                swap_with[k] = Some(r);
            }
            let mut col = Vec::with_capacity(n - k - 1);
            for i in k + 1..n {
                col.push(a[i][k].clone());
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = num / &prev;
                }
                a[i][k] = BigInt::zero();
            }
            prev = a[k][k].clone();
            pivots.push(prev.clone());
            lower.push(col);
        }

        let upper = a.into_iter().enumerate().map(|(i, row)| row[i..].to_vec()).collect();
        Ok(Self { n, row_scales, swap_with, upper, lower, pivots })
    }

    /// Determinant of the scaled integer matrix (sign included).
    fn det_int(&self) -> &BigInt {
        &self.pivots[self.n - 1]
    }

    /// Exact solution of `M x = b`.
    pub fn solve(&self, rhs: &[Rational]) -> Vec<Rational> {
        assert_eq!(rhs.len(), self.n);
        let n = self.n;
        let mut den = BigInt::one();
        for c in rhs {
            den = den.lcm(c.denom());
        }
        let mut b: Vec<BigInt> = (0..n)
            .map(|i| rhs[i].numer() * (&den / rhs[i].denom()) * &self.row_scales[i])
            .collect();

        // Replay the forward elimination, swaps interleaved at their steps.
        let mut prev = BigInt::one();
        for k in 0..n {
            if let Some(r) = self.swap_with[k] {
                b.swap(k, r);
            }
            let pivot = &self.pivots[k];
            for i in k + 1..n {
                let num = &b[i] * pivot - &self.lower[k][i - k - 1] * &b[k];
                b[i] = num / &prev;
            }
            prev = pivot.clone();
        }

        // Fraction-free back substitution: y_i = det * x_i stays integral.
        let det = self.det_int();
        let mut y = vec![BigInt::zero(); n];
        for i in (0..n).rev() {
            let mut acc = det * &b[i];
            for j in i + 1..n {
                acc -= &self.upper[i][j - i] * &y[j];
            }
            y[i] = acc / &self.upper[i][0];
        }
        y.into_iter()
            .map(|v| Rational::new(v, det * &den))
            .collect()
    }
}

mod modular {
    //! Word-size modular arithmetic for the multi-prime solver.

    pub fn mul(a: u64, b: u64, p: u64) -> u64 {
        ((a as u128 * b as u128) % p as u128) as u64
    }

    pub fn pow(mut a: u64, mut e: u64, p: u64) -> u64 {
        let mut acc = 1u64;
        a %= p;
        while e > 0 {
            if e & 1 == 1 {
                acc = mul(acc, a, p);
            }
            a = mul(a, a, p);
            e >>= 1;
        }
        acc
    }

    pub fn inv(a: u64, p: u64) -> u64 {
        pow(a, p - 2, p)
    }

    fn is_prime(n: u64) -> bool {
        if n < 2 {
            return false;
        }
        for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
            if n == q {
                return true;
            }
            if n % q == 0 {
                return false;
            }
        }
        // Deterministic Miller-Rabin for u64.
        let d = n - 1;
        let s = d.trailing_zeros();
        let d = d >> s;
        'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
            let mut x = pow(a, d, n);
            if x == 1 || x == n - 1 {
                continue;
            }
            for _ in 1..s {
                x = mul(x, x, n);
                if x == n - 1 {
                    continue 'witness;
                }
            }
            return false;
        }
        true
    }

    /// The first `count` primes below 2^62, descending.
    pub fn primes(count: usize) -> Vec<u64> {
        let mut out = Vec::with_capacity(count);
        let mut candidate = (1u64 << 62) - 1;
        while out.len() < count {
            if is_prime(candidate) {
                out.push(candidate);
            }
            candidate -= 2;
        }
        out
    }
}

/// One LU factorization modulo a prime.
struct PrimeLu {
    p: u64,
    n: usize,
    // In-place LU with unit lower part implicit; row-permuted.
    lu: Vec<Vec<u64>>,
    perm: Vec<usize>,
}

impl PrimeLu {
    /// Returns `None` when the matrix is singular modulo `p` or an entry
    /// denominator vanishes modulo `p` (a bad prime either way).
    fn new(m: &RationalMatrix, p: u64) -> Option<Self> {
        let n = m.rows;
        let to_mod = |x: &Rational| -> Option<u64> {
            let num = (x.numer() % BigInt::from(p)).to_i64().unwrap();
            let num = num.rem_euclid(p as i64) as u64;
            let den = (x.denom() % BigInt::from(p)).to_i64().unwrap() as u64;
            if den == 0 {
                return None;
            }
            Some(modular::mul(num, modular::inv(den, p), p))
        };
        let mut a: Vec<Vec<u64>> = Vec::with_capacity(n);
        for r in 0..n {
            let mut row = Vec::with_capacity(n);
            for c in 0..n {
                row.push(to_mod(m.at(r, c))?);
            }
            a.push(row);
        }
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let pivot_row = (k..n).find(|&r| a[r][k] != 0)?;
            a.swap(k, pivot_row);
            perm.swap(k, pivot_row);
            let inv_pivot = modular::inv(a[k][k], p);
            for i in k + 1..n {
                if a[i][k] == 0 {
                    continue;
                }
                let factor = modular::mul(a[i][k], inv_pivot, p);
                a[i][k] = factor;
                for j in k + 1..n {
                    let sub = modular::mul(factor, a[k][j], p);
                    a[i][j] = (a[i][j] + p - sub) % p;
                }
            }
        }
        Some(Self { p, n, lu: a, perm })
    }

    fn solve(&self, rhs_mod: &[u64]) -> Vec<u64> {
        let n = self.n;
        let p = self.p;
        let mut b: Vec<u64> = self.perm.iter().map(|&i| rhs_mod[i]).collect();
        for k in 0..n {
            for i in k + 1..n {
                let sub = modular::mul(self.lu[i][k], b[k], p);
                b[i] = (b[i] + p - sub) % p;
            }
        }
        for i in (0..n).rev() {
            let mut acc = b[i];
            for j in i + 1..n {
                let sub = modular::mul(self.lu[i][j], b[j], p);
                acc = (acc + p - sub) % p;
            }
            b[i] = modular::mul(acc, modular::inv(self.lu[i][i], p), p);
        }
        b
    }
}

/// Multi-prime exact solver: solutions are computed modulo enough word-size
/// primes, combined by the Chinese remainder theorem, reconstructed as
/// rationals, and certified by an exact residual check. A failed
/// certification only ever costs more primes, never a wrong answer.
pub struct ModSolver {
    m: RationalMatrix,
    // Row-scaled integer copy for fast exact verification.
    m_int: Vec<Vec<BigInt>>,
    row_scales: Vec<BigInt>,
    lus: Vec<PrimeLu>,
    primes_tried: usize,
}

impl ModSolver {
    pub fn new(m: &RationalMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::NotSquare { rows: m.rows, cols: m.cols });
        }
        let n = m.rows;
        let mut m_int = Vec::with_capacity(n);
        let mut row_scales = Vec::with_capacity(n);
        for r in 0..n {
            let mut lcm = BigInt::one();
            for c in 0..n {
                lcm = lcm.lcm(m.at(r, c).denom());
            }
            m_int.push(
                (0..n)
                    .map(|c| m.at(r, c).numer() * (&lcm / m.at(r, c).denom()))
                    .collect::<Vec<_>>(),
            );
            row_scales.push(lcm);
        }
        let mut solver = Self {
            m: m.clone(),
            m_int,
            row_scales,
            lus: Vec::new(),
            primes_tried: 0,
        };
        solver.ensure_lus(4)?;
        Ok(solver)
    }

    fn ensure_lus(&mut self, count: usize) -> Result<()> {
        while self.lus.len() < count {
            if self.primes_tried >= 96 {
                return Err(Error::SingularSystem);
            }
            let batch = modular::primes(self.primes_tried + 8);
            let mut progressed = false;
            for &p in &batch[self.primes_tried..] {
                self.primes_tried += 1;
                if let Some(lu) = PrimeLu::new(&self.m, p) {
                    self.lus.push(lu);
                    progressed = true;
                    if self.lus.len() >= count {
                        break;
                    }
                }
            }
            // Many consecutive singular primes means the matrix itself is
            // singular; the caller may confirm with the fraction-free route.
            if !progressed && self.primes_tried >= 24 && self.lus.is_empty() {
                return Err(Error::SingularSystem);
            }
        }
        Ok(())
    }

    /// Exact solution of `M x = b`.
    pub fn solve(&mut self, rhs: &[Rational]) -> Result<Vec<Rational>> {
        let n = self.m.rows;
        assert_eq!(rhs.len(), n);
        let mut used = 0usize;
        let mut residues: Vec<Vec<u64>> = Vec::new(); // per prime, per coord
        let mut target = 4usize;
        loop {
            self.ensure_lus(target)?;
            while used < self.lus.len().min(target) {
                let lu = &self.lus[used];
                let p = lu.p;
                let rhs_mod: Vec<u64> = rhs
                    .iter()
                    .map(|x| {
                        let num =
                            (x.numer() % BigInt::from(p)).to_i64().unwrap().rem_euclid(p as i64)
                                as u64;
                        let den = (x.denom() % BigInt::from(p)).to_i64().unwrap() as u64;
                        modular::mul(num, modular::inv(den, p), p)
                    })
                    .collect();
                residues.push(lu.solve(&rhs_mod));
                used += 1;
            }
            if let Some(sol) = self.reconstruct(&residues, used) {
                if self.verify(&sol, rhs) {
                    return Ok(sol);
                }
            }
            target *= 2;
            if target > 96 {
                return Err(Error::SingularSystem);
            }
        }
    }

    fn reconstruct(&self, residues: &[Vec<u64>], used: usize) -> Option<Vec<Rational>> {
        let n = self.m.rows;
        let mut modulus = BigInt::one();
        for lu in self.lus.iter().take(used) {
            modulus *= BigInt::from(lu.p);
        }
        let mut out = Vec::with_capacity(n);
        for coord in 0..n {
            // Incremental CRT across the primes.
            let mut x = BigInt::zero();
            let mut acc_mod = BigInt::one();
            for (res, lu) in residues.iter().zip(self.lus.iter()).take(used) {
                let p = BigInt::from(lu.p);
                let cur = (&x % &p + &p) % &p;
                let diff = (BigInt::from(res[coord]) + &p - cur) % &p;
                let acc_inv = mod_inverse(&acc_mod, &p)?;
                let step = (diff * acc_inv) % &p;
                x += &acc_mod * step;
                acc_mod *= &p;
            }
            out.push(rational_reconstruct(&x, &modulus)?);
        }
        Some(out)
    }

    /// Exact residual check of a candidate solution, in integers.
    fn verify(&self, sol: &[Rational], rhs: &[Rational]) -> bool {
        let n = self.m.rows;
        let mut den = BigInt::one();
        for x in sol {
            den = den.lcm(x.denom());
        }
        let y: Vec<BigInt> = sol.iter().map(|x| x.numer() * (&den / x.denom())).collect();
        for i in 0..n {
            let mut acc = BigInt::zero();
            for j in 0..n {
                if !y[j].is_zero() {
                    acc += &self.m_int[i][j] * &y[j];
                }
            }
            // Row i of the scaled system must equal S_i * rhs_i * den.
            let expect = &self.row_scales[i] * rhs[i].numer() * (&den / rhs[i].denom());
            if rhs[i].denom().is_one() {
                if acc != &self.row_scales[i] * rhs[i].numer() * &den {
                    return false;
                }
            } else if acc != expect * BigInt::one() {
                return false;
            }
        }
        true
    }
}

fn mod_inverse(a: &BigInt, p: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(p);
    if !e.gcd.is_one() {
        return None;
    }
    Some(((e.x % p) + p) % p)
}

/// Rational reconstruction: the unique `n/d` with `|n|, d <= sqrt(P/2)` and
/// `n = x d (mod P)`, when it exists.
fn rational_reconstruct(x: &BigInt, modulus: &BigInt) -> Option<Rational> {
    let bound = modulus.sqrt() / BigInt::from(2u8).sqrt().max(BigInt::one());
    let bound = if bound.is_zero() { BigInt::one() } else { bound };
    let (mut r0, mut r1) = (modulus.clone(), ((x % modulus) + modulus) % modulus);
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while r1 >= bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        r0 = r1;
        r1 = r2;
        t0 = t1;
        t1 = t2;
    }
    if t1.is_zero() {
        return None;
    }
    let num = if t1 < BigInt::zero() { -r1 } else { r1 };
    let den = if t1 < BigInt::zero() { -t1 } else { t1 };
    if den.magnitude().bits() as i64 * 2 > modulus.magnitude().bits() as i64 {
        return None;
    }
    Some(Rational::new(num, den))
}

/// Exact inverse via Gauss-Jordan with identity augmentation.
pub fn invert(m: &RationalMatrix) -> Result<RationalMatrix> {
    if !m.is_square() {
        return Err(Error::NotSquare { rows: m.rows, cols: m.cols });
    }
    let n = m.rows;
    let rhs: Vec<Vec<Rational>> = (0..n)
        .map(|c| {
            (0..n)
                .map(|r| if r == c { Rational::one() } else { Rational::zero() })
                .collect()
        })
        .collect();
    let cols = solve_batch(m, &rhs)?;
    Ok(RationalMatrix::from_fn(n, n, |r, c| cols[c][r].clone()))
}

/// A basis of the right nullspace of `m`, in a deterministic order.
pub fn nullspace(m: &RationalMatrix) -> Vec<Vec<Rational>> {
    let rows = m.rows;
    let cols = m.cols;
    let mut a: Vec<Vec<Rational>> =
        (0..rows).map(|r| (0..cols).map(|c| m.at(r, c).clone()).collect()).collect();

    // Row-reduce to RREF, tracking pivot columns.
    let mut pivots: Vec<usize> = Vec::new();
    let mut row = 0usize;
    for col in 0..cols {
        let Some(p) = (row..rows).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(row, p);
        let inv = a[row][col].clone();
        for j in col..cols {
            a[row][j] /= &inv;
        }
        for r in 0..rows {
            if r != row && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for j in col..cols {
                    let sub = &f * &a[row][j];
                    a[r][j] -= sub;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == rows {
            break;
        }
    }

    let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
    let mut basis = Vec::new();
    for free in 0..cols {
        if pivot_set.contains(&free) {
            continue;
        }
        let mut v = vec![Rational::zero(); cols];
        v[free] = Rational::one();
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = -a[r][free].clone();
        }
        basis.push(v);
    }
    basis
}

/// Entry `alpha_i^k(x) = sum_{j=1}^{k} binom(x, i+j) binom(-x, k-j)`.
pub fn alpha_entry(x: &Rational, i: i64, k: i64) -> Rational {
    assert!(k >= 1, "alpha entry needs k >= 1");
    let mut acc = Rational::zero();
    let neg = -x.clone();
    for j in 1..=k {
        acc += binom(x, i + j) * binom(&neg, k - j);
    }
    acc
}

/// The square matrix `A = (A_0 ... A_{t-1})` of order `t*b`.
///
/// Block `s` holds `alpha_i^k(x_s)` with rows indexed by
/// `i = (t-1)b - 1` down to `-b` and columns `k = 1..b`.
pub fn build_binomial_matrix(xs: &[Rational], b: i64) -> RationalMatrix {
    assert!(b >= 1 && !xs.is_empty());
    let t = xs.len() as i64;
    let order = (t * b) as usize;
    // Precompute binomial rows per block; every entry is a short convolution
    // of the two rows.
    let rows: Vec<(Vec<Rational>, Vec<Rational>)> = xs
        .iter()
        .map(|x| {
            let pos: Vec<Rational> =
                crate::rational::BinomRow::new(x).take(order + b as usize + 1).collect();
            let neg: Vec<Rational> = crate::rational::BinomRow::new(&-x.clone())
                .take(b as usize + 1)
                .collect();
            (pos, neg)
        })
        .collect();
    RationalMatrix::from_fn(order, order, |r, c| {
        let i = (t - 1) * b - 1 - r as i64;
        let s = (c as i64 / b) as usize;
        let k = c as i64 % b + 1;
        let (pos, neg) = &rows[s];
        let mut acc = Rational::zero();
        for j in 1..=k {
            if i + j >= 0 {
                acc += &pos[(i + j) as usize] * &neg[(k - j) as usize];
            }
        }
        acc
    })
}

/// Closed-form value of `det(build_binomial_matrix(xs, b))`:
/// `prod_{0<=i<j<=t-1} prod_{k=-b+1}^{b-1} ((x_i - x_j + k)/(b(j-i) + k))^(b-|k|)`.
pub fn det_closed_form(xs: &[Rational], b: i64) -> Rational {
    let t = xs.len() as i64;
    let mut acc = Rational::one();
    for i in 0..t {
        for j in i + 1..t {
            for k in (-b + 1)..=(b - 1) {
                let num = &xs[i as usize] - &xs[j as usize] + rat_int(k);
                let den = rat_int(b * (j - i) + k);
                let factor = num / den;
                for _ in 0..(b - k.abs()) {
                    acc *= &factor;
                }
            }
        }
    }
    acc
}

/// The sector reduction matrix of order `T(N-q)`.
///
/// Entries are `alpha^{s,k}_{-i+q} = sum_{j=1}^k binom(-Q_s, -i+q+j) binom(Q_s, k-j)`,
/// which is `build_binomial_matrix` at `x_s = -Q_s` with `b = N - q`: the row
/// index `i` (running over the source window) maps to the subscript `-i+q`,
/// giving the identical row order.
pub fn build_gamma(n_cap: i64, q_floor: i64, qs: &[Rational]) -> Result<RationalMatrix> {
    if n_cap <= q_floor {
        return Err(Error::Precondition(format!(
            "gamma matrix needs N > q, got N={n_cap}, q={q_floor}"
        )));
    }
    let xs: Vec<Rational> = qs.iter().map(|q| -q.clone()).collect();
    Ok(build_binomial_matrix(&xs, n_cap - q_floor))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn det_identity() {
        assert_eq!(det_exact(&RationalMatrix::identity(5)).unwrap(), rat_int(1));
    }

    #[test]
    fn det_two_by_two() {
        let m = RationalMatrix::from_fn(2, 2, |r, c| match (r, c) {
            (0, 0) => rat(3, 2),
            (0, 1) => rat(1, 3),
            (1, 0) => rat_int(1),
            (1, 1) => rat_int(1),
        _ => unreachable!(),
        });
        assert_eq!(det_exact(&m).unwrap(), rat(7, 6));
    }

    #[test]
    fn det_repeated_row_is_zero() {
        let m = RationalMatrix::from_fn(3, 3, |r, c| {
            if r == 2 {
                rat_int(c as i64 + 1)
            } else {
                rat_int((c as i64 + 1) * (r as i64 + 1))
            }
        });
        // Row 2 equals row 0.
        assert_eq!(det_exact(&m).unwrap(), rat_int(0));
    }

    #[test]
    fn det_rejects_non_square() {
        let m = RationalMatrix::zeros(2, 3);
        assert!(det_exact(&m).is_err());
    }

    #[test]
    fn alpha_delta_identity_for_negative_rows() {
        let x = rat(5, 7);
        assert_eq!(alpha_entry(&x, -1, 1), rat_int(1));
        assert_eq!(alpha_entry(&x, -2, 1), rat_int(0));
        for i in -6..0i64 {
            for k in 1..=5i64 {
                let expect = if i + k == 0 { rat_int(1) } else { rat_int(0) };
                assert_eq!(alpha_entry(&x, i, k), expect, "i={i}, k={k}");
            }
        }
        assert_eq!(alpha_entry(&x, 0, 1), x);
    }

    #[test]
    fn single_block_is_identity() {
        for b in 1..=4i64 {
            let m = build_binomial_matrix(&[rat(2, 3)], b);
            assert_eq!(m, RationalMatrix::identity(b as usize));
            assert_eq!(det_exact(&m).unwrap(), rat_int(1));
        }
    }

    #[test]
    fn two_blocks_order_two() {
        let m = build_binomial_matrix(&[rat(3, 2), rat(1, 3)], 1);
        assert_eq!(*m.at(0, 0), rat(3, 2));
        assert_eq!(*m.at(0, 1), rat(1, 3));
        assert_eq!(*m.at(1, 0), rat_int(1));
        assert_eq!(*m.at(1, 1), rat_int(1));
        assert_eq!(det_exact(&m).unwrap(), rat(7, 6));
        assert_eq!(det_closed_form(&[rat(3, 2), rat(1, 3)], 1), rat(7, 6));
    }

    #[test]
    fn closed_form_trivial_cases() {
        assert_eq!(det_closed_form(&[rat(9, 4)], 3), rat_int(1));
        // Substituting ((t-1)b, (t-2)b, ..., 0) makes every factor
        // (b(j-i)+k)/(b(j-i)+k) = 1.
        for (t, b) in [(2i64, 2i64), (3, 1), (3, 2)] {
            let xs: Vec<Rational> = (0..t).map(|s| rat_int((t - 1 - s) * b)).collect();
            assert_eq!(det_closed_form(&xs, b), rat_int(1));
            assert_eq!(det_exact(&build_binomial_matrix(&xs, b)).unwrap(), rat_int(1));
        }
    }

    #[test]
    fn closed_form_vanishes_on_integer_collision() {
        // x_0 - x_1 + k = 0 with |k| <= b-1 forces a zero determinant.
        let xs = [rat(5, 2), rat(3, 2)];
        let v = det_closed_form(&xs, 2);
        assert_eq!(v, rat_int(0));
        assert_eq!(det_exact(&build_binomial_matrix(&xs, 2)).unwrap(), rat_int(0));
    }

    #[test]
    fn gamma_matches_binomial_matrix() {
        let qs = [rat_int(1), rat(1, 2)];
        let g = build_gamma(0, -1, &qs).unwrap();
        let a = build_binomial_matrix(&[rat_int(-1), rat(-1, 2)], 1);
        assert_eq!(g, a);
        assert_eq!(det_exact(&g).unwrap(), rat(-1, 2));
    }

    #[test]
    fn gamma_single_sector_unimodular() {
        // One sector: lower triangular with unit diagonal.
        let g = build_gamma(2, -2, &[rat(1, 3)]).unwrap();
        assert_eq!(det_exact(&g).unwrap(), rat_int(1));
    }

    #[test]
    fn gamma_rejects_degenerate_window() {
        assert!(build_gamma(-2, -2, &[rat_int(0)]).is_err());
    }

    #[test]
    fn solve_batch_round_trip() {
        let m = RationalMatrix::from_fn(3, 3, |r, c| rat_int((r * c) as i64) + rat(1, 1 + r as i64 + c as i64));
        let rhs = vec![
            vec![rat_int(1), rat_int(0), rat_int(2)],
            vec![rat(1, 2), rat(-2, 3), rat_int(5)],
        ];
        let sols = solve_batch(&m, &rhs).unwrap();
        for (b, x) in rhs.iter().zip(&sols) {
            for r in 0..3 {
                let mut acc = Rational::zero();
                for c in 0..3 {
                    acc += m.at(r, c) * &x[c];
                }
                assert_eq!(acc, b[r]);
            }
        }
    }

    #[test]
    fn bareiss_matches_rational_solver() {
        // Deterministic pseudo-random rational systems, both routes agree.
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for trial in 0..30 {
            let n = 1 + (next() % 6) as usize;
            let m = RationalMatrix::from_fn(n, n, |_, _| {
                rat((next() % 19) as i64 - 9, (next() % 7) as i64 + 1)
            });
            let rhs: Vec<Rational> =
                (0..n).map(|_| rat((next() % 19) as i64 - 9, (next() % 5) as i64 + 1)).collect();
            match BareissSolver::new(&m) {
                Ok(solver) => {
                    let x1 = solver.solve(&rhs);
                    let x2 = solve_batch(&m, &[rhs.clone()]).unwrap();
                    assert_eq!(x1, x2[0], "trial {trial}");
                }
                Err(Error::SingularSystem) => {
                    assert!(matches!(
                        solve_batch(&m, &[rhs.clone()]),
                        Err(Error::SingularSystem)
                    ));
                }
                Err(e) => panic!("unexpected error: {e}"),
            }
        }
    }

    #[test]
    fn bareiss_handles_zero_pivots() {
        // Leading zero forces a row swap.
        let m = RationalMatrix::from_fn(3, 3, |r, c| match (r, c) {
            (0, 0) => rat_int(0),
            (0, 1) => rat_int(2),
            (0, 2) => rat_int(1),
            (1, 0) => rat(1, 2),
            (1, 1) => rat_int(0),
            (1, 2) => rat_int(3),
            (2, 0) => rat_int(1),
            (2, 1) => rat_int(1),
            (2, 2) => rat_int(1),
            _ => unreachable!(),
        });
        let rhs = vec![rat_int(1), rat(2, 3), rat_int(0)];
        let solver = BareissSolver::new(&m).unwrap();
        let x = solver.solve(&rhs);
        for r in 0..3 {
            let mut acc = Rational::zero();
            for c in 0..3 {
                acc += m.at(r, c) * &x[c];
            }
            assert_eq!(acc, rhs[r]);
        }
    }

    #[test]
    fn invert_round_trip() {
        let m = RationalMatrix::from_fn(3, 3, |r, c| {
            rat_int(1) / rat_int(1 + r as i64 + c as i64)
        });
        let inv = invert(&m).unwrap();
        let mut prod = RationalMatrix::zeros(3, 3);
        for r in 0..3 {
            for c in 0..3 {
                let mut acc = Rational::zero();
                for k in 0..3 {
                    acc += m.at(r, k) * inv.at(k, c);
                }
                prod.set(r, c, acc);
            }
        }
        assert_eq!(prod, RationalMatrix::identity(3));
    }

    #[test]
    fn nullspace_of_rank_one() {
        // Rows all equal (1, 2, 3): kernel has dimension 2.
        let m = RationalMatrix::from_fn(2, 3, |_, c| rat_int(c as i64 + 1));
        let basis = nullspace(&m);
        assert_eq!(basis.len(), 2);
        for v in &basis {
            let dot: Rational = (0..3).map(|c| m.at(0, c) * &v[c]).sum();
            assert_eq!(dot, rat_int(0));
        }
        assert!(nullspace(&RationalMatrix::identity(4)).is_empty());
    }

    #[test]
    fn solve_batch_reports_singular() {
        let m = RationalMatrix::from_fn(2, 2, |_, c| rat_int(c as i64));
        assert!(matches!(
            solve_batch(&m, &[vec![rat_int(1), rat_int(1)]]),
            Err(Error::SingularSystem)
        ));
    }
}

//! SP pairs with a fixed gap, generated from the general Pell equation.
//!
//! Given one pair `P1·a² − P2·b² = g` with distinct primes, multiplying by
//! `P1` gives `x² − D·y² = m` with `D = P1·P2`, `m = P1·g` and the solution
//! `(P1·a, b)`. Composing that solution with powers of the fundamental unit
//! of `D` yields infinitely many more. Each one has `P1 | x` because
//! `x² = P1·(P2·y² + g)`, and `(P2·y², P1·(x/P1)²)` is again an SP pair with
//! gap `g` as soon as both square roots are at least 2.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::{Integer, Roots};
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::sieve::{is_prime_u64, is_sp, SpDecomposition, SpTable};

/// Upper bound on unit compositions in [`generate_gap_pairs`].
pub const MAX_COMPOSITIONS: usize = 10_000;

/// `P1·a² − P2·b² = g` with `P1 ≠ P2` prime and `a, b >= 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GapWitness {
    pub g: u64,
    pub p1: u64,
    pub a: u64,
    pub p2: u64,
    pub b: u64,
}

impl fmt::Display for GapWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*{}^2 - {}*{}^2 = {}", self.p1, self.a, self.p2, self.b, self.g)
    }
}

impl GapWitness {
    pub fn new(g: u64, p1: u64, a: u64, p2: u64, b: u64) -> Result<Self> {
        let w = GapWitness { g, p1, a, p2, b };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        let GapWitness { g, p1, a, p2, b } = *self;
        if p1 == p2 {
            return Err(Error::DistinctPrimeRequired(p1));
        }
        if a < 2 || b < 2 {
            return Err(Error::invalid(format!("square roots must be at least 2 in {self}")));
        }
        if !is_prime_u64(p1) || !is_prime_u64(p2) {
            return Err(Error::invalid(format!("non-prime factor in {self}")));
        }
        let large = u128::from(p1) * u128::from(a) * u128::from(a);
        let small = u128::from(p2) * u128::from(b) * u128::from(b);
        if g == 0 || large.checked_sub(small) != Some(u128::from(g)) {
            return Err(Error::invalid(format!("{self} does not hold")));
        }
        Ok(())
    }

    pub fn large(&self) -> u64 {
        self.p1 * self.a * self.a
    }

    pub fn small(&self) -> u64 {
        self.p2 * self.b * self.b
    }
}

fn witness_from(small: SpDecomposition, large: SpDecomposition) -> Result<GapWitness> {
    if small.p == large.p {
        return Err(Error::DistinctPrimeRequired(small.p));
    }
    GapWitness::new(large.n - small.n, large.p, large.a, small.p, small.a)
}

/// Witness for the gap between two SP values (standalone membership, up to 10¹²).
pub fn witness_from_pair(n_small: u64, n_large: u64) -> Result<GapWitness> {
    if n_small >= n_large {
        return Err(Error::invalid(format!("expected {n_small} < {n_large}")));
    }
    let small = is_sp(n_small)?.ok_or_else(|| Error::invalid(format!("{n_small} is not SP")))?;
    let large = is_sp(n_large)?.ok_or_else(|| Error::invalid(format!("{n_large} is not SP")))?;
    witness_from(small, large)
}

/// First SP pair `(v − g, v)` by ascending `v` whose primes differ.
pub fn find_witness(table: &SpTable, g: u64) -> Result<Option<GapWitness>> {
    if g == 0 {
        return Err(Error::invalid("gap must be positive"));
    }
    let start = g.saturating_add(8);
    for v in table.sp_values_in(start, table.limit()) {
        let u = v - g;
        if !table.contains(u)? {
            continue;
        }
        let (Some(small), Some(large)) = (table.decompose(u)?, table.decompose(v)?) else {
            return Err(Error::Internal(format!("table lost decomposition of {u} or {v}")));
        };
        if small.p != large.p {
            return witness_from(small, large).map(Some);
        }
    }
    Ok(None)
}

/// A pair `(x, y)` for some fixed equation `x² − D·y² = m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PellSolution {
    pub x: BigUint,
    pub y: BigUint,
}

impl PellSolution {
    pub fn new(x: impl Into<BigUint>, y: impl Into<BigUint>) -> Self {
        PellSolution { x: x.into(), y: y.into() }
    }

    /// `x² − D·y²`.
    pub fn norm(&self, d: &BigUint) -> BigInt {
        let x = BigInt::from(self.x.clone());
        let y = BigInt::from(self.y.clone());
        &x * &x - BigInt::from(d.clone()) * &y * &y
    }
}

/// Least positive solution of `x² − D·y² = 1`.
///
/// Walks the continued fraction of √D. The period ends when a partial
/// quotient equals `2⌊√D⌋`; the convergent just before it solves the
/// equation when the period length is even, otherwise the second period end
/// does.
pub fn pell_fundamental_unit(d: u64) -> Result<PellSolution> {
    if d < 2 {
        return Err(Error::invalid(format!("D must be at least 2, got {d}")));
    }
    let a0 = d.sqrt();
    if a0 * a0 == d {
        return Err(Error::invalid(format!("D = {d} is a perfect square")));
    }
    let (d128, a0) = (u128::from(d), u128::from(a0));
    let dbig = BigUint::from(d);
    let (mut m, mut den, mut a) = (0u128, 1u128, a0);
    let (mut h_prev, mut h) = (BigUint::one(), BigUint::from(a0));
    let (mut k_prev, mut k) = (BigUint::zero(), BigUint::one());
    loop {
        m = den * a - m;
        den = (d128 - m * m) / den;
        a = (a0 + m) / den;
        if a == 2 * a0 {
            let sol = PellSolution { x: h.clone(), y: k.clone() };
            if sol.norm(&dbig).is_one() {
                return Ok(sol);
            }
        }
        let h_next = &h * a + &h_prev;
        let k_next = &k * a + &k_prev;
        h_prev = std::mem::replace(&mut h, h_next);
        k_prev = std::mem::replace(&mut k, k_next);
    }
}

/// Brahmagupta composition of `s` (norm `m`) with a unit `t` (norm 1).
pub fn pell_compose(s: &PellSolution, t: &PellSolution, d: u64) -> Result<PellSolution> {
    let dbig = BigUint::from(d);
    if !t.norm(&dbig).is_one() {
        return Err(Error::invalid(format!("({}, {}) is not a unit for D = {d}", t.x, t.y)));
    }
    compose_unchecked(s, t, &dbig)
}

fn compose_unchecked(s: &PellSolution, t: &PellSolution, d: &BigUint) -> Result<PellSolution> {
    let out = PellSolution { x: &s.x * &t.x + d * &s.y * &t.y, y: &s.x * &t.y + &s.y * &t.x };
    if out.norm(d) != s.norm(d) {
        return Err(Error::Internal(format!("composition changed the norm for D = {d}")));
    }
    Ok(out)
}

/// `n = p·a²` with unbounded `n` and `a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LargeSp {
    pub n: BigUint,
    pub p: u64,
    pub a: BigUint,
}

impl LargeSp {
    /// Checks `n = p·a²`, `p` prime and `a >= 2` in exact arithmetic.
    pub fn verify(&self) -> bool {
        is_prime_u64(self.p) && self.a >= BigUint::from(2u32) && self.n == &self.a * &self.a * self.p
    }

    /// The same value as a table-sized decomposition, when it fits.
    pub fn to_small(&self) -> Option<SpDecomposition> {
        let n = u64::try_from(&self.n).ok()?;
        let a = u64::try_from(&self.a).ok()?;
        Some(SpDecomposition { n, p: self.p, a })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GapPair {
    pub g: u64,
    pub small: LargeSp,
    pub large: LargeSp,
}

impl GapPair {
    pub fn verify(&self) -> bool {
        self.small.verify()
            && self.large.verify()
            && self.large.n > self.small.n
            && &self.large.n - &self.small.n == BigUint::from(self.g)
    }
}

/// First `count` SP pairs with the witness's gap, ascending.
pub fn generate_gap_pairs(w: &GapWitness, count: usize) -> Result<Vec<GapPair>> {
    w.validate()?;
    if count == 0 {
        return Err(Error::invalid("count must be at least 1"));
    }
    let d =
        w.p1.checked_mul(w.p2)
            .ok_or_else(|| Error::invalid(format!("D = {}*{} overflows u64", w.p1, w.p2)))?;
    let dbig = BigUint::from(d);
    let m = BigInt::from(w.p1) * BigInt::from(w.g);
    let unit = pell_fundamental_unit(d)?;
    let p1 = BigUint::from(w.p1);
    let two = BigUint::from(2u32);

    let mut sol = PellSolution::new(u128::from(w.p1) * u128::from(w.a), w.b);
    let mut out = Vec::with_capacity(count);
    for _ in 0..=MAX_COMPOSITIONS {
        if sol.norm(&dbig) != m {
            return Err(Error::Internal(format!("orbit of {w} left x^2 - {d} y^2 = {m}")));
        }
        let (k, rem) = sol.x.div_rem(&p1);
        if !rem.is_zero() {
            return Err(Error::Internal(format!("{} does not divide x = {} for {w}", w.p1, sol.x)));
        }
        if k >= two && sol.y >= two {
            let small = LargeSp { n: &sol.y * &sol.y * w.p2, p: w.p2, a: sol.y.clone() };
            let large = LargeSp { n: &k * &k * w.p1, p: w.p1, a: k };
            let pair = GapPair { g: w.g, small, large };
            if !pair.verify() {
                return Err(Error::Internal(format!("generated pair failed verification for {w}")));
            }
            out.push(pair);
            if out.len() == count {
                return Ok(out);
            }
        }
        sol = compose_unchecked(&sol, &unit, &dbig)?;
    }
    Err(Error::Internal(format!("no {count} pairs within {MAX_COMPOSITIONS} compositions for {w}")))
}

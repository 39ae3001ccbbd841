//! Range checks for two-SP sums, SP values between consecutive squares, and
//! gap statistics.
//!
//! Range scans split their input into fixed-size chunks and run them on the
//! current rayon pool; results are collected in chunk order, so output never
//! depends on the number of workers.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::sieve::SpTable;

/// Conjecture 1 holds from here on.
pub const GOLDBACH_THRESHOLD: u64 = 3931;
/// Conjecture 2 covers SP values above this.
pub const SP_GOLDBACH_THRESHOLD: u64 = 27;
/// Conjecture 3 covers intervals `(k², (k+1)²)` with `k²` above 500, i.e. `k >= 23`.
pub const SQUARES_THRESHOLD_K: u64 = 23;

const CHUNK: u64 = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Representation {
    pub n: u64,
    pub s1: u64,
    pub s2: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GapRecord {
    pub g: u64,
    pub first_lo: u64,
    pub count: u64,
}

fn check_bound(table: &SpTable, n: u64) -> Result<()> {
    if n > table.limit() {
        Err(Error::OutOfRange { value: n, limit: table.limit() })
    } else {
        Ok(())
    }
}

fn check_range(table: &SpTable, lo: u64, hi: u64) -> Result<()> {
    check_bound(table, hi)?;
    if lo > hi {
        return Err(Error::invalid(format!("empty range: {lo} > {hi}")));
    }
    Ok(())
}

#[inline]
fn representation(table: &SpTable, n: u64) -> Option<Representation> {
    table.sp_values_in(0, n / 2).find(|&s1| table.sp_bit(n - s1)).map(|s1| Representation {
        n,
        s1,
        s2: n - s1,
    })
}

/// `n = s1 + s2` with both SP and the smallest possible `s1`.
pub fn find_two_sp_sum(table: &SpTable, n: u64) -> Result<Option<Representation>> {
    check_bound(table, n)?;
    Ok(representation(table, n))
}

/// Runs `keep` over `[lo, hi]` in parallel chunks, collecting matches in order.
fn scan<F>(lo: u64, hi: u64, keep: F) -> Vec<u64>
where
    F: Fn(u64, u64, &mut Vec<u64>) + Sync,
{
    let chunks = (hi - lo) / CHUNK + 1;
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = lo + c * CHUNK;
            let end = (start + CHUNK - 1).min(hi);
            let mut out = Vec::new();
            keep(start, end, &mut out);
            out
        })
        .flatten_iter()
        .collect()
}

/// Every `n` in `[lo, hi]` that is not a sum of two SP values.
pub fn verify_goldbach_range(table: &SpTable, lo: u64, hi: u64) -> Result<Vec<u64>> {
    check_range(table, lo, hi)?;
    Ok(scan(lo, hi, |a, b, out| {
        out.extend((a..=b).filter(|&n| representation(table, n).is_none()));
    }))
}

/// SP values in `(27, hi]` with no two-SP representation.
pub fn verify_sp_goldbach(table: &SpTable, hi: u64) -> Result<Vec<u64>> {
    verify_sp_goldbach_above(table, SP_GOLDBACH_THRESHOLD, hi)
}

/// SP values in `(above, hi]` with no two-SP representation.
pub fn verify_sp_goldbach_above(table: &SpTable, above: u64, hi: u64) -> Result<Vec<u64>> {
    check_bound(table, hi)?;
    if above >= hi {
        return Ok(Vec::new());
    }
    Ok(scan(above + 1, hi, |a, b, out| {
        out.extend(table.sp_values_in(a, b).filter(|&n| representation(table, n).is_none()));
    }))
}

fn check_k(table: &SpTable, k: u64) -> Result<()> {
    let top = k
        .checked_add(1)
        .and_then(|k1| k1.checked_mul(k1))
        .ok_or_else(|| Error::invalid(format!("k = {k} is too large")))?;
    check_bound(table, top)
}

#[inline]
fn first_between(table: &SpTable, k: u64) -> Option<u64> {
    table.next_sp(k * k + 1).filter(|&s| s < (k + 1) * (k + 1))
}

/// Smallest SP strictly between `k²` and `(k+1)²`.
pub fn sp_between_squares(table: &SpTable, k: u64) -> Result<Option<u64>> {
    if k < 2 {
        return Err(Error::invalid(format!("k must be at least 2, got {k}")));
    }
    check_k(table, k)?;
    Ok(first_between(table, k))
}

/// Every `k` in `[k_min, k_max]` whose square interval holds no SP.
pub fn verify_squares_range(table: &SpTable, k_min: u64, k_max: u64) -> Result<Vec<u64>> {
    if k_min > k_max {
        return Err(Error::invalid(format!("empty range: {k_min} > {k_max}")));
    }
    if k_min < 2 {
        return Err(Error::invalid(format!("k must be at least 2, got {k_min}")));
    }
    check_k(table, k_max)?;
    Ok(scan(k_min, k_max, |a, b, out| {
        out.extend((a..=b).filter(|&k| first_between(table, k).is_none()));
    }))
}

/// Gap sizes between consecutive SP values `<= hi`, ascending by gap.
pub fn gap_histogram(table: &SpTable, hi: u64) -> Result<Vec<GapRecord>> {
    check_bound(table, hi)?;
    let mut gaps: BTreeMap<u64, GapRecord> = BTreeMap::new();
    let mut values = table.sp_values_in(0, hi);
    if let Some(mut prev) = values.next() {
        for v in values {
            let g = v - prev;
            gaps.entry(g).and_modify(|r| r.count += 1).or_insert(GapRecord { g, first_lo: prev, count: 1 });
            prev = v;
        }
    }
    Ok(gaps.into_values().collect())
}

/// Lower members of SP twin pairs `(n, n+1)` with `n + 1 <= hi`.
pub fn sp_twins(table: &SpTable, hi: u64) -> Result<Vec<u64>> {
    check_bound(table, hi)?;
    Ok(table.sp_values_in(0, hi.saturating_sub(1)).filter(|&n| table.sp_bit(n + 1)).collect())
}

//! Prime and square-prime tables over `[0, limit]`.
//!
//! A square-prime (SP) number is `n = p * a^2` with `p` prime and `a >= 2`.
//! The decomposition is unique: if `p * a^2 = q * b^2` with `p`, `q` prime then
//! comparing the parity of each prime's exponent forces `p = q` and `a = b`.
//! So `a^2` is always the largest square dividing `n`, and `n` is SP exactly
//! when that largest square exceeds one and leaves a prime cofactor.
//!
//! Tables are built in two segmented passes. The first pass is an
//! Eratosthenes sieve storing one bit per integer. The second marks every
//! product `p * a^2 <= limit`; since `sum 1/a^2` converges this touches
//! `O(limit)` entries in total. Segments cover disjoint word ranges, so they
//! are processed concurrently on the current rayon pool and the result does
//! not depend on segment size or thread count.

use std::io::{Read, Write};

use num_integer::Roots;
use rayon::prelude::*;

use crate::bits::{words_for, Bits};
use crate::error::{Error, Result};

pub const DEFAULT_SEGMENT_SIZE: u64 = 1 << 20;

/// Largest argument accepted by the standalone [`is_sp`].
pub const STANDALONE_LIMIT: u64 = 1_000_000_000_000;

/// Largest table limit the builder accepts.
pub const MAX_TABLE_LIMIT: u64 = 10_000_000_000;

const DUMP_MAGIC: &[u8; 4] = b"SPT1";

/// A verified witness `n = p * a^2`, `p` prime, `a >= 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SpDecomposition {
    pub n: u64,
    pub p: u64,
    pub a: u64,
}

impl SpDecomposition {
    /// Builds `p * a^2`, checking primality of `p`, `a >= 2` and overflow.
    pub fn new(p: u64, a: u64) -> Result<Self> {
        if a < 2 {
            return Err(Error::invalid(format!("square root {a} must be at least 2")));
        }
        if !is_prime_u64(p) {
            return Err(Error::invalid(format!("{p} is not prime")));
        }
        let n = a
            .checked_mul(a)
            .and_then(|sq| sq.checked_mul(p))
            .ok_or_else(|| Error::invalid(format!("{p}*{a}^2 overflows u64")))?;
        Ok(SpDecomposition { n, p, a })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TableConfig {
    /// Integers per segment; rounded up to a whole number of 64-bit words.
    pub segment_size: u64,
    /// Upper bound on table memory in bytes.
    pub memory_cap: Option<u64>,
}

impl Default for TableConfig {
    fn default() -> Self {
        TableConfig { segment_size: DEFAULT_SEGMENT_SIZE, memory_cap: None }
    }
}

/// Prime and SP membership for every integer in `[0, limit]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpTable {
    limit: u64,
    primes: Bits,
    sp: Bits,
}

/// Builds a table with the default configuration and the given segment size.
pub fn build_table(limit: u64, segment_size: u64) -> Result<SpTable> {
    SpTable::build(limit, &TableConfig { segment_size, memory_cap: None })
}

impl SpTable {
    /// Bytes needed for a table with the given limit, rank directories included.
    pub fn estimate_bytes(limit: u64) -> u64 {
        let words = (limit + 1).div_ceil(64);
        // two bit arrays plus one u64 rank entry per 8 words for each
        2 * (words * 8 + (words / 8 + 2) * 8)
    }

    pub fn build(limit: u64, config: &TableConfig) -> Result<SpTable> {
        if limit < 2 {
            return Err(Error::invalid(format!("table limit must be at least 2, got {limit}")));
        }
        if limit > MAX_TABLE_LIMIT {
            return Err(Error::OutOfRange { value: limit, limit: MAX_TABLE_LIMIT });
        }
        if config.segment_size < 2 {
            return Err(Error::invalid(format!(
                "segment size must be at least 2, got {}",
                config.segment_size
            )));
        }
        let needed = Self::estimate_bytes(limit);
        if let Some(cap) = config.memory_cap {
            if needed > cap {
                return Err(Error::ResourceLimit { limit, needed, cap });
            }
        }
        let seg_words = words_for(config.segment_size).max(1);
        let primes = sieve_primes(limit, seg_words);
        let sp = mark_square_primes(limit, seg_words, &primes);
        Ok(SpTable { limit, primes, sp })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    fn check(&self, n: u64) -> Result<()> {
        if n > self.limit {
            Err(Error::OutOfRange { value: n, limit: self.limit })
        } else {
            Ok(())
        }
    }

    /// Prime membership; `n` must not exceed the limit.
    pub fn is_prime(&self, n: u64) -> Result<bool> {
        self.check(n)?;
        Ok(self.primes.get(n))
    }

    /// SP membership; `n` must not exceed the limit.
    pub fn contains(&self, n: u64) -> Result<bool> {
        self.check(n)?;
        Ok(self.sp.get(n))
    }

    #[inline]
    pub(crate) fn sp_bit(&self, n: u64) -> bool {
        self.sp.get(n)
    }

    #[inline]
    pub(crate) fn prime_bit(&self, n: u64) -> bool {
        self.primes.get(n)
    }

    /// Table variant of [`is_sp`].
    pub fn decompose(&self, n: u64) -> Result<Option<SpDecomposition>> {
        if n == 0 {
            return Err(Error::invalid("0 has no square-prime decomposition"));
        }
        self.check(n)?;
        if !self.sp.get(n) {
            return Ok(None);
        }
        let mut a = 2u64;
        while 2 * a * a <= n {
            let sq = a * a;
            if n.is_multiple_of(sq) && self.primes.get(n / sq) {
                return Ok(Some(SpDecomposition { n, p: n / sq, a }));
            }
            a += 1;
        }
        Err(Error::Internal(format!("{n} is marked SP but has no decomposition")))
    }

    /// π(n).
    pub fn prime_count(&self, n: u64) -> Result<u64> {
        self.check(n)?;
        Ok(self.primes.count_through(n))
    }

    /// Number of SP values `<= n`.
    pub fn sp_count(&self, n: u64) -> Result<u64> {
        self.check(n)?;
        Ok(self.sp.count_through(n))
    }

    /// All SP values in the table, ascending.
    pub fn sp_values(&self) -> impl Iterator<Item = u64> + '_ {
        self.sp.ones_in(0, self.limit)
    }

    /// SP values in `lo..=hi` (clamped to the table), ascending.
    pub fn sp_values_in(&self, lo: u64, hi: u64) -> impl Iterator<Item = u64> + '_ {
        self.sp.ones_in(lo, hi)
    }

    /// Primes in `lo..=hi` (clamped to the table), ascending.
    pub fn primes_in(&self, lo: u64, hi: u64) -> impl Iterator<Item = u64> + '_ {
        self.primes.ones_in(lo, hi)
    }

    /// Smallest SP value `>= from` within the table.
    pub fn next_sp(&self, from: u64) -> Option<u64> {
        self.sp.next_one(from)
    }

    /// Every SP value in `[lo, hi]` with its decomposition, ascending.
    pub fn sp_list(&self, lo: u64, hi: u64) -> Result<Vec<SpDecomposition>> {
        self.check(hi)?;
        if lo > hi {
            return Err(Error::invalid(format!("empty range: {lo} > {hi}")));
        }
        let mut out = Vec::new();
        let mut a = 2u64;
        while 2 * a * a <= hi {
            let sq = a * a;
            let pmin = lo.div_ceil(sq).max(2);
            let pmax = hi / sq;
            if pmin <= pmax {
                out.extend(self.primes.ones_in(pmin, pmax).map(|p| SpDecomposition { n: p * sq, p, a }));
            }
            a += 1;
        }
        out.sort_unstable_by_key(|d| d.n);
        Ok(out)
    }

    /// Writes `"SPT1"`, the limit as little-endian u64, then the prime and SP bit arrays.
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(DUMP_MAGIC)?;
        w.write_all(&self.limit.to_le_bytes())?;
        w.write_all(&self.primes.to_bytes())?;
        w.write_all(&self.sp.to_bytes())?;
        w.flush()?;
        Ok(())
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<SpTable> {
        let mut header = [0u8; 12];
        r.read_exact(&mut header).map_err(|_| Error::Format("truncated header".into()))?;
        if &header[..4] != DUMP_MAGIC {
            return Err(Error::Format("bad magic".into()));
        }
        let limit = u64::from_le_bytes(header[4..].try_into().expect("8 bytes"));
        if !(2..=MAX_TABLE_LIMIT).contains(&limit) {
            return Err(Error::Format(format!("limit {limit} out of range")));
        }
        let nbytes = (limit + 1).div_ceil(8) as usize;
        let mut body = Vec::with_capacity(2 * nbytes);
        r.read_to_end(&mut body)?;
        if body.len() != 2 * nbytes {
            return Err(Error::Format(format!(
                "expected {} payload bytes, found {}",
                2 * nbytes,
                body.len()
            )));
        }
        let primes = Bits::from_bytes(limit + 1, &body[..nbytes])
            .ok_or_else(|| Error::Format("prime bits set past the limit".into()))?;
        let sp = Bits::from_bytes(limit + 1, &body[nbytes..])
            .ok_or_else(|| Error::Format("SP bits set past the limit".into()))?;
        Ok(SpTable { limit, primes, sp })
    }
}

/// π(n) from a table.
pub fn prime_count(table: &SpTable, n: u64) -> Result<u64> {
    table.prime_count(n)
}

/// SP values in `[lo, hi]` with decompositions.
pub fn sp_list(table: &SpTable, lo: u64, hi: u64) -> Result<Vec<SpDecomposition>> {
    table.sp_list(lo, hi)
}

fn small_primes(limit: u64) -> Vec<u64> {
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

fn sieve_primes(limit: u64, seg_words: usize) -> Bits {
    let len = limit + 1;
    let base: Vec<u64> = small_primes(limit.sqrt()).into_iter().filter(|&p| p > 2).collect();
    let mut bits = Bits::zeroed(len);
    bits.words_mut().par_chunks_mut(seg_words).enumerate().for_each(|(seg, chunk)| {
        let lo = (seg * seg_words) as u64 * 64;
        let hi = (lo + chunk.len() as u64 * 64 - 1).min(limit);
        // odd integers only
        chunk.fill(0xAAAA_AAAA_AAAA_AAAA);
        for &p in &base {
            if p * p > hi {
                break;
            }
            let mut m = (p * p).max(lo.div_ceil(p) * p);
            if m % 2 == 0 {
                m += p;
            }
            while m <= hi {
                let i = m - lo;
                chunk[(i >> 6) as usize] &= !(1u64 << (i & 63));
                m += 2 * p;
            }
        }
        if seg == 0 {
            // 1 is not prime, 2 is
            chunk[0] = (chunk[0] & !0b10) | 0b100;
        }
    });
    bits.clear_tail();
    bits
}

fn mark_square_primes(limit: u64, seg_words: usize, primes: &Bits) -> Bits {
    let mut bits = Bits::zeroed(limit + 1);
    bits.words_mut().par_chunks_mut(seg_words).enumerate().for_each(|(seg, chunk)| {
        let lo = (seg * seg_words) as u64 * 64;
        let hi = (lo + chunk.len() as u64 * 64 - 1).min(limit);
        let mut a = 2u64;
        while 2 * a * a <= hi {
            let sq = a * a;
            let pmin = lo.div_ceil(sq).max(2);
            let pmax = hi / sq;
            if pmin <= pmax {
                for p in primes.ones_in(pmin, pmax) {
                    let i = p * sq - lo;
                    chunk[(i >> 6) as usize] |= 1u64 << (i & 63);
                }
            }
            a += 1;
        }
    });
    bits
}

/// Largest `s` with `s^2 | n`.
///
/// Trial division strips every prime factor up to the cube root of what
/// remains; the leftover then has at most two prime factors, so it contributes
/// to the square part only if it is itself a perfect square.
pub fn largest_square_divisor(n: u64) -> Result<u64> {
    if n == 0 {
        return Err(Error::invalid("largest square divisor of 0 is undefined"));
    }
    let mut m = n;
    let mut s = 1u64;
    let mut d = 2u64;
    while d * d * d <= m {
        if m.is_multiple_of(d) {
            let mut e = 0u32;
            while m.is_multiple_of(d) {
                m /= d;
                e += 1;
            }
            s *= d.pow(e / 2);
        }
        d += if d == 2 { 1 } else { 2 };
    }
    let r = m.sqrt();
    if r > 1 && r * r == m {
        s *= r;
    }
    Ok(s)
}

/// Standalone SP test for `1 <= n <= 10^12`.
pub fn is_sp(n: u64) -> Result<Option<SpDecomposition>> {
    if n == 0 {
        return Err(Error::invalid("0 has no square-prime decomposition"));
    }
    if n > STANDALONE_LIMIT {
        return Err(Error::OutOfRange { value: n, limit: STANDALONE_LIMIT });
    }
    let s = largest_square_divisor(n)?;
    let p = n / (s * s);
    Ok((s >= 2 && is_prime_u64(p)).then_some(SpDecomposition { n, p, a: s }))
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for all `u64`.
pub fn is_prime_u64(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut r = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        r += 1;
    }
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_square_divisor(n: u64) -> u64 {
        (1..=n).take_while(|s| s * s <= n).filter(|s| n.is_multiple_of(s * s)).max().unwrap()
    }

    fn trial_prime(n: u64) -> bool {
        n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
    }

    #[test]
    fn square_divisor_examples() {
        assert_eq!(largest_square_divisor(1).unwrap(), 1);
        assert_eq!(brute_square_divisor(72), 6);
        assert_eq!(largest_square_divisor(72).unwrap(), 6);
        assert_eq!(brute_square_divisor(32), 4);
        assert_eq!(largest_square_divisor(32).unwrap(), 4);
        assert!(matches!(largest_square_divisor(0), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn square_divisor_matches_brute_force() {
        for n in 1..5000 {
            assert_eq!(largest_square_divisor(n).unwrap(), brute_square_divisor(n), "n={n}");
        }
        // squares of primes above the cube root
        for &q in &[1_000_003u64, 999_983] {
            assert_eq!(largest_square_divisor(q * q).unwrap(), q);
            assert_eq!(largest_square_divisor(7 * q * q).unwrap(), q);
        }
    }

    #[test]
    fn is_sp_examples() {
        assert_eq!(is_sp(27).unwrap(), Some(SpDecomposition { n: 27, p: 3, a: 3 }));
        assert_eq!(is_sp(28).unwrap(), Some(SpDecomposition { n: 28, p: 7, a: 2 }));
        assert_eq!(is_sp(7).unwrap(), None);
        assert_eq!(is_sp(4).unwrap(), None);
        assert_eq!(is_sp(637).unwrap(), Some(SpDecomposition { n: 637, p: 13, a: 7 }));
        assert!(matches!(is_sp(0), Err(Error::InvalidArgument(_))));
        assert!(matches!(is_sp(STANDALONE_LIMIT + 1), Err(Error::OutOfRange { .. })));
        let big = 999_983u64 * 1000 * 1000;
        assert_eq!(is_sp(big).unwrap(), Some(SpDecomposition { n: big, p: 999_983, a: 1000 }));
    }

    #[test]
    fn miller_rabin_matches_trial_division() {
        for n in 0..20_000 {
            assert_eq!(is_prime_u64(n), trial_prime(n), "n={n}");
        }
        assert!(is_prime_u64(1_000_000_007));
        assert!(!is_prime_u64(3_215_031_751)); // strong pseudoprime to 2, 3, 5, 7
        assert!(is_prime_u64(18_446_744_073_709_551_557));
    }

    #[test]
    fn uniqueness_against_pair_search() {
        const N: u64 = 100_000;
        let mut witnesses = vec![0u32; N as usize + 1];
        for p in (2..=N / 4).filter(|&p| trial_prime(p)) {
            let mut a = 2;
            while p * a * a <= N {
                witnesses[(p * a * a) as usize] += 1;
                a += 1;
            }
        }
        for n in 1..=N {
            let count = witnesses[n as usize];
            assert!(count <= 1, "{n} has {count} decompositions");
            assert_eq!(is_sp(n).unwrap().is_some(), count == 1, "n={n}");
        }
    }

    #[test]
    fn build_small_tables() {
        let t = build_table(30, 16).unwrap();
        assert_eq!(t.sp_values().collect::<Vec<_>>(), vec![8, 12, 18, 20, 27, 28]);
        let t = build_table(2, 2).unwrap();
        assert_eq!(t.sp_values().count(), 0);
        assert!(t.is_prime(2).unwrap());
        assert!(matches!(build_table(1, 16), Err(Error::InvalidArgument(_))));
        assert!(matches!(build_table(100, 1), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn memory_cap_is_enforced() {
        let cfg = TableConfig { segment_size: 1 << 12, memory_cap: Some(1000) };
        match SpTable::build(1_000_000, &cfg) {
            Err(Error::ResourceLimit { cap, .. }) => assert_eq!(cap, 1000),
            other => panic!("expected resource limit, got {other:?}"),
        }
    }

    #[test]
    fn segment_size_does_not_change_table() {
        let reference = build_table(200_000, DEFAULT_SEGMENT_SIZE).unwrap();
        for seg in [2, 63, 64, 100, 4096, 65_537] {
            assert_eq!(build_table(200_000, seg).unwrap(), reference, "segment {seg}");
        }
    }

    #[test]
    fn prime_counts() {
        let t = build_table(1000, 64).unwrap();
        assert_eq!(t.prime_count(1).unwrap(), 0);
        assert_eq!(t.prime_count(2).unwrap(), 1);
        assert_eq!(t.prime_count(100).unwrap(), (2..=100).filter(|&n| trial_prime(n)).count() as u64);
        assert_eq!(t.prime_count(100).unwrap(), 25);
        assert!(matches!(t.prime_count(1001), Err(Error::OutOfRange { .. })));
        for n in 0..=1000 {
            assert_eq!(t.is_prime(n).unwrap(), trial_prime(n));
        }
    }

    #[test]
    fn sp_list_examples() {
        let t = build_table(1000, 4096).unwrap();
        // 92 = 23 * 2^2 also lies in [90, 100]
        assert_eq!(
            t.sp_list(90, 100).unwrap(),
            vec![
                SpDecomposition { n: 92, p: 23, a: 2 },
                SpDecomposition { n: 98, p: 2, a: 7 },
                SpDecomposition { n: 99, p: 11, a: 3 }
            ]
        );
        assert!(t.sp_list(9, 11).unwrap().is_empty());
        let ns: Vec<u64> = t.sp_list(500, 512).unwrap().iter().map(|d| d.n).collect();
        assert_eq!(ns, vec![500, 507, 508, 512]);
        assert!(matches!(t.sp_list(5, 1001), Err(Error::OutOfRange { .. })));
        assert!(matches!(t.sp_list(20, 10), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn decompose_matches_standalone() {
        let t = build_table(50_000, 1 << 10).unwrap();
        for n in 1..=50_000 {
            assert_eq!(t.decompose(n).unwrap(), is_sp(n).unwrap(), "n={n}");
        }
    }

    #[test]
    fn dump_round_trip() {
        let t = build_table(12_345, 256).unwrap();
        let mut buf = Vec::new();
        t.write_to(&mut buf).unwrap();
        assert_eq!(&buf[..4], b"SPT1");
        assert_eq!(u64::from_le_bytes(buf[4..12].try_into().unwrap()), 12_345);
        assert_eq!(buf.len(), 12 + 2 * (12_346usize.div_ceil(8)));
        let back = SpTable::read_from(buf.as_slice()).unwrap();
        assert_eq!(back, t);
        let mut again = Vec::new();
        back.write_to(&mut again).unwrap();
        assert_eq!(again, buf);

        assert!(matches!(SpTable::read_from(&buf[..buf.len() - 1]), Err(Error::Format(_))));
        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(matches!(SpTable::read_from(bad.as_slice()), Err(Error::Format(_))));
    }
}

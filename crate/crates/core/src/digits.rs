//! Last-digit statistics of SP numbers and the Hurwitz zeta constants that
//! predict them.

use crate::density::ZETA2_MINUS_ONE;
use crate::error::{Error, Result};
use crate::sieve::SpTable;

/// Residues coprime to 10.
pub const COPRIME_DIGITS: [u8; 4] = [1, 3, 7, 9];

/// Terms summed directly before the Euler-Maclaurin tail.
const DIRECT_TERMS: u32 = 1000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HurwitzValue {
    pub c: f64,
    pub value: f64,
    pub abs_error_bound: f64,
}

/// ζ(2, c) = Σ_{k≥0} 1/(k+c)² for `0 < c <= 2`.
///
/// The first terms are summed directly (compensated, smallest first) and the
/// rest is replaced by the Euler-Maclaurin tail
/// `1/N + 1/(2N²) + 1/(6N³)` with `N = K + c`. Since `1/x²` has derivatives of
/// alternating sign, the truncation error is below the next tail term
/// `1/(30N⁵)`. The reported bound adds three ulps of the result for rounding,
/// so it stays under 10⁻¹² only while ζ(2, c) is below roughly 1500, i.e.
/// for `c` above about 0.026.
pub fn hurwitz_zeta2(c: f64) -> Result<HurwitzValue> {
    if !(c > 0.0 && c <= 2.0) {
        return Err(Error::invalid(format!("Hurwitz parameter must lie in (0, 2], got {c}")));
    }
    let n = f64::from(DIRECT_TERMS) + c;
    let tail = 1.0 / n + 1.0 / (2.0 * n * n) + 1.0 / (6.0 * n * n * n);
    let mut sum = tail;
    let mut comp = 0.0;
    for k in (0..DIRECT_TERMS).rev() {
        let x = f64::from(k) + c;
        let term = 1.0 / (x * x);
        // Neumaier compensation
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
    }
    let value = sum + comp;
    let truncation = 1.0 / (30.0 * n.powi(5));
    Ok(HurwitzValue { c, value, abs_error_bound: truncation + 3.0 * f64::EPSILON * value })
}

/// Parses `"p/q"` or a decimal.
pub fn parse_rational(text: &str) -> Result<f64> {
    let bad = || Error::invalid(format!("cannot parse {text:?} as a rational"));
    let v = match text.split_once('/') {
        Some((p, q)) => {
            let p: f64 = p.trim().parse().map_err(|_| bad())?;
            let q: f64 = q.trim().parse().map_err(|_| bad())?;
            if q == 0.0 {
                return Err(bad());
            }
            p / q
        }
        None => text.trim().parse().map_err(|_| bad())?,
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(bad())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstantVariant {
    /// The printed formula, subtracting one per zeta term.
    Literal,
    /// Exact index bookkeeping over admissible `a >= 2`.
    Corrected,
}

fn zeta_tenths(r: u8) -> f64 {
    hurwitz_zeta2(f64::from(r) / 10.0).expect("r/10 lies in (0, 1)").value
}

/// Last-digit density coefficient: count of SP `<= n` ending in a digit
/// coprime to 10 is about `constant · n / ln n`.
pub fn theorem4_constant(variant: ConstantVariant) -> f64 {
    match variant {
        ConstantVariant::Literal => {
            let s: f64 = COPRIME_DIGITS.iter().map(|&r| zeta_tenths(r)).sum();
            (s - 4.0) / 400.0
        }
        ConstantVariant::Corrected => corrected_constant_for_digit(1),
    }
}

/// Coefficient for SP numbers ending in `digit` (coprime to 10), built from
/// the residue classes that can produce it.
///
/// `p·a² ≡ digit (mod 10)` needs `p` and `a` coprime to 10. Each of the four
/// prime classes receives a quarter of the primes. For each class `q` and each
/// residue `r` of `a` with `q·r² ≡ digit`, `Σ_{a ≡ r} 1/a² = ζ(2, r/10)/100`,
/// less the excluded `a = 1` when `r = 1`.
pub fn corrected_constant_for_digit(digit: u8) -> f64 {
    assert!(COPRIME_DIGITS.contains(&digit), "digit {digit} is not coprime to 10");
    let mut total = 0.0;
    for &q in &COPRIME_DIGITS {
        for &r in &COPRIME_DIGITS {
            if (u32::from(q) * u32::from(r) * u32::from(r)) % 10 == u32::from(digit) {
                let mut s = zeta_tenths(r) / 100.0;
                if r == 1 {
                    s -= 1.0;
                }
                total += s / 4.0;
            }
        }
    }
    total
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DigitDistribution {
    pub limit: u64,
    pub counts: [u64; 10],
    pub total: u64,
}

pub fn digit_counts(table: &SpTable) -> DigitDistribution {
    let mut counts = [0u64; 10];
    for n in table.sp_values() {
        counts[(n % 10) as usize] += 1;
    }
    DigitDistribution { limit: table.limit(), counts, total: counts.iter().sum() }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DigitRow {
    pub digit: u8,
    pub count: u64,
    pub share: f64,
    pub predicted_share: Option<f64>,
    pub constant_literal: Option<f64>,
    pub constant_corrected: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DigitReport {
    pub distribution: DigitDistribution,
    pub rows: Vec<DigitRow>,
    /// Empirical share of SP values ending in 1, 3, 7 or 9.
    pub aggregate_share: f64,
    /// `4 · corrected / (ζ(2) − 1)`.
    pub predicted_aggregate_share: f64,
    /// `4 · literal / (ζ(2) − 1)`; above 1, so not a possible share.
    pub literal_aggregate_share: f64,
}

pub fn digit_report(table: &SpTable) -> DigitReport {
    let distribution = digit_counts(table);
    let literal = theorem4_constant(ConstantVariant::Literal);
    let share = |c: u64| {
        if distribution.total == 0 {
            0.0
        } else {
            c as f64 / distribution.total as f64
        }
    };
    let rows: Vec<DigitRow> = (0u8..10)
        .map(|digit| {
            let count = distribution.counts[usize::from(digit)];
            let coprime = COPRIME_DIGITS.contains(&digit);
            let corrected = coprime.then(|| corrected_constant_for_digit(digit));
            DigitRow {
                digit,
                count,
                share: share(count),
                predicted_share: corrected.map(|c| c / ZETA2_MINUS_ONE),
                constant_literal: coprime.then_some(literal),
                constant_corrected: corrected,
            }
        })
        .collect();
    let coprime_total: u64 = COPRIME_DIGITS.iter().map(|&d| distribution.counts[usize::from(d)]).sum();
    let corrected = theorem4_constant(ConstantVariant::Corrected);
    DigitReport {
        distribution,
        rows,
        aggregate_share: share(coprime_total),
        predicted_aggregate_share: 4.0 * corrected / ZETA2_MINUS_ONE,
        literal_aggregate_share: 4.0 * literal / ZETA2_MINUS_ONE,
    }
}

//! SP counts by enumeration, by the prime-counting sum, and by the
//! `(ζ(2) - 1) n / ln n` asymptotic.

use std::f64::consts::PI;

use num_integer::Roots;

use crate::error::{Error, Result};
use crate::sieve::SpTable;

/// ζ(2) − 1 = π²/6 − 1, the leading density coefficient of SP numbers.
pub const ZETA2_MINUS_ONE: f64 = PI * PI / 6.0 - 1.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityRecord {
    pub n: u64,
    pub sp_exact: u64,
    pub pi_n: u64,
    pub asymptotic: f64,
    pub ratio: f64,
}

/// SP values `<= n`, read from the table's cumulative counts.
pub fn sp_count(table: &SpTable, n: u64) -> Result<u64> {
    table.sp_count(n)
}

/// `Σ_{a=2}^{⌊√(n/2)⌋} π(⌊n/a²⌋)`: every SP `p·a² <= n` counted once per `a`.
pub fn sp_count_via_pi(table: &SpTable, n: u64) -> Result<u64> {
    if n > table.limit() {
        return Err(Error::OutOfRange { value: n, limit: table.limit() });
    }
    let top = (n / 2).sqrt();
    (2..=top).map(|a| table.prime_count(n / (a * a))).sum()
}

/// `(ζ(2) − 1) · n / ln n`.
pub fn sp_asymptotic(n: u64) -> Result<f64> {
    if n < 3 {
        return Err(Error::invalid(format!("asymptotic needs n >= 3, got {n}")));
    }
    let x = n as f64;
    Ok(ZETA2_MINUS_ONE * x / x.ln())
}

pub fn density_table(table: &SpTable, checkpoints: &[u64]) -> Result<Vec<DensityRecord>> {
    if let Some(w) = checkpoints.windows(2).find(|w| w[0] >= w[1]) {
        return Err(Error::invalid(format!(
            "checkpoints must be strictly ascending ({} then {})",
            w[0], w[1]
        )));
    }
    checkpoints
        .iter()
        .map(|&n| {
            if n > table.limit() {
                return Err(Error::OutOfRange { value: n, limit: table.limit() });
            }
            let sp_exact = table.sp_count(n)?;
            let pi_n = table.prime_count(n)?;
            let asymptotic =
                sp_asymptotic(n).map_err(|_| Error::invalid(format!("checkpoint {n} is below 3")))?;
            Ok(DensityRecord { n, sp_exact, pi_n, asymptotic, ratio: sp_exact as f64 / asymptotic })
        })
        .collect()
}

/// Every `n` in `[2, limit]` with `SP(n) >= π(n)`, found by walking all
/// prime and SP events in order.
pub fn corollary_violations(table: &SpTable) -> Vec<u64> {
    let mut out = Vec::new();
    let (mut sp, mut pi) = (0u64, 0u64);
    for n in 2..=table.limit() {
        sp += u64::from(table.sp_bit(n));
        pi += u64::from(table.prime_bit(n));
        if sp >= pi {
            out.push(n);
        }
    }
    out
}

/// Powers of ten from 1000 up to `limit`, with `limit` appended when it is not one.
pub fn decade_checkpoints(limit: u64) -> Vec<u64> {
    let mut out: Vec<u64> =
        std::iter::successors(Some(1000u64), |&c| c.checked_mul(10)).take_while(|&c| c <= limit).collect();
    if out.last() != Some(&limit) && limit >= 3 {
        out.push(limit);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sieve::build_table;

    #[test]
    fn zeta_constant() {
        assert!((ZETA2_MINUS_ONE - 0.644_934_066_848_226_4).abs() < 1e-15);
    }

    #[test]
    fn counts_against_golden_prefix() {
        let t = build_table(1000, 128).unwrap();
        assert_eq!(sp_count(&t, 8).unwrap(), 1);
        assert_eq!(sp_count(&t, 100).unwrap(), 21);
        assert_eq!(sp_count(&t, 549).unwrap(), 100);
        assert_eq!(sp_count_via_pi(&t, 8).unwrap(), 1);
        assert_eq!(sp_count_via_pi(&t, 100).unwrap(), 21);
        assert!(matches!(sp_count_via_pi(&t, 1001), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn identity_holds_densely() {
        let t = build_table(10_000, 1 << 12).unwrap();
        for n in 1..=10_000 {
            assert_eq!(sp_count_via_pi(&t, n).unwrap(), sp_count(&t, n).unwrap(), "n={n}");
        }
    }

    #[test]
    fn asymptotic_values() {
        let at20 = sp_asymptotic(20).unwrap();
        assert!((at20 - 0.644_934_066_8 * 20.0 / 20f64.ln()).abs() < 1e-9);
        assert!((at20 - 4.306).abs() < 1e-3);
        assert!((sp_asymptotic(1_000_000).unwrap() - 46_682.0).abs() < 1.0);
        assert!(matches!(sp_asymptotic(2), Err(Error::InvalidArgument(_))));
        for n in [3u64, 10, 1000, 123_456_789] {
            assert!(sp_asymptotic(10 * n).unwrap() / sp_asymptotic(n).unwrap() < 10.0);
        }
    }

    #[test]
    fn density_table_shape() {
        let t = build_table(1_000_000, 1 << 16).unwrap();
        assert!(density_table(&t, &[]).unwrap().is_empty());
        let rows = density_table(&t, &[1000, 10_000, 100_000, 1_000_000]).unwrap();
        assert_eq!(rows.len(), 4);
        assert!(rows.windows(2).all(|w| w[1].ratio < w[0].ratio));
        assert_eq!(rows[3].sp_exact, sp_count_via_pi(&t, 1_000_000).unwrap());
        match density_table(&t, &[1000, 2_000_000]) {
            Err(Error::OutOfRange { value, .. }) => assert_eq!(value, 2_000_000),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn checkpoints() {
        assert_eq!(decade_checkpoints(100_000), vec![1000, 10_000, 100_000]);
        assert_eq!(decade_checkpoints(5000), vec![1000, 5000]);
        assert_eq!(decade_checkpoints(500), vec![500]);
    }
}

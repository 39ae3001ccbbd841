//! Square-prime (SP) numbers `n = p * a^2`, `p` prime, `a >= 2`.
//!
//! * [`sieve`]: segmented prime/SP tables, membership and decomposition.
//! * [`density`]: SP(n) by enumeration, by `Σ π(n/a²)`, and asymptotically.
//! * [`conjectures`]: range checks for two-SP sums, square intervals and gaps.
//! * [`pell`]: infinitely many SP pairs with a given gap via Pell equations.
//! * [`digits`]: last-digit counts and Hurwitz zeta constants.
//! * [`cli`]: the `sqprime` command line.
//!
//! Counts are inclusive throughout: SP(n) is the number of SP values `<= n`.

mod bits;
pub mod cli;
pub mod conjectures;
pub mod density;
pub mod digits;
pub mod error;
pub mod pell;
pub mod report;
pub mod sieve;

pub use error::{Error, Result};
pub use sieve::{build_table, is_sp, largest_square_divisor, SpDecomposition, SpTable, TableConfig};

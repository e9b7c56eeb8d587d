//! Shared inputs for the benchmarks.

use rclb_core::quadforms::{fundamental_discriminants, QuadDisc, Sign};

/// The first `count` negative fundamental discriminants with `|d| >= from`.
pub fn discriminants_from(from: u64, count: usize) -> Vec<QuadDisc> {
    fundamental_discriminants(from + 50 * count as u64, Sign::Negative)
        .filter(|d| d.value().unsigned_abs() >= from)
        .take(count)
        .collect()
}

//! Benchmark fixtures.

use goldtri::subst::{default_seed, supertile};
use goldtri::{AlgebraicNum, Patch};

/// Deterministic numbers with coefficients spread over ±1000.
pub fn numbers(n: usize) -> Vec<AlgebraicNum> {
    (0..n as i64)
        .map(|i| {
            let c = |k: i64| (i * 7919 + k * 104_729) % 2001 - 1000;
            AlgebraicNum::new(c(1), c(2), c(3), c(4))
        })
        .collect()
}

pub fn default_supertile(order: u32) -> Patch {
    supertile(order, &default_seed()).expect("bundled seed is admissible")
}

//! Exact counting of 0-queries.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::{Error, Result};

pub fn factorial(n: usize) -> BigUint {
    (2..=n as u64).fold(BigUint::one(), |acc, k| acc * k)
}

pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    // Each partial product is itself a binomial coefficient, so the division is exact.
    (0..k).fold(BigUint::one(), |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

/// Number of permutations of `1..=n` that avoid a fixed valid colouring on
/// `m` positions: `sum_{k=0}^{m} (-1)^k C(m,k) (n-k)!`.
///
/// The count does not depend on which positions or which injective colouring
/// are meant. `A(n, n)` is the `n`-th derangement number.
pub fn count_zero_queries_formula(n: usize, m: usize) -> Result<BigUint> {
    if m > n {
        return Err(Error::out_of_range("m", m, 0, n));
    }
    Ok(truncated_inclusion_exclusion(n, m, m))
}

/// Partial sum of the inclusion-exclusion series for `A(n, m)` through the
/// term `k = depth`. Alternately over- and under-estimates `A(n, m)`.
pub fn truncated_inclusion_exclusion_signed(n: usize, m: usize, depth: usize) -> BigInt {
    let mut total = BigInt::zero();
    for k in 0..=depth.min(m) {
        let term = BigInt::from(binomial(m, k) * factorial(n - k));
        if k % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    total
}

fn truncated_inclusion_exclusion(n: usize, m: usize, depth: usize) -> BigUint {
    truncated_inclusion_exclusion_signed(n, m, depth)
        .to_biguint()
        .expect("the full inclusion-exclusion sum counts a set")
}

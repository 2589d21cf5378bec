//! Finite-n forms of the counting inequalities behind the `O(n log n)` bound.
//!
//! Notation: a triple `(I, v, c)` has a valid colouring `v` and an arbitrary
//! colouring `c` on the position set `I`, with `c(i) != v(i)` everywhere.
//! `S_i` is the set of permutations that avoid `v` on `I` and agree with `c` at
//! `i`; a permutation discriminates `v` from `c` exactly when it lies in the
//! union of the `S_i`. `A(n, m)` is [`count_zero_queries_formula`].
//!
//! The asymptotic statements (the `o(1)` terms, the `|I| / 7n` probability)
//! only hold for `n` large enough. This module asserts the inequalities that
//! hold at every `n` and exposes the asymptotic quantities for reporting.

use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Pow, Zero};

use crate::counting::{count_zero_queries_formula, factorial, truncated_inclusion_exclusion_signed};
use crate::interval::Interval;
use crate::perm::{factorial_u64, for_each_in_rank_range, zero_query_unchecked, PartialColouring};
use crate::{Cutoffs, Error, Result};

/// A valid colouring `v` and a pointwise-different colouring `c` on the same
/// position set.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TripleInstance {
    v: PartialColouring,
    c: PartialColouring,
}

impl TripleInstance {
    pub fn new(v: PartialColouring, c: PartialColouring) -> Result<Self> {
        if v.n() != c.n() {
            return Err(Error::SizeMismatch {
                left: v.n(),
                right: c.n(),
            });
        }
        if !v.same_domain(&c) {
            return Err(Error::DomainMismatch);
        }
        if !v.is_valid() {
            return Err(Error::InvalidV);
        }
        if v.iter().zip(c.iter()).any(|((_, a), (_, b))| a == b) {
            return Err(Error::InvalidTriple("c agrees with v at some position"));
        }
        Ok(Self { v, c })
    }

    pub fn n(&self) -> usize {
        self.v.n()
    }

    /// `|I|`.
    pub fn len(&self) -> usize {
        self.v.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v.is_empty()
    }

    pub fn positions(&self) -> impl Iterator<Item = usize> + '_ {
        self.v.positions()
    }

    pub fn v(&self) -> &PartialColouring {
        &self.v
    }

    pub fn c(&self) -> &PartialColouring {
        &self.c
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PairSize {
    pub i: usize,
    pub j: usize,
    pub size: u64,
}

/// Exact sizes of the sets `S_i`, their pairwise intersections and their
/// union, all obtained by enumerating every permutation of `1..=n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetSizeReport {
    pub n: usize,
    pub m: usize,
    /// `I` in ascending order.
    pub positions: Vec<usize>,
    /// `|S_i|`, aligned with `positions`.
    pub per_position: Vec<u64>,
    /// `|S_i ∩ S_j|` for every `i < j`, in lexicographic pair order.
    pub pairwise: Vec<PairSize>,
    /// `|∪ S_i|`.
    pub union: u64,
    /// Number of 0-queries for `v`, counted during the same pass.
    pub zero_queries: u64,
    /// `Σ|S_i| − Σ_{i<j}|S_i ∩ S_j|`; may be negative.
    pub bonferroni_lower: i128,
}

impl SetSizeReport {
    pub fn bonferroni_holds(&self) -> bool {
        self.union as i128 >= self.bonferroni_lower
    }
}

pub fn enumerate_set_sizes(t: &TripleInstance, cutoffs: &Cutoffs) -> Result<SetSizeReport> {
    let n = t.n();
    cutoffs.check_exhaustive(n)?;
    let m = t.len();
    let v = t.v.raw();
    let c: Vec<(usize, u32)> = t.c.raw().iter().map(|&(p, col)| (p as usize - 1, col)).collect();

    let mut per_position = alloc::vec![0u64; m];
    let mut pair_counts = alloc::vec![0u64; m * m];
    let mut union = 0u64;
    let mut zero_queries = 0u64;
    let mut hits = Vec::with_capacity(m);
    for_each_in_rank_range(n, 0..factorial_u64(n), |_, sigma| {
        if !zero_query_unchecked(sigma, v) {
            return true;
        }
        zero_queries += 1;
        hits.clear();
        hits.extend(
            c.iter()
                .enumerate()
                .filter(|(_, &(p, col))| sigma[p] == col)
                .map(|(a, _)| a),
        );
        if !hits.is_empty() {
            union += 1;
        }
        for (x, &a) in hits.iter().enumerate() {
            per_position[a] += 1;
            for &b in &hits[x + 1..] {
                pair_counts[a * m + b] += 1;
            }
        }
        true
    });

    let positions: Vec<usize> = t.positions().collect();
    let mut pairwise = Vec::with_capacity(m * m.saturating_sub(1) / 2);
    for a in 0..m {
        for b in a + 1..m {
            pairwise.push(PairSize {
                i: positions[a],
                j: positions[b],
                size: pair_counts[a * m + b],
            });
        }
    }
    let singles: i128 = per_position.iter().map(|&s| s as i128).sum();
    let pairs: i128 = pairwise.iter().map(|p| p.size as i128).sum();
    Ok(SetSizeReport {
        n,
        m,
        positions,
        per_position,
        pairwise,
        union,
        zero_queries,
        bonferroni_lower: singles - pairs,
    })
}

/// `n!/3 <= A(n, m) <= n!`, checked as `n! <= 3 A(n, m)` in exact integers.
pub fn check_claim_a(n: usize, m: usize) -> Result<bool> {
    let a = count_zero_queries_formula(n, m)?;
    let f = factorial(n);
    Ok(f <= &a * 3u32 && a <= f)
}

/// Inclusion-exclusion for `A(n, m)` truncated after the `k = 3` term, a
/// lower bound for `A(n, m)` by the Bonferroni inequalities.
pub fn claim_a_third_order_lower(n: usize, m: usize) -> Result<BigInt> {
    if m > n {
        return Err(Error::out_of_range("m", m, 0, n));
    }
    Ok(truncated_inclusion_exclusion_signed(n, m, 3))
}

/// The third-order truncation regrouped as
/// `(1 - m/n) n! + m(m-1) / (6 n (n-1)) * (3 - (m-2)/(n-2)) * n!`.
///
/// Only defined for `n >= 3`; equals [`claim_a_third_order_lower`] there.
pub fn claim_a_grouped_form(n: usize, m: usize) -> Result<BigRational> {
    if n < 3 {
        return Err(Error::out_of_range("n", n, 3, usize::MAX >> 1));
    }
    if m > n {
        return Err(Error::out_of_range("m", m, 0, n));
    }
    let r = |a: i64, b: i64| BigRational::new(BigInt::from(a), BigInt::from(b));
    let (n_, m_) = (n as i64, m as i64);
    let nf = BigRational::from_integer(BigInt::from(factorial(n)));
    let first = (BigRational::one() - r(m_, n_)) * &nf;
    let bracket = r(3, 1) - r(m_ - 2, n_ - 2);
    let second = r(m_ * (m_ - 1), 6 * n_ * (n_ - 1)) * bracket * &nf;
    Ok(first + second)
}

/// Which of the finite set-size inequalities hold for one triple.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClaimSizesCheck {
    /// `n |S_i| >= A(n, m) − n (n−2)!` for every `i`.
    pub singles: bool,
    /// `(n−4)(n−5) |S_i ∩ S_j| <= A(n, m)` for every pair with `c(i) != c(j)`,
    /// and `S_i ∩ S_j` empty when `c(i) == c(j)`. `None` below `n = 6`.
    pub pairs: Option<bool>,
}

impl ClaimSizesCheck {
    pub fn all_hold(&self) -> bool {
        self.singles && self.pairs.unwrap_or(true)
    }
}

/// Evaluates the set-size inequalities against an enumerated report.
pub fn claim_sizes_detail(t: &TripleInstance, report: &SetSizeReport) -> Result<ClaimSizesCheck> {
    let n = t.n();
    if n < 2 {
        return Err(Error::out_of_range("n", n, 2, usize::MAX >> 1));
    }
    let a = BigInt::from(count_zero_queries_formula(n, t.len())?);
    let nb = BigInt::from(n);
    let slack = &nb * BigInt::from(factorial(n - 2));
    let singles = report
        .per_position
        .iter()
        .all(|&s| &nb * BigInt::from(s) >= &a - &slack);
    let pairs = (n >= 6).then(|| {
        let factor = BigInt::from((n - 4) * (n - 5));
        report.pairwise.iter().all(|pair| {
            let same = t.c.colour(pair.i) == t.c.colour(pair.j);
            if same {
                pair.size == 0
            } else {
                &factor * BigInt::from(pair.size) <= a
            }
        })
    });
    Ok(ClaimSizesCheck { singles, pairs })
}

/// Both set-size inequalities against exact enumeration. Needs `n >= 6` so the
/// `(n−4)(n−5)` factor is positive.
pub fn check_claim_sizes_finite(t: &TripleInstance, cutoffs: &Cutoffs) -> Result<bool> {
    if t.n() < 6 {
        return Err(Error::out_of_range("n", t.n(), 6, cutoffs.exhaustive));
    }
    let report = enumerate_set_sizes(t, cutoffs)?;
    Ok(claim_sizes_detail(t, &report)?.all_hold())
}

/// Only the single-set inequality, valid from `n = 2`.
pub fn check_claim_sizes_singles(t: &TripleInstance, cutoffs: &Cutoffs) -> Result<bool> {
    let report = enumerate_set_sizes(t, cutoffs)?;
    Ok(claim_sizes_detail(t, &report)?.singles)
}

/// Probability that a uniform permutation discriminates `v` from `c`.
pub fn discriminating_fraction(t: &TripleInstance, cutoffs: &Cutoffs) -> Result<BigRational> {
    let report = enumerate_set_sizes(t, cutoffs)?;
    Ok(BigRational::new(
        BigInt::from(report.union),
        BigInt::from(factorial(t.n())),
    ))
}

/// `|I| / 7n`, the large-n lower bound on the discriminating fraction.
/// Reported alongside [`discriminating_fraction`], never asserted.
pub fn discrimination_target(n: usize, m: usize) -> BigRational {
    BigRational::new(BigInt::from(m), BigInt::from(7 * n))
}

const START_BITS: u32 = 64;
const MAX_BITS: u32 = 1 << 14;

/// `⌈c · n · ln n⌉` for a positive rational `c`, exact.
pub fn scaled_query_count(n: usize, c: &BigRational) -> Result<u64> {
    if n < 2 {
        return Err(Error::out_of_range("n", n, 2, usize::MAX >> 1));
    }
    if *c <= BigRational::zero() {
        return Err(Error::InvalidArgument("query constant must be positive"));
    }
    let num = c.numer() * BigInt::from(n);
    let den = c.denom().clone();
    let mut bits = START_BITS;
    while bits <= MAX_BITS {
        let value = Interval::ln_int(n as u64, bits).mul_ratio(&num, &den);
        if let Some(ceil) = value.exact_ceil() {
            return u64::try_from(ceil).map_err(|_| Error::InvalidArgument("query count overflows u64"));
        }
        bits *= 2;
    }
    // ln n is irrational for n >= 2, so c n ln n is never an integer.
    unreachable!("enclosure of c n ln n did not separate from an integer")
}

/// `⌈28 · n · ln n⌉`, the size of a query set that works for every codeword
/// with positive probability.
pub fn required_query_count(n: usize) -> Result<u64> {
    scaled_query_count(n, &BigRational::from_integer(BigInt::from(28)))
}

/// `Σ_{k=1}^{n} n^{3k} · n^{−4k} = Σ_{k=1}^{n} n^{−k}`, the union-bound
/// estimate for the probability that a random query set of the required size
/// misses some triple.
pub fn failure_probability_bound(n: usize) -> Result<BigRational> {
    if n < 2 {
        return Err(Error::out_of_range("n", n, 2, usize::MAX >> 1));
    }
    let base = BigUint::from(n);
    let den: BigUint = Pow::pow(&base, n);
    let mut num = BigUint::zero();
    let mut power = BigUint::one();
    for _ in 0..n {
        num += &power;
        power *= &base;
    }
    let p = BigRational::new(BigInt::from(num), BigInt::from(den));
    assert!(p < BigRational::one(), "union bound must be below one for n >= 2");
    Ok(p)
}

/// Per-triple bound used in the union bound, with its justification checked.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PerTripleBound {
    pub n: usize,
    pub k: usize,
    pub query_count: u64,
    /// `n^{−4k}`.
    pub bound: BigRational,
    /// Whether `(1 − k/7n)^{query_count} <= n^{−4k}` was proved with
    /// outward-rounded arithmetic.
    pub verified: bool,
}

pub fn per_triple_failure_bound(n: usize, k: usize) -> Result<PerTripleBound> {
    if n < 2 {
        return Err(Error::out_of_range("n", n, 2, usize::MAX >> 1));
    }
    if k < 1 || k > n {
        return Err(Error::out_of_range("k", k, 1, n));
    }
    let query_count = required_query_count(n)?;
    let bound = BigRational::new(
        BigInt::one(),
        Pow::pow(&BigInt::from(n), 4 * k),
    );
    // Compare logarithms: Q ln(1 − k/7n) <= −4k ln n.
    let q = BigInt::from(query_count);
    let ratio_num = BigInt::from(7 * n - k);
    let ratio_den = BigInt::from(7 * n);
    let mut bits = START_BITS;
    let mut verified = false;
    while bits <= MAX_BITS {
        let lhs = Interval::ln_ratio(&ratio_num, &ratio_den, bits).mul_int(&q);
        let rhs = Interval::ln_int(n as u64, bits).mul_int(&BigInt::from(-4 * k as i64));
        if lhs.certainly_le(&rhs) {
            verified = true;
            break;
        }
        if lhs.certain_cmp(&rhs) == Some(core::cmp::Ordering::Greater) {
            break;
        }
        bits *= 2;
    }
    Ok(PerTripleBound {
        n,
        k,
        query_count,
        bound,
        verified,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn col(n: usize, pairs: &[(usize, u32)]) -> PartialColouring {
        PartialColouring::new(n, pairs.iter().copied()).unwrap()
    }

    fn triple(n: usize, v: &[(usize, u32)], c: &[(usize, u32)]) -> TripleInstance {
        TripleInstance::new(col(n, v), col(n, c)).unwrap()
    }

    fn ratio(a: i64, b: i64) -> BigRational {
        BigRational::new(BigInt::from(a), BigInt::from(b))
    }

    #[test]
    fn triple_validation() {
        assert_eq!(
            TripleInstance::new(col(3, &[(1, 1)]), col(3, &[(1, 1)])),
            Err(Error::InvalidTriple("c agrees with v at some position"))
        );
        assert_eq!(
            TripleInstance::new(col(3, &[(1, 1), (2, 1)]), col(3, &[(1, 2), (2, 2)])),
            Err(Error::InvalidV)
        );
        assert_eq!(
            TripleInstance::new(col(3, &[(1, 1)]), col(3, &[(2, 2)])),
            Err(Error::DomainMismatch)
        );
        // c need not be injective
        assert!(TripleInstance::new(col(3, &[(1, 1), (2, 2)]), col(3, &[(1, 3), (2, 3)])).is_ok());
    }

    #[test]
    fn claim_a_examples() {
        assert!(check_claim_a(3, 3).unwrap());
        assert_eq!(count_zero_queries_formula(3, 3).unwrap() * 3u32, factorial(3));
        assert!(check_claim_a(4, 4).unwrap());
        for n in 1..12 {
            assert!(check_claim_a(n, 0).unwrap());
        }
        assert!(check_claim_a(3, 4).is_err());
    }

    #[test]
    fn third_order_truncation_bounds_a_from_below() {
        for n in 1..=12 {
            for m in 0..=n {
                let a = BigInt::from(count_zero_queries_formula(n, m).unwrap());
                assert!(claim_a_third_order_lower(n, m).unwrap() <= a, "n={n} m={m}");
            }
        }
    }

    #[test]
    fn grouped_form_equals_truncation() {
        for n in 3..=12 {
            for m in 0..=n {
                let grouped = claim_a_grouped_form(n, m).unwrap();
                let trunc = BigRational::from_integer(claim_a_third_order_lower(n, m).unwrap());
                assert_eq!(grouped, trunc, "n={n} m={m}");
            }
        }
    }

    #[test]
    fn set_sizes_single_position() {
        let t = triple(3, &[(1, 1)], &[(1, 2)]);
        let r = enumerate_set_sizes(&t, &Cutoffs::default()).unwrap();
        assert_eq!(r.per_position, [2]);
        assert_eq!(r.union, 2);
        assert_eq!(r.bonferroni_lower, 2);
        assert!(r.pairwise.is_empty());
        assert_eq!(r.zero_queries, 4);
    }

    #[test]
    fn set_sizes_two_positions_exact() {
        let t = triple(4, &[(1, 1), (2, 2)], &[(1, 2), (2, 1)]);
        let r = enumerate_set_sizes(&t, &Cutoffs::default()).unwrap();
        assert_eq!(r.pairwise.len(), 1);
        let pair = r.pairwise[0];
        assert_eq!((pair.i, pair.j), (1, 2));
        assert_eq!(
            r.union as i128,
            r.per_position[0] as i128 + r.per_position[1] as i128 - pair.size as i128
        );
        assert_eq!(r.bonferroni_lower, r.union as i128);
        // S_1 ∩ S_2 = {σ : σ(1)=2, σ(2)=1} has 2 elements at n=4.
        assert_eq!(pair.size, 2);
    }

    #[test]
    fn same_colour_pair_is_disjoint() {
        let t = triple(6, &[(1, 1), (2, 2)], &[(1, 3), (2, 3)]);
        let r = enumerate_set_sizes(&t, &Cutoffs::default()).unwrap();
        assert_eq!(r.pairwise[0].size, 0);
        assert!(check_claim_sizes_finite(&t, &Cutoffs::default()).unwrap());
    }

    #[test]
    fn claim_sizes_examples() {
        let cut = Cutoffs::default();
        let t = triple(6, &[(1, 1), (2, 2)], &[(1, 2), (2, 1)]);
        assert!(check_claim_sizes_finite(&t, &cut).unwrap());
        let t = triple(7, &[(1, 1), (2, 2), (3, 3)], &[(1, 2), (2, 3), (3, 4)]);
        assert!(check_claim_sizes_finite(&t, &cut).unwrap());
        let small = triple(5, &[(1, 1)], &[(1, 2)]);
        assert!(matches!(
            check_claim_sizes_finite(&small, &cut),
            Err(Error::OutOfRange { .. })
        ));
        assert!(check_claim_sizes_singles(&small, &cut).unwrap());
    }

    #[test]
    fn fraction_examples() {
        let cut = Cutoffs::default();
        let t = triple(3, &[(1, 1)], &[(1, 2)]);
        assert_eq!(discriminating_fraction(&t, &cut).unwrap(), ratio(1, 3));
        let empty = TripleInstance::new(PartialColouring::empty(4), PartialColouring::empty(4)).unwrap();
        assert_eq!(discriminating_fraction(&empty, &cut).unwrap(), BigRational::zero());
        let big = triple(9, &[(1, 1)], &[(1, 2)]);
        assert_eq!(
            discriminating_fraction(&big, &cut),
            Err(Error::CutoffExceeded { n: 9, limit: 8 })
        );
    }

    #[test]
    fn query_counts() {
        assert_eq!(required_query_count(2).unwrap(), 39);
        assert_eq!(required_query_count(4).unwrap(), 156);
        assert_eq!(required_query_count(10).unwrap(), 645);
        assert_eq!(required_query_count(16).unwrap(), 1243);
        assert_eq!(required_query_count(100).unwrap(), 12895);
        assert!(required_query_count(1).is_err());
        assert_eq!(scaled_query_count(8, &ratio(1, 1)).unwrap(), 17);
        assert!(scaled_query_count(8, &ratio(0, 1)).is_err());
    }

    #[test]
    fn failure_probability_examples() {
        assert_eq!(failure_probability_bound(2).unwrap(), ratio(3, 4));
        assert_eq!(failure_probability_bound(3).unwrap(), ratio(13, 27));
        assert!(failure_probability_bound(1).is_err());
    }

    #[test]
    fn per_triple_examples() {
        let b = per_triple_failure_bound(2, 1).unwrap();
        assert_eq!(b.bound, ratio(1, 16));
        assert!(b.verified);
        let b = per_triple_failure_bound(10, 2).unwrap();
        assert_eq!(b.bound, ratio(1, 100_000_000));
        assert!(b.verified);
        let b = per_triple_failure_bound(5, 1).unwrap();
        assert_eq!(b.query_count, 226);
        assert!(b.verified);
        assert!(per_triple_failure_bound(5, 6).is_err());
        assert!(per_triple_failure_bound(5, 0).is_err());
    }
}

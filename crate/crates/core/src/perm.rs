//! Permutations, partial colourings and the predicates built on them.

use alloc::vec::Vec;
use core::fmt;

use crate::{Cutoffs, Error, Result};

/// A bijection from positions `1..=n` to colours `1..=n`.
///
/// Used for codewords and queries alike. `as_slice()[p - 1]` is the colour at
/// position `p`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Permutation {
    values: Vec<u32>,
}

impl Permutation {
    /// Builds a permutation from its colour sequence; `n` is the length.
    pub fn new(values: Vec<u32>) -> Result<Self> {
        let n = values.len();
        if n == 0 {
            return Err(Error::NotABijection {
                n,
                reason: "empty sequence",
            });
        }
        let mut seen = alloc::vec![false; n];
        for &value in &values {
            if value == 0 || value as usize > n {
                return Err(Error::NotABijection {
                    n,
                    reason: "colour outside 1..=n",
                });
            }
            let slot = &mut seen[value as usize - 1];
            if *slot {
                return Err(Error::NotABijection {
                    n,
                    reason: "repeated colour",
                });
            }
            *slot = true;
        }
        Ok(Self { values })
    }

    pub fn identity(n: usize) -> Self {
        assert!(n >= 1, "permutations need n >= 1");
        Self {
            values: (1..=n as u32).collect(),
        }
    }

    /// Unchecked constructor for sequences produced by this crate.
    pub(crate) fn from_vec_unchecked(values: Vec<u32>) -> Self {
        debug_assert!(Self::new(values.clone()).is_ok());
        Self { values }
    }

    /// The permutation of rank `rank` in lexicographic order (rank 0 is the
    /// identity). Returns `None` when `rank >= n!` or `n` is out of range.
    pub fn from_lex_rank(n: usize, mut rank: u64) -> Option<Self> {
        if n == 0 || n > Cutoffs::HARD_LIMIT || rank >= factorial_u64(n) {
            return None;
        }
        let mut pool: Vec<u32> = (1..=n as u32).collect();
        let mut values = Vec::with_capacity(n);
        for slot in (0..n).rev() {
            let block = factorial_u64(slot);
            let idx = (rank / block) as usize;
            rank %= block;
            values.push(pool.remove(idx));
        }
        Some(Self { values })
    }

    /// Position of this permutation in lexicographic order.
    pub fn lex_rank(&self) -> Option<u64> {
        let n = self.n();
        if n > Cutoffs::HARD_LIMIT {
            return None;
        }
        let mut rank = 0u64;
        for (i, &v) in self.values.iter().enumerate() {
            let smaller_later = self.values[i + 1..].iter().filter(|&&w| w < v).count() as u64;
            rank += smaller_later * factorial_u64(n - 1 - i);
        }
        Some(rank)
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    /// Colour at the 1-indexed `position`.
    ///
    /// Panics if `position` is not in `1..=n`.
    pub fn colour(&self, position: usize) -> u32 {
        self.values[position - 1]
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.values
    }

    pub fn into_vec(self) -> Vec<u32> {
        self.values
    }

    /// `(position, colour)` pairs, both 1-indexed.
    pub fn iter(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.values.iter().enumerate().map(|(i, &c)| (i + 1, c))
    }

    /// Restriction of this permutation to `positions`, which is always a
    /// valid colouring.
    pub fn restrict(&self, positions: impl IntoIterator<Item = usize>) -> Result<PartialColouring> {
        let n = self.n();
        let mut pairs = Vec::new();
        for p in positions {
            if p == 0 || p > n {
                return Err(Error::out_of_range("position", p, 1, n));
            }
            pairs.push((p, self.values[p - 1]));
        }
        PartialColouring::new(n, pairs)
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        fmt::Display::fmt(self, f)?;
        write!(f, "]")
    }
}

/// Space-separated colours, the same syntax as query-set file lines.
impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.values.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Checked constructor taking the board size explicitly.
pub fn make_permutation(n: usize, values: &[u32]) -> Result<Permutation> {
    if values.len() != n {
        return Err(Error::SizeMismatch {
            left: n,
            right: values.len(),
        });
    }
    Permutation::new(values.to_vec())
}

/// An assignment of colours to a subset of positions, not necessarily
/// injective. Entries are kept sorted by position.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PartialColouring {
    n: usize,
    entries: Vec<(u32, u32)>,
    valid: bool,
}

impl PartialColouring {
    /// Builds a colouring from 1-indexed `(position, colour)` pairs.
    pub fn new(n: usize, pairs: impl IntoIterator<Item = (usize, u32)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::out_of_range("n", 0, 1, usize::MAX >> 1));
        }
        let mut entries = Vec::new();
        for (p, c) in pairs {
            if p == 0 || p > n {
                return Err(Error::out_of_range("position", p, 1, n));
            }
            if c == 0 || c as usize > n {
                return Err(Error::out_of_range("colour", c as usize, 1, n));
            }
            entries.push((p as u32, c));
        }
        entries.sort_unstable();
        if entries.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidArgument("position assigned twice"));
        }
        let mut used = alloc::vec![false; n];
        let mut valid = true;
        for &(_, c) in &entries {
            let slot = &mut used[c as usize - 1];
            if *slot {
                valid = false;
                break;
            }
            *slot = true;
        }
        Ok(Self { n, entries, valid })
    }

    pub fn empty(n: usize) -> Self {
        assert!(n >= 1, "colourings need n >= 1");
        Self {
            n,
            entries: Vec::new(),
            valid: true,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// True iff no two positions share a colour.
    pub fn is_valid(&self) -> bool {
        self.valid
    }

    /// Assigned positions in ascending order.
    pub fn positions(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.iter().map(|&(p, _)| p as usize)
    }

    /// `(position, colour)` pairs in ascending position order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.entries.iter().map(|&(p, c)| (p as usize, c))
    }

    pub fn colour(&self, position: usize) -> Option<u32> {
        self.entries
            .binary_search_by_key(&(position as u32), |&(p, _)| p)
            .ok()
            .map(|i| self.entries[i].1)
    }

    pub fn same_domain(&self, other: &PartialColouring) -> bool {
        self.n == other.n
            && self.entries.len() == other.entries.len()
            && self
                .entries
                .iter()
                .zip(&other.entries)
                .all(|(a, b)| a.0 == b.0)
    }

    pub(crate) fn raw(&self) -> &[(u32, u32)] {
        &self.entries
    }
}

impl fmt::Debug for PartialColouring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (p, c)) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{p}->{c}")?;
        }
        write!(f, "}}/{}", self.n)
    }
}

/// Number of positions where `query` and `codeword` agree.
pub fn black_pegs(query: &Permutation, codeword: &Permutation) -> Result<usize> {
    if query.n() != codeword.n() {
        return Err(Error::SizeMismatch {
            left: query.n(),
            right: codeword.n(),
        });
    }
    Ok(black_pegs_unchecked(query.as_slice(), codeword.as_slice()))
}

#[inline]
pub(crate) fn black_pegs_unchecked(a: &[u32], b: &[u32]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x == y).count()
}

/// True iff `sigma` differs from `c` at every assigned position. Vacuously
/// true for the empty colouring.
pub fn is_zero_query(sigma: &Permutation, c: &PartialColouring) -> Result<bool> {
    if sigma.n() != c.n() {
        return Err(Error::SizeMismatch {
            left: sigma.n(),
            right: c.n(),
        });
    }
    Ok(zero_query_unchecked(sigma.as_slice(), c.raw()))
}

#[inline]
pub(crate) fn zero_query_unchecked(sigma: &[u32], c: &[(u32, u32)]) -> bool {
    c.iter().all(|&(p, col)| sigma[p as usize - 1] != col)
}

/// True iff `sigma` is a 0-query for `v` but not for `c`.
///
/// `v` must be injective and both colourings must assign the same positions.
pub fn discriminates(sigma: &Permutation, v: &PartialColouring, c: &PartialColouring) -> Result<bool> {
    if sigma.n() != v.n() || sigma.n() != c.n() {
        return Err(Error::SizeMismatch {
            left: sigma.n(),
            right: if sigma.n() != v.n() { v.n() } else { c.n() },
        });
    }
    if !v.same_domain(c) {
        return Err(Error::DomainMismatch);
    }
    if !v.is_valid() {
        return Err(Error::InvalidV);
    }
    Ok(zero_query_unchecked(sigma.as_slice(), v.raw())
        && !zero_query_unchecked(sigma.as_slice(), c.raw()))
}

/// `n!` as a `u64`. Panics above `n = 20`.
pub(crate) fn factorial_u64(n: usize) -> u64 {
    assert!(n <= Cutoffs::HARD_LIMIT, "{n}! overflows u64");
    (1..=n as u64).product()
}

/// Advances `values` to the next permutation in lexicographic order.
/// Returns false (leaving `values` untouched) at the last permutation.
pub(crate) fn next_lex(values: &mut [u32]) -> bool {
    let n = values.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && values[i - 1] >= values[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while values[j] <= values[i - 1] {
        j -= 1;
    }
    values.swap(i - 1, j);
    values[i..].reverse();
    true
}

/// All `n!` permutations in lexicographic order.
pub struct LexPermutations {
    current: Option<Vec<u32>>,
}

impl Iterator for LexPermutations {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        let current = self.current.as_mut()?;
        let out = Permutation::from_vec_unchecked(current.clone());
        if !next_lex(current) {
            self.current = None;
        }
        Some(out)
    }
}

/// Lexicographic stream of every permutation of `1..=n`.
pub fn enumerate_permutations(n: usize, cutoffs: &Cutoffs) -> Result<LexPermutations> {
    if n == 0 {
        return Err(Error::out_of_range("n", 0, 1, cutoffs.exhaustive));
    }
    cutoffs.check_exhaustive(n)?;
    Ok(LexPermutations {
        current: Some((1..=n as u32).collect()),
    })
}

/// Calls `f` on every permutation of `1..=n` whose lexicographic rank lies in
/// `ranks`, in order, reusing one buffer. Stops early when `f` returns false.
pub(crate) fn for_each_in_rank_range(
    n: usize,
    ranks: core::ops::Range<u64>,
    mut f: impl FnMut(u64, &[u32]) -> bool,
) {
    if ranks.is_empty() {
        return;
    }
    let Some(start) = Permutation::from_lex_rank(n, ranks.start) else {
        return;
    };
    let mut buf = start.into_vec();
    let mut rank = ranks.start;
    loop {
        if !f(rank, &buf) {
            return;
        }
        rank += 1;
        if rank >= ranks.end || !next_lex(&mut buf) {
            return;
        }
    }
}

//! Seeded uniform sampling of permutations and static query sets.
//!
//! The stream is PCG-XSL-RR 128/64 (`rand_pcg::Pcg64`) seeded through
//! `SeedableRng::seed_from_u64`, identified as [`GENERATOR_ID`]. Bounded
//! integers use Lemire's multiply-and-reject method, so shuffles are exactly
//! uniform and the stream depends only on this crate, not on `rand`.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand_core::{Rng, SeedableRng};
use rand_pcg::Pcg64;

use crate::bounds::required_query_count;
use crate::perm::Permutation;
use crate::{Error, Result};

pub const GENERATOR_ID: &str = "pcg64";

/// A single-owner deterministic random stream.
#[derive(Clone, Debug)]
pub struct RngState {
    inner: Pcg64,
}

impl RngState {
    pub fn from_seed(seed: u64) -> Self {
        Self {
            inner: Pcg64::seed_from_u64(seed),
        }
    }

    /// Independent stream for task `index` of a run seeded with `seed`.
    pub fn substream(seed: u64, index: u64) -> Self {
        Self::from_seed(derive_seed(seed, &[index]))
    }

    pub fn algorithm_id(&self) -> &'static str {
        GENERATOR_ID
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform integer in `0..bound`. Panics if `bound` is zero.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "empty range");
        let mut m = (self.next_u64() as u128) * (bound as u128);
        let mut low = m as u64;
        if low < bound {
            let threshold = bound.wrapping_neg() % bound;
            while low < threshold {
                m = (self.next_u64() as u128) * (bound as u128);
                low = m as u64;
            }
        }
        (m >> 64) as u64
    }

    /// Fisher-Yates from the last index down.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }
}

/// Mixes `parts` into `seed` with the SplitMix64 finaliser, one part at a
/// time. Used for per-task and per-cell substreams.
pub fn derive_seed(seed: u64, parts: &[u64]) -> u64 {
    parts.iter().fold(splitmix64(seed), |acc, &p| splitmix64(acc ^ splitmix64(p)))
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Uniformly random permutation of `1..=n`.
pub fn random_permutation(n: usize, rng: &mut RngState) -> Result<Permutation> {
    if n == 0 {
        return Err(Error::out_of_range("n", 0, 1, u32::MAX as usize));
    }
    let mut values: Vec<u32> = (1..=n as u32).collect();
    rng.shuffle(&mut values);
    Ok(Permutation::from_vec_unchecked(values))
}

/// An ordered multiset of queries over the same `n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuerySet {
    n: usize,
    queries: Vec<Permutation>,
    seed: Option<u64>,
    generator_id: String,
}

impl QuerySet {
    /// Wraps externally supplied queries. Every query must have size `n`.
    pub fn new(
        n: usize,
        queries: Vec<Permutation>,
        seed: Option<u64>,
        generator_id: impl Into<String>,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::out_of_range("n", 0, 1, u32::MAX as usize));
        }
        if let Some(q) = queries.iter().find(|q| q.n() != n) {
            return Err(Error::SizeMismatch {
                left: n,
                right: q.n(),
            });
        }
        Ok(Self {
            n,
            queries,
            seed,
            generator_id: generator_id.into(),
        })
    }

    /// Every permutation of `1..=n` in lexicographic order.
    pub fn all_permutations(n: usize, cutoffs: &crate::Cutoffs) -> Result<Self> {
        let queries = crate::perm::enumerate_permutations(n, cutoffs)?.collect();
        Self::new(n, queries, None, "lexicographic")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.queries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.queries.is_empty()
    }

    pub fn queries(&self) -> &[Permutation] {
        &self.queries
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn generator_id(&self) -> &str {
        &self.generator_id
    }

    /// Drops repeated queries, keeping first occurrences in order.
    ///
    /// The result no longer matches its seed, so the seed is cleared.
    pub fn deduplicated(&self) -> QuerySet {
        let mut seen = alloc::collections::BTreeSet::new();
        let queries = self
            .queries
            .iter()
            .filter(|q| seen.insert(q.as_slice()))
            .cloned()
            .collect();
        QuerySet {
            n: self.n,
            queries,
            seed: None,
            generator_id: self.generator_id.clone(),
        }
    }

    /// The first `len` queries.
    pub fn prefix(&self, len: usize) -> QuerySet {
        QuerySet {
            n: self.n,
            queries: self.queries[..len.min(self.queries.len())].to_vec(),
            seed: self.seed,
            generator_id: self.generator_id.clone(),
        }
    }

    pub fn push(&mut self, query: Permutation) -> Result<()> {
        if query.n() != self.n {
            return Err(Error::SizeMismatch {
                left: self.n,
                right: query.n(),
            });
        }
        self.queries.push(query);
        Ok(())
    }
}

/// How many queries to generate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QueryCount {
    /// `⌈28 n ln n⌉`.
    Auto,
    Exact(usize),
}

impl QueryCount {
    pub fn resolve(self, n: usize) -> Result<usize> {
        match self {
            QueryCount::Auto => Ok(required_query_count(n)? as usize),
            QueryCount::Exact(0) => Err(Error::out_of_range("count", 0, 1, usize::MAX >> 1)),
            QueryCount::Exact(k) => Ok(k),
        }
    }
}

/// `count` independent uniform permutations drawn with replacement from the
/// stream seeded by `seed`.
pub fn generate_query_set(n: usize, count: QueryCount, seed: u64) -> Result<QuerySet> {
    if n < 2 {
        return Err(Error::out_of_range("n", n, 2, u32::MAX as usize));
    }
    let count = count.resolve(n)?;
    let mut rng = RngState::from_seed(seed);
    let queries = (0..count)
        .map(|_| random_permutation(n, &mut rng))
        .collect::<Result<Vec<_>>>()?;
    Ok(QuerySet {
        n,
        queries,
        seed: Some(seed),
        generator_id: GENERATOR_ID.to_string(),
    })
}

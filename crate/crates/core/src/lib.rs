//! Static Permutation Mastermind, without the standard library.
//!
//! A codeword is a permutation of the colours `1..=n` over the positions
//! `1..=n`; a static strategy is a fixed list of permutation queries, each
//! answered by its number of black pegs. This crate holds everything that is
//! pure computation:
//!
//! - [`perm`]: permutations, partial colourings, black pegs, the 0-query and
//!   discrimination predicates, lexicographic enumeration.
//! - [`counting`]: exact big-integer counting of 0-queries.
//! - [`interval`]: outward-rounded fixed-point interval arithmetic, used to
//!   size query sets and to check transcendental inequalities rigorously.
//! - [`bounds`]: finite-n forms of the counting inequalities behind the
//!   `O(n log n)` query bound, each paired with an enumeration oracle.
//! - [`querygen`]: seeded uniform sampling of query sets.
//! - [`decoder`]: one-colour-at-a-time codeword reconstruction.
//! - [`certify`]: exhaustive and Monte Carlo certification of query sets.
//!
//! Positions and colours are 1-indexed everywhere in the public API.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod bounds;
pub mod certify;
pub mod counting;
pub mod decoder;
mod error;
pub mod interval;
pub mod perm;
pub mod querygen;

pub use error::{Error, Result};
pub use perm::{PartialColouring, Permutation};

/// Size limits for the exhaustive paths.
///
/// `exhaustive` bounds every enumeration over all `n!` permutations (set-size
/// oracles, `decode-all` and `unique-feedback` certification); `triples`
/// bounds the Lemma-triple certifier, whose instance count grows much faster.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Cutoffs {
    pub exhaustive: usize,
    pub triples: usize,
}

impl Cutoffs {
    /// Largest `n` for which `n!` fits in a `u64`; enumeration ranks are `u64`.
    pub const HARD_LIMIT: usize = 20;

    pub const fn new(exhaustive: usize, triples: usize) -> Self {
        Self {
            exhaustive,
            triples,
        }
    }

    pub(crate) fn check_exhaustive(&self, n: usize) -> Result<()> {
        let limit = self.exhaustive.min(Self::HARD_LIMIT);
        if n > limit {
            return Err(Error::CutoffExceeded { n, limit });
        }
        Ok(())
    }

    pub(crate) fn check_triples(&self, n: usize) -> Result<()> {
        let limit = self.triples.min(Self::HARD_LIMIT);
        if n > limit {
            return Err(Error::CutoffExceeded { n, limit });
        }
        Ok(())
    }
}

impl Default for Cutoffs {
    fn default() -> Self {
        Self::new(8, 5)
    }
}

//! Multi-threaded exhaustive certification.
//!
//! The codeword space is split into contiguous blocks of lexicographic ranks.
//! Blocks are reduced to the same canonical certificate the serial core
//! functions produce, so results do not depend on the thread count.

use pmm_core::certify::{
    certify_lemma_triples, decode_all_from_scans, decode_all_scan, feedback_signatures,
    monte_carlo_certify, unique_feedback_from_signatures, Certificate, Level, Mode,
};
use pmm_core::querygen::QuerySet;
use pmm_core::{Cutoffs, Result};
use rayon::prelude::*;

const BLOCK: u64 = 256;

fn blocks(total: u64) -> Vec<std::ops::Range<u64>> {
    (0..total)
        .step_by(BLOCK as usize)
        .map(|start| start..(start + BLOCK).min(total))
        .collect()
}

fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

pub fn certify_decode_all(q: &QuerySet, cutoffs: &Cutoffs) -> Result<Certificate> {
    if q.n() > cutoffs.exhaustive.min(Cutoffs::HARD_LIMIT) {
        return pmm_core::certify::certify_decode_all(q, cutoffs);
    }
    let scans = blocks(factorial(q.n()))
        .into_par_iter()
        .map(|ranks| decode_all_scan(q, ranks))
        .collect::<Result<Vec<_>>>()?;
    Ok(decode_all_from_scans(q, scans))
}

pub fn certify_unique_feedback(q: &QuerySet, cutoffs: &Cutoffs) -> Result<Certificate> {
    if q.n() > cutoffs.exhaustive.min(Cutoffs::HARD_LIMIT) {
        return pmm_core::certify::certify_unique_feedback(q, cutoffs);
    }
    let signatures: Vec<Vec<u8>> = blocks(factorial(q.n()))
        .into_par_iter()
        .map(|ranks| feedback_signatures(q, ranks))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    Ok(unique_feedback_from_signatures(q, &signatures))
}

/// Runs one level in the given mode.
pub fn certify(q: &QuerySet, level: Level, mode: Mode, cutoffs: &Cutoffs) -> Result<Certificate> {
    match mode {
        Mode::MonteCarlo { trials, seed } => monte_carlo_certify(q, level, trials, seed),
        Mode::Exhaustive => match level {
            Level::UniqueFeedback => certify_unique_feedback(q, cutoffs),
            Level::DecodeAll => certify_decode_all(q, cutoffs),
            Level::LemmaTriples => certify_lemma_triples(q, cutoffs),
        },
    }
}

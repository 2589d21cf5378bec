//! Codeword reconstruction from the black-peg answers to a static query set.
//!
//! Let `I` be the positions whose colour is still unknown and `Q_I` the
//! queries that miss the codeword on every position of `I`. Their residual
//! black-peg count (the answer minus the matches on already recovered
//! positions) is zero. If at some `i ∈ I` the queries in `Q_I` show `n − 1`
//! distinct colours, the codeword's colour at `i` is the one colour they never
//! use. Recover it, shrink `I`, repeat.
//!
//! Queries only ever enter `Q_I`, so per-position colour tallies are updated
//! incrementally and the whole run costs `O(|Q| n + n^2)`.

use alloc::vec::Vec;

use crate::perm::{black_pegs_unchecked, PartialColouring, Permutation};
use crate::querygen::QuerySet;
use crate::{Error, Result};

/// Black-peg counts, one per query, aligned with the query set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeedbackVector {
    n: usize,
    counts: Vec<u32>,
}

impl FeedbackVector {
    /// Validates every entry: it must lie in `0..=n` and differ from `n − 1`,
    /// since two permutations never disagree in exactly one position.
    pub fn new(n: usize, counts: Vec<u32>) -> Result<Self> {
        if n == 0 {
            return Err(Error::out_of_range("n", 0, 1, u32::MAX as usize));
        }
        for (index, &value) in counts.iter().enumerate() {
            if value as usize > n || value as usize == n - 1 {
                return Err(Error::MalformedFeedback {
                    index,
                    value: value as usize,
                });
            }
        }
        Ok(Self { n, counts })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }
}

/// Codemaker's answers to every query at once.
pub fn answer_all(q: &QuerySet, codeword: &Permutation) -> Result<FeedbackVector> {
    if q.n() != codeword.n() {
        return Err(Error::SizeMismatch {
            left: q.n(),
            right: codeword.n(),
        });
    }
    let counts = q
        .queries()
        .iter()
        .map(|query| black_pegs_unchecked(query.as_slice(), codeword.as_slice()) as u32)
        .collect();
    Ok(FeedbackVector {
        n: q.n(),
        counts,
    })
}

/// One recovered colour.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DecodeStep {
    pub position: usize,
    pub colour: u32,
    /// `|Q_I|` when the position was resolved.
    pub zero_queries: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DecodeOutcome {
    Success(Permutation),
    /// No unknown position could be resolved. `known` holds the colours
    /// recovered so far; `remaining` is `I`.
    Stuck {
        known: PartialColouring,
        remaining: Vec<usize>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodeTranscript {
    pub steps: Vec<DecodeStep>,
    pub outcome: DecodeOutcome,
    /// `|Q_I|` after the last step.
    pub final_zero_queries: usize,
    /// Elementary operations performed (query scans, tally updates, position
    /// scans).
    pub work: u64,
}

impl DecodeTranscript {
    pub fn is_success(&self) -> bool {
        matches!(self.outcome, DecodeOutcome::Success(_))
    }

    pub fn recovered(&self) -> Option<&Permutation> {
        match &self.outcome {
            DecodeOutcome::Success(p) => Some(p),
            DecodeOutcome::Stuck { .. } => None,
        }
    }
}

/// Reconstructs the codeword behind `feedback`, resolving the smallest
/// available position at each step.
///
/// `Stuck` is a normal outcome: the query set does not determine this
/// codeword. Feedback that no codeword could have produced is reported as
/// [`Error::InconsistentFeedback`] when it is detected.
pub fn decode(q: &QuerySet, feedback: &FeedbackVector) -> Result<DecodeTranscript> {
    let n = q.n();
    if feedback.n() != n {
        return Err(Error::SizeMismatch {
            left: n,
            right: feedback.n(),
        });
    }
    if feedback.len() != q.len() {
        return Err(Error::SizeMismatch {
            left: q.len(),
            right: feedback.len(),
        });
    }
    let queries: Vec<&[u32]> = q.queries().iter().map(Permutation::as_slice).collect();
    let mut state = DecodeState::new(n, &queries, feedback.counts());

    let mut steps = Vec::new();
    let mut remaining = n;
    while remaining > 0 {
        let Some(position) = state.resolvable_position() else {
            break;
        };
        let colour = state.missing_colour(position);
        if state.colour_used[colour as usize - 1] {
            return Err(Error::InconsistentFeedback("recovered colour already used"));
        }
        steps.push(DecodeStep {
            position: position + 1,
            colour,
            zero_queries: state.zero_query_count,
        });
        state.assign(position, colour)?;
        remaining -= 1;
    }

    let final_zero_queries = state.zero_query_count;
    let outcome = if remaining == 0 {
        let perm = Permutation::from_vec_unchecked(state.recovered.clone());
        let check = answer_all(q, &perm)?;
        if check.counts() != feedback.counts() {
            return Err(Error::InconsistentFeedback(
                "decoded codeword does not reproduce the feedback",
            ));
        }
        state.work += (q.len() * n) as u64;
        DecodeOutcome::Success(perm)
    } else {
        let known = PartialColouring::new(
            n,
            (0..n)
                .filter(|&p| !state.unknown[p])
                .map(|p| (p + 1, state.recovered[p])),
        )?;
        let remaining = (0..n).filter(|&p| state.unknown[p]).map(|p| p + 1).collect();
        DecodeOutcome::Stuck { known, remaining }
    };
    Ok(DecodeTranscript {
        steps,
        outcome,
        final_zero_queries,
        work: state.work,
    })
}

struct DecodeState<'a> {
    n: usize,
    queries: &'a [&'a [u32]],
    residual: Vec<u32>,
    in_zero_set: Vec<bool>,
    zero_query_count: usize,
    /// `tally[pos * n + colour - 1]`: queries in `Q_I` with that colour there.
    tally: Vec<u32>,
    distinct: Vec<usize>,
    unknown: Vec<bool>,
    recovered: Vec<u32>,
    colour_used: Vec<bool>,
    work: u64,
}

impl<'a> DecodeState<'a> {
    fn new(n: usize, queries: &'a [&'a [u32]], counts: &[u32]) -> Self {
        let mut state = DecodeState {
            n,
            queries,
            residual: counts.to_vec(),
            in_zero_set: alloc::vec![false; queries.len()],
            zero_query_count: 0,
            tally: alloc::vec![0; n * n],
            distinct: alloc::vec![0; n],
            unknown: alloc::vec![true; n],
            recovered: alloc::vec![0; n],
            colour_used: alloc::vec![false; n],
            work: 0,
        };
        for t in 0..queries.len() {
            state.work += 1;
            if state.residual[t] == 0 {
                state.enter(t);
            }
        }
        state
    }

    fn enter(&mut self, t: usize) {
        self.in_zero_set[t] = true;
        self.zero_query_count += 1;
        let query = self.queries[t];
        for (pos, &colour) in query.iter().enumerate() {
            if !self.unknown[pos] {
                continue;
            }
            let slot = &mut self.tally[pos * self.n + colour as usize - 1];
            if *slot == 0 {
                self.distinct[pos] += 1;
            }
            *slot += 1;
        }
        self.work += self.n as u64;
    }

    fn resolvable_position(&mut self) -> Option<usize> {
        self.work += self.n as u64;
        (0..self.n).find(|&p| self.unknown[p] && self.distinct[p] == self.n - 1)
    }

    fn missing_colour(&mut self, pos: usize) -> u32 {
        self.work += self.n as u64;
        let row = &self.tally[pos * self.n..(pos + 1) * self.n];
        let idx = row
            .iter()
            .position(|&count| count == 0)
            .expect("n - 1 distinct colours leave exactly one missing");
        idx as u32 + 1
    }

    fn assign(&mut self, pos: usize, colour: u32) -> Result<()> {
        self.unknown[pos] = false;
        self.recovered[pos] = colour;
        self.colour_used[colour as usize - 1] = true;
        for t in 0..self.queries.len() {
            self.work += 1;
            if self.in_zero_set[t] || self.queries[t][pos] != colour {
                continue;
            }
            // Residual counts matches on the unknown positions; it cannot be
            // zero here since the query matches at `pos`.
            debug_assert!(self.residual[t] > 0);
            self.residual[t] -= 1;
            if self.residual[t] == 0 {
                self.enter(t);
            }
        }
        Ok(())
    }
}

/// True iff decoding the answers for `codeword` recovers `codeword`.
pub fn round_trip_check(q: &QuerySet, codeword: &Permutation) -> Result<bool> {
    let feedback = answer_all(q, codeword)?;
    let transcript = decode(q, &feedback)?;
    Ok(transcript.recovered() == Some(codeword))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Cutoffs;
    use alloc::vec;

    fn p(v: &[u32]) -> Permutation {
        Permutation::new(v.to_vec()).unwrap()
    }

    fn all3() -> QuerySet {
        QuerySet::all_permutations(3, &Cutoffs::default()).unwrap()
    }

    #[test]
    fn answers_over_all_of_s3() {
        let fb = answer_all(&all3(), &p(&[2, 3, 1])).unwrap();
        assert_eq!(fb.counts(), [0, 1, 1, 3, 0, 1]);
    }

    #[test]
    fn decodes_over_all_of_s3() {
        let q = all3();
        let fb = answer_all(&q, &p(&[2, 3, 1])).unwrap();
        let tr = decode(&q, &fb).unwrap();
        assert_eq!(tr.recovered(), Some(&p(&[2, 3, 1])));
        assert_eq!(
            tr.steps[0],
            DecodeStep {
                position: 1,
                colour: 2,
                zero_queries: 2
            }
        );
    }

    #[test]
    fn n_one_with_no_queries() {
        let q = QuerySet::new(1, vec![], None, "none").unwrap();
        let fb = FeedbackVector::new(1, vec![]).unwrap();
        let tr = decode(&q, &fb).unwrap();
        assert_eq!(tr.recovered(), Some(&p(&[1])));
    }

    #[test]
    fn one_query_gets_stuck() {
        let q = QuerySet::new(3, vec![p(&[1, 2, 3])], None, "none").unwrap();
        let fb = FeedbackVector::new(3, vec![0]).unwrap();
        let tr = decode(&q, &fb).unwrap();
        match tr.outcome {
            DecodeOutcome::Stuck { known, remaining } => {
                assert!(known.is_empty());
                assert_eq!(remaining, vec![1, 2, 3]);
            }
            other => panic!("expected Stuck, got {other:?}"),
        }
        assert!(tr.steps.is_empty());
    }

    #[test]
    fn empty_set_fails_round_trip() {
        for n in 2..5 {
            let q = QuerySet::new(n, vec![], None, "none").unwrap();
            assert!(!round_trip_check(&q, &Permutation::identity(n)).unwrap());
        }
    }

    #[test]
    fn feedback_validation() {
        assert!(matches!(
            FeedbackVector::new(3, vec![0, 2]),
            Err(Error::MalformedFeedback { index: 1, value: 2 })
        ));
        assert!(matches!(
            FeedbackVector::new(3, vec![4]),
            Err(Error::MalformedFeedback { index: 0, value: 4 })
        ));
        assert!(FeedbackVector::new(3, vec![0, 1, 3]).is_ok());
    }

    #[test]
    fn size_mismatches() {
        let q = all3();
        assert!(matches!(
            answer_all(&q, &Permutation::identity(4)),
            Err(Error::SizeMismatch { .. })
        ));
        let short = FeedbackVector::new(3, vec![0]).unwrap();
        assert!(matches!(decode(&q, &short), Err(Error::SizeMismatch { .. })));
        let wrong_n = FeedbackVector::new(4, vec![0; 6]).unwrap();
        assert!(matches!(decode(&q, &wrong_n), Err(Error::SizeMismatch { .. })));
    }

    #[test]
    fn all_zero_answers_over_s3_are_stuck() {
        // Every query is then a 0-query, so each position sees all three
        // colours and nothing can be resolved.
        let q = all3();
        let fb = FeedbackVector::new(3, vec![0; 6]).unwrap();
        let tr = decode(&q, &fb).unwrap();
        assert!(!tr.is_success());
        assert_eq!(tr.final_zero_queries, 6);
    }
}

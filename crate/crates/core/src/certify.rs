//! Certification of query sets at three nested rigor levels.
//!
//! - `unique-feedback`: distinct codewords get distinct answer vectors.
//! - `decode-all`: the decoder recovers every codeword.
//! - `lemma-triples`: for every nonempty `I`, valid `v` and pointwise
//!   different `c` on `I`, some query discriminates `v` from `c`.
//!
//! Each level implies the previous one. Exhaustive runs enumerate in a fixed
//! order and report the first failure in that order, so any partition of the
//! work (see the `*_scan` functions) can be reduced to the same certificate.
//! Work counters of exhaustive runs count instances up to and including the
//! reported failure and are likewise independent of how the work was split.

use alloc::vec::Vec;
use core::fmt;
use core::ops::Range;

use crate::bounds::TripleInstance;
use crate::decoder::{answer_all, decode, DecodeOutcome, DecodeTranscript, FeedbackVector};
use crate::perm::{
    black_pegs_unchecked, discriminates, factorial_u64, for_each_in_rank_range,
    zero_query_unchecked, PartialColouring, Permutation,
};
use crate::querygen::{random_permutation, QuerySet, RngState};
use crate::{Cutoffs, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Level {
    UniqueFeedback,
    DecodeAll,
    LemmaTriples,
}

impl Level {
    pub const ALL: [Level; 3] = [Level::UniqueFeedback, Level::DecodeAll, Level::LemmaTriples];

    pub fn name(self) -> &'static str {
        match self {
            Level::UniqueFeedback => "unique-feedback",
            Level::DecodeAll => "decode-all",
            Level::LemmaTriples => "lemma-triples",
        }
    }

    pub fn from_name(name: &str) -> Option<Level> {
        Level::ALL.into_iter().find(|l| l.name() == name)
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Exhaustive,
    /// PASS only means no counterexample turned up in `trials` samples.
    MonteCarlo { trials: u64, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    /// Two different codewords with identical answers.
    CollidingCodewords(Permutation, Permutation),
    /// A codeword the decoder does not recover, with its transcript.
    Undecodable {
        codeword: Permutation,
        transcript: DecodeTranscript,
    },
    /// A triple no query discriminates.
    Triple(TripleInstance),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail(Witness),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Work {
    pub instances: u64,
    pub queries_scanned: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub level: Level,
    pub mode: Mode,
    pub n: usize,
    pub query_count: usize,
    pub verdict: Verdict,
    pub work: Work,
}

impl Certificate {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn witness(&self) -> Option<&Witness> {
        match &self.verdict {
            Verdict::Pass => None,
            Verdict::Fail(w) => Some(w),
        }
    }
}

/// Answer vector of `codeword` as bytes; every count is at most the cutoff.
fn signature(q: &QuerySet, codeword: &[u32]) -> Vec<u8> {
    q.queries()
        .iter()
        .map(|query| black_pegs_unchecked(query.as_slice(), codeword) as u8)
        .collect()
}

/// Answer vectors of the codewords with lexicographic ranks in `ranks`.
pub fn feedback_signatures(q: &QuerySet, ranks: Range<u64>) -> Vec<Vec<u8>> {
    let mut out = Vec::with_capacity((ranks.end - ranks.start) as usize);
    for_each_in_rank_range(q.n(), ranks, |_, codeword| {
        out.push(signature(q, codeword));
        true
    });
    out
}

/// Builds the `unique-feedback` certificate from the answer vectors of all
/// `n!` codewords, listed in lexicographic order.
pub fn unique_feedback_from_signatures(q: &QuerySet, signatures: &[Vec<u8>]) -> Certificate {
    let n = q.n();
    assert_eq!(signatures.len() as u64, factorial_u64(n), "one signature per codeword");
    let mut first_seen = alloc::collections::BTreeMap::new();
    let mut verdict = Verdict::Pass;
    let mut instances = 0u64;
    for (rank, sig) in signatures.iter().enumerate() {
        instances += 1;
        if let Some(&earlier) = first_seen.get(sig.as_slice()) {
            let a = Permutation::from_lex_rank(n, earlier).expect("rank in range");
            let b = Permutation::from_lex_rank(n, rank as u64).expect("rank in range");
            verdict = Verdict::Fail(Witness::CollidingCodewords(a, b));
            break;
        }
        first_seen.insert(sig.as_slice(), rank as u64);
    }
    Certificate {
        level: Level::UniqueFeedback,
        mode: Mode::Exhaustive,
        n,
        query_count: q.len(),
        verdict,
        work: Work {
            instances,
            queries_scanned: instances * q.len() as u64,
        },
    }
}

pub fn certify_unique_feedback(q: &QuerySet, cutoffs: &Cutoffs) -> Result<Certificate> {
    cutoffs.check_exhaustive(q.n())?;
    let sigs = feedback_signatures(q, 0..factorial_u64(q.n()));
    Ok(unique_feedback_from_signatures(q, &sigs))
}

/// Result of running the decoder on a contiguous block of codewords.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodeScan {
    pub ranks: Range<u64>,
    /// First failing codeword in the block, by rank.
    pub failure: Option<(u64, Permutation, DecodeTranscript)>,
}

/// Round-trips every codeword with rank in `ranks`, stopping at the first
/// failure.
pub fn decode_all_scan(q: &QuerySet, ranks: Range<u64>) -> Result<DecodeScan> {
    let n = q.n();
    let mut failure = None;
    let mut error = None;
    for_each_in_rank_range(n, ranks.clone(), |rank, codeword| {
        let codeword = Permutation::from_vec_unchecked(codeword.to_vec());
        let outcome = answer_all(q, &codeword).and_then(|fb| decode(q, &fb));
        match outcome {
            Ok(tr) if tr.recovered() == Some(&codeword) => true,
            Ok(tr) => {
                failure = Some((rank, codeword, tr));
                false
            }
            Err(e) => {
                error = Some(e);
                false
            }
        }
    });
    if let Some(e) = error {
        return Err(e);
    }
    Ok(DecodeScan { ranks, failure })
}

/// Reduces block scans covering `0..n!` to the canonical certificate.
pub fn decode_all_from_scans(q: &QuerySet, scans: Vec<DecodeScan>) -> Certificate {
    let n = q.n();
    let total = factorial_u64(n);
    let failure = scans
        .into_iter()
        .filter_map(|s| s.failure)
        .min_by_key(|(rank, _, _)| *rank);
    let (verdict, instances) = match failure {
        None => (Verdict::Pass, total),
        Some((rank, codeword, transcript)) => (
            Verdict::Fail(Witness::Undecodable {
                codeword,
                transcript,
            }),
            rank + 1,
        ),
    };
    Certificate {
        level: Level::DecodeAll,
        mode: Mode::Exhaustive,
        n,
        query_count: q.len(),
        verdict,
        work: Work {
            instances,
            queries_scanned: instances * q.len() as u64,
        },
    }
}

pub fn certify_decode_all(q: &QuerySet, cutoffs: &Cutoffs) -> Result<Certificate> {
    cutoffs.check_exhaustive(q.n())?;
    let scan = decode_all_scan(q, 0..factorial_u64(q.n()))?;
    Ok(decode_all_from_scans(q, alloc::vec![scan]))
}

/// The first triple (in enumeration order) that no query discriminates.
///
/// For a fixed `(I, v)` the queries that avoid `v` on `I` fix, at each
/// position, the set of colours they use there. A colouring `c` escapes all
/// of them iff at every `i` its colour is outside that set and differs from
/// `v(i)`, so the undiscriminated `c` form a product set whose
/// lexicographically first element is read off directly.
pub fn certify_lemma_triples(q: &QuerySet, cutoffs: &Cutoffs) -> Result<Certificate> {
    let n = q.n();
    cutoffs.check_triples(n)?;
    let queries: Vec<&[u32]> = q.queries().iter().map(Permutation::as_slice).collect();
    let mut work = Work::default();
    let mut witness = None;
    let full: u32 = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    let options = (n - 1) as u64;

    'sizes: for k in 1..=n {
        let per_group = options.pow(k as u32);
        let mut positions: Vec<usize> = (0..k).collect();
        loop {
            let found = for_each_injection(n, k, |colours| {
                let mut seen = alloc::vec![0u32; k];
                for query in &queries {
                    if positions
                        .iter()
                        .zip(colours)
                        .all(|(&p, &col)| query[p] != col)
                    {
                        for (slot, &p) in seen.iter_mut().zip(&positions) {
                            *slot |= 1 << (query[p] - 1);
                        }
                    }
                }
                work.queries_scanned += queries.len() as u64;
                let mut rank_in_group = 0u64;
                let mut escape = Vec::with_capacity(k);
                for ((&s, &col), &p) in seen.iter().zip(colours).zip(&positions) {
                    let allowed = full & !s & !(1 << (col - 1));
                    if allowed == 0 {
                        work.instances += per_group;
                        return None;
                    }
                    let chosen = allowed.trailing_zeros() + 1;
                    // Index of `chosen` among the n − 1 colours other than v(i).
                    let idx = (chosen - 1 - u32::from(chosen > col)) as u64;
                    rank_in_group = rank_in_group * options + idx;
                    escape.push((p + 1, chosen));
                }
                work.instances += rank_in_group + 1;
                Some(escape)
            });
            if let Some((colours, escape)) = found {
                let v = PartialColouring::new(
                    n,
                    positions.iter().zip(&colours).map(|(&p, &col)| (p + 1, col)),
                )?;
                let c = PartialColouring::new(n, escape)?;
                witness = Some(TripleInstance::new(v, c)?);
                break 'sizes;
            }
            if !next_combination(&mut positions, n) {
                break;
            }
        }
    }

    Ok(Certificate {
        level: Level::LemmaTriples,
        mode: Mode::Exhaustive,
        n,
        query_count: q.len(),
        verdict: match witness {
            None => Verdict::Pass,
            Some(t) => Verdict::Fail(Witness::Triple(t)),
        },
        work,
    })
}

/// Next `k`-subset of `0..n` in lexicographic order.
fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Visits injective colour tuples of length `k` over `1..=n` in lexicographic
/// order until `f` returns `Some`.
fn for_each_injection<T>(
    n: usize,
    k: usize,
    mut f: impl FnMut(&[u32]) -> Option<T>,
) -> Option<(Vec<u32>, T)> {
    fn go<T>(
        n: usize,
        k: usize,
        tuple: &mut Vec<u32>,
        used: &mut [bool],
        f: &mut impl FnMut(&[u32]) -> Option<T>,
    ) -> Option<T> {
        if tuple.len() == k {
            return f(tuple);
        }
        for col in 1..=n as u32 {
            if used[col as usize - 1] {
                continue;
            }
            used[col as usize - 1] = true;
            tuple.push(col);
            let r = go(n, k, tuple, used, f);
            if r.is_some() {
                return r;
            }
            tuple.pop();
            used[col as usize - 1] = false;
        }
        None
    }
    let mut tuple = Vec::with_capacity(k);
    let mut used = alloc::vec![false; n];
    go(n, k, &mut tuple, &mut used, &mut f).map(|r| (tuple, r))
}

/// True iff some query in `q` discriminates `t.v()` from `t.c()`; scans in
/// order and stops at the first discriminating query. Returns the number of
/// queries scanned alongside.
pub fn find_discriminator(q: &QuerySet, t: &TripleInstance) -> (Option<usize>, u64) {
    let v = t.v().raw();
    let c = t.c().raw();
    for (idx, query) in q.queries().iter().enumerate() {
        let s = query.as_slice();
        if zero_query_unchecked(s, v) && !zero_query_unchecked(s, c) {
            return (Some(idx), idx as u64 + 1);
        }
    }
    (None, q.len() as u64)
}

/// Random-sampling certification for sizes beyond the exhaustive cutoffs.
///
/// `unique-feedback` samples pairs of distinct codewords, `decode-all`
/// samples codewords, `lemma-triples` samples `|I|` uniformly in `1..=n`, then
/// `I`, `v` and a pointwise different `c` uniformly.
pub fn monte_carlo_certify(q: &QuerySet, level: Level, trials: u64, seed: u64) -> Result<Certificate> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1"));
    }
    let n = q.n();
    let mut rng = RngState::from_seed(seed);
    let mut work = Work::default();
    let mut verdict = Verdict::Pass;
    for _ in 0..trials {
        let failure = match level {
            Level::UniqueFeedback => {
                if n == 1 {
                    break;
                }
                let a = random_permutation(n, &mut rng)?;
                let b = loop {
                    let b = random_permutation(n, &mut rng)?;
                    if b != a {
                        break b;
                    }
                };
                work.queries_scanned += 2 * q.len() as u64;
                (signature(q, a.as_slice()) == signature(q, b.as_slice()))
                    .then_some(Witness::CollidingCodewords(a, b))
            }
            Level::DecodeAll => {
                let codeword = random_permutation(n, &mut rng)?;
                let transcript = decode(q, &answer_all(q, &codeword)?)?;
                work.queries_scanned += q.len() as u64;
                let failed = transcript.recovered() != Some(&codeword);
                failed.then_some(Witness::Undecodable {
                    codeword,
                    transcript,
                })
            }
            Level::LemmaTriples => {
                if n == 1 {
                    break;
                }
                let t = random_triple(n, &mut rng)?;
                let (found, scanned) = find_discriminator(q, &t);
                work.queries_scanned += scanned;
                found.is_none().then_some(Witness::Triple(t))
            }
        };
        work.instances += 1;
        if let Some(w) = failure {
            verdict = Verdict::Fail(w);
            break;
        }
    }
    Ok(Certificate {
        level,
        mode: Mode::MonteCarlo { trials, seed },
        n,
        query_count: q.len(),
        verdict,
        work,
    })
}

/// A random triple: `|I|` uniform in `1..=n`, then uniform `I`, uniform
/// injective `v`, and `c(i)` uniform among the `n − 1` colours other than
/// `v(i)`. Needs `n >= 2`.
pub fn random_triple(n: usize, rng: &mut RngState) -> Result<TripleInstance> {
    if n < 2 {
        return Err(Error::out_of_range("n", n, 2, u32::MAX as usize));
    }
    let k = rng.below(n as u64) as usize + 1;
    let mut positions: Vec<usize> = (1..=n).collect();
    rng.shuffle(&mut positions);
    let mut positions = positions[..k].to_vec();
    positions.sort_unstable();
    let mut colours: Vec<u32> = (1..=n as u32).collect();
    rng.shuffle(&mut colours);
    let v = PartialColouring::new(n, positions.iter().copied().zip(colours.iter().copied()))?;
    let c = PartialColouring::new(
        n,
        positions.iter().zip(&colours).map(|(&p, &vc)| {
            let r = rng.below(n as u64 - 1) as u32 + 1;
            (p, if r >= vc { r + 1 } else { r })
        }),
    )?;
    TripleInstance::new(v, c)
}

/// For a codeword the decoder gets stuck on, the triple that certifies the
/// query set lacks the Lemma property: `I` is the unresolved positions, `v`
/// the codeword there, and `c(i)` the smallest colour other than `v(i)` that
/// no 0-query for `v` uses at `i`.
pub fn stuck_witness_triple(
    q: &QuerySet,
    codeword: &Permutation,
    transcript: &DecodeTranscript,
) -> Result<Option<TripleInstance>> {
    let DecodeOutcome::Stuck { remaining, .. } = &transcript.outcome else {
        return Ok(None);
    };
    let n = q.n();
    let v = codeword.restrict(remaining.iter().copied())?;
    let mut seen = alloc::vec![alloc::vec![false; n]; remaining.len()];
    for query in q.queries() {
        if zero_query_unchecked(query.as_slice(), v.raw()) {
            for (slot, &p) in seen.iter_mut().zip(remaining) {
                slot[query.colour(p) as usize - 1] = true;
            }
        }
    }
    let mut pairs = Vec::with_capacity(remaining.len());
    for (slot, (p, vc)) in seen.iter().zip(v.iter()) {
        let Some(col) = (1..=n as u32).find(|&col| col != vc && !slot[col as usize - 1]) else {
            return Ok(None);
        };
        pairs.push((p, col));
    }
    let c = PartialColouring::new(n, pairs)?;
    Ok(Some(TripleInstance::new(v, c)?))
}

/// Re-checks a FAIL witness from first principles. A PASS certificate has
/// nothing to check and yields true.
pub fn verify_witness(q: &QuerySet, cert: &Certificate) -> Result<bool> {
    let Some(witness) = cert.witness() else {
        return Ok(true);
    };
    Ok(match witness {
        Witness::CollidingCodewords(a, b) => {
            a != b && answer_all(q, a)?.counts() == answer_all(q, b)?.counts()
        }
        Witness::Undecodable { codeword, .. } => {
            let fb: FeedbackVector = answer_all(q, codeword)?;
            decode(q, &fb)?.recovered() != Some(codeword)
        }
        Witness::Triple(t) => {
            if t.is_empty() || t.n() != q.n() {
                return Ok(false);
            }
            let mut any = false;
            for query in q.queries() {
                if discriminates(query, t.v(), t.c())? {
                    any = true;
                    break;
                }
            }
            !any
        }
    })
}

/// A PASS at a stronger level next to a FAIL at a weaker one, among
/// exhaustive certificates of the same query set.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HierarchyViolation {
    pub passed: Level,
    pub failed: Level,
}

pub fn check_hierarchy(certs: &[Certificate]) -> core::result::Result<(), HierarchyViolation> {
    let exhaustive = || certs.iter().filter(|c| c.mode == Mode::Exhaustive);
    for strong in exhaustive().filter(|c| c.passed()) {
        if let Some(weak) = exhaustive().find(|c| c.level < strong.level && !c.passed()) {
            return Err(HierarchyViolation {
                passed: strong.level,
                failed: weak.level,
            });
        }
    }
    Ok(())
}

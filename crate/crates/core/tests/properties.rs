use proptest::prelude::*;

use pmm_core::bounds::{
    discriminating_fraction, enumerate_set_sizes, failure_probability_bound, TripleInstance,
};
use pmm_core::certify::{
    certify_decode_all, certify_lemma_triples, certify_unique_feedback, check_hierarchy,
    random_triple, verify_witness,
};
use pmm_core::decoder::{answer_all, decode};
use pmm_core::perm::{black_pegs, discriminates, is_zero_query};
use pmm_core::querygen::{generate_query_set, random_permutation, QueryCount, RngState};
use pmm_core::{Cutoffs, PartialColouring, Permutation};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow};

fn perm(n: usize, seed: u64) -> Permutation {
    random_permutation(n, &mut RngState::from_seed(seed)).unwrap()
}

proptest! {
    #[test]
    fn black_pegs_symmetric_and_never_n_minus_one(n in 2usize..12, s1: u64, s2: u64) {
        let a = perm(n, s1);
        let b = perm(n, s2);
        let ab = black_pegs(&a, &b).unwrap();
        prop_assert_eq!(ab, black_pegs(&b, &a).unwrap());
        let differ = a.iter().zip(b.iter()).filter(|(x, y)| x.1 != y.1).count();
        prop_assert_eq!(ab, n - differ);
        prop_assert_ne!(ab, n - 1);
    }

    #[test]
    fn discrimination_implies_zero_query(n in 2usize..8, seed: u64, sigma_seed: u64) {
        let t = random_triple(n, &mut RngState::from_seed(seed)).unwrap();
        let sigma = perm(n, sigma_seed);
        if discriminates(&sigma, t.v(), t.c()).unwrap() {
            prop_assert!(is_zero_query(&sigma, t.v()).unwrap());
            prop_assert!(!is_zero_query(&sigma, t.c()).unwrap());
        }
    }

    /// Relabelling positions and colours by independent permutations maps
    /// discriminators to discriminators.
    #[test]
    fn fraction_invariant_under_relabelling(n in 2usize..=6, seed: u64, ps: u64, cs: u64) {
        let t = random_triple(n, &mut RngState::from_seed(seed)).unwrap();
        let pos_map = perm(n, ps);
        let col_map = perm(n, cs);
        let relabel = |c: &PartialColouring| {
            PartialColouring::new(
                n,
                c.iter().map(|(p, col)| (pos_map.colour(p) as usize, col_map.colour(col as usize))),
            )
            .unwrap()
        };
        let moved = TripleInstance::new(relabel(t.v()), relabel(t.c())).unwrap();
        let cut = Cutoffs::default();
        prop_assert_eq!(
            discriminating_fraction(&t, &cut).unwrap(),
            discriminating_fraction(&moved, &cut).unwrap()
        );
    }

    #[test]
    fn bonferroni_holds(n in 1usize..=7, seed: u64) {
        prop_assume!(n >= 2);
        let t = random_triple(n, &mut RngState::from_seed(seed)).unwrap();
        let r = enumerate_set_sizes(&t, &Cutoffs::default()).unwrap();
        prop_assert!(r.bonferroni_holds());
        let max_single = r.per_position.iter().copied().max().unwrap_or(0);
        prop_assert!(r.union >= max_single);
        prop_assert!(r.union <= r.per_position.iter().sum::<u64>());
        if r.m == 2 {
            prop_assert_eq!(
                r.union as i128,
                r.per_position[0] as i128 + r.per_position[1] as i128 - r.pairwise[0].size as i128
            );
        }
    }

    #[test]
    fn decoder_transcript_invariants(n in 2usize..=10, size in 0usize..120, qs: u64, cs: u64) {
        let q = if size == 0 {
            pmm_core::querygen::QuerySet::new(n, vec![], None, "none").unwrap()
        } else {
            generate_query_set(n, QueryCount::Exact(size), qs).unwrap()
        };
        let codeword = perm(n, cs);
        let fb = answer_all(&q, &codeword).unwrap();
        let tr = decode(&q, &fb).unwrap();
        // Q_I only grows.
        let sizes: Vec<usize> = tr.steps.iter().map(|s| s.zero_queries).collect();
        prop_assert!(sizes.windows(2).all(|w| w[0] <= w[1]));
        if let Some(last) = sizes.last() {
            prop_assert!(*last <= tr.final_zero_queries);
        }
        // Distinct positions, distinct colours, and each one correct.
        let mut pos: Vec<usize> = tr.steps.iter().map(|s| s.position).collect();
        let mut cols: Vec<u32> = tr.steps.iter().map(|s| s.colour).collect();
        for step in &tr.steps {
            prop_assert_eq!(codeword.colour(step.position), step.colour);
        }
        pos.sort_unstable();
        pos.dedup();
        cols.sort_unstable();
        cols.dedup();
        prop_assert_eq!(pos.len(), tr.steps.len());
        prop_assert_eq!(cols.len(), tr.steps.len());
        // Soundness and determinism.
        if let Some(p) = tr.recovered() {
            prop_assert_eq!(answer_all(&q, p).unwrap(), fb.clone());
        }
        prop_assert_eq!(decode(&q, &fb).unwrap(), tr);
    }

    /// The recovered colour never appears at its position among the queries
    /// of Q_I when it was recovered.
    #[test]
    fn assigned_colour_is_absent_from_zero_queries(n in 2usize..=8, size in 1usize..80, qs: u64, cs: u64) {
        let q = generate_query_set(n, QueryCount::Exact(size), qs).unwrap();
        let codeword = perm(n, cs);
        let fb = answer_all(&q, &codeword).unwrap();
        let tr = decode(&q, &fb).unwrap();
        let mut unknown: Vec<usize> = (1..=n).collect();
        for step in &tr.steps {
            let v = codeword.restrict(unknown.iter().copied()).unwrap();
            let zero: Vec<&Permutation> = q
                .queries()
                .iter()
                .filter(|s| is_zero_query(s, &v).unwrap())
                .collect();
            prop_assert_eq!(zero.len(), step.zero_queries);
            prop_assert!(zero.iter().all(|s| s.colour(step.position) != step.colour));
            unknown.retain(|&p| p != step.position);
        }
    }

    /// Adding queries never turns a PASS into a FAIL.
    #[test]
    fn certificates_are_monotone(n in 2usize..=4, size in 1usize..60, extra in 1usize..40, seed: u64) {
        let cut = Cutoffs::default();
        let big = generate_query_set(n, QueryCount::Exact(size + extra), seed).unwrap();
        let small = big.prefix(size);
        let certs = |q| {
            [
                certify_unique_feedback(q, &cut).unwrap(),
                certify_decode_all(q, &cut).unwrap(),
                certify_lemma_triples(q, &cut).unwrap(),
            ]
        };
        let small_c = certs(&small);
        let big_c = certs(&big);
        for (s, b) in small_c.iter().zip(&big_c) {
            prop_assert!(!s.passed() || b.passed(), "{} regressed", s.level);
        }
        prop_assert!(check_hierarchy(&small_c).is_ok());
        prop_assert!(check_hierarchy(&big_c).is_ok());
        for c in small_c.iter().chain(&big_c) {
            let q = if small_c.contains(c) { &small } else { &big };
            prop_assert!(verify_witness(q, c).unwrap());
        }
    }

    #[test]
    fn failure_bound_closed_form(n in 2usize..200) {
        let nb = BigInt::from(n);
        let closed = (BigRational::one() - BigRational::new(BigInt::one(), Pow::pow(&nb, n)))
            / BigRational::from_integer(nb - 1);
        let p = failure_probability_bound(n).unwrap();
        prop_assert_eq!(&p, &closed);
        prop_assert!(p < BigRational::one());
    }
}

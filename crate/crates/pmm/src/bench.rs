//! Empirical sweep over the query-set constant.
//!
//! For each `(n, c)` cell the sweep draws `trials` independent query sets of
//! size `⌈c n ln n⌉` and one random codeword per set, and records how often the
//! decoder recovers it. Seeds derive from `(seed, n, c)` for the cell and from
//! the trial index within it, so any row can be rerun on its own.

use std::io::Write;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use pmm_core::bounds::scaled_query_count;
use pmm_core::decoder::round_trip_check;
use pmm_core::querygen::{derive_seed, generate_query_set, random_permutation, QueryCount, RngState};
use pmm_core::Result;
use rayon::prelude::*;

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub n: usize,
    /// The constant as given on the command line.
    pub c_label: String,
    pub c: BigRational,
    pub query_count: u64,
    pub trials: u64,
    pub successes: u64,
    pub wall_ms: u128,
}

impl BenchRow {
    pub fn success_rate(&self) -> BigRational {
        BigRational::new(BigInt::from(self.successes), BigInt::from(self.trials))
    }
}

/// Parses `28`, `2.5` or `7/2` as a positive rational.
pub fn parse_constant(text: &str) -> std::result::Result<BigRational, String> {
    let text = text.trim();
    let bad = || format!("not a positive rational: {text:?}");
    let value = if let Some((num, den)) = text.split_once('/') {
        let num: BigInt = num.trim().parse().map_err(|_| bad())?;
        let den: BigInt = den.trim().parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(bad());
        }
        BigRational::new(num, den)
    } else if let Some((int, frac)) = text.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let digits: BigInt = format!("{int}{frac}").parse().map_err(|_| bad())?;
        BigRational::new(digits, BigInt::from(10).pow(frac.len() as u32))
    } else {
        BigRational::from_integer(text.parse().map_err(|_| bad())?)
    };
    if value <= BigRational::zero() {
        return Err(bad());
    }
    Ok(value)
}

fn cell_seed(seed: u64, n: usize, c: &BigRational) -> u64 {
    // Constants are small rationals; fold their digits into 64 bits.
    let fold = |x: &BigInt| {
        x.to_u64_digits()
            .1
            .iter()
            .fold(0u64, |acc, &d| derive_seed(acc, &[d]))
    };
    derive_seed(seed, &[n as u64, fold(c.numer()), fold(c.denom())])
}

/// One row of the sweep.
pub fn bench_cell(n: usize, c_label: &str, c: &BigRational, trials: u64, seed: u64) -> Result<BenchRow> {
    if trials == 0 {
        return Err(pmm_core::Error::InvalidArgument("trials must be at least 1"));
    }
    let start = Instant::now();
    let query_count = scaled_query_count(n, c)?;
    let base = cell_seed(seed, n, c);
    let mut successes = 0;
    for trial in 0..trials {
        let q = generate_query_set(n, QueryCount::Exact(query_count as usize), derive_seed(base, &[trial, 0]))?;
        let mut rng = RngState::from_seed(derive_seed(base, &[trial, 1]));
        let codeword = random_permutation(n, &mut rng)?;
        if round_trip_check(&q, &codeword)? {
            successes += 1;
        }
    }
    Ok(BenchRow {
        n,
        c_label: c_label.to_string(),
        c: c.clone(),
        query_count,
        trials,
        successes,
        wall_ms: start.elapsed().as_millis(),
    })
}

/// All `(n, c)` cells, computed in parallel; rows come back in input order,
/// `n` outermost.
pub fn run_bench(ns: &[usize], cs: &[(String, BigRational)], trials: u64, seed: u64) -> Result<Vec<BenchRow>> {
    let cells: Vec<(usize, &(String, BigRational))> =
        ns.iter().flat_map(|&n| cs.iter().map(move |c| (n, c))).collect();
    cells
        .into_par_iter()
        .map(|(n, (label, c))| bench_cell(n, label, c, trials, seed))
        .collect()
}

pub const CSV_HEADER: &str = "n,c,query_count,trials,success_rate,wall_ms";

pub fn write_csv(rows: &[BenchRow], mut sink: impl Write) -> std::io::Result<()> {
    writeln!(sink, "{CSV_HEADER}")?;
    for r in rows {
        let rate = r.success_rate().to_f64().unwrap_or(f64::NAN);
        writeln!(
            sink,
            "{},{},{},{},{:.6},{}",
            r.n, r.c_label, r.query_count, r.trials, rate, r.wall_ms
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants() {
        assert_eq!(parse_constant("28").unwrap(), BigRational::from_integer(28.into()));
        assert_eq!(
            parse_constant("2.5").unwrap(),
            BigRational::new(5.into(), 2.into())
        );
        assert_eq!(
            parse_constant("7/2").unwrap(),
            BigRational::new(7.into(), 2.into())
        );
        assert!(parse_constant("0").is_err());
        assert!(parse_constant("-1").is_err());
        assert!(parse_constant("1/0").is_err());
        assert!(parse_constant("x").is_err());
        assert!(parse_constant("1.").is_err());
    }

    #[test]
    fn cell_is_reproducible() {
        let c = parse_constant("4").unwrap();
        let a = bench_cell(6, "4", &c, 20, 9).unwrap();
        let b = bench_cell(6, "4", &c, 20, 9).unwrap();
        assert_eq!((a.successes, a.query_count), (b.successes, b.query_count));
        // 24 ln 6 = 43.002..., just above an integer.
        assert_eq!(a.query_count, 44);
    }

    #[test]
    fn rows_keep_input_order() {
        let cs: Vec<(String, BigRational)> = ["2", "1"]
            .iter()
            .map(|s| (s.to_string(), parse_constant(s).unwrap()))
            .collect();
        let rows = run_bench(&[5, 4], &cs, 3, 1).unwrap();
        let keys: Vec<(usize, &str)> = rows.iter().map(|r| (r.n, r.c_label.as_str())).collect();
        assert_eq!(keys, [(5, "2"), (5, "1"), (4, "2"), (4, "1")]);
        let mut csv = Vec::new();
        write_csv(&rows, &mut csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        assert_eq!(text.lines().next(), Some(CSV_HEADER));
        assert_eq!(text.lines().count(), 5);
    }
}

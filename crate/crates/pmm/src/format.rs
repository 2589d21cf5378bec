//! Text formats: query sets, feedback vectors, triples, certificate and
//! bounds reports, decode transcripts.
//!
//! Query-set file (ASCII, `\n` line endings):
//!
//! ```text
//! PMM v1 n=<n> count=<q> seed=<s> gen=<id>
//! <q lines of n space-separated colours>
//! ```
//!
//! `seed=` is omitted for sets that were not generated from a seed; `gen=`
//! defaults to `external` when absent on read. Feedback file:
//!
//! ```text
//! PMMFB v1 n=<n> count=<q>
//! <q space-separated black-peg counts>
//! ```
//!
//! Triples file: a `PMMTRIPLES v1 n=<n>` header, then one triple per line as
//! `positions ; v colours ; c colours`. Blank lines and `#` comments are
//! skipped in triples files only.

use std::fmt::Write as _;
use std::io::{self, BufRead, Write};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use pmm_core::bounds::{
    check_claim_a, claim_a_third_order_lower, claim_sizes_detail, discrimination_target,
    enumerate_set_sizes, failure_probability_bound, per_triple_failure_bound,
    required_query_count, SetSizeReport, TripleInstance,
};
use pmm_core::certify::{stuck_witness_triple, find_discriminator, Certificate, Mode, Verdict, Witness};
use pmm_core::counting::{count_zero_queries_formula, factorial};
use pmm_core::decoder::{DecodeOutcome, DecodeTranscript, FeedbackVector};
use pmm_core::querygen::QuerySet;
use pmm_core::{Cutoffs, PartialColouring, Permutation};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {reason}")]
pub struct ParseError {
    pub line: usize,
    pub reason: String,
}

#[derive(Debug, Error)]
pub enum FormatError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Core(#[from] pmm_core::Error),
}

fn parse_err(line: usize, reason: impl Into<String>) -> ParseError {
    ParseError {
        line,
        reason: reason.into(),
    }
}

/// Parses space-separated colours into a permutation of size `n`.
pub fn parse_permutation(text: &str, n: Option<usize>) -> Result<Permutation, String> {
    let values = text
        .split_ascii_whitespace()
        .map(|t| t.parse::<u32>().map_err(|_| format!("not a colour: {t:?}")))
        .collect::<Result<Vec<_>, _>>()?;
    if let Some(n) = n {
        if values.len() != n {
            return Err(format!("expected {n} colours, found {}", values.len()));
        }
    }
    Permutation::new(values).map_err(|e| e.to_string())
}

struct Header {
    fields: Vec<(String, String)>,
}

impl Header {
    fn parse(line: &str, magic: &str, lineno: usize) -> Result<Self, ParseError> {
        let mut tokens = line.split(' ');
        if tokens.next() != Some(magic) || tokens.next() != Some("v1") {
            return Err(parse_err(lineno, format!("bad header: expected `{magic} v1 ...`")));
        }
        let mut fields = Vec::new();
        for token in tokens {
            let Some((k, v)) = token.split_once('=') else {
                return Err(parse_err(lineno, format!("bad header field {token:?}")));
            };
            if fields.iter().any(|(key, _)| key == k) {
                return Err(parse_err(lineno, format!("duplicate header field {k:?}")));
            }
            fields.push((k.to_string(), v.to_string()));
        }
        Ok(Self { fields })
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.fields
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    fn number<T: std::str::FromStr>(&self, key: &str, lineno: usize) -> Result<T, ParseError> {
        let raw = self
            .get(key)
            .ok_or_else(|| parse_err(lineno, format!("bad header: missing {key}=")))?;
        raw.parse()
            .map_err(|_| parse_err(lineno, format!("bad header: {key}={raw:?}")))
    }

    fn only(&self, allowed: &[&str], lineno: usize) -> Result<(), ParseError> {
        match self.fields.iter().find(|(k, _)| !allowed.contains(&k.as_str())) {
            Some((k, _)) => Err(parse_err(lineno, format!("bad header: unknown field {k:?}"))),
            None => Ok(()),
        }
    }
}

fn read_lines(source: impl BufRead) -> Result<Vec<String>, FormatError> {
    Ok(source.lines().collect::<Result<Vec<_>, _>>()?)
}

pub fn write_query_set(q: &QuerySet, mut sink: impl Write) -> Result<(), FormatError> {
    let id = q.generator_id();
    if id.is_empty() || id.chars().any(|c| c.is_ascii_whitespace() || c == '=') {
        return Err(pmm_core::Error::InvalidArgument("generator id must be a non-empty token").into());
    }
    let mut out = format!("PMM v1 n={} count={}", q.n(), q.len());
    if let Some(seed) = q.seed() {
        write!(out, " seed={seed}").unwrap();
    }
    writeln!(out, " gen={id}").unwrap();
    for query in q.queries() {
        writeln!(out, "{query}").unwrap();
    }
    sink.write_all(out.as_bytes())?;
    Ok(())
}

pub fn read_query_set(source: impl BufRead) -> Result<QuerySet, FormatError> {
    let lines = read_lines(source)?;
    let first = lines.first().ok_or_else(|| parse_err(1, "bad header: empty input"))?;
    let header = Header::parse(first, "PMM", 1)?;
    header.only(&["n", "count", "seed", "gen"], 1)?;
    let n: usize = header.number("n", 1)?;
    let count: usize = header.number("count", 1)?;
    if n == 0 {
        return Err(parse_err(1, "bad header: n must be at least 1").into());
    }
    let seed = match header.get("seed") {
        None => None,
        Some(_) => Some(header.number::<u64>("seed", 1)?),
    };
    let gen = header.get("gen").unwrap_or("external").to_string();
    let body = &lines[1..];
    if body.len() < count {
        return Err(parse_err(lines.len() + 1, format!("expected {count} query lines, found {}", body.len())).into());
    }
    let mut queries = Vec::with_capacity(count);
    for (i, line) in body[..count].iter().enumerate() {
        let perm = parse_permutation(line, Some(n)).map_err(|reason| parse_err(i + 2, reason))?;
        queries.push(perm);
    }
    if let Some(extra) = body[count..].iter().position(|l| !l.trim().is_empty()) {
        return Err(parse_err(count + 2 + extra, "unexpected line after the last query").into());
    }
    Ok(QuerySet::new(n, queries, seed, gen)?)
}

pub fn write_feedback(fb: &FeedbackVector, mut sink: impl Write) -> Result<(), FormatError> {
    let counts: Vec<String> = fb.counts().iter().map(u32::to_string).collect();
    let text = format!("PMMFB v1 n={} count={}\n{}\n", fb.n(), fb.len(), counts.join(" "));
    sink.write_all(text.as_bytes())?;
    Ok(())
}

pub fn read_feedback(source: impl BufRead) -> Result<FeedbackVector, FormatError> {
    let lines = read_lines(source)?;
    let first = lines.first().ok_or_else(|| parse_err(1, "bad header: empty input"))?;
    let header = Header::parse(first, "PMMFB", 1)?;
    header.only(&["n", "count"], 1)?;
    let n: usize = header.number("n", 1)?;
    let count: usize = header.number("count", 1)?;
    let body = lines.get(1).map(String::as_str).unwrap_or("");
    let counts = body
        .split_ascii_whitespace()
        .map(|t| t.parse::<u32>().map_err(|_| parse_err(2, format!("not a count: {t:?}"))))
        .collect::<Result<Vec<_>, _>>()?;
    if counts.len() != count {
        return Err(parse_err(2, format!("expected {count} counts, found {}", counts.len())).into());
    }
    if let Some(extra) = lines.iter().skip(2).position(|l| !l.trim().is_empty()) {
        return Err(parse_err(extra + 3, "unexpected line after the counts").into());
    }
    FeedbackVector::new(n, counts).map_err(|e| match e {
        pmm_core::Error::MalformedFeedback { index, value } => {
            parse_err(2, format!("count #{} = {value} is impossible for n={n}", index + 1)).into()
        }
        other => other.into(),
    })
}

/// `positions ; v ; c` with space-separated numbers in each group.
pub fn format_triple(t: &TripleInstance) -> String {
    let join = |it: &mut dyn Iterator<Item = String>| it.collect::<Vec<_>>().join(" ");
    format!(
        "{} ; {} ; {}",
        join(&mut t.positions().map(|p| p.to_string())),
        join(&mut t.v().iter().map(|(_, c)| c.to_string())),
        join(&mut t.c().iter().map(|(_, c)| c.to_string())),
    )
}

pub fn parse_triple(n: usize, text: &str) -> Result<TripleInstance, String> {
    let groups: Vec<&str> = text.split(';').collect();
    if groups.len() != 3 {
        return Err("expected `positions ; v ; c`".into());
    }
    let nums = |g: &str| {
        g.split_ascii_whitespace()
            .map(|t| t.parse::<usize>().map_err(|_| format!("not a number: {t:?}")))
            .collect::<Result<Vec<_>, _>>()
    };
    let positions = nums(groups[0])?;
    let v = nums(groups[1])?;
    let c = nums(groups[2])?;
    if v.len() != positions.len() || c.len() != positions.len() {
        return Err("positions, v and c must have the same length".into());
    }
    let col = |vals: &[usize]| {
        PartialColouring::new(n, positions.iter().copied().zip(vals.iter().map(|&x| x as u32)))
            .map_err(|e| e.to_string())
    };
    TripleInstance::new(col(&v)?, col(&c)?).map_err(|e| e.to_string())
}

pub fn read_triples(source: impl BufRead) -> Result<(usize, Vec<TripleInstance>), FormatError> {
    let lines = read_lines(source)?;
    let first = lines.first().ok_or_else(|| parse_err(1, "bad header: empty input"))?;
    let header = Header::parse(first, "PMMTRIPLES", 1)?;
    header.only(&["n"], 1)?;
    let n: usize = header.number("n", 1)?;
    if n == 0 {
        return Err(parse_err(1, "bad header: n must be at least 1").into());
    }
    let mut out = Vec::new();
    for (i, line) in lines.iter().enumerate().skip(1) {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        out.push(parse_triple(n, line).map_err(|reason| parse_err(i + 1, reason))?);
    }
    Ok((n, out))
}

fn fmt_colouring(c: &PartialColouring) -> String {
    c.iter()
        .map(|(p, col)| format!("{p}:{col}"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn fmt_list<T: ToString>(items: impl IntoIterator<Item = T>) -> String {
    items
        .into_iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn approx(r: &BigRational) -> String {
    match r.to_f64() {
        Some(x) => format!("{x:.6e}"),
        None => "nan".into(),
    }
}

/// Human-readable step log.
pub fn format_transcript(tr: &DecodeTranscript) -> String {
    let mut out = String::new();
    for (i, s) in tr.steps.iter().enumerate() {
        writeln!(
            out,
            "step {}: position {} = colour {} (|Q_I| = {})",
            i + 1,
            s.position,
            s.colour,
            s.zero_queries
        )
        .unwrap();
    }
    match &tr.outcome {
        DecodeOutcome::Success(p) => writeln!(out, "result: {p}").unwrap(),
        DecodeOutcome::Stuck { known, remaining } => {
            writeln!(out, "stuck: known {{{}}}", fmt_colouring(known)).unwrap();
            writeln!(out, "stuck: remaining {}", fmt_list(remaining)).unwrap();
        }
    }
    writeln!(out, "work: {}", tr.work).unwrap();
    out
}

/// Flat `key=value` certificate report. Failure witnesses from `decode-all`
/// also carry the undiscriminated triple extracted from the stuck state, with
/// an independent re-check against the query set.
pub fn format_certificate(cert: &Certificate, q: &QuerySet) -> String {
    let mut out = String::new();
    let mut kv = |k: &str, v: String| writeln!(out, "{k}={v}").unwrap();
    kv("level", cert.level.name().into());
    match cert.mode {
        Mode::Exhaustive => kv("mode", "exhaustive".into()),
        Mode::MonteCarlo { trials, seed } => {
            kv("mode", "monte-carlo".into());
            kv("mode.trials", trials.to_string());
            kv("mode.seed", seed.to_string());
        }
    }
    kv("n", cert.n.to_string());
    kv("queries", cert.query_count.to_string());
    match &cert.verdict {
        Verdict::Pass => kv("verdict", "PASS".into()),
        Verdict::Fail(w) => {
            kv("verdict", "FAIL".into());
            match w {
                Witness::CollidingCodewords(a, b) => {
                    kv("witness.kind", "colliding-codewords".into());
                    kv("witness.codeword_a", a.to_string());
                    kv("witness.codeword_b", b.to_string());
                }
                Witness::Undecodable {
                    codeword,
                    transcript,
                } => {
                    kv("witness.kind", "undecodable".into());
                    kv("witness.codeword", codeword.to_string());
                    if let DecodeOutcome::Stuck { known, remaining } = &transcript.outcome {
                        kv("witness.known", fmt_colouring(known));
                        kv("witness.remaining", fmt_list(remaining));
                    }
                    if let Ok(Some(t)) = stuck_witness_triple(q, codeword, transcript) {
                        kv("witness.triple", format_triple(&t));
                        let (found, _) = find_discriminator(q, &t);
                        kv("witness.triple.undiscriminated", found.is_none().to_string());
                    }
                }
                Witness::Triple(t) => {
                    kv("witness.kind", "triple".into());
                    kv("witness.triple", format_triple(t));
                }
            }
        }
    }
    kv("work.instances", cert.work.instances.to_string());
    kv("work.queries_scanned", cert.work.queries_scanned.to_string());
    out
}

/// Appends a set-size report under `prefix`.
pub fn format_set_sizes(prefix: &str, r: &SetSizeReport, out: &mut String) {
    let mut kv = |k: &str, v: String| writeln!(out, "{prefix}.{k}={v}").unwrap();
    kv("n", r.n.to_string());
    kv("m", r.m.to_string());
    kv("positions", fmt_list(&r.positions));
    kv("s_sizes", fmt_list(&r.per_position));
    kv(
        "pair_sizes",
        fmt_list(r.pairwise.iter().map(|p| format!("{}-{}:{}", p.i, p.j, p.size))),
    );
    kv("union", r.union.to_string());
    kv("zero_queries", r.zero_queries.to_string());
    kv("bonferroni_lower", r.bonferroni_lower.to_string());
    kv("bonferroni_holds", r.bonferroni_holds().to_string());
}

/// The `bounds-report` body. Inequalities that hold at every `n` are
/// evaluated; the large-`n` quantities are printed under `*.reported.*` keys
/// and carry no verdict.
pub fn format_bounds_report(
    n: usize,
    m: Option<usize>,
    triples: &[TripleInstance],
    cutoffs: &Cutoffs,
) -> Result<String, pmm_core::Error> {
    let mut out = String::new();
    let mut kv = |k: String, v: String| writeln!(out, "{k}={v}").unwrap();
    kv("n".into(), n.to_string());
    if n >= 2 {
        kv("required_query_count".into(), required_query_count(n)?.to_string());
        let p = failure_probability_bound(n)?;
        kv("failure_probability_bound".into(), p.to_string());
        kv("failure_probability_bound.approx".into(), approx(&p));
        kv(
            "failure_probability_bound.below_one".into(),
            (p < BigRational::from_integer(1.into())).to_string(),
        );
        for k in 1..=n {
            let b = per_triple_failure_bound(n, k)?;
            kv(format!("per_triple.k{k}.bound"), b.bound.to_string());
            kv(format!("per_triple.k{k}.verified"), b.verified.to_string());
        }
    }
    let ms: Vec<usize> = match m {
        Some(m) => vec![m],
        None => (0..=n).collect(),
    };
    let nf = factorial(n);
    for m in ms {
        let a = count_zero_queries_formula(n, m)?;
        kv(format!("claim_a.m{m}.count"), a.to_string());
        kv(format!("claim_a.m{m}.holds"), check_claim_a(n, m)?.to_string());
        kv(
            format!("claim_a.m{m}.third_order_lower"),
            claim_a_third_order_lower(n, m)?.to_string(),
        );
        let ratio = BigRational::new(BigInt::from(a), BigInt::from(nf.clone()));
        kv(format!("claim_a.m{m}.reported.fraction_of_factorial"), approx(&ratio));
    }
    for (idx, t) in triples.iter().enumerate() {
        let prefix = format!("triple{}", idx + 1);
        if t.n() != n {
            return Err(pmm_core::Error::SizeMismatch {
                left: n,
                right: t.n(),
            });
        }
        kv(format!("{prefix}.spec"), format_triple(t));
        let report = enumerate_set_sizes(t, cutoffs)?;
        let mut block = String::new();
        format_set_sizes(&prefix, &report, &mut block);
        for line in block.lines() {
            let (k, v) = line.split_once('=').expect("key=value");
            kv(k.to_string(), v.to_string());
        }
        if n >= 2 {
            let detail = claim_sizes_detail(t, &report)?;
            kv(format!("{prefix}.claim_sizes.singles"), detail.singles.to_string());
            kv(
                format!("{prefix}.claim_sizes.pairs"),
                detail.pairs.map_or("n/a".to_string(), |b| b.to_string()),
            );
        }
        let fraction = BigRational::new(BigInt::from(report.union), BigInt::from(nf.clone()));
        let target = discrimination_target(n, t.len());
        kv(format!("{prefix}.fraction"), fraction.to_string());
        kv(format!("{prefix}.fraction.approx"), approx(&fraction));
        kv(format!("{prefix}.reported.target_fraction"), target.to_string());
        kv(
            format!("{prefix}.reported.meets_target"),
            (fraction >= target).to_string(),
        );
        // Asymptotic shapes: |S_i| against A/n, |S_i ∩ S_j| against A/(n(n−1)).
        let a = BigRational::from_integer(BigInt::from(count_zero_queries_formula(n, t.len())?));
        if n >= 2 && a > BigRational::from_integer(0.into()) {
            let per = a.clone() / BigRational::from_integer(BigInt::from(n));
            let pair = a / BigRational::from_integer(BigInt::from(n * (n - 1)));
            let ratios = |sizes: Vec<u64>, base: &BigRational| {
                fmt_list(sizes.into_iter().map(|s| {
                    approx(&(BigRational::from_integer(BigInt::from(s)) / base.clone()))
                }))
            };
            kv(
                format!("{prefix}.reported.s_over_a_per_n"),
                ratios(report.per_position.clone(), &per),
            );
            kv(
                format!("{prefix}.reported.pair_over_a_per_n2"),
                ratios(report.pairwise.iter().map(|p| p.size).collect(), &pair),
            );
        }
    }
    Ok(out)
}

//! End-to-end runs of the `pmm` command line.

use std::path::Path;
use std::process::Command;

use pmm::cli::{run_with, EXIT_CUTOFF, EXIT_FAIL, EXIT_OK, EXIT_STUCK, EXIT_USAGE};

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn pmm(args: &[&str]) -> Run {
    pmm_env(args, None)
}

fn pmm_env(args: &[&str], cutoff: Option<&str>) -> Run {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("pmm").chain(args.iter().copied());
    let code = run_with(argv, cutoff, &mut out, &mut err);
    Run {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn generate_then_certify_decode_all() {
    let dir = tempfile::tempdir().unwrap();
    let q = dir.path().join("q.txt");
    let r = pmm(&["gen", "--n", "4", "--count", "auto", "--seed", "7", "-o", path(&q)]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    let text = std::fs::read_to_string(&q).unwrap();
    assert_eq!(text.lines().next(), Some("PMM v1 n=4 count=156 seed=7 gen=pcg64"));
    assert_eq!(text.lines().count(), 157);

    let r = pmm(&["certify", "--queries", path(&q), "--level", "decode-all", "--exhaustive"]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    assert!(r.stdout.contains("verdict=PASS"), "{}", r.stdout);
    assert!(r.stderr.is_empty());
}

#[test]
fn all_levels_report_the_hierarchy() {
    let dir = tempfile::tempdir().unwrap();
    let q = dir.path().join("q.txt");
    assert_eq!(pmm(&["gen", "--n", "4", "--seed", "7", "-o", path(&q)]).code, EXIT_OK);
    let r = pmm(&["certify", "--queries", path(&q), "--level", "all", "--exhaustive"]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    assert_eq!(r.stdout.matches("verdict=PASS").count(), 3);
    assert!(r.stdout.contains("hierarchy=ok"));
}

#[test]
fn answer_and_decode_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let q = dir.path().join("q.txt");
    let fb = dir.path().join("fb.txt");
    assert_eq!(pmm(&["gen", "--n", "6", "--seed", "3", "-o", path(&q)]).code, EXIT_OK);
    let r = pmm(&["answer", "--queries", path(&q), "--codeword", "3 6 1 5 2 4", "-o", path(&fb)]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    let r = pmm(&["decode", "--queries", path(&q), "--feedback", path(&fb)]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    assert!(r.stdout.contains("result: 3 6 1 5 2 4"), "{}", r.stdout);
}

#[test]
fn stuck_decode_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let q = dir.path().join("q.txt");
    let fb = dir.path().join("fb.txt");
    std::fs::write(&q, "PMM v1 n=3 count=1 gen=external\n1 2 3\n").unwrap();
    std::fs::write(&fb, "PMMFB v1 n=3 count=1\n0\n").unwrap();
    let r = pmm(&["decode", "--queries", path(&q), "--feedback", path(&fb)]);
    assert_eq!(r.code, EXIT_STUCK);
    assert!(r.stdout.contains("stuck:"), "{}", r.stdout);
    assert!(r.stderr.starts_with("error[Stuck]:"));
}

#[test]
fn failing_certificate_exits_three_with_witness() {
    let dir = tempfile::tempdir().unwrap();
    let q = dir.path().join("q.txt");
    std::fs::write(&q, "PMM v1 n=3 count=1\n1 2 3\n").unwrap();
    for level in ["unique-feedback", "decode-all", "lemma-triples"] {
        let r = pmm(&["certify", "--queries", path(&q), "--level", level, "--exhaustive"]);
        assert_eq!(r.code, EXIT_FAIL, "{level}: {}", r.stderr);
        assert!(r.stdout.contains("verdict=FAIL"));
        assert!(r.stdout.contains("witness.kind="));
    }
    let r = pmm(&["certify", "--queries", path(&q), "--level", "decode-all", "--mc", "50", "--seed", "1"]);
    assert_eq!(r.code, EXIT_FAIL, "{}", r.stderr);
}

#[test]
fn mismatched_n_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let q = dir.path().join("q.txt");
    let fb = dir.path().join("fb.txt");
    assert_eq!(pmm(&["gen", "--n", "4", "--count", "5", "--seed", "1", "-o", path(&q)]).code, EXIT_OK);
    let r = pmm(&["answer", "--queries", path(&q), "--codeword", "1 2 3"]);
    assert_eq!(r.code, EXIT_USAGE);
    assert!(r.stderr.starts_with("error[SizeMismatch]"), "{}", r.stderr);

    std::fs::write(&fb, "PMMFB v1 n=5 count=5\n0 0 0 0 0\n").unwrap();
    let r = pmm(&["decode", "--queries", path(&q), "--feedback", path(&fb)]);
    assert_eq!(r.code, EXIT_USAGE);
    assert!(r.stderr.starts_with("error[SizeMismatch]"), "{}", r.stderr);
}

#[test]
fn malformed_inputs_exit_one_with_one_error_line() {
    let dir = tempfile::tempdir().unwrap();
    let q = dir.path().join("q.txt");
    std::fs::write(&q, "PMM v1 n=3 count=2\n1 2 3\n1 1 3\n").unwrap();
    let r = pmm(&["certify", "--queries", path(&q), "--level", "decode-all", "--exhaustive"]);
    assert_eq!(r.code, EXIT_USAGE);
    assert_eq!(r.stderr.lines().count(), 1);
    assert!(r.stderr.contains("line 3"), "{}", r.stderr);

    let r = pmm(&["answer", "--queries", path(&q), "--codeword", "1 2 2"]);
    assert_eq!(r.code, EXIT_USAGE);

    let r = pmm(&["gen", "--n", "4"]);
    assert_eq!(r.code, EXIT_USAGE);
    assert!(r.stderr.starts_with("error[Usage]"));

    let r = pmm(&["certify", "--queries", "/nonexistent/q", "--level", "decode-all", "--exhaustive"]);
    assert_eq!(r.code, EXIT_USAGE);

    let r = pmm(&["--help"]);
    assert_eq!(r.code, EXIT_OK);
    assert!(r.stdout.contains("certify"));
}

#[test]
fn cutoff_exceeded_exits_four() {
    let dir = tempfile::tempdir().unwrap();
    let q = dir.path().join("q.txt");
    assert_eq!(pmm(&["gen", "--n", "9", "--count", "10", "--seed", "1", "-o", path(&q)]).code, EXIT_OK);
    let r = pmm(&["certify", "--queries", path(&q), "--level", "decode-all", "--exhaustive"]);
    assert_eq!(r.code, EXIT_CUTOFF);
    assert!(r.stderr.starts_with("error[CutoffExceeded]"), "{}", r.stderr);

    // Lowering the cutoff through the environment applies to smaller n too.
    assert_eq!(pmm(&["gen", "--n", "5", "--count", "10", "--seed", "1", "-o", path(&q)]).code, EXIT_OK);
    let r = pmm_env(&["certify", "--queries", path(&q), "--level", "decode-all", "--exhaustive"], Some("4"));
    assert_eq!(r.code, EXIT_CUTOFF);
}

#[test]
fn bounds_report_keys() {
    let dir = tempfile::tempdir().unwrap();
    let t = dir.path().join("t.txt");
    std::fs::write(&t, "PMMTRIPLES v1 n=6\n# one triple\n1 2 ; 2 3 ; 4 5\n").unwrap();
    let r = pmm(&["bounds-report", "--n", "6", "--m", "2", "--triples", path(&t)]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    assert!(r.stdout.contains("required_query_count=302"), "{}", r.stdout);
    assert!(r.stdout.contains("triple1.claim_sizes.singles=true"), "{}", r.stdout);
}

#[test]
fn bench_writes_csv() {
    let r = pmm(&["bench", "--n-list", "5,6", "--c-list", "1,7/2", "--trials", "4", "--seed", "2"]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    let lines: Vec<&str> = r.stdout.lines().collect();
    assert_eq!(lines[0], "n,c,query_count,trials,success_rate,wall_ms");
    assert_eq!(lines.len(), 5);
    assert!(lines[2].starts_with("5,7/2,"));
}

#[test]
fn binary_uses_process_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_pmm");
    let out = Command::new(bin)
        .args(["gen", "--n", "3", "--count", "2", "--seed", "5"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("PMM v1 n=3 count=2 seed=5 gen=pcg64\n"));
    let out = Command::new(bin).arg("frobnicate").output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

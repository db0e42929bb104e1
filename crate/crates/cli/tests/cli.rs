use std::cell::Cell;
use std::path::PathBuf;
use std::process::Command;

use incmat_cli::oeis::{fetch_bfile, BFileSequence, OeisError, Transport};
use incmat_cli::{run_with_transport, EXIT_FAILURE, EXIT_OK, EXIT_USAGE};

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests")
        .join("fixtures")
}

/// Serves a fixed body and counts requests.
struct FakeTransport {
    body: Option<String>,
    calls: Cell<usize>,
}

impl FakeTransport {
    fn serving(body: &str) -> Self {
        FakeTransport {
            body: Some(body.to_string()),
            calls: Cell::new(0),
        }
    }

    fn unreachable() -> Self {
        FakeTransport {
            body: None,
            calls: Cell::new(0),
        }
    }
}

impl Transport for FakeTransport {
    fn get(&self, url: &str) -> Result<String, String> {
        self.calls.set(self.calls.get() + 1);
        assert!(url.starts_with("https://oeis.org/A"));
        self.body
            .clone()
            .ok_or_else(|| "network unreachable".to_string())
    }
}

fn run(args: &[&str]) -> (i32, String, String) {
    run_using(args, &FakeTransport::unreachable())
}

fn run_using(args: &[&str], transport: &dyn Transport) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("incmat").chain(args.iter().copied());
    let code = run_with_transport(argv, &mut out, &mut err, transport);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

#[test]
fn count_f1111_at_ten() {
    assert_eq!(
        run(&["count", "--class", "F1111", "--n", "10"]).1,
        "2324081728\n"
    );
    for route in ["mobius", "stirling"] {
        let (code, out, _) = run(&["count", "--class", "F1111", "--n", "10", "--route", route]);
        assert_eq!((code, out.as_str()), (EXIT_OK, "2324081728\n"));
    }
    let (code, out, _) = run(&[
        "count", "--class", "F1111", "--n", "10", "--route", "series",
    ]);
    assert_eq!(code, EXIT_OK);
    assert!(out.starts_with("2324081728 "), "{out}");
}

#[test]
fn count_census_classes() {
    assert_eq!(run(&["count", "--class", "F0101", "--n", "5"]).1, "34\n");
    assert_eq!(run(&["count", "--class", "S10", "--n", "4"]).1, "16\n");
    assert_eq!(run(&["count", "--class", "Phi00", "--n", "6"]).1, "11\n");
    assert_eq!(
        run(&["count", "--class", "F0011", "--n", "9"]).1,
        "210710\n"
    );
    let (code, _, err) = run(&["count", "--class", "F0000", "--n", "9"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("no closed form"));
}

#[test]
fn usage_errors_list_choices() {
    let (code, _, err) = run(&["count", "--class", "G1111", "--n", "3"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("F1111") && err.contains("Phi11"), "{err}");
    let (code, _, err) = run(&["count", "--class", "F1111", "--n", "3", "--route", "magic"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("mobius"), "{err}");
    let (code, _, err) = run(&["sample", "--kind", "gibbs", "--n", "3"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(
        err.contains("preorder") && err.contains("rejection"),
        "{err}"
    );
    let (code, _, _) = run(&["count", "--class", "F0101", "--n", "3", "--route", "mobius"]);
    assert_eq!(code, EXIT_USAGE);
    assert_eq!(run(&["frobnicate"]).0, EXIT_USAGE);
    assert_eq!(run(&["--help"]).0, EXIT_OK);
}

#[test]
fn table_two_rows_per_class() {
    let (code, out, _) = run(&["table", "--max-n", "2"]);
    assert_eq!(code, EXIT_OK);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "class,n,value,provenance");
    assert_eq!(lines.len(), 1 + 14 * 2);
    assert!(lines.contains(&"F0101,2,3,brute-force"));
    assert!(lines.contains(&"F1111,2,4,formula"));
    let classes: std::collections::BTreeSet<&str> = lines[1..]
        .iter()
        .map(|l| l.split(',').next().unwrap())
        .collect();
    assert_eq!(classes.len(), 14);
}

#[test]
fn table_is_byte_stable() {
    let a = run(&["table", "--max-n", "5", "--with-symmetric"]).1;
    let b = run(&["table", "--max-n", "5", "--with-symmetric"]).1;
    assert_eq!(a, b);
    assert!(a.contains("S11,5,74,formula"));
    assert!(a.contains("S00,5,3,brute-force"));
}

#[test]
fn table_oracle_and_json() {
    let (code, out, _) = run(&["table", "--max-n", "9", "--oracle"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("F1111,7,361792,formula+brute-force"));
    assert!(out.contains("F0101,7,211,brute-force"));
    assert!(out.contains("F1111,9,111969552,formula\n"));
    assert!(!out.contains("F0101,8,"));
    let (code, out, _) = run(&["table", "--max-n", "3", "--format", "json"]);
    assert_eq!(code, EXIT_OK);
    let rows: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 14 * 3);
    assert_eq!(rows[0]["class"], "F0000");
    assert_eq!(rows[0]["value"], "1");
}

#[test]
fn sample_outputs() {
    let (code, out, _) = run(&["sample", "--kind", "matrix", "--n", "1", "--seed", "7"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out, "{\"rows\":1,\"cols\":1,\"ones\":[[1,1]]}\n");
    let args = [
        "sample",
        "--kind",
        "symmetric",
        "--n",
        "5",
        "--count",
        "4",
        "--seed",
        "3",
    ];
    let (_, a, _) = run(&args);
    let (_, b, _) = run(&args);
    assert_eq!(a, b);
    assert_eq!(a.lines().count(), 4);
    for line in a.lines() {
        let m: incmat::ZeroOneMatrix = serde_json::from_str(line).unwrap();
        assert!(m.is_symmetric());
    }
    let (_, p, _) = run(&["sample", "--kind", "preorder", "--n", "1"]);
    assert_eq!(p, "{\"blocks\":[[1]]}\n");
    let (_, t, _) = run(&[
        "sample",
        "--kind",
        "rejection",
        "--n",
        "1",
        "--format",
        "text",
    ]);
    assert_eq!(t, "attempts: 1\n1\n");
}

#[test]
fn verify_exit_codes() {
    let (code, out, _) = run(&["verify", "--max-n", "5"]);
    assert_eq!(code, EXIT_OK, "{out}");
    assert!(out.ends_with("ALL PASSED\n"));
    let (code, out, _) = run(&["verify", "--max-n", "3", "--format", "json"]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(run(&["verify", "--max-n", "0"]).0, EXIT_USAGE);
}

#[test]
fn asym_csv() {
    let (code, out, _) = run(&["asym", "--class", "F1111", "--max-n", "12"]);
    assert_eq!(code, EXIT_OK);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "n,exact,asymptotic,ratio");
    assert_eq!(lines.len(), 13);
    let ten: Vec<&str> = lines[10].split(',').collect();
    assert_eq!(ten[1], "2324081728");
    let ratio: f64 = ten[3].parse().unwrap();
    assert!((0.96..=0.99).contains(&ratio));
    assert_eq!(
        run(&["asym", "--class", "F0000", "--max-n", "3"]).0,
        EXIT_USAGE
    );
}

#[test]
fn oeis_against_fixtures() {
    let dir = fixtures();
    let dir = dir.to_str().unwrap();
    for id in ["A101370", "A049311"] {
        let (code, out, err) = run(&["oeis", "--id", id, "--offline", "--cache", dir]);
        assert_eq!(code, EXIT_OK, "{out}{err}");
        assert!(out.starts_with("PASS"), "{out}");
        assert!(out.contains("0 mismatches"), "{out}");
    }
    let (code, _, _) = run(&["oeis", "--id", "A000045", "--offline", "--cache", dir]);
    assert_eq!(code, EXIT_USAGE);
    let (code, _, _) = run(&["oeis", "--id", "X1", "--offline"]);
    assert_eq!(code, EXIT_USAGE);
}

#[test]
fn oeis_download_then_offline_replay() {
    let cache = tempfile::tempdir().unwrap();
    let body = std::fs::read_to_string(fixtures().join("b101370.txt")).unwrap();
    let net = FakeTransport::serving(&body);
    let online = fetch_bfile("A101370", cache.path(), false, &net).unwrap();
    assert_eq!(net.calls.get(), 1);
    assert!(online
        .entries()
        .iter()
        .any(|(i, v)| *i == 3 && v == &24u32.into()));
    let none = FakeTransport::unreachable();
    let replay = fetch_bfile("A101370", cache.path(), true, &none).unwrap();
    assert_eq!(none.calls.get(), 0);
    assert_eq!(online, replay);

    let dir = cache.path().to_str().unwrap();
    let (code, out, _) = run_using(
        &["oeis", "--id", "A101370", "--cache", dir, "--max-n", "10"],
        &none,
    );
    assert_eq!(code, EXIT_OK, "{out}");
    assert!(out.contains("n = 1..10"), "{out}");
}

#[test]
fn oeis_failures() {
    let cache = tempfile::tempdir().unwrap();
    let none = FakeTransport::unreachable();
    assert!(matches!(
        fetch_bfile("A101370", cache.path(), false, &none),
        Err(OeisError::Retrieval { .. })
    ));
    assert!(matches!(
        fetch_bfile("A101370", cache.path(), true, &none),
        Err(OeisError::Retrieval { .. })
    ));
    let dir = cache.path().to_str().unwrap();
    assert_eq!(
        run(&["oeis", "--id", "A101370", "--offline", "--cache", dir]).0,
        EXIT_FAILURE
    );

    let text = std::fs::read_to_string(fixtures().join("malformed.txt")).unwrap();
    assert!(matches!(
        BFileSequence::parse("A101370", &text),
        Err(OeisError::Parse { line: 1, .. })
    ));

    // A b-file that disagrees after alignment is a verification failure.
    let wrong = FakeTransport::serving("0 1\n1 1\n2 4\n3 24\n4 197\n");
    let (code, out, _) = run_using(&["oeis", "--id", "A101370", "--cache", dir], &wrong);
    assert_eq!(code, EXIT_FAILURE);
    assert!(out.contains("n=4: local 196 remote 197"), "{out}");
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_incmat");
    let ok = Command::new(bin)
        .args(["count", "--class", "F1111", "--n", "10"])
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&ok.stdout), "2324081728\n");
    let bad = Command::new(bin)
        .args(["count", "--class", "nope"])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

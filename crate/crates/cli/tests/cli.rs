use std::io::Write;
use std::process::{Command, Output};

use netdoe::{Design, SearchReport};

fn netdoe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_netdoe"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn report(args: &[&str]) -> (SearchReport, String) {
    let out = netdoe(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    (serde_json::from_str(&text).unwrap(), text)
}

#[test]
fn first_example_json() {
    let (r, text) = report(&["search", "--example", "1", "-m", "2", "--format", "json"]);
    assert_eq!(r.num_eval, 236);
    assert_eq!(r.num_considered, 512);
    assert!(!r.partial);
    // parse and re-serialize: byte-identical
    assert_eq!(r.to_json() + "\n", text);
    let fields: Vec<String> = serde_json::from_str::<serde_json::Value>(&text)
        .unwrap()
        .as_object()
        .unwrap()
        .keys()
        .cloned()
        .collect();
    assert_eq!(fields.len(), 10);
    assert!(fields.iter().any(|f| f == "num_skipped_noncanonical"));
}

fn best(args: &[&str]) -> Vec<u8> {
    report(args).0.best_design.map(Design::into_inner).unwrap()
}

#[test]
fn complete_blocks_and_latin_square() {
    let x = best(&["search", "--blocks", "3,3,3", "-m", "3", "--format", "json"]);
    for block in x.chunks(3) {
        let mut b = block.to_vec();
        b.sort_unstable();
        assert_eq!(b, [0, 1, 2]);
    }
    let x = best(&["search", "--row-column", "3x3", "-m", "3", "--format", "json"]);
    for i in 0..3 {
        let mut row: Vec<u8> = (0..3).map(|c| x[i * 3 + c]).collect();
        let mut col: Vec<u8> = (0..3).map(|r| x[r * 3 + i]).collect();
        row.sort_unstable();
        col.sort_unstable();
        assert_eq!((row, col), (vec![0, 1, 2], vec![0, 1, 2]));
    }
}

#[test]
fn group_sizes() {
    let size = |args: &[&str]| {
        let out = netdoe(args);
        assert!(out.status.success());
        stdout(&out)
    };
    assert_eq!(size(&["autos", "--example", "1"]), "automorphisms: 8\n");
    assert_eq!(
        size(&["autos", "--blocks", "3,3,3", "-m", "3"]),
        "automorphisms: 1296\n"
    );
    assert!(size(&["autos", "--row-column", "4x4", "--format", "json"]).contains("\"size\": 1152"));

    let mut file = tempfile::NamedTempFile::new().unwrap();
    writeln!(file, "n=1 directed=0").unwrap();
    let path = file.path().to_str().unwrap();
    assert_eq!(size(&["autos", "--network", path]), "automorphisms: 1\n");

    let listed = size(&["autos", "--example", "5", "--list"]);
    assert_eq!(listed.lines().count(), 3);
}

#[test]
fn orbit_count() {
    let out = netdoe(&["orbits", "--example", "1", "-m", "2"]);
    assert_eq!(stdout(&out), "orbits: 360\n");
}

#[test]
fn invalid_input_exits_with_2() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    writeln!(file, "1-2, 2-x").unwrap();
    let path = file.path().to_str().unwrap();
    let out = netdoe(&["search", "--network", path, "--n", "3", "-m", "2"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 1, column 6") && err.contains("`2-x`"), "{err}");

    let cases: [&[&str]; 4] = [
        &["search", "--network", "/nonexistent/net.edges", "--n", "3", "-m", "2"],
        &["search", "-m", "2"],
        &["search", "--example", "1", "-m", "1"],
        &["search", "--example", "9", "-m", "2"],
    ];
    for args in cases {
        assert_eq!(netdoe(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn budget_exits_with_3_and_prints_the_partial_report() {
    let out = netdoe(&[
        "search",
        "--example",
        "3",
        "-m",
        "2",
        "--max-designs",
        "10",
        "--format",
        "csv",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let text = stdout(&out);
    let row = text.lines().nth(1).unwrap();
    assert!(row.ends_with(",true"), "{row}");
}

#[test]
fn identical_requests_give_identical_reports() {
    let run = |algorithm: &str, workers: &str| {
        report(&[
            "search",
            "--example",
            "4",
            "-m",
            "3",
            "--algorithm",
            algorithm,
            "--restarts",
            "20",
            "--seed",
            "5",
            "--workers",
            workers,
            "--format",
            "json",
        ])
        .0
        .without_timing()
        .to_json()
    };
    for algorithm in ["exhaustive", "cd"] {
        assert_eq!(run(algorithm, "1"), run(algorithm, "4"), "{algorithm}");
    }
}

#[test]
fn crossover_and_reference() {
    let (r, _) = report(&[
        "search",
        "--crossover",
        "2x3",
        "-m",
        "2",
        "--reference",
        "0.5",
        "--format",
        "json",
    ]);
    let value = r.best_value.unwrap();
    assert_eq!(r.efficiency, Some(0.5 / value));
}

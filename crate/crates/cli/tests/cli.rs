#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn statmode(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_statmode"))
        .args(args)
        .env_remove("STATMODE_OUTPUT_DIR")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write_archive(dir: &Path) {
    for r in common::archive(&common::planted_plan()) {
        fs::write(dir.join(format!("{}_{}.txt", r.date, r.id)), &r.text).unwrap();
    }
}

#[test]
fn fisher_and_laplace_print_published_values() {
    let o = statmode(&["test", "fisher", "--N", "85", "--K", "17", "--n", "17", "--x", "12"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("2.08e-7"), "{}", stdout(&o));

    let o = statmode(&["test", "laplace", "--successes", "251527", "--failures", "241945"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("1.15e-42"), "{}", stdout(&o));

    let o = statmode(&["test", "arbuthnot", "--periods", "82"]);
    assert!(stdout(&o).contains("2.07e-25"));
}

#[test]
fn domain_error_exits_1_with_empty_stdout() {
    let o = statmode(&["test", "fisher", "--N", "85", "--K", "90", "--n", "17", "--x", "12"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(o.stdout.is_empty());
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("statmode:"));
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(statmode(&["test", "fisher", "--bogus"]).status.code(), Some(1));
    assert_eq!(statmode(&["nonsense"]).status.code(), Some(1));
    assert_eq!(statmode(&["test", "laplace"]).status.code(), Some(1));
}

#[test]
fn numeric_failure_exits_3() {
    let o = statmode(&["test", "student", "--xs", "2,2,2", "--ys", "2,2"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(o.stdout.is_empty());
}

#[test]
fn data_error_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "code,name,x\n01,Ain,12\n02,Aisne,not-a-number\n").unwrap();
    let o = statmode(&["series", "rank", "--input", bad.to_str().unwrap(), "--variable", "x"]);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));

    let missing = dir.path().join("missing.csv");
    let o = statmode(&["series", "rank", "--input", missing.to_str().unwrap(), "--variable", "x"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn help_lists_flags_and_defaults() {
    let cases: &[(&[&str], &[&str])] = &[
        (&["test", "laplace"], &["--successes", "--threshold", "[default: 0.5]"]),
        (&["test", "laplace2"], &["--method", "[default: exact]"]),
        (&["test", "fisher"], &["--N", "--K", "--tail", "[default: ge]"]),
        (&["test", "student"], &["--welch", "[default: off]"]),
        (&["test", "cournot"], &["--p0"]),
        (&["test", "arbuthnot"], &["--periods"]),
        (&["test", "pearson"], &["--xs", "--ys"]),
        (&["series", "rank"], &["--exclude", "--decimal-comma", "[default: floor(N/5)]"]),
        (&["series", "intersect"], &["--first-direction", "[default: top]"]),
        (&["series", "classes"], &["--ascending"]),
        (&["series", "bigeon-correct"], &["--schooling", "--life"]),
        (&["corpus", "scan"], &["--archive", "--fold-diacritics", "[default: doc-freq]"]),
        (&["corpus", "compare"], &["--period1", "--period2"]),
        (&["corpus", "correlate"], &["--pattern-a", "--pattern-b"]),
        (&["corpus", "cooccur"], &["--alpha", "[default: 0.05]"]),
        (&["corpus", "chart"], &["--mark", "--mark-cooccurrence", "[default: chart.svg]"]),
        (&["replicate"], &["--format"]),
    ];
    for (cmd, needles) in cases {
        let mut args = cmd.to_vec();
        args.push("--help");
        let o = statmode(&args);
        assert_eq!(o.status.code(), Some(0), "{cmd:?}");
        let text = stdout(&o);
        for n in *needles {
            assert!(text.contains(n), "{cmd:?} help lacks {n}:\n{text}");
        }
    }
    assert_eq!(statmode(&["--version"]).status.code(), Some(0));
}

#[test]
fn json_round_trip_is_exact() {
    let o = statmode(&[
        "--format", "json", "test", "laplace2", "--s1", "60", "--f1", "40", "--s2", "40", "--f2", "60",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let parsed: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let direct = statmode_core::inference::laplace_two_sample(60, 40, 40, 60).unwrap();
    assert_eq!(parsed["p_value"].as_f64().unwrap().to_bits(), direct.p_value.to_bits());
    assert_eq!(parsed["statistic"].as_f64().unwrap().to_bits(), direct.statistic.to_bits());
    assert_eq!(parsed["log_p"].as_f64().unwrap().to_bits(), direct.log_p.ln().to_bits());
    assert_eq!(parsed, serde_json::to_value(&direct).unwrap());
}

#[test]
fn corpus_commands_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let archive = dir.path().join("archive");
    fs::create_dir(&archive).unwrap();
    write_archive(&archive);
    let a = archive.to_str().unwrap();

    let scan = ["corpus", "scan", "--archive", a, "--pattern", common::PATTERN_A];
    let first = statmode(&scan);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, statmode(&scan).stdout);
    assert!(stdout(&first).contains("1848"));

    let o = statmode(&[
        "--format", "json", "corpus", "compare", "--archive", a, "--pattern", common::PATTERN_A,
        "--period1", "1814-1826", "--period2", "1828-1848",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(r["p_value"].as_f64().unwrap() < 1e-10);

    let o = statmode(&[
        "corpus", "cooccur", "--archive", a, "--pattern-a", common::PATTERN_A, "--pattern-b",
        common::PATTERN_B,
    ]);
    assert_eq!(o.status.code(), Some(0));

    let chart = |name: &str| {
        let out = dir.path().join(name);
        let o = statmode(&[
            "corpus", "chart", "--archive", a, "--pattern", common::PATTERN_A, "--pattern",
            common::PATTERN_B, "--mark", "1827", "--mark-cooccurrence", common::PATTERN_A,
            common::PATTERN_B, "--output", out.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        fs::read(out).unwrap()
    };
    let svg = chart("a.svg");
    assert_eq!(svg, chart("b.svg"));
    assert!(String::from_utf8(svg).unwrap().starts_with("<svg"));
}

#[test]
fn output_dir_variable_resolves_relative_paths() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("guerry.csv");
    fs::write(&input, common::guerry_csv()).unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_statmode"))
        .args([
            "series", "classes", "--input", input.to_str().unwrap(), "--exclude", "20",
            "--variable", "crime_pers", "--output", "classes.csv",
        ])
        .env("STATMODE_OUTPUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let written = fs::read_to_string(dir.path().join("classes.csv")).unwrap();
    assert_eq!(written.lines().count(), 86);
}

#[test]
fn series_commands_run_on_fixtures() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("overlap.csv");
    fs::write(&input, common::engineered_overlap_csv(12)).unwrap();
    let i = input.to_str().unwrap();
    let o = statmode(&[
        "series", "intersect", "--input", i, "--first", "ignorance", "--second", "closed_windows",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("2.08e-7"), "{}", stdout(&o));

    let o = statmode(&["series", "rank", "--input", i, "--variable", "ignorance"]);
    assert_eq!(o.status.code(), Some(0));

    let guerry = dir.path().join("guerry.csv");
    fs::write(&guerry, common::guerry_csv()).unwrap();
    let out = dir.path().join("bigeon.csv");
    let o = statmode(&[
        "series", "bigeon-correct", "--input", guerry.to_str().unwrap(), "--schooling",
        "instruction", "--life", "life", "--output", out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(fs::read_to_string(out).unwrap().lines().next().unwrap().contains("corrected_instruction"));
}

#[test]
fn replicate_reports_every_check() {
    let o = statmode(&["replicate"]);
    let text = stdout(&o);
    assert!(text.contains("n = 21, P = 0.0043"));
    assert!(text.contains("8/9 checks passed"), "{text}");
    assert_eq!(o.status.code(), Some(3));
}

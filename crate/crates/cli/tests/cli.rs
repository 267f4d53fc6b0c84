use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use lostchance::choice::matos_award;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_lostchance"));
    c.env_remove("LOSTCHANCE_OUT_DIR");
    c
}

fn case(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("cases").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

/// (policy, outcome, x, award, observed) from `evaluate --csv`.
fn csv_rows(o: &Output) -> Vec<(String, String, f64, f64, bool)> {
    let text = stdout(o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("policy,outcome,value,x,award,observed"));
    lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (
                f[0].to_string(),
                f[1].to_string(),
                f[3].parse().unwrap(),
                f[4].parse().unwrap(),
                f[5] == "true",
            )
        })
        .collect()
}

#[test]
fn prize_case_high_information_evidence() {
    let p = case("prize-case.json");
    let o = run(&[
        "evaluate",
        p.to_str().unwrap(),
        "--info",
        "h-fi",
        "--connection",
        "e-c",
        "--indemnity",
        "cc-i",
        "--csv",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let awards: Vec<f64> = csv_rows(&o).iter().map(|r| r.3).collect();
    let want = [65.0, 5.0, 0.0, 40.0];
    assert_eq!(awards.len(), 4);
    for (a, w) in awards.iter().zip(want) {
        assert!((a - w).abs() < 1e-9, "{awards:?}");
    }
}

#[test]
fn table_output_uses_six_significant_digits() {
    let p = case("prize-case.json");
    let o = run(&[
        "evaluate",
        p.to_str().unwrap(),
        "--info",
        "m-fi",
        "--connection",
        "e-c",
        "--indemnity",
        "cc-i",
    ]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("36.6667"), "{}", stdout(&o));
    let csv = run(&[
        "evaluate",
        p.to_str().unwrap(),
        "--info",
        "m-fi",
        "--connection",
        "e-c",
        "--indemnity",
        "cc-i",
        "--csv",
    ]);
    assert!(stdout(&csv).contains(&(110.0f64 / 3.0).to_string()));
}

#[test]
fn all_policies_on_misdiagnosis_gives_the_table_grid() {
    let (p0, p1, dv) = (0.95, 0.90, 100_000.0);
    let p = case("medical-malpractice.json");
    let o = run(&["evaluate", p.to_str().unwrap(), "--all-policies", "--csv"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = csv_rows(&o);
    // 3 information levels x (E-C, LD-C, I-C) x 2 indemnities, two outcomes each
    assert_eq!(rows.len(), 36);
    let bad = |policy: &str| {
        rows.iter()
            .find(|r| r.0 == policy && r.1 == "bad")
            .unwrap_or_else(|| panic!("no row for {policy}"))
            .3
    };
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-9 * b.abs().max(1.0);
    for c in ["E-C", "LD-C", "I-C"] {
        for i in ["CC-I", "FM-I"] {
            assert!(close(bad(&format!("L-FI/{c}/{i}")), (p0 - p1) * dv));
        }
    }
    for info in ["M-FI", "H-FI"] {
        assert!(close(
            bad(&format!("{info}/E-C/CC-I")),
            (p0 - p1) / (1.0 - p1) * dv
        ));
        assert!(close(bad(&format!("{info}/I-C/CC-I")), p0 * dv));
    }
    assert!(close(bad("H-FI/E-C/CC-I"), 50_000.0));
}

#[test]
fn choice_case_award_matches_closed_form() {
    let p = case("matos.json");
    let run_with = |presumption: &str| {
        run(&[
            "evaluate",
            p.to_str().unwrap(),
            "--info",
            "h-fi",
            "--connection",
            "i-c",
            "--indemnity",
            "fm-i",
            "--presumption",
            presumption,
            "--csv",
        ])
    };
    let want = matos_award(0.9, 0.5).unwrap();
    for presumption in ["it-cp", "ii-cp"] {
        let o = run_with(presumption);
        assert!(o.status.success(), "{}", stderr(&o));
        let rows = csv_rows(&o);
        let observed: Vec<_> = rows.iter().filter(|r| r.4).collect();
        assert_eq!(observed.len(), 1);
        assert_eq!(observed[0].1, "not answer:keep");
        assert!(
            (observed[0].3 - want).abs() <= 1e-9 * want,
            "{} vs {want}",
            observed[0].3
        );
    }
}

#[test]
fn malformed_marginal_exits_two_with_normalization() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(case("prize-case.json"))
        .unwrap()
        .replacen("0.4", "0.5", 1);
    let path = dir.path().join("bad.json");
    std::fs::write(&path, text).unwrap();
    let o = run(&["evaluate", path.to_str().unwrap(), "--all-policies"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("normalization"), "{}", stderr(&o));
}

#[test]
fn unknown_keys_and_missing_evidence_are_input_errors() {
    let dir = tempfile::tempdir().unwrap();
    let unknown = dir.path().join("unknown.json");
    std::fs::write(
        &unknown,
        r#"{"outcomes":[{"label":"a","value":1}],"marginals":{"counterfactual":[1],"factual":[1]},"policies":[]}"#,
    )
    .unwrap();
    let o = run(&["evaluate", unknown.to_str().unwrap(), "--all-policies"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("unknown field"), "{}", stderr(&o));

    let plain = dir.path().join("plain.json");
    std::fs::write(
        &plain,
        r#"{"outcomes":[{"label":"bad","value":0},{"label":"good","value":10}],
            "marginals":{"counterfactual":[0.2,0.8],"factual":[0.5,0.5]}}"#,
    )
    .unwrap();
    let o = run(&[
        "evaluate",
        plain.to_str().unwrap(),
        "--info",
        "h-fi",
        "--connection",
        "e-c",
        "--indemnity",
        "cc-i",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(
        stderr(&o).contains("needs an evidence coupling"),
        "{}",
        stderr(&o)
    );
    let o = run(&[
        "evaluate",
        plain.to_str().unwrap(),
        "--info",
        "h-fi",
        "--connection",
        "i-c",
        "--indemnity",
        "cc-i",
    ]);
    assert!(o.status.success());
}

#[test]
fn least_divergence_discrepancy_is_a_strict_flag() {
    let p = case("prize-case.json");
    let args = [
        "evaluate",
        p.to_str().unwrap(),
        "--info",
        "h-fi",
        "--connection",
        "ld-c",
        "--indemnity",
        "cc-i",
    ];
    let o = run(&args);
    assert!(o.status.success());
    assert!(stdout(&o).contains("flag: published coupling has squared-value cost 1125"));
    let mut strict = vec!["--strict"];
    strict.extend(args);
    assert_eq!(run(&strict).status.code(), Some(1));
}

#[test]
fn custom_partition_by_labels() {
    let p = case("prize-case.json");
    let o = run(&[
        "evaluate",
        p.to_str().unwrap(),
        "--partition",
        "a1,a2;a3,a4",
        "--connection",
        "e-c",
        "--indemnity",
        "cc-i",
        "--csv",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = csv_rows(&o);
    assert_eq!(rows[0].0, "custom/E-C/CC-I");
    // Block {a1, a2} faces counterfactual a4 and a3: (70 + 35) / 2 - (5 + 30) / 2.
    // Block {a3, a4} faces a1, a2 and a5: (5 + 30 + 110) / 3 - (35 + 35 + 70) / 3.
    let want = [35.0, 35.0, 5.0 / 3.0, 5.0 / 3.0];
    for (r, w) in rows.iter().zip(want) {
        assert!((r.2 - w).abs() < 1e-9, "{rows:?}");
    }
}

#[test]
fn tables() {
    let o = run(&["table", "4"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("10 rows: 9 PASS, 1 FLAG, 0 FAIL"), "{text}");
    assert!(text.contains("a3:17.5, a4:40"));
    assert_eq!(run(&["--strict", "table", "4"]).status.code(), Some(1));

    let o = run(&[
        "table",
        "2",
        "--p0",
        "0.95",
        "--p1",
        "0.90",
        "--delta-v",
        "100000",
    ]);
    assert!(o.status.success());
    assert!(
        stdout(&o).contains("4 rows: 4 PASS, 0 FLAG, 0 FAIL"),
        "{}",
        stdout(&o)
    );

    for id in ["5", "6"] {
        let o = run(&["--strict", "table", id]);
        assert!(o.status.success(), "table {id}: {}", stdout(&o));
        assert!(!stdout(&o).contains("FAIL  "));
    }
    assert_eq!(run(&["table", "3"]).status.code(), Some(2));
}

#[test]
fn matos_sweep_is_complete_and_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for out in [&a, &b] {
        let o = run(&["sweep", "matos", "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let text = std::fs::read(&a).unwrap();
    assert_eq!(text, std::fs::read(&b).unwrap());
    let text = String::from_utf8(text).unwrap();
    assert!(text.starts_with("theta,p,award,band\n"));
    assert_eq!(text.lines().count(), 1 + 101 * 101);
    assert!(!text.contains('\r'));
    // every directory entry is a finished file; no temporaries left behind
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 2);
}

#[test]
fn empty_grid_writes_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("empty.csv");
    let o = run(&["sweep", "matos", "--p-steps", "0", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&out).unwrap(), "theta,p,award,band\n");
}

#[test]
fn sweep_defaults_to_env_directory_and_rejects_unwritable_paths() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin()
        .args(["sweep", "matos", "--theta-steps", "3", "--p-steps", "3"])
        .env("LOSTCHANCE_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(dir.path().join("matos.csv")).unwrap();
    assert_eq!(text.lines().count(), 10);

    let missing = dir.path().join("no/such/dir/out.csv");
    let o = run(&["sweep", "matos", "--out", missing.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("cannot write"));
}

#[test]
fn medical_sweep_award_is_non_increasing_in_p1() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("medical.csv");
    let o = run(&[
        "sweep",
        "medical",
        "--p0",
        "0.9",
        "--p1-steps",
        "91",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(&out).unwrap();
    let awards: Vec<f64> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(4).unwrap().parse().unwrap())
        .collect();
    assert_eq!(awards.len(), 91);
    assert!(awards.windows(2).all(|w| w[1] <= w[0]), "{awards:?}");
    assert_eq!(*awards.last().unwrap(), 0.0);
}

#[test]
fn verify_default_passes_and_fault_is_caught() {
    let o = run(&["verify"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains("all properties hold"));

    let o = run(&["verify", "--instances", "40", "--lambda-offset", "0.1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(
        stdout(&o)
            .lines()
            .any(|l| l.starts_with("FAIL") && l.contains("fm-i-mean-constraint")),
        "{}",
        stdout(&o)
    );
}

#[test]
fn verify_is_deterministic_for_a_seed() {
    let a = run(&["verify", "--seed", "11", "--instances", "25"]);
    let b = run(&["verify", "--seed", "11", "--instances", "25"]);
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).starts_with("seed 11 instances 25"));
}

#[test]
fn schema_is_json_and_closed() {
    let o = run(&["schema"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.trim_start().starts_with('{'));
    for key in [
        "outcomes",
        "marginals",
        "evidence",
        "money",
        "choice",
        "duty_set",
        "\"additionalProperties\": false",
    ] {
        assert!(text.contains(key), "schema lacks {key}");
    }
}

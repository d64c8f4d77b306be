use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

use matfac_cli::{run, Flags, ProblemDoc};
use matfac_core::cyclo::CycloField;
use matfac_core::poly::Ring;

const FIXTURES: [&str; 4] = ["worked_example", "corrupted", "trinomial", "knorrer"];

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(format!("{name}.json"))
}

fn matfac(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_matfac"))
        .args(args)
        .output()
        .expect("spawn matfac")
}

fn run_fixture(name: &str, extra: &[&str]) -> (i32, Value) {
    let path = fixture(name);
    let mut args = vec!["run", path.to_str().unwrap(), "--format", "machine"];
    args.extend_from_slice(extra);
    let out = matfac(&args);
    let report = serde_json::from_slice(&out.stdout).expect("machine report is JSON");
    (out.status.code().unwrap(), report)
}

fn write_doc(dir: &tempfile::TempDir, text: &str) -> PathBuf {
    let p = dir.path().join("doc.json");
    std::fs::write(&p, text).unwrap();
    p
}

fn stderr_of(path: &Path) -> (i32, String) {
    let out = matfac(&["run", path.to_str().unwrap()]);
    (out.status.code().unwrap(), String::from_utf8(out.stderr).unwrap())
}

/// Compare matrices of expression strings up to normal form.
fn same_matrix(ring: &Ring, got: &Value, want: &[[&str; 3]; 3]) -> bool {
    (0..3).all(|i| {
        (0..3).all(|j| {
            ring.parse(got[i][j].as_str().unwrap()).unwrap() == ring.parse(want[i][j]).unwrap()
        })
    })
}

#[test]
fn worked_example_passes() {
    let (code, rep) = run_fixture("worked_example", &[]);
    assert_eq!(code, 0);
    assert_eq!(rep["exit_status"], 0);
    let ring = Ring::new(
        CycloField::new(3),
        &["x1", "x2", "x0", "y1", "y2", "y0", "z1", "z2", "z0"],
    )
    .unwrap();
    let xy = &rep["commands"][1];
    assert_eq!(xy["op"], "tensor");
    assert_eq!(xy["status"], "pass");
    let mats = &xy["result"]["factorization"]["matrices"];
    let printed = [
        [["y1", "x1", "0"], ["0", "z*y0", "x2"], ["x0", "0", "z^2*y2"]],
        [["y2", "x1", "0"], ["0", "z*y1", "x2"], ["x0", "0", "z^2*y0"]],
        [["y0", "x1", "0"], ["0", "z*y2", "x2"], ["x0", "0", "z^2*y1"]],
    ];
    for (k, want) in printed.iter().enumerate() {
        assert!(same_matrix(&ring, &mats[k], want), "A_{} = {}", (k + 1) % 3, mats[k]);
    }
    assert_eq!(rep["commands"][3]["op"], "det-check");
    assert_eq!(rep["commands"][3]["status"], "pass");
    assert_eq!(rep["commands"][4]["result"]["factorization"]["rank"], 9);
    assert_eq!(rep["commands"][7]["result"]["iso"]["verdict"], "refuted at precision 1");
    assert_eq!(rep["commands"][8]["result"]["spot_check"]["passed"], true);
}

#[test]
fn human_output_matches_golden() {
    let out = matfac(&["run", fixture("worked_example").to_str().unwrap()]);
    let golden = std::fs::read_to_string(
        Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/worked_example.human"),
    )
    .unwrap();
    assert_eq!(String::from_utf8(out.stdout).unwrap(), golden);
}

#[test]
fn corrupted_entry_is_pinpointed() {
    let (code, rep) = run_fixture("corrupted", &[]);
    assert_eq!(code, 1);
    let v = &rep["commands"][0];
    assert_eq!(v["status"], "fail");
    assert_eq!(v["result"]["failing"], serde_json::json!([1, 2, 0]));
    let m = &v["result"]["mismatches"][0];
    assert_eq!((m["index"].as_u64(), m["row"].as_u64(), m["col"].as_u64()), (Some(1), Some(1), Some(1)));

    let out = matfac(&["run", fixture("corrupted").to_str().unwrap()]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("failing cyclic product index: 1, 2, 0"), "{text}");
    assert!(text.contains("[0] validate X: FAIL"), "{text}");
}

#[test]
fn trinomial_pipeline() {
    let (code, rep) = run_fixture("trinomial", &[]);
    assert_eq!(code, 0);
    let u = &rep["commands"][0];
    assert_eq!(u["status"], "pass");
    let st = &u["result"]["stats"];
    assert_eq!((st["mu"].as_u64(), st["e_r"].as_u64()), (Some(9), Some(9)));
    assert_eq!(st["rank_r"], 3);
    assert_eq!(st["ulrich"], true);
    assert_eq!(u["result"]["certificate"]["basis"], "tensor propagation");
    assert!(!u["claims"].as_array().unwrap().is_empty());

    let ses = &rep["commands"][2];
    assert_eq!(ses["status"], "pass");
    assert_eq!(ses["result"]["stats_m"]["ratio"], serde_json::json!([1, 2]));
    assert_eq!(ses["result"]["stats_l"]["ulrich"], true);
    assert_eq!(ses["result"]["stats_n"]["ulrich"], true);

    // Without the irreducibility assertion the statistics are refused,
    // which is not a verification failure.
    let r = &rep["commands"][3];
    assert_eq!(r["status"], "refused");
    assert!(r["reason"].as_str().unwrap().contains("irreducib"));
    assert_eq!(rep["summary"]["refused"], 1);
}

#[test]
fn knorrer_and_splitting_pipeline() {
    let (code, rep) = run_fixture("knorrer", &[]);
    assert_eq!(code, 0, "{rep:#}");
    let ring = Ring::new(CycloField::new(4), &["x", "y"]).unwrap();
    let z = &rep["commands"][0]["result"]["z"]["matrices"];
    let entry = |k: usize| ring.parse(z[k][0][0].as_str().unwrap()).unwrap();
    assert_eq!(entry(0), ring.parse("x - z*y").unwrap());
    assert_eq!(entry(1), ring.parse("x + z*y").unwrap());
    let s = &rep["commands"][2]["result"];
    assert_eq!((s["image_rank"].as_u64(), s["complement_rank"].as_u64()), (Some(1), Some(1)));
    assert_eq!(rep["commands"][4]["status"], "refused");
    assert_eq!(rep["commands"][8]["status"], "refused");
}

#[test]
fn machine_reports_are_deterministic() {
    for name in FIXTURES {
        let path = fixture(name);
        let p = path.to_str().unwrap();
        let a = matfac(&["run", p, "--format", "machine"]);
        let b = matfac(&["run", p, "--format", "machine"]);
        assert_eq!(a.stdout, b.stdout, "{name}");
        let h1 = matfac(&["run", p]);
        let h2 = matfac(&["run", p]);
        assert_eq!(h1.stdout, h2.stdout, "{name}");
    }
}

#[test]
fn report_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("report.json");
    let out = matfac(&[
        "run",
        fixture("knorrer").to_str().unwrap(),
        "--format",
        "machine",
        "--report",
        file.to_str().unwrap(),
    ]);
    assert_eq!(std::fs::read(&file).unwrap(), out.stdout);
}

#[test]
fn documents_round_trip() {
    for name in FIXTURES {
        let text = std::fs::read_to_string(fixture(name)).unwrap();
        let doc = ProblemDoc::from_json(&text).unwrap();
        let canon = doc.canonical().unwrap();
        let json = canon.to_json();
        let again = ProblemDoc::from_json(&json).unwrap();
        assert_eq!(again, canon, "{name}");
        assert_eq!(again.to_json(), json, "{name}");
        assert_eq!(again.canonical().unwrap(), canon, "{name}");

        let out = matfac(&["fmt", fixture(name).to_str().unwrap()]);
        assert_eq!(String::from_utf8(out.stdout).unwrap(), json, "{name}");

        let a = run(&doc, &Flags::default()).unwrap();
        let b = run(&canon, &Flags::default()).unwrap();
        assert_eq!(a.machine(), b.machine(), "{name}");
    }
}

#[test]
fn zeta_flag_selects_the_root() {
    let (code, rep) = run_fixture("worked_example", &["--zeta", "2"]);
    assert_eq!(code, 0);
    assert_eq!(rep["flags"]["zeta"], 2);
    assert_eq!(rep["commands"][1]["result"]["zeta"], "-1 - z");
    assert_eq!(rep["commands"][3]["status"], "pass");

    let (code, rep) = run_fixture("worked_example", &["--zeta", "3"]);
    assert_eq!(code, 0);
    assert_eq!(rep["commands"][1]["status"], "refused");
    // commands that need the missing tensor are refused too
    assert_eq!(rep["commands"][2]["status"], "refused");
    assert!(rep["commands"][2]["reason"].as_str().unwrap().contains("`XY` was not produced"));
}

#[test]
fn precision_flag_overrides_the_default() {
    let (code, rep) = run_fixture("knorrer", &["--precision", "3"]);
    assert_eq!(code, 0);
    assert_eq!(rep["commands"][2]["result"]["precision"], 3);
}

#[test]
fn parse_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("{ \"ring\": { \"conductor\": 3, \"vars\": [\"x\"] ", "line 1"),
        (
            r#"{"ring": {"conductor": 3, "vars": ["x"]},
                "factorizations": {"X": {"d": 2, "matrices": [[["x +"]], [["x"]]]}}}"#,
            "factorizations.X.matrices[0][0][0]",
        ),
        (
            r#"{"ring": {"conductor": 3, "vars": ["x"]},
                "factorizations": {"X": {"d": 2, "matrices": [[["w"]], [["x"]]]}}}"#,
            "unknown variable `w`",
        ),
        (
            r#"{"ring": {"conductor": 3, "vars": ["x"]},
                "commands": [{"op": "validate", "args": {"x": "X"}}]}"#,
            "commands[0].args.x: no factorization named `X`",
        ),
        (
            r#"{"ring": {"conductor": 3, "vars": ["x"]},
                "polynomials": {"f": "x", "f": "x^2"}}"#,
            "duplicate name `f`",
        ),
        (
            r#"{"ring": {"conductor": 3, "vars": ["x"]},
                "polynomials": {"X": "x"},
                "factorizations": {"X": {"d": 2, "matrices": [[["x"]], [["1"]]]}}}"#,
            "already a polynomial",
        ),
        (
            r#"{"ring": {"conductor": 3, "vars": ["x"]},
                "commands": [{"op": "transpose", "args": {"x": "X"}}]}"#,
            "commands[0]: unknown variant `transpose`",
        ),
        (
            r#"{"ring": {"conductor": 3, "vars": ["x"]},
                "factorizations": {"X": {"d": 2, "matrices": [[["x"]], [["1"]]]}},
                "commands": [{"op": "validate", "args": {"x": "X"}, "output": "V"}]}"#,
            "produces no objects",
        ),
    ];
    for (text, needle) in cases {
        let p = write_doc(&dir, text);
        let (code, err) = stderr_of(&p);
        assert_eq!(code, 2, "{text}");
        assert!(err.contains(needle), "expected `{needle}` in: {err}");
    }
    let out = matfac(&["run", "/nonexistent/doc.json"]);
    assert_eq!(out.status.code(), Some(2));
    let out = matfac(&["run"]);
    assert_eq!(out.status.code(), Some(2));
}

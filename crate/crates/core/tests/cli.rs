use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tdbn_impute::imputation::{count_errors, impute_mode};
use tdbn_impute::model::parse_dataset;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tdbn-impute"))
}

fn run(args: &[&str]) -> Output {
    let out = bin().args(args).arg("--quiet").output().unwrap();
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn p(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

#[test]
fn locf_fills_forward() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("in.csv"), "subject_id,x__0,x__1,x__2\ns1,a,?,b\n").unwrap();
    run(&[
        "impute",
        "-i",
        &p(dir.path(), "in.csv"),
        "-m",
        "locf",
        "-o",
        &p(dir.path(), "out.csv"),
    ]);
    let out = fs::read_to_string(dir.path().join("out.csv")).unwrap();
    assert_eq!(out, "subject_id,x__0,x__1,x__2\ns1,a,a,b\n");
}

#[test]
fn sample_inject_impute_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    run(&[
        "sample",
        "--seed",
        "4",
        "--subjects",
        "40",
        "-o",
        &p(d, "a.csv"),
        "--model-output",
        &p(d, "m.dbn"),
    ]);
    run(&["sample", "--seed", "4", "--subjects", "40", "-o", &p(d, "b.csv")]);
    assert_eq!(fs::read(d.join("a.csv")).unwrap(), fs::read(d.join("b.csv")).unwrap());

    // no affected subjects: output equals input
    run(&[
        "inject",
        "-i",
        &p(d, "a.csv"),
        "--pct-subjects",
        "0",
        "--pct-cells",
        "0.5",
        "-o",
        &p(d, "same.csv"),
    ]);
    assert_eq!(
        fs::read(d.join("a.csv")).unwrap(),
        fs::read(d.join("same.csv")).unwrap()
    );

    run(&[
        "inject",
        "-i",
        &p(d, "a.csv"),
        "--pct-subjects",
        "0.2",
        "--pct-cells",
        "0.2",
        "--seed",
        "1",
        "-o",
        &p(d, "masked.csv"),
        "--mask",
        &p(d, "mask.csv"),
    ]);
    let mask_lines = fs::read_to_string(d.join("mask.csv")).unwrap().lines().count() - 1;
    assert_eq!(mask_lines, 8 * 10);

    run(&[
        "impute",
        "-i",
        &p(d, "masked.csv"),
        "-m",
        "mode",
        "-o",
        &p(d, "mode.csv"),
    ]);
    run(&[
        "impute",
        "-i",
        &p(d, "masked.csv"),
        "-m",
        "dbn",
        "-o",
        &p(d, "dbn.csv"),
        "--provenance",
        &p(d, "prov.csv"),
    ]);
    let load = |name: &str| parse_dataset(fs::read(d.join(name)).unwrap().as_slice(), None).unwrap();
    let truth = load("a.csv");
    let masked = load("masked.csv");
    let mode = load("mode.csv");
    let dbn = load("dbn.csv");
    // dispatch identity with the library
    assert_eq!(mode, impute_mode(&masked).dataset);
    let mask = masked.missing_cells();
    let prov_lines = fs::read_to_string(d.join("prov.csv")).unwrap().lines().count() - 1;
    assert_eq!(prov_lines, mask.len());
    let e_dbn = count_errors(&truth, &dbn, &mask).unwrap();
    let e_mode = count_errors(&truth, &mode, &mask).unwrap();
    assert!(e_dbn < e_mode, "dbn {e_dbn} vs mode {e_mode}");
}

#[test]
fn learn_is_deterministic_and_traced() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    run(&["sample", "--seed", "2", "--subjects", "30", "-o", &p(d, "full.csv")]);
    run(&[
        "inject",
        "-i",
        &p(d, "full.csv"),
        "--pct-subjects",
        "0.4",
        "--pct-cells",
        "0.3",
        "-o",
        &p(d, "m.csv"),
    ]);
    for k in 0..2 {
        run(&[
            "learn",
            "-i",
            &p(d, "m.csv"),
            "--seed",
            "7",
            "-o",
            &p(d, &format!("net{k}.dbn")),
            "--trace",
            &p(d, &format!("trace{k}.csv")),
        ]);
    }
    assert_eq!(
        fs::read(d.join("net0.dbn")).unwrap(),
        fs::read(d.join("net1.dbn")).unwrap()
    );
    let trace = fs::read_to_string(d.join("trace0.csv")).unwrap();
    assert_eq!(trace, fs::read_to_string(d.join("trace1.csv")).unwrap());
    let mut lines = trace.lines();
    assert_eq!(lines.next(), Some("iteration,log_likelihood,mdl"));
    let mdl: Vec<f64> = lines.map(|l| l.rsplit(',').next().unwrap().parse().unwrap()).collect();
    assert!(mdl.len() >= 2);
    assert!(mdl.windows(2).all(|w| w[1] >= w[0] - 1e-8), "{mdl:?}");

    // complete data: one Structural EM iteration
    run(&[
        "learn",
        "-i",
        &p(d, "full.csv"),
        "-o",
        &p(d, "c.dbn"),
        "--trace",
        &p(d, "c.csv"),
    ]);
    assert_eq!(fs::read_to_string(d.join("c.csv")).unwrap().lines().count(), 1 + 2);
}

#[test]
fn wilcoxon_fixture() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("pairs.csv"), "a,b\n1,0\n2,0\n3,0\n4,0\n5,0\n").unwrap();
    let out = run(&["wilcoxon", "-i", &p(dir.path(), "pairs.csv")]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(
        text,
        "n,w_plus,w_minus,statistic,p_value,method\n5,15,0,0,0.0625,exact\n"
    );
}

#[test]
fn sax_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("r.csv"),
        "subject_id,v__0,v__1,v__2,v__3\ns1,-2,-0.3,0.3,2\n",
    )
    .unwrap();
    let out = run(&["sax", "-i", &p(dir.path(), "r.csv")]);
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        "subject_id,v__0,v__1,v__2,v__3\ns1,a,b,c,d\n"
    );
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("bad.csv"), "subject_id,x__0,x__1\ns1,a\n").unwrap();
    let code = |args: &[&str]| bin().args(args).arg("-q").output().unwrap().status.code();
    assert_eq!(code(&["impute", "-i", &p(d, "bad.csv"), "-m", "mode"]), Some(2));
    assert_eq!(code(&["impute", "-i", &p(d, "missing.csv")]), Some(2));
    assert_eq!(code(&["learn", "-i", &p(d, "bad.csv"), "--no-such-flag"]), Some(2));
    fs::write(
        d.join("holes.csv"),
        "subject_id,x__0,y__0,x__1,y__1\ns1,?,?,?,?\ns2,a,b,b,a\n",
    )
    .unwrap();
    assert_eq!(
        code(&["impute", "-i", &p(d, "holes.csv"), "--enumeration-cap", "4"]),
        Some(3)
    );
    assert_eq!(code(&["impute", "-i", &p(d, "holes.csv")]), Some(0));
}

#[test]
fn help_documents_every_subcommand() {
    let out = bin().arg("--help").output().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    for sub in ["learn", "impute", "sample", "inject", "sax", "bench", "wilcoxon"] {
        assert!(text.contains(sub), "{sub} missing from help");
    }
    let out = bin().args(["learn", "--help"]).output().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    for flag in [
        "--seed",
        "--threads",
        "--score-log-base",
        "--domains",
        "--init",
        "--no-param-em",
        "--alpha",
    ] {
        assert!(text.contains(flag), "{flag} missing from learn help");
    }
}

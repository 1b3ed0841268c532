//! End-to-end runs of the binary against recorded outputs in `tests/golden`.
//! Set `BCJUMP_BLESS=1` to rewrite the recordings.

use std::path::PathBuf;
use std::process::{Command, Output};

use bcjump::report::Report;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bcjump"))
}

fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join("golden")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

/// Runs with `--report --no-timing`, compares with the recording, and checks
/// the report survives a parse/emit cycle unchanged.
fn golden(name: &str, args: &[&str]) -> Report {
    let mut full: Vec<&str> = args.to_vec();
    full.extend(["--report", "--no-timing"]);
    let out = run(&full);
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(out.status.success(), "{name}: exit {:?}\n{}", out.status, String::from_utf8_lossy(&out.stderr));
    let path = golden_dir().join(format!("{name}.txt"));
    if std::env::var_os("BCJUMP_BLESS").is_some() {
        std::fs::create_dir_all(golden_dir()).unwrap();
        std::fs::write(&path, &stdout).unwrap();
    }
    let want = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing golden file {}", path.display()));
    assert_eq!(stdout, want, "{name} differs from its recording");
    let report = Report::parse(&stdout).unwrap();
    assert_eq!(report.to_string(), stdout, "{name}: report does not round-trip");
    report
}

fn value<'a>(r: &'a Report, section: &str, key: &str) -> &'a str {
    r.require(section).unwrap().require(key).unwrap()
}

#[test]
fn cohomology_bc_grid() {
    let r = golden("cohomology_iwasawa_bc", &["cohomology", "--builtin", "iwasawa", "--kind", "bc", "--all"]);
    assert_eq!(value(&r, "bc", "(2,2)"), "8");
}

#[test]
fn cohomology_torus_de_rham() {
    let r = golden("cohomology_torus3_dr", &["cohomology", "--builtin", "torus3", "--kind", "dr"]);
    let b: Vec<&str> = (0..=6).map(|k| value(&r, "dr", &format!("b{k}"))).collect();
    assert_eq!(b, ["1", "6", "15", "20", "15", "6", "1"]);
}

#[test]
fn cohomology_l_complex_and_representatives() {
    let r = golden(
        "cohomology_iwasawa_l22",
        &["cohomology", "iwasawa", "--kind", "l", "--shape", "2", "2", "--degree", "2", "--representatives"],
    );
    assert_eq!(value(&r, "l(2,2)", "H2"), "8");
    assert_eq!(r.require("l(2,2) H2 representatives").unwrap().entries.len(), 8);
}

#[test]
fn broken_spec_is_an_input_error() {
    let dir = std::env::temp_dir().join(format!("bcjump-golden-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("broken.spec");
    std::fs::write(&path, "dim = 3\ndphi[3] = 1 phibar[1]^phibar[2]\n").unwrap();
    let out = run(&["cohomology", "--spec", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("(0,2)") && err.contains("phibar[1]^phibar[2]"), "{err}");
}

#[test]
fn family_spec_at_a_point() {
    let dir = std::env::temp_dir().join(format!("bcjump-family-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("family.spec");
    std::fs::write(&path, "dim = 3\nparams = [t]\norder = 1\ndphi[3] = -1 phi[1]^phi[2] + (t) phi[1]^phibar[1]\n").unwrap();
    let out = run(&["cohomology", "--spec", path.to_str().unwrap(), "--at", "t=1", "--kind", "bc", "--bidegree", "2", "0", "--report"]);
    assert!(out.status.success());
    let r = Report::parse(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(value(&r, "bc", "(2,0)"), "2");
    assert!(r.elapsed_ms.is_some());
}

#[test]
fn tables_pass() {
    for label in ["ii.b", "i"] {
        let r = golden(&format!("tables_{label}"), &["tables", label]);
        assert_eq!(value(&r, "result", "verdict"), "PASS");
    }
    let r = golden("tables_iii.a", &["tables", "iii.a"]);
    assert_eq!(value(&r, "bc", "(2,2)"), "computed 7 expected 7 PASS");
}

#[test]
fn obstruct_examples() {
    let r = golden(
        "obstruct_bc20_phi23",
        &["obstruct", "iwasawa", "--dir", "t21=1", "--bc", "2", "0", "--class", "phi[2]^phi[3]", "--order", "1"],
    );
    assert_eq!(value(&r, "obstruction", "verdict"), "nonvanishing");
    assert_eq!(value(&r, "obstruction", "total"), "-1 phi[1]^phi[2]^phibar[1]");
    assert_eq!(value(&r, "extension", "achieved"), "0");
    let r = golden("obstruct_bclass_phi3", &["obstruct", "iwasawa", "--dir", "t21=1", "--bclass", "2", "2", "2", "--class", "phi[3]"]);
    assert_eq!(value(&r, "obstruction", "total"), "1 phi[1]^phibar[1]");
    assert_eq!(value(&r, "obstruction", "verdict"), "nonvanishing");
    let r = golden("obstruct_bc20_phi12", &["obstruct", "iwasawa", "--dir", "t31=1", "--bc", "2", "0", "--class", "phi[1]^phi[2]"]);
    assert_eq!(value(&r, "obstruction", "verdict"), "vanishing");
}

#[test]
fn obstruct_input_errors() {
    let bad = |args: &[&str]| run(args).status.code();
    assert_eq!(bad(&["obstruct", "iwasawa", "--dir", "t21=1", "--bc", "2", "0", "--class", "#9"]), Some(1));
    assert_eq!(bad(&["obstruct", "iwasawa", "--dir", "t21=1", "--bc", "2", "0", "--class", "phi[3]"]), Some(1));
    assert_eq!(bad(&["obstruct", "iwasawa", "--dir", "t13=1", "--bc", "2", "0", "--class", "#1"]), Some(1));
    assert_eq!(bad(&["obstruct", "nowhere", "--dir", "t21=1", "--bc", "2", "0", "--class", "#1"]), Some(1));
}

#[test]
fn jump_examples() {
    let r = golden("jump_t21_bc", &["jump", "iwasawa", "--dir", "t21=1", "--grid", "bc"]);
    assert_eq!(value(&r, "jump", "flagged_bc"), "(0,2) (2,0) (2,2)");
    let r = golden("jump_t31", &["jump", "iwasawa", "--dir", "t31=1", "--grid", "bc,a"]);
    assert_eq!(value(&r, "jump", "flagged_bc"), "none");
    assert_eq!(value(&r, "jump", "flagged_a"), "none");
}

#[test]
fn classify_example() {
    let r = golden("classify_ii_a", &["classify", "0", "0", "1", "0"]);
    assert_eq!(value(&r, "classification", "label"), "ii.a");
    assert_eq!(value(&r, "classification", "D"), "0");
    assert_eq!(value(&r, "classification", "rank_s"), "1");
}

#[test]
fn human_view_and_usage_errors() {
    let out = run(&["cohomology", "iwasawa", "--kind", "bc", "--no-timing"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("bc\n") && text.contains("p=2"), "{text}");
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

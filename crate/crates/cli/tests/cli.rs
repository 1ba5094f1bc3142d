use std::io::Write;
use std::process::{Command, Output, Stdio};

fn hicyclo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hicyclo")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn cert_path() -> String {
    format!("{}/tests/data/stuffle_2_3.json", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn zeta_table_ends_at_twelve() {
    let out = hicyclo(&["dims", "zeta", "--max-weight", "12"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with('#'));
    assert_eq!(text.lines().last(), Some("12\t12"));
}

#[test]
fn lie_dims_default_generators() {
    let out = hicyclo(&["dims", "lie", "--max-weight", "12"]);
    assert_eq!(stdout(&out).lines().last(), Some("12\t2"));
}

#[test]
fn level_seven_depth_two() {
    let out = hicyclo(&["dihedral", "dim", "--level", "7", "--weight", "2", "--depth", "2"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "1\n");
}

#[test]
fn json_dim() {
    let out = hicyclo(&[
        "--format", "json", "dihedral", "dim", "--level", "1", "--weight", "12", "--depth", "2",
    ]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["dim"], 1);
    assert_eq!(v["options"]["distribution"], true);
}

#[test]
fn weight_twelve_cobracket() {
    let out = hicyclo(&[
        "dihedral",
        "cobracket",
        "--level",
        "1",
        "--weight",
        "12",
        "--depth",
        "2",
    ]);
    let text = stdout(&out);
    assert!(text.starts_with("# rank\t1\n"));
    assert!(text.contains("I[3](0:0)@1\tI[9](0:0)@1"));
    assert!(text.contains("I[5](0:0)@1\tI[7](0:0)@1"));
}

#[test]
fn stuffle_certificate_verifies() {
    let out = hicyclo(&["num", "verify", "--cert", &cert_path(), "--digits", "25"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let out = hicyclo(&[
        "--format",
        "json",
        "num",
        "verify",
        "--cert",
        &cert_path(),
        "--digits",
        "25",
    ]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["pass"], true);
    assert_eq!(v["digits"], 25);
    assert!(v["residual"].is_string() && v["terms_used"].is_u64());
}

#[test]
fn broken_certificate_exits_one() {
    let text = std::fs::read_to_string(cert_path()).unwrap();
    let broken = text.replace("\"-1/1\", \"comp\": [5]", "\"-2/1\", \"comp\": [5]");
    assert_ne!(text, broken);
    let mut child = Command::new(env!("CARGO_BIN_EXE_hicyclo"))
        .args(["num", "verify", "--cert", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(broken.as_bytes()).unwrap();
    assert_eq!(child.wait_with_output().unwrap().status.code(), Some(1));
}

#[test]
fn invalid_input_exits_two() {
    for args in [
        &["dihedral", "dim", "--level", "0", "--weight", "2", "--depth", "2"][..],
        &["num", "eval", "--comp", "2,1"],
        &["modular", "mu", "--rank", "2", "--level", "5", "--coset", "0,0"],
        &["realize", "chain", "--rank", "2", "--basis", "1,0;2,0"],
        &["dims", "zeta", "--max-weight", "x"],
        &["num", "verify", "--cert", "/nonexistent.json"],
    ] {
        assert_eq!(hicyclo(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn output_is_deterministic_across_thread_counts() {
    let args = ["modular", "compare", "--rank", "2", "--level", "7", "--weight", "2"];
    let a = hicyclo(&[&["--threads", "1"][..], &args].concat());
    let b = hicyclo(&[&["--threads", "4"][..], &args].concat());
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).contains("# chain_map_sign\t1"));
}

#[test]
fn realization_checks_pass() {
    let out = hicyclo(&["realize", "check", "--rank", "3"]);
    assert!(out.status.success());
    assert!(stdout(&out).lines().skip(1).all(|l| l.ends_with("\ttrue")));
}

#[test]
fn chain_for_custom_basis() {
    let out = hicyclo(&["realize", "chain", "--rank", "2", "--basis", "1,0;1,1"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).lines().filter(|l| !l.starts_with('#')).count(), 1);
}

#[test]
fn modular_stability_with_seed() {
    let args = [
        "modular",
        "complex",
        "--rank",
        "2",
        "--level",
        "5",
        "--weight",
        "4",
        "--samples",
        "5",
        "--seed",
        "7",
    ];
    let out = hicyclo(&args);
    assert!(out.status.success());
    assert!(stdout(&out).contains("# stable\ttrue"));
    assert_eq!(out.stdout, hicyclo(&args).stdout);
}

#[test]
fn derivations_check_level_one() {
    let out = hicyclo(&["derivations", "check", "--level", "1", "--max-weight", "5"]);
    assert!(out.status.success(), "{}", stdout(&out));
}

#[test]
fn output_file() {
    let dir = std::env::temp_dir().join(format!("hicyclo-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("ktheory.tsv");
    let out = hicyclo(&[
        "dims",
        "ktheory",
        "--level",
        "5",
        "--max-weight",
        "2",
        "-o",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success() && out.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), "# n\trank\n1\t2\n2\t2\n");
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn polylog_at_minus_one() {
    let out = hicyclo(&[
        "num", "eval", "--level", "2", "--comp", "2", "--args", "1", "--digits", "20",
    ]);
    assert!(stdout(&out).contains("-0.8224670334241132182"));
}

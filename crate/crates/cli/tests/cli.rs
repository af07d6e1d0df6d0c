use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

const SWEEP_HEADER: &str = "family,d,N,M,seed,x_N,I_N,icn_at_xN,deficit,sup_profile_gap";
const CENSUS_HEADER: &str =
    "family,d,N,M,seed,y,k,epsilon,samples,frac_uniform,se_uniform,frac_determining,se_determining";

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_intricacy"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn diagonal(dir: &TempDir) -> String {
    write(
        dir,
        "diag.json",
        r#"{"d":2,"N":2,"support":[{"config":[0,0],"p":0.5},{"config":[1,1],"p":0.5}]}"#,
    )
}

/// Column `name` of every data row.
fn column(csv: &str, name: &str) -> Vec<String> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let i = header.iter().position(|h| *h == name).unwrap();
    lines.map(|l| l.split(',').nth(i).unwrap().to_string()).collect()
}

fn floats(csv: &str, name: &str) -> Vec<f64> {
    column(csv, name).iter().map(|v| v.parse().unwrap()).collect()
}

#[test]
fn entropy_of_diagonal_and_constant_laws() {
    let dir = TempDir::new().unwrap();
    let out = stdout(&run(&["entropy", &diagonal(&dir)]));
    assert_eq!(out.trim(), format!("entropy_nats={:?}, x=0.5", 2f64.ln()));
    let constant = write(&dir, "c.json", r#"{"d":3,"N":2,"dense":[0,0,0,0,1,0,0,0,0]}"#);
    assert_eq!(stdout(&run(&["entropy", &constant])).trim(), "entropy_nats=0, x=0");
}

#[test]
fn malformed_law_exits_2_naming_the_invariant() {
    let dir = TempDir::new().unwrap();
    let bad = write(
        &dir,
        "bad.json",
        r#"{"d":2,"N":2,"support":[{"config":[0,0],"p":0.5},{"config":[1,1],"p":0.4}]}"#,
    );
    let out = run(&["entropy", &bad]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("total mass"));
}

#[test]
fn intricacy_rows_per_family() {
    let dir = TempDir::new().unwrap();
    let out = stdout(&run(&["intricacy", &diagonal(&dir), "--family", "est,uniform,p-sym:0.3"]));
    assert_eq!(out.lines().next().unwrap(), "family,d,N,x,icn_x,deficit,normalized_intricacy");
    assert_eq!(column(&out, "family"), ["est", "uniform", "p-sym:0.3"]);
    let i = floats(&out, "normalized_intricacy");
    assert!((i[0] - 1.0 / 6.0).abs() < 1e-12);

    let product = write(&dir, "u.json", r#"{"d":2,"N":3,"dense":[0.125,0.125,0.125,0.125,0.125,0.125,0.125,0.125]}"#);
    let out = stdout(&run(&["intricacy", &product, "--family", "est,uniform,p-sym:0.3"]));
    assert!(floats(&out, "normalized_intricacy").iter().all(|v| v.abs() < 1e-12));

    let json = stdout(&run(&["--format", "json", "intricacy", &diagonal(&dir)]));
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    for key in ["family", "d", "N", "x", "icn_x", "deficit", "normalized_intricacy"] {
        assert!(v[0].get(key).is_some(), "{key}");
    }
}

#[test]
fn large_systems_need_sampling() {
    let dir = TempDir::new().unwrap();
    let law = dir.path().join("big.json");
    let law = law.to_str().unwrap();
    stdout(&run(&["--out", law, "construct", "--d", "2", "--N", "30", "--M", "4", "--seed", "3"]));
    let out = run(&["intricacy", law]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sampled"));
    let out = stdout(&run(&["intricacy", law, "--sampled", "--samples", "100", "--seed", "1"]));
    let i = floats(&out, "normalized_intricacy")[0];
    assert!(i > 0.0 && i <= floats(&out, "icn_x")[0] + 1e-12);
}

#[test]
fn construct_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        stdout(&run(&["--out", p.to_str().unwrap(), "construct", "--d", "2", "--N", "8", "--M", "4", "--seed", "7"]));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());

    let out = run(&["construct", "--d", "2", "--N", "8", "--M", "0", "--seed", "7"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("support=1 "));
    let out = run(&["construct", "--d", "2", "--N", "9", "--x", "0.5", "--seed", "7"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("M=4 "));
}

#[test]
fn stochastic_commands_require_seeds() {
    assert_eq!(run(&["construct", "--d", "2", "--N", "8", "--M", "4"]).status.code(), Some(2));
    assert_eq!(run(&["sweep", "--d", "2", "--x", "0.5", "--N", "8"]).status.code(), Some(2));
    assert_eq!(run(&["maximize", "--d", "2", "--N", "2"]).status.code(), Some(2));
    assert_eq!(
        run(&["construct", "--d", "2", "--N", "8", "--M", "4", "--x", "0.5", "--seed", "1"]).status.code(),
        Some(2)
    );
}

#[test]
fn sweep_schema_and_reproducibility() {
    let args = ["sweep", "--d", "2", "--x", "0.5", "--N", "8..16:4", "--seeds", "0..19"];
    let out = stdout(&run(&args));
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], SWEEP_HEADER);
    assert_eq!(lines.len(), 1 + 3 * 20);
    let threaded = stdout(&run(&[&["--threads", "1"][..], &args[..]].concat()));
    assert_eq!(out, threaded);
    let summary = String::from_utf8(run(&args).stderr).unwrap();
    assert_eq!(summary.lines().filter(|l| l.starts_with("summary")).count(), 3);
}

#[test]
fn sweep_flushes_completed_rows_before_failing() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("sweep.csv");
    let out = run(&[
        "--cap-subsets",
        "10",
        "--out",
        path.to_str().unwrap(),
        "sweep",
        "--d",
        "2",
        "--x",
        "0.5",
        "--N",
        "8,12",
        "--seeds",
        "0..3",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let csv = fs::read_to_string(&path).unwrap();
    assert_eq!(csv.lines().count(), 1 + 4);
    assert!(column(&csv, "N").iter().all(|n| n == "8"));
}

#[test]
fn census_rows_per_y() {
    let out = stdout(&run(&[
        "census", "--d", "2", "--N", "14", "--M", "7", "--seed", "0", "--y", "0.25,0.75", "--census-seed", "1",
    ]));
    assert_eq!(out.lines().next().unwrap(), CENSUS_HEADER);
    assert!(floats(&out, "frac_uniform")[0] >= 0.8);
    assert!(floats(&out, "frac_determining")[1] >= 0.8);
}

#[test]
fn maximize_reaches_the_witness() {
    let dir = TempDir::new().unwrap();
    let law = dir.path().join("best.json");
    let out = stdout(&run(&[
        "maximize", "--d", "2", "--N", "2", "--seed", "0", "--restarts", "8", "--save-law", law.to_str().unwrap(),
    ]));
    let best = floats(&out, "intricacy").into_iter().fold(f64::MIN, f64::max);
    assert!(best >= 2f64.ln() / 3.0 - 1e-6);
    assert!(floats(&out, "certificate").iter().all(|&c| c >= -1e-9));
    assert!(Path::new(&law).exists());
}

#[test]
fn coefficients_from_family_or_measure_file() {
    let est = stdout(&run(&["coeffs", "--family", "est", "--N", "4"]));
    assert!(floats(&est, "dn").iter().all(|&p| (p - 0.2).abs() < 1e-15));
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "m.json", r#"{"atoms": [[0.5, 1.0]], "lebesgue": 0.0}"#);
    let custom = stdout(&run(&["coeffs", "--measure", &m, "--N", "4"]));
    let uniform = stdout(&run(&["coeffs", "--family", "uniform", "--N", "4"]));
    assert_eq!(custom, uniform);
    let skewed = write(&dir, "s.json", r#"{"atoms": [[0.2, 1.0]], "lebesgue": 0.0}"#);
    assert_eq!(run(&["coeffs", "--measure", &skewed, "--N", "4"]).status.code(), Some(2));
}

#[test]
fn profile_exact_and_sampled() {
    let dir = TempDir::new().unwrap();
    let exact = stdout(&run(&["profile", &diagonal(&dir)]));
    assert_eq!(floats(&exact, "h"), [0.0, 0.5, 0.5]);
    let sampled = stdout(&run(&["profile", &diagonal(&dir), "--sampled", "--seed", "2", "--samples", "10"]));
    assert_eq!(floats(&sampled, "h"), [0.0, 0.5, 0.5]);
}

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_frobforge"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn an_build_then_wdvv_check() {
    let dir = tempfile::tempdir().unwrap();
    let chart = dir.path().join("a3.json");
    let o = run(&["an-build", "--n", "3", "--out", path_str(&chart)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v = frobforge::json::parse(&fs::read_to_string(&chart).unwrap()).unwrap();
    let parsed = frobforge::json::chart_from_json(&v).unwrap();
    assert_eq!(frobforge::json::chart_to_json(&parsed), v);

    let o = run(&["wdvv-check", "--chart", path_str(&chart)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("residuals: 0"));

    let o = run(&["axioms", "--chart", path_str(&chart)]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn stokes_pd_prints_the_matrix() {
    let o = run(&["stokes", "pd", "--d", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "[[1,3,3],[0,1,3],[0,0,1]]");
}

#[test]
fn exit_codes_and_prefixes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{not json").unwrap();
    let o = run(&["wdvv-check", "--chart", path_str(&bad)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("malformed JSON:"));

    let partial = dir.path().join("partial.json");
    fs::write(&partial, r#"{"n": 2}"#).unwrap();
    let o = run(&["wdvv-check", "--chart", path_str(&partial)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("schema violation:"));

    let o = run(&["an-build", "--bogus", "3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("usage error:"));

    let chart = dir.path().join("a3.json");
    run(&["an-build", "--n", "3", "--out", path_str(&chart)]);
    let o = run(&["canonical", "--chart", path_str(&chart), "--t", "0,0,0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("numeric failure:"));

    let o = run(&["canonical", "--chart", path_str(&chart), "--t", "1,2"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn canonical_and_gfunction_emit_json() {
    let dir = tempfile::tempdir().unwrap();
    let chart = dir.path().join("a2.json");
    run(&["an-build", "--n", "2", "--out", path_str(&chart)]);
    let o = run(&["canonical", "--chart", path_str(&chart), "--t", "1/2,1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v = frobforge::json::parse(&stdout(&o)).unwrap();
    assert_eq!(v["u"].as_array().unwrap().len(), 2);
    assert_eq!(v["Psi"].as_array().unwrap().len(), 2);

    let o = run(&["gfunction", "--chart", path_str(&chart), "--t0", "0.5,1", "--t1", "1.5,1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v = frobforge::json::parse(&stdout(&o)).unwrap();
    let g = frobforge::json::complex_from_json(&v["delta_G"]).unwrap();
    assert!(g.norm() < 1e-8);
}

#[test]
fn isomonodromy_run_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let v0 = dir.path().join("v0.json");
    fs::write(&v0, r#"{"u": ["0", "2", "4"], "upper": ["0.3", "0.2", "-0.4"]}"#).unwrap();
    let out = dir.path().join("traj.csv");
    let o = run(&[
        "isomonodromy", "run", "--n", "3", "--v0", path_str(&v0), "--path", "0,2,4;0.5,2+0.5i,4", "--tol", "1e-10", "--out",
        path_str(&out),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = fs::read_to_string(&out).unwrap();
    let header = csv.lines().next().unwrap();
    assert_eq!(header.split(',').count(), 1 + 6 + 6 + 6 + 2);
    assert!(csv.lines().count() > 2);
}

#[test]
fn braid_and_orbit() {
    let dir = tempfile::tempdir().unwrap();
    let s = dir.path().join("s.json");
    fs::write(&s, "[[1,3,3],[0,1,3],[0,0,1]]").unwrap();
    let o = run(&["braid", "--s", path_str(&s), "--word", "1,-1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v = frobforge::json::parse(&stdout(&o)).unwrap();
    assert_eq!(v["S"], serde_json::json!([[1, 3, 3], [0, 1, 3], [0, 0, 1]]));

    let o = run(&["orbit", "--s", path_str(&s), "--depth", "2", "--cap", "100"]);
    assert_eq!(o.status.code(), Some(0));
    let v = frobforge::json::parse(&stdout(&o)).unwrap();
    assert!(v["size"].as_u64().unwrap() > 1);
}

#[test]
fn pd_data_and_connection() {
    let o = run(&["pd-data", "--d", "1"]);
    let v = frobforge::json::parse(&stdout(&o)).unwrap();
    assert_eq!(v["mu"], serde_json::json!([["-1/2", "0/1"], ["0/1", "1/2"]]));

    let o = bin().args(["connection", "pd", "--d", "1"]).env("FROBFORGE_PRECISION", "40").output().unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v = frobforge::json::parse(&stdout(&o)).unwrap();
    assert_eq!(v["digits"], 40);
    assert!(v["A"][1]["re"].as_str().unwrap().starts_with("1.154431329803065721213024180164804862"));
}

#[test]
fn flow_and_descendents() {
    let dir = tempfile::tempdir().unwrap();
    let chart = dir.path().join("a2.json");
    run(&["an-build", "--n", "2", "--out", path_str(&chart)]);
    let o = run(&["flow", "--chart", path_str(&chart), "--alpha", "1", "--p", "0"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v = frobforge::json::parse(&stdout(&o)).unwrap();
    assert_eq!(v["A"].as_array().unwrap().len(), 2);
    let o = run(&["flow", "--chart", path_str(&chart), "--alpha", "3", "--p", "0"]);
    assert_eq!(o.status.code(), Some(1));

    let out = dir.path().join("omega.json");
    let o = run(&["descendents", "--chart", path_str(&chart), "--order", "2", "--out", path_str(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v = frobforge::json::parse(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["symmetric"], true);
}

#[test]
fn selftest_single_criterion() {
    let o = run(&["selftest", "--only", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("PASS [ 3]"));
}

#[test]
fn an_critical_values() {
    let o = run(&["an-critical", "--n", "2", "--s", "-3,1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v = frobforge::json::parse(&stdout(&o)).unwrap();
    let mut re: Vec<f64> = frobforge::json::complex_vec_from_json(&v).unwrap().iter().map(|z| z.re).collect();
    re.sort_by(f64::total_cmp);
    assert!((re[0] + 1.0).abs() < 1e-12 && (re[1] - 3.0).abs() < 1e-12);
}

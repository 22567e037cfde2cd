use denjoy_twist::{BuildDocument, Side};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::OnceLock;
use tempfile::TempDir;

const SMALL: [&str; 4] = ["-D", "N=5000", "-D", "K_orbit=60"];

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_denjoy-twist"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// A small build shared by the read-only tests.
fn small_build() -> &'static (TempDir, PathBuf) {
    static BUILD: OnceLock<(TempDir, PathBuf)> = OnceLock::new();
    BUILD.get_or_init(|| {
        let dir = TempDir::new().unwrap();
        let path = dir.path().join("build.json");
        let mut args = vec!["build", "--quiet", "--out", path.to_str().unwrap()];
        args.extend(SMALL);
        let o = run(&args);
        assert!(o.status.success(), "{}", stderr(&o));
        (dir, path)
    })
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn build_is_idempotent_and_echoes_config() {
    let (_, first) = small_build();
    let dir = TempDir::new().unwrap();
    let second = dir.path().join("again.json");
    let mut args = vec!["build", "--quiet", "--out", path_str(&second)];
    args.extend(SMALL);
    assert!(run(&args).status.success());
    let a = fs::read(first).unwrap();
    assert_eq!(a, fs::read(&second).unwrap());
    let doc = BuildDocument::from_json(std::str::from_utf8(&a).unwrap()).unwrap();
    assert_eq!(doc.manifest.config.table_radius, 5000);
    assert_eq!(doc.manifest.config.orbit_radius, 60);
    assert_eq!(doc.manifest.config.dl, 0.2);
}

#[test]
fn config_file_and_flag_override() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# small run\nN = 5000\nK_orbit = 60\nrng_seed = 9\n").unwrap();
    let out = dir.path().join("b.json");
    let o = run(&["build", "--quiet", "--config", path_str(&cfg), "--seed", "4", "--out", path_str(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let doc = BuildDocument::from_json(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(doc.manifest.config.rng_seed, 4);
    assert_eq!(doc.manifest.config.table_radius, 5000);
}

#[test]
fn equal_offsets_rejected() {
    let o = run(&["build", "-D", "dL=0.1", "-D", "dR=0.1", "--out", "/dev/null"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("β₀^R ≠ β₀^L violated"), "{}", stderr(&o));
}

#[test]
fn gate_failure_prints_values() {
    let o = run(&["build", "-D", "C=1", "--out", "/dev/null"]);
    assert!(!o.status.success());
    let err = stderr(&o);
    assert!(err.contains("twist gate") && err.contains("13.125"), "{err}");
}

#[test]
fn verify_small_build_passes() {
    let (dir, build) = small_build();
    let report = dir.path().join("report.json");
    let o = run(&["verify", "--quiet", "--build", path_str(build), "--out", path_str(&report)]);
    assert_eq!(o.status.code(), Some(0), "{}", fs::read_to_string(&report).unwrap_or_default());
    let text = fs::read_to_string(&report).unwrap();
    assert!(text.contains("\"status\": \"pass\""));
}

#[test]
fn tampered_build_fails_with_named_entry() {
    let (_, build) = small_build();
    let mut doc = BuildDocument::from_json(&fs::read_to_string(build).unwrap()).unwrap();
    doc.surgery.slopes = doc.surgery.slopes.with_adjusted(0, Side::Right, 0.01);
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("tampered.json");
    fs::write(&bad, doc.to_json()).unwrap();
    let report = dir.path().join("report.json");
    let o = run(&["verify", "--build", path_str(&bad), "--suites", "acceptance", "--out", path_str(&report)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("phi_c1_on_orbit") && stderr(&o).contains("Fail"));
}

#[test]
fn bad_inputs_exit_two() {
    let (_, build) = small_build();
    let o = run(&["verify", "--build", path_str(build), "--suites", "no_such_suite", "--out", "/dev/null"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("usage"));

    let dir = TempDir::new().unwrap();
    let corrupt = dir.path().join("corrupt.json");
    fs::write(&corrupt, "{\"version\": 1, \"gaps\": [").unwrap();
    let o = run(&["verify", "--build", path_str(&corrupt), "--out", "/dev/null"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["verify", "--build", path_str(&dir.path().join("missing.json")), "--out", "/dev/null"]);
    assert_eq!(o.status.code(), Some(2));

    let o = run(&["orbit", "--build", path_str(build), "--out", "/nonexistent-dir/orbit.csv"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn empty_suite_set_passes() {
    let (dir, build) = small_build();
    let report = dir.path().join("empty.json");
    let o = run(&["verify", "--build", path_str(build), "--suites", "", "--out", path_str(&report)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(fs::read_to_string(&report).unwrap().contains("\"results\": []"));
}

fn csv_rows(path: &Path) -> (String, Vec<Vec<String>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().to_string();
    (header, lines.map(|l| l.split(',').map(str::to_string).collect()).collect())
}

#[test]
fn csv_outputs() {
    let (dir, build) = small_build();
    let curve = dir.path().join("curve.csv");
    let orbit = dir.path().join("orbit.csv");
    assert!(run(&["sample", "--quiet", "--build", path_str(build), "-n", "1000", "--out", path_str(&curve)])
        .status
        .success());
    assert!(run(&["orbit", "--quiet", "--build", path_str(build), "--out", path_str(&orbit)]).status.success());

    let (header, rows) = csv_rows(&curve);
    assert_eq!(header, "theta,psi,phi,h,hprime_left,hprime_right");
    assert_eq!(rows.len(), 1000 + 121);
    let kinks: Vec<f64> = rows.iter().filter(|r| r[4] != r[5]).map(|r| r[0].parse().unwrap()).collect();

    let (header, rows) = csv_rows(&orbit);
    assert_eq!(header, "k,x_k,alpha_k,m_k,beta_L,beta_R");
    assert_eq!(rows.len(), 121);
    let zero = rows.iter().find(|r| r[0] == "0").unwrap();
    assert_ne!(zero[4], zero[5]);
    let mut xs: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    xs.sort_by(f64::total_cmp);
    assert_eq!(kinks, xs, "one-sided columns differ exactly at the orbit rows");
}

#[test]
fn plots_are_valid_svg() {
    let (dir, build) = small_build();
    let plots = dir.path().join("plots");
    let o = run(&["plot", "--quiet", "--build", path_str(build), "--out", path_str(&plots)]);
    assert!(o.status.success(), "{}", stderr(&o));
    for name in ["psi.svg", "phi.svg", "derivatives.svg"] {
        let text = fs::read_to_string(plots.join(name)).unwrap();
        let doc = roxmltree::Document::parse(&text).unwrap();
        assert_eq!(doc.root_element().tag_name().name(), "svg");
        let lines = doc.descendants().filter(|n| n.has_tag_name("polyline")).count();
        assert!(lines > 1, "{name}");
    }
}

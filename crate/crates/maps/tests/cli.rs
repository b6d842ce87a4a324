use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use grazing_maps::report::RunReport;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_grazing-maps"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn grazing-maps")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli-tests");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn classify_paper_example() {
    let o = run(&["classify", "--system", "paper-hamiltonian", "--point", "0,0"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("order 4, L_X^4 H = 6.000000"), "{}", stdout(&o));
}

#[test]
fn classify_exit_codes() {
    let o = run(&["classify", "--system", "parabola2", "--point", "0,0"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).starts_with("order 2"));

    // off the boundary
    let o = run(&["classify", "--system", "monomial4", "--point", "0,1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not on the boundary"));

    // on the boundary but crossing it
    let o = run(&["classify", "--system", "monomial4", "--point", "1,0"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).starts_with("transversal"));
}

#[test]
fn classify_json() {
    let o = run(&["classify", "--system", "monomial4", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["lie"][4].as_f64(), Some(36.0));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["classify"]).status.code(), Some(2));
    assert_eq!(run(&["classify", "--system", "nope"]).status.code(), Some(2));
    assert_eq!(run(&["classify", "--system", "monomial4", "--param", "zeta=1"]).status.code(), Some(2));
    assert_eq!(run(&["sweep", "--system", "monomial4", "--map", "zdm", "--eps", "1e-4:1e-8"]).status.code(), Some(2));
    let bad = scratch("bad.sys");
    std::fs::write(&bad, "dim 2;\nX = [1, ;\nH = y;\n").unwrap();
    assert_eq!(run(&["classify", "--system", path(&bad)]).status.code(), Some(2));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn gate_failure_exit_3() {
    let o = run(&["sweep", "--system", "parabola2", "--map", "zdm"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(o.stdout.is_empty());
}

#[test]
fn system_file_and_params() {
    let f = scratch("quartic.sys");
    std::fs::write(&f, "dim 2;\nparam a = 2;\nX = [1, a*x^3];\nH = y;\nW = [1, 0];\n").unwrap();
    let o = run(&["classify", "--system", path(&f), "--param", "a=5"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).starts_with("order 4, L_X^4 H = 30.000000"));
}

#[test]
fn list_systems() {
    let o = run(&["list-systems"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    for name in ["paper-hamiltonian", "monomial4", "parabola2"] {
        assert!(s.contains(name));
    }
}

#[test]
fn monomial_delta_sweep_fits_quarter_power() {
    let csv = scratch("monomial-delta.csv");
    let o = run(&["sweep", "--system", "monomial4", "--map", "delta", "--eps", "1e-8:1e-4", "--n", "9", "--out", path(&csv)]);
    assert_eq!(o.status.code(), Some(0));
    let o = run(&["fit", path(&csv), "--column", "delta_num", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let slope = v["slope"].as_f64().unwrap();
    assert!((slope - 0.25).abs() <= 1e-4, "slope {slope}");
    assert_eq!(v["window"], serde_json::json!([0, 8]));
}

#[test]
fn paper_zdm_sweep_scaling() {
    let csv = scratch("hamiltonian-zdm.csv");
    let o = run(&["sweep", "--system", "paper-hamiltonian", "--map", "zdm", "--out", path(&csv)]);
    assert_eq!(o.status.code(), Some(0));
    let slope = |col: &str| {
        let o = run(&["fit", path(&csv), "--column", col, "--json"]);
        assert_eq!(o.status.code(), Some(0));
        serde_json::from_str::<serde_json::Value>(&stdout(&o)).unwrap()["slope"].as_f64().unwrap()
    };
    assert!(slope("gap_zdm") >= 0.95);
    assert!((slope("zdm_shift") - 0.75).abs() <= 0.03);
}

#[test]
fn constant_column_has_zero_slope() {
    let csv = scratch("constant.csv");
    std::fs::write(&csv, "eps,c\n1e-8,3\n1e-7,3\n1e-6,3\n1e-5,3\n1e-4,3\n").unwrap();
    let o = run(&["fit", path(&csv), "--column", "c", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["slope"].as_f64().unwrap().abs() <= 1e-10);
}

#[test]
fn fit_errors() {
    let csv = scratch("short.csv");
    std::fs::write(&csv, "eps,c\n1e-8,3\n1e-7,3\n1e-6,3\n").unwrap();
    assert_eq!(run(&["fit", path(&csv), "--column", "c"]).status.code(), Some(2));
    assert_eq!(run(&["fit", path(&csv), "--column", "missing"]).status.code(), Some(2));
    let csv = scratch("zero.csv");
    std::fs::write(&csv, "eps,c\n1e-8,3\n1e-7,0\n1e-6,3\n1e-5,3\n1e-4,3\n1e-3,3\n").unwrap();
    let o = run(&["fit", path(&csv), "--column", "c"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn zero_depth_is_identity_row() {
    let o = run(&["sweep", "--system", "paper-hamiltonian", "--map", "zdm", "--eps", "0:0", "--n", "1", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let r = RunReport::from_json(&stdout(&o)).unwrap();
    assert_eq!(r.rows.len(), 1);
    let row = &r.rows[0];
    assert_eq!(row.numeric.as_ref().unwrap().x4, row.x1);
    assert_eq!(row.x1.as_deref(), Some(&[0.0, 0.0][..]));
}

#[test]
fn run_report_round_trip() {
    let o = run(&["sweep", "--system", "paper-hamiltonian", "--map", "pdm", "--eps", "1e-8:1e-5", "--n", "5", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let r = RunReport::from_json(&text).unwrap();
    assert_eq!(r.rows.len(), 5);
    assert!(!r.fits.is_empty());
    assert_eq!(r.to_json().unwrap(), text.trim_end());
}

#[test]
fn pipeline_is_deterministic() {
    let go = |tag: &str, threads: &str| {
        let csv = scratch(&format!("det-{tag}.csv"));
        let o = bin()
            .env("GRAZING_MAPS_THREADS", threads)
            .args(["sweep", "--system", "paper-hamiltonian", "--map", "pdm", "--n", "7", "--out", path(&csv)])
            .output()
            .unwrap();
        assert_eq!(o.status.code(), Some(0));
        let fit = run(&["fit", path(&csv), "--column", "gap_pdm", "--json"]);
        (std::fs::read(&csv).unwrap(), fit.stdout)
    };
    assert_eq!(go("a", "1"), go("b", "4"));
}

#[test]
fn plot_files() {
    let csv = scratch("plot.csv");
    assert_eq!(run(&["sweep", "--system", "monomial4", "--map", "zdm", "--out", path(&csv)]).status.code(), Some(0));
    let (dat, svg) = (scratch("plot.dat"), scratch("plot.svg"));
    let o = run(&["fit", path(&csv), "--column", "zdm_shift", "--dat", path(&dat), "--svg", path(&svg)]);
    assert_eq!(o.status.code(), Some(0));
    let d = std::fs::read_to_string(&dat).unwrap();
    assert_eq!(d.lines().filter(|l| !l.starts_with('#')).count(), 8);
    assert!(std::fs::read_to_string(&svg).unwrap().contains("<svg"));
}

#[test]
fn single_point_commands() {
    let o = run(&["delta", "--system", "monomial4", "--eps", "1e-4"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("-9.0360200361e-2"));
    for cmd in ["zdm", "pdm"] {
        let o = run(&[cmd, "--system", "paper-hamiltonian", "--eps", "1e-5", "--json"]);
        assert_eq!(o.status.code(), Some(0));
        let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
        assert!(v["gap"].as_f64().unwrap() < 1e-4);
    }
}

#[test]
fn in_process_entry_point() {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = grazing_maps::cli::run(["grazing-maps", "classify", "--system", "monomial4"], &mut out, &mut err);
    assert_eq!(code, 0);
    assert!(String::from_utf8(out).unwrap().starts_with("order 4"));
    assert!(err.is_empty());
}

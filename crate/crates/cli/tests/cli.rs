use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn octgaps(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_octgaps")).current_dir(dir).args(args).output().expect("spawn octgaps")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

#[test]
fn exact_unit_radius_gaps() {
    let dir = tempfile::tempdir().unwrap();
    let o = octgaps(dir.path(), &["gaps", "--k", "0", "--n", "2", "--mode", "exact"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = read(dir.path(), "gaps.csv");
    let gaps: Vec<&str> = csv.lines().skip(1).map(|l| l.rsplit(',').next().unwrap()).collect();
    assert_eq!(gaps, vec!["1/1 + 0/1*sqrt2"; 2]);
    assert!(dir.path().join("gaps.gp").exists());
}

#[test]
fn float_gaps_rows_and_histograms() {
    let dir = tempfile::tempdir().unwrap();
    let o = octgaps(
        dir.path(),
        &["gaps", "--k", "8", "--n", "100000", "--mode", "float", "--out", "gaps.csv", "--octagon"],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = read(dir.path(), "gaps.csv");
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("index,slope,gap"));
    assert_eq!(lines.count(), 100_000);
    for name in ["gaps.hist.csv", "gaps.octagon.hist.csv"] {
        let hist = read(dir.path(), name);
        assert!(hist.starts_with("bin_lo,bin_hi,count,density\n"));
        let mass: f64 = hist
            .lines()
            .skip(1)
            .map(|l| {
                let f: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
                (f[1] - f[0]) * f[3]
            })
            .sum();
        assert!((mass - 1.0).abs() < 1e-9, "{name}: {mass}");
        let gp = name.replace(".csv", ".gp");
        assert!(read(dir.path(), &gp).contains(name));
    }
}

#[test]
fn gaps_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    for out in ["a.csv", "b.csv"] {
        assert_eq!(code(&octgaps(dir.path(), &["gaps", "--n", "5000", "--out", out])), 0);
    }
    assert_eq!(read(dir.path(), "a.csv"), read(dir.path(), "b.csv"));
    assert_eq!(read(dir.path(), "a.hist.csv"), read(dir.path(), "b.hist.csv"));
}

#[test]
fn pdf_table_contract() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&octgaps(dir.path(), &["pdf", "--grid", "0:20:0.05"])), 0);
    let csv = read(dir.path(), "pdf.csv");
    let rows: Vec<(f64, f64, u8)> = csv
        .lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].parse().unwrap(), f[1].parse().unwrap(), f[2].parse().unwrap())
        })
        .collect();
    assert!(rows.windows(2).all(|w| w[0].0 < w[1].0));
    let changes = rows.windows(2).filter(|w| w[0].2 != w[1].2).count();
    assert_eq!(changes, 7);
    for b in [1.0, 2f64.sqrt(), 2.0 * 2f64.sqrt(), 2.0 + 2f64.sqrt(), 4.0, 4.0 * 2f64.sqrt(), 3.0 + 2.0 * 2f64.sqrt()] {
        assert!(rows.iter().any(|r| (r.0 - b).abs() < 1e-15), "breakpoint {b} missing");
    }
    assert!(rows.iter().filter(|r| r.0 < 1.0).all(|r| r.1 == 0.0 && r.2 == 0));
    assert!(read(dir.path(), "pdf.gp").contains("pdf.csv"));
}

#[test]
fn verify_report_and_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let o = octgaps(dir.path(), &["verify", "--out", "r.json"]);
    let report: Value = serde_json::from_str(&read(dir.path(), "r.json")).unwrap();
    let checks = report["checks"].as_array().unwrap();
    let find = |n: &str| checks.iter().find(|c| c["name"] == n).unwrap_or_else(|| panic!("{n}")).clone();
    let cov = find("covolume_total");
    assert!((cov["expected"].as_f64().unwrap() - 7.402203300817).abs() < 1e-9);
    assert_eq!(find("measure_times_area")["expected"].as_f64(), Some(1.0));
    assert_eq!(find("measure_times_area")["computed"].as_f64(), Some(1.0));
    let all_pass = checks.iter().all(|c| c["pass"] == true);
    assert_eq!(report["all_pass"].as_bool(), Some(all_pass));
    assert_eq!(code(&o), if all_pass { 0 } else { 1 });

    let again = octgaps(dir.path(), &["verify", "--out", "r2.json"]);
    assert_eq!(code(&again), code(&o));
    assert_eq!(read(dir.path(), "r.json"), read(dir.path(), "r2.json"));
}

#[test]
fn zero_tolerance_forces_failure() {
    let dir = tempfile::tempdir().unwrap();
    let o = octgaps(dir.path(), &["verify", "--out", "t.json", "--tol-covolume_total", "0"]);
    assert_eq!(code(&o), 1);
    let report: Value = serde_json::from_str(&read(dir.path(), "t.json")).unwrap();
    let c = report["checks"].as_array().unwrap().iter().find(|c| c["name"] == "covolume_total").unwrap().clone();
    assert_eq!(c["tolerance"].as_f64(), Some(0.0));
    assert_eq!(c["pass"], false);
}

#[test]
fn ks_reports() {
    let dir = tempfile::tempdir().unwrap();
    let o = octgaps(dir.path(), &["ks", "--k", "8", "--n", "100000", "--out", "big.json"]);
    let big: Value = serde_json::from_str(&read(dir.path(), "big.json")).unwrap();
    assert_eq!(big["config"]["k"], 8);
    assert_eq!(big["config"]["n"], 100000);
    assert_eq!(big["config"]["mode"], "float");
    assert_eq!(big["report"]["sample_size"], 100000);
    assert!(big["report"]["ks_distance"].as_f64().unwrap() < 0.01);
    assert_eq!(code(&o), 0);

    let o = octgaps(dir.path(), &["ks", "--n", "1000", "--out", "small.json"]);
    let small: Value = serde_json::from_str(&read(dir.path(), "small.json")).unwrap();
    assert_eq!(small["report"]["pass_threshold"].as_f64(), Some(0.05));
    let passed = small["report"]["passed"].as_bool().unwrap();
    assert_eq!(code(&o), if passed { 0 } else { 1 });
}

#[test]
fn trajectory_dump() {
    let dir = tempfile::tempdir().unwrap();
    let o = octgaps(dir.path(), &["trajectory", "--a", "1", "--b", "1", "--n", "2"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = read(dir.path(), "trajectory.csv");
    assert_eq!(csv.lines().next(), Some("step,component,region,k,a,b,return_time"));
    assert_eq!(csv.lines().count(), 3);
    let o = octgaps(dir.path(), &["trajectory", "--a", "1", "--b", "-1 + 1*sqrt2", "--n", "40", "--out", "p.csv"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["gaps", "--mode", "fuzzy"][..],
        &["gaps", "--n", "0"],
        &["gaps", "--n", "1"],
        &["pdf", "--grid", "3:1:0.1"],
        &["pdf", "--grid", "nonsense"],
        &["verify", "--tol-nonexistent", "1"],
        &["verify", "--tol-covolume_total", "-1"],
        &["ks", "--n", "10"],
        &["gaps", "--tol-covolume_total", "1"],
        &["trajectory", "--a", "2", "--b", "0"],
        &["growth", "--k-max", "2"],
        &["frobnicate"],
    ] {
        let o = octgaps(dir.path(), args);
        assert_eq!(code(&o), 2, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
    let o = Command::new(env!("CARGO_BIN_EXE_octgaps"))
        .current_dir(dir.path())
        .env("OCTGAPS_THREADS", "0")
        .args(["growth", "--k-max", "4"])
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
}

#[test]
fn thread_cap_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let run = |threads: &str, out: &str| {
        let o = Command::new(env!("CARGO_BIN_EXE_octgaps"))
            .current_dir(dir.path())
            .env("OCTGAPS_THREADS", threads)
            .args(["growth", "--k-max", "5", "--out", out])
            .output()
            .unwrap();
        assert_eq!(code(&o), 0);
    };
    run("1", "g1.csv");
    run("4", "g4.csv");
    assert_eq!(read(dir.path(), "g1.csv"), read(dir.path(), "g4.csv"));
    assert_eq!(read(dir.path(), "g1.csv").lines().count(), 6);
}

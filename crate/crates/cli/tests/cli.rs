use std::process::{Command, Output};

fn z2mem(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_z2mem"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Data rows (non-comment, non-header) split into cells.
fn rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

fn header(text: &str) -> Vec<String> {
    text.lines()
        .find(|l| !l.starts_with('#'))
        .unwrap()
        .split(',')
        .map(str::to_owned)
        .collect()
}

fn column(text: &str, name: &str) -> Vec<f64> {
    let idx = header(text).iter().position(|h| h == name).unwrap();
    rows(text).iter().map(|r| r[idx].parse().unwrap()).collect()
}

#[test]
fn scan_e1_shape_and_trend() {
    let o = z2mem(&["scan-e1", "--n-min", "6", "--n-max", "13", "--lambdas", "0.5,1.0,1.5"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(rows(&text).len(), 24);
    let e1 = column(&text, "e1");
    assert!(e1[..8].windows(2).all(|w| w[1] > w[0]));
    for k in 0..8 {
        assert!(e1[k] > e1[8 + k] && e1[8 + k] > e1[16 + k]);
    }
    assert!(text.starts_with("# z2mem "));
    assert!(text.contains("# command: scan-e1 --n-min 6 --n-max 13 --lambdas 0.5,1,1.5"));
    assert!(text.contains("not rescaled by N"));
}

#[test]
fn pz_rows_sum_to_one() {
    let o = z2mem(&["pz", "--n", "13", "--lambda", "0.5"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(rows(&text).len(), 14);
    let total: f64 = column(&text, "probability").iter().sum();
    assert!((total - 1.0).abs() < 1e-10);
    let mz = column(&text, "mz");
    assert_eq!(mz.first(), Some(&-13.0));
    assert_eq!(mz.last(), Some(&13.0));
}

#[test]
fn pz_superposed_is_lopsided() {
    let o = z2mem(&["pz", "--n", "9", "--state", "superposed"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let p = column(&text, "probability");
    let mz = column(&text, "mz");
    let positive: f64 = mz.iter().zip(&p).filter(|(m, _)| **m > 0.0).map(|(_, p)| p).sum();
    assert!(positive > 0.99);
}

#[test]
fn output_is_byte_identical_across_runs_and_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let args = ["gap", "--n-min", "4", "--n-max", "10"];
    let mut first: Vec<&str> = args.to_vec();
    first.extend(["--threads", "1", "--out", a.to_str().unwrap()]);
    let mut second: Vec<&str> = args.to_vec();
    second.extend(["--threads", "4", "--out", b.to_str().unwrap()]);
    assert!(z2mem(&first).status.success());
    assert!(z2mem(&second).status.success());
    let ta = std::fs::read(&a).unwrap();
    assert!(!ta.is_empty());
    assert_eq!(ta, std::fs::read(&b).unwrap());
}

#[test]
fn gap_has_fit_and_growing_adiabatic_time() {
    let o = z2mem(&["gap", "--n-min", "4", "--n-max", "11"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let t = column(&text, "adiabatic_time");
    assert!(t.windows(2).all(|w| w[1] > w[0]));
    let gap = column(&text, "gap");
    let ln_gap = column(&text, "ln_gap");
    for (g, l) in gap.iter().zip(&ln_gap) {
        assert!((g.ln() - l).abs() < 1e-12);
    }
    assert!(text.contains("# fit ln(gap) = slope*N + intercept"));
}

#[test]
fn floats_round_trip_through_csv() {
    let o = z2mem(&["e2", "--n-min", "6", "--n-max", "8"]);
    let text = stdout(&o);
    for r in rows(&text) {
        for cell in &r[4..] {
            let x: f64 = cell.parse().unwrap();
            assert_eq!(&format!("{x:.16e}"), cell);
        }
    }
}

#[test]
fn thermal_small_scan() {
    let o = z2mem(&["thermal", "--n", "4", "--lambda", "1.5", "--kt-min", "0.01", "--kt-max", "3", "--kt-points", "6"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(rows(&text).len(), 6);
    let e1 = column(&text, "e1_w");
    assert!(e1.windows(2).all(|w| w[1] <= w[0] + 1e-6));
    assert!(text.contains("pure ground state 2*Re(V) e1="));
}

#[test]
fn stabilizer_passes() {
    let o = z2mem(&["stabilizer", "--n-min", "3", "--n-max", "8"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 6);
}

#[test]
fn rvb_reports_every_identity() {
    let o = z2mem(&["rvb", "--n", "8"]);
    let text = stdout(&o);
    let fails: Vec<&str> = text.lines().filter(|l| l.starts_with("FAIL")).collect();
    // exit status tracks the report exactly
    assert_eq!(o.status.code(), Some(if fails.is_empty() { 0 } else { 4 }));
    for name in ["vb2_vb1_overlap", "swap_coefficient", "vb1_t23_vb1", "vb1_t_vb1", "rvb_t_variance_over_n2"] {
        assert!(text.lines().any(|l| l.starts_with("PASS") && l.contains(name)), "{name}");
    }
}

#[test]
fn exit_codes() {
    assert_eq!(z2mem(&["pz", "--bogus"]).status.code(), Some(1));
    assert_eq!(z2mem(&["nonsense"]).status.code(), Some(1));
    assert_eq!(z2mem(&[]).status.code(), Some(1));
    assert_eq!(z2mem(&["rvb", "--n", "7"]).status.code(), Some(1));
    assert_eq!(z2mem(&["gap", "--n-min", "2", "--n-max", "5"]).status.code(), Some(1));
    assert_eq!(z2mem(&["thermal", "--n", "11"]).status.code(), Some(3));
    assert_eq!(z2mem(&["thermal", "--kt-min", "-1"]).status.code(), Some(1));
    assert_eq!(z2mem(&["--help"]).status.code(), Some(0));
    assert_eq!(z2mem(&["--version"]).status.code(), Some(0));
}

#[test]
fn probes_respect_the_bound_and_the_seed() {
    let args = ["scan-e1", "--n-min", "5", "--n-max", "7", "--lambdas", "0.7", "--probes", "20", "--seed", "3"];
    let a = stdout(&z2mem(&args));
    let b = stdout(&z2mem(&args));
    assert_eq!(a, b);
    for r in column(&a, "probe_ratio") {
        assert!(r > 0.0 && r <= 1.0 + 1e-9);
    }
}

use std::path::Path;
use std::process::{Command, Output};

fn hybridlink(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_hybridlink"));
    cmd.args(args).env_remove("HYBRIDLINK_THREADS");
    if let Some(t) = threads {
        cmd.env("HYBRIDLINK_THREADS", t);
    }
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

/// Header and numeric rows of a CSV, skipping `#` lines.
fn parse(csv: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = csv.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (header, rows)
}

fn col(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn point_reproduces_reference_entanglement() {
    let o = hybridlink(&["point", "--param", "alpha=0.6", "--param", "distance_km=100"], None);
    assert!(o.status.success(), "{}", stderr(&o));
    let (h, rows) = parse(&stdout(&o));
    let e: f64 = rows[0][col(&h, "effective_logneg")].parse().unwrap();
    assert_eq!(format!("{e:.1e}"), "1.3e-4");
}

#[test]
fn distance_sweep_decreases_per_alpha() {
    let o = hybridlink(&["distance-sweep"], None);
    assert!(o.status.success());
    let (h, rows) = parse(&stdout(&o));
    let (a, e) = (col(&h, "alpha"), col(&h, "effective_logneg"));
    for w in rows.windows(2) {
        if w[0][a] == w[1][a] {
            assert!(w[1][e].parse::<f64>().unwrap() < w[0][e].parse::<f64>().unwrap());
        }
    }
    assert_eq!(rows.len(), 3 * 31);
}

#[test]
fn header_records_every_input() {
    let o = hybridlink(&["fig2", "--param", "alpha_grid.count=4"], None);
    let text = stdout(&o);
    assert!(text.starts_with("# hybridlink "));
    assert!(text.contains("# command = fig2\n"));
    assert!(text.contains("# param.alpha_grid = {\"count\":4,\"start\":0.05,\"stop\":1.5}\n"));
    assert!(text.contains("# param.version = 1\n"));
    assert_eq!(parse(&text).1.len(), 5 * 4);
}

#[test]
fn params_override_scenario_file() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(
        dir.path(),
        "s.json",
        r#"{"version": 1, "alpha": 0.3, "distance_km": 50}"#,
    );
    let base = hybridlink(&["point", "--scenario", &file], None);
    let over = hybridlink(&["point", "--scenario", &file, "--param", "alpha=0.6"], None);
    assert!(stdout(&base).contains("# param.alpha = 0.3\n"));
    assert!(stdout(&over).contains("# param.alpha = 0.6\n"));
    assert!(stdout(&over).contains("# param.distance_km = 50.0\n"));
}

#[test]
fn output_is_byte_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    assert!(hybridlink(&["fig6", "--out", a.to_str().unwrap()], Some("1"))
        .status
        .success());
    assert!(hybridlink(&["fig6", "--out", b.to_str().unwrap()], Some("3"))
        .status
        .success());
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn unreachable_targets_are_nan() {
    let o = hybridlink(
        &[
            "fig5",
            "--param",
            "r_targets=[1.0, 1e-8]",
            "--param",
            "alpha_grid={\"start\":0.4,\"stop\":0.6,\"count\":3}",
        ],
        None,
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let (h, rows) = parse(&stdout(&o));
    let d = col(&h, "max_distance_km");
    assert!(rows[..3].iter().all(|r| r[d] == "nan"));
    assert!(rows[3..].iter().all(|r| r[d].parse::<f64>().unwrap() > 200.0));
}

#[test]
fn fidelity_oracle_columns() {
    let o = hybridlink(
        &[
            "fidelity",
            "--param",
            "oracle=true",
            "--param",
            "n_bars=[0.0]",
            "--param",
            "transmittance_grid={\"start\":0.5,\"stop\":1.0,\"count\":2}",
            "--param",
            "cv_dim=12",
        ],
        None,
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let (h, rows) = parse(&stdout(&o));
    assert_eq!(
        h,
        [
            "n_bar",
            "transmittance",
            "x",
            "fidelity",
            "overlap",
            "normalized_overlap"
        ]
    );
    for r in rows {
        assert_eq!(r[col(&h, "fidelity")], "1.00000000e0");
        let n: f64 = r[col(&h, "normalized_overlap")].parse().unwrap();
        assert!((n - 1.0).abs() < 1e-9);
    }
}

#[test]
fn error_categories_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let unknown = write(dir.path(), "u.json", r#"{"version": 1, "alpah": 0.3}"#);
    let o = hybridlink(&["point", "--scenario", &unknown], None);
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).starts_with("error[validation]: "));

    let broken = write(dir.path(), "b.json", "{\n  \"version\": 1,\n  \"alpha\": ,\n}");
    let o = hybridlink(&["point", "--scenario", &broken], None);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));

    let o = hybridlink(&["point", "--param", "eta_o=1.2"], None);
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).contains("eta_o"));

    let o = hybridlink(&["point", "--scenario", "/nonexistent/s.json"], None);
    assert_eq!(o.status.code(), Some(5));
    assert!(stderr(&o).starts_with("error[io]"));

    let o = hybridlink(&["point"], Some("zero"));
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("error[usage]"));

    let o = hybridlink(&["fig7"], None);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn oracle_check_reports_each_suite() {
    let o = hybridlink(&["oracle-check"], None);
    let (h, rows) = parse(&stdout(&o));
    assert_eq!(h[0], "suite");
    let pass = col(&h, "pass");
    let status: Vec<(&str, &str)> = rows.iter().map(|r| (r[0].as_str(), r[pass].as_str())).collect();
    assert_eq!(
        status,
        [
            ("swap", "1.00000000e0"),
            ("lossy", "1.00000000e0"),
            ("fidelity", "0.00000000e0"),
            ("kernel", "1.00000000e0")
        ]
    );
    assert_eq!(o.status.code(), Some(7));
    assert!(stderr(&o).contains("error[check]: failed suites: fidelity"));
}

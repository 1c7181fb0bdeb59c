use std::path::Path;
use std::process::{Command, Output};

fn optokerr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_optokerr"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn value(csv: &str, name: &str) -> f64 {
    csv.lines()
        .find_map(|l| l.strip_prefix(&format!("{name},")))
        .unwrap_or_else(|| panic!("{name} missing from\n{csv}"))
        .parse()
        .unwrap()
}

#[test]
fn linear_kilohertz_convert_to_pi_krad_per_s() {
    let o = optokerr(&["units", "--from-kHz-linear", "400", "--to", "pi-krad/s"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "800");
}

#[test]
fn coefficients_at_the_reference_point() {
    let o = optokerr(&["coeffs", "--N", "350"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("angular, pi*krad/s"));
    assert!((value(&out, "Delta_tilde") - 124600.0).abs() < 1e-6);
    assert!((value(&out, "eta1") - 0.749).abs() < 5e-4);
    assert!((value(&out, "eta2") - 1.741).abs() < 5e-4);
    assert!((value(&out, "s") + 0.504).abs() < 5e-4);
}

#[test]
fn jsonlines_carry_the_same_numbers() {
    let csv = stdout(&optokerr(&["coeffs"]));
    let json = stdout(&optokerr(&["--format", "jsonlines", "coeffs"]));
    let line = json
        .lines()
        .find(|l| l.contains("\"eta1\""))
        .expect("eta1 record");
    let v = line.rsplit(':').next().unwrap().trim_end_matches('}');
    assert_eq!(v.parse::<f64>().unwrap(), value(&csv, "eta1"));
    assert!(json.lines().next().unwrap().starts_with("{\"meta\""));
}

#[test]
fn configuration_errors_exit_with_2() {
    let o = optokerr(&["coeffs", "--set", "bogus=1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bogus"));
}

#[test]
fn numerical_failures_exit_with_3() {
    let o = optokerr(&["coeffs", "--delta", "0", "--Delta", "0", "--Omega", "0"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn help_states_the_unit_convention() {
    for args in [
        &["--help"][..],
        &["coeffs", "--help"],
        &["reproduce", "--help"],
    ] {
        let o = optokerr(args);
        assert!(o.status.success());
        assert!(stdout(&o).contains("angular, pi*krad/s"), "{args:?}");
    }
}

fn read(dir: &Path, name: &str) -> Vec<u8> {
    std::fs::read(dir.join(name)).unwrap()
}

#[test]
fn reproduce_is_bit_identical_across_runs() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for dir in [&a, &b] {
        let o = optokerr(&["reproduce", "fig2a", "--out", dir.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    for name in ["fig2a.csv", "fig2a.gp", "effective.cfg"] {
        assert_eq!(read(&a, name), read(&b, name), "{name}");
    }
}

#[test]
fn effective_configuration_reproduces_the_run() {
    let tmp = tempfile::tempdir().unwrap();
    let first = tmp.path().join("first");
    let again = tmp.path().join("again");
    let o = optokerr(&["reproduce", "fig2b", "--out", first.to_str().unwrap()]);
    assert!(o.status.success());
    let cfg = first.join("effective.cfg");
    let o = optokerr(&[
        "reproduce",
        "fig2b",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        again.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(read(&first, "fig2b.csv"), read(&again, "fig2b.csv"));
}

#[test]
fn unknown_experiment_is_a_configuration_error() {
    let o = optokerr(&["reproduce", "fig9"]);
    assert_eq!(o.status.code(), Some(2));
}

use std::path::PathBuf;
use std::process::{Command, Output};

use bicircle::io::{parse_params, parse_poly};
use bicircle::matrix::C64;
use bicircle::moments::moments_from_density;
use bicircle::poly::BivariatePolynomial;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bicircle"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("bicircle-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn write(name: &str, body: &str) -> String {
    let p = scratch(name);
    std::fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn synth_delta() {
    let p = write("delta.txt", "params 0 0\n0 0 1 0\n");
    let o = run(&["synth", &p]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("0 0 1.0000000000000000e0 0.0000000000000000e0"));
}

#[test]
fn synth_level11_emits_factor() {
    let p = write("deg11.txt", "params 1 1\n1 0 0.3 0.1\n0 1 -0.2 0.4\n1 1 0.25 -0.1\n");
    let o = run(&["synth", &p]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("factor:"));
}

#[test]
fn synth_axis_violation_refused() {
    let p = write("bad.txt", "params 2 1\n1 0 1.2 0\n");
    let o = run(&["synth", &p, "--format", "struct"]);
    assert_eq!(o.status.code(), Some(2));
    let s = stdout(&o);
    assert!(s.contains("\"admissible\": false") && s.contains("|u[i,0]| < 1"), "{s}");
}

#[test]
fn synth_analyze_round_trip() {
    let p = write("rt.txt", "params 2 2\n1 0 0.2 0.1\n0 1 -0.1 0.2\n0 2 0.1 0\n2 0 0 0.1\n-1 1 0.05 0\n1 1 0.1 0\n-2 2 0.02 0.01\n");
    let moments = scratch("rt_moments.txt");
    let params = scratch("rt_params.txt");
    assert_eq!(run(&["synth", &p, "--out", moments.to_str().unwrap()]).status.code(), Some(0));
    assert_eq!(run(&["analyze", moments.to_str().unwrap(), "--out", params.to_str().unwrap()]).status.code(), Some(0));
    let before = parse_params(&std::fs::read_to_string(&p).unwrap()).unwrap();
    let after = parse_params(&std::fs::read_to_string(&params).unwrap()).unwrap();
    assert!(before.max_diff(&after) < 1e-12);
}

#[test]
fn analyze_fixture_and_errors() {
    let mom = moments_from_density(|z, w| 1.0 / (C64::new(4.0, 0.0) + z + w).norm_sqr(), 1, 1, 128, 128).unwrap();
    let p = write("fixture_moments.txt", &bicircle::io::write_moments(&mom));
    let o = run(&["analyze", &p]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("positive_definite: true"));

    let truncated = write("truncated.txt", "moments 1 1\n0 0 1 0\n1 0 0.1 0\n");
    let o = run(&["analyze", &truncated]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not available"));

    let indefinite = write("indefinite.txt", "moments 1 0\n0 0 1 0\n1 0 1.5 0\n");
    assert_eq!(run(&["analyze", &indefinite]).status.code(), Some(2));

    let garbled = write("garbled.txt", "moments 1 0\n0 0 1 0\n1 0 abc 0\n");
    let o = run(&["analyze", &garbled]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
}

#[test]
fn factor_fixture_constant_and_refusal() {
    let f = write("f.txt", "trigpoly 1 1\n0 0 18 0\n1 0 4 0\n0 1 4 0\n1 -1 1 0\n");
    let out = scratch("factor.txt");
    let o = run(&["factor", &f, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let p = parse_poly(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let phase = p.coeff(1, 1) / p.coeff(1, 1).norm();
    let oracle = BivariatePolynomial::from_terms(&[(1, 1, C64::new(4.0, 0.0)), (1, 0, C64::new(1.0, 0.0)), (0, 1, C64::new(1.0, 0.0))]);
    assert!(p.scale(phase.conj()).max_coeff_diff(&oracle) < 1e-9);

    let one = write("one.txt", "trigpoly 0 0\n0 0 1 0\n");
    let o = run(&["factor", &one]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("0 0 1.0000000000000000e0 0.0000000000000000e0"));

    let g = write("g.txt", "trigpoly 1 1\n0 0 3 0\n1 0 0.5 0\n0 1 0.5 0\n");
    let o = run(&["factor", &g]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("verdict: not factorable"));
}

#[test]
fn match_reports_small_error() {
    let p = write("match_params.txt", "params 1 1\n1 0 0.3 0.1\n0 1 -0.2 0.4\n1 1 0.25 -0.1\n");
    let moments = scratch("match_moments.txt");
    assert_eq!(run(&["synth", &p, "--out", moments.to_str().unwrap()]).status.code(), Some(0));
    let synth = stdout(&run(&["synth", &p]));
    let poly: String = synth.split("factor:\n  poly:\n").nth(1).unwrap().lines().take(5).map(|l| format!("{}\n", l.trim())).collect();
    let poly_path = write("match_poly.txt", &poly);
    let o = run(&["match", moments.to_str().unwrap(), &poly_path, "--format", "struct"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["max_error"].as_f64().unwrap() < 1e-7);
}

#[test]
fn examples_agree_and_are_deterministic() {
    for name in ["deg11", "contractive-toeplitz", "blocked-extension"] {
        let a = run(&["example", name, "--grid", "40"]);
        assert_eq!(a.status.code(), Some(0));
        assert!(stdout(&a).contains("disagreements: 0"), "{name}");
        assert_eq!(a.stdout, run(&["example", name, "--grid", "40"]).stdout);
    }
    let o = stdout(&run(&["example", "deg11", "--grid", "3"]));
    let verdicts: Vec<&str> = o.lines().filter(|l| l.contains("algorithmic=")).map(|l| if l.contains("algorithmic=true") { "ok" } else { "refused" }).collect();
    assert_eq!(verdicts, ["ok", "ok", "refused"]);
}

#[test]
fn bad_flags_are_input_errors() {
    let p = write("flags.txt", "params 0 0\n0 0 1 0\n");
    assert_eq!(run(&["synth", &p, "--tol", "-1"]).status.code(), Some(1));
    assert_eq!(run(&["synth", &p, "--level", "1"]).status.code(), Some(1));
    assert_eq!(run(&["synth", &p, "--level", "1", "1"]).status.code(), Some(1));
    assert_eq!(run(&["nonsense"]).status.code(), Some(1));
}

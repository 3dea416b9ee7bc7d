use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qmeixner")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn rows(csv: &str) -> Vec<Vec<f64>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect()
}

#[test]
fn classify_json_negative_binomial() {
    let o = run(&["classify", "--family", "bose", "--alpha", "0.6", "--beta", "1.0", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["class"], "NegativeBinomial");
    assert_eq!(v["params"]["r"], 0.5);
    assert!((v["params"]["p"].as_f64().unwrap() - 8.0 / 9.0).abs() < 1e-15);
    assert!((v["params"]["mu"].as_f64().unwrap() - 0.1).abs() < 1e-15);
    assert!((v["params"]["d"].as_f64().unwrap() + 1.6).abs() < 1e-15);
    assert_eq!(v["convention"], "E[exp(itX)]");
}

#[test]
fn classify_fermi_atoms() {
    let o = run(&["classify", "--family", "fermi", "--alpha", "3", "--beta", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("atoms: 8 (weight 0.2), -2 (weight 0.8)"), "{}", stdout(&o));
}

#[test]
fn classify_degenerate_input() {
    let o = run(&["classify", "--family", "bose", "--alpha", "0", "--beta", "0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("alpha^2 + beta^2 > 0"));
    let o = run(&["classify", "--family", "bose", "--alpha", "inf", "--beta", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["classify", "--family", "bose", "--alpha", "x", "--beta", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn cf_fermi_first_row() {
    let o = run(&["cf", "--family", "fermi", "--alpha", "1", "--beta", "1", "--t-max", "1", "--steps", "11"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("# branch_continuous=true\nt,re_f,im_f,abs_f\n"));
    let r = rows(&text);
    assert_eq!(r.len(), 11);
    assert_eq!(&r[0][..3], &[0.0, 1.0, 0.0]);
}

#[test]
fn cf_bose_modulus() {
    let o = run(&["cf", "--family", "bose", "--alpha", "1", "--beta", "1", "--t-max", "1", "--steps", "11"]);
    let r = rows(&stdout(&o));
    assert!((r[10][3] - 2f64.powf(-0.25)).abs() < 1e-12);
}

#[test]
fn cf_matrices_match_one_mode() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "m.json", r#"{"n":1,"A":[[{"re":0.5,"im":0}]],"C":[[{"re":1.0,"im":0}]]}"#);
    let nm = run(&["cf", "--matrices", &m, "--t-max", "3", "--steps", "61"]);
    let one = run(&["cf", "--family", "bose", "--alpha", "0.5", "--beta", "1.0", "--t-max", "3", "--steps", "61"]);
    assert_eq!(nm.status.code(), Some(0));
    let (a, b) = (rows(&stdout(&nm)), rows(&stdout(&one)));
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x[0], y[0]);
        assert!((x[1] - y[1]).abs() <= 1e-10 && (x[2] - y[2]).abs() <= 1e-10);
    }
    let bad = write(dir.path(), "bad.json", r#"{"n":1,"A":[[{"re":0.5}]],"C":[[{"re":1.0,"im":0}]]}"#);
    let o = run(&["cf", "--matrices", &bad, "--t-max", "3", "--steps", "61"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("$.A[0][0].im"));
}

#[test]
fn cf_writes_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cf.csv");
    let o = run(&["cf", "--family", "fermi", "--alpha", "1", "--beta", "1", "--t-max", "1", "--steps", "3", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).is_empty());
    assert_eq!(rows(&std::fs::read_to_string(out).unwrap()).len(), 3);
}

#[test]
fn verify_exit_codes() {
    let o = run(&["verify", "--family", "fermi", "--alpha", "1", "--beta", "1", "--tol", "1e-12"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = run(&["verify", "--family", "bose", "--alpha", "0.5", "--beta", "1.0", "--cutoff", "128", "--t-max", "2", "--tol", "1e-8"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = run(&["verify", "--family", "bose", "--alpha", "0.5", "--beta", "1.0", "--cutoff", "8", "--t-max", "2", "--tol", "1e-8"]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["pass"], false);
    let o = run(&["verify", "--family", "bose", "--alpha", "0.5", "--beta", "1.0", "--cutoff", "20000"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn sample_and_density_commands() {
    let dir = tempfile::tempdir().unwrap();
    let dirac = write(dir.path(), "d.json", r#"{"class":"DiracDelta","params":{"x0":0},"convention":"E[exp(itX)]"}"#);
    let o = run(&["sample", "--dist-json", &dirac, "--n", "3", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let r = rows(&stdout(&o));
    assert_eq!(r, vec![vec![0.0], vec![0.0], vec![0.0]]);

    let gamma = write(dir.path(), "g.json", r#"{"class":"Gamma","params":{"a":0.5,"theta":1,"mu":0}}"#);
    let o = run(&["density", "--dist-json", &gamma, "--x-min", "1", "--x-max", "1", "--steps", "1"]);
    let r = rows(&stdout(&o));
    assert!((r[0][1] - 0.2075537487102974).abs() < 1e-12);

    let nb = write(dir.path(), "nb.json", r#"{"class":"NegativeBinomial","params":{"r":0.5,"p":0.8888888888888888,"mu":0.1,"d":-1.6}}"#);
    let o = run(&["density", "--dist-json", &nb, "--x-min", "0", "--x-max", "1", "--steps", "3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("atomic law: use atoms output"));
    let o = run(&["atoms", "--dist-json", &nb]);
    let r = rows(&stdout(&o));
    assert!((r[0][1] - (8.0f64 / 9.0).sqrt()).abs() < 1e-12);

    let broken = write(dir.path(), "b.json", r#"{"class":"Gamma","params":{"a":"half","theta":1,"mu":0}}"#);
    let o = run(&["sample", "--dist-json", &broken, "--n", "3", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("$.params.a"));
    let o = run(&["sample", "--dist-json", &dirac, "--n", "3", "--seed", "-4"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn outputs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "m.json", r#"{"class":"MeixnerV","params":{"a":1.6,"b":1.2870022175865685,"delta":0.25,"mu":-0.3}}"#);
    let a = run(&["sample", "--dist-json", &m, "--n", "20000", "--seed", "9"]);
    let b = run(&["sample", "--dist-json", &m, "--n", "20000", "--seed", "9"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let a = run(&["cf", "--family", "bose", "--alpha", "0.3", "--beta", "2", "--t-min", "-5", "--t-max", "5", "--steps", "101"]);
    let b = run(&["cf", "--family", "bose", "--alpha", "0.3", "--beta", "2", "--t-min", "-5", "--t-max", "5", "--steps", "101"]);
    assert_eq!(a.stdout, b.stdout);
}

//! Golden-file and exit-code tests against the built binary.
//! Set `KACFUSION_BLESS=1` to rewrite the golden files.

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

const FLOAT_TOL: f64 = 1e-10;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_kacfusion"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn kacfusion")
}

fn golden_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

/// Structural equality with a tolerance on floats.
fn close(a: &Value, b: &Value, path: &str) -> Result<(), String> {
    match (a, b) {
        (Value::Number(x), Value::Number(y)) => {
            let (x, y) = (x.as_f64().unwrap_or(f64::NAN), y.as_f64().unwrap_or(f64::NAN));
            if (x - y).abs() <= FLOAT_TOL * x.abs().max(y.abs()).max(1.0) {
                Ok(())
            } else {
                Err(format!("{path}: {x} vs {y}"))
            }
        }
        (Value::Array(x), Value::Array(y)) => {
            if x.len() != y.len() {
                return Err(format!("{path}: length {} vs {}", x.len(), y.len()));
            }
            x.iter().zip(y).enumerate().try_for_each(|(i, (u, v))| close(u, v, &format!("{path}[{i}]")))
        }
        (Value::Object(x), Value::Object(y)) => {
            let kx: Vec<_> = x.keys().collect();
            let ky: Vec<_> = y.keys().collect();
            if kx != ky {
                return Err(format!("{path}: keys {kx:?} vs {ky:?}"));
            }
            x.iter().try_for_each(|(k, u)| close(u, &y[k], &format!("{path}.{k}")))
        }
        _ if a == b => Ok(()),
        _ => Err(format!("{path}: {a} vs {b}")),
    }
}

fn golden(name: &str, args: &[&str]) {
    let out = run(args);
    assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    let path = golden_path(name);
    if std::env::var_os("KACFUSION_BLESS").is_some() {
        std::fs::write(&path, &out.stdout).expect("write golden");
        return;
    }
    let got: Value = serde_json::from_slice(&out.stdout).expect("stdout is JSON");
    let want: Value = serde_json::from_str(&std::fs::read_to_string(&path).expect("golden file")).expect("golden JSON");
    if let Err(e) = close(&got, &want, "$") {
        panic!("{name} differs from golden output at {e}");
    }
}

#[test]
fn golden_rootsys() {
    golden("rootsys_g2.json", &["rootsys", "--type", "G2"]);
}

#[test]
fn golden_enumerate() {
    golden("enumerate_a1_3_2.json", &["enumerate", "--type", "A1", "--pq", "3,2"]);
}

#[test]
fn golden_smatrix() {
    golden("smatrix_a1_2_5.json", &["smatrix", "--type", "A1", "--pq", "2,5"]);
}

#[test]
fn golden_tmatrix() {
    golden("tmatrix_a1_k1_2.json", &["tmatrix", "--type", "A1", "--level", "1/2"]);
}

#[test]
fn golden_wlabels() {
    golden("wlabels_a1_3_4.json", &["wlabels", "--type", "A1", "--pq", "3,4"]);
}

#[test]
fn golden_fusion() {
    golden("fusion_a1_3_4.json", &["fusion", "--type", "A1", "--pq", "3,4"]);
}

#[test]
fn golden_factorize() {
    golden("factorize_a1_3_5.json", &["factorize", "--type", "A1", "--pq", "3,5"]);
}

#[test]
fn golden_chars() {
    golden(
        "chars_a1_k1_2.json",
        &["chars-eval", "--type", "A1", "--level", "1/2", "--tau", "i", "--x", "0.1", "--label", "0"],
    );
}

#[test]
fn schema_keys() {
    let keys = |args: &[&str]| -> Vec<String> {
        let v: Value = serde_json::from_slice(&run(args).stdout).expect("JSON");
        v.as_object().expect("object").keys().cloned().collect()
    };
    assert_eq!(keys(&["smatrix", "--type", "A1", "--pq", "3,4"]), ["im", "kind", "labels", "p", "q", "re", "type"]);
    assert_eq!(keys(&["fusion", "--type", "A1", "--pq", "2,5"]), ["N", "labels", "max_rounding_error"]);
    assert_eq!(
        keys(&["chars-eval", "--type", "A1", "--pq", "3,1", "--x", "0.2", "--label", "1"]),
        ["N", "label", "tail_bound", "value"]
    );
    let v: Value = serde_json::from_slice(&run(&["enumerate", "--type", "A1", "--level", "-4/3"]).stdout).unwrap();
    let l = v["labels"][0].as_object().unwrap();
    assert_eq!(l.keys().collect::<Vec<_>>(), ["beta", "lambda_bar", "nu", "ybar"]);
}

#[test]
fn nested_aliases() {
    let a = run(&["walg", "fusion", "--type", "A1", "--pq", "3,4"]);
    let b = run(&["fusion", "--type", "A1", "--pq", "3,4"]);
    assert_eq!(a.stdout, b.stdout);
    let c = run(&["chars", "eval", "--type", "A1", "--level", "1/2", "--tau", "i", "--x", "0.1,"]);
    assert_eq!(c.status.code(), Some(1));
    let d = run(&["chars", "eval", "--type", "A1", "--level", "1/2", "--tau", "i", "--x", "0.1"]);
    assert_eq!(d.status.code(), Some(0));
}

#[test]
fn exit_codes() {
    let out = run(&["factorize", "--type", "A1", "--pq", "5,2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("hypothesis (q,|J|)=1 violated"));
    assert_eq!(run(&["smatrix", "--type", "A1", "--pq", "5,2", "--verify"]).status.code(), Some(0));
    assert_eq!(run(&["smatrix", "--type", "A1", "--pq", "6,4"]).status.code(), Some(1));
    assert_eq!(run(&["smatrix", "--type", "A1", "--pq", "5,2", "--unknown"]).status.code(), Some(1));
    assert_eq!(run(&["wlabels", "--type", "G2", "--pq", "7,3"]).status.code(), Some(1));
    assert_eq!(run(&["fusion", "--type", "A1", "--pq", "3,4"]).status.code(), Some(0));
}

#[test]
fn smatrix_verify_report() {
    let out = run(&["smatrix", "--type", "A1", "--pq", "5,2", "--verify"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["labels"].as_array().unwrap().len(), 8);
    assert_eq!(v["verification"]["passed"], Value::Bool(true));
    assert!(v["verification"]["max_deviation"].as_f64().unwrap() < 1e-9);
}

#[test]
fn seeds_and_threads_are_deterministic() {
    let args = ["verify", "--type", "A1", "--pq", "3,4", "--seed", "11"];
    let a = run(&args);
    let b = bin().args(args).env("KACFUSION_THREADS", "1").output().unwrap();
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    let (va, vb): (Value, Value) =
        (serde_json::from_slice(&a.stdout).unwrap(), serde_json::from_slice(&b.stdout).unwrap());
    assert_eq!(va["characters"]["tau"], vb["characters"]["tau"]);
    close(&va, &vb, "$").unwrap();
    let c = run(&["verify", "--type", "A1", "--pq", "3,4", "--seed", "12"]);
    let vc: Value = serde_json::from_slice(&c.stdout).unwrap();
    assert_ne!(va["characters"]["tau"], vc["characters"]["tau"]);
}

#[test]
fn theta_check_passes() {
    let out = run(&["theta-check", "--type", "A2", "--m", "3"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn csv_output() {
    let out = run(&["smatrix", "--type", "A1", "--pq", "3,2", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("i,j,label_i,label_j,abs,arg_over_2pi"));
    assert_eq!(text.lines().count(), 1 + 16);
}

use std::io::Write;
use std::process::{Command, Output};

fn qonsager(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qonsager")).args(args).output().expect("binary runs")
}

fn config(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

fn params_config(spins2: &str) -> String {
    format!(
        r#"{{
  "params": {{
    "spins2": {spins2},
    "q": [0.6, 0.45],
    "eta": [0.3, -0.2],
    "etaprime": [-0.4, 0.1],
    "exp_alpha": [1.1, 0.5],
    "exp_alphastar": [0.7, -0.6],
    "evals": [[0.9, 0.3], [0.8, -0.4], [1.2, 0.2]]
  }}
}}"#
    )
    .replace(
        "\"evals\": [[0.9, 0.3], [0.8, -0.4], [1.2, 0.2]]",
        match spins2.matches(',').count() {
            0 => "\"evals\": [[0.9, 0.3]]",
            1 => "\"evals\": [[0.9, 0.3], [0.8, -0.4]]",
            _ => "\"evals\": [[0.9, 0.3], [0.8, -0.4], [1.2, 0.2]]",
        },
    )
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn relations_on_a_config_pass() {
    let cfg = config(&params_config("[1, 2]"));
    let out = qonsager(&["verify", "--suite", "relations", "--config", cfg.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = json(&out);
    assert!(report["summary"]["total"].as_u64().unwrap() > 0);
    for a in report["assertions"].as_array().unwrap() {
        assert!(a["residual"].as_f64().unwrap() <= 1e-8);
    }
}

#[test]
fn zero_spin_is_a_config_error() {
    let cfg = config(&params_config("[1, 0]"));
    let out = qonsager(&["verify", "--config", cfg.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let out = qonsager(&["matrix", "--op", "W0", "--spins", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_config_reports_the_line() {
    let cfg = config("{\n  \"seed\": 3,\n  \"suites\": [relations]\n}\n");
    let out = qonsager(&["verify", "--config", cfg.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3"), "{err}");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(qonsager(&["matrix", "--op", "W7", "--spins", "1"]).status.code(), Some(2));
    assert_eq!(qonsager(&["verify", "--suite", "everything", "--spins", "1"]).status.code(), Some(2));
    assert_eq!(qonsager(&["verify", "--spins", "1", "--tol", "qdg"]).status.code(), Some(2));
}

#[test]
fn seeded_runs_are_byte_identical() {
    let args = ["verify", "--suite", "all", "--seed", "7", "--spins", "2,1"];
    let a = qonsager(&args);
    let b = qonsager(&args);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn w0_in_f_basis_is_diagonal() {
    let cfg = config(&params_config("[2]"));
    let out =
        qonsager(&["matrix", "--op", "W0", "--level", "1", "--basis", "F", "--config", cfg.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let m = json(&out);
    let dim = m["dim"].as_u64().unwrap() as usize;
    assert_eq!(dim, 3);
    let entries = m["entries"].as_array().unwrap();
    let scale = entries.iter().map(|e| e[0].as_f64().unwrap().hypot(e[1].as_f64().unwrap())).fold(0.0, f64::max);
    for r in 0..dim {
        for c in 0..dim {
            if r != c {
                let e = &entries[r * dim + c];
                assert!(e[0].as_f64().unwrap().hypot(e[1].as_f64().unwrap()) < 1e-9 * scale);
            }
        }
    }
}

#[test]
fn spin_half_monomial_matrix() {
    let cfg = config(&params_config("[1]"));
    let out = qonsager(&["matrix", "--op", "W0", "--config", cfg.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let m = json(&out);
    assert_eq!(m["dim"], 2);
    assert_eq!(m["entries"].as_array().unwrap().len(), 4);
}

#[test]
fn overlap_tensor_for_spin_half() {
    let cfg = config(&params_config("[1]"));
    let out = qonsager(&["overlaps", "--kind", "C", "--config", cfg.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["tensor"]["entries"].as_array().unwrap().len(), 4);
    assert!(v["reconstruction_residual"].as_f64().unwrap() < 1e-8);
}

#[test]
fn fusion_check_passes() {
    let out = qonsager(&["overlaps", "--kind", "fusion-check", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(json(&out)["max_delta"].as_f64().unwrap() <= 1e-8);
}

#[test]
fn printed_closed_form_check_lists_mismatches() {
    let cfg = config(&params_config("[2, 2]"));
    let out = qonsager(&["overlaps", "--kind", "appendixB-check", "--config", cfg.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["corrected"]["mismatched_labels"].as_array().unwrap().len(), 0);
    let printed: Vec<&str> =
        v["as_printed"]["mismatched_labels"].as_array().unwrap().iter().map(|l| l.as_str().unwrap()).collect();
    assert!(printed.contains(&"B[01]") && printed.contains(&"C[0-1]"), "{printed:?}");
}

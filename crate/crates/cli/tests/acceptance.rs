//! Acceptance run: the `validate` command twice with one seed. Criteria 1
//! to 8 are read from the first report; criterion 9 compares the two runs
//! byte for byte.

use std::process::ExitCode;
use std::time::Instant;

use serde_json::Value;

const SEED: &str = "20261016";

fn validate() -> (i32, Vec<u8>, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = frizione_cli::run(["frizione", "validate", "--seed", SEED, "--format", "json"], &mut out, &mut err);
    (code, out, String::from_utf8_lossy(&err).into_owned())
}

fn line(id: u64, name: &str, passed: bool, detail: &str) {
    let verdict = if passed { "PASS" } else { "FAIL" };
    println!("criterion {id} [{verdict}] {name}{detail}");
}

fn main() -> ExitCode {
    let started = Instant::now();
    let (code, first, stderr) = validate();
    let first_secs = started.elapsed().as_secs_f64();
    let (_, second, _) = validate();

    let mut all = true;
    match serde_json::from_slice::<Value>(&first) {
        Ok(doc) => {
            let criteria = doc["data"].as_array().cloned().unwrap_or_default();
            for c in &criteria {
                let passed = c["passed"].as_bool() == Some(true);
                let checks = c["checks"].as_array().map_or(0, Vec::len);
                let failed: Vec<String> = c["checks"]
                    .as_array()
                    .into_iter()
                    .flatten()
                    .filter(|k| k["passed"] != Value::Bool(true))
                    .map(|k| k["label"].as_str().unwrap_or("?").to_string())
                    .collect();
                let mut detail = format!(" ({checks} checks)");
                if !failed.is_empty() {
                    detail.push_str(&format!("; failed: {}", failed.join(", ")));
                }
                if let Some(e) = c["error"].as_str() {
                    detail.push_str(&format!("; error: {e}"));
                }
                line(c["id"].as_u64().unwrap_or(0), c["name"].as_str().unwrap_or("?"), passed, &detail);
                all &= passed;
            }
            all &= criteria.len() == 8;
        }
        Err(e) => {
            println!("validate produced no report (exit {code}): {e}; stderr: {stderr}");
            all = false;
        }
    }
    let identical = !first.is_empty() && first == second;
    line(9, "determinism", identical, &format!(" ({} bytes per report)", first.len()));
    all &= identical && code == 0;

    println!("suite took {first_secs:.1} s per run; exit code {code}");
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

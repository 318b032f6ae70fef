//! Helpers for the acceptance suite in `tests/acceptance.rs`.

use std::io::Write;
use std::path::Path;

use serde_json::Value;

/// Run one `telegraph` command line in-process with output under `out`
/// and return its report as JSON.
pub fn telegraph(args: &[&str], out: &Path) -> Value {
    let out = out.display().to_string();
    let argv = std::iter::once("telegraph")
        .chain(args.iter().copied())
        .chain(["--out", out.as_str()]);
    let report = telegraph_cli::run_from(argv).unwrap_or_else(|e| panic!("telegraph {args:?}: {e}"));
    serde_json::to_value(&report).expect("report serializes")
}

/// Print the verdict line of criterion `n`, then fail the test if it is red.
/// The line goes to the process stdout so it shows even when output is
/// captured.
pub fn verdict(n: u32, pass: bool, detail: String) {
    let line = format!("{} criterion {n}: {detail}\n", if pass { "PASS" } else { "FAIL" });
    let _ = std::io::stdout().lock().write_all(line.as_bytes());
    assert!(pass, "criterion {n}: {detail}");
}

/// A JSON number, or NaN for anything else.
pub fn num(v: &Value) -> f64 {
    v.as_f64().unwrap_or(f64::NAN)
}

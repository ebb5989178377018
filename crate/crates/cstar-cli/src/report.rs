//! Report assembly.
//!
//! Every invocation emits exactly one JSON document on stdout. The document
//! is byte-identical across runs with the same inputs, flags, and seed: maps
//! are sorted, check order is fixed, and nothing derives from wall-clock
//! time or memory addresses.

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

#[derive(Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub command: String,
    /// SHA-256 over the command name, the flag line, and the raw input bytes.
    pub inputs_digest: String,
    pub tol: f64,
    pub seed: u64,
    pub flags: Value,
    pub results: Value,
    pub checks: Vec<Check>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Report {
    /// 0: every check passed. 1: some check failed. 2: the run errored
    /// before checks could be evaluated.
    pub fn exit_code(&self) -> i32 {
        if self.error.is_some() {
            2
        } else if self.pass {
            0
        } else {
            1
        }
    }

    pub fn render(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

pub fn digest(command: &str, flag_line: &str, input_bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(command.as_bytes());
    h.update(b"\n");
    h.update(flag_line.as_bytes());
    h.update(b"\n");
    h.update(input_bytes);
    let out = h.finalize();
    let mut hex = String::with_capacity(2 * out.len());
    for b in out {
        hex.push_str(&format!("{b:02x}"));
    }
    hex
}

/// Ordered accumulator for named pass/fail checks.
#[derive(Debug, Default)]
pub struct Checks(pub Vec<Check>);

impl Checks {
    pub fn push(&mut self, name: impl Into<String>, pass: bool, detail: String) {
        self.0.push(Check { name: name.into(), pass, detail });
    }

    /// Records `value <= bound`, keeping both sides in the detail.
    pub fn leq(&mut self, name: impl Into<String>, value: f64, bound: f64) {
        self.push(name, value <= bound, format!("{value:.3e} <= {bound:.3e}"));
    }

    pub fn eq_usize(&mut self, name: impl Into<String>, got: usize, want: usize) {
        self.push(name, got == want, format!("{got} == {want}"));
    }

    pub fn all_pass(&self) -> bool {
        self.0.iter().all(|c| c.pass)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_is_stable_and_input_sensitive() {
        let a = digest("spectrum", "tol=1e-9;seed=0", b"{}");
        let b = digest("spectrum", "tol=1e-9;seed=0", b"{}");
        let c = digest("spectrum", "tol=1e-9;seed=1", b"{}");
        let d = digest("spectrum", "tol=1e-9;seed=0", b"{ }");
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_ne!(a, d);
        assert_eq!(a.len(), 64);
    }

    #[test]
    fn exit_codes_follow_outcome() {
        let mut r = Report {
            command: "x".into(),
            inputs_digest: String::new(),
            tol: 1e-9,
            seed: 0,
            flags: Value::Null,
            results: Value::Null,
            checks: vec![],
            pass: true,
            error: None,
        };
        assert_eq!(r.exit_code(), 0);
        r.pass = false;
        assert_eq!(r.exit_code(), 1);
        r.error = Some("boom".into());
        assert_eq!(r.exit_code(), 2);
    }

    #[test]
    fn error_field_is_omitted_when_absent() {
        let r = Report {
            command: "x".into(),
            inputs_digest: "d".into(),
            tol: 1e-9,
            seed: 0,
            flags: serde_json::json!({}),
            results: serde_json::json!({}),
            checks: vec![Check { name: "c".into(), pass: true, detail: "ok".into() }],
            pass: true,
            error: None,
        };
        let text = r.render();
        assert!(!text.contains("\"error\""));
        assert!(text.ends_with('\n'));
    }
}

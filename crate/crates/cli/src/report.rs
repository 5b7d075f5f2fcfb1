//! Command reports: one verdict, optional witnesses, and a machine-readable
//! payload. `--format json` emits the serialized form verbatim.

use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub verdict: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub witnesses: Vec<String>,
    pub payload: Value,
}

impl Report {
    pub fn new(command: &str, verdict: &str, witnesses: Vec<String>, payload: Value) -> Self {
        Report {
            command: command.to_string(),
            verdict: verdict.to_string(),
            witnesses,
            payload,
        }
    }

    pub fn pass(command: &str, payload: Value) -> Self {
        Report::new(command, "pass", Vec::new(), payload)
    }

    pub fn fail(command: &str, witnesses: Vec<String>, payload: Value) -> Self {
        Report::new(command, "fail", witnesses, payload)
    }

    /// 0 for passing verdicts, 1 for violations and anholonomic results.
    pub fn exit_code(&self) -> i32 {
        match self.verdict.as_str() {
            "fail" | "anholonomic" => 1,
            _ => 0,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{}: {}\n", self.command, self.verdict.to_uppercase());
        for w in &self.witnesses {
            out.push_str(&format!("  witness: {w}\n"));
        }
        if !self.payload.is_null() {
            out.push_str(
                &serde_json::to_string_pretty(&self.payload).expect("payloads serialize"),
            );
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn json_round_trip() {
        let report = Report::new(
            "holonomy",
            "anholonomic",
            vec!["generator 0 is not an automorphism".into()],
            json!({"group_order": 5, "generators": 1}),
        );
        let parsed: Report = serde_json::from_str(&report.to_json()).unwrap();
        assert_eq!(parsed, report);

        let plain = Report::pass("validate", json!({"points": 3}));
        let parsed: Report = serde_json::from_str(&plain.to_json()).unwrap();
        assert_eq!(parsed, plain);
    }

    #[test]
    fn exit_codes_follow_verdicts() {
        assert_eq!(Report::pass("validate", serde_json::Value::Null).exit_code(), 0);
        assert_eq!(
            Report::fail("validate", vec![], serde_json::Value::Null).exit_code(),
            1
        );
        assert_eq!(
            Report::new("holonomy", "anholonomic", vec![], serde_json::Value::Null).exit_code(),
            1
        );
        assert_eq!(
            Report::new("holonomy", "holonomic", vec![], serde_json::Value::Null).exit_code(),
            0
        );
    }
}

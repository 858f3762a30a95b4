//! Report envelopes and their JSON/CSV renderings.

use std::io::Write;
use std::path::Path;
use std::time::SystemTime;

use serde::Serialize;
use serde_json::{Map, Number, Value};
use ustar_core::report::CheckRecord;

use crate::Failure;

pub const SCHEMA_VERSION: u32 = 1;

/// Field excluded when comparing reports for reproducibility.
pub const TIMESTAMP_FIELD: &str = "generated_at";

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum, serde::Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// A report under construction: a command name, its configuration, the
/// check records and any command-specific payload.
pub struct Envelope {
    pub command: &'static str,
    pub config: Value,
    pub checks: Vec<CheckRecord>,
    pub extra: Map<String, Value>,
}

impl Envelope {
    pub fn new(command: &'static str, config: impl Serialize) -> Self {
        Self { command, config: to_value(config), checks: Vec::new(), extra: Map::new() }
    }

    pub fn insert(&mut self, key: &str, value: impl Serialize) {
        self.extra.insert(key.into(), to_value(value));
    }

    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn to_json(&self) -> String {
        let mut root = Map::new();
        root.insert("schema_version".into(), Value::from(SCHEMA_VERSION));
        root.insert(TIMESTAMP_FIELD.into(), Value::from(timestamp()));
        root.insert("command".into(), Value::from(self.command));
        root.insert("config".into(), self.config.clone());
        root.insert("pass".into(), Value::from(self.pass()));
        root.insert("checks".into(), to_value(&self.checks));
        for (k, v) in &self.extra {
            root.insert(k.clone(), v.clone());
        }
        let mut s = serde_json::to_string_pretty(&full_precision(Value::Object(root))).expect("serializable");
        s.push('\n');
        s
    }

    /// One row per check.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["check_name", "max_residual", "tolerance", "pass", "worst_point", "note"]).expect("in-memory");
        for c in &self.checks {
            let point: Vec<String> = c.worst_point.iter().map(|v| float(*v)).collect();
            w.write_record([
                c.check_name.clone(),
                float(c.max_residual),
                float(c.tolerance),
                c.pass.to_string(),
                point.join(";"),
                c.note.clone().unwrap_or_default(),
            ])
            .expect("in-memory");
        }
        String::from_utf8(w.into_inner().expect("in-memory")).expect("utf-8")
    }

    /// Writes the report to `out`, or to stdout when no path is given.
    pub fn write(&self, format: Format, out: Option<&Path>) -> Result<(), Failure> {
        let text = match format {
            Format::Json => self.to_json(),
            Format::Csv => self.to_csv(),
        };
        match out {
            Some(p) => std::fs::write(p, text).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", p.display()))),
            None => std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(|e| Failure::Runtime(format!("cannot write report: {e}"))),
        }
    }
}

fn timestamp() -> String {
    humantime::format_rfc3339_seconds(SystemTime::now()).to_string()
}

fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).expect("serializable")
}

/// 17 significant digits, enough for an exact round trip.
pub fn float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

/// Rewrites every non-integer number with 17 significant digits.
pub fn full_precision(v: Value) -> Value {
    match v {
        Value::Number(n) if !(n.is_i64() || n.is_u64()) => match n.as_f64() {
            Some(f) => Value::Number(float(f).parse::<Number>().expect("finite float")),
            None => Value::Number(n),
        },
        Value::Array(a) => Value::Array(a.into_iter().map(full_precision).collect()),
        Value::Object(m) => Value::Object(m.into_iter().map(|(k, v)| (k, full_precision(v))).collect()),
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip_exactly() {
        for v in [0.1, -6.0, 1.0 / 3.0, 2.0f64.sqrt() * 1e-300, 123456789.0123] {
            let s = float(v);
            assert_eq!(s.parse::<f64>().unwrap(), v);
            let digits: String = s.split('e').next().unwrap().chars().filter(|c| c.is_ascii_digit()).collect();
            assert_eq!(digits.len(), 17);
        }
    }

    #[test]
    fn integers_stay_integers() {
        let v = full_precision(serde_json::json!({"n": 3, "x": 0.5}));
        assert_eq!(v["n"].to_string(), "3");
        assert_eq!(v["x"].to_string(), "5.0000000000000000e-1");
    }
}

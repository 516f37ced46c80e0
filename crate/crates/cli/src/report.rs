//! JSON reports, error classes and exit codes.

use std::io::Write;
use std::path::Path;

use gmelab::Tolerances;
use serde::Serialize;
use serde_json::{Number, Value};

pub const EXIT_INPUT: u8 = 2;
pub const EXIT_SOLVER: u8 = 3;

#[derive(Debug)]
pub enum CliError {
    Input(String),
    /// Carries whatever results were completed before the failure.
    Solver {
        message: String,
        partial: Option<Value>,
    },
}

impl CliError {
    pub fn solver(message: impl Into<String>, partial: Option<Value>) -> Self {
        Self::Solver {
            message: message.into(),
            partial,
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Input(_) => EXIT_INPUT,
            Self::Solver { .. } => EXIT_SOLVER,
        }
    }

    pub fn status(&self) -> &'static str {
        match self {
            Self::Input(_) => "input-error",
            Self::Solver { .. } => "solver-failure",
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Self::Input(m) | Self::Solver { message: m, .. } => m,
        }
    }
}

impl From<gmelab::Error> for CliError {
    fn from(e: gmelab::Error) -> Self {
        match e {
            gmelab::Error::Solver(m) => Self::solver(m, None),
            other => Self::Input(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Input(e.to_string())
    }
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub command: Vec<String>,
    pub version: &'static str,
    pub seed: u64,
    pub wall_time_seconds: f64,
    pub tolerances: Tolerances,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub result: Value,
}

/// Shortest-round-trip floats rewritten with 17 significant digits.
pub fn seventeen_digits(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64 number");
            format!("{x:.16e}")
                .parse::<Number>()
                .map(Value::Number)
                .unwrap_or(Value::Null)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(seventeen_digits).collect()),
        Value::Object(o) => Value::Object(
            o.into_iter()
                .map(|(k, v)| (k, seventeen_digits(v)))
                .collect(),
        ),
        other => other,
    }
}

pub fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report payloads serialize")
}

pub fn write_json<T: Serialize>(x: &T, out: Option<&Path>) -> std::io::Result<()> {
    let mut text = serde_json::to_string_pretty(&seventeen_digits(to_value(x)))?;
    text.push('\n');
    match out {
        Some(p) => std::fs::write(p, text),
        None => std::io::stdout().write_all(text.as_bytes()),
    }
}

/// Binary64 in 17 significant digits, as used in CSV cells.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip_through_seventeen_digits() {
        for x in [0.1f64, -0.125, 1.0 / 3.0, 1e-300, 12345.678] {
            let v = seventeen_digits(serde_json::json!({ "x": [x] }));
            let text = serde_json::to_string(&v).unwrap();
            let back: Value = serde_json::from_str(&text).unwrap();
            assert_eq!(back["x"][0].as_f64().unwrap().to_bits(), x.to_bits());
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
        let v = seventeen_digits(serde_json::json!({ "n": 3 }));
        assert_eq!(serde_json::to_string(&v).unwrap(), r#"{"n":3}"#);
    }
}

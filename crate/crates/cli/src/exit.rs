//! Process exit codes and the JSON diagnostic written to stderr on failure.

use serde::Serialize;
use serde_json::{json, Value};
use solidkit::Error;

pub const OK: u8 = 0;
pub const USAGE: u8 = 2;
pub const IO: u8 = 3;
pub const PARSE: u8 = 4;
pub const INVALID: u8 = 5;
pub const DEGENERATE: u8 = 6;
pub const PARAMETER: u8 = 7;
pub const REFERENCE: u8 = 8;
pub const BUDGET: u8 = 9;
pub const AMBIGUOUS: u8 = 10;
pub const LOOKUP: u8 = 11;
pub const OUTPUT_INVALID: u8 = 12;

/// A failed run: exit code plus a machine-readable diagnostic.
#[derive(Debug, Serialize)]
pub struct Failure {
    #[serde(skip)]
    pub code: u8,
    pub error: &'static str,
    pub message: String,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub detail: Value,
}

impl Failure {
    pub fn new(code: u8, error: &'static str, message: impl Into<String>) -> Failure {
        Failure {
            code,
            error,
            message: message.into(),
            detail: Value::Null,
        }
    }

    pub fn usage(message: impl Into<String>) -> Failure {
        Failure::new(USAGE, "usage", message)
    }

    pub fn io(path: &std::path::Path, e: impl std::fmt::Display) -> Failure {
        Failure::new(IO, "io", format!("{}: {e}", path.display()))
    }

    pub fn with_detail(mut self, detail: Value) -> Failure {
        self.detail = detail;
        self
    }

    pub fn diagnostic(&self) -> String {
        let mut v = serde_json::to_value(self).expect("diagnostic serializes");
        v["exit_code"] = json!(self.code);
        v.to_string()
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let message = e.to_string();
        let (code, kind, detail) = match &e {
            Error::InvalidInput(_) => (INVALID, "invalid-input", Value::Null),
            Error::InvalidMesh { edges, .. } => (INVALID, "invalid-mesh", json!({ "edges": edges })),
            Error::InvalidEntity { index, source } => {
                let inner = Failure::from((**source).clone());
                (
                    inner.code,
                    "invalid-entity",
                    json!({ "entity": index, "cause": inner.error }),
                )
            }
            Error::Degenerate { dimension } => (DEGENERATE, "degenerate", json!({ "dimension": dimension })),
            Error::Parameter(_) => (PARAMETER, "parameter", Value::Null),
            Error::ReferenceSystem { layer, expected, found } => (
                REFERENCE,
                "reference-system",
                json!({ "layer": layer, "expected": expected, "found": found }),
            ),
            Error::Classification(_) => (REFERENCE, "classification", Value::Null),
            Error::BudgetExceeded { achieved, budget } => (
                BUDGET,
                "budget-exceeded",
                json!({ "achieved": achieved, "budget": budget }),
            ),
            Error::Topology { arcs, .. } => (INVALID, "topology", json!({ "arcs": arcs })),
            Error::Ambiguous(_) => (AMBIGUOUS, "ambiguous", Value::Null),
            Error::Lookup { kind, id } => (LOOKUP, "lookup", json!({ "kind": kind, "id": id })),
            Error::StaleTree { .. } => (LOOKUP, "stale-tree", Value::Null),
            Error::Parse(_) => (PARSE, "parse", Value::Null),
            Error::Io(_) => (IO, "io", Value::Null),
        };
        Failure {
            code,
            error: kind,
            message,
            detail,
        }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Failure {
        Failure::new(PARSE, "parse", e.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entity_errors_keep_the_inner_code() {
        let e = Error::InvalidEntity {
            index: 1,
            source: Box::new(Error::Degenerate { dimension: 2 }),
        };
        let f = Failure::from(e);
        assert_eq!(f.code, DEGENERATE);
        assert_eq!(f.detail["entity"], 1);
    }

    #[test]
    fn diagnostic_is_one_json_line() {
        let d = Failure::from(Error::Parse("bad header".into())).diagnostic();
        let v: Value = serde_json::from_str(&d).unwrap();
        assert_eq!(v["exit_code"], 4);
        assert_eq!(v["error"], "parse");
        assert!(!d.contains('\n'));
    }
}

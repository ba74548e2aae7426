//! Report envelope, error classification and JSON emission.

use harnack_core::Error;
use serde_json::{json, Value};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_PRECONDITION: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_CAP: i32 = 4;

/// `v<package version>`, embedded in every report.
pub fn version() -> String {
    format!("v{}", env!("CARGO_PKG_VERSION"))
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Residual(_) | Error::Solver(_) => EXIT_NUMERICAL,
        Error::CapExceeded(_) => EXIT_CAP,
        _ => EXIT_PRECONDITION,
    }
}

pub fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::UnknownVertex(_) => "unknown_vertex",
        Error::VertexIndex(_) => "vertex_index",
        Error::NonPositiveWeight(..) => "non_positive_weight",
        Error::SelfLoop(_) => "self_loop",
        Error::ConflictingEdge(..) => "conflicting_edge",
        Error::Disconnected(_) => "disconnected",
        Error::EmptyGraph => "empty_graph",
        Error::MissingValue(_) => "missing_value",
        Error::Clipped(_) => "clipped",
        Error::Precondition(_) => "precondition",
        Error::Residual(_) => "residual",
        Error::Solver(_) => "solver",
        Error::CapExceeded(_) => "cap_exceeded",
        Error::Parse { .. } => "parse",
        Error::Io(_) => "io",
    }
}

pub fn error_json(e: &Error) -> Value {
    json!({"kind": error_kind(e), "message": e.to_string(), "exit_code": exit_code(e)})
}

/// The envelope shared by every report. `timings` is kept apart from the
/// deterministic content so that reports can be diffed after removing it.
pub fn envelope(operation: &str, params: Value, outcome: &Result<Value, Error>, seconds: f64) -> Value {
    let mut doc = json!({
        "version": version(),
        "operation": operation,
        "params": params,
        "timings": {"wall_seconds": seconds},
    });
    let map = doc.as_object_mut().expect("object");
    match outcome {
        Ok(result) => {
            map.insert("status".into(), json!("ok"));
            map.insert("result".into(), result.clone());
        }
        Err(e) => {
            map.insert("status".into(), json!("error"));
            map.insert("error".into(), error_json(e));
        }
    }
    doc
}

/// Pretty JSON with sorted keys and a trailing newline.
pub fn to_json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

/// Copy without the `timings` member, for comparisons.
pub fn strip_timings(v: &Value) -> Value {
    let mut out = v.clone();
    if let Some(map) = out.as_object_mut() {
        map.remove("timings");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keys_come_out_sorted() {
        let v = envelope("ehi", json!({"R": 2, "graph": "g"}), &Ok(json!({"zeta": 1, "alpha": 2})), 0.5);
        let text = to_json_text(&v);
        let order: Vec<usize> =
            ["\"operation\"", "\"params\"", "\"result\"", "\"status\"", "\"timings\"", "\"version\""]
                .iter()
                .map(|k| text.find(k).unwrap())
                .collect();
        assert!(order.windows(2).all(|w| w[0] < w[1]), "{text}");
        assert!(text.find("\"alpha\"").unwrap() < text.find("\"zeta\"").unwrap());
    }

    #[test]
    fn exit_codes_by_class() {
        assert_eq!(exit_code(&Error::Clipped("x".into())), 2);
        assert_eq!(exit_code(&Error::Precondition("x".into())), 2);
        assert_eq!(exit_code(&Error::Residual("x".into())), 3);
        assert_eq!(exit_code(&Error::CapExceeded("x".into())), 4);
        let e = envelope("db", json!({}), &Err(Error::CapExceeded("steps".into())), 0.0);
        assert_eq!(e["error"]["exit_code"], 4);
        assert_eq!(e["status"], "error");
        assert!(strip_timings(&e).get("timings").is_none());
    }
}

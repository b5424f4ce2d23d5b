//! Trace JSON encoding and checked decoding.

use super::schema::{validate_value, SchemaReport, Violation};
use crate::document::TraceDocument;
use crate::error::{Error, Result};

/// Pretty-printed JSON with a trailing newline. Key order is fixed by the
/// document types, so equal documents always give identical bytes.
pub fn to_json(doc: &TraceDocument) -> String {
    let mut out = serde_json::to_string_pretty(doc).expect("trace documents always serialize");
    out.push('\n');
    out
}

/// Parses and validates trace JSON. Text that is not JSON at all is an
/// error; JSON that violates the schema yields no document and a report
/// listing every violation.
pub fn from_json(text: &str) -> Result<(Option<TraceDocument>, SchemaReport)> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| Error::MalformedInput(e.to_string()))?;
    let report = validate_value(&value);
    if !report.valid {
        return Ok((None, report));
    }
    match serde_json::from_value::<TraceDocument>(value) {
        Ok(doc) => Ok((Some(doc), report)),
        Err(e) => Ok((
            None,
            SchemaReport::from_violations(vec![Violation {
                path: "$".into(),
                message: e.to_string(),
            }]),
        )),
    }
}

/// Validates an in-memory document by round-tripping it through JSON.
pub fn validate(doc: &TraceDocument) -> SchemaReport {
    let value = serde_json::to_value(doc).expect("trace documents always serialize");
    validate_value(&value)
}

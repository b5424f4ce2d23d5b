//! Output formats: trace JSON (with a validating reader) and a static,
//! self-contained HTML page.

mod html;
mod json;
mod schema;

pub use html::{to_html, to_html_with};
pub use json::{from_json, to_json, validate};
pub use schema::{validate_value, SchemaReport, Violation};

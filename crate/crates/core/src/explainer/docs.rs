//! One-line summaries for builtins and container methods.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const BUNDLED: &str = include_str!("../../data/builtins.json");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuiltinDocEntry {
    pub name: String,
    pub summary: String,
}

/// A name → summary table, serialized as a flat JSON object.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BuiltinDocs {
    entries: BTreeMap<String, String>,
}

impl BuiltinDocs {
    /// The table shipped with the library.
    pub fn bundled() -> &'static BuiltinDocs {
        static TABLE: OnceLock<BuiltinDocs> = OnceLock::new();
        TABLE.get_or_init(|| {
            BuiltinDocs::from_json(BUNDLED).expect("bundled builtin table is valid")
        })
    }

    pub fn from_json(text: &str) -> Result<BuiltinDocs> {
        let entries: BTreeMap<String, String> =
            serde_json::from_str(text).map_err(|e| Error::InvalidDocTable(e.to_string()))?;
        for (name, summary) in &entries {
            if name.trim().is_empty() {
                return Err(Error::InvalidDocTable("empty builtin name".into()));
            }
            if summary.trim().is_empty() {
                return Err(Error::InvalidDocTable(format!(
                    "empty summary for '{name}'"
                )));
            }
        }
        Ok(BuiltinDocs { entries })
    }

    pub fn from_path(path: &Path) -> Result<BuiltinDocs> {
        BuiltinDocs::from_json(&std::fs::read_to_string(path)?)
    }

    /// This table with `overrides` layered on top.
    pub fn merged(&self, overrides: &BuiltinDocs) -> BuiltinDocs {
        let mut entries = self.entries.clone();
        entries.extend(overrides.entries.clone());
        BuiltinDocs { entries }
    }

    pub fn get(&self, name: &str) -> Option<BuiltinDocEntry> {
        self.entries.get(name).map(|summary| BuiltinDocEntry {
            name: name.to_string(),
            summary: summary.clone(),
        })
    }

    pub fn entries(&self) -> impl Iterator<Item = BuiltinDocEntry> + '_ {
        self.entries.iter().map(|(name, summary)| BuiltinDocEntry {
            name: name.clone(),
            summary: summary.clone(),
        })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Looks `name` up in the bundled table.
pub fn builtin_doc(name: &str) -> Option<BuiltinDocEntry> {
    BuiltinDocs::bundled().get(name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::executor::value::{Builtin, METHOD_NAMES};

    #[test]
    fn bundled_table_covers_every_supported_builtin() {
        for b in Builtin::ALL {
            assert!(builtin_doc(b.name()).is_some(), "{} undocumented", b.name());
        }
        for m in METHOD_NAMES {
            assert!(builtin_doc(m).is_some(), "{m} undocumented");
        }
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(matches!(
            BuiltinDocs::from_json("[1]"),
            Err(Error::InvalidDocTable(_))
        ));
        assert!(matches!(
            BuiltinDocs::from_json(r#"{"len": " "}"#),
            Err(Error::InvalidDocTable(_))
        ));
    }

    #[test]
    fn overrides_replace_entries() {
        let custom = BuiltinDocs::from_json(r#"{"len": "Counts things."}"#).unwrap();
        let merged = BuiltinDocs::bundled().merged(&custom);
        assert_eq!(merged.get("len").unwrap().summary, "Counts things.");
        assert!(merged.get("print").is_some());
    }
}

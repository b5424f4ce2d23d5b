//! The compiled trace: a call tree rooted at the module frame whose bodies
//! interleave per-line records, nested calls and loop groups.
//!
//! These types serialize directly to the `cospex-trace/1` JSON layout; field
//! order here is the canonical key order.

use serde::{Deserialize, Serialize};

use crate::executor::ExecLimits;
use crate::frontend::LoopKind;

pub const SCHEMA_TAG: &str = "cospex-trace/1";

/// Bounded textual rendering of a runtime value at one instant.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValueSnapshot {
    pub repr: String,
    #[serde(rename = "type")]
    pub type_tag: String,
    pub truncated: bool,
}

impl ValueSnapshot {
    pub const REMOVED_TAG: &'static str = "removed";

    /// Marker recorded when a variable leaves scope.
    pub fn removed() -> Self {
        ValueSnapshot {
            repr: "<removed>".into(),
            type_tag: Self::REMOVED_TAG.into(),
            truncated: false,
        }
    }

    pub fn is_removed(&self) -> bool {
        self.type_tag == Self::REMOVED_TAG
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Binding {
    pub name: String,
    pub value: ValueSnapshot,
}

impl Binding {
    pub fn new(name: impl Into<String>, value: ValueSnapshot) -> Self {
        Binding {
            name: name.into(),
            value,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Error,
    Limit,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Error => "error",
            Status::Limit => "limit",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outcome {
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Outcome {
    pub fn ok() -> Self {
        Outcome {
            status: Status::Ok,
            detail: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceText {
    pub path: String,
    pub lines: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExceptionInfo {
    #[serde(rename = "type")]
    pub type_name: String,
    pub message: String,
    pub line: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CallNode {
    pub id: u64,
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub caller: Option<String>,
    /// Line in the caller that made the call; 0 for the module root.
    pub call_site_line: u32,
    pub args: Vec<Binding>,
    pub body: Vec<Item>,
    #[serde(rename = "return", default, skip_serializing_if = "Option::is_none")]
    pub return_value: Option<ValueSnapshot>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exception: Option<ExceptionInfo>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LineRecord {
    pub step: u64,
    #[serde(rename = "line")]
    pub line_no: u32,
    pub code: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub comment: Option<String>,
    pub deltas: Vec<Binding>,
    pub explanation: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoopGroup {
    pub header_line: u32,
    pub loop_kind: LoopKind,
    pub iterations: Vec<Vec<Item>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Item {
    Call(CallNode),
    Line(LineRecord),
    Loop(LoopGroup),
}

impl Item {
    /// The source line an item is anchored to.
    pub fn line_no(&self) -> u32 {
        match self {
            Item::Call(c) => c.call_site_line,
            Item::Line(l) => l.line_no,
            Item::Loop(g) => g.header_line,
        }
    }

    pub fn as_line(&self) -> Option<&LineRecord> {
        match self {
            Item::Line(l) => Some(l),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceDocument {
    pub schema: String,
    pub source: SourceText,
    pub limits: ExecLimits,
    pub outcome: Outcome,
    #[serde(with = "tagged_call")]
    pub root: CallNode,
}

/// Writes the root call with the same `"kind": "call"` tag that nested
/// calls carry as [`Item`]s.
mod tagged_call {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use super::CallNode;

    #[derive(Serialize)]
    #[serde(tag = "kind", rename_all = "lowercase")]
    enum Borrowed<'a> {
        Call(&'a CallNode),
    }

    #[derive(Deserialize)]
    #[serde(tag = "kind", rename_all = "lowercase")]
    enum Owned {
        Call(CallNode),
    }

    pub fn serialize<S: Serializer>(node: &CallNode, s: S) -> Result<S::Ok, S::Error> {
        Borrowed::Call(node).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<CallNode, D::Error> {
        let Owned::Call(node) = Owned::deserialize(d)?;
        Ok(node)
    }
}

impl CallNode {
    /// This frame's own line records in execution order, with loop groups
    /// expanded and nested calls skipped.
    pub fn line_records(&self) -> Vec<&LineRecord> {
        fn walk<'a>(items: &'a [Item], out: &mut Vec<&'a LineRecord>) {
            for item in items {
                match item {
                    Item::Line(l) => out.push(l),
                    Item::Loop(g) => g.iterations.iter().for_each(|it| walk(it, out)),
                    Item::Call(_) => {}
                }
            }
        }
        let mut out = Vec::new();
        walk(&self.body, &mut out);
        out
    }

    /// Direct child calls in execution order, looking through loop groups.
    pub fn children(&self) -> Vec<&CallNode> {
        fn walk<'a>(items: &'a [Item], out: &mut Vec<&'a CallNode>) {
            for item in items {
                match item {
                    Item::Call(c) => out.push(c),
                    Item::Loop(g) => g.iterations.iter().for_each(|it| walk(it, out)),
                    Item::Line(_) => {}
                }
            }
        }
        let mut out = Vec::new();
        walk(&self.body, &mut out);
        out
    }

    /// Every node in the subtree, pre-order, including `self`.
    pub fn descendants(&self) -> Vec<&CallNode> {
        let mut out = vec![self];
        let mut i = 0;
        while i < out.len() {
            let kids = out[i].children();
            out.splice(i + 1..i + 1, kids);
            i += 1;
        }
        out
    }

    pub fn find(&self, id: u64) -> Option<&CallNode> {
        if self.id == id {
            return Some(self);
        }
        self.children().into_iter().find_map(|c| c.find(id))
    }

    /// `name(a=1, b=2)`.
    pub fn signature(&self) -> String {
        let args = self
            .args
            .iter()
            .map(|b| format!("{}={}", b.name, b.value.repr))
            .collect::<Vec<_>>()
            .join(", ");
        format!("{}({})", self.name, args)
    }
}

impl TraceDocument {
    pub fn call_count(&self) -> usize {
        self.root.descendants().len()
    }
}

/// Expands loop groups and walks into nested calls, yielding every line
/// record of the document in step order.
pub fn flatten_records(items: &[Item]) -> Vec<&LineRecord> {
    fn walk<'a>(items: &'a [Item], out: &mut Vec<&'a LineRecord>) {
        for item in items {
            match item {
                Item::Line(l) => out.push(l),
                Item::Call(c) => walk(&c.body, out),
                Item::Loop(g) => g.iterations.iter().for_each(|it| walk(it, out)),
            }
        }
    }
    let mut out = Vec::new();
    walk(items, &mut out);
    out
}

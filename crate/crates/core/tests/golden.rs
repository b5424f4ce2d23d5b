//! Frozen trace files. Set `STEPWISE_BLESS=1` to rewrite them after an
//! intentional format change, then review the diff by hand.

mod common;

use common::*;
use stepwise::emitter::{from_json, to_json};

fn golden_source(name: &str) -> String {
    format!("{name}.py")
}

#[test]
fn goldens_match_fresh_traces() {
    let bless = std::env::var_os("STEPWISE_BLESS").is_some();
    for name in GOLDEN {
        let doc = trace_corpus(&golden_source(name));
        let fresh = to_json(&doc);
        let path = golden_dir().join(format!("{name}.trace.json"));
        if bless {
            std::fs::write(&path, &fresh).unwrap();
            continue;
        }
        let frozen = std::fs::read_to_string(&path)
            .unwrap_or_else(|e| panic!("missing golden {}: {e}", path.display()));
        assert!(fresh == frozen, "{name}: trace differs from {}", path.display());
    }
}

#[test]
fn goldens_round_trip_byte_for_byte() {
    for name in GOLDEN {
        let text = std::fs::read_to_string(golden_dir().join(format!("{name}.trace.json"))).unwrap();
        let (doc, report) = from_json(&text).unwrap();
        assert!(report.valid, "{name}: {:?}", report.violations);
        assert!(report.violations.is_empty());
        assert_eq!(to_json(&doc.unwrap()), text, "{name}");
    }
}

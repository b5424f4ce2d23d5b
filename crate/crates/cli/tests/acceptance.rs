//! Acceptance suite: prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

#[path = "../../core/tests/common/invariants.rs"]
mod invariants;

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use stepwise::emitter::{from_json, to_json};
use stepwise::explainer::builtin_doc;
use stepwise::frontend::builtin_references;
use stepwise::{
    compile_trace, execute_traced, instrument, parse_source, ExecLimits, Execution, Item, Status,
    TraceDocument,
};

const CORPUS: [&str; 6] = [
    "quicksort.py",
    "fibonacci.py",
    "max_profit.py",
    "rod_cutting.py",
    "lcs.py",
    "subsets.py",
];
const GOLDEN: [&str; 4] = ["p1", "p2", "p3", "quicksort"];
const MUTANTS: [&str; 3] = [
    "loop_kind_typo.trace.json",
    "step_decreasing.trace.json",
    "dangling_line.trace.json",
];

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn manifest() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn corpus(name: &str) -> PathBuf {
    manifest().join("../core/corpus").join(name)
}

fn golden(name: &str) -> PathBuf {
    manifest().join("../core/tests/golden").join(format!("{name}.trace.json"))
}

fn read(p: &Path) -> Result<String, String> {
    std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))
}

fn stepwise(args: &[&std::ffi::OsStr]) -> Result<(i32, String, String), String> {
    let o = Command::new(env!("CARGO_BIN_EXE_stepwise"))
        .args(args)
        .output()
        .map_err(|e| format!("cannot start binary: {e}"))?;
    Ok((
        o.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&o.stdout).into_owned(),
        String::from_utf8_lossy(&o.stderr).into_owned(),
    ))
}

fn run_json(file: &Path, out: &Path, extra: &[&str]) -> Result<(i32, String), String> {
    let mut args: Vec<&std::ffi::OsStr> = vec!["run".as_ref(), file.as_os_str()];
    args.extend(["--format".as_ref(), "json".as_ref(), "--out".as_ref(), out.as_os_str()]);
    args.extend(extra.iter().map(|s| std::ffi::OsStr::new(*s)));
    let (code, _, err) = stepwise(&args)?;
    Ok((code, err))
}

fn trace(name: &str) -> Result<(TraceDocument, Execution, ExecLimits), String> {
    let text = read(&corpus(name))?;
    let limits = ExecLimits::default();
    let model = parse_source(&text, name).map_err(|e| format!("{name}: {e}"))?;
    let plan = instrument(&text, limits.clone()).map_err(|e| format!("{name}: {e}"))?;
    let run = execute_traced(&plan);
    let doc = compile_trace(&run.events, &model, &run.outcome, &limits)
        .map_err(|e| format!("{name}: {e}"))?;
    Ok((doc, run, limits))
}

fn stem(name: &str) -> &str {
    name.trim_end_matches(".py")
}

fn corpus_end_to_end() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut slowest = Duration::ZERO;
    for name in CORPUS {
        let start = Instant::now();
        let (code, err) = run_json(&corpus(name), tmp.path(), &[])?;
        let took = start.elapsed();
        slowest = slowest.max(took);
        if code != 0 {
            return Err(format!("{name}: exit {code}: {err}"));
        }
        if took >= Duration::from_secs(5) {
            return Err(format!("{name}: took {took:?}"));
        }
        let json = read(&tmp.path().join(format!("{}.trace.json", stem(name))))?;
        let (_, report) = from_json(&json).map_err(|e| format!("{name}: {e}"))?;
        if !report.valid {
            return Err(format!("{name}: {:?}", report.violations));
        }
    }
    Ok(format!("6 snippets schema-valid, slowest {:.2}s", slowest.as_secs_f64()))
}

fn replay() -> Outcome {
    let mut frames = 0;
    for name in CORPUS {
        let (doc, run, _) = trace(name)?;
        invariants::replay(&doc, &run.events).map_err(|e| format!("{name}: {e}"))?;
        frames += doc.call_count();
    }
    Ok(format!("{frames} frames replayed, 0 mismatches"))
}

fn balance() -> Outcome {
    let mut events = 0;
    for name in CORPUS {
        let (doc, run, _) = trace(name)?;
        if doc.outcome.status != Status::Ok {
            return Err(format!("{name}: outcome {:?}", doc.outcome));
        }
        invariants::balance(&run.events, Status::Ok).map_err(|e| format!("{name}: {e}"))?;
        events += run.events.len();
    }
    Ok(format!("{events} events, all calls and returns nested"))
}

fn fib_nodes(n: u64) -> u64 {
    if n < 2 {
        1
    } else {
        1 + fib_nodes(n - 1) + fib_nodes(n - 2)
    }
}

fn oracle_counts() -> Outcome {
    let (doc, _, _) = trace("fib4.py")?;
    let fibs = doc.root.descendants().iter().filter(|n| n.name == "fib").count() as u64;
    if fibs != fib_nodes(4) || fibs != 9 {
        return Err(format!("fib(4) produced {fibs} fib nodes"));
    }
    let (doc, run, _) = trace("total3.py")?;
    let total = doc
        .root
        .descendants()
        .into_iter()
        .find(|n| n.name == "total")
        .ok_or("no total frame")?;
    let groups: Vec<_> = total
        .body
        .iter()
        .filter_map(|i| match i {
            Item::Loop(g) => Some(g),
            _ => None,
        })
        .collect();
    if groups.len() != 1 || groups[0].iterations.len() != 3 {
        return Err(format!(
            "total([1, 2, 3]) gave {} loop groups, iterations {:?}",
            groups.len(),
            groups.iter().map(|g| g.iterations.len()).collect::<Vec<_>>()
        ));
    }
    invariants::flatten(&doc, &run.events)?;
    Ok("fib(4) → 9 fib nodes; total([1, 2, 3]) → 3 iterations, order preserved".into())
}

fn determinism() -> Outcome {
    let a = tempfile::tempdir().map_err(|e| e.to_string())?;
    let b = tempfile::tempdir().map_err(|e| e.to_string())?;
    for name in CORPUS {
        let file = corpus(name);
        for dir in [a.path(), b.path()] {
            let (code, err) = run_json(&file, dir, &[])?;
            if code != 0 {
                return Err(format!("{name}: exit {code}: {err}"));
            }
        }
        let out = format!("{}.trace.json", stem(name));
        if read(&a.path().join(&out))? != read(&b.path().join(&out))? {
            return Err(format!("{name}: runs differ"));
        }
    }
    Ok("two runs of each snippet byte-identical".into())
}

fn limits() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let spin = tmp.path().join("spin.py");
    std::fs::write(&spin, "while True:\n    pass\n").map_err(|e| e.to_string())?;
    let budget = ExecLimits::default().timeout + 2.0;
    let start = Instant::now();
    let (code, err) = run_json(&spin, tmp.path(), &[])?;
    let took = start.elapsed().as_secs_f64();
    if code != 4 {
        return Err(format!("while True: exit {code}: {err}"));
    }
    if took > budget {
        return Err(format!("while True: took {took:.2}s, budget {budget}s"));
    }
    let doc: TraceDocument = {
        let (d, report) = from_json(&read(&tmp.path().join("spin.trace.json"))?).map_err(|e| e.to_string())?;
        d.ok_or_else(|| format!("spin trace invalid: {:?}", report.violations))?
    };
    if doc.outcome.status != Status::Limit {
        return Err(format!("while True: outcome {:?}", doc.outcome));
    }

    let rec = tmp.path().join("down.py");
    std::fs::write(&rec, "def down(n):\n    return down(n - 1)\ndown(3)\n").map_err(|e| e.to_string())?;
    let (code, err) = run_json(&rec, tmp.path(), &[])?;
    if code != 4 || !err.contains("depth") {
        return Err(format!("no-base-case recursion: exit {code}: {err}"));
    }
    let text = read(&tmp.path().join("down.trace.json"))?;
    let (d, report) = from_json(&text).map_err(|e| e.to_string())?;
    let d = d.ok_or_else(|| format!("partial trace invalid: {:?}", report.violations))?;
    let depth = d.root.descendants().len() as u64;
    if d.outcome.status != Status::Limit || depth != ExecLimits::default().max_depth {
        return Err(format!("partial trace: {:?}, {depth} frames", d.outcome));
    }
    Ok(format!(
        "while True → exit 4 in {took:.2}s; recursion stopped at depth {depth} with a valid partial trace"
    ))
}

fn explainer_totality() -> Outcome {
    let mut records = 0;
    let mut sites = 0;
    for name in CORPUS {
        let (doc, _, _) = trace(name)?;
        invariants::explanations(&doc).map_err(|e| format!("{name}: {e}"))?;
        let root = Item::Call(doc.root.clone());
        records += stepwise::document::flatten_records(std::slice::from_ref(&root)).len();
        let model = parse_source(&read(&corpus(name))?, name).map_err(|e| e.to_string())?;
        for (line, builtin) in builtin_references(&model) {
            if builtin_doc(&builtin).is_none() {
                return Err(format!("{name}:{line}: no doc entry for {builtin}"));
            }
            sites += 1;
        }
    }
    Ok(format!("{records} records explained; {sites} builtin sites documented"))
}

fn schema() -> Outcome {
    for g in GOLDEN {
        let path = golden(g);
        let text = read(&path)?;
        let (doc, report) = from_json(&text).map_err(|e| format!("{g}: {e}"))?;
        let doc = doc.ok_or_else(|| format!("{g}: {:?}", report.violations))?;
        if to_json(&doc) != text {
            return Err(format!("{g}: round trip is not byte-identical"));
        }
        let (code, out, _) = stepwise(&["check".as_ref(), path.as_os_str()])?;
        if code != 0 {
            return Err(format!("check {g}: exit {code}: {out}"));
        }
    }
    for m in MUTANTS {
        let path = manifest().join("tests/mutants").join(m);
        let (code, out, _) = stepwise(&["check".as_ref(), path.as_os_str()])?;
        if code != 5 {
            return Err(format!("check {m}: exit {code}: {out}"));
        }
    }
    Ok("4 goldens round-trip and check 0; 3 mutants check 5".into())
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("corpus end-to-end", corpus_end_to_end),
        ("replay invariant", replay),
        ("balance invariant", balance),
        ("oracle counts", oracle_counts),
        ("determinism", determinism),
        ("limits", limits),
        ("explainer totality", explainer_totality),
        ("schema", schema),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name}: {detail}");
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}

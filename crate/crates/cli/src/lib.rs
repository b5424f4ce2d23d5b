//! The `stepwise` command line: `run` traces a snippet and writes its trace
//! JSON and/or HTML; `check` validates a trace JSON file.
//!
//! Exit codes: 0 success, 1 usage or I/O error, 2 parse error (nothing
//! written), 3 the traced program raised an error (artifacts written), 4 a
//! resource limit stopped the run (partial artifacts written), 5 `check`
//! found schema violations.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use stepwise::emitter::{from_json, to_html_with, to_json};
use stepwise::explainer::BuiltinDocs;
use stepwise::{compile_trace, execute_traced, instrument, parse_source, Error, ExecLimits, Status};

pub mod exit {
    pub const OK: i32 = 0;
    pub const USAGE: i32 = 1;
    pub const PARSE: i32 = 2;
    pub const RUNTIME: i32 = 3;
    pub const LIMIT: i32 = 4;
    pub const INVALID: i32 = 5;
}

#[derive(Debug, Parser)]
#[command(
    name = "stepwise",
    version,
    about = "Trace a small Python-like snippet into a step-by-step worked example"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Trace a snippet and write <stem>.trace.json and/or <stem>.trace.html.
    Run(RunArgs),
    /// Validate a trace JSON file against the trace schema.
    Check {
        /// Trace file to validate.
        trace: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Json,
    Html,
    Both,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Snippet to trace.
    pub file: PathBuf,
    /// Which artifacts to write.
    #[arg(long, value_enum, default_value = "both")]
    pub format: FormatArg,
    /// Directory for the artifacts (created if missing).
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Stop after this many events.
    #[arg(long)]
    pub max_events: Option<u64>,
    /// Deepest allowed call stack, counting the module frame.
    #[arg(long)]
    pub max_depth: Option<u64>,
    /// Wall-clock budget in seconds.
    #[arg(long)]
    pub timeout: Option<f64>,
    /// Longest rendered value, in characters.
    #[arg(long)]
    pub snapshot_max_len: Option<u64>,
    /// Deepest container nesting rendered in a value.
    #[arg(long)]
    pub snapshot_max_depth: Option<u64>,
    /// JSON object of extra builtin summaries layered over the bundled table.
    #[arg(long)]
    pub builtin_docs: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Html,
}

/// Everything `run` needs, after flag parsing.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub input_path: PathBuf,
    /// Never empty.
    pub formats: Vec<OutputFormat>,
    pub out_dir: PathBuf,
    pub limits: ExecLimits,
    pub builtin_docs: Option<PathBuf>,
}

impl RunArgs {
    pub fn to_config(&self) -> RunConfig {
        let d = ExecLimits::default();
        RunConfig {
            input_path: self.file.clone(),
            formats: match self.format {
                FormatArg::Json => vec![OutputFormat::Json],
                FormatArg::Html => vec![OutputFormat::Html],
                FormatArg::Both => vec![OutputFormat::Json, OutputFormat::Html],
            },
            out_dir: self.out.clone(),
            limits: ExecLimits {
                max_events: self.max_events.unwrap_or(d.max_events),
                max_depth: self.max_depth.unwrap_or(d.max_depth),
                timeout: self.timeout.unwrap_or(d.timeout),
                snapshot_max_len: self.snapshot_max_len.unwrap_or(d.snapshot_max_len),
                snapshot_max_depth: self.snapshot_max_depth.unwrap_or(d.snapshot_max_depth),
            },
            builtin_docs: self.builtin_docs.clone(),
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn main_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                exit::USAGE
            } else {
                let _ = write!(out, "{}", e.render());
                exit::OK
            };
            return code;
        }
    };
    match cli.command {
        Command::Run(args) => cmd_run(&args.to_config(), out, err),
        Command::Check { trace } => cmd_check(&trace, out, err),
    }
}

fn artifact_stem(input: &Path) -> String {
    input
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .filter(|s| !s.is_empty())
        .unwrap_or_else(|| "snippet".to_string())
}

/// Traces the snippet and writes the requested artifacts.
pub fn cmd_run(config: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    if config.formats.is_empty() {
        let _ = writeln!(err, "error: no output format requested");
        return exit::USAGE;
    }
    if let Err(e) = config.limits.validate() {
        let _ = writeln!(err, "error: {e}");
        return exit::USAGE;
    }
    let docs = match &config.builtin_docs {
        None => BuiltinDocs::bundled().clone(),
        Some(p) => match BuiltinDocs::from_path(p) {
            Ok(extra) => BuiltinDocs::bundled().merged(&extra),
            Err(e) => {
                let _ = writeln!(err, "error: {}: {e}", p.display());
                return exit::USAGE;
            }
        },
    };
    let path = &config.input_path;
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            let _ = writeln!(err, "error: cannot read {}: {e}", path.display());
            return exit::USAGE;
        }
    };
    let display_path = path.to_string_lossy().into_owned();
    let model = match parse_source(&text, &display_path) {
        Ok(m) => m,
        Err(Error::Parse(p)) => {
            let _ = writeln!(
                err,
                "error: {display_path}:{}:{}: {}",
                p.line, p.column, p.message
            );
            return exit::PARSE;
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return exit::USAGE;
        }
    };
    let plan = match instrument(&text, config.limits.clone()) {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return exit::USAGE;
        }
    };
    let run = execute_traced(&plan);
    let doc = match compile_trace(&run.events, &model, &run.outcome, &plan.limits) {
        Ok(d) => d,
        Err(e) => {
            let _ = writeln!(err, "error: could not compile the trace: {e}");
            return exit::USAGE;
        }
    };
    let _ = out.write_all(run.stdout.as_bytes());
    if doc.call_count() == 1 && doc.outcome.status == Status::Ok {
        let _ = writeln!(
            err,
            "warning: no function frames were traced; add a call (a test case) to the snippet to see one"
        );
    }

    if let Err(e) = fs::create_dir_all(&config.out_dir) {
        let _ = writeln!(err, "error: cannot create {}: {e}", config.out_dir.display());
        return exit::USAGE;
    }
    let stem = artifact_stem(path);
    for format in &config.formats {
        let (target, body) = match format {
            OutputFormat::Json => (
                config.out_dir.join(format!("{stem}.trace.json")),
                to_json(&doc),
            ),
            OutputFormat::Html => (
                config.out_dir.join(format!("{stem}.trace.html")),
                to_html_with(&doc, &docs),
            ),
        };
        if let Err(e) = fs::write(&target, &body) {
            let _ = writeln!(err, "error: cannot write {}: {e}", target.display());
            return exit::USAGE;
        }
        if *format == OutputFormat::Json {
            match from_json(&body) {
                Ok((Some(_), _)) => {}
                Ok((None, report)) => {
                    let _ = writeln!(err, "error: emitted trace failed validation:");
                    for v in report.violations {
                        let _ = writeln!(err, "  {v}");
                    }
                    return exit::USAGE;
                }
                Err(e) => {
                    let _ = writeln!(err, "error: emitted trace failed validation: {e}");
                    return exit::USAGE;
                }
            }
        }
        let _ = writeln!(err, "wrote {}", target.display());
    }

    let detail = doc.outcome.detail.as_deref().unwrap_or("");
    match doc.outcome.status {
        Status::Ok => exit::OK,
        Status::Error => {
            let _ = writeln!(err, "error: the traced program raised {detail}");
            exit::RUNTIME
        }
        Status::Limit => {
            let _ = writeln!(err, "stopped: {detail}; the trace is partial");
            exit::LIMIT
        }
    }
}

/// Validates a trace JSON file, printing every violation.
pub fn cmd_check(trace_path: &Path, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let text = match fs::read_to_string(trace_path) {
        Ok(t) => t,
        Err(e) => {
            let _ = writeln!(err, "error: cannot read {}: {e}", trace_path.display());
            return exit::USAGE;
        }
    };
    match from_json(&text) {
        Ok((Some(_), _)) => {
            let _ = writeln!(out, "{}: valid", trace_path.display());
            exit::OK
        }
        Ok((None, report)) => {
            let _ = writeln!(
                out,
                "{}: {} violation{}",
                trace_path.display(),
                report.violations.len(),
                if report.violations.len() == 1 { "" } else { "s" }
            );
            for v in &report.violations {
                let _ = writeln!(out, "  {v}");
            }
            exit::INVALID
        }
        Err(e) => {
            let _ = writeln!(out, "{}: 1 violation", trace_path.display());
            let _ = writeln!(out, "  $: {e}");
            exit::INVALID
        }
    }
}

//! Running an external TeX engine on an authored document.
//!
//! Each run gets a fresh directory under the work root, so concurrent runs
//! never share auxiliary files. The directory is deleted after a successful
//! run and kept after a failure for inspection.

mod cache;
mod engine;
mod logfile;

use std::fs;
use std::io::{self, Read};
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};
use std::sync::atomic::{AtomicU64, Ordering};
use std::thread;
use std::time::{Duration, Instant};

use thiserror::Error;

pub use cache::{Cache, CacheEntry, CACHE_ENV};
pub use engine::{detect_engines, known_engine_names, path_dirs, EngineSpec};
pub use logfile::{decode_log, parse_log, wants_rerun};

use crate::authoring::Document;
use crate::diagnostic::Diagnostic;

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(60);

/// Base name of the files written into a run directory.
pub const JOB_NAME: &str = "texglyph";

#[derive(Debug, Error)]
pub enum TypesetError {
    #[error("no TeX engine available ({0})")]
    EngineNotFound(String),
    #[error("engine {engine} writes {engine_flavor:?} but the document was authored for {doc_flavor:?}")]
    FlavorMismatch {
        engine: String,
        engine_flavor: crate::dvi::DviFlavor,
        doc_flavor: crate::dvi::DviFlavor,
    },
    #[error("{}", compile_summary(.diagnostics))]
    CompileError {
        diagnostics: Vec<Diagnostic>,
        log_text: String,
        /// Run directory kept for inspection.
        work_dir: Option<PathBuf>,
    },
    #[error("engine did not finish within {} s", .limit.as_secs())]
    Timeout { limit: Duration, work_dir: Option<PathBuf> },
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

fn compile_summary(diagnostics: &[Diagnostic]) -> String {
    match diagnostics.iter().find(|d| d.is_error()) {
        Some(d) => match d.line {
            Some(l) => format!("compile error at line {l}: {}", d.message),
            None => format!("compile error: {}", d.message),
        },
        None => "compile error: engine produced no output".to_owned(),
    }
}

#[derive(Debug, Clone)]
pub struct TypesetOptions {
    pub timeout: Duration,
    /// Parent of the per-run directories.
    pub work_root: PathBuf,
}

impl Default for TypesetOptions {
    fn default() -> Self {
        TypesetOptions {
            timeout: DEFAULT_TIMEOUT,
            work_root: std::env::temp_dir(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct TypesetResult {
    pub dvi_bytes: Vec<u8>,
    pub log_text: String,
    pub diagnostics: Vec<Diagnostic>,
    pub engine_used: EngineSpec,
    pub elapsed_ms: u64,
    pub cache_hit: bool,
}

/// Picks an engine: `"auto"` takes the first detected one, anything else
/// must name a detected engine.
pub fn select_engine(name: &str, search_path: &[PathBuf]) -> Result<EngineSpec, TypesetError> {
    let found = detect_engines(search_path);
    let pick = if name == "auto" {
        found.into_iter().next()
    } else {
        found.into_iter().find(|e| e.name == name)
    };
    pick.ok_or_else(|| {
        TypesetError::EngineNotFound(if name == "auto" {
            format!("looked for {} on the search path", known_engine_names().join(", "))
        } else {
            format!("{name} not found on the search path")
        })
    })
}

pub(crate) enum RunError {
    Timeout,
    Io(io::Error),
}

/// Runs `cmd` to completion, killing it after `limit`.
pub(crate) fn run_with_timeout(mut cmd: Command, limit: Duration) -> Result<Output, RunError> {
    let mut child = cmd
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .map_err(RunError::Io)?;
    let drain = |mut r: Box<dyn Read + Send>| {
        thread::spawn(move || {
            let mut buf = Vec::new();
            let _ = r.read_to_end(&mut buf);
            buf
        })
    };
    let out = drain(Box::new(child.stdout.take().expect("piped")));
    let err = drain(Box::new(child.stderr.take().expect("piped")));
    let start = Instant::now();
    let status = loop {
        match child.try_wait().map_err(RunError::Io)? {
            Some(s) => break s,
            None if start.elapsed() >= limit => {
                let _ = child.kill();
                let _ = child.wait();
                return Err(RunError::Timeout);
            }
            None => thread::sleep(Duration::from_millis(10)),
        }
    };
    Ok(Output {
        status,
        stdout: out.join().unwrap_or_default(),
        stderr: err.join().unwrap_or_default(),
    })
}

static NONCE: AtomicU64 = AtomicU64::new(0);

fn run_dir(root: &Path) -> io::Result<tempfile::TempDir> {
    fs::create_dir_all(root)?;
    let n = NONCE.fetch_add(1, Ordering::Relaxed);
    tempfile::Builder::new()
        .prefix(&format!("texglyph-{}-{n}-", std::process::id()))
        .tempdir_in(root)
}

/// Typesets `doc` with `engine`, consulting and filling `cache` if given.
///
/// The engine runs a second time when its log asks for a rerun.
pub fn typeset(
    doc: &Document,
    engine: &EngineSpec,
    options: &TypesetOptions,
    cache: Option<&Cache>,
) -> Result<TypesetResult, TypesetError> {
    if doc.flavor != engine.flavor {
        return Err(TypesetError::FlavorMismatch {
            engine: engine.name.clone(),
            engine_flavor: engine.flavor,
            doc_flavor: doc.flavor,
        });
    }
    let start = Instant::now();
    let key = Cache::key(doc, engine);
    if let Some(entry) = cache.and_then(|c| c.get(&key)) {
        log::debug!("cache hit {key}");
        return Ok(TypesetResult {
            dvi_bytes: entry.dvi_bytes,
            diagnostics: parse_log(&entry.log_text),
            log_text: entry.log_text,
            engine_used: engine.clone(),
            elapsed_ms: start.elapsed().as_millis() as u64,
            cache_hit: true,
        });
    }

    let dir = run_dir(&options.work_root)?;
    let tex = format!("{JOB_NAME}.tex");
    fs::write(dir.path().join(&tex), &doc.source)?;
    let log_path = dir.path().join(format!("{JOB_NAME}.log"));
    let out_path = dir.path().join(format!("{JOB_NAME}.{}", engine.output_extension));

    let mut runs = 0;
    let (status, log_text) = loop {
        runs += 1;
        let mut cmd = Command::new(&engine.executable);
        cmd.args(&engine.args_template)
            .arg(&tex)
            .current_dir(dir.path())
            .stdin(Stdio::null());
        log::debug!("run {runs}: {:?}", cmd);
        let output = match run_with_timeout(cmd, options.timeout) {
            Ok(o) => o,
            Err(RunError::Timeout) => {
                return Err(TypesetError::Timeout {
                    limit: options.timeout,
                    work_dir: Some(dir.keep()),
                })
            }
            Err(RunError::Io(e)) if e.kind() == io::ErrorKind::NotFound => {
                return Err(TypesetError::EngineNotFound(format!(
                    "{} could not be started",
                    engine.executable.display()
                )))
            }
            Err(RunError::Io(e)) => return Err(e.into()),
        };
        let log_text = match fs::read(&log_path) {
            Ok(b) => decode_log(&b),
            Err(_) => decode_log(&output.stdout),
        };
        if output.status.success() && runs == 1 && wants_rerun(&log_text) {
            continue;
        }
        break (output.status, log_text);
    };

    let diagnostics = parse_log(&log_text);
    let dvi_bytes = match fs::read(&out_path) {
        Ok(b) if status.success() && !b.is_empty() => b,
        _ => {
            return Err(TypesetError::CompileError {
                diagnostics,
                log_text,
                work_dir: Some(dir.keep()),
            })
        }
    };
    if let Some(c) = cache {
        if let Err(e) = c.put(&key, &dvi_bytes, &log_text) {
            log::warn!("could not write cache entry {key}: {e}");
        }
    }
    Ok(TypesetResult {
        dvi_bytes,
        log_text,
        diagnostics,
        engine_used: engine.clone(),
        elapsed_ms: start.elapsed().as_millis() as u64,
        cache_hit: false,
    })
}

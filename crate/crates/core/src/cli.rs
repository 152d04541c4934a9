//! The `texglyph` command line.
//!
//! Exit codes: 0 success, 1 usage error, 2 compile or parse error, 3 no
//! usable TeX engine. Artifacts go to stdout (or `-o`); everything else goes
//! to stderr.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::authoring::{Fragment, Package};
use crate::diagnostic::{Diagnostic, Severity};
use crate::dvi;
use crate::fonts::{FontServices, SearchConfig};
use crate::pipeline::{emit, OutputFormat, PageSettings, Pipeline, PipelineError};
use crate::render::{RenderError, SvgGlyphMode};
use crate::typesetting::{detect_engines, path_dirs, Cache, TypesetError, TypesetOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_COMPILE: i32 = 2;
pub const EXIT_NO_ENGINE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "texglyph", version, about = "Render LaTeX fragments to positioned glyphs")]
pub struct Cli {
    /// More log output on stderr; repeat for more.
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Cmd,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Typeset a fragment and write JSON, SVG or a DVI listing.
    Render(RenderArgs),
    /// Read a DVI/XDV file.
    Parse {
        path: PathBuf,
        /// Print the full disassembly instead of a summary.
        #[arg(long)]
        dump: bool,
    },
    /// List the TeX engines found on PATH.
    Engines {
        #[arg(long)]
        json: bool,
    },
    /// Empty the output cache.
    CleanCache {
        /// Cache directory; defaults to $TEXGLYPH_CACHE or the user cache dir.
        #[arg(long)]
        cache_dir: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Svg,
    DviDump,
}

#[derive(Debug, clap::Args)]
pub struct RenderArgs {
    /// LaTeX body code, without preamble.
    pub fragment: String,
    /// Engine name, or `auto` for the first one found.
    #[arg(long, default_value = "auto")]
    pub engine: String,
    /// Line width, e.g. `144pt`, `2in`, `5cm`; bare numbers are points.
    #[arg(long, value_parser = parse_length)]
    pub width: Option<f64>,
    /// Font size in points.
    #[arg(long, default_value_t = 10.0, value_parser = parse_positive)]
    pub font_size: f64,
    /// Main font by family name (fontspec engines only).
    #[arg(long)]
    pub font_family: Option<String>,
    /// Extra package as `name` or `name:opt1,opt2`; repeatable.
    #[arg(long = "package")]
    pub packages: Vec<String>,
    /// Output format.
    #[arg(short = 'f', long, value_enum, default_value = "json")]
    pub format: Format,
    /// Output file, or `-` for stdout.
    #[arg(short, long, default_value = "-")]
    pub output: String,
    /// Cache directory; defaults to $TEXGLYPH_CACHE or the user cache dir.
    #[arg(long)]
    pub cache_dir: Option<PathBuf>,
}

/// Parses a length with an optional unit and returns big points.
pub fn parse_length(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let split = s
        .find(|c: char| c.is_ascii_alphabetic())
        .unwrap_or(s.len());
    let (num, unit) = s.split_at(split);
    let v: f64 = num
        .trim()
        .parse()
        .map_err(|_| format!("not a length: {s:?}"))?;
    let bp_per_unit = match unit {
        "" | "pt" => 72.0 / 72.27,
        "bp" => 1.0,
        "in" => 72.0,
        "cm" => 72.0 / 2.54,
        "mm" => 72.0 / 25.4,
        "pc" => 12.0 * 72.0 / 72.27,
        _ => return Err(format!("unknown unit {unit:?} (use pt, bp, in, cm, mm or pc)")),
    };
    let bp = v * bp_per_unit;
    if bp.is_finite() && bp > 0.0 {
        Ok(bp)
    } else {
        Err(format!("length must be positive: {s:?}"))
    }
}

fn parse_positive(s: &str) -> Result<f64, String> {
    match s.trim().parse::<f64>() {
        Ok(v) if v.is_finite() && v > 0.0 => Ok(v),
        _ => Err(format!("expected a positive number, got {s:?}")),
    }
}

fn print_diagnostic(err: &mut dyn Write, d: &Diagnostic) {
    let _ = match (d.severity, d.line) {
        (Severity::Error, _) => writeln!(err, "! {}", d.message),
        (_, Some(l)) => writeln!(err, "warning: line {l}: {}", d.message),
        (_, None) => writeln!(err, "warning: {}", d.message),
    };
    if d.severity == Severity::Error {
        for c in &d.context {
            let _ = writeln!(err, "{c}");
        }
    }
}

fn write_artifact(output: &str, artifact: &[u8], out: &mut dyn Write) -> std::io::Result<()> {
    if output == "-" {
        out.write_all(artifact)?;
        out.flush()
    } else {
        fs::write(output, artifact)
    }
}

fn cmd_render(args: RenderArgs, verbose: u8, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let mut packages = Vec::new();
    for p in &args.packages {
        match Package::parse(p) {
            Ok(p) => packages.push(p),
            Err(e) => {
                let _ = writeln!(err, "error: {e}");
                return EXIT_USAGE;
            }
        }
    }
    let settings = PageSettings {
        width_pt: args.width.map(|bp| bp * 72.27 / 72.0),
        font_size_pt: Some(args.font_size),
        font_family: args.font_family.clone(),
        packages,
    };
    let pipeline = Pipeline {
        engine: args.engine.clone(),
        search_path: path_dirs(),
        typeset: TypesetOptions::default(),
        cache: Some(args.cache_dir.clone().map(Cache::new).unwrap_or_else(Cache::from_env)),
        fonts: FontServices::new(SearchConfig::from_env()),
    };
    let format = match args.format {
        Format::Json => OutputFormat::Json,
        Format::Svg => OutputFormat::Svg(SvgGlyphMode::Paths),
        Format::DviDump => OutputFormat::DviDump,
    };
    let fragment = Fragment::new(args.fragment);

    let result = pipeline.compile(&fragment, &settings).and_then(|c| {
        if verbose > 0 {
            for d in &c.diagnostics {
                print_diagnostic(err, d);
            }
            let _ = writeln!(
                err,
                "{} in {} ms{}",
                c.typeset.engine_used.name,
                c.typeset.elapsed_ms,
                if c.typeset.cache_hit { " (cached)" } else { "" }
            );
        }
        match emit(&c.program, 0, &pipeline.fonts, format, &c.diagnostics) {
            Err(PipelineError::Render(RenderError::OutlineUnavailable { k })) => {
                let _ = writeln!(err, "warning: font {k} has no outlines; writing SVG text elements");
                emit(&c.program, 0, &pipeline.fonts, OutputFormat::Svg(SvgGlyphMode::Text), &c.diagnostics)
            }
            r => r,
        }
    });
    match result {
        Ok((artifact, _)) => match write_artifact(&args.output, artifact.as_bytes(), out) {
            Ok(()) => EXIT_OK,
            Err(e) => {
                let _ = writeln!(err, "error: cannot write {}: {e}", args.output);
                EXIT_COMPILE
            }
        },
        Err(e) => report(e, err),
    }
}

fn report(e: PipelineError, err: &mut dyn Write) -> i32 {
    match e {
        PipelineError::Authoring(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
        PipelineError::Typeset(TypesetError::EngineNotFound(what)) => {
            let _ = writeln!(err, "error: no TeX engine available: {what}");
            EXIT_NO_ENGINE
        }
        PipelineError::Typeset(TypesetError::CompileError {
            diagnostics,
            work_dir,
            ..
        }) => {
            let mut any_error = false;
            for d in &diagnostics {
                any_error |= d.is_error();
                print_diagnostic(err, d);
            }
            if !any_error {
                let _ = writeln!(err, "error: engine produced no output");
            }
            if let Some(dir) = work_dir {
                let _ = writeln!(err, "note: engine files kept in {}", dir.display());
            }
            EXIT_COMPILE
        }
        e => {
            let _ = writeln!(err, "error: {e}");
            EXIT_COMPILE
        }
    }
}

fn cmd_parse(path: PathBuf, dump: bool, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let bytes = match fs::read(&path) {
        Ok(b) => b,
        Err(e) => {
            let _ = writeln!(err, "error: cannot read {}: {e}", path.display());
            return EXIT_COMPILE;
        }
    };
    let program = match dvi::parse(&bytes) {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_COMPILE;
        }
    };
    let text = if dump {
        dvi::disassemble(&program)
    } else {
        let mut s = format!(
            "{}, {} bytes, {} page(s), max stack depth {}\n",
            program.flavor,
            bytes.len(),
            program.page_count(),
            program.post.max_stack_depth
        );
        for def in program.font_defs().values() {
            s.push_str(&format!("font {}: {}\n", def.k(), def.display_name()));
        }
        s
    };
    let _ = out.write_all(text.as_bytes());
    EXIT_OK
}

fn cmd_engines(json: bool, out: &mut dyn Write) -> i32 {
    let engines = detect_engines(&path_dirs());
    let text = if json {
        serde_json::to_string_pretty(&engines).expect("engine specs serialize") + "\n"
    } else if engines.is_empty() {
        "no TeX engines found on PATH\n".to_owned()
    } else {
        let mut s = format!("{:<10} {:<7} {:<40} {}\n", "NAME", "OUTPUT", "VERSION", "PATH");
        for e in &engines {
            s.push_str(&format!(
                "{:<10} {:<7} {:<40} {}\n",
                e.name,
                e.output_extension,
                e.version,
                e.executable.display()
            ));
        }
        s
    };
    let _ = out.write_all(text.as_bytes());
    EXIT_OK
}

fn cmd_clean_cache(cache_dir: Option<PathBuf>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cache = cache_dir.map(Cache::new).unwrap_or_else(Cache::from_env);
    match cache.clean() {
        Ok(n) => {
            let _ = writeln!(out, "{n} bytes");
            EXIT_OK
        }
        Err(e) => {
            let _ = writeln!(err, "error: cannot clean {}: {e}", cache.root().display());
            EXIT_COMPILE
        }
    }
}

/// Runs the command line `args` (including the program name) and returns
/// the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(text.as_bytes());
                    EXIT_OK
                }
                _ => {
                    let _ = err.write_all(text.as_bytes());
                    EXIT_USAGE
                }
            };
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    let _ = env_logger::Builder::new()
        .filter_level(level)
        .parse_default_env()
        .target(env_logger::Target::Stderr)
        .try_init();

    match cli.command {
        Cmd::Render(args) => cmd_render(args, cli.verbose, out, err),
        Cmd::Parse { path, dump } => cmd_parse(path, dump, out, err),
        Cmd::Engines { json } => cmd_engines(json, out),
        Cmd::CleanCache { cache_dir } => cmd_clean_cache(cache_dir, out, err),
    }
}

//! Turn a LaTeX fragment into a complete standalone document.
//!
//! The default template is the minimal `standalone`/`varwidth` document with
//! `unicode-math` loaded. Width, size and family options wrap the body; the
//! fragment itself is never escaped or rewritten.

use std::fmt::Write as _;
use std::ops::Range;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::diagnostic::{Diagnostic, DiagnosticKind};
use crate::dvi::DviFlavor;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AuthoringError {
    #[error("invalid preamble spec: {0}")]
    InvalidSpec(String),
    #[error("invalid fragment: {0}")]
    InvalidFragment(String),
    #[error("{what} is not supported for {flavor} output")]
    UnsupportedFlavor { what: String, flavor: DviFlavor },
}

/// A piece of LaTeX body code, without preamble.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Fragment(String);

impl Fragment {
    pub fn new(text: impl Into<String>) -> Self {
        Fragment(text.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for Fragment {
    fn from(s: &str) -> Self {
        Fragment(s.to_owned())
    }
}

impl From<String> for Fragment {
    fn from(s: String) -> Self {
        Fragment(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Package {
    pub name: String,
    pub options: Vec<String>,
}

impl Package {
    pub fn new(name: impl Into<String>) -> Self {
        Package {
            name: name.into(),
            options: Vec::new(),
        }
    }

    pub fn with_options<I, S>(name: impl Into<String>, options: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Package {
            name: name.into(),
            options: options.into_iter().map(Into::into).collect(),
        }
    }

    /// Parses the CLI form `name` or `name:opt1,opt2`.
    pub fn parse(spec: &str) -> Result<Self, AuthoringError> {
        let (name, opts) = match spec.split_once(':') {
            Some((n, o)) => (n, Some(o)),
            None => (spec, None),
        };
        let name = name.trim();
        if name.is_empty() {
            return Err(AuthoringError::InvalidSpec(format!("empty package name in {spec:?}")));
        }
        let options = opts
            .map(|o| {
                o.split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(String::from)
                    .collect()
            })
            .unwrap_or_default();
        Ok(Package {
            name: name.to_owned(),
            options,
        })
    }
}

/// Everything that goes around the fragment.
#[derive(Debug, Clone, PartialEq)]
pub struct PreambleSpec {
    pub document_class: String,
    pub class_options: Vec<String>,
    packages: Vec<Package>,
    pub extra_preamble: String,
    pub font_size_pt: Option<f64>,
    pub font_family: Option<String>,
    /// Fixed line width in TeX points.
    pub width_pt: Option<f64>,
}

impl Default for PreambleSpec {
    fn default() -> Self {
        PreambleSpec {
            document_class: "standalone".to_owned(),
            class_options: vec!["varwidth".to_owned()],
            packages: vec![Package::new("unicode-math")],
            extra_preamble: String::new(),
            font_size_pt: None,
            font_family: None,
            width_pt: None,
        }
    }
}

impl PreambleSpec {
    /// The default template minus `unicode-math`, for engines that only
    /// produce classic DVI.
    pub fn classic() -> Self {
        PreambleSpec {
            packages: Vec::new(),
            ..Self::default()
        }
    }

    /// Default template suited to `flavor`.
    pub fn for_flavor(flavor: DviFlavor) -> Self {
        match flavor {
            DviFlavor::Xdv => Self::default(),
            DviFlavor::ClassicDvi => Self::classic(),
        }
    }

    pub fn packages(&self) -> &[Package] {
        &self.packages
    }

    /// Appends a package, rejecting a second package with the same name.
    pub fn add_package(&mut self, package: Package) -> Result<&mut Self, AuthoringError> {
        if self.packages.iter().any(|p| p.name == package.name) {
            return Err(AuthoringError::InvalidSpec(format!(
                "package {} listed twice",
                package.name
            )));
        }
        self.packages.push(package);
        Ok(self)
    }

    pub fn with_width_pt(mut self, width: f64) -> Self {
        self.width_pt = Some(width);
        self
    }

    pub fn with_font_size_pt(mut self, size: f64) -> Self {
        self.font_size_pt = Some(size);
        self
    }

    pub fn with_font_family(mut self, family: impl Into<String>) -> Self {
        self.font_family = Some(family.into());
        self
    }

    pub fn validate(&self) -> Result<(), AuthoringError> {
        for (label, value) in [("width", self.width_pt), ("font size", self.font_size_pt)] {
            if let Some(v) = value {
                if !(v.is_finite() && v > 0.0) {
                    return Err(AuthoringError::InvalidSpec(format!(
                        "{label} must be a positive length, got {v}"
                    )));
                }
            }
        }
        if self.document_class.trim().is_empty() {
            return Err(AuthoringError::InvalidSpec("empty document class".into()));
        }
        for (i, p) in self.packages.iter().enumerate() {
            if p.name.trim().is_empty() {
                return Err(AuthoringError::InvalidSpec("empty package name".into()));
            }
            if self.packages[..i].iter().any(|q| q.name == p.name) {
                return Err(AuthoringError::InvalidSpec(format!(
                    "package {} listed twice",
                    p.name
                )));
            }
        }
        if let Some(family) = &self.font_family {
            if family.trim().is_empty() || family.contains(['{', '}']) {
                return Err(AuthoringError::InvalidSpec(format!(
                    "unusable font family {family:?}"
                )));
            }
        }
        if has_document_env(&self.extra_preamble) {
            return Err(AuthoringError::InvalidSpec(
                "extra preamble must not open or close the document environment".into(),
            ));
        }
        Ok(())
    }
}

/// A complete LaTeX source ready for an engine.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub source: String,
    /// Hex SHA-256 over the output flavor and the source text.
    pub content_hash: String,
    /// Byte range of the fragment inside `source`.
    pub fragment_span: Range<usize>,
    pub flavor: DviFlavor,
}

impl Document {
    pub fn fragment(&self) -> &str {
        &self.source[self.fragment_span.clone()]
    }
}

fn has_document_env(text: &str) -> bool {
    text.contains("\\begin{document}") || text.contains("\\end{document}")
}

/// Lengths are always written with five decimals so that hashes stay stable.
fn length(v: f64) -> String {
    format!("{v:.5}pt")
}

fn options(opts: &[String]) -> String {
    if opts.is_empty() {
        String::new()
    } else {
        format!("[{}]", opts.join(","))
    }
}

pub fn author(
    fragment: &Fragment,
    spec: &PreambleSpec,
    flavor: DviFlavor,
) -> Result<Document, AuthoringError> {
    spec.validate()?;
    if has_document_env(fragment.as_str()) {
        return Err(AuthoringError::InvalidFragment(
            "fragment must not open or close the document environment".into(),
        ));
    }
    if spec.font_family.is_some() && flavor != DviFlavor::Xdv {
        return Err(AuthoringError::UnsupportedFlavor {
            what: "font family selection".into(),
            flavor,
        });
    }

    let mut src = String::new();
    let _ = writeln!(
        src,
        "\\documentclass{}{{{}}}",
        options(&spec.class_options),
        spec.document_class
    );
    for p in &spec.packages {
        let _ = writeln!(src, "\\usepackage{}{{{}}}", options(&p.options), p.name);
    }
    if let Some(family) = &spec.font_family {
        if !spec.packages.iter().any(|p| p.name == "fontspec") {
            src.push_str("\\usepackage{fontspec}\n");
        }
        let _ = writeln!(src, "\\setmainfont{{{family}}}");
    }
    if !spec.extra_preamble.is_empty() {
        src.push_str(&spec.extra_preamble);
        if !spec.extra_preamble.ends_with('\n') {
            src.push('\n');
        }
    }
    src.push_str("\\begin{document}\n");
    if let Some(w) = spec.width_pt {
        let _ = writeln!(src, "\\begin{{minipage}}{{{}}}", length(w));
    }
    if let Some(s) = spec.font_size_pt {
        let _ = writeln!(
            src,
            "\\fontsize{{{}}}{{{}}}\\selectfont",
            length(s),
            length(s * 1.2)
        );
    }
    let start = src.len();
    src.push_str(fragment.as_str());
    let end = src.len();
    src.push('\n');
    if spec.width_pt.is_some() {
        src.push_str("\\end{minipage}\n");
    }
    src.push_str("\\end{document}\n");

    let content_hash = content_hash(&src, flavor);
    Ok(Document {
        source: src,
        content_hash,
        fragment_span: start..end,
        flavor,
    })
}

fn content_hash(source: &str, flavor: DviFlavor) -> String {
    let mut h = Sha256::new();
    h.update(flavor.tag().as_bytes());
    h.update([0u8]);
    h.update(source.as_bytes());
    hex::encode(h.finalize())
}

/// Cheap structural checks on a fragment. Never fails; returns warnings.
pub fn validate_fragment(fragment: &Fragment) -> Vec<Diagnostic> {
    let text = fragment.as_str();
    let mut diags = Vec::new();
    let mut depth: i64 = 0;
    let mut went_negative = false;
    let mut dollars = 0usize;
    let mut chars = text.chars();
    while let Some(c) = chars.next() {
        match c {
            '\\' => {
                chars.next();
            }
            '%' => {
                for c in chars.by_ref() {
                    if c == '\n' {
                        break;
                    }
                }
            }
            '{' => depth += 1,
            '}' => {
                depth -= 1;
                if depth < 0 {
                    went_negative = true;
                }
            }
            '$' => dollars += 1,
            _ => {}
        }
    }
    if depth != 0 || went_negative {
        diags.push(Diagnostic::warning(
            DiagnosticKind::UnbalancedBrace,
            "unbalanced braces in fragment",
        ));
    }
    if dollars % 2 == 1 {
        diags.push(Diagnostic::warning(
            DiagnosticKind::UnbalancedMathDelimiter,
            "odd number of `$` math delimiters in fragment",
        ));
    }
    if has_document_env(text) {
        diags.push(Diagnostic::warning(
            DiagnosticKind::DocumentEnvironmentInFragment,
            "fragment opens or closes the document environment",
        ));
    }
    diags
}

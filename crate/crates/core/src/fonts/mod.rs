//! Font resolution, metrics and outlines.
//!
//! Native (OpenType/TrueType) fonts are read with `ttf-parser`; TeX font
//! metric files are decoded by [`tfm`]. A [`FontServices`] handle caches
//! loaded font files and is safe to share between threads.

use std::collections::HashMap;
use std::env;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::{Arc, Mutex};
use std::time::SystemTime;

use thiserror::Error;

use crate::diagnostic::{Diagnostic, DiagnosticKind};
use crate::dvi::{FontDef, FontDefinition, NativeFontDef};

pub mod tfm;

pub use tfm::{parse_tfm, FixWord, TfmMetrics};

/// Environment variable holding extra font directories, separated like `PATH`.
pub const FONT_DIRS_ENV: &str = "TEXGLYPH_FONTDIRS";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FontError {
    #[error("font not found: {0}")]
    FontNotFound(String),
    #[error("cannot read font file {path}: {reason}")]
    FontFileUnreadable { path: PathBuf, reason: String },
    #[error("malformed TFM: {0}")]
    MalformedTfm(String),
    #[error("unsupported font format: {0}")]
    UnsupportedFontFormat(String),
    #[error("glyph {glyph} out of range for {font}")]
    GlyphOutOfRange { glyph: u32, font: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum FontKind {
    NativeOutline,
    TfmMetricsOnly,
}

/// Where to look for font files.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SearchConfig {
    pub dirs: Vec<PathBuf>,
    /// kpathsea-style lookup helper, invoked as `<tool> <file>`.
    pub lookup_tool: Option<PathBuf>,
}

impl SearchConfig {
    pub fn new(dirs: Vec<PathBuf>) -> Self {
        SearchConfig {
            dirs,
            lookup_tool: None,
        }
    }

    /// Directories from `TEXGLYPH_FONTDIRS` plus `kpsewhich` if it is on `PATH`.
    pub fn from_env() -> Self {
        let dirs = env::var_os(FONT_DIRS_ENV)
            .map(|v| env::split_paths(&v).filter(|p| !p.as_os_str().is_empty()).collect())
            .unwrap_or_default();
        SearchConfig {
            dirs,
            lookup_tool: find_on_path("kpsewhich"),
        }
    }

    fn lookup(&self, file: &str) -> Option<PathBuf> {
        let tool = self.lookup_tool.as_ref()?;
        let out = Command::new(tool).arg(file).output().ok()?;
        if !out.status.success() {
            return None;
        }
        let text = String::from_utf8_lossy(&out.stdout);
        let line = text.lines().next()?.trim();
        let p = PathBuf::from(line);
        (!line.is_empty() && p.is_file()).then_some(p)
    }

    /// Finds `file` as given, in each configured directory, then through the
    /// lookup helper.
    pub fn find(&self, file: &str) -> Option<PathBuf> {
        let p = Path::new(file);
        if p.is_absolute() {
            return p.is_file().then(|| p.to_path_buf());
        }
        let base = p.file_name().map(Path::new);
        for dir in &self.dirs {
            let candidate = dir.join(p);
            if candidate.is_file() {
                return Some(candidate);
            }
            if let Some(b) = base {
                let candidate = dir.join(b);
                if candidate.is_file() {
                    return Some(candidate);
                }
            }
        }
        self.lookup(file)
    }
}

pub(crate) fn find_on_path(name: &str) -> Option<PathBuf> {
    let path = env::var_os("PATH")?;
    env::split_paths(&path)
        .map(|d| d.join(name))
        .find(|p| p.is_file())
}

/// One segment of a glyph outline in font units, y up.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PathSegment {
    MoveTo(f32, f32),
    LineTo(f32, f32),
    QuadTo(f32, f32, f32, f32),
    CurveTo(f32, f32, f32, f32, f32, f32),
    Close,
}

#[derive(Default)]
struct Collector(Vec<PathSegment>);

impl ttf_parser::OutlineBuilder for Collector {
    fn move_to(&mut self, x: f32, y: f32) {
        self.0.push(PathSegment::MoveTo(x, y));
    }
    fn line_to(&mut self, x: f32, y: f32) {
        self.0.push(PathSegment::LineTo(x, y));
    }
    fn quad_to(&mut self, x1: f32, y1: f32, x: f32, y: f32) {
        self.0.push(PathSegment::QuadTo(x1, y1, x, y));
    }
    fn curve_to(&mut self, x1: f32, y1: f32, x2: f32, y2: f32, x: f32, y: f32) {
        self.0.push(PathSegment::CurveTo(x1, y1, x2, y2, x, y));
    }
    fn close(&mut self) {
        self.0.push(PathSegment::Close);
    }
}

#[derive(Debug)]
enum FontData {
    Native(Vec<u8>),
    Tfm(TfmMetrics),
}

/// A resolved font, immutable and cheap to clone.
#[derive(Debug, Clone)]
pub struct FontResource {
    pub source: FontDefinition,
    pub path: Option<PathBuf>,
    pub face_index: u32,
    /// Font units per em; for TFM fonts the fix_word scale 2^20.
    pub units_per_em: u32,
    /// Ascent and descent (positive below the baseline) for a 1pt font.
    pub ascent: f64,
    pub descent: f64,
    pub kind: FontKind,
    /// Non-fatal findings made while resolving, e.g. checksum mismatches.
    pub warnings: Vec<Diagnostic>,
    data: Arc<FontData>,
}

impl FontResource {
    fn name(&self) -> String {
        self.source.display_name()
    }

    fn face(&self) -> Option<ttf_parser::Face<'_>> {
        match &*self.data {
            FontData::Native(bytes) => ttf_parser::Face::parse(bytes, self.face_index).ok(),
            FontData::Tfm(_) => None,
        }
    }

    pub fn tfm(&self) -> Option<&TfmMetrics> {
        match &*self.data {
            FontData::Tfm(m) => Some(m),
            FontData::Native(_) => None,
        }
    }

    /// Number of glyphs for native fonts; the char range for TFM fonts.
    pub fn glyph_count(&self) -> u32 {
        match &*self.data {
            FontData::Native(_) => self.face().map_or(0, |f| f.number_of_glyphs() as u32),
            FontData::Tfm(m) => m.ec as u32 + 1,
        }
    }

    fn out_of_range(&self, glyph: u32) -> FontError {
        FontError::GlyphOutOfRange {
            glyph,
            font: self.name(),
        }
    }

    /// Advance of `glyph` (a glyph id for native fonts, a character code for
    /// TFM fonts) at `size_pt`, in the same unit as `size_pt`.
    pub fn glyph_advance(&self, glyph: u32, size_pt: f64) -> Result<f64, FontError> {
        match &*self.data {
            FontData::Native(_) => {
                let face = self.face().ok_or_else(|| self.out_of_range(glyph))?;
                let id = u16::try_from(glyph)
                    .ok()
                    .filter(|&g| g < face.number_of_glyphs())
                    .ok_or_else(|| self.out_of_range(glyph))?;
                let adv = face.glyph_hor_advance(ttf_parser::GlyphId(id)).unwrap_or(0);
                let extend = match &self.source {
                    FontDefinition::Native(d) => d.extend_factor(),
                    FontDefinition::Tfm(_) => 1.0,
                };
                Ok(adv as f64 * size_pt / self.units_per_em as f64 * extend)
            }
            FontData::Tfm(m) => m
                .width(glyph)
                .map(|w| w.to_f64() * size_pt)
                .ok_or_else(|| self.out_of_range(glyph)),
        }
    }

    /// Height and depth of a TFM character as fractions of the font size.
    pub fn char_extent(&self, code: u32) -> Option<(f64, f64)> {
        let m = self.tfm()?;
        Some((m.height(code)?.to_f64(), m.depth(code)?.to_f64()))
    }

    /// Closed contours of `glyph` in font units; empty for blank glyphs.
    pub fn glyph_outline(&self, glyph: u32) -> Result<Vec<PathSegment>, FontError> {
        let FontData::Native(_) = &*self.data else {
            return Err(FontError::UnsupportedFontFormat(format!(
                "{} has metrics only",
                self.name()
            )));
        };
        let face = self
            .face()
            .ok_or_else(|| FontError::UnsupportedFontFormat(self.name()))?;
        let tables = face.tables();
        if tables.glyf.is_none() && tables.cff.is_none() {
            return Err(FontError::UnsupportedFontFormat(format!(
                "{} has neither TrueType nor CFF outlines",
                self.name()
            )));
        }
        let id = u16::try_from(glyph)
            .ok()
            .filter(|&g| g < face.number_of_glyphs())
            .ok_or_else(|| self.out_of_range(glyph))?;
        let mut c = Collector::default();
        face.outline_glyph(ttf_parser::GlyphId(id), &mut c);
        Ok(c.0)
    }

    /// Maps a Unicode scalar through the font's character map. `.notdef`
    /// is never returned.
    pub fn char_to_glyph(&self, c: char) -> Option<u16> {
        match &*self.data {
            FontData::Native(_) => self
                .face()?
                .glyph_index(c)
                .map(|g| g.0)
                .filter(|&g| g != 0),
            FontData::Tfm(m) => {
                // Best effort: assume an ASCII-compatible encoding.
                let code = c as u32;
                (code < 128 && m.has_char(code)).then_some(code as u16)
            }
        }
    }

    /// Inverse character map: the smallest Unicode scalar mapped to `glyph`.
    pub fn glyph_to_char(&self, glyph: u32) -> Option<char> {
        match &*self.data {
            FontData::Native(_) => {
                let face = self.face()?;
                let cmap = face.tables().cmap?;
                let mut best: Option<u32> = None;
                for sub in cmap.subtables.into_iter().filter(|s| s.is_unicode()) {
                    sub.codepoints(|cp| {
                        if sub.glyph_index(cp).map(|g| g.0 as u32) == Some(glyph)
                            && best.is_none_or(|b| cp < b)
                        {
                            best = Some(cp);
                        }
                    });
                }
                best.and_then(char::from_u32)
            }
            FontData::Tfm(m) => {
                (glyph < 128 && m.has_char(glyph)).then_some(glyph as u8 as char)
            }
        }
    }
}

type CacheKey = (PathBuf, u32, Option<SystemTime>);

/// Resolves font definitions, caching parsed files by path, face index and
/// modification time.
#[derive(Debug, Default)]
pub struct FontServices {
    config: SearchConfig,
    cache: Mutex<HashMap<CacheKey, Arc<FontData>>>,
}

impl FontServices {
    pub fn new(config: SearchConfig) -> Self {
        FontServices {
            config,
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn config(&self) -> &SearchConfig {
        &self.config
    }

    fn load(&self, path: &Path, face_index: u32, tfm: bool) -> Result<Arc<FontData>, FontError> {
        let unreadable = |reason: String| FontError::FontFileUnreadable {
            path: path.to_path_buf(),
            reason,
        };
        let mtime = std::fs::metadata(path)
            .map_err(|e| unreadable(e.to_string()))?
            .modified()
            .ok();
        let key = (path.to_path_buf(), face_index, mtime);
        if let Some(d) = self.cache.lock().unwrap().get(&key) {
            return Ok(d.clone());
        }
        let bytes = std::fs::read(path).map_err(|e| unreadable(e.to_string()))?;
        let data = if tfm {
            FontData::Tfm(parse_tfm(&bytes)?)
        } else {
            ttf_parser::Face::parse(&bytes, face_index).map_err(|e| unreadable(e.to_string()))?;
            FontData::Native(bytes)
        };
        let data = Arc::new(data);
        self.cache.lock().unwrap().insert(key, data.clone());
        Ok(data)
    }

    /// Locates and loads the font a DVI definition refers to.
    pub fn resolve(&self, def: &FontDefinition) -> Result<FontResource, FontError> {
        match def {
            FontDefinition::Native(d) => self.resolve_native(d),
            FontDefinition::Tfm(d) => self.resolve_tfm(d),
        }
    }

    fn resolve_native(&self, d: &NativeFontDef) -> Result<FontResource, FontError> {
        let raw = d.font_file_str();
        // XeTeX brackets file names that are paths rather than font names.
        let name = raw
            .strip_prefix('[')
            .and_then(|s| s.strip_suffix(']'))
            .unwrap_or(&raw);
        let path = self
            .config
            .find(name)
            .ok_or_else(|| FontError::FontNotFound(name.to_owned()))?;
        let data = self.load(&path, d.face_index, false)?;
        let FontData::Native(bytes) = &*data else {
            unreachable!("native load yields native data")
        };
        let face = ttf_parser::Face::parse(bytes, d.face_index).map_err(|e| {
            FontError::FontFileUnreadable {
                path: path.clone(),
                reason: e.to_string(),
            }
        })?;
        let upem = face.units_per_em() as f64;
        let (ascent, descent) = (face.ascender() as f64 / upem, -(face.descender() as f64) / upem);
        Ok(FontResource {
            source: FontDefinition::Native(d.clone()),
            path: Some(path),
            face_index: d.face_index,
            units_per_em: face.units_per_em() as u32,
            ascent,
            descent,
            kind: FontKind::NativeOutline,
            warnings: Vec::new(),
            data,
        })
    }

    fn resolve_tfm(&self, d: &FontDef) -> Result<FontResource, FontError> {
        let file = format!("{}{}.tfm", d.area_str(), d.name_str());
        let path = self
            .config
            .find(&file)
            .ok_or_else(|| FontError::FontNotFound(d.name_str()))?;
        let data = self.load(&path, 0, true)?;
        let FontData::Tfm(m) = &*data else {
            unreachable!("tfm load yields tfm data")
        };
        let mut warnings = Vec::new();
        if d.checksum != 0 && m.checksum != 0 && d.checksum != m.checksum {
            warnings.push(Diagnostic::warning(
                DiagnosticKind::FontChecksumMismatch,
                format!(
                    "checksum mismatch for {}: DVI has {:#010x}, TFM has {:#010x}",
                    d.name_str(),
                    d.checksum,
                    m.checksum
                ),
            ));
        }
        let (ascent, descent) = (m.max_height().to_f64(), m.max_depth().to_f64());
        Ok(FontResource {
            source: FontDefinition::Tfm(d.clone()),
            path: Some(path),
            face_index: 0,
            units_per_em: 1 << 20,
            ascent,
            descent,
            kind: FontKind::TfmMetricsOnly,
            warnings,
            data,
        })
    }
}

/// Locates and loads `def` without a shared cache.
pub fn resolve_font(def: &FontDefinition, config: &SearchConfig) -> Result<FontResource, FontError> {
    FontServices::new(config.clone()).resolve(def)
}

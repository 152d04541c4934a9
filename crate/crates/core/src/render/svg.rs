//! SVG output using only `svg`, `g`, `path`, `rect` and `text` elements.

use std::fmt::Write;

use super::{fmt_num, RenderError, RenderOptions, SvgGlyphMode};
use crate::dvi::FontDefinition;
use crate::fonts::{FontKind, PathSegment};
use crate::layout::{PageFont, Rgba, TypesetPage};

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c if (c as u32) < 0x20 && !matches!(c, '\t' | '\n' | '\r') => out.push('\u{FFFD}'),
            c => out.push(c),
        }
    }
    out
}

fn paint(attr: &str, c: &Rgba) -> String {
    let mut s = format!(" {attr}=\"{}\"", c.hex());
    if c.a < 1.0 {
        let _ = write!(s, " {attr}-opacity=\"{}\"", fmt_num(c.a.clamp(0.0, 1.0)));
    }
    s
}

/// Maps font units to output coordinates for one glyph.
struct GlyphTransform {
    x: f64,
    y: f64,
    /// Output units per font unit.
    s: f64,
    extend: f64,
    slant: f64,
}

impl GlyphTransform {
    fn apply(&self, fx: f32, fy: f32) -> (String, String) {
        let (fx, fy) = (fx as f64, fy as f64);
        let px = self.x + (fx * self.extend + fy * self.slant) * self.s;
        let py = self.y - fy * self.s;
        (fmt_num(px), fmt_num(py))
    }
}

fn path_data(segments: &[PathSegment], t: &GlyphTransform) -> String {
    let mut d = String::new();
    for seg in segments {
        match *seg {
            PathSegment::MoveTo(x, y) => {
                let (x, y) = t.apply(x, y);
                let _ = write!(d, "M{x} {y}");
            }
            PathSegment::LineTo(x, y) => {
                let (x, y) = t.apply(x, y);
                let _ = write!(d, "L{x} {y}");
            }
            PathSegment::QuadTo(x1, y1, x, y) => {
                let (x1, y1) = t.apply(x1, y1);
                let (x, y) = t.apply(x, y);
                let _ = write!(d, "Q{x1} {y1} {x} {y}");
            }
            PathSegment::CurveTo(x1, y1, x2, y2, x, y) => {
                let (x1, y1) = t.apply(x1, y1);
                let (x2, y2) = t.apply(x2, y2);
                let (x, y) = t.apply(x, y);
                let _ = write!(d, "C{x1} {y1} {x2} {y2} {x} {y}");
            }
            PathSegment::Close => d.push('Z'),
        }
    }
    d
}

fn font_family(f: &PageFont) -> String {
    let name = match &f.def {
        FontDefinition::Native(d) => d.font_file_str(),
        FontDefinition::Tfm(d) => d.name_str(),
    };
    let name = name.trim_start_matches('[').trim_end_matches(']');
    let stem = std::path::Path::new(name)
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| name.to_owned());
    stem
}

/// Renders `page` as an SVG document whose view box is the page box
/// expanded by one big point on every side.
pub fn emit_svg(page: &TypesetPage, options: &RenderOptions) -> Result<String, RenderError> {
    options.validate()?;
    let k = options.scale;
    let b = &page.bbox;
    let (vx, vy) = ((b.xmin - 1.0) * k, (b.ymin - 1.0) * k);
    let (vw, vh) = ((b.width() + 2.0) * k, (b.height() + 2.0) * k);
    let (vx, vy, vw, vh) = (fmt_num(vx), fmt_num(vy), fmt_num(vw), fmt_num(vh));

    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{vw}\" height=\"{vh}\" viewBox=\"{vx} {vy} {vw} {vh}\">"
    );
    if let Some(bg) = &options.background {
        let _ = writeln!(
            s,
            "<rect x=\"{vx}\" y=\"{vy}\" width=\"{vw}\" height=\"{vh}\"{}/>",
            paint("fill", bg)
        );
    }
    s.push_str("<g>\n");

    for g in &page.glyphs {
        let font = page.font(g.font_k);
        match options.svg_glyph_mode {
            SvgGlyphMode::Paths => {
                let f = font.ok_or(RenderError::OutlineUnavailable { k: g.font_k })?;
                let r = match &f.resource {
                    Some(r) if r.kind == FontKind::NativeOutline => r,
                    _ => return Err(RenderError::OutlineUnavailable { k: g.font_k }),
                };
                let segments = r
                    .glyph_outline(g.glyph.index())
                    .map_err(|_| RenderError::OutlineUnavailable { k: g.font_k })?;
                if segments.is_empty() {
                    continue;
                }
                let (extend, slant) = match &f.def {
                    FontDefinition::Native(d) => (d.extend_factor(), d.slant_factor()),
                    FontDefinition::Tfm(_) => (1.0, 0.0),
                };
                let t = GlyphTransform {
                    x: g.x_pt * k,
                    y: g.y_pt * k,
                    s: g.size_pt / r.units_per_em as f64 * k,
                    extend,
                    slant,
                };
                let _ = writeln!(s, "<path d=\"{}\"{}/>", path_data(&segments, &t), paint("fill", &g.color));
            }
            SvgGlyphMode::Text => {
                let ch = font
                    .and_then(|f| f.resource.as_ref())
                    .and_then(|r| r.glyph_to_char(g.glyph.index()))
                    .unwrap_or('\u{FFFD}');
                if ch.is_whitespace() {
                    continue;
                }
                let family = font.map(font_family).unwrap_or_default();
                let _ = writeln!(
                    s,
                    "<text x=\"{}\" y=\"{}\" font-family=\"{}\" font-size=\"{}\"{}>{}</text>",
                    fmt_num(g.x_pt * k),
                    fmt_num(g.y_pt * k),
                    escape(&family),
                    fmt_num(g.size_pt * k),
                    paint("fill", &g.color),
                    escape(&ch.to_string())
                );
            }
        }
    }
    for r in &page.rules {
        let _ = writeln!(
            s,
            "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\"{}/>",
            fmt_num(r.x_pt * k),
            fmt_num((r.y_pt - r.height_pt) * k),
            fmt_num(r.width_pt * k),
            fmt_num(r.height_pt * k),
            paint("fill", &r.color)
        );
    }
    s.push_str("</g>\n</svg>\n");
    Ok(s)
}

//! The page JSON document.
//!
//! Keys are written in a fixed order and numbers with at most four decimals,
//! so identical pages always serialize to identical bytes.

use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::fmt_num;
use crate::diagnostic::Diagnostic;
use crate::layout::{Rgba, TypesetPage};

pub const SCHEMA_VERSION: u32 = 1;

fn string(s: &str) -> String {
    serde_json::to_string(s).expect("strings always serialize")
}

fn color(c: &Rgba) -> String {
    format!("[{},{},{},{}]", fmt_num(c.r), fmt_num(c.g), fmt_num(c.b), fmt_num(c.a))
}

/// Serialized form of a unit-variant enum.
fn tag<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("enum tags serialize")
}

fn diagnostic(d: &Diagnostic) -> String {
    let mut s = format!(
        "{{\"severity\":{},\"kind\":{},\"message\":{}",
        tag(&d.severity),
        tag(&d.kind),
        string(&d.message)
    );
    if let Some(m) = d.magnitude {
        let _ = write!(s, ",\"magnitude\":{}", fmt_num(m));
    }
    if let Some(l) = d.line {
        let _ = write!(s, ",\"line\":{l}");
    }
    if !d.context.is_empty() {
        let ctx: Vec<String> = d.context.iter().map(|c| string(c)).collect();
        let _ = write!(s, ",\"context\":[{}]", ctx.join(","));
    }
    s.push('}');
    s
}

/// Serializes `page` as a page document.
pub fn emit_json(page: &TypesetPage) -> String {
    let mut s = String::new();
    let b = &page.bbox;
    let _ = write!(
        s,
        "{{\"version\":{SCHEMA_VERSION},\"units\":\"bp\",\"bbox\":[{},{},{},{}],\"baseline\":{},",
        fmt_num(b.xmin),
        fmt_num(b.ymin),
        fmt_num(b.xmax),
        fmt_num(b.ymax),
        fmt_num(page.baseline_y_pt)
    );
    let fonts: Vec<String> = page
        .fonts
        .iter()
        .map(|f| {
            format!(
                "{{\"k\":{},\"file\":{},\"faceIndex\":{},\"sizePt\":{}}}",
                f.k,
                string(&f.file),
                f.face_index,
                fmt_num(f.size_pt)
            )
        })
        .collect();
    let _ = write!(s, "\"fonts\":[{}],", fonts.join(","));
    let glyphs: Vec<String> = page
        .glyphs
        .iter()
        .map(|g| {
            format!(
                "{{\"k\":{},\"glyph\":{},\"x\":{},\"y\":{},\"w\":{},\"color\":{}}}",
                g.font_k,
                g.glyph.index(),
                fmt_num(g.x_pt),
                fmt_num(g.y_pt),
                fmt_num(g.advance_pt),
                color(&g.color)
            )
        })
        .collect();
    let _ = write!(s, "\"glyphs\":[{}],", glyphs.join(","));
    let rules: Vec<String> = page
        .rules
        .iter()
        .map(|r| {
            format!(
                "{{\"x\":{},\"y\":{},\"w\":{},\"h\":{},\"color\":{}}}",
                fmt_num(r.x_pt),
                fmt_num(r.y_pt),
                fmt_num(r.width_pt),
                fmt_num(r.height_pt),
                color(&r.color)
            )
        })
        .collect();
    let _ = write!(s, "\"rules\":[{}],", rules.join(","));
    let diags: Vec<String> = page.diagnostics.iter().map(diagnostic).collect();
    let _ = write!(s, "\"diagnostics\":[{}]}}", diags.join(","));
    s.push('\n');
    s
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FontEntry {
    pub k: i32,
    pub file: String,
    pub face_index: u32,
    pub size_pt: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct GlyphEntry {
    pub k: i32,
    pub glyph: u32,
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub color: [f64; 4],
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct RuleEntry {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
    pub color: [f64; 4],
}

/// Reader for documents produced by [`emit_json`].
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct PageDocument {
    pub version: u32,
    pub units: String,
    pub bbox: [f64; 4],
    pub baseline: f64,
    pub fonts: Vec<FontEntry>,
    pub glyphs: Vec<GlyphEntry>,
    pub rules: Vec<RuleEntry>,
    pub diagnostics: Vec<Diagnostic>,
}

impl PageDocument {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn font(&self, k: i32) -> Option<&FontEntry> {
        self.fonts.iter().find(|f| f.k == k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostic::DiagnosticKind;
    use crate::layout::{BBox, GlyphPlacement, GlyphRef, RulePlacement};

    #[test]
    fn empty_page() {
        let s = emit_json(&TypesetPage::default());
        assert_eq!(
            s,
            "{\"version\":1,\"units\":\"bp\",\"bbox\":[0,0,0,0],\"baseline\":0,\"fonts\":[],\
             \"glyphs\":[],\"rules\":[],\"diagnostics\":[]}\n"
        );
        let doc = PageDocument::from_json(&s).unwrap();
        assert_eq!(doc.bbox, [0.0; 4]);
    }

    #[test]
    fn values_round_trip_through_the_reader() {
        let page = TypesetPage {
            glyphs: vec![GlyphPlacement {
                font_k: 3,
                glyph: GlyphRef::Id(89),
                x_pt: 1.0 / 3.0,
                y_pt: -2.000049,
                size_pt: 9.96,
                color: Rgba::rgb(1.0, 0.0, 0.0),
                advance_pt: 4.25,
            }],
            rules: vec![RulePlacement {
                x_pt: 0.0,
                y_pt: 12.5,
                width_pt: 50.0,
                height_pt: 0.4,
                color: Rgba::BLACK,
            }],
            bbox: BBox { xmin: 0.0, ymin: -9.0, xmax: 50.0, ymax: 12.5 },
            diagnostics: vec![Diagnostic::warning(DiagnosticKind::IgnoredSpecial, "say \"hi\"")
                .with_magnitude(3.0)],
            ..TypesetPage::default()
        };
        let s = emit_json(&page);
        assert_eq!(s, emit_json(&page.clone()), "deterministic");
        let doc = PageDocument::from_json(&s).unwrap();
        assert_eq!(doc.glyphs[0].x, "0.3333".parse::<f64>().unwrap());
        assert_eq!(doc.glyphs[0].y, -2.0);
        assert_eq!(doc.glyphs[0].color, [1.0, 0.0, 0.0, 1.0]);
        assert_eq!(doc.rules[0].h, 0.4);
        assert_eq!(doc.diagnostics, page.diagnostics);
        assert!(s.contains("\"kind\":\"ignored-special\""));
    }
}

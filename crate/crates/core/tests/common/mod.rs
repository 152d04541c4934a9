//! Helpers shared by the integration tests and the acceptance runner.
#![allow(dead_code)]

pub mod props;
pub mod shim;

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use texglyph::fonts::{FontServices, SearchConfig};
use texglyph::layout::TypesetPage;
use texglyph::render::json::{GlyphEntry, PageDocument};
use texglyph::{emit_json, interpret, parse};

pub const BP_PER_PT: f64 = 72.0 / 72.27;

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

pub fn font_services() -> FontServices {
    FontServices::new(SearchConfig::new(vec![fixtures().join("fonts")]))
}

/// Every DVI/XDV file in the corpus, sorted by name.
pub fn corpus() -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<_> = std::fs::read_dir(fixtures())
        .unwrap()
        .flatten()
        .map(|e| e.path())
        .filter(|p| matches!(p.extension().and_then(|e| e.to_str()), Some("dvi" | "xdv")))
        .map(|p| {
            let name = p.file_name().unwrap().to_string_lossy().into_owned();
            (name, std::fs::read(&p).unwrap())
        })
        .collect();
    out.sort();
    out
}

/// `offset mnemonic` pairs written by the fixture assembler.
pub fn read_ops(name: &str) -> Vec<(usize, String)> {
    std::fs::read_to_string(fixtures().join(format!("{name}.ops")))
        .unwrap()
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let (off, m) = l.split_once(' ').unwrap();
            (off.parse().unwrap(), m.trim().to_owned())
        })
        .collect()
}

/// Mnemonic trace from the reference reader, if the fixture has one.
pub fn read_oracle(name: &str) -> Option<Vec<String>> {
    let text = std::fs::read_to_string(fixtures().join(format!("{name}.oracle"))).ok()?;
    Some(text.split_whitespace().map(str::to_owned).collect())
}

/// Interprets page 0 of a fixture against the test fonts.
pub fn fixture_page(name: &str) -> TypesetPage {
    let bytes = std::fs::read(fixtures().join(name)).unwrap();
    let program = parse(&bytes).unwrap();
    interpret(&program, 0, &font_services()).unwrap()
}

/// The page as the JSON document a user would receive.
pub fn to_document(page: &TypesetPage) -> PageDocument {
    PageDocument::from_json(&emit_json(page)).unwrap()
}

/// Character for glyph entry `g`, via the fonts carried by `page`.
pub fn glyph_char(page: &TypesetPage, g: &GlyphEntry) -> Option<char> {
    page.font(g.k)?.resource.as_ref()?.glyph_to_char(g.glyph)
}

/// Groups glyphs into lines by baseline, top to bottom. Baselines closer
/// than `tol` bp are merged.
pub fn lines(doc: &PageDocument, tol: f64) -> Vec<Vec<&GlyphEntry>> {
    let mut ys: Vec<f64> = doc.glyphs.iter().map(|g| g.y).collect();
    ys.sort_by(f64::total_cmp);
    let mut centers: Vec<f64> = Vec::new();
    for y in ys {
        if centers.last().is_none_or(|c| y - c > tol) {
            centers.push(y);
        }
    }
    let mut out = vec![Vec::new(); centers.len()];
    for g in &doc.glyphs {
        let i = centers.iter().rposition(|c| g.y >= c - 1e-9).unwrap_or(0);
        out[i].push(g);
    }
    for line in &mut out {
        line.sort_by(|a, b| a.x.total_cmp(&b.x));
    }
    out
}

/// Box no wider than `measure_pt` + 0.5 pt and at least two lines.
pub fn check_width_law(doc: &PageDocument, measure_pt: f64) -> Result<String, String> {
    let width_pt = (doc.bbox[2] - doc.bbox[0]) / BP_PER_PT;
    let n = lines(doc, 0.5).len();
    if width_pt > measure_pt + 0.5 {
        return Err(format!("box is {width_pt:.3} pt wide, measure {measure_pt} pt"));
    }
    if n < 2 {
        return Err(format!("{n} line(s), expected at least 2"));
    }
    Ok(format!("width {width_pt:.3} pt, {n} lines"))
}

/// Right edges of all lines but the last agree within 0.5 pt, and some
/// line ends in a hyphen.
pub fn check_justification(
    doc: &PageDocument,
    char_of: &dyn Fn(&GlyphEntry) -> Option<char>,
) -> Result<String, String> {
    let lines = lines(doc, 0.5);
    if lines.len() < 2 {
        return Err("fewer than two lines".into());
    }
    let full = &lines[..lines.len() - 1];
    let edges: Vec<f64> = full
        .iter()
        .map(|l| l.iter().map(|g| g.x + g.w).fold(f64::MIN, f64::max))
        .collect();
    let lo = edges.iter().copied().fold(f64::MAX, f64::min);
    let hi = edges.iter().copied().fold(f64::MIN, f64::max);
    let spread_pt = (hi - lo) / BP_PER_PT;
    if spread_pt > 0.5 {
        return Err(format!("right edges spread {spread_pt:.3} pt: {edges:?}"));
    }
    let hyphens = lines
        .iter()
        .filter(|l| {
            l.last()
                .and_then(|g| char_of(g))
                .is_some_and(|c| matches!(c, '-' | '\u{2010}' | '\u{00AD}'))
        })
        .count();
    if hyphens == 0 {
        return Err("no line ends in a hyphen".into());
    }
    Ok(format!(
        "{} full lines within {spread_pt:.3} pt, {hyphens} hyphenated",
        full.len()
    ))
}

/// Exactly two glyph colors; the last glyph has the default color; the
/// other color forms one run that precedes it.
pub fn check_color_partition(doc: &PageDocument, default: [f64; 4]) -> Result<String, String> {
    let colors: BTreeSet<[u64; 4]> = doc
        .glyphs
        .iter()
        .map(|g| g.color.map(f64::to_bits))
        .collect();
    if colors.len() != 2 {
        return Err(format!("{} distinct colors", colors.len()));
    }
    let last = doc.glyphs.last().ok_or("no glyphs")?;
    if last.color != default {
        return Err(format!("final glyph has color {:?}", last.color));
    }
    let marked: Vec<usize> = doc
        .glyphs
        .iter()
        .enumerate()
        .filter(|(_, g)| g.color != default)
        .map(|(i, _)| i)
        .collect();
    let (first, end) = (marked[0], *marked.last().unwrap());
    if end - first + 1 != marked.len() {
        return Err("colored glyphs are not contiguous".into());
    }
    if end >= doc.glyphs.len() - 1 {
        return Err("colored run does not precede the final glyph".into());
    }
    Ok(format!("{} colored glyphs in one run", marked.len()))
}

/// `$\bar x_1$`: at least three glyphs; the smallest glyph sits lower and
/// the accent higher than the base glyph.
///
/// The base is the lowest of the largest-size glyphs; sizes come from the
/// font table.
pub fn check_math_layout(doc: &PageDocument) -> Result<String, String> {
    if doc.glyphs.len() < 3 {
        return Err(format!("{} glyphs", doc.glyphs.len()));
    }
    let size = |g: &GlyphEntry| doc.font(g.k).map_or(0.0, |f| f.size_pt);
    let max_size = doc.glyphs.iter().map(size).fold(f64::MIN, f64::max);
    let base = doc
        .glyphs
        .iter()
        .filter(|g| size(g) == max_size)
        .max_by(|a, b| a.y.total_cmp(&b.y))
        .unwrap();
    let sub = doc
        .glyphs
        .iter()
        .min_by(|a, b| size(a).total_cmp(&size(b)))
        .unwrap();
    if size(sub) >= size(base) {
        return Err(format!("subscript size {} not below base {}", size(sub), size(base)));
    }
    if sub.y <= base.y {
        return Err(format!("subscript y {} not below base y {}", sub.y, base.y));
    }
    let above = doc.glyphs.iter().any(|g| g.y < base.y) || doc.rules.iter().any(|r| r.y - r.h < base.y - 1.0);
    if !above {
        return Err("no accent above the base glyph".into());
    }
    Ok(format!(
        "base {} bp at y={}, subscript {} bp at y={}",
        size(base),
        base.y,
        size(sub),
        sub.y
    ))
}

/// A 40-word paragraph for the width and justification checks.
pub const PARAGRAPH_40: &str = "Statistical graphics often need mathematical annotation, and \
    typesetting systems have produced beautiful text. Combining both lets authors place \
    properly formatted labels anywhere on a plot, with full justification and hyphenation \
    handled by the typesetting engine rather than approximated by hand.";

/// A sentence mixing text and inline math, used as the sample fragment.
pub const SIMPLE_TEX: &str = r"We move the original mean to $\bar z_i$";

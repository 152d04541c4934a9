mod common;

use common::*;
use texglyph::diagnostic::DiagnosticKind;
use texglyph::layout::{GlyphRef, Rgba};
use texglyph::{compute_anchor, Justify};

const SP: i64 = 65536;
const BLACK: [f64; 4] = [0.0, 0.0, 0.0, 1.0];

/// Scaled points to big points under the standard preamble.
fn bp(sp: i64) -> f64 {
    sp as f64 / 65536.0 * 7200.0 / 7227.0
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() < 1e-9
}

/// TFM width of `c` in the synthetic font, scaled to `size` sp.
fn tfm_width(c: char, size: i64) -> i64 {
    let units = 0.25 + (c as u32 % 9) as f64 * 0.05;
    let fw = (units * (1 << 20) as f64).round() as i64;
    (fw * size) >> 20
}

/// Advance of `c` in the synthetic OpenType fonts (1000 units per em).
fn native_advance(c: char) -> f64 {
    match c {
        ' ' => 250.0,
        '.' => 200.0,
        '-' => 300.0,
        c => 400.0 + (c as u32 % 7) as f64 * 50.0,
    }
}

#[test]
fn classic_positions_follow_tfm_widths() {
    let page = fixture_page("classic_hello.dvi");
    let y0 = bp(-((0.683332 * 10.0 * SP as f64) as i64));
    let mut x = 0;
    for (i, c) in "Hello".chars().enumerate() {
        let g = &page.glyphs[i];
        assert_eq!(g.glyph, GlyphRef::Char(c as u32));
        assert!(close(g.x_pt, bp(x)), "{c}: {} vs {}", g.x_pt, bp(x));
        assert!(close(g.y_pt, y0));
        assert_eq!(g.color, Rgba::rgb(0.0, 0.0, 1.0), "inside color push");
        x += tfm_width(c, 10 * SP);
    }
    // w3 then set1 'W'
    x += (3.33 * SP as f64) as i64;
    let w = &page.glyphs[5];
    assert_eq!(w.glyph, GlyphRef::Char('W' as u32));
    assert!(close(w.x_pt, bp(x)));
    assert_eq!(w.color, Rgba::BLACK, "after color pop");
    // Font 64 is the same metrics at 7pt.
    let a = page.glyphs.iter().find(|g| g.font_k == 64).unwrap();
    assert!(close(a.size_pt, bp(7 * SP)));
    assert!(close(a.advance_pt, bp(tfm_width('a', 7 * SP))));
    assert_eq!(page.rules.len(), 2, "the zero-height rule is dropped");
    assert!(close(page.rules[0].width_pt, bp(50 * SP)));
}

#[test]
fn xdv_glyph_positions() {
    let page = fixture_page("xdv_x.xdv");
    assert_eq!(page.glyphs.len(), 1);
    let g = &page.glyphs[0];
    assert_eq!(g.glyph, GlyphRef::Id(('x' as u32 - 0x1F) as u16));
    assert!(close(g.x_pt, 0.0));
    assert!(close(g.y_pt, bp((4.3 * SP as f64) as i64)));
    assert!(close(g.size_pt, bp(10 * SP)));
    // The page-size special is not a color special.
    assert!(page.diagnostics.iter().any(|d| d.kind == DiagnosticKind::IgnoredSpecial));
}

#[test]
fn native_font_flags_apply() {
    let page = fixture_page("xdv_fontflags.xdv");
    assert_eq!(page.glyphs.len(), 2);
    for g in &page.glyphs {
        assert_eq!(g.color, Rgba::rgb(0.0, 128.0 / 255.0, 0.0));
        assert!(close(g.size_pt, bp(12 * SP)));
    }
}

#[test]
fn color_partition_on_fixtures() {
    for name in ["xdv_color.xdv", "classic_color.dvi"] {
        let page = fixture_page(name);
        let doc = to_document(&page);
        check_color_partition(&doc, BLACK).unwrap_or_else(|e| panic!("{name}: {e}"));
        let red = doc.glyphs.iter().filter(|g| g.color == [1.0, 0.0, 0.0, 1.0]).count();
        assert_eq!(red, "inred".len(), "{name}");
    }
    let single = to_document(&fixture_page("xdv_x.xdv"));
    assert!(check_color_partition(&single, BLACK).is_err());
}

#[test]
fn math_layout_on_fixture() {
    let page = fixture_page("xdv_bar_x1.xdv");
    let doc = to_document(&page);
    check_math_layout(&doc).unwrap();
    let chars: Vec<_> = doc.glyphs.iter().map(|g| glyph_char(&page, g)).collect();
    assert_eq!(chars, [Some('\u{AF}'), Some('x'), Some('1')]);
    assert!(check_math_layout(&to_document(&fixture_page("xdv_x.xdv"))).is_err());
}

#[test]
fn paragraph_width_and_justification() {
    let page = fixture_page("xdv_paragraph.xdv");
    let doc = to_document(&page);
    check_width_law(&doc, 144.0).unwrap();
    check_justification(&doc, &|g| glyph_char(&page, g)).unwrap();
    let lines = lines(&doc, 0.5);
    assert_eq!(lines.len(), 4);
    // Full lines end at the measure up to JSON rounding.
    for line in &lines[..3] {
        let edge = line.iter().map(|g| g.x + g.w).fold(f64::MIN, f64::max);
        assert!((edge - bp(144 * SP)).abs() < 1e-3, "{edge}");
    }
    // The last line is set at natural spacing.
    let text = "phenated word at the end.";
    let natural: f64 = text.chars().map(native_advance).sum::<f64>() / 1000.0 * bp(10 * SP);
    let last = &lines[3];
    let edge = last.iter().map(|g| g.x + g.w).fold(f64::MIN, f64::max);
    assert!((edge - natural).abs() < 1e-2, "{edge} vs {natural}");
    assert!(check_justification(&to_document(&fixture_page("xdv_color.xdv")), &|_| None).is_err());
}

#[test]
fn anchors_on_fixture_box() {
    let page = fixture_page("xdv_paragraph.xdv");
    let b = page.bbox;
    let (dx, dy) = compute_anchor(&page, Justify::Fraction(0.5), Justify::Fraction(-0.4)).unwrap();
    assert!(close(dx, -(b.xmin + 0.5 * b.width())));
    assert!(close(dy, -(b.ymax + 0.4 * b.height())));
    let (bx, by) = compute_anchor(&page, Justify::Baseline, Justify::Baseline).unwrap();
    assert_eq!((bx, by), (-0.0, -page.baseline_y_pt));
}

#[test]
fn unresolvable_native_font_falls_back() {
    let bytes = std::fs::read(fixtures().join("xdv_color.xdv")).unwrap();
    let program = texglyph::parse(&bytes).unwrap();
    let no_fonts = texglyph::fonts::FontServices::new(texglyph::fonts::SearchConfig::default());
    let page = texglyph::interpret(&program, 0, &no_fonts).unwrap();
    assert_eq!(page.glyphs.len(), fixture_page("xdv_color.xdv").glyphs.len());
    assert!(page.diagnostics.iter().any(|d| d.kind == DiagnosticKind::FontFallback));
}

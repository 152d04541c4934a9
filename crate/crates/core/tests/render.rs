mod common;

use common::*;
use texglyph::render::{SvgGlyphMode, Target};
use texglyph::{emit_json, emit_svg, RenderOptions};

const ALLOWED: &[&str] = &["svg", "g", "path", "rect", "text"];

fn svg_options(mode: SvgGlyphMode) -> RenderOptions {
    RenderOptions { target: Target::Svg, svg_glyph_mode: mode, ..RenderOptions::default() }
}

fn check_svg<'a>(name: &str, svg: &'a str) -> roxmltree::Document<'a> {
    let doc = roxmltree::Document::parse(svg).unwrap_or_else(|e| panic!("{name}: {e}"));
    for node in doc.descendants().filter(|n| n.is_element()) {
        let tag = node.tag_name().name();
        assert!(ALLOWED.contains(&tag), "{name}: unexpected <{tag}>");
    }
    let view: Vec<f64> = doc
        .root_element()
        .attribute("viewBox")
        .unwrap()
        .split(' ')
        .map(|v| v.parse().unwrap())
        .collect();
    assert!(view[2] > 0.0 && view[3] > 0.0, "{name}: empty viewBox");
    doc
}

#[test]
fn text_mode_svg_is_well_formed_for_every_fixture() {
    let fonts = font_services();
    for (name, bytes) in corpus() {
        let program = texglyph::parse(&bytes).unwrap();
        for i in 0..program.page_count() {
            let page = texglyph::interpret(&program, i, &fonts).unwrap();
            let svg = emit_svg(&page, &svg_options(SvgGlyphMode::Text)).unwrap();
            let doc = check_svg(&name, &svg);
            let rects = doc.descendants().filter(|n| n.has_tag_name("rect")).count();
            assert_eq!(rects, page.rules.len(), "{name} page {i}");
        }
    }
}

#[test]
fn path_mode_svg_for_native_fonts() {
    for name in ["xdv_color.xdv", "xdv_paragraph.xdv", "xdv_bar_x1.xdv"] {
        let page = fixture_page(name);
        let svg = emit_svg(&page, &svg_options(SvgGlyphMode::Paths)).unwrap();
        let doc = check_svg(name, &svg);
        let paths: Vec<_> = doc.descendants().filter(|n| n.has_tag_name("path")).collect();
        assert!(!paths.is_empty(), "{name}");
        for p in paths {
            let d = p.attribute("d").unwrap();
            assert!(d.starts_with('M') && d.trim_end().ends_with('Z'), "{name}: {d}");
        }
    }
}

#[test]
fn path_mode_rejects_metric_only_fonts() {
    let page = fixture_page("classic_hello.dvi");
    assert!(emit_svg(&page, &svg_options(SvgGlyphMode::Paths)).is_err());
}

#[test]
fn text_mode_carries_colors_and_characters() {
    let page = fixture_page("xdv_color.xdv");
    let svg = emit_svg(&page, &svg_options(SvgGlyphMode::Text)).unwrap();
    let doc = check_svg("xdv_color", &svg);
    let red: String = doc
        .descendants()
        .filter(|n| n.has_tag_name("text") && n.attribute("fill") == Some("#ff0000"))
        .filter_map(|n| n.text())
        .collect();
    assert_eq!(red, "inred");
}

#[test]
fn scale_multiplies_coordinates() {
    let page = fixture_page("xdv_x.xdv");
    let one = emit_svg(&page, &svg_options(SvgGlyphMode::Text)).unwrap();
    let two = emit_svg(&page, &RenderOptions { scale: 2.0, ..svg_options(SvgGlyphMode::Text) }).unwrap();
    let size = |s: &str| -> f64 {
        let d = roxmltree::Document::parse(s).unwrap();
        let t = d.descendants().find(|n| n.has_tag_name("text")).unwrap();
        t.attribute("font-size").unwrap().parse().unwrap()
    };
    assert!((size(&two) - 2.0 * size(&one)).abs() < 1e-3);
    assert!(emit_svg(&page, &RenderOptions { scale: 0.0, ..RenderOptions::default() }).is_err());
}

#[test]
fn json_is_deterministic_and_complete() {
    for (name, bytes) in corpus() {
        let program = texglyph::parse(&bytes).unwrap();
        let page = texglyph::interpret(&program, 0, &font_services()).unwrap();
        let a = emit_json(&page);
        let again = texglyph::interpret(&texglyph::parse(&bytes).unwrap(), 0, &font_services()).unwrap();
        assert_eq!(a, emit_json(&again), "{name}");
        let doc = to_document(&page);
        assert_eq!(doc.glyphs.len(), page.glyphs.len(), "{name}");
        assert_eq!(doc.rules.len(), page.rules.len(), "{name}");
        for g in &doc.glyphs {
            assert!(doc.font(g.k).is_some(), "{name}: glyph refers to missing font {}", g.k);
            assert!(g.color.iter().all(|c| (0.0..=1.0).contains(c)));
        }
        let v: serde_json::Value = serde_json::from_str(&a).unwrap();
        assert_eq!(v["version"], 1);
    }
}

//! Execute DVI pages into device-independent glyph and rule placements.
//!
//! All output lengths are big points with y increasing downward from the
//! page reference point.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::diagnostic::{Diagnostic, DiagnosticKind};
use crate::dvi::{DviProgram, FontDefinition, Preamble, NATIVE_FLAG_COLORED};
use crate::fonts::{FontKind, FontResource, FontServices};

pub mod machine;
pub mod special;

pub use machine::{Machine, Mark, Registers};
pub use special::{apply_special, parse_color, ColorStack, Rgba};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LayoutError {
    #[error("page {index} out of range (file has {count})")]
    PageOutOfRange { index: usize, count: usize },
    #[error("pop with empty stack at offset {offset}")]
    StackUnderflow { offset: usize },
    #[error("undefined font {k}")]
    UndefinedFont { k: i32 },
    #[error("character or glyph command with no font selected at offset {offset}")]
    NoFontSelected { offset: usize },
    #[error("metrics unavailable for font {k}: {reason}")]
    MetricsUnavailable { k: i32, reason: String },
    #[error("page has no glyphs or rules")]
    EmptyPage,
}

/// Converts DVI units to big points using the preamble's unit fraction and
/// magnification.
pub fn units_to_points(d: i64, pre: &Preamble) -> f64 {
    // bp = d * num * mag * 72 / (den * 1000 * 10^7 * 0.0254)
    let numer = d as i128 * pre.num as i128 * pre.mag as i128 * 72;
    let denom = pre.den as f64 * 254_000_000.0;
    numer as f64 / denom
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GlyphRef {
    /// Character code in a TFM font.
    Char(u32),
    /// Glyph id in a native font.
    Id(u16),
}

impl GlyphRef {
    pub fn index(self) -> u32 {
        match self {
            GlyphRef::Char(c) => c,
            GlyphRef::Id(g) => g as u32,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GlyphPlacement {
    pub font_k: i32,
    pub glyph: GlyphRef,
    pub x_pt: f64,
    pub y_pt: f64,
    pub size_pt: f64,
    pub color: Rgba,
    /// Horizontal advance, used for extents and line-end measurements.
    pub advance_pt: f64,
}

/// A filled rectangle whose bottom-left corner is at `(x_pt, y_pt)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RulePlacement {
    pub x_pt: f64,
    pub y_pt: f64,
    pub width_pt: f64,
    pub height_pt: f64,
    pub color: Rgba,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct BBox {
    pub xmin: f64,
    pub ymin: f64,
    pub xmax: f64,
    pub ymax: f64,
}

impl BBox {
    pub fn width(&self) -> f64 {
        self.xmax - self.xmin
    }

    pub fn height(&self) -> f64 {
        self.ymax - self.ymin
    }

    fn union(a: Option<BBox>, b: BBox) -> BBox {
        match a {
            None => b,
            Some(a) => BBox {
                xmin: a.xmin.min(b.xmin),
                ymin: a.ymin.min(b.ymin),
                xmax: a.xmax.max(b.xmax),
                ymax: a.ymax.max(b.ymax),
            },
        }
    }
}

/// A font used on a page.
#[derive(Debug, Clone)]
pub struct PageFont {
    pub k: i32,
    pub def: FontDefinition,
    /// File the font resolved to, or the name in the definition.
    pub file: String,
    pub face_index: u32,
    pub size_pt: f64,
    /// `None` when the font could not be resolved.
    pub resource: Option<FontResource>,
}

impl PageFont {
    pub fn kind(&self) -> Option<FontKind> {
        self.resource.as_ref().map(|r| r.kind)
    }
}

#[derive(Debug, Clone, Default)]
pub struct TypesetPage {
    pub glyphs: Vec<GlyphPlacement>,
    pub rules: Vec<RulePlacement>,
    pub bbox: BBox,
    /// y of the first glyph on the page.
    pub baseline_y_pt: f64,
    pub width_pt: f64,
    /// Extent above the baseline.
    pub height_pt: f64,
    /// Extent below the baseline.
    pub depth_pt: f64,
    /// Fonts selected on the page, by font number.
    pub fonts: Vec<PageFont>,
    pub diagnostics: Vec<Diagnostic>,
    pub max_stack_depth: usize,
    pub default_color: Rgba,
}

impl TypesetPage {
    pub fn font(&self, k: i32) -> Option<&PageFont> {
        self.fonts.iter().find(|f| f.k == k)
    }

    pub fn is_empty(&self) -> bool {
        self.glyphs.is_empty() && self.rules.is_empty()
    }
}

/// Fallback vertical metrics (fractions of the size) for unresolved fonts.
const FALLBACK_ASCENT: f64 = 0.8;
const FALLBACK_DESCENT: f64 = 0.2;

struct FontState {
    page_font: PageFont,
    scaled: i32,
    warned: bool,
}

struct Interpreter<'a> {
    program: &'a DviProgram,
    services: &'a FontServices,
    defs: BTreeMap<i32, FontDefinition>,
    fonts: BTreeMap<i32, FontState>,
    diagnostics: Vec<Diagnostic>,
}

impl Interpreter<'_> {
    fn pts(&self, d: i32) -> f64 {
        units_to_points(d as i64, &self.program.pre)
    }

    fn font(&mut self, k: i32) -> Result<&mut FontState, LayoutError> {
        if !self.fonts.contains_key(&k) {
            let def = self.defs.get(&k).cloned().ok_or(LayoutError::UndefinedFont { k })?;
            let scaled = match &def {
                FontDefinition::Tfm(d) => d.scaled_size as i32,
                FontDefinition::Native(d) => d.point_size,
            };
            let (resource, file, face_index) = match self.services.resolve(&def) {
                Ok(r) => {
                    self.diagnostics.extend(r.warnings.iter().cloned());
                    let file = r
                        .path
                        .as_ref()
                        .map(|p| p.display().to_string())
                        .unwrap_or_else(|| def.display_name());
                    let face = r.face_index;
                    (Some(r), file, face)
                }
                Err(e) => {
                    if let FontDefinition::Tfm(_) = def {
                        return Err(LayoutError::MetricsUnavailable {
                            k,
                            reason: e.to_string(),
                        });
                    }
                    let face = match &def {
                        FontDefinition::Native(d) => d.face_index,
                        FontDefinition::Tfm(_) => 0,
                    };
                    (None, def.display_name(), face)
                }
            };
            let size_pt = self.pts(scaled);
            self.fonts.insert(
                k,
                FontState {
                    page_font: PageFont {
                        k,
                        def,
                        file,
                        face_index,
                        size_pt,
                        resource,
                    },
                    scaled,
                    warned: false,
                },
            );
        }
        Ok(self.fonts.get_mut(&k).expect("inserted above"))
    }

    /// Advance of a character in DVI units.
    fn char_width(&mut self, k: i32, code: u32) -> Result<i32, LayoutError> {
        let st = self.font(k)?;
        let scaled = st.scaled;
        let size = st.page_font.size_pt;
        let res = st.page_font.resource.clone();
        let missing = |this: &mut Self| {
            this.diagnostics.push(Diagnostic::warning(
                DiagnosticKind::MissingCharacter,
                format!("character {code} missing from font {k}"),
            ));
            Ok(0)
        };
        match res {
            Some(r) => match r.tfm() {
                Some(m) => match m.scaled_width(code, scaled) {
                    Some(w) => Ok(w),
                    None => missing(self),
                },
                None => {
                    let g = char::from_u32(code).and_then(|c| r.char_to_glyph(c));
                    match g.and_then(|g| r.glyph_advance(g as u32, size).ok()) {
                        Some(adv_bp) => Ok((adv_bp / self.pts(1 << 16) * 65536.0).round() as i32),
                        None => missing(self),
                    }
                }
            },
            None => Err(LayoutError::MetricsUnavailable {
                k,
                reason: "font not resolved".into(),
            }),
        }
    }
}

/// Runs page `page_index` of `program` on the DVI machine.
pub fn interpret(
    program: &DviProgram,
    page_index: usize,
    services: &FontServices,
) -> Result<TypesetPage, LayoutError> {
    let page = program.pages.get(page_index).ok_or(LayoutError::PageOutOfRange {
        index: page_index,
        count: program.pages.len(),
    })?;

    // Fonts defined before this page, in file order.
    let mut defs = BTreeMap::new();
    let before = program.pages[..page_index]
        .iter()
        .flat_map(|p| p.leading.iter().chain(p.commands.iter()))
        .chain(page.leading.iter());
    for c in before {
        if let Some(d) = c.instr.font_definition() {
            defs.entry(d.k()).or_insert(d);
        }
    }
    let mut machine = Machine::new(defs.keys().copied());
    for c in &page.commands {
        if let Some(d) = c.instr.font_definition() {
            defs.entry(d.k()).or_insert(d);
        }
    }

    let mut it = Interpreter {
        program,
        services,
        defs,
        fonts: BTreeMap::new(),
        diagnostics: Vec::new(),
    };
    let mut colors = ColorStack::default();
    let mut out = TypesetPage {
        default_color: colors.default_color(),
        ..TypesetPage::default()
    };
    let mut bbox: Option<BBox> = None;
    let mut baseline: Option<f64> = None;

    for cmd in &page.commands {
        let mark = {
            let it = &mut it;
            machine.step(cmd, &mut |k, code| it.char_width(k, code))?
        };
        let Some(mark) = mark else { continue };
        match mark {
            Mark::Char { k, code, h, v, width } => {
                let (x, y, adv) = (it.pts(h), it.pts(v), it.pts(width));
                let st = it.font(k)?;
                let size = st.page_font.size_pt;
                let (asc, desc) = st
                    .page_font
                    .resource
                    .as_ref()
                    .and_then(|r| r.char_extent(code).or(Some((r.ascent, r.descent))))
                    .unwrap_or((FALLBACK_ASCENT, FALLBACK_DESCENT));
                bbox = Some(BBox::union(
                    bbox,
                    BBox {
                        xmin: x.min(x + adv),
                        ymin: y - asc * size,
                        xmax: x.max(x + adv),
                        ymax: y + desc * size,
                    },
                ));
                baseline.get_or_insert(y);
                out.glyphs.push(GlyphPlacement {
                    font_k: k,
                    glyph: GlyphRef::Char(code),
                    x_pt: x,
                    y_pt: y,
                    size_pt: size,
                    color: colors.current(),
                    advance_pt: adv,
                });
            }
            Mark::Glyphs { k, run, h, width } => {
                let end = h.wrapping_add(width);
                let run_pts: Vec<(u16, f64, f64)> =
                    run.iter().map(|&(g, gh, gv)| (g, it.pts(gh), it.pts(gv))).collect();
                let next_h: Vec<i32> = run
                    .iter()
                    .skip(1)
                    .map(|&(_, gh, _)| gh)
                    .chain(std::iter::once(end))
                    .collect();
                let fallback_adv: Vec<f64> = run
                    .iter()
                    .zip(&next_h)
                    .map(|(&(_, gh, _), &nh)| it.pts(nh.wrapping_sub(gh)))
                    .collect();
                let st = it.font(k)?;
                let size = st.page_font.size_pt;
                let color = match &st.page_font.def {
                    FontDefinition::Native(d) if d.flags & NATIVE_FLAG_COLORED != 0 => {
                        d.rgba.map(Rgba::from_packed).unwrap_or(colors.current())
                    }
                    _ => colors.current(),
                };
                let resource = st.page_font.resource.clone();
                if resource.is_none() && !st.warned {
                    st.warned = true;
                    let name = st.page_font.file.clone();
                    it.diagnostics.push(Diagnostic::warning(
                        DiagnosticKind::FontFallback,
                        format!("font {k} ({name}) not found; using advances from the glyph run"),
                    ));
                }
                let (asc, desc) = resource
                    .as_ref()
                    .map(|r| (r.ascent, r.descent))
                    .unwrap_or((FALLBACK_ASCENT, FALLBACK_DESCENT));
                for (i, &(g, x, y)) in run_pts.iter().enumerate() {
                    let adv = match &resource {
                        Some(r) => match r.glyph_advance(g as u32, size) {
                            Ok(a) => a,
                            Err(e) => {
                                it.diagnostics.push(Diagnostic::warning(
                                    DiagnosticKind::MissingCharacter,
                                    e.to_string(),
                                ));
                                fallback_adv[i]
                            }
                        },
                        None => fallback_adv[i],
                    };
                    bbox = Some(BBox::union(
                        bbox,
                        BBox {
                            xmin: x.min(x + adv),
                            ymin: y - asc * size,
                            xmax: x.max(x + adv),
                            ymax: y + desc * size,
                        },
                    ));
                    baseline.get_or_insert(y);
                    out.glyphs.push(GlyphPlacement {
                        font_k: k,
                        glyph: GlyphRef::Id(g),
                        x_pt: x,
                        y_pt: y,
                        size_pt: size,
                        color,
                        advance_pt: adv,
                    });
                }
            }
            Mark::Rule { h, v, height, width } => {
                if height <= 0 || width <= 0 {
                    continue;
                }
                let r = RulePlacement {
                    x_pt: it.pts(h),
                    y_pt: it.pts(v),
                    width_pt: it.pts(width),
                    height_pt: it.pts(height),
                    color: colors.current(),
                };
                bbox = Some(BBox::union(
                    bbox,
                    BBox {
                        xmin: r.x_pt,
                        ymin: r.y_pt - r.height_pt,
                        xmax: r.x_pt + r.width_pt,
                        ymax: r.y_pt,
                    },
                ));
                out.rules.push(r);
            }
            Mark::Special(bytes) => {
                if let Some(d) = apply_special(&bytes, &mut colors) {
                    it.diagnostics.push(d);
                }
            }
        }
    }

    out.max_stack_depth = machine.max_depth();
    if machine.max_depth() > program.post.max_stack_depth as usize {
        it.diagnostics.push(Diagnostic::warning(
            DiagnosticKind::StackDepthExceeded,
            format!(
                "stack depth {} exceeds the postamble maximum {}",
                machine.max_depth(),
                program.post.max_stack_depth
            ),
        ));
    }
    let bbox = bbox.unwrap_or_default();
    let baseline = baseline
        .or_else(|| out.rules.first().map(|r| r.y_pt))
        .unwrap_or(0.0);
    out.bbox = bbox;
    out.baseline_y_pt = baseline;
    out.width_pt = bbox.width();
    if !out.is_empty() {
        out.height_pt = baseline - bbox.ymin;
        out.depth_pt = bbox.ymax - baseline;
    }
    out.fonts = it.fonts.into_values().map(|s| s.page_font).collect();
    out.diagnostics = it.diagnostics;
    Ok(out)
}

/// Horizontal or vertical anchor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Justify {
    /// 0 = left/bottom edge, 1 = right/top edge; other values extrapolate.
    Fraction(f64),
    /// The page reference point horizontally, the first baseline vertically.
    Baseline,
}

/// Translation that moves the requested anchor point of the page's box to
/// the origin.
pub fn compute_anchor(
    page: &TypesetPage,
    hjust: Justify,
    vjust: Justify,
) -> Result<(f64, f64), LayoutError> {
    if page.is_empty() {
        return Err(LayoutError::EmptyPage);
    }
    let b = page.bbox;
    let ax = match hjust {
        Justify::Fraction(f) => b.xmin + f * (b.xmax - b.xmin),
        Justify::Baseline => 0.0,
    };
    // y grows downward, so the bottom edge is ymax.
    let ay = match vjust {
        Justify::Fraction(f) => b.ymax - f * (b.ymax - b.ymin),
        Justify::Baseline => page.baseline_y_pt,
    };
    Ok((-ax, -ay))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dvi::{DviFlavor, Instruction};

    fn page_with_box(b: BBox) -> TypesetPage {
        TypesetPage {
            bbox: b,
            baseline_y_pt: 3.0,
            rules: vec![RulePlacement {
                x_pt: b.xmin,
                y_pt: b.ymax,
                width_pt: b.width(),
                height_pt: b.height(),
                color: Rgba::BLACK,
            }],
            ..TypesetPage::default()
        }
    }

    #[test]
    fn one_tex_point() {
        let pre = Preamble::standard(DviFlavor::ClassicDvi, b"");
        let bp = units_to_points(65536, &pre);
        let oracle = 7200.0 / 7227.0;
        assert!(((bp - oracle) / oracle).abs() < 1e-12, "{bp}");
        assert_eq!(units_to_points(0, &pre), 0.0);
        assert_eq!(units_to_points(-65536, &pre), -bp);
        let mag2 = Preamble { mag: 2000, ..pre.clone() };
        assert_eq!(units_to_points(65536, &mag2), 2.0 * bp);
    }

    #[test]
    fn anchors() {
        let p = page_with_box(BBox { xmin: 0.0, ymin: 0.0, xmax: 10.0, ymax: 4.0 });
        assert_eq!(
            compute_anchor(&p, Justify::Fraction(0.5), Justify::Fraction(0.5)).unwrap(),
            (-5.0, -2.0)
        );
        let p = page_with_box(BBox { xmin: 0.0, ymin: 0.0, xmax: 10.0, ymax: 10.0 });
        let (_, dy) = compute_anchor(&p, Justify::Fraction(0.0), Justify::Fraction(-0.4)).unwrap();
        assert!((dy - -14.0).abs() < 1e-12);
        let (_, dy) = compute_anchor(&p, Justify::Fraction(0.0), Justify::Baseline).unwrap();
        assert_eq!(dy, -3.0);
        assert_eq!(
            compute_anchor(&TypesetPage::default(), Justify::Baseline, Justify::Baseline),
            Err(LayoutError::EmptyPage)
        );
    }

    #[test]
    fn rules_and_colors_without_fonts() {
        let program = DviProgram::build(
            DviFlavor::ClassicDvi,
            vec![vec![
                Instruction::Down(10 << 16),
                Instruction::Special(b"color push rgb 1 0 0".to_vec()),
                Instruction::SetRule { height: 2 << 16, width: 5 << 16, advance: true },
                Instruction::Special(b"color pop".to_vec()),
                Instruction::SetRule { height: 0, width: 5 << 16, advance: true },
                Instruction::SetRule { height: 1 << 16, width: 1 << 16, advance: false },
                Instruction::Special(b"papersize=1pt,1pt".to_vec()),
            ]],
        );
        let page = interpret(&program, 0, &FontServices::default()).unwrap();
        assert_eq!(page.rules.len(), 2, "degenerate rule dropped");
        assert_eq!(page.rules[0].color, Rgba::rgb(1.0, 0.0, 0.0));
        assert_eq!(page.rules[1].color, Rgba::BLACK);
        let pt = 7200.0 / 7227.0;
        assert!((page.rules[1].x_pt - 10.0 * pt).abs() < 1e-9);
        assert!((page.bbox.xmax - 11.0 * pt).abs() < 1e-9);
        assert!((page.bbox.ymin - 8.0 * pt).abs() < 1e-9);
        assert_eq!(page.diagnostics.len(), 1);
        assert_eq!(page.diagnostics[0].kind, DiagnosticKind::IgnoredSpecial);
    }

    #[test]
    fn tfm_font_missing_is_metrics_unavailable() {
        let program = DviProgram::build(
            DviFlavor::ClassicDvi,
            vec![vec![
                Instruction::FontDef(crate::dvi::FontDef {
                    k: 0,
                    checksum: 0,
                    scaled_size: 10 << 16,
                    design_size: 10 << 16,
                    area: vec![],
                    name: b"nosuchfont".to_vec(),
                }),
                Instruction::FontSelect(0),
                Instruction::SetChar { code: 65, advance: true },
            ]],
        );
        let err = interpret(&program, 0, &FontServices::default()).unwrap_err();
        assert!(matches!(err, LayoutError::MetricsUnavailable { k: 0, .. }));
        assert!(matches!(
            interpret(&program, 1, &FontServices::default()),
            Err(LayoutError::PageOutOfRange { index: 1, count: 1 })
        ));
    }
}

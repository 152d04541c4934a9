//! dvips-style color specials.

use serde::{Deserialize, Serialize};

use crate::diagnostic::{Diagnostic, DiagnosticKind};

/// Color with components in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rgba {
    pub r: f64,
    pub g: f64,
    pub b: f64,
    pub a: f64,
}

impl Default for Rgba {
    fn default() -> Self {
        Rgba::BLACK
    }
}

impl Rgba {
    pub const BLACK: Rgba = Rgba::rgb(0.0, 0.0, 0.0);

    pub const fn rgb(r: f64, g: f64, b: f64) -> Self {
        Rgba { r, g, b, a: 1.0 }
    }

    /// From a packed `0xRRGGBBAA` value as stored in XDV font definitions.
    pub fn from_packed(v: u32) -> Self {
        let c = |shift: u32| ((v >> shift) & 0xff) as f64 / 255.0;
        Rgba {
            r: c(24),
            g: c(16),
            b: c(8),
            a: c(0),
        }
    }

    pub fn cmyk(c: f64, m: f64, y: f64, k: f64) -> Self {
        Rgba::rgb((1.0 - c) * (1.0 - k), (1.0 - m) * (1.0 - k), (1.0 - y) * (1.0 - k))
    }

    pub fn hsb(h: f64, s: f64, b: f64) -> Self {
        let h6 = (h.rem_euclid(1.0)) * 6.0;
        let i = h6.floor();
        let f = h6 - i;
        let (p, q, t) = (b * (1.0 - s), b * (1.0 - s * f), b * (1.0 - s * (1.0 - f)));
        let (r, g, bl) = match i as u8 {
            0 => (b, t, p),
            1 => (q, b, p),
            2 => (p, b, t),
            3 => (p, q, b),
            4 => (t, p, b),
            _ => (b, p, q),
        };
        Rgba::rgb(r, g, bl)
    }

    /// `#rrggbb`, rounding each channel to the nearest byte.
    pub fn hex(&self) -> String {
        let byte = |v: f64| (v.clamp(0.0, 1.0) * 255.0).round() as u8;
        format!("#{:02x}{:02x}{:02x}", byte(self.r), byte(self.g), byte(self.b))
    }
}

/// CMYK values of the named colors a dvips driver knows.
const NAMED: [(&str, [f64; 4]); 68] = [
    ("GreenYellow", [0.15, 0.0, 0.69, 0.0]),
    ("Yellow", [0.0, 0.0, 1.0, 0.0]),
    ("Goldenrod", [0.0, 0.10, 0.84, 0.0]),
    ("Dandelion", [0.0, 0.29, 0.84, 0.0]),
    ("Apricot", [0.0, 0.32, 0.52, 0.0]),
    ("Peach", [0.0, 0.50, 0.70, 0.0]),
    ("Melon", [0.0, 0.46, 0.50, 0.0]),
    ("YellowOrange", [0.0, 0.42, 1.0, 0.0]),
    ("Orange", [0.0, 0.61, 0.87, 0.0]),
    ("BurntOrange", [0.0, 0.51, 1.0, 0.0]),
    ("Bittersweet", [0.0, 0.75, 1.0, 0.24]),
    ("RedOrange", [0.0, 0.77, 0.87, 0.0]),
    ("Mahogany", [0.0, 0.85, 0.87, 0.35]),
    ("Maroon", [0.0, 0.87, 0.68, 0.32]),
    ("BrickRed", [0.0, 0.89, 0.94, 0.28]),
    ("Red", [0.0, 1.0, 1.0, 0.0]),
    ("OrangeRed", [0.0, 1.0, 0.50, 0.0]),
    ("RubineRed", [0.0, 1.0, 0.13, 0.0]),
    ("WildStrawberry", [0.0, 0.96, 0.39, 0.0]),
    ("Salmon", [0.0, 0.53, 0.38, 0.0]),
    ("CarnationPink", [0.0, 0.63, 0.0, 0.0]),
    ("Magenta", [0.0, 1.0, 0.0, 0.0]),
    ("VioletRed", [0.0, 0.81, 0.0, 0.0]),
    ("Rhodamine", [0.0, 0.82, 0.0, 0.0]),
    ("Mulberry", [0.34, 0.90, 0.0, 0.02]),
    ("RedViolet", [0.07, 0.90, 0.0, 0.34]),
    ("Fuchsia", [0.47, 0.91, 0.0, 0.08]),
    ("Lavender", [0.0, 0.48, 0.0, 0.0]),
    ("Thistle", [0.12, 0.59, 0.0, 0.0]),
    ("Orchid", [0.32, 0.64, 0.0, 0.0]),
    ("DarkOrchid", [0.40, 0.80, 0.20, 0.0]),
    ("Purple", [0.45, 0.86, 0.0, 0.0]),
    ("Plum", [0.50, 1.0, 0.0, 0.0]),
    ("Violet", [0.79, 0.88, 0.0, 0.0]),
    ("RoyalPurple", [0.75, 0.90, 0.0, 0.0]),
    ("BlueViolet", [0.86, 0.91, 0.0, 0.04]),
    ("Periwinkle", [0.57, 0.55, 0.0, 0.0]),
    ("CadetBlue", [0.62, 0.57, 0.23, 0.0]),
    ("CornflowerBlue", [0.65, 0.13, 0.0, 0.0]),
    ("MidnightBlue", [0.98, 0.13, 0.0, 0.43]),
    ("NavyBlue", [0.94, 0.54, 0.0, 0.0]),
    ("RoyalBlue", [1.0, 0.50, 0.0, 0.0]),
    ("Blue", [1.0, 1.0, 0.0, 0.0]),
    ("Cerulean", [0.94, 0.11, 0.0, 0.0]),
    ("Cyan", [1.0, 0.0, 0.0, 0.0]),
    ("ProcessBlue", [0.96, 0.0, 0.0, 0.0]),
    ("SkyBlue", [0.62, 0.0, 0.12, 0.0]),
    ("Turquoise", [0.85, 0.0, 0.20, 0.0]),
    ("TealBlue", [0.86, 0.0, 0.34, 0.02]),
    ("Aquamarine", [0.82, 0.0, 0.30, 0.0]),
    ("BlueGreen", [0.85, 0.0, 0.33, 0.0]),
    ("Emerald", [1.0, 0.0, 0.50, 0.0]),
    ("JungleGreen", [0.99, 0.0, 0.52, 0.0]),
    ("SeaGreen", [0.69, 0.0, 0.50, 0.0]),
    ("Green", [1.0, 0.0, 1.0, 0.0]),
    ("ForestGreen", [0.91, 0.0, 0.88, 0.12]),
    ("PineGreen", [0.92, 0.0, 0.59, 0.25]),
    ("LimeGreen", [0.50, 0.0, 1.0, 0.0]),
    ("YellowGreen", [0.44, 0.0, 0.74, 0.0]),
    ("SpringGreen", [0.26, 0.0, 0.76, 0.0]),
    ("OliveGreen", [0.64, 0.0, 0.95, 0.40]),
    ("RawSienna", [0.0, 0.72, 1.0, 0.45]),
    ("Sepia", [0.0, 0.83, 1.0, 0.70]),
    ("Brown", [0.0, 0.81, 1.0, 0.60]),
    ("Tan", [0.14, 0.42, 0.56, 0.0]),
    ("Gray", [0.0, 0.0, 0.0, 0.50]),
    ("Black", [0.0, 0.0, 0.0, 1.0]),
    ("White", [0.0, 0.0, 0.0, 0.0]),
];

pub fn named_color(name: &str) -> Option<Rgba> {
    NAMED
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, [c, m, y, k])| Rgba::cmyk(*c, *m, *y, *k))
}

/// Parses a color specification such as `rgb 1 0 0`, `gray 0.5` or `Red`.
pub fn parse_color(spec: &str) -> Option<Rgba> {
    let mut words = spec.split_whitespace();
    let model = words.next()?;
    let nums: Vec<f64> = words
        .map(|w| w.parse::<f64>().ok().map(|v| v.clamp(0.0, 1.0)))
        .collect::<Option<_>>()?;
    match (model, nums.as_slice()) {
        ("rgb", [r, g, b]) => Some(Rgba::rgb(*r, *g, *b)),
        ("gray", [g]) => Some(Rgba::rgb(*g, *g, *g)),
        ("cmyk", [c, m, y, k]) => Some(Rgba::cmyk(*c, *m, *y, *k)),
        ("hsb", [h, s, b]) => Some(Rgba::hsb(*h, *s, *b)),
        (name, []) => named_color(name),
        _ => None,
    }
}

/// The driver color stack. The bottom entry is the default ink and is
/// never popped.
#[derive(Debug, Clone, PartialEq)]
pub struct ColorStack {
    stack: Vec<Rgba>,
}

impl Default for ColorStack {
    fn default() -> Self {
        ColorStack::new(Rgba::BLACK)
    }
}

impl ColorStack {
    pub fn new(default: Rgba) -> Self {
        ColorStack {
            stack: vec![default],
        }
    }

    pub fn current(&self) -> Rgba {
        *self.stack.last().expect("color stack keeps its default entry")
    }

    pub fn default_color(&self) -> Rgba {
        self.stack[0]
    }

    pub fn depth(&self) -> usize {
        self.stack.len() - 1
    }
}

/// Applies one special to `colors`. Returns a diagnostic for specials that
/// are not color commands or that cannot be honored.
pub fn apply_special(special: &[u8], colors: &mut ColorStack) -> Option<Diagnostic> {
    let text = String::from_utf8_lossy(special);
    let trimmed = text.trim();
    let ignored = || {
        Some(Diagnostic::warning(
            DiagnosticKind::IgnoredSpecial,
            format!("ignored special '{trimmed}'"),
        ))
    };
    let Some(rest) = trimmed.strip_prefix("color") else {
        return ignored();
    };
    if !rest.is_empty() && !rest.starts_with(char::is_whitespace) {
        return ignored();
    }
    let rest = rest.trim();
    if rest == "pop" {
        if colors.stack.len() > 1 {
            colors.stack.pop();
            return None;
        }
        return Some(Diagnostic::warning(
            DiagnosticKind::ColorStackUnderflow,
            "color pop with an empty color stack",
        ));
    }
    if let Some(spec) = rest.strip_prefix("push") {
        return match parse_color(spec) {
            Some(c) => {
                colors.stack.push(c);
                None
            }
            None => {
                // Keep pushes and pops paired even when the color is unknown.
                colors.stack.push(colors.current());
                ignored()
            }
        };
    }
    match parse_color(rest) {
        Some(c) => {
            colors.stack.truncate(1);
            colors.stack.push(c);
            None
        }
        None => ignored(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn push_and_pop() {
        let mut s = ColorStack::default();
        assert_eq!(apply_special(b"color push rgb 1 0 0", &mut s), None);
        assert_eq!(s.current(), Rgba::rgb(1.0, 0.0, 0.0));
        assert_eq!(apply_special(b"color push gray 0.5", &mut s), None);
        assert_eq!(s.current(), Rgba::rgb(0.5, 0.5, 0.5));
        apply_special(b"color pop", &mut s);
        apply_special(b"color pop", &mut s);
        assert_eq!(s.current(), Rgba::BLACK);
        let d = apply_special(b"color pop", &mut s).unwrap();
        assert_eq!(d.kind, DiagnosticKind::ColorStackUnderflow);
        assert_eq!(s.current(), Rgba::BLACK);
    }

    #[test]
    fn named_and_set() {
        let mut s = ColorStack::default();
        apply_special(b"color push Blue", &mut s);
        assert_eq!(s.current(), Rgba::rgb(0.0, 0.0, 1.0));
        apply_special(b"color push Red", &mut s);
        apply_special(b"color Green", &mut s);
        assert_eq!(s.current(), Rgba::rgb(0.0, 1.0, 0.0));
        assert_eq!(s.depth(), 1);
        assert_eq!(named_color("Gray"), Some(Rgba::rgb(0.5, 0.5, 0.5)));
        assert_eq!(NAMED.len(), 68);
    }

    #[test]
    fn other_specials_are_ignored_with_a_warning() {
        let mut s = ColorStack::default();
        for sp in [&b"papersize=100pt,50pt"[..], b"colorful", b"color push nonsense 1"] {
            let d = apply_special(sp, &mut s).unwrap();
            assert_eq!(d.kind, DiagnosticKind::IgnoredSpecial);
        }
        assert_eq!(s.current(), Rgba::BLACK);
    }

    #[test]
    fn color_models() {
        assert_eq!(parse_color("cmyk 0 1 1 0"), Some(Rgba::rgb(1.0, 0.0, 0.0)));
        assert_eq!(parse_color("hsb 0 1 1"), Some(Rgba::rgb(1.0, 0.0, 0.0)));
        let c = parse_color("hsb 0.5 1 1").unwrap();
        assert_eq!((c.r, c.g, c.b), (0.0, 1.0, 1.0));
        assert_eq!(parse_color("rgb 1 0"), None);
        assert_eq!(Rgba::from_packed(0x008000ff), Rgba::rgb(0.0, 128.0 / 255.0, 0.0));
        assert_eq!(Rgba::rgb(1.0, 0.5, 0.0).hex(), "#ff8000");
    }
}

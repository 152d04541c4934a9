//! TeX font metric files.

use super::FontError;

/// A TFM `fix_word`: signed 32-bit fixed point with 20 fraction bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FixWord(pub i32);

impl FixWord {
    pub const ONE: FixWord = FixWord(1 << 20);

    pub fn from_be_bytes(b: [u8; 4]) -> Self {
        FixWord(i32::from_be_bytes(b))
    }

    pub fn to_be_bytes(self) -> [u8; 4] {
        self.0.to_be_bytes()
    }

    pub fn to_f64(self) -> f64 {
        self.0 as f64 / (1 << 20) as f64
    }

    /// Scales by a size in DVI units exactly as TeX and dvitype do, so the
    /// result matches the engine's own advance to the unit.
    pub fn scale(self, size: i32) -> i32 {
        if !(0..1 << 27).contains(&size) {
            // Beyond TeX's 2048pt limit the integer algorithm is undefined.
            return (self.to_f64() * size as f64).round() as i32;
        }
        let mut z = size as i64;
        let mut alpha: i64 = 16;
        while z >= 0o40000000 {
            z /= 2;
            alpha += alpha;
        }
        let beta = 256 / alpha;
        let alpha = alpha * z;
        let [b0, b1, b2, b3] = self.0.to_be_bytes().map(|b| b as i64);
        let w = (((b3 * z) / 256 + b2 * z) / 256 + b1 * z) / beta;
        match b0 {
            0 => w as i32,
            255 => (w - alpha) as i32,
            // Out-of-range fix_word (|value| >= 16); TeX rejects such fonts.
            _ => (self.to_f64() * size as f64).round() as i32,
        }
    }
}

/// Per-character metrics indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CharInfo {
    pub width_index: u8,
    pub height_index: u8,
    pub depth_index: u8,
    pub italic_index: u8,
}

impl CharInfo {
    pub fn exists(&self) -> bool {
        self.width_index != 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TfmMetrics {
    pub checksum: u32,
    pub design_size: FixWord,
    pub bc: u16,
    pub ec: u16,
    /// Indexed by `code - bc`.
    pub char_info: Vec<CharInfo>,
    pub width_table: Vec<FixWord>,
    pub height_table: Vec<FixWord>,
    pub depth_table: Vec<FixWord>,
    pub italic_table: Vec<FixWord>,
    pub params: Vec<FixWord>,
}

fn malformed(msg: impl Into<String>) -> FontError {
    FontError::MalformedTfm(msg.into())
}

impl TfmMetrics {
    fn info(&self, code: u32) -> Option<CharInfo> {
        if code < self.bc as u32 || code > self.ec as u32 {
            return None;
        }
        let ci = self.char_info[(code - self.bc as u32) as usize];
        ci.exists().then_some(ci)
    }

    pub fn has_char(&self, code: u32) -> bool {
        self.info(code).is_some()
    }

    /// Width as a fraction of the design size.
    pub fn width(&self, code: u32) -> Option<FixWord> {
        self.info(code).map(|ci| self.width_table[ci.width_index as usize])
    }

    pub fn height(&self, code: u32) -> Option<FixWord> {
        self.info(code).map(|ci| self.height_table[ci.height_index as usize])
    }

    pub fn depth(&self, code: u32) -> Option<FixWord> {
        self.info(code).map(|ci| self.depth_table[ci.depth_index as usize])
    }

    /// Design size in TeX points.
    pub fn design_size_pt(&self) -> f64 {
        self.design_size.to_f64()
    }

    /// Advance of `code` in DVI units for a font loaded at `scaled_size`.
    pub fn scaled_width(&self, code: u32, scaled_size: i32) -> Option<i32> {
        self.width(code).map(|w| w.scale(scaled_size))
    }

    pub fn max_height(&self) -> FixWord {
        self.height_table.iter().copied().max().unwrap_or_default()
    }

    pub fn max_depth(&self) -> FixWord {
        self.depth_table.iter().copied().max().unwrap_or_default()
    }
}

/// Decodes a TFM file, checking that the declared table sizes account for
/// the whole file and that every char_info index is in range.
pub fn parse_tfm(bytes: &[u8]) -> Result<TfmMetrics, FontError> {
    if bytes.len() < 24 {
        return Err(malformed(format!("{} bytes is shorter than the header", bytes.len())));
    }
    let half = |i: usize| u16::from_be_bytes([bytes[2 * i], bytes[2 * i + 1]]) as usize;
    let [lf, lh, bc, ec, nw, nh, nd, ni, nl, nk, ne, np] = std::array::from_fn(half);
    if lf * 4 != bytes.len() {
        return Err(malformed(format!(
            "declared length {} words, file has {} bytes",
            lf,
            bytes.len()
        )));
    }
    if bc > ec + 1 || ec > 255 {
        return Err(malformed(format!("bad character range {bc}..{ec}")));
    }
    if lh < 2 {
        return Err(malformed("header shorter than 2 words"));
    }
    if nw == 0 || nh == 0 || nd == 0 || ni == 0 {
        return Err(malformed("empty width, height, depth or italic table"));
    }
    let nc = (ec + 1).saturating_sub(bc);
    let sum = 6 + lh + nc + nw + nh + nd + ni + nl + nk + ne + np;
    if sum != lf {
        return Err(malformed(format!("table sizes sum to {sum} words, header says {lf}")));
    }
    let word = |i: usize| -> [u8; 4] { bytes[4 * i..4 * i + 4].try_into().unwrap() };
    let fix_table = |start: usize, n: usize| -> Vec<FixWord> {
        (start..start + n).map(|i| FixWord::from_be_bytes(word(i))).collect()
    };

    let header = 6;
    let checksum = u32::from_be_bytes(word(header));
    let design_size = FixWord::from_be_bytes(word(header + 1));
    if design_size.0 <= 0 {
        return Err(malformed("nonpositive design size"));
    }
    let ci_start = header + lh;
    let char_info: Vec<CharInfo> = (0..nc)
        .map(|i| {
            let [b0, b1, b2, _] = word(ci_start + i);
            CharInfo {
                width_index: b0,
                height_index: b1 >> 4,
                depth_index: b1 & 15,
                italic_index: b2 >> 2,
            }
        })
        .collect();
    let w_start = ci_start + nc;
    let h_start = w_start + nw;
    let d_start = h_start + nh;
    let i_start = d_start + nd;
    let p_start = i_start + ni + nl + nk + ne;
    let m = TfmMetrics {
        checksum,
        design_size,
        bc: bc as u16,
        ec: ec as u16,
        char_info,
        width_table: fix_table(w_start, nw),
        height_table: fix_table(h_start, nh),
        depth_table: fix_table(d_start, nd),
        italic_table: fix_table(i_start, ni),
        params: fix_table(p_start, np),
    };
    for (i, ci) in m.char_info.iter().enumerate() {
        if !ci.exists() {
            continue;
        }
        if ci.width_index as usize >= nw
            || ci.height_index as usize >= nh
            || ci.depth_index as usize >= nd
            || ci.italic_index as usize >= ni
        {
            return Err(malformed(format!("char {} has an index out of range", bc + i)));
        }
    }
    Ok(m)
}

use super::opcode::{self, OpClass};
use super::*;

fn fits_signed(v: i32, width: u8) -> bool {
    width >= 4 || {
        let bits = 8 * width as u32;
        let min = -(1i64 << (bits - 1));
        let max = (1i64 << (bits - 1)) - 1;
        (min..=max).contains(&(v as i64))
    }
}

fn fits_unsigned(v: u32, width: u8) -> bool {
    width >= 4 || (v as u64) < (1u64 << (8 * width as u32))
}

fn push_be(out: &mut Vec<u8>, v: u32, width: u8) {
    let bytes = v.to_be_bytes();
    out.extend_from_slice(&bytes[4 - width as usize..]);
}

fn font_number_fits(k: i32, width: u8) -> bool {
    if width == 4 {
        true
    } else {
        k >= 0 && fits_unsigned(k as u32, width)
    }
}

fn mismatch(c: &Command) -> DviError {
    DviError::InvariantViolation(format!(
        "{:?} cannot be encoded with {} (opcode {})",
        c.instr,
        c.mnemonic(),
        c.opcode
    ))
}

/// Number of bytes `c` occupies when encoded with its opcode.
pub fn encoded_len(c: &Command) -> usize {
    let info = opcode::info(c.opcode);
    let payload = match &c.instr {
        Instruction::Special(b) => b.len(),
        Instruction::FontDef(d) => d.area.len() + d.name.len(),
        Instruction::NativeFontDef(d) => {
            let optional = [d.rgba.is_some(), d.extend.is_some(), d.slant.is_some(), d.embolden.is_some()]
                .iter()
                .filter(|&&b| b)
                .count();
            // face index plus optional fields
            d.font_file.len() + 4 + 4 * optional
        }
        Instruction::SetGlyphs { glyphs, .. } => 10 * glyphs.len(),
        Instruction::SetTextAndGlyphs { text, glyphs, .. } => 2 * text.len() + 6 + 10 * glyphs.len(),
        _ => 0,
    };
    1 + info.fixed_len + payload
}

fn encode_glyphs(out: &mut Vec<u8>, width: i32, glyphs: &[GlyphPos]) {
    out.extend(width.to_be_bytes());
    out.extend((glyphs.len() as u16).to_be_bytes());
    for g in glyphs {
        out.extend(g.x.to_be_bytes());
        out.extend(g.y.to_be_bytes());
    }
    for g in glyphs {
        out.extend(g.glyph.to_be_bytes());
    }
}

fn encode_command(out: &mut Vec<u8>, c: &Command) -> Result<(), DviError> {
    let class = opcode::info(c.opcode).class;
    let start = out.len();
    out.push(c.opcode);
    match (&c.instr, class) {
        (Instruction::SetChar { code, advance: true }, OpClass::SetCharImmediate)
            if *code == c.opcode as u32 => {}
        (Instruction::SetChar { code, advance }, OpClass::Char { put, width })
            if *advance != put && fits_unsigned(*code, width) =>
        {
            push_be(out, *code, width)
        }
        (Instruction::SetRule { height, width, advance }, OpClass::Rule { put }) if *advance != put => {
            out.extend(height.to_be_bytes());
            out.extend(width.to_be_bytes());
        }
        (Instruction::Nop, OpClass::Nop)
        | (Instruction::Push, OpClass::Push)
        | (Instruction::Pop, OpClass::Pop) => {}
        (Instruction::Right(d), OpClass::Right(n)) | (Instruction::Down(d), OpClass::Down(n))
            if fits_signed(*d, n) =>
        {
            push_be(out, *d as u32, n)
        }
        (Instruction::W(d), OpClass::W(n))
        | (Instruction::X(d), OpClass::X(n))
        | (Instruction::Y(d), OpClass::Y(n))
        | (Instruction::Z(d), OpClass::Z(n)) => match (d, n) {
            (None, 0) => {}
            (Some(v), n) if n > 0 && fits_signed(*v, n) => push_be(out, *v as u32, n),
            _ => return Err(mismatch(c)),
        },
        (Instruction::FontSelect(k), OpClass::FontNum(n)) if *k == n as i32 => {}
        (Instruction::FontSelect(k), OpClass::Font(n)) if font_number_fits(*k, n) => {
            push_be(out, *k as u32, n)
        }
        (Instruction::Special(b), OpClass::Special(n)) if fits_unsigned(b.len() as u32, n) && b.len() <= u32::MAX as usize => {
            push_be(out, b.len() as u32, n);
            out.extend_from_slice(b);
        }
        (Instruction::FontDef(d), OpClass::FontDef(n)) if font_number_fits(d.k, n) => {
            if d.area.len() > 255 || d.name.len() > 255 {
                return Err(mismatch(c));
            }
            push_be(out, d.k as u32, n);
            out.extend(d.checksum.to_be_bytes());
            out.extend(d.scaled_size.to_be_bytes());
            out.extend(d.design_size.to_be_bytes());
            out.push(d.area.len() as u8);
            out.push(d.name.len() as u8);
            out.extend_from_slice(&d.area);
            out.extend_from_slice(&d.name);
        }
        (Instruction::NativeFontDef(d), OpClass::NativeFontDef) if d.font_file.len() <= 255 => {
            out.extend(d.k.to_be_bytes());
            out.extend(d.point_size.to_be_bytes());
            out.extend(d.flags.to_be_bytes());
            out.push(d.font_file.len() as u8);
            out.extend_from_slice(&d.font_file);
            out.extend(d.face_index.to_be_bytes());
            for v in [d.rgba, d.extend.map(|v| v as u32), d.slant.map(|v| v as u32), d.embolden.map(|v| v as u32)]
                .into_iter()
                .flatten()
            {
                out.extend(v.to_be_bytes());
            }
        }
        (Instruction::SetGlyphs { width, glyphs }, OpClass::SetGlyphs) if glyphs.len() <= u16::MAX as usize => {
            encode_glyphs(out, *width, glyphs)
        }
        (Instruction::SetTextAndGlyphs { text, width, glyphs }, OpClass::SetTextAndGlyphs)
            if glyphs.len() <= u16::MAX as usize && text.len() <= u16::MAX as usize =>
        {
            out.extend((text.len() as u16).to_be_bytes());
            for u in text {
                out.extend(u.to_be_bytes());
            }
            encode_glyphs(out, *width, glyphs)
        }
        _ => return Err(mismatch(c)),
    }
    debug_assert_eq!(out.len() - start, encoded_len(c));
    Ok(())
}

/// Encodes a program. Page back pointers and the postamble pointers are
/// recomputed from the actual layout; everything else is written as stored.
///
/// Programs that [`parse`](super::parse) would reject (undefined fonts,
/// XDV-only commands in a classic file, inconsistent postamble) are refused
/// with [`DviError::InvariantViolation`].
pub fn serialize(p: &DviProgram) -> Result<Vec<u8>, DviError> {
    check::check(p).map_err(|(_, _, v)| DviError::InvariantViolation(v.describe()))?;

    let mut out = Vec::new();
    out.push(opcode::PRE);
    out.push(p.pre.id);
    out.extend(p.pre.num.to_be_bytes());
    out.extend(p.pre.den.to_be_bytes());
    out.extend(p.pre.mag.to_be_bytes());
    out.push(p.pre.comment.len() as u8);
    out.extend_from_slice(&p.pre.comment);

    let pointer = |v: usize| -> Result<i32, DviError> {
        i32::try_from(v).map_err(|_| DviError::InvariantViolation("file exceeds 2 GiB".into()))
    };

    let mut last_bop: i32 = -1;
    for page in &p.pages {
        for c in &page.leading {
            encode_command(&mut out, c)?;
        }
        let bop = pointer(out.len())?;
        out.push(opcode::BOP);
        for c in page.counts {
            out.extend(c.to_be_bytes());
        }
        out.extend(last_bop.to_be_bytes());
        last_bop = bop;
        for c in &page.commands {
            encode_command(&mut out, c)?;
        }
        out.push(opcode::EOP);
    }
    for c in &p.trailing {
        encode_command(&mut out, c)?;
    }

    let post = pointer(out.len())?;
    out.push(opcode::POST);
    out.extend(last_bop.to_be_bytes());
    out.extend(p.post.num.to_be_bytes());
    out.extend(p.post.den.to_be_bytes());
    out.extend(p.post.mag.to_be_bytes());
    out.extend(p.post.max_height_depth.to_be_bytes());
    out.extend(p.post.max_width.to_be_bytes());
    out.extend(p.post.max_stack_depth.to_be_bytes());
    out.extend(p.post.page_count.to_be_bytes());
    for c in &p.post.font_defs {
        encode_command(&mut out, c)?;
    }
    out.push(opcode::POST_POST);
    out.extend(post.to_be_bytes());
    out.push(p.post.id);
    out.extend(std::iter::repeat_n(opcode::FILL, p.post.fill));
    Ok(out)
}

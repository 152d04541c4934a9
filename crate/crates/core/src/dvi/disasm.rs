//! dvitype-style listing: one `OFFSET: MNEMONIC operands` line per item.

use std::fmt::Write;

use super::*;

fn quote(bytes: &[u8]) -> String {
    let mut s = String::with_capacity(bytes.len() + 2);
    s.push('\'');
    for &b in bytes {
        match b {
            b'\'' => s.push_str("\\'"),
            b'\\' => s.push_str("\\\\"),
            0x20..=0x7e => s.push(b as char),
            _ => {
                let _ = write!(s, "\\x{b:02x}");
            }
        }
    }
    s.push('\'');
    s
}

fn char_operand(code: u32) -> String {
    match code {
        0x21..=0x7e if code != b'\'' as u32 && code != b'\\' as u32 => {
            format!("'{}'", code as u8 as char)
        }
        _ => code.to_string(),
    }
}

fn glyph_list(glyphs: &[GlyphPos]) -> String {
    glyphs
        .iter()
        .map(|g| format!("{}@{},{}", g.glyph, g.x, g.y))
        .collect::<Vec<_>>()
        .join(" ")
}

fn operands(c: &Command) -> String {
    match &c.instr {
        Instruction::SetChar { code, .. } => char_operand(*code),
        Instruction::SetRule { height, width, .. } => format!("height={height} width={width}"),
        Instruction::Right(d) | Instruction::Down(d) => d.to_string(),
        Instruction::W(d) | Instruction::X(d) | Instruction::Y(d) | Instruction::Z(d) => {
            d.map(|v| v.to_string()).unwrap_or_default()
        }
        Instruction::FontSelect(k) => {
            if matches!(c.class(), opcode::OpClass::FontNum(_)) {
                String::new()
            } else {
                k.to_string()
            }
        }
        Instruction::Special(b) => quote(b),
        Instruction::FontDef(d) => {
            let mut path = d.area.clone();
            path.extend_from_slice(&d.name);
            format!(
                "{} checksum={:#010x} scaled={} design={} {}",
                d.k,
                d.checksum,
                d.scaled_size,
                d.design_size,
                quote(&path)
            )
        }
        Instruction::NativeFontDef(d) => {
            let mut s = format!(
                "{} size={} flags={:#06x} {} index={}",
                d.k,
                d.point_size,
                d.flags,
                quote(&d.font_file),
                d.face_index
            );
            if let Some(v) = d.rgba {
                let _ = write!(s, " rgba={v:#010x}");
            }
            if let Some(v) = d.extend {
                let _ = write!(s, " extend={v}");
            }
            if let Some(v) = d.slant {
                let _ = write!(s, " slant={v}");
            }
            if let Some(v) = d.embolden {
                let _ = write!(s, " embolden={v}");
            }
            s
        }
        Instruction::SetGlyphs { width, glyphs } => {
            format!("width={width} n={} {}", glyphs.len(), glyph_list(glyphs))
        }
        Instruction::SetTextAndGlyphs { text, width, glyphs } => {
            let t = String::from_utf16_lossy(text);
            format!(
                "{} width={width} n={} {}",
                quote(t.as_bytes()),
                glyphs.len(),
                glyph_list(glyphs)
            )
        }
        Instruction::Push | Instruction::Pop | Instruction::Nop => String::new(),
    }
}

fn line(out: &mut String, offset: usize, mnemonic: &str, ops: &str) {
    let ops = ops.trim_end();
    if ops.is_empty() {
        let _ = writeln!(out, "{offset}: {mnemonic}");
    } else {
        let _ = writeln!(out, "{offset}: {mnemonic} {ops}");
    }
}

fn command_line(out: &mut String, c: &Command) {
    line(out, c.offset, c.mnemonic(), &operands(c));
}

/// Lists every item of `program` in file order using the offsets recorded by
/// the decoder. The trailing fill is reported as an operand of `post_post`.
pub fn disassemble(program: &DviProgram) -> String {
    let mut out = String::new();
    let pre = &program.pre;
    line(
        &mut out,
        0,
        "pre",
        &format!(
            "id={} num={} den={} mag={} {}",
            pre.id,
            pre.num,
            pre.den,
            pre.mag,
            quote(&pre.comment)
        ),
    );
    for page in &program.pages {
        for c in &page.leading {
            command_line(&mut out, c);
        }
        let counts: Vec<String> = page.counts.iter().map(|c| c.to_string()).collect();
        line(
            &mut out,
            page.bop_offset,
            "bop",
            &format!("[{}] prev={}", counts.join(" "), page.prev_bop),
        );
        for c in &page.commands {
            command_line(&mut out, c);
        }
        line(&mut out, page.eop_offset, "eop", "");
    }
    for c in &program.trailing {
        command_line(&mut out, c);
    }
    let post = &program.post;
    line(
        &mut out,
        post.offset,
        "post",
        &format!(
            "prev={} num={} den={} mag={} maxv={} maxh={} maxstack={} pages={}",
            post.last_bop,
            post.num,
            post.den,
            post.mag,
            post.max_height_depth,
            post.max_width,
            post.max_stack_depth,
            post.page_count
        ),
    );
    for c in &post.font_defs {
        command_line(&mut out, c);
    }
    line(
        &mut out,
        post.post_post_offset,
        "post_post",
        &format!("q={} id={} fill={}", post.offset, post.id, post.fill),
    );
    out
}

/// Mnemonic column of a listing produced by [`disassemble`].
pub fn mnemonics(listing: &str) -> Vec<&str> {
    listing
        .lines()
        .filter_map(|l| l.split_once(": ").map(|(_, rest)| rest))
        .map(|rest| rest.split(' ').next().unwrap_or(rest))
        .collect()
}

use super::opcode::{self, OpClass};
use super::*;

struct Reader<'a> {
    data: &'a [u8],
    pos: usize,
    /// Start of the item being decoded; reported on truncation.
    item: usize,
}

impl<'a> Reader<'a> {
    fn new(data: &'a [u8]) -> Self {
        Reader { data, pos: 0, item: 0 }
    }

    fn remaining(&self) -> usize {
        self.data.len() - self.pos
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8], DviError> {
        if self.remaining() < n {
            return Err(DviError::Truncated(self.item));
        }
        let s = &self.data[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn peek(&self) -> Result<u8, DviError> {
        self.data
            .get(self.pos)
            .copied()
            .ok_or(DviError::Truncated(self.pos))
    }

    fn u8(&mut self) -> Result<u8, DviError> {
        Ok(self.take(1)?[0])
    }

    fn unsigned(&mut self, n: usize) -> Result<u32, DviError> {
        Ok(self.take(n)?.iter().fold(0u32, |acc, &b| (acc << 8) | b as u32))
    }

    /// Big-endian two's-complement of 1..=4 bytes, sign-extended.
    fn signed(&mut self, n: usize) -> Result<i32, DviError> {
        let raw = self.unsigned(n)?;
        let shift = 32 - 8 * n as u32;
        Ok(((raw << shift) as i32) >> shift)
    }

    fn u16(&mut self) -> Result<u16, DviError> {
        Ok(self.unsigned(2)? as u16)
    }

    fn u32(&mut self) -> Result<u32, DviError> {
        self.unsigned(4)
    }

    fn i32(&mut self) -> Result<i32, DviError> {
        self.signed(4)
    }

    fn bytes(&mut self, n: usize) -> Result<Vec<u8>, DviError> {
        Ok(self.take(n)?.to_vec())
    }
}

fn glyph_array(r: &mut Reader<'_>) -> Result<(i32, Vec<GlyphPos>), DviError> {
    let width = r.i32()?;
    let n = r.u16()? as usize;
    if r.remaining() < n * 10 {
        return Err(DviError::Truncated(r.item));
    }
    let mut pos = Vec::with_capacity(n);
    for _ in 0..n {
        let x = r.i32()?;
        let y = r.i32()?;
        pos.push((x, y));
    }
    let mut glyphs = Vec::with_capacity(n);
    for (x, y) in pos {
        glyphs.push(GlyphPos { glyph: r.u16()?, x, y });
    }
    Ok((width, glyphs))
}

/// Decodes one non-structural command at the reader position.
fn command(r: &mut Reader<'_>, flavor: DviFlavor) -> Result<Command, DviError> {
    let offset = r.pos;
    r.item = offset;
    let byte = r.u8()?;
    let info = opcode::info(byte);
    if info.class.is_xdv_only() && flavor == DviFlavor::ClassicDvi {
        return Err(DviError::UnknownOpcode { offset, byte });
    }
    let instr = match info.class {
        OpClass::SetCharImmediate => Instruction::SetChar {
            code: byte as u32,
            advance: true,
        },
        OpClass::Char { put, width } => Instruction::SetChar {
            code: r.unsigned(width as usize)?,
            advance: !put,
        },
        OpClass::Rule { put } => Instruction::SetRule {
            height: r.i32()?,
            width: r.i32()?,
            advance: !put,
        },
        OpClass::Nop => Instruction::Nop,
        OpClass::Push => Instruction::Push,
        OpClass::Pop => Instruction::Pop,
        OpClass::Right(n) => Instruction::Right(r.signed(n as usize)?),
        OpClass::Down(n) => Instruction::Down(r.signed(n as usize)?),
        OpClass::W(n) => Instruction::W(reg(r, n)?),
        OpClass::X(n) => Instruction::X(reg(r, n)?),
        OpClass::Y(n) => Instruction::Y(reg(r, n)?),
        OpClass::Z(n) => Instruction::Z(reg(r, n)?),
        OpClass::FontNum(k) => Instruction::FontSelect(k as i32),
        OpClass::Font(n) => Instruction::FontSelect(font_number(r, n)?),
        OpClass::Special(n) => {
            let len = r.unsigned(n as usize)? as usize;
            Instruction::Special(r.bytes(len)?)
        }
        OpClass::FontDef(n) => {
            let k = font_number(r, n)?;
            let checksum = r.u32()?;
            let scaled_size = r.u32()?;
            let design_size = r.u32()?;
            let a = r.u8()? as usize;
            let l = r.u8()? as usize;
            let area = r.bytes(a)?;
            let name = r.bytes(l)?;
            Instruction::FontDef(FontDef {
                k,
                checksum,
                scaled_size,
                design_size,
                area,
                name,
            })
        }
        OpClass::NativeFontDef => {
            let k = r.i32()?;
            let point_size = r.i32()?;
            let flags = r.u16()?;
            let len = r.u8()? as usize;
            let font_file = r.bytes(len)?;
            let face_index = r.u32()?;
            let opt = |r: &mut Reader<'_>, bit: u16| -> Result<Option<u32>, DviError> {
                if flags & bit != 0 {
                    r.u32().map(Some)
                } else {
                    Ok(None)
                }
            };
            let rgba = opt(r, NATIVE_FLAG_COLORED)?;
            let extend = opt(r, NATIVE_FLAG_EXTEND)?.map(|v| v as i32);
            let slant = opt(r, NATIVE_FLAG_SLANT)?.map(|v| v as i32);
            let embolden = opt(r, NATIVE_FLAG_EMBOLDEN)?.map(|v| v as i32);
            Instruction::NativeFontDef(NativeFontDef {
                k,
                point_size,
                flags,
                font_file,
                face_index,
                rgba,
                extend,
                slant,
                embolden,
            })
        }
        OpClass::SetGlyphs => {
            let (width, glyphs) = glyph_array(r)?;
            Instruction::SetGlyphs { width, glyphs }
        }
        OpClass::SetTextAndGlyphs => {
            let n = r.u16()? as usize;
            let raw = r.take(2 * n)?;
            let text = raw
                .chunks_exact(2)
                .map(|c| u16::from_be_bytes([c[0], c[1]]))
                .collect();
            let (width, glyphs) = glyph_array(r)?;
            Instruction::SetTextAndGlyphs {
                text,
                width,
                glyphs,
            }
        }
        OpClass::Undefined => return Err(DviError::UnknownOpcode { offset, byte }),
        OpClass::Bop | OpClass::Eop | OpClass::Pre | OpClass::Post | OpClass::PostPost => {
            return Err(DviError::UnexpectedOpcode {
                offset,
                byte,
                mnemonic: info.mnemonic,
            })
        }
    };
    Ok(Command {
        offset,
        opcode: byte,
        instr,
    })
}

fn reg(r: &mut Reader<'_>, n: u8) -> Result<Option<i32>, DviError> {
    if n == 0 {
        Ok(None)
    } else {
        r.signed(n as usize).map(Some)
    }
}

/// Font numbers are unsigned for 1..3 byte forms and signed for 4 bytes.
fn font_number(r: &mut Reader<'_>, n: u8) -> Result<i32, DviError> {
    if n == 4 {
        r.i32()
    } else {
        Ok(r.unsigned(n as usize)? as i32)
    }
}

fn expect_pointer(offset: usize, what: &'static str, found: i32, expected: i64) -> Result<(), DviError> {
    if found as i64 != expected {
        return Err(DviError::PointerMismatch {
            offset,
            what,
            found: found as i64,
            expected,
        });
    }
    Ok(())
}

/// Decodes a complete DVI or XDV file.
///
/// Every byte of the input must belong to exactly one decoded item; the
/// postamble and page back pointers are verified, as are font definitions
/// and the trailing fill.
pub fn parse(bytes: &[u8]) -> Result<DviProgram, DviError> {
    let mut r = Reader::new(bytes);
    if bytes.is_empty() {
        return Err(DviError::Truncated(0));
    }
    if bytes[0] != opcode::PRE {
        return Err(DviError::BadMagic(format!(
            "first byte is {}, expected {}",
            bytes[0],
            opcode::PRE
        )));
    }
    r.u8()?;
    let id = r.u8()?;
    let flavor = DviFlavor::from_id(id)
        .ok_or_else(|| DviError::BadMagic(format!("unsupported format id {id}")))?;
    let num = r.u32()?;
    let den = r.u32()?;
    let mag = r.u32()?;
    if num == 0 || den == 0 || mag == 0 {
        return Err(DviError::BadMagic("zero num, den or mag in preamble".into()));
    }
    let k = r.u8()? as usize;
    let comment = r.bytes(k)?;
    let pre = Preamble {
        id,
        num,
        den,
        mag,
        comment,
    };

    let mut pages = Vec::new();
    let mut pending = Vec::new();
    let mut last_bop: i64 = -1;
    loop {
        let offset = r.pos;
        r.item = offset;
        match r.peek()? {
            opcode::BOP => {
                r.u8()?;
                let mut counts = [0i32; 10];
                for c in counts.iter_mut() {
                    *c = r.i32()?;
                }
                let prev_bop = r.i32()?;
                expect_pointer(offset, "bop back pointer", prev_bop, last_bop)?;
                last_bop = offset as i64;
                let mut commands = Vec::new();
                let eop_offset = loop {
                    let at = r.pos;
                    r.item = at;
                    if r.peek()? == opcode::EOP {
                        r.u8()?;
                        break at;
                    }
                    commands.push(command(&mut r, flavor)?);
                };
                pages.push(Page {
                    leading: std::mem::take(&mut pending),
                    bop_offset: offset,
                    counts,
                    prev_bop,
                    commands,
                    eop_offset,
                });
            }
            opcode::POST => break,
            _ => {
                let cmd = command(&mut r, flavor)?;
                pending.push(cmd);
            }
        }
    }

    let post_offset = r.pos;
    r.item = post_offset;
    r.u8()?;
    let post_last_bop = r.i32()?;
    expect_pointer(post_offset, "postamble final bop pointer", post_last_bop, last_bop)?;
    let p_num = r.u32()?;
    let p_den = r.u32()?;
    let p_mag = r.u32()?;
    let max_height_depth = r.u32()?;
    let max_width = r.u32()?;
    let max_stack_depth = r.u16()?;
    let page_count = r.u16()?;

    let mut font_defs = Vec::new();
    let post_post_offset = loop {
        let at = r.pos;
        r.item = at;
        if r.peek()? == opcode::POST_POST {
            break at;
        }
        font_defs.push(command(&mut r, flavor)?);
    };
    r.u8()?;
    let q = r.i32()?;
    expect_pointer(post_post_offset, "post_post pointer", q, post_offset as i64)?;
    let post_id = r.u8()?;
    let fill_start = r.pos;
    let fill = r.remaining();
    if let Some(i) = bytes[fill_start..].iter().position(|&b| b != opcode::FILL) {
        return Err(DviError::BadTrailer {
            offset: fill_start + i,
            reason: format!("byte {} in trailing fill", bytes[fill_start + i]),
        });
    }

    let program = DviProgram {
        flavor,
        pre,
        pages,
        trailing: pending,
        post: Postamble {
            offset: post_offset,
            last_bop: post_last_bop,
            num: p_num,
            den: p_den,
            mag: p_mag,
            max_height_depth,
            max_width,
            max_stack_depth,
            page_count,
            font_defs,
            post_post_offset,
            id: post_id,
            fill,
        },
    };
    check::check(&program).map_err(|(offset, byte, v)| v.into_error(offset, byte))?;
    Ok(program)
}

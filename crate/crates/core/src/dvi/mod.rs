//! DVI and XDV bytecode: typed program model, decoder, encoder, disassembler.
//!
//! A [`DviProgram`] keeps enough of the original encoding (the opcode of each
//! command and the trailing fill length) that [`serialize`] reproduces the
//! input of [`parse`] byte for byte.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

mod check;
mod disasm;
pub mod opcode;
mod parse;
mod write;

pub use disasm::{disassemble, mnemonics};
pub use parse::parse;
pub use write::{encoded_len, serialize};

use opcode::OpClass;

/// Standard TeX unit constants: numerator and denominator give 10^-7 m per
/// DVI unit when one DVI unit is one scaled point.
pub const STANDARD_NUM: u32 = 25_400_000;
pub const STANDARD_DEN: u32 = 473_628_672;
pub const STANDARD_MAG: u32 = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DviFlavor {
    /// TeX's DVI, preamble id 2.
    ClassicDvi,
    /// XeTeX's extended DVI, preamble id 5, 6 or 7.
    Xdv,
}

impl DviFlavor {
    pub fn from_id(id: u8) -> Option<DviFlavor> {
        match id {
            2 => Some(DviFlavor::ClassicDvi),
            5..=7 => Some(DviFlavor::Xdv),
            _ => None,
        }
    }

    /// Id written by current engines.
    pub fn current_id(self) -> u8 {
        match self {
            DviFlavor::ClassicDvi => 2,
            DviFlavor::Xdv => 7,
        }
    }

    pub fn accepts_id(self, id: u8) -> bool {
        DviFlavor::from_id(id) == Some(self)
    }

    pub fn extension(self) -> &'static str {
        match self {
            DviFlavor::ClassicDvi => "dvi",
            DviFlavor::Xdv => "xdv",
        }
    }

    pub(crate) fn tag(self) -> &'static str {
        match self {
            DviFlavor::ClassicDvi => "dvi",
            DviFlavor::Xdv => "xdv",
        }
    }
}

impl fmt::Display for DviFlavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DviFlavor::ClassicDvi => "ClassicDVI",
            DviFlavor::Xdv => "XDV",
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DviError {
    #[error("not a DVI/XDV file: {0}")]
    BadMagic(String),
    #[error("truncated at offset {0}")]
    Truncated(usize),
    #[error("unknown opcode {byte} at offset {offset}")]
    UnknownOpcode { offset: usize, byte: u8 },
    #[error("unexpected {mnemonic} at offset {offset}")]
    UnexpectedOpcode {
        offset: usize,
        byte: u8,
        mnemonic: &'static str,
    },
    #[error("pointer mismatch at offset {offset}: {what} is {found}, expected {expected}")]
    PointerMismatch {
        offset: usize,
        what: &'static str,
        found: i64,
        expected: i64,
    },
    #[error("undefined font {k} selected at offset {offset}")]
    UndefinedFont { offset: usize, k: i32 },
    #[error("bad font definition at offset {offset}: {reason}")]
    BadFontDef { offset: usize, reason: String },
    #[error("inconsistent postamble at offset {offset}: {reason}")]
    InconsistentPostamble { offset: usize, reason: String },
    #[error("bad trailer at offset {offset}: {reason}")]
    BadTrailer { offset: usize, reason: String },
    #[error("invariant violation: {0}")]
    InvariantViolation(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Preamble {
    pub id: u8,
    pub num: u32,
    pub den: u32,
    pub mag: u32,
    pub comment: Vec<u8>,
}

impl Preamble {
    pub fn standard(flavor: DviFlavor, comment: &[u8]) -> Self {
        Preamble {
            id: flavor.current_id(),
            num: STANDARD_NUM,
            den: STANDARD_DEN,
            mag: STANDARD_MAG,
            comment: comment.to_vec(),
        }
    }
}

/// A TFM font definition (`fnt_def1`..`fnt_def4`).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FontDef {
    pub k: i32,
    pub checksum: u32,
    pub scaled_size: u32,
    pub design_size: u32,
    pub area: Vec<u8>,
    pub name: Vec<u8>,
}

impl FontDef {
    pub fn name_str(&self) -> String {
        String::from_utf8_lossy(&self.name).into_owned()
    }

    pub fn area_str(&self) -> String {
        String::from_utf8_lossy(&self.area).into_owned()
    }
}

pub const NATIVE_FLAG_VERTICAL: u16 = 0x0100;
pub const NATIVE_FLAG_COLORED: u16 = 0x0200;
pub const NATIVE_FLAG_EXTEND: u16 = 0x1000;
pub const NATIVE_FLAG_SLANT: u16 = 0x2000;
pub const NATIVE_FLAG_EMBOLDEN: u16 = 0x4000;

/// An XDV native (OpenType/TrueType) font definition.
///
/// The optional fields are present exactly when the matching flag bit is set.
/// `extend`, `slant` and `embolden` are 16.16 fixed-point.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NativeFontDef {
    pub k: i32,
    pub point_size: i32,
    pub flags: u16,
    pub font_file: Vec<u8>,
    pub face_index: u32,
    pub rgba: Option<u32>,
    pub extend: Option<i32>,
    pub slant: Option<i32>,
    pub embolden: Option<i32>,
}

impl NativeFontDef {
    pub fn new(k: i32, point_size: i32, font_file: impl Into<Vec<u8>>) -> Self {
        NativeFontDef {
            k,
            point_size,
            flags: 0,
            font_file: font_file.into(),
            face_index: 0,
            rgba: None,
            extend: None,
            slant: None,
            embolden: None,
        }
    }

    pub fn font_file_str(&self) -> String {
        String::from_utf8_lossy(&self.font_file).into_owned()
    }

    /// Extend factor as a plain ratio (1.0 when absent).
    pub fn extend_factor(&self) -> f64 {
        self.extend.map_or(1.0, |e| e as f64 / 65536.0)
    }

    pub fn slant_factor(&self) -> f64 {
        self.slant.map_or(0.0, |s| s as f64 / 65536.0)
    }

    pub fn is_vertical(&self) -> bool {
        self.flags & NATIVE_FLAG_VERTICAL != 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FontDefinition {
    Tfm(FontDef),
    Native(NativeFontDef),
}

impl FontDefinition {
    pub fn k(&self) -> i32 {
        match self {
            FontDefinition::Tfm(d) => d.k,
            FontDefinition::Native(d) => d.k,
        }
    }

    /// File or font name as written in the definition.
    pub fn display_name(&self) -> String {
        match self {
            FontDefinition::Tfm(d) => d.name_str(),
            FontDefinition::Native(d) => d.font_file_str(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GlyphPos {
    pub glyph: u16,
    pub x: i32,
    pub y: i32,
}

/// One decoded command. Page boundaries, preamble and postamble are modelled
/// structurally by [`DviProgram`] rather than as instructions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Instruction {
    /// `set_char_*`/`set*` when `advance`, `put*` otherwise.
    SetChar { code: u32, advance: bool },
    SetRule { height: i32, width: i32, advance: bool },
    Right(i32),
    W(Option<i32>),
    X(Option<i32>),
    Down(i32),
    Y(Option<i32>),
    Z(Option<i32>),
    Push,
    Pop,
    FontSelect(i32),
    FontDef(FontDef),
    Special(Vec<u8>),
    NativeFontDef(NativeFontDef),
    SetGlyphs { width: i32, glyphs: Vec<GlyphPos> },
    /// `text` is UTF-16 code units.
    SetTextAndGlyphs { text: Vec<u16>, width: i32, glyphs: Vec<GlyphPos> },
    Nop,
}

fn signed_width(d: i32) -> u8 {
    match d {
        -0x80..=0x7f => 1,
        -0x8000..=0x7fff => 2,
        -0x80_0000..=0x7f_ffff => 3,
        _ => 4,
    }
}

fn unsigned_width(v: u32) -> u8 {
    match v {
        0..=0xff => 1,
        0x100..=0xffff => 2,
        0x1_0000..=0xff_ffff => 3,
        _ => 4,
    }
}

impl Instruction {
    /// The shortest opcode that encodes this instruction.
    pub fn preferred_opcode(&self) -> u8 {
        use opcode::*;
        match self {
            Instruction::SetChar { code, advance: true } if *code < 128 => *code as u8,
            Instruction::SetChar { code, advance } => {
                let base = if *advance { SET1 } else { PUT1 };
                base + unsigned_width(*code) - 1
            }
            Instruction::SetRule { advance: true, .. } => SET_RULE,
            Instruction::SetRule { advance: false, .. } => PUT_RULE,
            Instruction::Right(d) => RIGHT1 + signed_width(*d) - 1,
            Instruction::Down(d) => DOWN1 + signed_width(*d) - 1,
            Instruction::W(d) => W0 + d.map_or(0, signed_width),
            Instruction::X(d) => X0 + d.map_or(0, signed_width),
            Instruction::Y(d) => Y0 + d.map_or(0, signed_width),
            Instruction::Z(d) => Z0 + d.map_or(0, signed_width),
            Instruction::Push => PUSH,
            Instruction::Pop => POP,
            Instruction::FontSelect(k) if (0..64).contains(k) => FNT_NUM_0 + *k as u8,
            Instruction::FontSelect(k) if *k < 0 => FNT1 + 3,
            Instruction::FontSelect(k) => FNT1 + unsigned_width(*k as u32) - 1,
            Instruction::FontDef(d) if d.k < 0 => FNT_DEF1 + 3,
            Instruction::FontDef(d) => FNT_DEF1 + unsigned_width(d.k as u32) - 1,
            Instruction::Special(b) => XXX1 + unsigned_width(b.len() as u32) - 1,
            Instruction::NativeFontDef(_) => NATIVE_FONT_DEF,
            Instruction::SetGlyphs { .. } => SET_GLYPHS,
            Instruction::SetTextAndGlyphs { .. } => SET_TEXT_AND_GLYPHS,
            Instruction::Nop => NOP,
        }
    }

    pub fn is_xdv_only(&self) -> bool {
        matches!(
            self,
            Instruction::NativeFontDef(_)
                | Instruction::SetGlyphs { .. }
                | Instruction::SetTextAndGlyphs { .. }
        )
    }

    pub fn font_definition(&self) -> Option<FontDefinition> {
        match self {
            Instruction::FontDef(d) => Some(FontDefinition::Tfm(d.clone())),
            Instruction::NativeFontDef(d) => Some(FontDefinition::Native(d.clone())),
            _ => None,
        }
    }
}

/// An instruction together with the opcode it was (or will be) encoded with.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Command {
    /// Byte offset in the source file; zero for constructed commands.
    pub offset: usize,
    pub opcode: u8,
    pub instr: Instruction,
}

impl Command {
    pub fn new(instr: Instruction) -> Self {
        Command {
            offset: 0,
            opcode: instr.preferred_opcode(),
            instr,
        }
    }

    pub fn mnemonic(&self) -> &'static str {
        opcode::info(self.opcode).mnemonic
    }

    pub fn class(&self) -> OpClass {
        opcode::info(self.opcode).class
    }
}

impl From<Instruction> for Command {
    fn from(instr: Instruction) -> Self {
        Command::new(instr)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Page {
    /// `nop`/font definitions/specials between the previous page (or the
    /// preamble) and this page's `bop`.
    pub leading: Vec<Command>,
    pub bop_offset: usize,
    pub counts: [i32; 10],
    /// Back pointer as stored in the `bop`.
    pub prev_bop: i32,
    pub commands: Vec<Command>,
    pub eop_offset: usize,
}

impl Page {
    pub fn new(counts: [i32; 10], commands: Vec<Command>) -> Self {
        Page {
            leading: Vec::new(),
            bop_offset: 0,
            counts,
            prev_bop: -1,
            commands,
            eop_offset: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Postamble {
    pub offset: usize,
    pub last_bop: i32,
    pub num: u32,
    pub den: u32,
    pub mag: u32,
    pub max_height_depth: u32,
    pub max_width: u32,
    pub max_stack_depth: u16,
    pub page_count: u16,
    pub font_defs: Vec<Command>,
    pub post_post_offset: usize,
    /// The id byte after the `post_post` pointer.
    pub id: u8,
    /// Number of trailing 223 bytes.
    pub fill: usize,
}

/// A fully decoded DVI or XDV file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DviProgram {
    pub flavor: DviFlavor,
    pub pre: Preamble,
    pub pages: Vec<Page>,
    /// Commands between the last `eop` and `post`.
    pub trailing: Vec<Command>,
    pub post: Postamble,
}

/// Location and length of one encoded item, in file order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Span {
    pub offset: usize,
    pub len: usize,
    pub opcode: u8,
}

impl DviProgram {
    /// Builds a program from page bodies, filling in the preamble, page back
    /// pointers and postamble (page count, stack depth, font definitions).
    pub fn build(flavor: DviFlavor, pages: Vec<Vec<Instruction>>) -> DviProgram {
        let mut fonts: BTreeMap<i32, Command> = BTreeMap::new();
        let mut max_depth = 0u16;
        let pages: Vec<Page> = pages
            .into_iter()
            .enumerate()
            .map(|(i, body)| {
                let mut depth = 0i32;
                let commands: Vec<Command> = body
                    .into_iter()
                    .map(|instr| {
                        match &instr {
                            Instruction::Push => {
                                depth += 1;
                                max_depth = max_depth.max(depth.clamp(0, u16::MAX as i32) as u16);
                            }
                            Instruction::Pop => depth -= 1,
                            _ => {}
                        }
                        let cmd = Command::new(instr);
                        if let Some(def) = cmd.instr.font_definition() {
                            fonts.entry(def.k()).or_insert_with(|| cmd.clone());
                        }
                        cmd
                    })
                    .collect();
                let mut counts = [0; 10];
                counts[0] = i as i32 + 1;
                Page::new(counts, commands)
            })
            .collect();
        let page_count = pages.len().min(u16::MAX as usize) as u16;
        DviProgram {
            flavor,
            pre: Preamble::standard(flavor, b" texglyph"),
            pages,
            trailing: Vec::new(),
            post: Postamble {
                offset: 0,
                last_bop: -1,
                num: STANDARD_NUM,
                den: STANDARD_DEN,
                mag: STANDARD_MAG,
                max_height_depth: 0,
                max_width: 0,
                max_stack_depth: max_depth,
                page_count,
                font_defs: fonts.into_values().collect(),
                post_post_offset: 0,
                id: flavor.current_id(),
                fill: 4,
            },
        }
    }

    pub fn page_count(&self) -> usize {
        self.pages.len()
    }

    /// Every font definition, keyed by font number (first definition wins).
    pub fn font_defs(&self) -> BTreeMap<i32, FontDefinition> {
        let mut map = BTreeMap::new();
        for cmd in self.all_commands() {
            if let Some(def) = cmd.instr.font_definition() {
                map.entry(def.k()).or_insert(def);
            }
        }
        map
    }

    pub fn font(&self, k: i32) -> Option<FontDefinition> {
        self.all_commands()
            .filter_map(|c| c.instr.font_definition())
            .find(|d| d.k() == k)
    }

    fn all_commands(&self) -> impl Iterator<Item = &Command> {
        self.pages
            .iter()
            .flat_map(|p| p.leading.iter().chain(p.commands.iter()))
            .chain(self.trailing.iter())
            .chain(self.post.font_defs.iter())
    }

    /// Spans of every decoded item using the offsets recorded by the parser,
    /// in file order: preamble, commands, `bop`/`eop`, postamble, fill.
    pub fn spans(&self) -> Vec<Span> {
        let mut out = Vec::new();
        out.push(Span {
            offset: 0,
            len: 15 + self.pre.comment.len(),
            opcode: opcode::PRE,
        });
        let cmd_span = |c: &Command| Span {
            offset: c.offset,
            len: encoded_len(c),
            opcode: c.opcode,
        };
        for page in &self.pages {
            out.extend(page.leading.iter().map(cmd_span));
            out.push(Span {
                offset: page.bop_offset,
                len: 45,
                opcode: opcode::BOP,
            });
            out.extend(page.commands.iter().map(cmd_span));
            out.push(Span {
                offset: page.eop_offset,
                len: 1,
                opcode: opcode::EOP,
            });
        }
        out.extend(self.trailing.iter().map(cmd_span));
        out.push(Span {
            offset: self.post.offset,
            len: 29,
            opcode: opcode::POST,
        });
        out.extend(self.post.font_defs.iter().map(cmd_span));
        out.push(Span {
            offset: self.post.post_post_offset,
            len: 6 + self.post.fill,
            opcode: opcode::POST_POST,
        });
        out
    }

    /// Total bytes accounted for by [`spans`](Self::spans), provided the spans
    /// tile the file without gaps or overlaps; `None` otherwise.
    pub fn byte_coverage(&self) -> Option<usize> {
        let mut next = 0usize;
        for s in self.spans() {
            if s.offset != next {
                return None;
            }
            next = s.offset + s.len;
        }
        Some(next)
    }
}

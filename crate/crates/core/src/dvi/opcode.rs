//! The 256-entry opcode table shared by the decoder, encoder and disassembler.

/// What an opcode byte does, with the width of its variable-size operand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OpClass {
    /// `set_char_0` .. `set_char_127`: the opcode is the character code.
    SetCharImmediate,
    /// `set1`..`set4` (`put == false`) or `put1`..`put4`.
    Char { put: bool, width: u8 },
    Rule { put: bool },
    Nop,
    Bop,
    Eop,
    Push,
    Pop,
    Right(u8),
    /// `w0`..`w4`; width 0 reuses the register.
    W(u8),
    X(u8),
    Down(u8),
    Y(u8),
    Z(u8),
    /// `fnt_num_0`..`fnt_num_63`.
    FontNum(u8),
    Font(u8),
    Special(u8),
    FontDef(u8),
    Pre,
    Post,
    PostPost,
    NativeFontDef,
    SetGlyphs,
    SetTextAndGlyphs,
    Undefined,
}

impl OpClass {
    /// Opcodes that only exist in XeTeX's extended format.
    pub fn is_xdv_only(self) -> bool {
        matches!(
            self,
            OpClass::NativeFontDef | OpClass::SetGlyphs | OpClass::SetTextAndGlyphs
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OpInfo {
    pub code: u8,
    pub mnemonic: &'static str,
    pub class: OpClass,
    /// Bytes of fixed operands following the opcode, excluding any
    /// variable-length payload (special text, font names, glyph arrays).
    pub fixed_len: usize,
}

pub const SET_CHAR_0: u8 = 0;
pub const SET1: u8 = 128;
pub const SET_RULE: u8 = 132;
pub const PUT1: u8 = 133;
pub const PUT_RULE: u8 = 137;
pub const NOP: u8 = 138;
pub const BOP: u8 = 139;
pub const EOP: u8 = 140;
pub const PUSH: u8 = 141;
pub const POP: u8 = 142;
pub const RIGHT1: u8 = 143;
pub const W0: u8 = 147;
pub const X0: u8 = 152;
pub const DOWN1: u8 = 157;
pub const Y0: u8 = 161;
pub const Z0: u8 = 166;
pub const FNT_NUM_0: u8 = 171;
pub const FNT1: u8 = 235;
pub const XXX1: u8 = 239;
pub const FNT_DEF1: u8 = 243;
pub const PRE: u8 = 247;
pub const POST: u8 = 248;
pub const POST_POST: u8 = 249;
pub const NATIVE_FONT_DEF: u8 = 252;
pub const SET_GLYPHS: u8 = 253;
pub const SET_TEXT_AND_GLYPHS: u8 = 254;

/// Trailing fill byte after `post_post`.
pub const FILL: u8 = 223;

const FNT_NUM: [&str; 64] = [
    "fnt_num_0", "fnt_num_1", "fnt_num_2", "fnt_num_3", "fnt_num_4", "fnt_num_5",
    "fnt_num_6", "fnt_num_7", "fnt_num_8", "fnt_num_9", "fnt_num_10", "fnt_num_11",
    "fnt_num_12", "fnt_num_13", "fnt_num_14", "fnt_num_15", "fnt_num_16", "fnt_num_17",
    "fnt_num_18", "fnt_num_19", "fnt_num_20", "fnt_num_21", "fnt_num_22", "fnt_num_23",
    "fnt_num_24", "fnt_num_25", "fnt_num_26", "fnt_num_27", "fnt_num_28", "fnt_num_29",
    "fnt_num_30", "fnt_num_31", "fnt_num_32", "fnt_num_33", "fnt_num_34", "fnt_num_35",
    "fnt_num_36", "fnt_num_37", "fnt_num_38", "fnt_num_39", "fnt_num_40", "fnt_num_41",
    "fnt_num_42", "fnt_num_43", "fnt_num_44", "fnt_num_45", "fnt_num_46", "fnt_num_47",
    "fnt_num_48", "fnt_num_49", "fnt_num_50", "fnt_num_51", "fnt_num_52", "fnt_num_53",
    "fnt_num_54", "fnt_num_55", "fnt_num_56", "fnt_num_57", "fnt_num_58", "fnt_num_59",
    "fnt_num_60", "fnt_num_61", "fnt_num_62", "fnt_num_63"
];

const fn entry(code: u8) -> OpInfo {
    let (mnemonic, class, fixed_len): (&'static str, OpClass, usize) = match code {
        0..=127 => ("set_char", OpClass::SetCharImmediate, 0),
        128 => ("set1", OpClass::Char { put: false, width: 1 }, 1),
        129 => ("set2", OpClass::Char { put: false, width: 2 }, 2),
        130 => ("set3", OpClass::Char { put: false, width: 3 }, 3),
        131 => ("set4", OpClass::Char { put: false, width: 4 }, 4),
        132 => ("set_rule", OpClass::Rule { put: false }, 8),
        133 => ("put1", OpClass::Char { put: true, width: 1 }, 1),
        134 => ("put2", OpClass::Char { put: true, width: 2 }, 2),
        135 => ("put3", OpClass::Char { put: true, width: 3 }, 3),
        136 => ("put4", OpClass::Char { put: true, width: 4 }, 4),
        137 => ("put_rule", OpClass::Rule { put: true }, 8),
        138 => ("nop", OpClass::Nop, 0),
        139 => ("bop", OpClass::Bop, 44),
        140 => ("eop", OpClass::Eop, 0),
        141 => ("push", OpClass::Push, 0),
        142 => ("pop", OpClass::Pop, 0),
        143 => ("right1", OpClass::Right(1), 1),
        144 => ("right2", OpClass::Right(2), 2),
        145 => ("right3", OpClass::Right(3), 3),
        146 => ("right4", OpClass::Right(4), 4),
        147 => ("w0", OpClass::W(0), 0),
        148 => ("w1", OpClass::W(1), 1),
        149 => ("w2", OpClass::W(2), 2),
        150 => ("w3", OpClass::W(3), 3),
        151 => ("w4", OpClass::W(4), 4),
        152 => ("x0", OpClass::X(0), 0),
        153 => ("x1", OpClass::X(1), 1),
        154 => ("x2", OpClass::X(2), 2),
        155 => ("x3", OpClass::X(3), 3),
        156 => ("x4", OpClass::X(4), 4),
        157 => ("down1", OpClass::Down(1), 1),
        158 => ("down2", OpClass::Down(2), 2),
        159 => ("down3", OpClass::Down(3), 3),
        160 => ("down4", OpClass::Down(4), 4),
        161 => ("y0", OpClass::Y(0), 0),
        162 => ("y1", OpClass::Y(1), 1),
        163 => ("y2", OpClass::Y(2), 2),
        164 => ("y3", OpClass::Y(3), 3),
        165 => ("y4", OpClass::Y(4), 4),
        166 => ("z0", OpClass::Z(0), 0),
        167 => ("z1", OpClass::Z(1), 1),
        168 => ("z2", OpClass::Z(2), 2),
        169 => ("z3", OpClass::Z(3), 3),
        170 => ("z4", OpClass::Z(4), 4),
        171..=234 => (FNT_NUM[(code - 171) as usize], OpClass::FontNum(code - 171), 0),
        235 => ("fnt1", OpClass::Font(1), 1),
        236 => ("fnt2", OpClass::Font(2), 2),
        237 => ("fnt3", OpClass::Font(3), 3),
        238 => ("fnt4", OpClass::Font(4), 4),
        239 => ("xxx1", OpClass::Special(1), 1),
        240 => ("xxx2", OpClass::Special(2), 2),
        241 => ("xxx3", OpClass::Special(3), 3),
        242 => ("xxx4", OpClass::Special(4), 4),
        // k, checksum, scaled size, design size, area length, name length
        243 => ("fnt_def1", OpClass::FontDef(1), 1 + 14),
        244 => ("fnt_def2", OpClass::FontDef(2), 2 + 14),
        245 => ("fnt_def3", OpClass::FontDef(3), 3 + 14),
        246 => ("fnt_def4", OpClass::FontDef(4), 4 + 14),
        // id, num, den, mag, comment length
        247 => ("pre", OpClass::Pre, 14),
        // p, num, den, mag, l, u, s, t
        248 => ("post", OpClass::Post, 28),
        // q, id
        249 => ("post_post", OpClass::PostPost, 5),
        // k, size, flags, name length
        252 => ("native_font_def", OpClass::NativeFontDef, 11),
        // width, glyph count
        253 => ("set_glyphs", OpClass::SetGlyphs, 6),
        // text length
        254 => ("set_text_and_glyphs", OpClass::SetTextAndGlyphs, 2),
        _ => ("undefined", OpClass::Undefined, 0),
    };
    OpInfo {
        code,
        mnemonic,
        class,
        fixed_len,
    }
}

const fn build() -> [OpInfo; 256] {
    let mut table = [entry(0); 256];
    let mut i = 0;
    while i < 256 {
        table[i] = entry(i as u8);
        i += 1;
    }
    table
}

pub static OPCODES: [OpInfo; 256] = build();

#[inline]
pub fn info(code: u8) -> &'static OpInfo {
    &OPCODES[code as usize]
}

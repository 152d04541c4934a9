//! Program-level invariants shared by the decoder and the encoder.

use std::collections::BTreeMap;

use super::*;

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Violation {
    UndefinedFont(i32),
    XdvOnly(&'static str),
    BadFontDef(String),
    Postamble(String),
    Trailer(String),
    Preamble(String),
}

impl Violation {
    pub(crate) fn describe(&self) -> String {
        match self {
            Violation::UndefinedFont(k) => format!("font {k} selected before definition"),
            Violation::XdvOnly(m) => format!("{m} is only valid in XDV files"),
            Violation::BadFontDef(r)
            | Violation::Postamble(r)
            | Violation::Trailer(r)
            | Violation::Preamble(r) => r.clone(),
        }
    }

    pub(crate) fn into_error(self, offset: usize, byte: u8) -> DviError {
        match self {
            Violation::UndefinedFont(k) => DviError::UndefinedFont { offset, k },
            Violation::XdvOnly(_) => DviError::UnknownOpcode { offset, byte },
            Violation::BadFontDef(reason) => DviError::BadFontDef { offset, reason },
            Violation::Postamble(reason) => DviError::InconsistentPostamble { offset, reason },
            Violation::Trailer(reason) => DviError::BadTrailer { offset, reason },
            Violation::Preamble(reason) => DviError::BadMagic(reason),
        }
    }
}

pub(crate) type Located = (usize, u8, Violation);

fn check_def(def: &FontDefinition) -> Result<(), Violation> {
    match def {
        FontDefinition::Tfm(d) => {
            if d.scaled_size == 0 || d.design_size == 0 {
                return Err(Violation::BadFontDef(format!(
                    "font {} has a zero scaled or design size",
                    d.k
                )));
            }
            if d.area.len() > 255 || d.name.len() > 255 {
                return Err(Violation::BadFontDef(format!("font {} name too long", d.k)));
            }
        }
        FontDefinition::Native(d) => {
            if d.point_size <= 0 {
                return Err(Violation::BadFontDef(format!(
                    "native font {} has nonpositive size",
                    d.k
                )));
            }
            if d.font_file.len() > 255 {
                return Err(Violation::BadFontDef(format!("native font {} name too long", d.k)));
            }
            let pairs = [
                (NATIVE_FLAG_COLORED, d.rgba.is_some(), "color"),
                (NATIVE_FLAG_EXTEND, d.extend.is_some(), "extend"),
                (NATIVE_FLAG_SLANT, d.slant.is_some(), "slant"),
                (NATIVE_FLAG_EMBOLDEN, d.embolden.is_some(), "embolden"),
            ];
            for (bit, present, what) in pairs {
                if (d.flags & bit != 0) != present {
                    return Err(Violation::BadFontDef(format!(
                        "native font {} {what} field disagrees with flags {:#06x}",
                        d.k, d.flags
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Walks the program in file order checking font usage, XDV-only commands and
/// postamble consistency.
pub(crate) fn check(p: &DviProgram) -> Result<(), Located> {
    if !p.flavor.accepts_id(p.pre.id) {
        return Err((0, opcode::PRE, Violation::Preamble(format!(
            "preamble id {} does not match {}",
            p.pre.id, p.flavor
        ))));
    }
    if p.pre.num == 0 || p.pre.den == 0 || p.pre.mag == 0 {
        return Err((0, opcode::PRE, Violation::Preamble("zero num, den or mag".into())));
    }
    if p.pre.comment.len() > 255 {
        return Err((0, opcode::PRE, Violation::Preamble("comment longer than 255 bytes".into())));
    }

    let mut defined: BTreeMap<i32, FontDefinition> = BTreeMap::new();
    let mut visit = |c: &Command, in_page: bool| -> Result<(), Located> {
        let at = |v: Violation| (c.offset, c.opcode, v);
        if p.flavor == DviFlavor::ClassicDvi && c.instr.is_xdv_only() {
            return Err(at(Violation::XdvOnly(c.mnemonic())));
        }
        if let Some(def) = c.instr.font_definition() {
            check_def(&def).map_err(at)?;
            match defined.get(&def.k()) {
                Some(prev) if *prev != def => {
                    return Err(at(Violation::BadFontDef(format!(
                        "font {} redefined with different parameters",
                        def.k()
                    ))))
                }
                Some(_) => {}
                None => {
                    defined.insert(def.k(), def);
                }
            }
        }
        if let Instruction::FontSelect(k) = c.instr {
            if !defined.contains_key(&k) {
                return Err(at(Violation::UndefinedFont(k)));
            }
        }
        if !in_page {
            let ok = matches!(
                c.instr,
                Instruction::Nop
                    | Instruction::FontDef(_)
                    | Instruction::NativeFontDef(_)
                    | Instruction::Special(_)
            );
            if !ok {
                return Err(at(Violation::Postamble(format!(
                    "{} outside a page",
                    c.mnemonic()
                ))));
            }
        }
        Ok(())
    };

    for page in &p.pages {
        for c in &page.leading {
            visit(c, false)?;
        }
        for c in &page.commands {
            visit(c, true)?;
        }
    }
    for c in &p.trailing {
        visit(c, false)?;
    }
    let before_post = defined.clone();

    let post_at = |v: Violation| (p.post.offset, opcode::POST, v);
    if p.post.page_count as usize != p.pages.len() {
        return Err(post_at(Violation::Postamble(format!(
            "postamble declares {} pages, file has {}",
            p.post.page_count,
            p.pages.len()
        ))));
    }
    if (p.post.num, p.post.den, p.post.mag) != (p.pre.num, p.pre.den, p.pre.mag) {
        return Err(post_at(Violation::Postamble(
            "postamble units differ from preamble".into(),
        )));
    }

    let mut in_post: BTreeMap<i32, FontDefinition> = BTreeMap::new();
    for c in &p.post.font_defs {
        let at = |v: Violation| (c.offset, c.opcode, v);
        let Some(def) = c.instr.font_definition() else {
            if matches!(c.instr, Instruction::Nop) {
                continue;
            }
            return Err(at(Violation::Postamble(format!(
                "{} in postamble",
                c.mnemonic()
            ))));
        };
        if p.flavor == DviFlavor::ClassicDvi && c.instr.is_xdv_only() {
            return Err(at(Violation::XdvOnly(c.mnemonic())));
        }
        check_def(&def).map_err(at)?;
        if let Some(prev) = before_post.get(&def.k()) {
            if *prev != def {
                return Err(at(Violation::Postamble(format!(
                    "postamble definition of font {} differs from the one in the pages",
                    def.k()
                ))));
            }
        }
        if in_post.insert(def.k(), def).is_some() {
            return Err(at(Violation::Postamble("font defined twice in postamble".into())));
        }
    }
    if let Some(k) = before_post.keys().find(|k| !in_post.contains_key(k)) {
        return Err(post_at(Violation::Postamble(format!(
            "font {k} missing from postamble"
        ))));
    }

    let pp = |v: Violation| (p.post.post_post_offset, opcode::POST_POST, v);
    if p.post.id != p.pre.id {
        return Err(pp(Violation::Postamble(format!(
            "post_post id {} differs from preamble id {}",
            p.post.id, p.pre.id
        ))));
    }
    if p.post.fill < 4 {
        return Err(pp(Violation::Trailer(format!(
            "{} fill bytes, need at least 4",
            p.post.fill
        ))));
    }
    Ok(())
}

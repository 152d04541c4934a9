//! The six-register DVI abstract machine.

use std::collections::BTreeSet;

use crate::dvi::{Command, Instruction};

use super::LayoutError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Registers {
    pub h: i32,
    pub v: i32,
    pub w: i32,
    pub x: i32,
    pub y: i32,
    pub z: i32,
}

/// Something a step made visible, in absolute DVI units.
#[derive(Debug, Clone, PartialEq)]
pub enum Mark {
    Char {
        k: i32,
        code: u32,
        h: i32,
        v: i32,
        /// Advance of the character whether or not `h` moved.
        width: i32,
    },
    Glyphs {
        k: i32,
        /// `(glyph id, h, v)` per glyph.
        run: Vec<(u16, i32, i32)>,
        /// Run origin and total width.
        h: i32,
        width: i32,
    },
    /// Bottom-left corner at `(h, v)`, possibly degenerate.
    Rule { h: i32, v: i32, height: i32, width: i32 },
    Special(Vec<u8>),
}

/// Executes one page. Arithmetic wraps like the 32-bit registers of a
/// reference implementation instead of panicking.
#[derive(Debug, Clone, Default)]
pub struct Machine {
    pub regs: Registers,
    stack: Vec<Registers>,
    font: Option<i32>,
    defined: BTreeSet<i32>,
    max_depth: usize,
}

impl Machine {
    /// A machine at `bop` state that knows the given font numbers.
    pub fn new(defined: impl IntoIterator<Item = i32>) -> Self {
        Machine {
            defined: defined.into_iter().collect(),
            ..Machine::default()
        }
    }

    pub fn depth(&self) -> usize {
        self.stack.len()
    }

    /// Deepest stack seen since construction.
    pub fn max_depth(&self) -> usize {
        self.max_depth
    }

    pub fn font(&self) -> Option<i32> {
        self.font
    }

    fn current_font(&self, offset: usize) -> Result<i32, LayoutError> {
        self.font.ok_or(LayoutError::NoFontSelected { offset })
    }

    /// Executes `cmd`. `char_width(k, code)` supplies advances for
    /// character commands.
    pub fn step(
        &mut self,
        cmd: &Command,
        char_width: &mut dyn FnMut(i32, u32) -> Result<i32, LayoutError>,
    ) -> Result<Option<Mark>, LayoutError> {
        let r = &mut self.regs;
        let mark = match &cmd.instr {
            Instruction::SetChar { code, advance } => {
                let k = self.font.ok_or(LayoutError::NoFontSelected { offset: cmd.offset })?;
                let width = char_width(k, *code)?;
                let r = &mut self.regs;
                let m = Mark::Char {
                    k,
                    code: *code,
                    h: r.h,
                    v: r.v,
                    width,
                };
                if *advance {
                    r.h = r.h.wrapping_add(width);
                }
                Some(m)
            }
            Instruction::SetRule { height, width, advance } => {
                let m = Mark::Rule {
                    h: r.h,
                    v: r.v,
                    height: *height,
                    width: *width,
                };
                if *advance {
                    r.h = r.h.wrapping_add(*width);
                }
                Some(m)
            }
            Instruction::Right(d) => {
                r.h = r.h.wrapping_add(*d);
                None
            }
            Instruction::W(d) => {
                if let Some(d) = d {
                    r.w = *d;
                }
                r.h = r.h.wrapping_add(r.w);
                None
            }
            Instruction::X(d) => {
                if let Some(d) = d {
                    r.x = *d;
                }
                r.h = r.h.wrapping_add(r.x);
                None
            }
            Instruction::Down(d) => {
                r.v = r.v.wrapping_add(*d);
                None
            }
            Instruction::Y(d) => {
                if let Some(d) = d {
                    r.y = *d;
                }
                r.v = r.v.wrapping_add(r.y);
                None
            }
            Instruction::Z(d) => {
                if let Some(d) = d {
                    r.z = *d;
                }
                r.v = r.v.wrapping_add(r.z);
                None
            }
            Instruction::Push => {
                self.stack.push(*r);
                self.max_depth = self.max_depth.max(self.stack.len());
                None
            }
            Instruction::Pop => {
                self.regs = self
                    .stack
                    .pop()
                    .ok_or(LayoutError::StackUnderflow { offset: cmd.offset })?;
                None
            }
            Instruction::FontSelect(k) => {
                if !self.defined.contains(k) {
                    return Err(LayoutError::UndefinedFont { k: *k });
                }
                self.font = Some(*k);
                None
            }
            Instruction::FontDef(d) => {
                self.defined.insert(d.k);
                None
            }
            Instruction::NativeFontDef(d) => {
                self.defined.insert(d.k);
                None
            }
            Instruction::Special(b) => Some(Mark::Special(b.clone())),
            Instruction::SetGlyphs { width, glyphs }
            | Instruction::SetTextAndGlyphs { width, glyphs, .. } => {
                let k = self.current_font(cmd.offset)?;
                let r = &mut self.regs;
                let run = glyphs
                    .iter()
                    .map(|g| (g.glyph, r.h.wrapping_add(g.x), r.v.wrapping_add(g.y)))
                    .collect();
                let m = Mark::Glyphs {
                    k,
                    run,
                    h: r.h,
                    width: *width,
                };
                r.h = r.h.wrapping_add(*width);
                Some(m)
            }
            Instruction::Nop => None,
        };
        Ok(mark)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(instrs: Vec<Instruction>) -> Result<(Machine, Vec<Mark>), LayoutError> {
        let mut m = Machine::new([0]);
        let mut marks = Vec::new();
        for (i, instr) in instrs.into_iter().enumerate() {
            let mut c = Command::new(instr);
            c.offset = i;
            if let Some(mark) = m.step(&c, &mut |_, _| Ok(100))? {
                marks.push(mark);
            }
        }
        Ok((m, marks))
    }

    #[test]
    fn push_pop_restores_registers() {
        let (m, marks) = run(vec![
            Instruction::FontSelect(0),
            Instruction::Push,
            Instruction::Right(100),
            Instruction::W(Some(5)),
            Instruction::Pop,
            Instruction::SetChar { code: 65, advance: true },
        ])
        .unwrap();
        assert_eq!(marks, vec![Mark::Char { k: 0, code: 65, h: 0, v: 0, width: 100 }]);
        assert_eq!(m.regs, Registers { h: 100, ..Default::default() });
        assert_eq!(m.max_depth(), 1);
    }

    #[test]
    fn register_reuse() {
        let (m, _) = run(vec![
            Instruction::W(Some(3)),
            Instruction::W(None),
            Instruction::X(Some(-1)),
            Instruction::X(None),
            Instruction::Y(Some(7)),
            Instruction::Z(Some(2)),
            Instruction::Y(None),
            Instruction::Down(-1),
        ])
        .unwrap();
        assert_eq!(m.regs, Registers { h: 4, v: 15, w: 3, x: -1, y: 7, z: 2 });
    }

    #[test]
    fn pop_on_empty_stack_underflows() {
        let err = run(vec![Instruction::Nop, Instruction::Pop]).unwrap_err();
        assert_eq!(err, LayoutError::StackUnderflow { offset: 1 });
    }

    #[test]
    fn undefined_font() {
        let err = run(vec![Instruction::FontSelect(9)]).unwrap_err();
        assert_eq!(err, LayoutError::UndefinedFont { k: 9 });
    }

    #[test]
    fn put_does_not_advance() {
        let (m, _) = run(vec![
            Instruction::FontSelect(0),
            Instruction::SetChar { code: 1, advance: false },
            Instruction::SetRule { height: 1, width: 50, advance: false },
        ])
        .unwrap();
        assert_eq!(m.regs.h, 0);
    }
}

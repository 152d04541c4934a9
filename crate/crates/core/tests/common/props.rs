//! Strategies and properties for the machine and fuzz suites.

use proptest::prelude::*;

use texglyph::dvi::{Command, DviFlavor, DviProgram, FontDef, Instruction};
use texglyph::layout::{LayoutError, Machine, Registers};
use texglyph::{interpret, parse, serialize};

use super::{corpus, font_services};

/// A movement, or a nested push/pop block.
#[derive(Debug, Clone)]
pub enum Node {
    Op(Instruction),
    Block(Vec<Node>),
}

fn movement() -> impl Strategy<Value = Instruction> {
    let d = -(1i32 << 23)..(1i32 << 23);
    prop_oneof![
        d.clone().prop_map(Instruction::Right),
        d.clone().prop_map(Instruction::Down),
        proptest::option::of(d.clone()).prop_map(Instruction::W),
        proptest::option::of(d.clone()).prop_map(Instruction::X),
        proptest::option::of(d.clone()).prop_map(Instruction::Y),
        proptest::option::of(d.clone()).prop_map(Instruction::Z),
        (0i32..1 << 20, d.clone(), any::<bool>()).prop_map(|(height, width, advance)| {
            Instruction::SetRule { height, width, advance }
        }),
        Just(Instruction::Nop),
        (0u32..300, any::<bool>()).prop_map(|(code, advance)| Instruction::SetChar { code, advance }),
    ]
}

/// Trees of movements; flattening wraps every block in push/pop.
pub fn balanced_tree() -> impl Strategy<Value = Vec<Node>> {
    let leaf = movement().prop_map(Node::Op);
    let node = leaf.prop_recursive(6, 64, 8, |inner| {
        prop::collection::vec(inner, 0..8).prop_map(Node::Block)
    });
    prop::collection::vec(node, 0..24)
}

pub fn flatten(nodes: &[Node], out: &mut Vec<Instruction>) {
    for n in nodes {
        match n {
            Node::Op(i) => out.push(i.clone()),
            Node::Block(inner) => {
                out.push(Instruction::Push);
                flatten(inner, out);
                out.push(Instruction::Pop);
            }
        }
    }
}

/// Runs a balanced program and checks that every `pop` restores the
/// registers saved by its `push`, that depth never goes negative and ends
/// at zero, and that the encoded program round-trips.
pub fn check_balanced(nodes: &[Node]) -> Result<(), TestCaseError> {
    let mut body = vec![Instruction::FontDef(tfm_def(0)), Instruction::FontSelect(0)];
    flatten(nodes, &mut body);
    let program = DviProgram::build(DviFlavor::ClassicDvi, vec![body]);
    let bytes = serialize(&program).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let reparsed = parse(&bytes).map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assert_eq!(serialize(&reparsed).unwrap(), bytes);

    let mut m = Machine::new([]);
    let mut saved: Vec<Registers> = Vec::new();
    let mut no_chars = |_: i32, _: u32| -> Result<i32, LayoutError> { Ok(0) };
    for cmd in &reparsed.pages[0].commands {
        if matches!(cmd.instr, Instruction::Push) {
            saved.push(m.regs);
        }
        m.step(cmd, &mut no_chars)
            .map_err(|e| TestCaseError::fail(format!("{e} at {}", cmd.offset)))?;
        if matches!(cmd.instr, Instruction::Pop) {
            let expect = saved.pop().expect("generator emits balanced pops");
            prop_assert_eq!(m.regs, expect);
        }
        prop_assert_eq!(m.depth(), saved.len());
    }
    prop_assert_eq!(m.depth(), 0);
    prop_assert!(m.max_depth() <= reparsed.post.max_stack_depth as usize);
    let page = interpret(&reparsed, 0, &font_services());
    prop_assert!(page.is_ok(), "{:?}", page.err());
    Ok(())
}

/// An extra `pop` is reported, never a panic or a negative depth.
pub fn check_underflow(extra_pops: usize) -> Result<(), TestCaseError> {
    let mut m = Machine::new([]);
    let pop = Command::new(Instruction::Pop);
    let mut no_chars = |_: i32, _: u32| -> Result<i32, LayoutError> { Ok(0) };
    for _ in 0..extra_pops {
        let r = m.step(&pop, &mut no_chars);
        prop_assert!(matches!(r, Err(LayoutError::StackUnderflow { .. })), "{:?}", r);
        prop_assert_eq!(m.depth(), 0);
    }
    Ok(())
}

/// Random bytes, plus corpus files with random damage.
pub fn fuzz_input() -> impl Strategy<Value = Vec<u8>> {
    let files: Vec<Vec<u8>> = corpus().into_iter().map(|(_, b)| b).collect();
    let n = files.len();
    let random = prop::collection::vec(any::<u8>(), 0..600);
    let damaged = (
        0..n,
        prop::collection::vec((any::<prop::sample::Index>(), any::<u8>()), 0..6),
        proptest::option::of(any::<prop::sample::Index>()),
    )
        .prop_map(move |(i, flips, cut)| {
            let mut b = files[i].clone();
            for (at, v) in flips {
                let at = at.index(b.len());
                b[at] = v;
            }
            if let Some(c) = cut {
                b.truncate(c.index(b.len() + 1));
            }
            b
        });
    prop_oneof![1 => random, 3 => damaged]
}

/// Parsing either fails cleanly or yields a program that re-encodes to the
/// same bytes and interprets (successfully or not) without panicking.
pub fn check_fuzz(bytes: &[u8]) -> Result<(), TestCaseError> {
    let Ok(program) = parse(bytes) else {
        return Ok(());
    };
    let again = serialize(&program).map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assert_eq!(again.as_slice(), bytes);
    let fonts = font_services();
    for i in 0..program.page_count() {
        let _ = interpret(&program, i, &fonts);
    }
    Ok(())
}

/// A font definition the fuzz corpus can resolve.
pub fn tfm_def(k: i32) -> FontDef {
    FontDef {
        k,
        checksum: 0,
        scaled_size: 10 << 16,
        design_size: 10 << 16,
        area: Vec::new(),
        name: b"tgsynth10".to_vec(),
    }
}

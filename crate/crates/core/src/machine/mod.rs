//! A small binary machine with one read-only input tape, one work tape and
//! exact unit-cost step counting.
//!
//! Every bit string decodes to a runnable program. Instructions are a 3-bit
//! opcode followed by an operand:
//!
//! | opcode | instruction | operand |
//! |--------|-------------|---------|
//! | `000` | `MOVE_IN` | none |
//! | `001` | `BRANCH_EOF a` | `w` bits |
//! | `010` | `BRANCH_IN a` | `w` bits |
//! | `011` | `MOVE_WL` | none |
//! | `100` | `MOVE_WR` | none |
//! | `101` | `TOGGLE_W` | none |
//! | `110` | `BRANCH_W a` | `w` bits |
//! | `111` | `HALT b` | 1 bit |
//!
//! The operand width is `w = ⌈log2(⌊L/3⌋ + 1)⌉` for a code of `L` bits, and
//! a branch target is read modulo the decoded instruction count. `⌊L/3⌋`
//! bounds the instruction count from above and is known before decoding
//! starts. Trailing bits that do not complete an instruction are dropped.

mod cost;
mod run;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use cost::{exact_te, exact_te_brute_force, te_profile, CostProfile, TeError, TeLimits};
pub use run::{run, RunOutcome};

/// Identifies the instruction set and cost model in every report.
pub const MACHINE_MODEL_ID: &str = "bitvm-3op-unitcost-v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Instr {
    MoveIn,
    BranchEof(usize),
    BranchIn(usize),
    MoveWL,
    MoveWR,
    ToggleW,
    BranchW(usize),
    Halt(bool),
}

impl Instr {
    fn opcode(self) -> u8 {
        match self {
            Instr::MoveIn => 0,
            Instr::BranchEof(_) => 1,
            Instr::BranchIn(_) => 2,
            Instr::MoveWL => 3,
            Instr::MoveWR => 4,
            Instr::ToggleW => 5,
            Instr::BranchW(_) => 6,
            Instr::Halt(_) => 7,
        }
    }

    fn target(self) -> Option<usize> {
        match self {
            Instr::BranchEof(a) | Instr::BranchIn(a) | Instr::BranchW(a) => Some(a),
            _ => None,
        }
    }
}

impl fmt::Display for Instr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Instr::MoveIn => write!(f, "MOVE_IN"),
            Instr::BranchEof(a) => write!(f, "BRANCH_EOF {a}"),
            Instr::BranchIn(a) => write!(f, "BRANCH_IN {a}"),
            Instr::MoveWL => write!(f, "MOVE_WL"),
            Instr::MoveWR => write!(f, "MOVE_WR"),
            Instr::ToggleW => write!(f, "TOGGLE_W"),
            Instr::BranchW(a) => write!(f, "BRANCH_W {a}"),
            Instr::Halt(b) => write!(f, "HALT {}", u8::from(*b)),
        }
    }
}

/// A bit string together with its decoding.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Program {
    code: Vec<bool>,
    instrs: Vec<Instr>,
}

fn ceil_log2(x: usize) -> u32 {
    if x <= 1 {
        0
    } else {
        usize::BITS - (x - 1).leading_zeros()
    }
}

/// Branch operand width for a code of `len` bits.
pub fn operand_width(len: usize) -> u32 {
    ceil_log2(len / 3 + 1)
}

fn read_bits(code: &[bool], at: usize, width: u32) -> Option<usize> {
    let end = at + width as usize;
    (end <= code.len()).then(|| {
        code[at..end]
            .iter()
            .fold(0, |acc, &b| (acc << 1) | usize::from(b))
    })
}

/// Total decoding: never fails.
pub fn decode(code: &[bool]) -> Program {
    let w = operand_width(code.len());
    let mut instrs = Vec::new();
    let mut at = 0;
    while let Some(op) = read_bits(code, at, 3) {
        at += 3;
        let width = match op {
            1 | 2 | 6 => w,
            7 => 1,
            _ => 0,
        };
        let Some(arg) = read_bits(code, at, width) else {
            break;
        };
        at += width as usize;
        instrs.push(match op {
            0 => Instr::MoveIn,
            1 => Instr::BranchEof(arg),
            2 => Instr::BranchIn(arg),
            3 => Instr::MoveWL,
            4 => Instr::MoveWR,
            5 => Instr::ToggleW,
            6 => Instr::BranchW(arg),
            _ => Instr::Halt(arg == 1),
        });
    }
    let count = instrs.len();
    for instr in &mut instrs {
        match instr {
            Instr::BranchEof(a) | Instr::BranchIn(a) | Instr::BranchW(a) => *a %= count,
            _ => {}
        }
    }
    Program {
        code: code.to_vec(),
        instrs,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AssembleError {
    #[error("branch target {target} out of range for {count} instructions")]
    TargetOutOfRange { target: usize, count: usize },
    #[error("no self-consistent operand width found")]
    NoFixedPoint,
}

/// Encodes an instruction list so that [`decode`] returns it unchanged.
pub fn assemble(instrs: &[Instr]) -> Result<Program, AssembleError> {
    let count = instrs.len();
    if let Some(target) = instrs
        .iter()
        .filter_map(|i| i.target())
        .find(|&t| t >= count)
    {
        return Err(AssembleError::TargetOutOfRange { target, count });
    }
    let branches = instrs.iter().filter(|i| i.target().is_some()).count();
    let halts = instrs
        .iter()
        .filter(|i| matches!(i, Instr::Halt(_)))
        .count();
    let min_w = ceil_log2(count);
    for w in min_w..usize::BITS {
        // up to two trailing pad bits may be needed to land on a fixed point
        for pad in 0..=2 {
            let len = 3 * count + halts + branches * w as usize + pad;
            if operand_width(len) != w {
                continue;
            }
            let mut code = Vec::with_capacity(len);
            for &instr in instrs {
                push_bits(&mut code, usize::from(instr.opcode()), 3);
                match instr {
                    Instr::Halt(b) => code.push(b),
                    other => {
                        if let Some(t) = other.target() {
                            push_bits(&mut code, t, w);
                        }
                    }
                }
            }
            code.extend(std::iter::repeat_n(false, pad));
            let program = decode(&code);
            debug_assert_eq!(program.instrs, instrs);
            return Ok(program);
        }
    }
    Err(AssembleError::NoFixedPoint)
}

fn push_bits(code: &mut Vec<bool>, value: usize, width: u32) {
    for k in (0..width).rev() {
        code.push((value >> k) & 1 == 1);
    }
}

impl Program {
    pub fn code(&self) -> &[bool] {
        &self.code
    }

    pub fn instrs(&self) -> &[Instr] {
        &self.instrs
    }

    /// A program that halts at once with output `b`.
    pub fn halt(b: bool) -> Self {
        assemble(&[Instr::Halt(b)]).expect("single halt assembles")
    }

    /// True when no instruction inspects an input bit. Such a program's
    /// behaviour depends on the input length only.
    pub fn is_value_oblivious(&self) -> bool {
        !self.instrs.iter().any(|i| matches!(i, Instr::BranchIn(_)))
    }

    pub fn index(&self) -> Option<u64> {
        index_of(self)
    }

    pub fn disassemble(&self) -> String {
        let mut out = String::new();
        for (k, instr) in self.instrs.iter().enumerate() {
            out.push_str(&format!("{k:>4}  {instr}\n"));
        }
        out
    }
}

/// The machine at position `i ≥ 1` in length-then-lexicographic order of bit
/// strings: `i` written in binary with its leading 1 removed.
///
/// # Panics
/// If `i == 0`.
pub fn nth_machine(i: u64) -> Program {
    assert!(i >= 1, "machine indices start at 1");
    let len = 63 - i.leading_zeros();
    let code: Vec<bool> = (0..len).rev().map(|k| (i >> k) & 1 == 1).collect();
    decode(&code)
}

/// Inverse of [`nth_machine`]; `None` for codes of 64 bits or more.
pub fn index_of(p: &Program) -> Option<u64> {
    if p.code.len() >= 64 {
        return None;
    }
    Some(
        p.code
            .iter()
            .fold(1u64, |acc, &b| (acc << 1) | u64::from(b)),
    )
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProgramParseError {
    #[error("expected `len=<bits>,hex=<digits>` or `index=<k>`")]
    Shape,
    #[error("bad length: {0}")]
    Length(String),
    #[error("expected {expected} hex digits, found {found}")]
    DigitCount { expected: usize, found: usize },
    #[error("invalid hex digit {0:?}")]
    Digit(char),
    #[error("machine index must be a positive integer: {0}")]
    Index(String),
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "len={},hex=", self.code.len())?;
        for chunk in self.code.chunks(4) {
            let nibble = (0..4).fold(0u32, |acc, k| {
                (acc << 1) | u32::from(chunk.get(k).copied().unwrap_or(false))
            });
            write!(
                f,
                "{}",
                char::from_digit(nibble, 16)
                    .expect("nibble")
                    .to_ascii_uppercase()
            )?;
        }
        Ok(())
    }
}

impl FromStr for Program {
    type Err = ProgramParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if let Some(k) = s.strip_prefix("index=") {
            let i: u64 = k
                .parse()
                .map_err(|_| ProgramParseError::Index(k.to_string()))?;
            if i == 0 {
                return Err(ProgramParseError::Index(k.to_string()));
            }
            return Ok(nth_machine(i));
        }
        let (len_part, hex_part) = s.split_once(',').ok_or(ProgramParseError::Shape)?;
        let len_text = len_part
            .strip_prefix("len=")
            .ok_or(ProgramParseError::Shape)?;
        let hex = hex_part
            .strip_prefix("hex=")
            .ok_or(ProgramParseError::Shape)?;
        let len: usize = len_text
            .parse()
            .map_err(|_| ProgramParseError::Length(len_text.to_string()))?;
        let expected = len.div_ceil(4);
        if hex.len() != expected {
            return Err(ProgramParseError::DigitCount {
                expected,
                found: hex.len(),
            });
        }
        let mut code = Vec::with_capacity(expected * 4);
        for c in hex.chars() {
            let v = c.to_digit(16).ok_or(ProgramParseError::Digit(c))?;
            code.extend((0..4).rev().map(|k| (v >> k) & 1 == 1));
        }
        // bits past `len` in the last digit are ignored
        code.truncate(len);
        Ok(decode(&code))
    }
}

impl Serialize for Program {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Program {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

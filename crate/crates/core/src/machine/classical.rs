//! A register machine with one output tape.
//!
//! Programs are bit strings read as a sequence of instructions, each a
//! 3-bit opcode followed by its operands:
//!
//! | opcode | instruction | operands | effect |
//! |--------|-------------|----------|--------|
//! | `000`  | `HALT`      |          | stop, emit the tape |
//! | `001`  | `W0`        |          | append `0` |
//! | `010`  | `W1`        |          | append `1` |
//! | `011`  | `JMP a`     | `a`: 3 bits | jump to instruction `a` |
//! | `100`  | `JLT a e`   | `a`, `e`: 3 bits each | jump to `a` if the tape is shorter than `2^e` |
//!
//! Opcodes `101`..`111` are invalid, as is any program that ends inside an
//! instruction or is empty. Jump targets may equal the instruction count
//! (falling off the end halts) but not exceed it. Running past the last
//! instruction halts.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::qis::BitString;
use crate::{Error, Result};

pub const DEFAULT_STEP_LIMIT: usize = 1024;
/// Largest program length accepted by the exhaustive searches.
pub const MAX_PROGRAM_BITS: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Instruction {
    Halt,
    Write(bool),
    Jump(usize),
    JumpIfShorter { target: usize, exponent: u32 },
}

fn take(bits: &[bool], at: &mut usize, width: usize) -> Option<usize> {
    let end = *at + width;
    let chunk = bits.get(*at..end)?;
    *at = end;
    Some(chunk.iter().fold(0, |acc, &b| (acc << 1) | b as usize))
}

/// Decodes a program; `None` when it is not a whole sequence of valid
/// instructions.
pub fn decode(program: &BitString) -> Option<Vec<Instruction>> {
    let bits = program.bits();
    let mut at = 0;
    let mut out = Vec::new();
    while at < bits.len() {
        let ins = match take(bits, &mut at, 3)? {
            0 => Instruction::Halt,
            1 => Instruction::Write(false),
            2 => Instruction::Write(true),
            3 => Instruction::Jump(take(bits, &mut at, 3)?),
            4 => {
                let target = take(bits, &mut at, 3)?;
                let exponent = take(bits, &mut at, 3)? as u32;
                Instruction::JumpIfShorter { target, exponent }
            }
            _ => return None,
        };
        out.push(ins);
    }
    let count = out.len();
    let targets_ok = out.iter().all(|ins| match *ins {
        Instruction::Jump(t) | Instruction::JumpIfShorter { target: t, .. } => t <= count,
        _ => true,
    });
    (count > 0 && targets_ok).then_some(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassicalMachine {
    pub step_limit: usize,
}

impl Default for ClassicalMachine {
    fn default() -> Self {
        ClassicalMachine { step_limit: DEFAULT_STEP_LIMIT }
    }
}

impl ClassicalMachine {
    /// Output of `program`, or `None` if it is invalid or does not halt
    /// within the step limit.
    pub fn run(&self, program: &BitString) -> Option<BitString> {
        let code = decode(program)?;
        let mut tape = BitString::empty();
        let mut pc = 0;
        for _ in 0..self.step_limit {
            match code.get(pc) {
                None | Some(Instruction::Halt) => return Some(tape),
                Some(Instruction::Write(b)) => {
                    tape.push(*b);
                    pc += 1;
                }
                Some(Instruction::Jump(t)) => pc = *t,
                Some(Instruction::JumpIfShorter { target, exponent }) => {
                    pc = if tape.len() < 1usize << exponent { *target } else { pc + 1 };
                }
            }
        }
        None
    }

    /// Every output reachable by a program of at most `lmax` bits, mapped to
    /// the length of its shortest program. One pass over all programs.
    pub fn complexity_table(&self, lmax: usize) -> Result<BTreeMap<BitString, usize>> {
        check_lmax(lmax)?;
        let mut table = BTreeMap::new();
        for p in BitString::all_up_to(lmax) {
            if let Some(x) = self.run(&p) {
                table.entry(x).or_insert(p.len());
            }
        }
        Ok(table)
    }

    /// Shortest program length producing `x`, searching lengths upward.
    pub fn complexity(&self, x: &BitString, lmax: usize) -> Result<Option<usize>> {
        check_lmax(lmax)?;
        Ok(BitString::all_up_to(lmax)
            .find(|p| self.run(p).as_ref() == Some(x))
            .map(|p| p.len()))
    }
}

fn check_lmax(lmax: usize) -> Result<()> {
    if lmax > MAX_PROGRAM_BITS {
        return Err(Error::InvalidParameter(format!(
            "program length bound {lmax} exceeds {MAX_PROGRAM_BITS}"
        )));
    }
    Ok(())
}

/// [`ClassicalMachine::run`] with the default step limit.
pub fn run_classical(program: &BitString) -> Option<BitString> {
    ClassicalMachine::default().run(program)
}

/// [`ClassicalMachine::complexity`] with the default step limit.
pub fn classical_complexity(x: &BitString, lmax: usize) -> Result<Option<usize>> {
    ClassicalMachine::default().complexity(x, lmax)
}

/// [`ClassicalMachine::complexity_table`] with the default step limit.
pub fn complexity_table(lmax: usize) -> Result<BTreeMap<BitString, usize>> {
    ClassicalMachine::default().complexity_table(lmax)
}

/// Program serialization: big-endian hex, zero-padded on the right to a
/// whole number of nibbles, with the bit length alongside.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProgramJson {
    pub bits: usize,
    pub hex: String,
}

impl ProgramJson {
    pub fn encode(p: &BitString) -> Self {
        let hex = p
            .bits()
            .chunks(4)
            .map(|c| {
                let v = (0..4).fold(0u32, |acc, i| (acc << 1) | *c.get(i).unwrap_or(&false) as u32);
                char::from_digit(v, 16).expect("nibble")
            })
            .collect();
        ProgramJson { bits: p.len(), hex }
    }

    pub fn decode(&self) -> Result<BitString> {
        let bad = || Error::InvalidBitString(format!("{}:{}", self.bits, self.hex));
        if self.hex.len() != self.bits.div_ceil(4) {
            return Err(bad());
        }
        let mut bits = Vec::with_capacity(self.hex.len() * 4);
        for ch in self.hex.chars() {
            let v = ch.to_digit(16).ok_or_else(bad)?;
            bits.extend((0..4).rev().map(|i| (v >> i) & 1 == 1));
        }
        if bits[self.bits..].iter().any(|&b| b) {
            return Err(bad());
        }
        bits.truncate(self.bits);
        Ok(BitString::from_bits(bits))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(x: &str) -> BitString {
        x.parse().unwrap()
    }

    #[test]
    fn run_examples() {
        assert_eq!(run_classical(&s("000")), Some(BitString::empty()));
        assert_eq!(run_classical(&s("010000")), Some(s("1")));
        assert_eq!(run_classical(&s("011000")), None);
        assert_eq!(run_classical(&s("")), None);
        assert_eq!(run_classical(&s("00")), None);
        assert_eq!(run_classical(&s("101")), None);
        // W1, then JMP past the end (target 2 = count) halts.
        assert_eq!(run_classical(&s("010011010")), Some(s("1")));
        // JMP 3 with two instructions is out of range.
        assert_eq!(run_classical(&s("010011011")), None);
        // W0; JLT 0, 2: loops until the tape has 4 symbols.
        assert_eq!(run_classical(&s("001100000010")), Some(s("0000")));
    }

    #[test]
    fn empty_string_complexity() {
        assert_eq!(classical_complexity(&BitString::empty(), 12).unwrap(), Some(3));
        assert_eq!(classical_complexity(&s("11"), 5).unwrap(), None);
        assert!(classical_complexity(&s("1"), 21).is_err());
    }

    #[test]
    fn program_hex_round_trip() {
        for p in BitString::all_up_to(7) {
            let j = ProgramJson::encode(&p);
            assert_eq!(j.decode().unwrap(), p);
        }
        assert_eq!(ProgramJson::encode(&s("010000")).hex, "40");
    }
}

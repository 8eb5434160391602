//! 26-bit instruction word.
//!
//! Fields are packed from the least significant bit upwards:
//!
//! | bits  | field      | width |
//! |-------|------------|-------|
//! | 1:0   | `SecLevel` | 2     |
//! | 11:2  | `raddr`    | 10    |
//! | 21:12 | `waddr`    | 10    |
//! | 22    | `wen`      | 1     |
//! | 25:23 | `op`       | 3     |
//!
//! `SecLevel` encodes SL1 = 0, SL3 = 1, SL5 = 2; 3 is reserved.
//!
//! | op  | mnemonic      | fields used                                     |
//! |-----|---------------|-------------------------------------------------|
//! | 0   | `NOP`         | none                                            |
//! | 1   | `LOAD_SEED`   | `waddr`, `wen` (seed words go to waddr, waddr+1)|
//! | 2   | `RUN_PRG`     | `SecLevel`                                      |
//! | 3   | `RUN_REJSAMP` | `SecLevel`, `waddr` (output base)               |
//! | 4   | `RUN_FULL`    | `SecLevel`, `waddr` (output base)               |
//! | 5   | `READ_RESULT` | `SecLevel`, `raddr` (output base)               |
//!
//! Opcodes 6 and 7 are invalid.

use std::fmt;

use thiserror::Error;

use crate::params::SecLevel;

pub const INSTRUCTION_BITS: u32 = 26;
pub const ADDR_BITS: u32 = 10;
pub const MAX_ADDR: u16 = (1 << ADDR_BITS) - 1;

const SL_SHIFT: u32 = 0;
const RADDR_SHIFT: u32 = 2;
const WADDR_SHIFT: u32 = 12;
const WEN_SHIFT: u32 = 22;
const OP_SHIFT: u32 = 23;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecodeError {
    #[error("instruction word {0:#x} is wider than 26 bits")]
    TooWide(u32),
    #[error("invalid opcode {0:#05b}")]
    InvalidOpcode(u8),
    #[error("field `{field}` value {value} does not fit in {bits} bits")]
    FieldOverflow { field: &'static str, value: u32, bits: u32 },
    #[error("line {line}: {reason}")]
    Syntax { line: usize, reason: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Opcode {
    Nop = 0,
    LoadSeed = 1,
    RunPrg = 2,
    RunRejSamp = 3,
    RunFull = 4,
    ReadResult = 5,
}

impl Opcode {
    pub const ALL: [Opcode; 6] = [
        Opcode::Nop,
        Opcode::LoadSeed,
        Opcode::RunPrg,
        Opcode::RunRejSamp,
        Opcode::RunFull,
        Opcode::ReadResult,
    ];

    pub fn from_bits(bits: u8) -> Result<Self, DecodeError> {
        Opcode::ALL
            .into_iter()
            .find(|op| *op as u8 == bits)
            .ok_or(DecodeError::InvalidOpcode(bits))
    }

    pub fn mnemonic(self) -> &'static str {
        match self {
            Opcode::Nop => "NOP",
            Opcode::LoadSeed => "LOAD_SEED",
            Opcode::RunPrg => "RUN_PRG",
            Opcode::RunRejSamp => "RUN_REJSAMP",
            Opcode::RunFull => "RUN_FULL",
            Opcode::ReadResult => "READ_RESULT",
        }
    }
}

impl fmt::Display for Opcode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.mnemonic())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Instruction {
    /// Raw 2-bit level code; see [`level_code`] and [`Instruction::level`].
    pub sec_level: u8,
    pub raddr: u16,
    pub waddr: u16,
    pub wen: bool,
    pub op: Opcode,
}

impl Instruction {
    pub fn new(op: Opcode, level: SecLevel, raddr: u16, waddr: u16, wen: bool) -> Self {
        Instruction { sec_level: level_code(level), raddr, waddr, wen, op }
    }

    /// Level selected by the `SecLevel` field, `None` for the reserved code.
    pub fn level(&self) -> Option<SecLevel> {
        match self.sec_level {
            0 => Some(SecLevel::SL1),
            1 => Some(SecLevel::SL3),
            2 => Some(SecLevel::SL5),
            _ => None,
        }
    }
}

impl fmt::Display for Instruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} sl={} raddr={} waddr={} wen={}",
            self.op, self.sec_level, self.raddr, self.waddr, self.wen as u8
        )
    }
}

pub fn level_code(level: SecLevel) -> u8 {
    match level {
        SecLevel::SL1 => 0,
        SecLevel::SL3 => 1,
        SecLevel::SL5 => 2,
    }
}

fn field(word: u32, shift: u32, bits: u32) -> u32 {
    (word >> shift) & ((1 << bits) - 1)
}

pub fn decode(word: u32) -> Result<Instruction, DecodeError> {
    if word >> INSTRUCTION_BITS != 0 {
        return Err(DecodeError::TooWide(word));
    }
    Ok(Instruction {
        sec_level: field(word, SL_SHIFT, 2) as u8,
        raddr: field(word, RADDR_SHIFT, ADDR_BITS) as u16,
        waddr: field(word, WADDR_SHIFT, ADDR_BITS) as u16,
        wen: field(word, WEN_SHIFT, 1) == 1,
        op: Opcode::from_bits(field(word, OP_SHIFT, 3) as u8)?,
    })
}

pub fn encode(ins: &Instruction) -> Result<u32, DecodeError> {
    let check = |field: &'static str, value: u32, bits: u32| {
        if value >> bits != 0 {
            Err(DecodeError::FieldOverflow { field, value, bits })
        } else {
            Ok(value)
        }
    };
    let sl = check("sec_level", ins.sec_level as u32, 2)?;
    let raddr = check("raddr", ins.raddr as u32, ADDR_BITS)?;
    let waddr = check("waddr", ins.waddr as u32, ADDR_BITS)?;
    Ok(sl << SL_SHIFT
        | raddr << RADDR_SHIFT
        | waddr << WADDR_SHIFT
        | (ins.wen as u32) << WEN_SHIFT
        | (ins.op as u32) << OP_SHIFT)
}

/// Parses a program file: one 7-hex-digit word per line. Blank lines and
/// text after `#` are ignored.
pub fn parse_program(text: &str) -> Result<Vec<u32>, DecodeError> {
    let mut words = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let syntax = |reason: String| DecodeError::Syntax { line: i + 1, reason };
        if line.len() != 7 || !line.bytes().all(|b| b.is_ascii_hexdigit()) {
            return Err(syntax(format!("expected 7 hex digits, found `{line}`")));
        }
        let word = u32::from_str_radix(line, 16).expect("checked hex");
        if word >> INSTRUCTION_BITS != 0 {
            return Err(syntax(format!("`{line}` is wider than 26 bits")));
        }
        words.push(word);
    }
    Ok(words)
}

pub fn format_program(words: &[u32]) -> String {
    words.iter().map(|w| format!("{w:07x}\n")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn zero_word_is_nop() {
        let ins = decode(0).unwrap();
        assert_eq!(ins, Instruction { sec_level: 0, raddr: 0, waddr: 0, wen: false, op: Opcode::Nop });
        assert_eq!(ins.level(), Some(SecLevel::SL1));
    }

    #[test]
    fn field_positions() {
        let ins = Instruction { sec_level: 0b01, raddr: 0x3ff, waddr: 0, wen: true, op: Opcode::RunPrg };
        let w = encode(&ins).unwrap();
        assert_eq!(w & 0b11, 0b01);
        assert_eq!((w >> 2) & 0x3ff, 0x3ff);
        assert_eq!((w >> 12) & 0x3ff, 0);
        assert_eq!((w >> 22) & 1, 1);
        assert_eq!(w >> 23, 0b010);
        assert_eq!(w, 0x1400ffd);
        assert_eq!(decode(w).unwrap(), ins);
    }

    #[test]
    fn invalid_words() {
        assert_eq!(decode(1 << 26), Err(DecodeError::TooWide(1 << 26)));
        assert_eq!(decode(6 << 23), Err(DecodeError::InvalidOpcode(6)));
        assert_eq!(decode(7 << 23), Err(DecodeError::InvalidOpcode(7)));
        let wide = Instruction { sec_level: 0, raddr: 1024, waddr: 0, wen: false, op: Opcode::Nop };
        assert!(matches!(encode(&wide), Err(DecodeError::FieldOverflow { field: "raddr", .. })));
    }

    #[test]
    fn reserved_level() {
        let ins = decode(0b11).unwrap();
        assert_eq!(ins.level(), None);
    }

    #[test]
    fn program_text() {
        let words = vec![0x0000000, 0x2bfe000, 0x1400ffd];
        let text = format_program(&words);
        assert_eq!(text, "0000000\n2bfe000\n1400ffd\n");
        assert_eq!(parse_program(&text).unwrap(), words);
        assert_eq!(parse_program("# header\n\n0000000  # nop\n").unwrap(), vec![0]);
        assert!(matches!(parse_program("0000000\n123\n"), Err(DecodeError::Syntax { line: 2, .. })));
        assert!(matches!(parse_program("fffffff\n"), Err(DecodeError::Syntax { line: 1, .. })));
    }

    fn any_instruction() -> impl Strategy<Value = Instruction> {
        (0u8..4, 0u16..1024, 0u16..1024, any::<bool>(), 0usize..Opcode::ALL.len()).prop_map(
            |(sec_level, raddr, waddr, wen, op)| Instruction { sec_level, raddr, waddr, wen, op: Opcode::ALL[op] },
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]
        #[test]
        fn encode_decode_identity(ins in any_instruction()) {
            let w = encode(&ins).unwrap();
            prop_assert!(w < 1 << 26);
            prop_assert_eq!(decode(w).unwrap(), ins);
        }
    }
}

//! Linear-sweep EVM bytecode disassembly and opcode term frequencies.
//!
//! The canonical mnemonic table ships as a data file
//! (`mnemonic,byte,immediate_len`); `PUSH1..PUSH32` consume their immediate
//! bytes, which are never counted as opcodes.  Bytes outside the table
//! decode as `INVALID`, so disassembly is total over arbitrary input.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Canonical opcode table source, shipped with the crate.
const OPCODE_TABLE_CSV: &str = include_str!("data/opcodes.csv");

/// Byte decoding as INVALID for input outside the table.
const INVALID_BYTE: u8 = 0xfe;

#[derive(Clone, Debug)]
struct TableEntry {
    mnemonic: &'static str,
    immediate_len: u8,
    defined: bool,
}

struct OpcodeTable {
    entries: Vec<TableEntry>,
    /// Defined opcode bytes in ascending order: the canonical feature order.
    defined_bytes: Vec<u8>,
}

fn table() -> &'static OpcodeTable {
    static TABLE: OnceLock<OpcodeTable> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut entries: Vec<TableEntry> = (0..=255u8)
            .map(|_| TableEntry {
                mnemonic: "INVALID",
                immediate_len: 0,
                defined: false,
            })
            .collect();
        let mut defined_bytes = Vec::new();
        let mut reader = csv::Reader::from_reader(OPCODE_TABLE_CSV.as_bytes());
        for record in reader.records() {
            let record = record.expect("opcode table is well-formed");
            let mnemonic: &'static str = Box::leak(record[0].to_string().into_boxed_str());
            let byte = u8::from_str_radix(record[1].trim_start_matches("0x"), 16)
                .expect("opcode byte is hex");
            let immediate_len: u8 = record[2].parse().expect("immediate length");
            entries[byte as usize] = TableEntry {
                mnemonic,
                immediate_len,
                defined: true,
            };
            defined_bytes.push(byte);
        }
        defined_bytes.sort_unstable();
        OpcodeTable {
            entries,
            defined_bytes,
        }
    })
}

/// Mnemonic for a byte; undefined bytes read as `INVALID`.
pub fn mnemonic(byte: u8) -> &'static str {
    let entry = &table().entries[byte as usize];
    if entry.defined {
        entry.mnemonic
    } else {
        table().entries[INVALID_BYTE as usize].mnemonic
    }
}

/// Declared immediate length of a byte (0 for undefined bytes).
pub fn immediate_len(byte: u8) -> u8 {
    let entry = &table().entries[byte as usize];
    if entry.defined {
        entry.immediate_len
    } else {
        0
    }
}

/// All canonical mnemonics in byte order: the fixed feature space.
pub fn canonical_mnemonics() -> Vec<&'static str> {
    let t = table();
    t.defined_bytes
        .iter()
        .map(|&b| t.entries[b as usize].mnemonic)
        .collect()
}

/// One decoded instruction.  `consumed_immediate` is how many immediate
/// bytes actually followed in the input — equal to the declared length
/// except for a `PUSH` truncated by the end of the code.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecodedOp {
    pub byte: u8,
    pub consumed_immediate: u8,
}

impl DecodedOp {
    pub fn mnemonic(&self) -> &'static str {
        mnemonic(self.byte)
    }

    /// Encoded length of this instruction in the original stream.
    pub fn encoded_len(&self) -> usize {
        1 + self.consumed_immediate as usize
    }
}

/// Disassembly failures: the input must be hex of even length.
#[derive(Clone, Debug, PartialEq, Eq, Error, Serialize, Deserialize)]
#[serde(tag = "error", rename_all = "snake_case")]
pub enum DisasmError {
    #[error("odd-length hex input ({len} digits)")]
    OddLength { len: usize },
    #[error("non-hex character {found:?} at digit {position}")]
    NonHex { position: usize, found: char },
}

/// Decode a hex string (optional `0x` prefix) into raw bytes.
pub fn decode_hex(input: &str) -> Result<Vec<u8>, DisasmError> {
    let stripped = input
        .strip_prefix("0x")
        .or_else(|| input.strip_prefix("0X"))
        .unwrap_or(input);
    if stripped.len() % 2 != 0 {
        return Err(DisasmError::OddLength {
            len: stripped.len(),
        });
    }
    let mut out = Vec::with_capacity(stripped.len() / 2);
    let digits: Vec<char> = stripped.chars().collect();
    for (i, pair) in digits.chunks(2).enumerate() {
        let hi = pair[0].to_digit(16).ok_or(DisasmError::NonHex {
            position: 2 * i,
            found: pair[0],
        })?;
        let lo = pair[1].to_digit(16).ok_or(DisasmError::NonHex {
            position: 2 * i + 1,
            found: pair[1],
        })?;
        out.push((hi * 16 + lo) as u8);
    }
    Ok(out)
}

/// Linear-sweep disassembly of hex-encoded bytecode.  Total over any byte
/// content: undefined bytes become `INVALID`; a trailing `PUSH` consumes
/// whatever immediate bytes remain.
pub fn disassemble(bytecode: &str) -> Result<Vec<DecodedOp>, DisasmError> {
    Ok(disassemble_bytes(&decode_hex(bytecode)?))
}

/// Linear sweep over raw bytes.
pub fn disassemble_bytes(code: &[u8]) -> Vec<DecodedOp> {
    let mut out = Vec::new();
    let mut i = 0usize;
    while i < code.len() {
        let byte = code[i];
        let declared = immediate_len(byte) as usize;
        let available = code.len() - i - 1;
        let consumed = declared.min(available);
        out.push(DecodedOp {
            byte,
            consumed_immediate: consumed as u8,
        });
        i += 1 + consumed;
    }
    out
}

/// Opcode term frequencies over the canonical mnemonic table.  Every
/// canonical mnemonic appears as a key, zero when unobserved, so vectors
/// are comparable across corpora.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpcodeVector {
    pub counts: BTreeMap<String, u64>,
    pub total_ops: u64,
}

impl OpcodeVector {
    /// Counts in canonical (byte-value) order, as a numeric feature row.
    pub fn to_feature_row(&self) -> Vec<f64> {
        canonical_mnemonics()
            .iter()
            .map(|&m| self.counts.get(m).copied().unwrap_or(0) as f64)
            .collect()
    }

    pub fn count(&self, mnemonic: &str) -> u64 {
        self.counts.get(mnemonic).copied().unwrap_or(0)
    }
}

/// Count opcode occurrences in a decoded sequence.
pub fn opcode_features(sequence: &[DecodedOp]) -> OpcodeVector {
    let mut counts: BTreeMap<String, u64> = canonical_mnemonics()
        .into_iter()
        .map(|m| (m.to_string(), 0))
        .collect();
    for op in sequence {
        *counts.entry(op.mnemonic().to_string()).or_insert(0) += 1;
    }
    OpcodeVector {
        counts,
        total_ops: sequence.len() as u64,
    }
}

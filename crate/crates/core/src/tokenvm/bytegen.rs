//! Deployed-bytecode stubs for synthetic tokens.
//!
//! The classifier work needs runtime bytecode whose opcode histogram actually
//! correlates with the trap wired into the token, the way real scam bytecode
//! does: membership checks show up as `SLOAD`/`EQ` bursts, switches as
//! `ISZERO` pairs, fee math as `MUL`/`DIV`/`SUB`, callback hooks as `CALL`.
//! Stubs are deterministic in `(trap shape, seed)` and never depend on the
//! token id, so contract clones that share a generation seed share a
//! byte-identical stub (and therefore a code digest).
//!
//! Filler noise uses a restricted immediate alphabet so that `PUSH`
//! immediates can never be mistaken for the opcode bytes the features count.

use super::{ListKind, TokenSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

// Opcode bytes used by the motifs (standard EVM encoding).
const ADD: u8 = 0x01;
const MUL: u8 = 0x02;
const SUB: u8 = 0x03;
const DIV: u8 = 0x04;
const GT: u8 = 0x11;
const EQ: u8 = 0x14;
const ISZERO: u8 = 0x15;
const AND: u8 = 0x16;
const OR: u8 = 0x17;
const ADDRESS: u8 = 0x30;
const CALLER: u8 = 0x33;
const CALLVALUE: u8 = 0x34;
const CALLDATALOAD: u8 = 0x35;
const POP: u8 = 0x50;
const MSTORE: u8 = 0x52;
const SLOAD: u8 = 0x54;
const SSTORE: u8 = 0x55;
const JUMPI: u8 = 0x57;
const GAS: u8 = 0x5a;
const JUMPDEST: u8 = 0x5b;
const PUSH1: u8 = 0x60;
const PUSH2: u8 = 0x61;
const PUSH4: u8 = 0x63;
const DUP1: u8 = 0x80;
const SWAP1: u8 = 0x90;
const CALL: u8 = 0xf1;
const RETURN: u8 = 0xf3;
const REVERT: u8 = 0xfd;
const INVALID: u8 = 0xfe;

/// Immediate bytes that are not any opcode the feature set counts, so a raw
/// byte scan and a proper decode agree on every counted mnemonic.
const SAFE_IMM: [u8; 8] = [0x05, 0x06, 0x07, 0x0a, 0x0b, 0x0c, 0x0d, 0x0e];

fn imm(rng: &mut ChaCha8Rng) -> u8 {
    SAFE_IMM[rng.gen_range(0..SAFE_IMM.len())]
}

fn push2_dest(out: &mut Vec<u8>, rng: &mut ChaCha8Rng) {
    out.push(PUSH2);
    out.push(imm(rng));
    out.push(imm(rng));
}

/// `DUP1 PUSH4 <sel> EQ PUSH2 <dest> JUMPI` — one dispatcher arm.
fn dispatcher_arm(out: &mut Vec<u8>, rng: &mut ChaCha8Rng) {
    out.push(DUP1);
    out.push(PUSH4);
    for _ in 0..4 {
        out.push(imm(rng));
    }
    out.push(EQ);
    push2_dest(out, rng);
    out.push(JUMPI);
}

/// Membership check: `JUMPDEST CALLER SLOAD EQ ISZERO PUSH2 JUMPI REVERT`.
fn permission_motif(out: &mut Vec<u8>, rng: &mut ChaCha8Rng) {
    out.push(JUMPDEST);
    out.push(CALLER);
    out.push(SLOAD);
    out.push(EQ);
    out.push(ISZERO);
    push2_dest(out, rng);
    out.push(JUMPI);
    out.push(PUSH1);
    out.push(imm(rng));
    out.push(DUP1);
    out.push(REVERT);
}

/// Switch check: `JUMPDEST SLOAD ISZERO ISZERO PUSH2 JUMPI REVERT`.
fn suspension_motif(out: &mut Vec<u8>, rng: &mut ChaCha8Rng) {
    out.push(JUMPDEST);
    out.push(SLOAD);
    out.push(ISZERO);
    out.push(ISZERO);
    push2_dest(out, rng);
    out.push(JUMPI);
    out.push(PUSH1);
    out.push(imm(rng));
    out.push(DUP1);
    out.push(REVERT);
}

/// Cap check: `JUMPDEST CALLDATALOAD SLOAD GT ISZERO PUSH2 JUMPI REVERT`.
fn limit_motif(out: &mut Vec<u8>, rng: &mut ChaCha8Rng) {
    out.push(JUMPDEST);
    out.push(CALLDATALOAD);
    out.push(SLOAD);
    out.push(GT);
    out.push(ISZERO);
    push2_dest(out, rng);
    out.push(JUMPI);
    out.push(PUSH1);
    out.push(imm(rng));
    out.push(DUP1);
    out.push(REVERT);
}

/// Fee math: `JUMPDEST SLOAD MUL PUSH2 DIV SWAP1 SUB`.
fn fee_motif(out: &mut Vec<u8>, rng: &mut ChaCha8Rng) {
    out.push(JUMPDEST);
    out.push(SLOAD);
    out.push(MUL);
    out.push(PUSH2);
    out.push(imm(rng));
    out.push(imm(rng));
    out.push(DIV);
    out.push(SWAP1);
    out.push(SUB);
}

/// External hook: `JUMPDEST PUSH1 DUP1 ADDRESS GAS CALL ISZERO PUSH2 JUMPI`.
fn callback_motif(out: &mut Vec<u8>, rng: &mut ChaCha8Rng) {
    out.push(JUMPDEST);
    out.push(PUSH1);
    out.push(imm(rng));
    out.push(DUP1);
    out.push(ADDRESS);
    out.push(GAS);
    out.push(CALL);
    out.push(ISZERO);
    push2_dest(out, rng);
    out.push(JUMPI);
}

/// Balance bookkeeping shared by every token: debit then credit.
fn balance_motif(out: &mut Vec<u8>) {
    out.push(JUMPDEST);
    out.push(SLOAD);
    out.push(SUB);
    out.push(SSTORE);
    out.push(JUMPDEST);
    out.push(SLOAD);
    out.push(ADD);
    out.push(SSTORE);
}

/// Noise that keeps instances distinct without touching counted opcodes
/// beyond the cheap stack shuffles.
fn filler(out: &mut Vec<u8>, rng: &mut ChaCha8Rng, ops: usize) {
    for _ in 0..ops {
        match rng.gen_range(0..6u8) {
            0 => {
                out.push(PUSH1);
                out.push(imm(rng));
            }
            1 => out.push(DUP1),
            2 => out.push(SWAP1),
            3 => out.push(POP),
            4 => out.push(AND),
            _ => out.push(OR),
        }
    }
}

fn shape_digest(spec: &TokenSpec, seed: u64) -> u64 {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(serde_json::to_vec(&spec.traps).expect("trap config serializes"));
    h.update(serde_json::to_vec(&spec.placement).expect("placement serializes"));
    h.update(serde_json::to_vec(&spec.concealment).expect("concealment serializes"));
    let d = h.finalize();
    u64::from_le_bytes(d[..8].try_into().expect("digest is long enough"))
}

/// Deterministic runtime-bytecode stub for a token, as a `0x`-prefixed hex
/// string. Same trap shape and seed give byte-identical output.
pub fn bytecode_stub(spec: &TokenSpec, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(shape_digest(spec, seed));
    let mut out: Vec<u8> = Vec::with_capacity(512);

    // Solidity-style preamble: free-memory pointer then a callvalue bail-out.
    out.extend_from_slice(&[PUSH1, 0x0a, PUSH1, 0x0b, MSTORE]);
    out.push(CALLVALUE);
    out.push(DUP1);
    out.push(ISZERO);
    push2_dest(&mut out, &mut rng);
    out.push(JUMPI);

    // Dispatcher: one arm per externally callable function.
    let mut selectors = 5usize; // transfer, transferFrom, balanceOf, approve, renounceOwnership
    let t = &spec.traps;
    if t.permission.as_ref().is_some_and(|p| p.has_setter) {
        selectors += 1;
    }
    if t.suspension.as_ref().is_some_and(|s| s.has_setter) {
        selectors += 1;
    }
    if t.amount_limit.as_ref().is_some_and(|l| l.has_setter) {
        selectors += 1;
    }
    if t.fee.as_ref().is_some_and(|f| f.has_setter) {
        selectors += 1;
    }
    if t.callback.is_some() {
        selectors += 1;
    }
    for _ in 0..selectors {
        dispatcher_arm(&mut out, &mut rng);
    }

    {
        let n = rng.gen_range(8..24);
        filler(&mut out, &mut rng, n);
    }
    balance_motif(&mut out);

    // Trap motifs, repeated enough to dominate the histogram.
    let reps = |rng: &mut ChaCha8Rng| rng.gen_range(3..=6usize);
    if let Some(p) = &t.permission {
        let n = reps(&mut rng) + usize::from(matches!(p.list_kind, ListKind::Whitelist));
        for _ in 0..n {
            permission_motif(&mut out, &mut rng);
            {
                let n = rng.gen_range(2..8);
                filler(&mut out, &mut rng, n);
            }
        }
    }
    if t.suspension.is_some() {
        for _ in 0..reps(&mut rng) {
            suspension_motif(&mut out, &mut rng);
            {
                let n = rng.gen_range(2..8);
                filler(&mut out, &mut rng, n);
            }
        }
    }
    if t.amount_limit.is_some() {
        for _ in 0..reps(&mut rng) {
            limit_motif(&mut out, &mut rng);
            {
                let n = rng.gen_range(2..8);
                filler(&mut out, &mut rng, n);
            }
        }
    }
    if t.fee.is_some() {
        for _ in 0..reps(&mut rng) {
            fee_motif(&mut out, &mut rng);
            {
                let n = rng.gen_range(2..8);
                filler(&mut out, &mut rng, n);
            }
        }
    }
    if t.callback.is_some() {
        for _ in 0..reps(&mut rng) {
            callback_motif(&mut out, &mut rng);
            {
                let n = rng.gen_range(2..8);
                filler(&mut out, &mut rng, n);
            }
        }
    }

    {
        let n = rng.gen_range(8..24);
        filler(&mut out, &mut rng, n);
    }
    out.extend_from_slice(&[PUSH1, 0x0a, PUSH1, 0x0b, RETURN]);

    // Metadata-style tail: INVALID then a PUSH6 with a full immediate, the
    // shape real deployments leave behind.
    out.extend_from_slice(&[INVALID, 0xa1, 0x65, 0x62, 0x7a, 0x7a, 0x72, 0x30, 0x58]);

    let mut hex = String::with_capacity(2 + out.len() * 2);
    hex.push_str("0x");
    for b in &out {
        hex.push_str(&format!("{b:02x}"));
    }
    hex
}

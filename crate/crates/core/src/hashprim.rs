//! Toy sponge hash over a 64-bit state.
//!
//! This is a teaching-scale primitive, not a secure hash: 4 rounds of an
//! XOR/rotate/AND permutation over two 32-bit words, rate 32, capacity 32.
//! It exists because the signature schemes need a hash that can also be
//! compiled into a garbleable boolean circuit of a few thousand gates, so
//! the same function is implemented twice — natively here, and gate by
//! gate in [`sponge_circuit`] — and tests pin the two routes together.
//!
//! Inputs are length-framed: after absorbing the zero-padded message
//! blocks the bit length itself is absorbed as a final block, so inputs
//! of different lengths never collide trivially.

use crate::algebra::BitVector;
use crate::circuits::{BooleanCircuit, CircuitBuilder, Wire};

pub const SPONGE_RATE: usize = 32;
const ROUNDS: usize = 4;
const RC: [u32; ROUNDS] = [0x9E37_79B9, 0x7F4A_7C15, 0xF39C_C060, 0x85EB_CA6B];
const ROT: [u32; 4] = [5, 17, 9, 23];

fn round(s0: u32, s1: u32, rc: u32) -> (u32, u32) {
    let mut a = s0;
    let mut b = s1;
    a ^= b.rotate_left(ROT[0]);
    b ^= a.rotate_left(ROT[1]);
    a ^= a.rotate_left(ROT[2]) & b.rotate_left(ROT[3]);
    b ^= b.rotate_left(ROT[3]) & a.rotate_left(ROT[2]);
    a ^= rc;
    (b, a) // swap words between rounds
}

fn permute(s: &mut [u32; 2]) {
    for r in 0..ROUNDS {
        let (a, b) = round(s[0], s[1], RC[r]);
        s[0] = a;
        s[1] = b;
    }
}

fn block(input: &BitVector, b: usize) -> u32 {
    let mut w = 0u32;
    for k in 0..SPONGE_RATE {
        let i = b * SPONGE_RATE + k;
        if i < input.len() {
            w |= (input.get(i) as u32) << k;
        }
    }
    w
}

/// Hashes `input` to `out_bits` bits.
pub fn sponge_hash(input: &BitVector, out_bits: usize) -> BitVector {
    let mut s = [0u32; 2];
    let n_blocks = input.len().div_ceil(SPONGE_RATE);
    for b in 0..n_blocks {
        s[0] ^= block(input, b);
        permute(&mut s);
    }
    s[0] ^= input.len() as u32;
    permute(&mut s);

    let mut out = Vec::with_capacity(out_bits);
    loop {
        for k in 0..SPONGE_RATE {
            if out.len() == out_bits {
                return BitVector::from_bits(&out);
            }
            out.push(((s[0] >> k) & 1) as u8);
        }
        permute(&mut s);
    }
}

// --- circuit route ---

type WordWires = Vec<Wire>; // 32 wires, LSB first

fn rotl(w: &WordWires, k: u32) -> WordWires {
    (0..SPONGE_RATE)
        .map(|i| w[(i + SPONGE_RATE - k as usize) % SPONGE_RATE])
        .collect()
}

fn xor_words(b: &mut CircuitBuilder, x: &WordWires, y: &WordWires) -> WordWires {
    b.xor_vec(x, y)
}

fn xor_const(b: &mut CircuitBuilder, x: &WordWires, c: u32) -> WordWires {
    x.iter()
        .enumerate()
        .map(|(i, &w)| if (c >> i) & 1 == 1 { b.not(w) } else { w })
        .collect()
}

fn round_wires(b: &mut CircuitBuilder, s0: WordWires, s1: WordWires, rc: u32) -> (WordWires, WordWires) {
    let mut a = xor_words(b, &s0, &rotl(&s1, ROT[0]));
    let mut bw = xor_words(b, &s1, &rotl(&a, ROT[1]));
    let t: Vec<Wire> = {
        let ra = rotl(&a, ROT[2]);
        let rb = rotl(&bw, ROT[3]);
        ra.iter().zip(&rb).map(|(&x, &y)| b.and(x, y)).collect()
    };
    a = xor_words(b, &a, &t);
    let t: Vec<Wire> = {
        let rb = rotl(&bw, ROT[3]);
        let ra = rotl(&a, ROT[2]);
        rb.iter().zip(&ra).map(|(&x, &y)| b.and(x, y)).collect()
    };
    bw = xor_words(b, &bw, &t);
    a = xor_const(b, &a, rc);
    (bw, a)
}

fn permute_wires(b: &mut CircuitBuilder, s: &mut [WordWires; 2]) {
    for r in 0..ROUNDS {
        let (a, bw) = round_wires(b, s[0].clone(), s[1].clone(), RC[r]);
        s[0] = a;
        s[1] = bw;
    }
}

/// Appends the sponge computation to an existing builder: hashes the
/// `in_bits.len()` message wires down to `out_bits` output wires.
pub fn sponge_wires(b: &mut CircuitBuilder, msg: &[Wire], out_bits: usize) -> Vec<Wire> {
    let zero = b.constant(0);
    let mut s = [vec![zero; SPONGE_RATE], vec![zero; SPONGE_RATE]];
    let n_blocks = msg.len().div_ceil(SPONGE_RATE);
    for blk in 0..n_blocks {
        for k in 0..SPONGE_RATE {
            let i = blk * SPONGE_RATE + k;
            if i < msg.len() {
                s[0][k] = b.xor(s[0][k], msg[i]);
            }
        }
        permute_wires(b, &mut s);
    }
    s[0] = xor_const(b, &s[0], msg.len() as u32);
    permute_wires(b, &mut s);

    let mut out = Vec::with_capacity(out_bits);
    loop {
        for k in 0..SPONGE_RATE {
            if out.len() == out_bits {
                return out;
            }
            out.push(s[0][k]);
        }
        permute_wires(b, &mut s);
    }
}

/// Standalone hash circuit: `in_bits` inputs, `out_bits` outputs.
pub fn sponge_circuit(in_bits: u16, out_bits: usize) -> BooleanCircuit {
    let mut b = CircuitBuilder::new(in_bits);
    let msg = b.inputs();
    let out = sponge_wires(&mut b, &msg, out_bits);
    b.finish(out).unwrap()
}

//! Fixed-width binary encoding of circuits, so a circuit can be fed to
//! another circuit (or hashed, signed, encrypted) as a bit string.
//!
//! Layout, all fields little-endian bit order:
//!   16 bits  input count
//!   16 bits  gate count
//!   per gate: 3-bit opcode, two 16-bit wire refs (unused refs are 0)
//!   16 bits  output count
//!   per output: 16-bit wire ref
//!   zero padding up to the class width `w`
//!
//! A wire ref is the global wire index: input `j` is `j`, gate `i` is
//! `n_inputs + i`.

use super::{BooleanCircuit, CircuitError, Gate, GateOp, Wire};
use crate::algebra::BitVector;

/// Encoding parameters for a circuit class: every member is encoded into
/// exactly `width` bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CircuitEncoding {
    pub width: usize,
}

impl CircuitEncoding {
    pub fn new(width: usize) -> Self {
        CircuitEncoding { width }
    }

    pub fn encoded_len(c: &BooleanCircuit) -> usize {
        32 + c.gates.len() * 35 + 16 + c.outputs.len() * 16
    }
}

struct BitWriter {
    bits: Vec<u8>,
}

impl BitWriter {
    fn push(&mut self, value: u32, n: usize) {
        for k in 0..n {
            self.bits.push(((value >> k) & 1) as u8);
        }
    }
}

struct BitReader<'a> {
    bits: &'a BitVector,
    pos: usize,
}

impl BitReader<'_> {
    fn take(&mut self, n: usize) -> Result<u32, CircuitError> {
        if self.pos + n > self.bits.len() {
            return Err(CircuitError::Malformed("truncated".into()));
        }
        let mut v = 0u32;
        for k in 0..n {
            v |= (self.bits.get(self.pos + k) as u32) << k;
        }
        self.pos += n;
        Ok(v)
    }
}

fn wire_index(w: Wire, n_inputs: u16) -> u16 {
    match w {
        Wire::Input(j) => j,
        Wire::Gate(i) => n_inputs + i,
    }
}

fn wire_from_index(idx: u16, n_inputs: u16) -> Wire {
    if idx < n_inputs {
        Wire::Input(idx)
    } else {
        Wire::Gate(idx - n_inputs)
    }
}

pub fn encode_circuit(c: &BooleanCircuit, enc: CircuitEncoding) -> Result<BitVector, CircuitError> {
    let needed = CircuitEncoding::encoded_len(c);
    if needed > enc.width {
        return Err(CircuitError::ClassBound { needed, width: enc.width });
    }
    let mut w = BitWriter { bits: Vec::with_capacity(enc.width) };
    w.push(c.n_inputs as u32, 16);
    w.push(c.gates.len() as u32, 16);
    for g in &c.gates {
        w.push(g.op.code() as u32, 3);
        let a = if g.op.arity() >= 1 { wire_index(g.a, c.n_inputs) } else { 0 };
        let b = if g.op.arity() == 2 { wire_index(g.b, c.n_inputs) } else { 0 };
        w.push(a as u32, 16);
        w.push(b as u32, 16);
    }
    w.push(c.outputs.len() as u32, 16);
    for &o in &c.outputs {
        w.push(wire_index(o, c.n_inputs) as u32, 16);
    }
    w.bits.resize(enc.width, 0);
    Ok(BitVector::from_bits(&w.bits))
}

pub fn decode_circuit(bits: &BitVector, enc: CircuitEncoding) -> Result<BooleanCircuit, CircuitError> {
    if bits.len() != enc.width {
        return Err(CircuitError::Malformed(format!(
            "expected {} bits, got {}",
            enc.width,
            bits.len()
        )));
    }
    let mut r = BitReader { bits, pos: 0 };
    let n_inputs = r.take(16)? as u16;
    let n_gates = r.take(16)? as usize;
    let mut gates = Vec::with_capacity(n_gates);
    for _ in 0..n_gates {
        let op = GateOp::from_code(r.take(3)? as u8)
            .ok_or_else(|| CircuitError::Malformed("bad opcode".into()))?;
        let a = wire_from_index(r.take(16)? as u16, n_inputs);
        let b = wire_from_index(r.take(16)? as u16, n_inputs);
        let a = if op.arity() >= 1 { a } else { Wire::Input(0) };
        let b = if op.arity() == 2 { b } else { a };
        gates.push(Gate { op, a, b });
    }
    let n_outputs = r.take(16)? as usize;
    let mut outputs = Vec::with_capacity(n_outputs);
    for _ in 0..n_outputs {
        outputs.push(wire_from_index(r.take(16)? as u16, n_inputs));
    }
    for k in r.pos..bits.len() {
        if bits.get(k) != 0 {
            return Err(CircuitError::Malformed("nonzero padding".into()));
        }
    }
    BooleanCircuit::new(n_inputs, gates, outputs)
        .map_err(|e| CircuitError::Malformed(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::{fixtures, parse_circuit};

    const ENC: CircuitEncoding = CircuitEncoding { width: 256 };

    #[test]
    fn round_trip_fixtures() {
        for c in [fixtures::and2(), fixtures::xor2(), fixtures::not1(), fixtures::parity3()] {
            let bits = encode_circuit(&c, ENC).unwrap();
            assert_eq!(bits.len(), 256);
            assert_eq!(decode_circuit(&bits, ENC).unwrap(), c);
        }
    }

    #[test]
    fn header_layout_is_pinned() {
        // `in 2 / g0 = AND x0 x1 / out g0`: inputs=2, gates=1,
        // gate 0 = opcode 0 with refs (0, 1), one output at global wire 2.
        let c = fixtures::and2();
        let bits = encode_circuit(&c, ENC).unwrap();
        let field = |pos: usize, n: usize| -> u32 {
            (0..n).map(|k| (bits.get(pos + k) as u32) << k).sum()
        };
        assert_eq!(field(0, 16), 2); // n_inputs
        assert_eq!(field(16, 16), 1); // gate count
        assert_eq!(field(32, 3), 0); // AND opcode
        assert_eq!(field(35, 16), 0); // ref a = input 0
        assert_eq!(field(51, 16), 1); // ref b = input 1
        assert_eq!(field(67, 16), 1); // output count
        assert_eq!(field(83, 16), 2); // output ref = n_inputs + 0
    }

    #[test]
    fn oversized_circuit_is_rejected() {
        let big = fixtures::ripple_adder(8);
        let err = encode_circuit(&big, CircuitEncoding::new(64)).unwrap_err();
        assert!(matches!(err, CircuitError::ClassBound { .. }));
    }

    #[test]
    fn nonzero_padding_is_rejected() {
        let mut bits = encode_circuit(&fixtures::not1(), ENC).unwrap();
        bits.set(255, 1);
        assert!(matches!(decode_circuit(&bits, ENC), Err(CircuitError::Malformed(_))));
    }

    #[test]
    fn bad_opcode_is_rejected() {
        let mut bits = encode_circuit(&fixtures::and2(), ENC).unwrap();
        // Gate 0 opcode starts at bit 32; 0b111 = 7 is unused.
        bits.set(32, 1);
        bits.set(33, 1);
        bits.set(34, 1);
        assert!(matches!(decode_circuit(&bits, ENC), Err(CircuitError::Malformed(_))));
    }

    #[test]
    fn decode_checks_wire_ordering() {
        // Forge a gate whose operand refers to itself (global wire 1 with
        // one input: gate 0 reading gate 0).
        let src = "in 1\ng0 = NOT x0\nout g0";
        let mut bits = encode_circuit(&parse_circuit(src).unwrap(), ENC).unwrap();
        bits.set(35, 1); // ref a: 0 -> 1
        assert!(decode_circuit(&bits, ENC).is_err());
    }

    #[test]
    fn unary_and_const_refs_are_canonical() {
        // CONST gates must encode operand refs as zero so equal circuits
        // have equal encodings.
        let c = parse_circuit("in 1\ng0 = CONST1\ng1 = XOR g0 x0\nout g1").unwrap();
        let bits = encode_circuit(&c, ENC).unwrap();
        let field = |pos: usize, n: usize| -> u32 {
            (0..n).map(|k| (bits.get(pos + k) as u32) << k).sum()
        };
        assert_eq!(field(35, 16), 0);
        assert_eq!(field(51, 16), 0);
        assert_eq!(decode_circuit(&bits, ENC).unwrap(), c);
    }
}

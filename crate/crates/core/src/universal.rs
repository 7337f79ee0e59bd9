//! Circuit-level building blocks for programs that must run *inside* a
//! garbled circuit: GF(2^l) arithmetic as gates, polynomial evaluation,
//! and a universal evaluator that executes an encoded circuit supplied
//! as input bits.
//!
//! The universal evaluator works over a *class*: a fixed input count,
//! exact gate count, and exact output count, so every field of the
//! binary encoding sits at a known bit position. Members with fewer
//! gates are padded with constant gates first (see [`pad_to_class`]).

use crate::algebra::{F2kElement, Field};
use crate::circuits::{
    encode_circuit, BooleanCircuit, CircuitBuilder, CircuitEncoding, CircuitError, Gate, GateOp,
    Wire,
};

/// Carry-less multiply of two dynamic field elements followed by modular
/// reduction; returns the `l` product wires.
pub fn gf_mul_wires(b: &mut CircuitBuilder, x: &[Wire], y: &[Wire], field: Field) -> Vec<Wire> {
    let l = field.degree() as usize;
    assert_eq!(x.len(), l);
    assert_eq!(y.len(), l);
    // schoolbook carry-less product, degree 2l-2
    let mut prod: Vec<Option<Wire>> = vec![None; 2 * l - 1];
    for i in 0..l {
        for j in 0..l {
            let t = b.and(x[i], y[j]);
            prod[i + j] = Some(match prod[i + j] {
                None => t,
                Some(p) => b.xor(p, t),
            });
        }
    }
    let mut prod: Vec<Wire> = prod.into_iter().map(Option::unwrap).collect();
    // fold high terms down through the modulus
    for k in (l..2 * l - 1).rev() {
        let hi = prod[k];
        for t in 0..l {
            if (field.modulus() >> t) & 1 == 1 {
                prod[k - l + t] = b.xor(prod[k - l + t], hi);
            }
        }
    }
    prod.truncate(l);
    prod
}

/// XOR a constant field element into dynamic wires.
pub fn gf_add_const_wires(b: &mut CircuitBuilder, x: &[Wire], c: &F2kElement) -> Vec<Wire> {
    x.iter()
        .enumerate()
        .map(|(i, &w)| if (c.value() >> i) & 1 == 1 { b.not(w) } else { w })
        .collect()
}

/// Horner evaluation of a constant-coefficient polynomial at a dynamic
/// point. `coeffs[j]` multiplies `x^j`.
pub fn poly_eval_wires(
    b: &mut CircuitBuilder,
    x: &[Wire],
    coeffs: &[F2kElement],
    field: Field,
) -> Vec<Wire> {
    let l = field.degree() as usize;
    let zero = b.constant(0);
    let mut acc = vec![zero; l];
    for c in coeffs.iter().rev() {
        acc = gf_mul_wires(b, &acc, x, field);
        acc = gf_add_const_wires(b, &acc, c);
    }
    acc
}

/// The circuit class a universal evaluator is specialized to: exact
/// header values and total encoding width.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ClassSpec {
    pub n_inputs: u16,
    pub gates: usize,
    pub n_outputs: usize,
    pub width: usize,
}

impl ClassSpec {
    pub fn encoding(&self) -> CircuitEncoding {
        CircuitEncoding::new(self.width)
    }

    /// Bits actually used by a member encoding (the rest must be zero).
    pub fn used_bits(&self) -> usize {
        32 + self.gates * 35 + 16 + self.n_outputs * 16
    }

    pub fn fits(&self) -> bool {
        self.used_bits() <= self.width
    }
}

/// Pads a circuit to the class's exact gate count by appending constant
/// gates (which nothing references), then checks the header shape.
pub fn pad_to_class(c: &BooleanCircuit, spec: &ClassSpec) -> Result<BooleanCircuit, CircuitError> {
    if c.n_inputs != spec.n_inputs {
        return Err(CircuitError::Invalid(format!(
            "class takes {} inputs, circuit has {}",
            spec.n_inputs, c.n_inputs
        )));
    }
    if c.outputs.len() != spec.n_outputs {
        return Err(CircuitError::Invalid(format!(
            "class has {} outputs, circuit has {}",
            spec.n_outputs,
            c.outputs.len()
        )));
    }
    if c.gates.len() > spec.gates {
        return Err(CircuitError::ClassBound {
            needed: c.gates.len(),
            width: spec.gates,
        });
    }
    let mut gates = c.gates.clone();
    while gates.len() < spec.gates {
        gates.push(Gate { op: GateOp::Const0, a: Wire::Input(0), b: Wire::Input(0) });
    }
    BooleanCircuit::new(c.n_inputs, gates, c.outputs.clone())
}

/// Encodes a circuit for the class (pad, then fixed-width encode).
pub fn encode_for_class(
    c: &BooleanCircuit,
    spec: &ClassSpec,
) -> Result<crate::algebra::BitVector, CircuitError> {
    let padded = pad_to_class(c, spec)?;
    encode_circuit(&padded, spec.encoding())
}

fn take_field(enc: &[Wire], pos: usize, n: usize) -> &[Wire] {
    &enc[pos..pos + n]
}

/// Selects `wires[index]` where `index` arrives as little-endian bits;
/// out-of-range indices select constant 0.
fn select_wire(b: &mut CircuitBuilder, index_bits: &[Wire], wires: &[Wire]) -> Wire {
    let mut acc: Option<Wire> = None;
    for (w_idx, &val) in wires.iter().enumerate() {
        let idx_bits: Vec<u8> = (0..index_bits.len()).map(|k| ((w_idx >> k) & 1) as u8).collect();
        let hit = b.eq_const(index_bits, &idx_bits);
        let term = b.and(hit, val);
        acc = Some(match acc {
            None => term,
            Some(a) => b.xor(a, term),
        });
    }
    acc.unwrap_or_else(|| b.constant(0))
}

/// Appends a universal evaluation of the encoded circuit `enc` (laid out
/// per [`ClassSpec`]) on the dynamic input wires `x`. Returns
/// `(ok, outputs)`: `ok` is 1 iff the encoding is a well-formed class
/// member (header fields match, opcodes valid, padding zero); the
/// outputs are only meaningful when `ok` is 1.
pub fn universal_eval_wires(
    b: &mut CircuitBuilder,
    enc: &[Wire],
    x: &[Wire],
    spec: &ClassSpec,
) -> (Wire, Vec<Wire>) {
    assert_eq!(enc.len(), spec.width, "encoding width mismatch");
    assert_eq!(x.len(), spec.n_inputs as usize, "input width mismatch");
    assert!(spec.fits(), "class does not fit its width");

    let u16_bits = |v: usize| -> Vec<u8> { (0..16).map(|k| ((v >> k) & 1) as u8).collect() };

    // header checks
    let mut checks = Vec::new();
    checks.push(b.eq_const(take_field(enc, 0, 16), &u16_bits(spec.n_inputs as usize)));
    checks.push(b.eq_const(take_field(enc, 16, 16), &u16_bits(spec.gates)));
    let out_count_pos = 32 + spec.gates * 35;
    checks.push(b.eq_const(take_field(enc, out_count_pos, 16), &u16_bits(spec.n_outputs)));
    // trailing padding must be zero
    for k in spec.used_bits()..spec.width {
        checks.push(b.not(enc[k]));
    }

    // evaluate gate slots in order
    let mut values: Vec<Wire> = x.to_vec();
    for gi in 0..spec.gates {
        let base = 32 + gi * 35;
        let op = take_field(enc, base, 3).to_vec();
        let ref_a = take_field(enc, base + 3, 16).to_vec();
        let ref_b = take_field(enc, base + 19, 16).to_vec();

        // opcode < 5: invalid iff bit2 & (bit1 | bit0)
        let lo = b.or(op[1], op[0]);
        let bad = b.and(op[2], lo);
        checks.push(b.not(bad));

        let a_val = select_wire(b, &ref_a, &values);
        let b_val = select_wire(b, &ref_b, &values);

        let and_v = b.and(a_val, b_val);
        let xor_v = b.xor(a_val, b_val);
        let not_v = b.not(a_val);
        let one_v = b.constant(1);
        // one-hot opcode selectors; a constant-0 gate contributes nothing
        let results = [Some(and_v), Some(xor_v), Some(not_v), None, Some(one_v)];
        let mut out: Option<Wire> = None;
        for (code, res) in results.iter().enumerate() {
            let Some(res) = *res else { continue };
            let code_bits: Vec<u8> = (0..3).map(|k| ((code >> k) & 1) as u8).collect();
            let sel = b.eq_const(&op, &code_bits);
            let term = b.and(sel, res);
            out = Some(match out {
                None => term,
                Some(o) => b.xor(o, term),
            });
        }
        values.push(out.expect("at least one opcode branch"));
    }

    // output selection
    let outs: Vec<Wire> = (0..spec.n_outputs)
        .map(|k| {
            let pos = out_count_pos + 16 + k * 16;
            let ref_bits = take_field(enc, pos, 16).to_vec();
            select_wire(b, &ref_bits, &values)
        })
        .collect();

    (b.and_all(&checks), outs)
}

/// Standalone universal circuit: inputs are `width` encoding bits then
/// `n_inputs` data bits; outputs are the ok flag then the class outputs.
pub fn universal_circuit(spec: &ClassSpec) -> BooleanCircuit {
    let total = spec.width + spec.n_inputs as usize;
    let mut b = CircuitBuilder::new(total as u16);
    let wires = b.inputs();
    let (enc, x) = wires.split_at(spec.width);
    let (ok, outs) = universal_eval_wires(&mut b, enc, x, spec);
    let mut outputs = vec![ok];
    outputs.extend(outs);
    b.finish(outputs).unwrap()
}

//! Yao garbling with point-and-permute row selection, plus the
//! selective-security simulator.
//!
//! Gate cipher: `Enc_{A,B}(msg) = PRF(A ∥ B ∥ gate_id) ⊕ (msg ∥ 0^tag)`,
//! with the PRF instantiated from the sponge hash. The all-zero tag lets
//! the evaluator authenticate the single row selected by the input
//! labels' select bits; a wrong row survives with probability 2^-tag.
//!
//! No free-XOR or half-gates: every binary gate carries four rows, NOT
//! gates two, constant gates the active label in the clear.

use crate::algebra::BitVector;
use crate::circuits::{BooleanCircuit, GateOp, Wire};
use crate::hashprim::sponge_hash;
use rand::RngCore;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GarbleError {
    #[error("invalid labels")]
    InvalidLabels,
    #[error("shape: {0}")]
    Shape(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GarbleParams {
    /// Wire-label length in bits (select bit included).
    pub label_bits: usize,
    /// Authentication-tag length appended inside each row.
    pub tag_bits: usize,
}

impl Default for GarbleParams {
    fn default() -> Self {
        GarbleParams { label_bits: 128, tag_bits: 32 }
    }
}

/// A wire label; the final bit doubles as the point-and-permute select
/// bit, so a label is exactly `label_bits` long on the wire.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct WireLabel(pub BitVector);

impl WireLabel {
    pub fn select(&self) -> u8 {
        self.0.get(self.0.len() - 1)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.len() == 0
    }

    fn random_with_select(bits: usize, select: u8, rng: &mut dyn RngCore) -> WireLabel {
        let mut v = BitVector::random(bits, rng);
        v.set(bits - 1, select);
        WireLabel(v)
    }
}

/// Label pair for one wire, indexed by the plaintext bit.
#[derive(Clone, Debug)]
pub struct LabelPair(pub [WireLabel; 2]);

impl LabelPair {
    fn random(bits: usize, rng: &mut dyn RngCore) -> LabelPair {
        let p = (rng.next_u32() & 1) as u8;
        LabelPair([
            WireLabel::random_with_select(bits, p, rng),
            WireLabel::random_with_select(bits, 1 - p, rng),
        ])
    }

    /// The label whose select bit is `s`.
    fn by_select(&self, s: u8) -> (&WireLabel, u8) {
        if self.0[0].select() == s {
            (&self.0[0], 0)
        } else {
            (&self.0[1], 1)
        }
    }
}

/// Garbled-input key: one label pair per input wire.
#[derive(Clone, Debug)]
pub struct GarbleKey {
    pub pairs: Vec<LabelPair>,
}

impl GarbleKey {
    /// The label encoding input bit `b` on wire `i`.
    pub fn ginput(&self, i: usize, b: u8) -> Result<WireLabel, GarbleError> {
        self.pairs
            .get(i)
            .map(|p| p.0[b as usize].clone())
            .ok_or_else(|| GarbleError::Shape(format!("input wire {i} out of range")))
    }

    /// Labels for a full input assignment.
    pub fn ginput_all(&self, x: &BitVector) -> Result<Vec<WireLabel>, GarbleError> {
        if x.len() != self.pairs.len() {
            return Err(GarbleError::Shape(format!(
                "expected {} input bits, got {}",
                self.pairs.len(),
                x.len()
            )));
        }
        (0..x.len()).map(|i| self.ginput(i, x.get(i))).collect()
    }
}

/// Circuit topology: everything garbling leaks. Gate operations are kept
/// only as arities; the wiring and output list are public.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Topology {
    pub n_inputs: u16,
    pub gates: Vec<(usize, Wire, Wire)>, // (arity, a, b)
    pub outputs: Vec<Wire>,
}

impl Topology {
    pub fn of(c: &BooleanCircuit) -> Topology {
        Topology {
            n_inputs: c.n_inputs,
            gates: c.gates.iter().map(|g| (g.op.arity(), g.a, g.b)).collect(),
            outputs: c.outputs.clone(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct GarbledCircuit {
    pub top: Topology,
    /// Per gate: 4 rows (binary), 2 rows (unary) or 1 plain label (arity
    /// 0), each row `label_bits + tag_bits` long except plain labels.
    pub tables: Vec<Vec<BitVector>>,
    /// Per output wire: the labels decoding to 0 and to 1.
    pub decode: Vec<[WireLabel; 2]>,
    pub params: GarbleParams,
}

fn prf(a: &WireLabel, b: &WireLabel, gate_id: u32, out_bits: usize) -> BitVector {
    let gid = BitVector::from_u128(gate_id as u128, 32);
    let input = a.0.concat(&b.0).concat(&gid);
    sponge_hash(&input, out_bits)
}

fn enc_row(
    a: &WireLabel,
    b: &WireLabel,
    gate_id: u32,
    msg: &WireLabel,
    params: GarbleParams,
) -> BitVector {
    let pad = prf(a, b, gate_id, params.label_bits + params.tag_bits);
    let pt = msg.0.concat(&BitVector::zeros(params.tag_bits));
    pad.xor(&pt)
}

fn dec_row(
    a: &WireLabel,
    b: &WireLabel,
    gate_id: u32,
    row: &BitVector,
    params: GarbleParams,
) -> Result<WireLabel, GarbleError> {
    let pad = prf(a, b, gate_id, params.label_bits + params.tag_bits);
    let pt = row.xor(&pad);
    for k in params.label_bits..params.label_bits + params.tag_bits {
        if pt.get(k) != 0 {
            return Err(GarbleError::InvalidLabels);
        }
    }
    Ok(WireLabel(pt.slice(0..params.label_bits)))
}

fn gate_truth(op: GateOp, a: u8, b: u8) -> u8 {
    match op {
        GateOp::And => a & b,
        GateOp::Xor => a ^ b,
        GateOp::Not => 1 - a,
        GateOp::Const0 => 0,
        GateOp::Const1 => 1,
    }
}

/// Garbles a circuit: returns the tables plus the input-label key.
pub fn gcircuit(
    c: &BooleanCircuit,
    params: GarbleParams,
    rng: &mut dyn RngCore,
) -> (GarbledCircuit, GarbleKey) {
    let n_in = c.n_inputs as usize;
    let mut wire_pairs: Vec<LabelPair> = (0..n_in + c.gates.len())
        .map(|_| LabelPair::random(params.label_bits, rng))
        .collect();
    // constant gates get a degenerate pair so the plain label leaks
    // nothing about any other wire
    let pair_of = |pairs: &[LabelPair], w: Wire| -> LabelPair {
        match w {
            Wire::Input(j) => pairs[j as usize].clone(),
            Wire::Gate(i) => pairs[n_in + i as usize].clone(),
        }
    };

    let mut tables = Vec::with_capacity(c.gates.len());
    for (gi, g) in c.gates.iter().enumerate() {
        let out_pair = wire_pairs[n_in + gi].clone();
        let gate_id = gi as u32;
        let rows = match g.op.arity() {
            2 => {
                let pa = pair_of(&wire_pairs, g.a);
                let pb = pair_of(&wire_pairs, g.b);
                (0..4u8)
                    .map(|row| {
                        let (la, va) = pa.by_select(row >> 1);
                        let (lb, vb) = pb.by_select(row & 1);
                        let out = &out_pair.0[gate_truth(g.op, va, vb) as usize];
                        enc_row(la, lb, gate_id, out, params)
                    })
                    .collect()
            }
            1 => {
                let pa = pair_of(&wire_pairs, g.a);
                (0..2u8)
                    .map(|row| {
                        let (la, va) = pa.by_select(row);
                        let out = &out_pair.0[gate_truth(g.op, va, 0) as usize];
                        enc_row(la, la, gate_id, out, params)
                    })
                    .collect()
            }
            _ => {
                let bit = gate_truth(g.op, 0, 0);
                vec![out_pair.0[bit as usize].0.clone()]
            }
        };
        tables.push(rows);
        wire_pairs[n_in + gi] = out_pair;
    }

    let decode = c
        .outputs
        .iter()
        .map(|&w| {
            let p = pair_of(&wire_pairs, w);
            [p.0[0].clone(), p.0[1].clone()]
        })
        .collect();

    let gc = GarbledCircuit { top: Topology::of(c), tables, decode, params };
    let key = GarbleKey { pairs: wire_pairs[..n_in].to_vec() };
    (gc, key)
}

/// Evaluates a garbled circuit on one label per input wire.
pub fn geval(gc: &GarbledCircuit, labels: &[WireLabel]) -> Result<BitVector, GarbleError> {
    let n_in = gc.top.n_inputs as usize;
    if labels.len() != n_in {
        return Err(GarbleError::Shape(format!(
            "expected {n_in} labels, got {}",
            labels.len()
        )));
    }
    for l in labels {
        if l.len() != gc.params.label_bits {
            return Err(GarbleError::Shape("label length mismatch".into()));
        }
    }
    let mut active: Vec<WireLabel> = Vec::with_capacity(gc.top.gates.len());
    let read = |active: &[WireLabel], w: Wire| -> WireLabel {
        match w {
            Wire::Input(j) => labels[j as usize].clone(),
            Wire::Gate(i) => active[i as usize].clone(),
        }
    };
    for (gi, &(arity, a, b)) in gc.top.gates.iter().enumerate() {
        let rows = &gc.tables[gi];
        let out = match arity {
            2 => {
                let la = read(&active, a);
                let lb = read(&active, b);
                let row = ((la.select() << 1) | lb.select()) as usize;
                dec_row(&la, &lb, gi as u32, &rows[row], gc.params)?
            }
            1 => {
                let la = read(&active, a);
                dec_row(&la, &la, gi as u32, &rows[la.select() as usize], gc.params)?
            }
            _ => WireLabel(rows[0].clone()),
        };
        active.push(out);
    }
    let mut out = BitVector::zeros(gc.top.outputs.len());
    for (k, &w) in gc.top.outputs.iter().enumerate() {
        let l = read(&active, w);
        let [l0, l1] = &gc.decode[k];
        if l == *l0 {
            out.set(k, 0);
        } else if l == *l1 {
            out.set(k, 1);
        } else {
            return Err(GarbleError::InvalidLabels);
        }
    }
    Ok(out)
}

/// Selective-security simulator: given only the input length, the output
/// `y`, and the topology, fabricates labels and a garbled circuit on
/// which `geval` returns `y`. Only the active path is real; inactive
/// rows are uniform noise.
pub fn gsimulate(
    n_inputs: usize,
    y: &BitVector,
    top: &Topology,
    params: GarbleParams,
    rng: &mut dyn RngCore,
) -> (Vec<WireLabel>, GarbledCircuit) {
    assert_eq!(n_inputs, top.n_inputs as usize);
    assert_eq!(y.len(), top.outputs.len());
    let n_in = n_inputs;
    let active: Vec<WireLabel> = (0..n_in + top.gates.len())
        .map(|_| WireLabel(BitVector::random(params.label_bits, rng)))
        .collect();

    let read = |active: &[WireLabel], w: Wire| -> WireLabel {
        match w {
            Wire::Input(j) => active[j as usize].clone(),
            Wire::Gate(i) => active[n_in + i as usize].clone(),
        }
    };

    let row_len = params.label_bits + params.tag_bits;
    let mut tables = Vec::with_capacity(top.gates.len());
    for (gi, &(arity, a, b)) in top.gates.iter().enumerate() {
        let out = active[n_in + gi].clone();
        let rows = match arity {
            2 => {
                let la = read(&active, a);
                let lb = read(&active, b);
                let hot = ((la.select() << 1) | lb.select()) as usize;
                (0..4)
                    .map(|r| {
                        if r == hot {
                            enc_row(&la, &lb, gi as u32, &out, params)
                        } else {
                            BitVector::random(row_len, rng)
                        }
                    })
                    .collect()
            }
            1 => {
                let la = read(&active, a);
                let hot = la.select() as usize;
                (0..2)
                    .map(|r| {
                        if r == hot {
                            enc_row(&la, &la, gi as u32, &out, params)
                        } else {
                            BitVector::random(row_len, rng)
                        }
                    })
                    .collect()
            }
            _ => vec![out.0.clone()],
        };
        tables.push(rows);
    }

    let decode = top
        .outputs
        .iter()
        .enumerate()
        .map(|(k, &w)| {
            let real = read(&active, w);
            let fake = WireLabel::random_with_select(params.label_bits, 1 - real.select(), rng);
            // decode slot y_k holds the active label
            if y.get(k) == 1 {
                [fake, real]
            } else {
                [real, fake]
            }
        })
        .collect();

    let gc = GarbledCircuit {
        top: top.clone(),
        tables,
        decode,
        params,
    };
    let labels = active[..n_in].to_vec();
    (labels, gc)
}

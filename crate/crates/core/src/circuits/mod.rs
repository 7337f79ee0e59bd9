//! Boolean-circuit intermediate representation, textual format,
//! evaluator, and fixed-length binary encoding.

mod builder;
mod encode;
pub mod fixtures;
mod parse;

pub use builder::CircuitBuilder;
pub use encode::{decode_circuit, encode_circuit, CircuitEncoding};
pub use parse::{emit_circuit, parse_circuit};

use crate::algebra::BitVector;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CircuitError {
    #[error("syntax error at line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("undefined wire {0}")]
    UndefinedWire(String),
    #[error("shape: circuit takes {expected} inputs, got {got}")]
    Shape { expected: usize, got: usize },
    #[error("class bound exceeded: encoding needs {needed} bits, class width is {width}")]
    ClassBound { needed: usize, width: usize },
    #[error("malformed encoding: {0}")]
    Malformed(String),
    #[error("invalid circuit: {0}")]
    Invalid(String),
}

/// Gate operations. A complete, garbling-friendly basis: Yao tables need
/// at most binary gates and constants fold into labels.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash, Serialize, Deserialize)]
pub enum GateOp {
    And,
    Xor,
    Not,
    Const0,
    Const1,
}

impl GateOp {
    pub fn code(self) -> u8 {
        match self {
            GateOp::And => 0,
            GateOp::Xor => 1,
            GateOp::Not => 2,
            GateOp::Const0 => 3,
            GateOp::Const1 => 4,
        }
    }

    pub fn from_code(code: u8) -> Option<GateOp> {
        Some(match code {
            0 => GateOp::And,
            1 => GateOp::Xor,
            2 => GateOp::Not,
            3 => GateOp::Const0,
            4 => GateOp::Const1,
            _ => return None,
        })
    }

    pub fn arity(self) -> usize {
        match self {
            GateOp::And | GateOp::Xor => 2,
            GateOp::Not => 1,
            GateOp::Const0 | GateOp::Const1 => 0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GateOp::And => "AND",
            GateOp::Xor => "XOR",
            GateOp::Not => "NOT",
            GateOp::Const0 => "CONST0",
            GateOp::Const1 => "CONST1",
        }
    }
}

/// Reference to a circuit input or an earlier gate's output.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash, Serialize, Deserialize)]
pub enum Wire {
    Input(u16),
    Gate(u16),
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash, Serialize, Deserialize)]
pub struct Gate {
    pub op: GateOp,
    pub a: Wire,
    pub b: Wire,
}

/// A topologically ordered boolean circuit. Every gate input refers to a
/// circuit input or an earlier gate, so the structure is acyclic by
/// construction; `validate` enforces it.
#[derive(Clone, PartialEq, Eq, Debug, Hash, Serialize, Deserialize)]
pub struct BooleanCircuit {
    pub n_inputs: u16,
    pub gates: Vec<Gate>,
    pub outputs: Vec<Wire>,
}

impl BooleanCircuit {
    pub fn new(n_inputs: u16, gates: Vec<Gate>, outputs: Vec<Wire>) -> Result<Self, CircuitError> {
        let c = BooleanCircuit { n_inputs, gates, outputs };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), CircuitError> {
        let check = |w: Wire, gate_idx: usize| -> Result<(), CircuitError> {
            match w {
                Wire::Input(j) if (j as usize) < self.n_inputs as usize => Ok(()),
                Wire::Gate(i) if (i as usize) < gate_idx => Ok(()),
                _ => Err(CircuitError::Invalid(format!(
                    "wire {w:?} not defined before gate {gate_idx}"
                ))),
            }
        };
        for (i, g) in self.gates.iter().enumerate() {
            if g.op.arity() >= 1 {
                check(g.a, i)?;
            }
            if g.op.arity() == 2 {
                check(g.b, i)?;
            }
        }
        if self.outputs.is_empty() {
            return Err(CircuitError::Invalid("no outputs".into()));
        }
        for &w in &self.outputs {
            check(w, self.gates.len())?;
        }
        Ok(())
    }

    pub fn n_outputs(&self) -> usize {
        self.outputs.len()
    }

    /// Deterministic gate-by-gate evaluation.
    pub fn eval(&self, x: &BitVector) -> Result<BitVector, CircuitError> {
        if x.len() != self.n_inputs as usize {
            return Err(CircuitError::Shape { expected: self.n_inputs as usize, got: x.len() });
        }
        let mut values = vec![0u8; self.gates.len()];
        let read = |values: &[u8], w: Wire| match w {
            Wire::Input(j) => x.get(j as usize),
            Wire::Gate(i) => values[i as usize],
        };
        for (i, g) in self.gates.iter().enumerate() {
            values[i] = match g.op {
                GateOp::And => read(&values, g.a) & read(&values, g.b),
                GateOp::Xor => read(&values, g.a) ^ read(&values, g.b),
                GateOp::Not => 1 - read(&values, g.a),
                GateOp::Const0 => 0,
                GateOp::Const1 => 1,
            };
        }
        Ok(BitVector::from_fn(self.outputs.len(), |k| {
            read(&values, self.outputs[k])
        }))
    }
}

/// Convenience alias used throughout tests and the harness.
pub fn eval_circuit(c: &BooleanCircuit, x: &BitVector) -> Result<BitVector, CircuitError> {
    c.eval(x)
}

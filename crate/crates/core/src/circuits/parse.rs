//! Text format for circuits:
//!
//! ```text
//! # comment
//! in 3
//! g0 = AND x0 x1
//! g1 = XOR g0 x2
//! out g1
//! ```
//!
//! Inputs are `x<j>`, gates are `g<i>` and must be defined in order.
//! `out` lists one or more wires and must come last.

use super::{BooleanCircuit, CircuitError, Gate, GateOp, Wire};

fn parse_wire(tok: &str, line: usize) -> Result<Wire, CircuitError> {
    let err = || CircuitError::Syntax { line, msg: format!("bad wire `{tok}`") };
    if let Some(rest) = tok.strip_prefix('x') {
        rest.parse::<u16>().map(Wire::Input).map_err(|_| err())
    } else if let Some(rest) = tok.strip_prefix('g') {
        rest.parse::<u16>().map(Wire::Gate).map_err(|_| err())
    } else {
        Err(err())
    }
}

pub fn parse_circuit(text: &str) -> Result<BooleanCircuit, CircuitError> {
    let mut n_inputs: Option<u16> = None;
    let mut gates: Vec<Gate> = Vec::new();
    let mut outputs: Vec<Wire> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let stripped = raw.split('#').next().unwrap_or("").trim();
        if stripped.is_empty() {
            continue;
        }
        let syn = |msg: &str| CircuitError::Syntax { line, msg: msg.to_string() };
        if !outputs.is_empty() {
            return Err(syn("statement after `out`"));
        }
        let toks: Vec<&str> = stripped.split_whitespace().collect();
        match toks[0] {
            "in" => {
                if n_inputs.is_some() {
                    return Err(syn("duplicate `in`"));
                }
                if toks.len() != 2 {
                    return Err(syn("expected `in <k>`"));
                }
                let k = toks[1].parse::<u16>().map_err(|_| syn("bad input count"))?;
                n_inputs = Some(k);
            }
            "out" => {
                if toks.len() < 2 {
                    return Err(syn("expected `out <wire> [...]`"));
                }
                for tok in &toks[1..] {
                    outputs.push(parse_wire(tok, line)?);
                }
            }
            name if name.starts_with('g') => {
                let i = name[1..]
                    .parse::<usize>()
                    .map_err(|_| syn("bad gate name"))?;
                if i != gates.len() {
                    return Err(syn(&format!("expected g{}, found {name}", gates.len())));
                }
                if toks.len() < 3 || toks[1] != "=" {
                    return Err(syn("expected `g<i> = <OP> <wire> [<wire>]`"));
                }
                let op = match toks[2] {
                    "AND" => GateOp::And,
                    "XOR" => GateOp::Xor,
                    "NOT" => GateOp::Not,
                    "CONST0" => GateOp::Const0,
                    "CONST1" => GateOp::Const1,
                    other => return Err(syn(&format!("unknown op `{other}`"))),
                };
                if toks.len() != 3 + op.arity() {
                    return Err(syn(&format!("{} takes {} operand(s)", op.name(), op.arity())));
                }
                let a = if op.arity() >= 1 { parse_wire(toks[3], line)? } else { Wire::Input(0) };
                let b = if op.arity() == 2 { parse_wire(toks[4], line)? } else { a };
                gates.push(Gate { op, a, b });
            }
            other => return Err(syn(&format!("unknown statement `{other}`"))),
        }
    }

    let n_inputs = n_inputs.ok_or(CircuitError::Syntax { line: 0, msg: "missing `in`".into() })?;
    BooleanCircuit::new(n_inputs, gates, outputs)
}

fn wire_name(w: Wire) -> String {
    match w {
        Wire::Input(j) => format!("x{j}"),
        Wire::Gate(i) => format!("g{i}"),
    }
}

pub fn emit_circuit(c: &BooleanCircuit) -> String {
    let mut s = format!("in {}\n", c.n_inputs);
    for (i, g) in c.gates.iter().enumerate() {
        match g.op.arity() {
            2 => s += &format!("g{i} = {} {} {}\n", g.op.name(), wire_name(g.a), wire_name(g.b)),
            1 => s += &format!("g{i} = {} {}\n", g.op.name(), wire_name(g.a)),
            _ => s += &format!("g{i} = {}\n", g.op.name()),
        }
    }
    s += "out";
    for &w in &c.outputs {
        s += " ";
        s += &wire_name(w);
    }
    s += "\n";
    s
}

//! Incremental circuit construction. Higher-level components (the sponge
//! hash, field multipliers, the universal evaluator) compose circuits gate
//! by gate through this builder rather than writing text.

use super::{BooleanCircuit, CircuitError, Gate, GateOp, Wire};

pub struct CircuitBuilder {
    n_inputs: u16,
    gates: Vec<Gate>,
}

impl CircuitBuilder {
    pub fn new(n_inputs: u16) -> Self {
        CircuitBuilder { n_inputs, gates: Vec::new() }
    }

    pub fn input(&self, j: u16) -> Wire {
        assert!(j < self.n_inputs, "input {j} out of range");
        Wire::Input(j)
    }

    pub fn inputs(&self) -> Vec<Wire> {
        (0..self.n_inputs).map(Wire::Input).collect()
    }

    fn push(&mut self, op: GateOp, a: Wire, b: Wire) -> Wire {
        let i = u16::try_from(self.gates.len()).expect("gate count overflow");
        self.gates.push(Gate { op, a, b });
        Wire::Gate(i)
    }

    pub fn and(&mut self, a: Wire, b: Wire) -> Wire {
        self.push(GateOp::And, a, b)
    }

    pub fn xor(&mut self, a: Wire, b: Wire) -> Wire {
        self.push(GateOp::Xor, a, b)
    }

    pub fn not(&mut self, a: Wire) -> Wire {
        self.push(GateOp::Not, a, a)
    }

    pub fn constant(&mut self, bit: u8) -> Wire {
        let op = if bit == 0 { GateOp::Const0 } else { GateOp::Const1 };
        let a = Wire::Input(0);
        self.push(op, a, a)
    }

    pub fn or(&mut self, a: Wire, b: Wire) -> Wire {
        // a OR b = NOT(NOT a AND NOT b)
        let na = self.not(a);
        let nb = self.not(b);
        let n = self.and(na, nb);
        self.not(n)
    }

    /// `sel ? t : f`, one bit.
    pub fn mux(&mut self, sel: Wire, t: Wire, f: Wire) -> Wire {
        // f XOR (sel AND (t XOR f))
        let d = self.xor(t, f);
        let g = self.and(sel, d);
        self.xor(f, g)
    }

    /// Bitwise mux over equal-length vectors.
    pub fn mux_vec(&mut self, sel: Wire, t: &[Wire], f: &[Wire]) -> Vec<Wire> {
        assert_eq!(t.len(), f.len());
        t.iter().zip(f).map(|(&ti, &fi)| self.mux(sel, ti, fi)).collect()
    }

    pub fn xor_vec(&mut self, a: &[Wire], b: &[Wire]) -> Vec<Wire> {
        assert_eq!(a.len(), b.len());
        a.iter().zip(b).map(|(&x, &y)| self.xor(x, y)).collect()
    }

    /// AND of every wire in the slice (1 for an empty slice).
    pub fn and_all(&mut self, ws: &[Wire]) -> Wire {
        let mut acc = match ws.first() {
            Some(&w) => w,
            None => return self.constant(1),
        };
        for &w in &ws[1..] {
            acc = self.and(acc, w);
        }
        acc
    }

    /// 1 iff the two vectors are equal.
    pub fn eq_vec(&mut self, a: &[Wire], b: &[Wire]) -> Wire {
        assert_eq!(a.len(), b.len());
        let diffs: Vec<Wire> = a
            .iter()
            .zip(b)
            .map(|(&x, &y)| {
                let d = self.xor(x, y);
                self.not(d)
            })
            .collect();
        self.and_all(&diffs)
    }

    /// 1 iff the vector equals the given constant bits.
    pub fn eq_const(&mut self, a: &[Wire], bits: &[u8]) -> Wire {
        assert_eq!(a.len(), bits.len());
        let matched: Vec<Wire> = a
            .iter()
            .zip(bits)
            .map(|(&w, &b)| if b == 1 { w } else { self.not(w) })
            .collect();
        self.and_all(&matched)
    }

    pub fn gate_count(&self) -> usize {
        self.gates.len()
    }

    pub fn finish(self, outputs: Vec<Wire>) -> Result<BooleanCircuit, CircuitError> {
        BooleanCircuit::new(self.n_inputs, self.gates, outputs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::BitVector;

    fn truth_table(c: &BooleanCircuit) -> Vec<u32> {
        (0..1u32 << c.n_inputs)
            .map(|x| {
                let bits = BitVector::from_fn(c.n_inputs as usize, |j| ((x >> j) & 1) as u8);
                c.eval(&bits).unwrap().to_u128() as u32
            })
            .collect()
    }

    #[test]
    fn or_matches_truth_table() {
        let mut b = CircuitBuilder::new(2);
        let o = b.or(Wire::Input(0), Wire::Input(1));
        let c = b.finish(vec![o]).unwrap();
        assert_eq!(truth_table(&c), vec![0, 1, 1, 1]);
    }

    #[test]
    fn mux_selects() {
        let mut b = CircuitBuilder::new(3);
        // inputs: x0 = sel, x1 = t, x2 = f
        let m = b.mux(Wire::Input(0), Wire::Input(1), Wire::Input(2));
        let c = b.finish(vec![m]).unwrap();
        for x in 0..8u32 {
            let (sel, t, f) = (x & 1, (x >> 1) & 1, (x >> 2) & 1);
            let bits = BitVector::from_fn(3, |j| ((x >> j) & 1) as u8);
            let want = if sel == 1 { t } else { f };
            assert_eq!(c.eval(&bits).unwrap().get(0) as u32, want);
        }
    }

    #[test]
    fn eq_vec_and_eq_const() {
        let mut b = CircuitBuilder::new(4);
        let eq = b.eq_vec(&[Wire::Input(0), Wire::Input(1)], &[Wire::Input(2), Wire::Input(3)]);
        let c = b.finish(vec![eq]).unwrap();
        for x in 0..16u32 {
            let bits = BitVector::from_fn(4, |j| ((x >> j) & 1) as u8);
            let want = ((x & 3) == (x >> 2)) as u32;
            assert_eq!(c.eval(&bits).unwrap().get(0) as u32, want);
        }

        let mut b = CircuitBuilder::new(3);
        let eq = b.eq_const(&b.inputs(), &[1, 0, 1]);
        let c = b.finish(vec![eq]).unwrap();
        assert_eq!(truth_table(&c), vec![0, 0, 0, 0, 0, 1, 0, 0]);
    }

    #[test]
    fn and_all_of_empty_is_one() {
        let mut b = CircuitBuilder::new(1);
        let w = b.and_all(&[]);
        let c = b.finish(vec![w]).unwrap();
        assert_eq!(truth_table(&c), vec![1, 1]);
    }
}

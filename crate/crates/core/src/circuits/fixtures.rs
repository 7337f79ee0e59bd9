//! Small reference circuits shared by tests, benches and the CLI selftest.

use super::{parse_circuit, BooleanCircuit, CircuitBuilder, Wire};

pub fn and2() -> BooleanCircuit {
    parse_circuit("in 2\ng0 = AND x0 x1\nout g0").unwrap()
}

pub fn xor2() -> BooleanCircuit {
    parse_circuit("in 2\ng0 = XOR x0 x1\nout g0").unwrap()
}

pub fn not1() -> BooleanCircuit {
    parse_circuit("in 1\ng0 = NOT x0\nout g0").unwrap()
}

/// Identity on `n` bits.
pub fn pass_through(n: u16) -> BooleanCircuit {
    let b = CircuitBuilder::new(n);
    let outs = b.inputs();
    b.finish(outs).unwrap()
}

/// Ignores its input and outputs the given constant bits.
pub fn const_output(n_inputs: u16, bits: &[u8]) -> BooleanCircuit {
    let mut b = CircuitBuilder::new(n_inputs);
    let outs = bits.iter().map(|&bit| b.constant(bit)).collect();
    b.finish(outs).unwrap()
}

pub fn parity3() -> BooleanCircuit {
    parse_circuit("in 3\ng0 = XOR x0 x1\ng1 = XOR g0 x2\nout g1").unwrap()
}

pub fn majority3() -> BooleanCircuit {
    parse_circuit(
        "in 3\n\
         g0 = AND x0 x1\n\
         g1 = AND x0 x2\n\
         g2 = AND x1 x2\n\
         g3 = XOR g0 g1\n\
         g4 = XOR g3 g2\n\
         out g4",
    )
    .unwrap()
}

/// `width`-bit ripple-carry adder: inputs are a (low bits first) then b,
/// outputs the `width + 1`-bit sum.
pub fn ripple_adder(width: u16) -> BooleanCircuit {
    let mut bld = CircuitBuilder::new(2 * width);
    let mut outs = Vec::with_capacity(width as usize + 1);
    let mut carry: Option<Wire> = None;
    for i in 0..width {
        let a = Wire::Input(i);
        let b = Wire::Input(width + i);
        let axb = bld.xor(a, b);
        let (sum, cout) = match carry {
            None => (axb, bld.and(a, b)),
            Some(c) => {
                let s = bld.xor(axb, c);
                let t = bld.and(axb, c);
                let u = bld.and(a, b);
                // carries can't both be set, so XOR acts as OR here
                (s, bld.xor(t, u))
            }
        };
        outs.push(sum);
        carry = Some(cout);
    }
    outs.push(carry.unwrap());
    bld.finish(outs).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::BitVector;

    #[test]
    fn adder_matches_integer_addition() {
        for width in [1u16, 2, 4] {
            let c = ripple_adder(width);
            for a in 0..1u32 << width {
                for b in 0..1u32 << width {
                    let x = BitVector::from_fn(2 * width as usize, |j| {
                        let v = if j < width as usize { a >> j } else { b >> (j - width as usize) };
                        (v & 1) as u8
                    });
                    assert_eq!(c.eval(&x).unwrap().to_u128() as u32, a + b, "{a}+{b} w{width}");
                }
            }
        }
    }

    #[test]
    fn parity_and_majority() {
        for x in 0..8u32 {
            let bits = BitVector::from_fn(3, |j| ((x >> j) & 1) as u8);
            assert_eq!(parity3().eval(&bits).unwrap().get(0) as u32, x.count_ones() & 1);
            assert_eq!(majority3().eval(&bits).unwrap().get(0), (x.count_ones() >= 2) as u8);
        }
    }

    #[test]
    fn pass_through_and_const() {
        let id = pass_through(4);
        let x = BitVector::from_u128(0b1010, 4);
        assert_eq!(id.eval(&x).unwrap(), x);

        let k = const_output(2, &[1, 1, 0]);
        assert_eq!(k.eval(&BitVector::zeros(2)).unwrap().to_u128(), 0b011);
    }
}

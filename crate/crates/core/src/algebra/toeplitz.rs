use super::{AlgebraError, BitVector};
use rand::RngCore;
use serde::{Deserialize, Serialize};

/// A member of the Toeplitz two-universal hash family, mapping `in_len`
/// bits to `out_len` bits: output[j] = XOR_k seed[j+k] * input[k].
///
/// Chosen over field multiplication because the protocols hash
/// restrictions x|_I whose length varies per run.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct ToeplitzHash {
    seed: BitVector,
    in_len: usize,
    out_len: usize,
}

impl ToeplitzHash {
    pub fn new(seed: BitVector, in_len: usize, out_len: usize) -> Result<Self, AlgebraError> {
        if seed.len() != in_len + out_len - 1 {
            return Err(AlgebraError::Shape(format!(
                "seed length {} != in_len {} + out_len {} - 1",
                seed.len(),
                in_len,
                out_len
            )));
        }
        Ok(ToeplitzHash { seed, in_len, out_len })
    }

    pub fn random(in_len: usize, out_len: usize, rng: &mut dyn RngCore) -> Self {
        let seed = BitVector::random(in_len + out_len - 1, rng);
        ToeplitzHash { seed, in_len, out_len }
    }

    pub fn seed(&self) -> &BitVector {
        &self.seed
    }

    pub fn in_len(&self) -> usize {
        self.in_len
    }

    pub fn out_len(&self) -> usize {
        self.out_len
    }

    pub fn hash(&self, input: &BitVector) -> Result<BitVector, AlgebraError> {
        if input.len() != self.in_len {
            return Err(AlgebraError::Shape(format!(
                "input length {} != in_len {}",
                input.len(),
                self.in_len
            )));
        }
        Ok(BitVector::from_fn(self.out_len, |j| {
            (0..self.in_len).fold(0, |acc, k| acc ^ (self.seed.get(j + k) & input.get(k)))
        }))
    }
}

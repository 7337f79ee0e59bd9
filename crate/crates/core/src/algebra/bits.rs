use super::AlgebraError;
use rand::RngCore;
use serde::{Deserialize, Serialize};

/// A sequence of bits. Bits are stored one per byte; index 0 is the
/// least significant position in serialized form.
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct BitVector {
    bits: Vec<u8>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        BitVector { bits: vec![0; len] }
    }

    /// Builds from a slice of 0/1 values.
    pub fn from_bits(bits: &[u8]) -> Self {
        assert!(bits.iter().all(|&b| b <= 1), "bit values must be 0 or 1");
        BitVector { bits: bits.to_vec() }
    }

    pub fn from_fn(len: usize, mut f: impl FnMut(usize) -> u8) -> Self {
        BitVector { bits: (0..len).map(|i| f(i) & 1).collect() }
    }

    pub fn random(len: usize, rng: &mut dyn RngCore) -> Self {
        let mut bytes = vec![0u8; len.div_ceil(8)];
        rng.fill_bytes(&mut bytes);
        BitVector::from_fn(len, |i| (bytes[i / 8] >> (i % 8)) & 1)
    }

    /// Little-endian interpretation of the low bits of `value`.
    pub fn from_u128(value: u128, len: usize) -> Self {
        assert!(len <= 128);
        BitVector::from_fn(len, |i| ((value >> i) & 1) as u8)
    }

    pub fn to_u128(&self) -> u128 {
        assert!(self.len() <= 128);
        self.bits
            .iter()
            .enumerate()
            .fold(0u128, |acc, (i, &b)| acc | ((b as u128) << i))
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.bits.iter().all(|&b| b == 0)
    }

    pub fn get(&self, i: usize) -> u8 {
        self.bits[i]
    }

    pub fn set(&mut self, i: usize, v: u8) {
        self.bits[i] = v & 1;
    }

    pub fn as_bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn iter(&self) -> impl Iterator<Item = u8> + '_ {
        self.bits.iter().copied()
    }

    pub fn xor(&self, other: &BitVector) -> BitVector {
        assert_eq!(self.len(), other.len(), "xor length mismatch");
        BitVector::from_fn(self.len(), |i| self.bits[i] ^ other.bits[i])
    }

    pub fn xor_in_place(&mut self, other: &BitVector) {
        assert_eq!(self.len(), other.len(), "xor length mismatch");
        for (a, b) in self.bits.iter_mut().zip(other.bits.iter()) {
            *a ^= b;
        }
    }

    pub fn concat(&self, other: &BitVector) -> BitVector {
        let mut bits = self.bits.clone();
        bits.extend_from_slice(&other.bits);
        BitVector { bits }
    }

    pub fn slice(&self, range: std::ops::Range<usize>) -> BitVector {
        BitVector { bits: self.bits[range].to_vec() }
    }

    /// Restriction to an index set, in the order given.
    pub fn select(&self, indices: &[usize]) -> BitVector {
        BitVector { bits: indices.iter().map(|&i| self.bits[i]).collect() }
    }

    /// Parity of the AND of two equal-length vectors (GF(2) dot product).
    pub fn dot(&self, other: &BitVector) -> u8 {
        assert_eq!(self.len(), other.len(), "dot length mismatch");
        self.bits
            .iter()
            .zip(other.bits.iter())
            .fold(0, |acc, (a, b)| acc ^ (a & b))
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b == 1).count()
    }

    /// Packs into bytes, bit i going to bit (i % 8) of byte (i / 8).
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = vec![0u8; self.len().div_ceil(8)];
        for (i, &b) in self.bits.iter().enumerate() {
            out[i / 8] |= b << (i % 8);
        }
        out
    }

    pub fn from_bytes(bytes: &[u8], len: usize) -> Self {
        assert!(len <= bytes.len() * 8);
        BitVector::from_fn(len, |i| (bytes[i / 8] >> (i % 8)) & 1)
    }
}

impl std::fmt::Debug for BitVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "BitVector[")?;
        for &b in &self.bits {
            write!(f, "{b}")?;
        }
        write!(f, "]")
    }
}

/// Row-major bit matrix over GF(2).
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    data: Vec<u8>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        BitMatrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn random(rows: usize, cols: usize, rng: &mut dyn RngCore) -> Self {
        let bits = BitVector::random(rows * cols, rng);
        BitMatrix { rows, cols, data: bits.as_bits().to_vec() }
    }

    pub fn from_rows(rows: &[BitVector]) -> Self {
        assert!(!rows.is_empty());
        let cols = rows[0].len();
        assert!(rows.iter().all(|r| r.len() == cols));
        let data = rows.iter().flat_map(|r| r.iter()).collect();
        BitMatrix { rows: rows.len(), cols, data }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = BitMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> u8 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: u8) {
        self.data[r * self.cols + c] = v & 1;
    }

    pub fn row(&self, r: usize) -> BitVector {
        BitVector::from_bits(&self.data[r * self.cols..(r + 1) * self.cols])
    }

    /// result[j] = XOR_k M[j,k] * v[k].
    pub fn mat_vec_mul(&self, v: &BitVector) -> Result<BitVector, AlgebraError> {
        if v.len() != self.cols {
            return Err(AlgebraError::Shape(format!(
                "matrix has {} cols, vector has length {}",
                self.cols,
                v.len()
            )));
        }
        Ok(BitVector::from_fn(self.rows, |j| self.row(j).dot(v)))
    }

    /// result[k] = XOR_j v[j] * M[j,k] (row combination).
    pub fn vec_mat_mul(&self, v: &BitVector) -> Result<BitVector, AlgebraError> {
        if v.len() != self.rows {
            return Err(AlgebraError::Shape(format!(
                "matrix has {} rows, vector has length {}",
                self.rows,
                v.len()
            )));
        }
        let mut acc = BitVector::zeros(self.cols);
        for j in 0..self.rows {
            if v.get(j) == 1 {
                acc.xor_in_place(&self.row(j));
            }
        }
        Ok(acc)
    }

    /// Matrix product over GF(2).
    pub fn mat_mul(&self, other: &BitMatrix) -> Result<BitMatrix, AlgebraError> {
        if self.cols != other.rows {
            return Err(AlgebraError::Shape(format!(
                "inner dimensions {} and {} differ",
                self.cols, other.rows
            )));
        }
        let mut out = BitMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for c in 0..other.cols {
                let mut acc = 0;
                for k in 0..self.cols {
                    acc ^= self.get(r, k) & other.get(k, c);
                }
                out.set(r, c, acc);
            }
        }
        Ok(out)
    }
}

use super::{AlgebraError, BitVector};
use rand::RngCore;
use serde::{Deserialize, Serialize};
use std::sync::OnceLock;

/// Maximum supported field degree. Products of two degree-63 values fit
/// in a u128 before reduction.
pub const MAX_DEGREE: u32 = 64;

/// GF(2^l) described by its degree and irreducible modulus. The modulus
/// includes the leading term, so for GF(2^8) it is 0x11B.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Field {
    degree: u32,
    modulus: u128,
}

/// Carry-less (XOR-accumulate) product of two GF(2) polynomials.
fn clmul(a: u128, b: u128) -> u128 {
    let mut acc = 0u128;
    let mut a = a;
    let mut i = 0;
    while a != 0 {
        if a & 1 == 1 {
            acc ^= b << i;
        }
        a >>= 1;
        i += 1;
    }
    acc
}

fn poly_degree(p: u128) -> i32 {
    127 - p.leading_zeros() as i32
}

/// Remainder of a modulo m in GF(2)[x].
fn poly_rem(mut a: u128, m: u128) -> u128 {
    let dm = poly_degree(m);
    while poly_degree(a) >= dm {
        a ^= m << (poly_degree(a) - dm);
    }
    a
}

fn poly_gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let r = poly_rem(a, b);
        a = b;
        b = r;
    }
    a
}

/// Exhaustive divisor scan: p (degree d) is irreducible iff no polynomial
/// of degree 1..=d/2 divides it. Used for degree <= 16.
fn irreducible_exhaustive(p: u128, degree: u32) -> bool {
    for dd in 1..=(degree / 2) {
        for low in 0..(1u128 << dd) {
            let candidate = (1u128 << dd) | low;
            if poly_rem(p, candidate) == 0 {
                return false;
            }
        }
    }
    true
}

/// Rabin's test: p of degree d is irreducible iff x^(2^d) = x (mod p)
/// and gcd(x^(2^(d/q)) - x, p) = 1 for every prime q dividing d.
fn irreducible_rabin(p: u128, degree: u32) -> bool {
    let sq = |t: u128| poly_rem(clmul(t, t), p);
    let x_pow_2k = |k: u32| {
        let mut t = 2u128; // x
        for _ in 0..k {
            t = sq(t);
        }
        t
    };
    let x_red = poly_rem(2, p); // x itself, reduced (matters for degree 1)
    if x_pow_2k(degree) != x_red {
        return false;
    }
    let mut d = degree;
    let mut primes = Vec::new();
    let mut q = 2;
    while q * q <= d {
        if d % q == 0 {
            primes.push(q);
            while d % q == 0 {
                d /= q;
            }
        }
        q += 1;
    }
    if d > 1 {
        primes.push(d);
    }
    for q in primes {
        let t = x_pow_2k(degree / q) ^ x_red; // x^(2^(d/q)) - x
        if poly_degree(poly_gcd(p, t)) != 0 {
            return false;
        }
    }
    true
}

fn is_irreducible(p: u128, degree: u32) -> bool {
    if degree <= 16 {
        irreducible_exhaustive(p, degree)
    } else {
        irreducible_rabin(p, degree)
    }
}

/// Default modulus per degree: GF(2^8) is pinned to x^8+x^4+x^3+x+1 for
/// reproducibility; every other degree gets the lowest-weight,
/// lexicographically-first irreducible polynomial.
fn default_modulus(degree: u32) -> u128 {
    assert!(degree >= 1 && degree <= MAX_DEGREE, "unsupported field degree");
    if degree == 8 {
        return 0x11B;
    }
    static TABLE: OnceLock<Vec<u128>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        (1..=MAX_DEGREE).map(|d| search_modulus(d)).collect()
    });
    table[(degree - 1) as usize]
}

fn search_modulus(degree: u32) -> u128 {
    if degree == 1 {
        return 0b11; // x + 1
    }
    let lead = 1u128 << degree;
    // weight counts interior terms; the leading term and the constant
    // term 1 are mandatory for irreducibility beyond degree 1.
    for weight in 1..degree as usize {
        let mut found: Option<u128> = None;
        let mut combo: Vec<u32> = (1..=weight as u32).collect();
        loop {
            let p = lead | 1 | combo.iter().fold(0u128, |acc, &e| acc | (1 << e));
            if is_irreducible(p, degree) {
                found = match found {
                    Some(best) if best <= p => Some(best),
                    _ => Some(p),
                };
            }
            // next combination of interior exponents in 1..degree
            let mut i = weight;
            loop {
                if i == 0 {
                    combo.clear();
                    break;
                }
                i -= 1;
                if combo[i] < degree - (weight - 1 - i) as u32 - 1 {
                    combo[i] += 1;
                    for j in i + 1..weight {
                        combo[j] = combo[j - 1] + 1;
                    }
                    break;
                }
            }
            if combo.is_empty() {
                break;
            }
        }
        if let Some(p) = found {
            return p;
        }
    }
    unreachable!("an irreducible polynomial exists for every degree");
}

impl Field {
    /// Field of the given degree with the default modulus.
    pub fn new(degree: u32) -> Self {
        Field { degree, modulus: default_modulus(degree) }
    }

    /// Field with an explicit modulus, validated for irreducibility.
    pub fn with_modulus(degree: u32, modulus: u128) -> Result<Self, AlgebraError> {
        if degree < 1 || degree > MAX_DEGREE {
            return Err(AlgebraError::BadField(format!("degree {degree} out of range")));
        }
        if poly_degree(modulus) != degree as i32 {
            return Err(AlgebraError::BadField("modulus degree mismatch".into()));
        }
        if !is_irreducible(modulus, degree) {
            return Err(AlgebraError::BadField("modulus is reducible".into()));
        }
        Ok(Field { degree, modulus })
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn modulus(&self) -> u128 {
        self.modulus
    }

    pub fn element(&self, value: u128) -> F2kElement {
        debug_assert!(
            self.degree == 128 || value < (1u128 << self.degree),
            "value wider than field degree"
        );
        F2kElement { value, field: *self }
    }

    pub fn zero(&self) -> F2kElement {
        self.element(0)
    }

    pub fn one(&self) -> F2kElement {
        self.element(1)
    }

    pub fn random(&self, rng: &mut dyn RngCore) -> F2kElement {
        let v = BitVector::random(self.degree as usize, rng);
        self.element(v.to_u128())
    }

    /// Interprets up to `degree` bits, little-endian, as an element.
    pub fn from_bits(&self, bits: &BitVector) -> Result<F2kElement, AlgebraError> {
        if bits.len() > self.degree as usize {
            return Err(AlgebraError::Shape(format!(
                "{} bits do not fit in GF(2^{})",
                bits.len(),
                self.degree
            )));
        }
        Ok(self.element(bits.to_u128()))
    }

    /// Iterates all 2^degree elements. Intended for small test fields.
    pub fn all_elements(&self) -> impl Iterator<Item = F2kElement> + '_ {
        assert!(self.degree <= 20, "exhaustive iteration only for small fields");
        (0..(1u128 << self.degree)).map(move |v| self.element(v))
    }
}

/// An element of GF(2^l).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct F2kElement {
    value: u128,
    field: Field,
}

impl F2kElement {
    pub fn value(&self) -> u128 {
        self.value
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    pub fn to_bits(&self) -> BitVector {
        BitVector::from_u128(self.value, self.field.degree as usize)
    }

    pub fn add(&self, other: &F2kElement) -> Result<F2kElement, AlgebraError> {
        if self.field != other.field {
            return Err(AlgebraError::FieldMismatch);
        }
        Ok(self.field.element(self.value ^ other.value))
    }

    /// Carry-less product reduced by the field modulus.
    pub fn mul(&self, other: &F2kElement) -> Result<F2kElement, AlgebraError> {
        if self.field != other.field {
            return Err(AlgebraError::FieldMismatch);
        }
        let product = clmul(self.value, other.value);
        Ok(self.field.element(poly_rem(product, self.field.modulus)))
    }

    pub fn pow(&self, mut e: u64) -> F2kElement {
        let mut base = *self;
        let mut acc = self.field.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).unwrap();
            }
            base = base.mul(&base).unwrap();
            e >>= 1;
        }
        acc
    }
}

impl std::fmt::Debug for F2kElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "F2k<{}>({:#x})", self.field.degree, self.value)
    }
}

/// Polynomial over GF(2^l); coeffs[j] multiplies x^j.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Polynomial {
    coeffs: Vec<F2kElement>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<F2kElement>) -> Self {
        assert!(!coeffs.is_empty(), "polynomial needs at least one coefficient");
        let field = coeffs[0].field();
        assert!(coeffs.iter().all(|c| c.field() == field), "mixed-field coefficients");
        Polynomial { coeffs }
    }

    pub fn coeffs(&self) -> &[F2kElement] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn field(&self) -> Field {
        self.coeffs[0].field()
    }

    /// Horner evaluation.
    pub fn eval(&self, x: &F2kElement) -> Result<F2kElement, AlgebraError> {
        if x.field() != self.field() {
            return Err(AlgebraError::FieldMismatch);
        }
        let mut acc = self.field().zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x)?.add(c)?;
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn default_moduli_are_irreducible() {
        // Rabin's test doubles as the oracle for the exhaustively-checked
        // degrees and vice versa.
        for d in 1..=MAX_DEGREE {
            let m = default_modulus(d);
            assert!(irreducible_rabin(m, d), "degree {d} modulus {m:#x}");
            if d <= 16 {
                assert!(irreducible_exhaustive(m, d));
            }
        }
    }

    #[test]
    fn gf256_uses_aes_modulus() {
        assert_eq!(Field::new(8).modulus(), 0x11B);
    }

    #[test]
    fn reducible_modulus_rejected() {
        // x^4 + 1 = (x+1)^4
        assert!(Field::with_modulus(4, 0b10001).is_err());
    }

    #[test]
    fn mul_identity_and_zero() {
        let f = Field::new(8);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let a = f.random(&mut rng);
            assert_eq!(a.mul(&f.one()).unwrap(), a);
            assert_eq!(a.mul(&f.zero()).unwrap(), f.zero());
        }
    }

    /// Schoolbook oracle: carry-less multiply followed by long division.
    fn mul_oracle(a: &F2kElement, b: &F2kElement) -> F2kElement {
        let f = a.field();
        let mut prod = [0u8; 256];
        for i in 0..f.degree() as usize {
            for j in 0..f.degree() as usize {
                prod[i + j] ^= (((a.value() >> i) & 1) & ((b.value() >> j) & 1)) as u8;
            }
        }
        // long division by the modulus
        for k in (f.degree() as usize..256).rev() {
            if prod[k] == 1 {
                for t in 0..=f.degree() as usize {
                    if (f.modulus() >> t) & 1 == 1 {
                        prod[k - f.degree() as usize + t] ^= 1;
                    }
                }
            }
        }
        let v = prod[..f.degree() as usize]
            .iter()
            .enumerate()
            .fold(0u128, |acc, (i, &b)| acc | ((b as u128) << i));
        f.element(v)
    }

    #[test]
    fn aes_inverse_pair() {
        // 0x53 * 0xCA = 1 in GF(2^8) mod x^8+x^4+x^3+x+1
        let f = Field::new(8);
        let a = f.element(0x53);
        let b = f.element(0xCA);
        assert_eq!(mul_oracle(&a, &b), f.one());
        assert_eq!(a.mul(&b).unwrap(), f.one());
    }

    #[test]
    fn mul_matches_schoolbook_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for degree in [3, 8, 16, 32, 64] {
            let f = Field::new(degree);
            for _ in 0..50 {
                let a = f.random(&mut rng);
                let b = f.random(&mut rng);
                assert_eq!(a.mul(&b).unwrap(), mul_oracle(&a, &b));
            }
        }
    }

    #[test]
    fn field_mismatch_rejected() {
        let a = Field::new(4).one();
        let b = Field::new(8).one();
        assert_eq!(a.mul(&b), Err(AlgebraError::FieldMismatch));
    }

    #[test]
    fn small_field_axioms_exhaustive() {
        for degree in 1..=4 {
            let f = Field::new(degree);
            let elems: Vec<_> = f.all_elements().collect();
            for a in &elems {
                // nonzero elements have inverses
                if !a.is_zero() {
                    assert!(
                        elems.iter().any(|b| a.mul(b).unwrap() == f.one()),
                        "no inverse for {a:?}"
                    );
                }
                for b in &elems {
                    assert_eq!(a.mul(b).unwrap(), b.mul(a).unwrap());
                    for c in &elems {
                        let ab_c = a.mul(b).unwrap().mul(c).unwrap();
                        let a_bc = a.mul(&b.mul(c).unwrap()).unwrap();
                        assert_eq!(ab_c, a_bc, "associativity");
                        let lhs = a.mul(&b.add(c).unwrap()).unwrap();
                        let rhs = a.mul(b).unwrap().add(&a.mul(c).unwrap()).unwrap();
                        assert_eq!(lhs, rhs, "distributivity");
                    }
                }
            }
        }
    }

    #[test]
    fn poly_constant_and_linear() {
        let f = Field::new(8);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let c = f.random(&mut rng);
        let p = Polynomial::new(vec![c]);
        for _ in 0..10 {
            let x = f.random(&mut rng);
            assert_eq!(p.eval(&x).unwrap(), c);
        }
        // P(x) = x
        let p = Polynomial::new(vec![f.zero(), f.one()]);
        let a = f.random(&mut rng);
        assert_eq!(p.eval(&a).unwrap(), a);
    }

    #[test]
    fn poly_eval_matches_power_sum_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for degree in [8u32, 16] {
            let f = Field::new(degree);
            for _ in 0..500 {
                let coeffs: Vec<_> = (0..4).map(|_| f.random(&mut rng)).collect();
                let p = Polynomial::new(coeffs.clone());
                let x = f.random(&mut rng);
                // naive sum of c_j * x^j
                let mut expect = f.zero();
                for (j, c) in coeffs.iter().enumerate() {
                    expect = expect.add(&c.mul(&x.pow(j as u64)).unwrap()).unwrap();
                }
                assert_eq!(p.eval(&x).unwrap(), expect);
            }
        }
    }
}

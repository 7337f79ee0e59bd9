//! Non-interactive 1-2 oblivious transfer over the BB84 channel.
//!
//! The sender transmits `m` qubits with random bits and bases, waits for
//! the memory bound to apply, then announces the bases plus two
//! two-universal hashes and masked strings. The receiver, who measured
//! everything in the basis matching its choice bit, unmasks exactly one
//! string: the positions prepared in the other basis gave it noise, so
//! the other hash value is out of reach.
//!
//! Parameter rule: `m/4 − 2ℓ − s ≥ m/8`, i.e. `m ≥ 16ℓ + 8s`. The default
//! instantiation takes equality.

use crate::algebra::{BitVector, ToeplitzHash};
use crate::channel::{transmit, Basis, MeasureAll, MemoryLedger, QuantumMessage, Qubit};
use crate::transcript::Transcript;
use rand::RngCore;
use serde_json::json;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OtError {
    #[error("insecure parameters: m={m} < 16*{ell} + 8*{s}")]
    InsecureParameters { m: usize, ell: usize, s: usize },
    #[error("shape: {0}")]
    Shape(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OtParams {
    /// Qubits transmitted.
    pub m: usize,
    /// Transferred string length.
    pub ell: usize,
    /// Adversary memory bound the parameters are sized against.
    pub s: usize,
}

impl OtParams {
    /// Smallest secure `m` for the given `ℓ` and `s`.
    pub fn standard(ell: usize, s: usize) -> OtParams {
        OtParams { m: 16 * ell + 8 * s, ell, s }
    }

    pub fn validate(&self) -> Result<(), OtError> {
        if self.m < 16 * self.ell + 8 * self.s {
            return Err(OtError::InsecureParameters { m: self.m, ell: self.ell, s: self.s });
        }
        Ok(())
    }
}

/// Classical message revealed only after the memory bound applies.
#[derive(Clone, Debug)]
pub struct OtAnnouncement {
    pub theta: Vec<Basis>,
    pub f0: ToeplitzHash,
    pub f1: ToeplitzHash,
    pub e0: BitVector,
    pub e1: BitVector,
}

impl OtAnnouncement {
    /// Indices prepared in the basis associated with choice `b`.
    pub fn index_set(&self, b: u8) -> Vec<usize> {
        let want = Basis::from_bit(b);
        self.theta
            .iter()
            .enumerate()
            .filter(|(_, &t)| t == want)
            .map(|(i, _)| i)
            .collect()
    }
}

fn bits_str(v: &BitVector) -> String {
    (0..v.len()).map(|i| if v.get(i) == 1 { '1' } else { '0' }).collect()
}

/// Sender side: prepares the quantum message (one bound marker after all
/// qubits) and the full announcement. The caller is responsible for
/// sequencing: deliver the message, let the bound apply, then reveal the
/// announcement.
pub fn ot_send(
    s0: &BitVector,
    s1: &BitVector,
    params: &OtParams,
    rng: &mut dyn RngCore,
    tr: &mut Transcript,
) -> Result<(QuantumMessage, OtAnnouncement), OtError> {
    params.validate()?;
    ot_send_unchecked(s0, s1, params, rng, tr)
}

/// Like [`ot_send`] but without the m >= 16l + 8s check. Exists so
/// experiments can demonstrate what goes wrong with undersized `m`;
/// never use it for an actual transfer.
pub fn ot_send_unchecked(
    s0: &BitVector,
    s1: &BitVector,
    params: &OtParams,
    rng: &mut dyn RngCore,
    tr: &mut Transcript,
) -> Result<(QuantumMessage, OtAnnouncement), OtError> {
    if s0.len() != params.ell || s1.len() != params.ell {
        return Err(OtError::Shape(format!(
            "strings must be {} bits, got {} and {}",
            params.ell,
            s0.len(),
            s1.len()
        )));
    }
    let x = BitVector::random(params.m, rng);
    let theta: Vec<Basis> = (0..params.m).map(|_| Basis::random(rng)).collect();
    let qubits: Vec<Qubit> = (0..params.m)
        .map(|i| Qubit::new(x.get(i), theta[i]))
        .collect();
    let msg = QuantumMessage::new(qubits, vec![params.m], 1).expect("one marker");

    let mut hashes = Vec::with_capacity(2);
    let mut masked = Vec::with_capacity(2);
    for (b, s) in [(0u8, s0), (1u8, s1)] {
        let idx: Vec<usize> = theta
            .iter()
            .enumerate()
            .filter(|(_, &t)| t == Basis::from_bit(b))
            .map(|(i, _)| i)
            .collect();
        let f = ToeplitzHash::random(idx.len(), params.ell, rng);
        let e = f
            .hash(&x.select(&idx))
            .expect("index set length matches")
            .xor(s);
        hashes.push(f);
        masked.push(e);
    }
    let e1 = masked.pop().unwrap();
    let e0 = masked.pop().unwrap();
    let f1 = hashes.pop().unwrap();
    let f0 = hashes.pop().unwrap();
    tr.record(
        "ot_announce",
        json!({
            "theta": theta.iter().map(|t| t.symbol()).collect::<String>(),
            "f0_seed": bits_str(f0.seed()),
            "f1_seed": bits_str(f1.seed()),
            "e0": bits_str(&e0),
            "e1": bits_str(&e1),
        }),
    );
    Ok((msg, OtAnnouncement { theta, f0, f1, e0, e1 }))
}

/// Unmasks `e_c` given the receiver's measured bits (one per qubit, in
/// order). Shared by the honest receiver and attack strategies.
pub fn ot_decode(
    c: u8,
    measured: &BitVector,
    ann: &OtAnnouncement,
) -> Result<BitVector, OtError> {
    if measured.len() != ann.theta.len() {
        return Err(OtError::Shape("measured length != message length".into()));
    }
    let idx = ann.index_set(c);
    let f = if c == 0 { &ann.f0 } else { &ann.f1 };
    let e = if c == 0 { &ann.e0 } else { &ann.e1 };
    let h = f
        .hash(&measured.select(&idx))
        .map_err(|e| OtError::Shape(e.to_string()))?;
    Ok(e.xor(&h))
}

/// Honest receiver: measures everything in the basis matching `c`, needs
/// zero stored qubits, and recovers `s_c` exactly on a noiseless channel.
pub fn ot_receive(
    c: u8,
    msg: QuantumMessage,
    ann: &OtAnnouncement,
    rng: &mut dyn RngCore,
    tr: &mut Transcript,
) -> Result<BitVector, OtError> {
    let mut ledger = MemoryLedger::new(0);
    let outcomes = transmit(msg, &mut MeasureAll(Basis::from_bit(c)), &mut ledger, rng, tr);
    debug_assert!(ledger.is_valid());
    let measured = BitVector::from_fn(outcomes.len(), |i| {
        outcomes[i].measured_bit().expect("honest receiver measures everything")
    });
    ot_decode(c, &measured, ann)
}

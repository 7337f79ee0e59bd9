//! Stateful hash-based signatures: a list of Lamport one-time key slots
//! over the toy sponge hash, in hash-then-sign form (the message is
//! digested first, then the digest bits select preimages).
//!
//! The point of this scheme is not security margin — the sponge is a
//! teaching toy — but that `verify` compiles to a boolean circuit small
//! enough to garble, which the classical-key FE construction needs. Both
//! routes (native and circuit) are implemented and pinned together by
//! tests.

use crate::algebra::BitVector;
use crate::circuits::{BooleanCircuit, CircuitBuilder, Wire};
use crate::hashprim::{sponge_hash, sponge_wires};
use rand::RngCore;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SigError {
    #[error("stateful key depleted")]
    Depleted,
    #[error("shape: {0}")]
    Shape(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SigParams {
    /// Digest and preimage length; the Lamport dimension.
    pub hash_bits: usize,
    /// Number of one-time slots in a key pair.
    pub max_sigs: usize,
}

impl SigParams {
    pub fn new(hash_bits: usize, max_sigs: usize) -> SigParams {
        assert!(max_sigs >= 1);
        SigParams { hash_bits, max_sigs }
    }

    /// Bits used to name a slot inside an encoded signature.
    pub fn slot_bits(&self) -> usize {
        let mut bits = 0;
        while (1usize << bits) < self.max_sigs {
            bits += 1;
        }
        bits.max(1)
    }

    /// Length of an encoded signature: slot index plus one preimage per
    /// digest bit.
    pub fn signature_bits(&self) -> usize {
        self.slot_bits() + self.hash_bits * self.hash_bits
    }
}

/// One Lamport slot: a preimage pair per digest bit.
#[derive(Clone, Debug)]
struct SlotSk {
    preimages: Vec<[BitVector; 2]>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct SlotVk {
    hashes: Vec<[BitVector; 2]>,
}

#[derive(Clone, Debug)]
pub struct SigKeyPair {
    params: SigParams,
    slots: Vec<SlotSk>,
    next_slot: usize,
    vk: SigVerifyKey,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SigVerifyKey {
    params: SigParams,
    slots: Vec<SlotVk>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Signature {
    pub slot: usize,
    /// Preimage per digest bit, chosen by that bit's value.
    pub preimages: Vec<BitVector>,
}

pub fn sig_keygen(params: SigParams, rng: &mut dyn RngCore) -> SigKeyPair {
    let h = params.hash_bits;
    let mut slots = Vec::with_capacity(params.max_sigs);
    let mut vk_slots = Vec::with_capacity(params.max_sigs);
    for _ in 0..params.max_sigs {
        let preimages: Vec<[BitVector; 2]> = (0..h)
            .map(|_| [BitVector::random(h, rng), BitVector::random(h, rng)])
            .collect();
        let hashes = preimages
            .iter()
            .map(|[p0, p1]| [sponge_hash(p0, h), sponge_hash(p1, h)])
            .collect();
        slots.push(SlotSk { preimages });
        vk_slots.push(SlotVk { hashes });
    }
    let vk = SigVerifyKey { params, slots: vk_slots };
    SigKeyPair { params, slots, next_slot: 0, vk }
}

impl SigKeyPair {
    pub fn verify_key(&self) -> &SigVerifyKey {
        &self.vk
    }

    pub fn params(&self) -> SigParams {
        self.params
    }

    pub fn slots_left(&self) -> usize {
        self.params.max_sigs - self.next_slot
    }

    pub fn sign(&mut self, msg: &BitVector) -> Result<Signature, SigError> {
        if self.next_slot >= self.params.max_sigs {
            return Err(SigError::Depleted);
        }
        let slot = self.next_slot;
        self.next_slot += 1;
        let digest = sponge_hash(msg, self.params.hash_bits);
        let preimages = (0..self.params.hash_bits)
            .map(|i| self.slots[slot].preimages[i][digest.get(i) as usize].clone())
            .collect();
        Ok(Signature { slot, preimages })
    }
}

impl SigVerifyKey {
    pub fn verify(&self, msg: &BitVector, sig: &Signature) -> bool {
        let h = self.params.hash_bits;
        if sig.slot >= self.params.max_sigs || sig.preimages.len() != h {
            return false;
        }
        let digest = sponge_hash(msg, h);
        (0..h).all(|i| {
            sig.preimages[i].len() == h
                && sponge_hash(&sig.preimages[i], h)
                    == self.slots[sig.slot].hashes[i][digest.get(i) as usize]
        })
    }

    /// Packs a signature for circuit consumption: slot index bits, then
    /// the preimages in digest-bit order.
    pub fn encode_signature(&self, sig: &Signature) -> BitVector {
        let p = self.params;
        let mut bits = BitVector::from_u128(sig.slot as u128, p.slot_bits());
        for pre in &sig.preimages {
            bits = bits.concat(pre);
        }
        debug_assert_eq!(bits.len(), p.signature_bits());
        bits
    }

    /// Appends in-circuit verification to a builder. `msg` and `sig` are
    /// wire slices (`sig` laid out as by [`Self::encode_signature`]);
    /// this key's hashes are baked in as constants. Returns the single
    /// accept wire.
    pub fn verify_wires(&self, b: &mut CircuitBuilder, msg: &[Wire], sig: &[Wire]) -> Wire {
        let p = self.params;
        assert_eq!(sig.len(), p.signature_bits());
        let (slot_wires, rest) = sig.split_at(p.slot_bits());
        let digest = sponge_wires(b, msg, p.hash_bits);

        // one-hot slot selectors; a slot index beyond max_sigs selects
        // nothing and the final AND fails
        let selectors: Vec<Wire> = (0..p.max_sigs)
            .map(|s| {
                let bits: Vec<u8> =
                    (0..p.slot_bits()).map(|k| ((s >> k) & 1) as u8).collect();
                b.eq_const(slot_wires, &bits)
            })
            .collect();
        let valid_slot = if p.max_sigs == 1 {
            selectors[0]
        } else {
            // selectors are mutually exclusive, so XOR acts as OR
            selectors[1..]
                .iter()
                .fold(selectors[0], |acc, &s| b.xor(acc, s))
        };

        let mut checks = vec![valid_slot];
        for i in 0..p.hash_bits {
            let pre = &rest[i * p.hash_bits..(i + 1) * p.hash_bits];
            let hashed = sponge_wires(b, pre, p.hash_bits);
            for k in 0..p.hash_bits {
                // expected bit under slot selection, for both digest values
                let mut expected = [None::<Wire>; 2];
                for (bit, e) in expected.iter_mut().enumerate() {
                    let mut acc: Option<Wire> = None;
                    for (s, &sel) in selectors.iter().enumerate() {
                        if self.slots[s].hashes[i][bit].get(k) == 1 {
                            acc = Some(match acc {
                                None => sel,
                                Some(a) => b.xor(a, sel),
                            });
                        }
                    }
                    *e = acc;
                }
                let zero = b.constant(0);
                let e0 = expected[0].unwrap_or(zero);
                let e1 = expected[1].unwrap_or(zero);
                let want = b.mux(digest[i], e1, e0);
                let diff = b.xor(hashed[k], want);
                let ok = b.not(diff);
                checks.push(ok);
            }
        }
        b.and_all(&checks)
    }

    /// Standalone verification circuit over `msg_bits + signature_bits`
    /// inputs (message first), one output bit.
    pub fn verify_circuit(&self, msg_bits: usize) -> BooleanCircuit {
        let p = self.params;
        let total = msg_bits + p.signature_bits();
        let mut b = CircuitBuilder::new(total as u16);
        let wires = b.inputs();
        let (msg, sig) = wires.split_at(msg_bits);
        let ok = self.verify_wires(&mut b, msg, sig);
        b.finish(vec![ok]).unwrap()
    }
}

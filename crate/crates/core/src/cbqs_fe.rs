//! Computational functional encryption with classical keys. The master
//! key signs circuit encodings; a ciphertext is a garbled one-time
//! program of "verify the signature in-circuit, then run the encoded
//! circuit on mu". Whoever holds a signed circuit can decrypt exactly
//! that function of the plaintext, once.

use crate::algebra::BitVector;
use crate::circuits::{BooleanCircuit, CircuitBuilder, CircuitError};
use crate::otp::{otp_yao_receive, otp_yao_send, OtpError, OtpParams, OtpTransmission};
use crate::signatures::{sig_keygen, SigError, SigKeyPair, SigParams, SigVerifyKey, Signature};
use crate::transcript::Transcript;
use crate::universal::{encode_for_class, universal_eval_wires, ClassSpec};
use rand::RngCore;
use serde_json::json;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CbqsFeError {
    #[error(transparent)]
    Sig(#[from] SigError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Otp(#[from] OtpError),
    #[error("shape: {0}")]
    Shape(String),
}

#[derive(Clone, Copy, Debug)]
pub struct CbqsParams {
    pub sig: SigParams,
    /// Circuit class functional keys range over.
    pub class: ClassSpec,
    /// One-time-program sizing for ciphertexts.
    pub otp: OtpParams,
}

impl CbqsParams {
    /// OTP input width: class encoding plus encoded signature.
    pub fn input_bits(&self) -> usize {
        self.class.width + self.sig.signature_bits()
    }
}

pub struct CbqsKeys {
    pub mk: SigKeyPair,
    pub pk: SigVerifyKey,
}

#[derive(Clone)]
pub struct CbqsFuncKey {
    pub c: BooleanCircuit,
    pub sigma: Signature,
}

pub fn cbqsfe_setup(params: &CbqsParams, rng: &mut dyn RngCore) -> CbqsKeys {
    let mk = sig_keygen(params.sig, rng);
    let pk = mk.verify_key().clone();
    CbqsKeys { mk, pk }
}

/// Signs the class encoding of `c`; the pair is the functional key.
pub fn cbqsfe_keygen(
    mk: &mut SigKeyPair,
    c: &BooleanCircuit,
    params: &CbqsParams,
) -> Result<CbqsFuncKey, CbqsFeError> {
    let msg = encode_for_class(c, &params.class)?;
    let sigma = mk.sign(&msg)?;
    Ok(CbqsFuncKey { c: c.clone(), sigma })
}

/// The ciphertext program: inputs are a class encoding then a signature;
/// output bit 0 is the acceptance flag, the rest C(mu) (zeroed on
/// reject). Accepts iff the signature verifies and the encoding is a
/// well-formed class member.
fn p_circuit(pk: &SigVerifyKey, mu: &BitVector, params: &CbqsParams) -> BooleanCircuit {
    let w = params.class.width;
    let sig_bits = params.sig.signature_bits();
    let mut b = CircuitBuilder::new((w + sig_bits) as u16);
    let wires = b.inputs();
    let (enc, sig) = wires.split_at(w);

    let sig_ok = pk.verify_wires(&mut b, enc, sig);
    let mu_wires: Vec<_> = (0..mu.len()).map(|i| b.constant(mu.get(i))).collect();
    let (enc_ok, outs) = universal_eval_wires(&mut b, enc, &mu_wires, &params.class);

    let valid = b.and(sig_ok, enc_ok);
    let mut outputs = vec![valid];
    outputs.extend(outs.iter().map(|&o| b.and(o, valid)));
    b.finish(outputs).expect("well-formed ciphertext program")
}

pub fn cbqsfe_enc(
    pk: &SigVerifyKey,
    mu: &BitVector,
    params: &CbqsParams,
    rng: &mut dyn RngCore,
    tr: &mut Transcript,
) -> Result<OtpTransmission, CbqsFeError> {
    if mu.len() != params.class.n_inputs as usize {
        return Err(CbqsFeError::Shape(format!(
            "class takes {} plaintext bits, got {}",
            params.class.n_inputs,
            mu.len()
        )));
    }
    let circuit = p_circuit(pk, mu, params);
    tr.record(
        "cbqsfe_enc",
        json!({"inputs": circuit.n_inputs, "gates": circuit.gates.len()}),
    );
    Ok(otp_yao_send(&circuit, params.otp, rng, tr)?)
}

/// Runs the one-time program on (encode(C), sigma). `None` is reject.
pub fn cbqsfe_dec(
    sk: &CbqsFuncKey,
    pk: &SigVerifyKey,
    ct: OtpTransmission,
    params: &CbqsParams,
    rng: &mut dyn RngCore,
    tr: &mut Transcript,
) -> Result<Option<BitVector>, CbqsFeError> {
    let enc = encode_for_class(&sk.c, &params.class)?;
    let input = enc.concat(&pk.encode_signature(&sk.sigma));
    let out = otp_yao_receive(ct, &input, rng, tr)?;
    tr.record("cbqsfe_dec", json!({"accepted": out.get(0) == 1}));
    if out.get(0) == 1 {
        Ok(Some(out.slice(1..out.len())))
    } else {
        Ok(None)
    }
}

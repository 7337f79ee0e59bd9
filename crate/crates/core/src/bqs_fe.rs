//! Information-theoretic functional encryption against quantum-memory-
//! bounded receivers. The master secret is a uniform (m·r) × (m·r)
//! matrix over GF(2^l). Encryption keys (v, M·v) and functional keys
//! (the column polynomials evaluated at an encoded circuit) are handed
//! out through time-windowed broadcasts; a ciphertext is a one-time
//! program that releases C(mu) only to a matching key pair.
//!
//! Decryption works because of the exact identity
//!   sum_{i: v_i = 1} P_i(x) = P_v(x)
//! where P_i has the i-th column of M as coefficients and P_v has M·v.

use crate::algebra::{BitVector, F2kElement, Field, Polynomial};
use crate::broadcast::{br_close, br_eval, br_setup, BroadcastConfig, BroadcastError, BroadcastHandle, Party};
use crate::channel::MemoryLedger;
use crate::circuits::{
    decode_circuit, encode_circuit, BooleanCircuit, CircuitBuilder, CircuitEncoding, CircuitError,
    Wire,
};
use crate::otp::{otp_yao_receive, otp_yao_send, KilHandle, OtpError, OtpParams, OtpTransmission};
use crate::transcript::Transcript;
use crate::universal::{encode_for_class, poly_eval_wires, universal_eval_wires, ClassSpec};
use rand::RngCore;
use serde_json::json;
use thiserror::Error;

/// Width of the standalone circuit encoding an encryption key accepts.
pub const CANONICAL_ENC_BITS: usize = 256;

#[derive(Debug, Error)]
pub enum BqsFeError {
    #[error("parameter: {0}")]
    Parameter(String),
    #[error("schedule: tick {now} outside window [{}, {})", window.0, window.1)]
    Schedule { window: (u64, u64), now: u64 },
    #[error(transparent)]
    Broadcast(#[from] BroadcastError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Otp(#[from] OtpError),
    #[error("shape: {0}")]
    Shape(String),
}

#[derive(Clone, Copy, Debug)]
pub struct BqsFeParams {
    pub lambda: u32,
    /// Circuit-encoding length the scheme is nominally sized for.
    pub w: u32,
    /// Adversary quantum-memory bound, in symbol units.
    pub s: u64,
    /// Number of bound applications / broadcast rounds.
    pub r: u64,
    /// Test-size override for the field degree (nominally max(lambda, w)).
    pub ell_override: Option<u32>,
}

impl BqsFeParams {
    pub fn new(lambda: u32, w: u32, s: u64, r: u64) -> Result<BqsFeParams, BqsFeError> {
        let p = BqsFeParams { lambda, w, s, r, ell_override: None };
        p.validate()?;
        Ok(p)
    }

    pub fn with_ell(mut self, ell: u32) -> BqsFeParams {
        self.ell_override = Some(ell);
        self
    }

    pub fn validate(&self) -> Result<(), BqsFeError> {
        if self.r == 0 || self.r >= self.s {
            return Err(BqsFeError::Parameter(format!(
                "need 0 < r < s, got r={}, s={}",
                self.r, self.s
            )));
        }
        Ok(())
    }

    /// Block size: 2·sqrt(s/r) rounded up to even.
    pub fn m(&self) -> usize {
        let root = (self.s as f64 / self.r as f64).sqrt();
        let m = (2.0 * root).ceil() as usize;
        m + (m % 2)
    }

    /// Matrix dimension m·r.
    pub fn mr(&self) -> usize {
        self.m() * self.r as usize
    }

    pub fn ell(&self) -> u32 {
        self.ell_override.unwrap_or_else(|| self.lambda.max(self.w))
    }

    pub fn field(&self) -> Field {
        Field::new(self.ell())
    }

    /// Minimum honest workspace the lower bound allows: sqrt(s/r).
    pub fn min_honest_budget(&self) -> usize {
        (self.s as f64 / self.r as f64).sqrt().ceil() as usize
    }

    fn check_honest_budget(&self, ledger: &MemoryLedger) -> Result<(), BqsFeError> {
        if ledger.budget() < self.min_honest_budget() {
            return Err(BqsFeError::Parameter(format!(
                "honest budget {} below the sqrt(s/r) = {} floor",
                ledger.budget(),
                self.min_honest_budget()
            )));
        }
        Ok(())
    }
}

pub struct MasterSecret {
    pub params: BqsFeParams,
    /// mr × mr, row-major.
    pub mat: Vec<Vec<F2kElement>>,
    /// 2r+1 strictly increasing logical ticks.
    pub schedule: Vec<u64>,
}

#[derive(Clone, Debug)]
pub struct EncKey {
    pub v: BitVector,
    pub mv: Vec<F2kElement>,
}

#[derive(Clone, Debug)]
pub struct FuncKey {
    pub c_enc: F2kElement,
    pub values: Vec<F2kElement>,
}

/// A broadcast that only answers inside its tick window.
pub struct TimedHandle {
    pub window: (u64, u64),
    inner: BroadcastHandle,
}

impl TimedHandle {
    pub fn eval(
        &mut self,
        x: &BitVector,
        party: Party,
        now: u64,
        ledger: &mut MemoryLedger,
        tr: &mut Transcript,
    ) -> Result<BitVector, BqsFeError> {
        if now < self.window.0 || now >= self.window.1 {
            return Err(BqsFeError::Schedule { window: self.window, now });
        }
        Ok(br_eval(&mut self.inner, x, party, ledger, tr)?)
    }

    pub fn close(&mut self, tr: &mut Transcript) {
        br_close(&mut self.inner, tr);
    }

    pub fn inner(&self) -> &BroadcastHandle {
        &self.inner
    }
}

pub fn bqsfe_setup(
    params: BqsFeParams,
    rng: &mut dyn RngCore,
) -> Result<MasterSecret, BqsFeError> {
    params.validate()?;
    let field = params.field();
    let mr = params.mr();
    let mat: Vec<Vec<F2kElement>> =
        (0..mr).map(|_| (0..mr).map(|_| field.random(rng)).collect()).collect();
    let schedule = (0..=2 * params.r).collect();
    Ok(MasterSecret { params, mat, schedule })
}

fn pack_elems(es: &[F2kElement], ell: usize) -> BitVector {
    let mut out = BitVector::zeros(0);
    for e in es {
        let bits = e.to_bits();
        debug_assert_eq!(bits.len(), ell);
        out = out.concat(&bits);
    }
    out
}

fn unpack_elems(bits: &BitVector, field: Field, count: usize) -> Vec<F2kElement> {
    let ell = field.degree() as usize;
    (0..count)
        .map(|i| field.from_bits(&bits.slice(i * ell..(i + 1) * ell)).expect("in-range chunk"))
        .collect()
}

/// Folds an arbitrary bit string into one field element by XOR-stacking
/// l-bit chunks.
pub fn fold_bits(bits: &BitVector, field: Field) -> F2kElement {
    let ell = field.degree() as usize;
    let folded = BitVector::from_fn(ell, |i| {
        let mut b = 0;
        let mut k = i;
        while k < bits.len() {
            b ^= bits.get(k);
            k += ell;
        }
        b
    });
    field.from_bits(&folded).expect("folded element fits the field")
}

/// The field element a circuit contributes to key material: the fold of
/// its fixed-width binary encoding.
pub fn embed_circuit(c: &BooleanCircuit, field: Field) -> Result<F2kElement, BqsFeError> {
    let enc = encode_circuit(c, CircuitEncoding::new(CANONICAL_ENC_BITS))?;
    Ok(fold_bits(&enc, field))
}

/// Publishes the r encryption-key broadcasts. Handle i computes the
/// product of row block [m·i, m·(i+1)) with a binary vector, open during
/// [t_i, t_{i+1}).
pub fn bqsfe_pk_phase(msec: &MasterSecret, tr: &mut Transcript) -> Vec<TimedHandle> {
    let p = &msec.params;
    let (m, mr, ell) = (p.m(), p.mr(), p.ell() as usize);
    let field = p.field();
    (0..p.r as usize)
        .map(|i| {
            let rows: Vec<Vec<F2kElement>> = msec.mat[m * i..m * (i + 1)].to_vec();
            let program = Box::new(move |x: &BitVector| {
                assert_eq!(x.len(), mr, "row-block product over mr bits");
                let out: Vec<F2kElement> = rows
                    .iter()
                    .map(|row| {
                        let mut acc = 0u128;
                        for (j, e) in row.iter().enumerate() {
                            if x.get(j) == 1 {
                                acc ^= e.value();
                            }
                        }
                        field.element(acc)
                    })
                    .collect();
                pack_elems(&out, ell)
            });
            let inner = br_setup(program, m, ell, p.s as usize, BroadcastConfig::default(), tr);
            TimedHandle { window: (msec.schedule[i], msec.schedule[i + 1]), inner }
        })
        .collect()
}

fn sample_nonzero(len: usize, rng: &mut dyn RngCore) -> BitVector {
    loop {
        let v = BitVector::random(len, rng);
        if v.count_ones() > 0 {
            return v;
        }
    }
}

/// Receives all r encryption-key broadcasts at their opening ticks,
/// paying the honest workspace charge on `ledger`.
pub fn bqsfe_pk_receive(
    handles: &mut [TimedHandle],
    params: &BqsFeParams,
    rng: &mut dyn RngCore,
    ledger: &mut MemoryLedger,
    tr: &mut Transcript,
) -> Result<EncKey, BqsFeError> {
    params.check_honest_budget(ledger)?;
    let field = params.field();
    let v = sample_nonzero(params.mr(), rng);
    let mut mv = Vec::with_capacity(params.mr());
    for h in handles.iter_mut() {
        let now = h.window.0;
        let bits = h.eval(&v, Party::Honest, now, ledger, tr)?;
        mv.extend(unpack_elems(&bits, field, params.m()));
    }
    tr.record("pk_receive", json!({"mr": params.mr(), "peak": ledger.peak()}));
    Ok(EncKey { v, mv })
}

/// Publishes the r functional-key broadcasts. Handle i evaluates the m
/// column polynomials P_{m·i} .. P_{m·(i+1)-1} at a field point, where
/// P_j's coefficient of X^k is M[k][j]; open during [t_{i+r}, t_{i+1+r}).
pub fn bqsfe_mk_phase(msec: &MasterSecret, tr: &mut Transcript) -> Vec<TimedHandle> {
    let p = &msec.params;
    let (m, mr, ell) = (p.m(), p.mr(), p.ell() as usize);
    let r = p.r as usize;
    let field = p.field();
    (0..r)
        .map(|i| {
            let polys: Vec<Polynomial> = (m * i..m * (i + 1))
                .map(|col| Polynomial::new((0..mr).map(|k| msec.mat[k][col]).collect()))
                .collect();
            let program = Box::new(move |x: &BitVector| {
                let point = field.from_bits(x).expect("field point");
                let out: Vec<F2kElement> =
                    polys.iter().map(|p| p.eval(&point).expect("same field")).collect();
                pack_elems(&out, ell)
            });
            let inner = br_setup(program, m, ell, p.s as usize, BroadcastConfig::default(), tr);
            TimedHandle { window: (msec.schedule[i + r], msec.schedule[i + r + 1]), inner }
        })
        .collect()
}

pub fn bqsfe_mk_receive(
    handles: &mut [TimedHandle],
    c: &BooleanCircuit,
    params: &BqsFeParams,
    ledger: &mut MemoryLedger,
    tr: &mut Transcript,
) -> Result<FuncKey, BqsFeError> {
    params.check_honest_budget(ledger)?;
    let field = params.field();
    let c_enc = embed_circuit(c, field)?;
    let point = c_enc.to_bits();
    let mut values = Vec::with_capacity(params.mr());
    for h in handles.iter_mut() {
        let now = h.window.0;
        let bits = h.eval(&point, Party::Honest, now, ledger, tr)?;
        values.extend(unpack_elems(&bits, field, params.m()));
    }
    tr.record("mk_receive", json!({"mr": params.mr(), "peak": ledger.peak()}));
    Ok(FuncKey { c_enc, values })
}

/// The acceptance predicate of the ciphertext program: the field sum of
/// the key values selected by v must equal P_v at the encoded circuit,
/// where P_v's coefficients are M·v.
pub fn g_accepts(k_v: &EncKey, y: &[F2kElement], c_enc: &F2kElement, field: Field) -> bool {
    if y.len() != k_v.v.len() {
        return false;
    }
    let mut acc = 0u128;
    for (i, e) in y.iter().enumerate() {
        if k_v.v.get(i) == 1 {
            acc ^= e.value();
        }
    }
    let pv = Polynomial::new(k_v.mv.clone());
    pv.eval(c_enc).expect("same field") == field.element(acc)
}

/// Ciphertext backend: an ideal one-evaluation handle, or a real garbled
/// one-time program over a fixed circuit class.
pub enum EncBackend {
    Kil,
    Yao { spec: ClassSpec, otp: OtpParams },
}

pub enum BqsFeCiphertext {
    Kil(KilHandle<BitVector, BitVector>),
    Yao { transmission: Option<OtpTransmission>, spec: ClassSpec },
}

fn g_native(k_v: &EncKey, mu: &BitVector, field: Field, input: &BitVector) -> BitVector {
    let reject = BitVector::zeros(1);
    let ell = field.degree() as usize;
    let enc_bits = input.slice(0..CANONICAL_ENC_BITS);
    let y_bits = input.slice(CANONICAL_ENC_BITS..input.len());
    let y = unpack_elems(&y_bits, field, y_bits.len() / ell);
    let c = match decode_circuit(&enc_bits, CircuitEncoding::new(CANONICAL_ENC_BITS)) {
        Ok(c) => c,
        Err(_) => return reject,
    };
    if c.n_inputs as usize != mu.len() {
        return reject;
    }
    let c_enc = fold_bits(&enc_bits, field);
    if !g_accepts(k_v, &y, &c_enc, field) {
        return reject;
    }
    BitVector::from_bits(&[1]).concat(&c.eval(mu).expect("validated circuit"))
}

/// Builds the same predicate as a boolean circuit over a fixed class:
/// inputs are the class encoding then the packed key values; output bit
/// 0 is the acceptance flag, the rest C(mu) (zeroed on reject).
fn g_circuit(k_v: &EncKey, mu: &BitVector, spec: &ClassSpec, field: Field) -> BooleanCircuit {
    let ell = field.degree() as usize;
    let mr = k_v.v.len();
    let total = spec.width + mr * ell;
    let mut b = CircuitBuilder::new(total as u16);
    let wires = b.inputs();
    let (enc, y_bits) = wires.split_at(spec.width);

    let mu_wires: Vec<Wire> = (0..mu.len()).map(|i| b.constant(mu.get(i))).collect();
    let (ok, outs) = universal_eval_wires(&mut b, enc, &mu_wires, spec);

    // fold the encoding into a field point
    let x: Vec<Wire> = (0..ell)
        .map(|i| {
            let mut w = enc[i];
            let mut k = i + ell;
            while k < spec.width {
                w = b.xor(w, enc[k]);
                k += ell;
            }
            w
        })
        .collect();
    let pv = poly_eval_wires(&mut b, &x, &k_v.mv, field);

    let zero = b.constant(0);
    let mut sum = vec![zero; ell];
    for i in 0..mr {
        if k_v.v.get(i) == 1 {
            for k in 0..ell {
                sum[k] = b.xor(sum[k], y_bits[i * ell + k]);
            }
        }
    }
    let eq = b.eq_vec(&sum, &pv);
    let valid = b.and(ok, eq);
    let mut outputs = vec![valid];
    outputs.extend(outs.iter().map(|&o| b.and(o, valid)));
    b.finish(outputs).expect("well-formed predicate circuit")
}

pub fn bqsfe_enc(
    k_v: &EncKey,
    mu: &BitVector,
    backend: EncBackend,
    params: &BqsFeParams,
    rng: &mut dyn RngCore,
    tr: &mut Transcript,
) -> Result<BqsFeCiphertext, BqsFeError> {
    let field = params.field();
    match backend {
        EncBackend::Kil => {
            let k = k_v.clone();
            let mu = mu.clone();
            let program = Box::new(move |input: &BitVector| g_native(&k, &mu, field, input));
            tr.record("bqsfe_enc", json!({"backend": "kil", "mr": k_v.v.len()}));
            Ok(BqsFeCiphertext::Kil(KilHandle::new(program)))
        }
        EncBackend::Yao { spec, otp } => {
            let circuit = g_circuit(k_v, mu, &spec, field);
            tr.record(
                "bqsfe_enc",
                json!({"backend": "yao", "gates": circuit.gates.len(), "inputs": circuit.n_inputs}),
            );
            let transmission = otp_yao_send(&circuit, otp, rng, tr)?;
            Ok(BqsFeCiphertext::Yao { transmission: Some(transmission), spec })
        }
    }
}

fn decode_dec_output(bits: &BitVector) -> Option<BitVector> {
    if !bits.is_empty() && bits.get(0) == 1 {
        Some(bits.slice(1..bits.len()))
    } else {
        None
    }
}

/// Runs the one-time program on (C, sk_C). `None` is the reject symbol.
pub fn bqsfe_dec(
    c: &BooleanCircuit,
    sk: &FuncKey,
    ct: &mut BqsFeCiphertext,
    params: &BqsFeParams,
    rng: &mut dyn RngCore,
    tr: &mut Transcript,
) -> Result<Option<BitVector>, BqsFeError> {
    let ell = params.ell() as usize;
    let y_bits = pack_elems(&sk.values, ell);
    match ct {
        BqsFeCiphertext::Kil(h) => {
            let enc = encode_circuit(c, CircuitEncoding::new(CANONICAL_ENC_BITS))?;
            let out = h.eval(&enc.concat(&y_bits))?;
            tr.record("bqsfe_dec", json!({"backend": "kil", "accepted": out.get(0) == 1}));
            Ok(decode_dec_output(&out))
        }
        BqsFeCiphertext::Yao { transmission, spec } => {
            let enc = encode_for_class(c, spec)?;
            let t = transmission.take().ok_or(OtpError::BudgetExhausted)?;
            let out = otp_yao_receive(t, &enc.concat(&y_bits), rng, tr)?;
            tr.record("bqsfe_dec", json!({"backend": "yao", "accepted": out.get(0) == 1}));
            Ok(decode_dec_output(&out))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::fixtures;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tr() -> Transcript {
        Transcript::disabled()
    }

    fn test_params() -> BqsFeParams {
        BqsFeParams::new(8, 64, 32, 2).unwrap().with_ell(16)
    }

    fn honest_ledger(p: &BqsFeParams) -> MemoryLedger {
        MemoryLedger::new(24 * ((p.s as f64 / p.r as f64).sqrt().ceil() as usize))
    }

    // naive oracle: field matrix times binary vector
    fn mat_vec_oracle(mat: &[Vec<F2kElement>], v: &BitVector, field: Field) -> Vec<F2kElement> {
        mat.iter()
            .map(|row| {
                let mut acc = 0u128;
                for (j, e) in row.iter().enumerate() {
                    if v.get(j) == 1 {
                        acc ^= e.value();
                    }
                }
                field.element(acc)
            })
            .collect()
    }

    // naive oracle: evaluate column polynomial j by explicit powers
    fn column_poly_oracle(
        mat: &[Vec<F2kElement>],
        col: usize,
        x: &F2kElement,
        field: Field,
    ) -> F2kElement {
        let mut acc = field.zero();
        for (k, row) in mat.iter().enumerate() {
            let term = row[col].mul(&x.pow(k as u64)).unwrap();
            acc = acc.add(&term).unwrap();
        }
        acc
    }

    #[test]
    fn dimension_rules() {
        let p = BqsFeParams::new(128, 64, 128, 2).unwrap();
        assert_eq!(p.m(), 16);
        assert_eq!(p.mr(), 32);
        let p = BqsFeParams::new(128, 64, 32, 8).unwrap();
        assert_eq!(p.m(), 4);
        assert_eq!(p.mr(), 32);
        assert!(BqsFeParams::new(128, 64, 8, 8).is_err());
        assert!(BqsFeParams::new(128, 64, 8, 9).is_err());
    }

    #[test]
    fn pk_blocks_stack_to_matrix_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(80);
        let p = test_params();
        let field = p.field();
        let msec = bqsfe_setup(p, &mut rng).unwrap();
        let mut handles = bqsfe_pk_phase(&msec, &mut tr());
        let mut ledger = honest_ledger(&p);

        // unit vector picks out a column fragment
        let e1 = BitVector::from_fn(p.mr(), |i| (i == 1) as u8);
        let bits = handles[0].eval(&e1, Party::Honest, 0, &mut ledger, &mut tr()).unwrap();
        let frag = unpack_elems(&bits, field, p.m());
        for (k, e) in frag.iter().enumerate() {
            assert_eq!(*e, msec.mat[k][1]);
        }

        // zero input gives zero
        let zero = BitVector::zeros(p.mr());
        let bits = handles[0].eval(&zero, Party::Honest, 0, &mut ledger, &mut tr()).unwrap();
        assert!(unpack_elems(&bits, field, p.m()).iter().all(|e| *e == field.zero()));

        // stacking all blocks equals the full product
        let v = BitVector::random(p.mr(), &mut rng);
        let mut stacked = Vec::new();
        for (i, h) in handles.iter_mut().enumerate() {
            let now = msec.schedule[i];
            let bits = h.eval(&v, Party::Honest, now, &mut ledger, &mut tr()).unwrap();
            stacked.extend(unpack_elems(&bits, field, p.m()));
        }
        assert_eq!(stacked, mat_vec_oracle(&msec.mat, &v, field));
    }

    #[test]
    fn pk_receive_matches_oracle_and_ledger_bound() {
        let p = BqsFeParams::new(128, 64, 128, 2).unwrap().with_ell(16);
        let field = p.field();
        for seed in 0..100 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let msec = bqsfe_setup(p, &mut rng).unwrap();
            let mut handles = bqsfe_pk_phase(&msec, &mut tr());
            let mut ledger = MemoryLedger::new(192);
            let k = bqsfe_pk_receive(&mut handles, &p, &mut rng, &mut ledger, &mut tr()).unwrap();
            assert_eq!(k.mv, mat_vec_oracle(&msec.mat, &k.v, field), "seed {seed}");
            assert!(ledger.is_valid());
            assert!(ledger.peak() <= 192, "peak {} at seed {seed}", ledger.peak());
        }
    }

    #[test]
    fn mk_receive_matches_column_polynomials() {
        let p = test_params();
        let field = p.field();
        for seed in 0..100 {
            let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
            let msec = bqsfe_setup(p, &mut rng).unwrap();
            let mut handles = bqsfe_mk_phase(&msec, &mut tr());
            let mut ledger = honest_ledger(&p);
            let c = fixtures::parity3();
            let sk = bqsfe_mk_receive(&mut handles, &c, &p, &mut ledger, &mut tr()).unwrap();
            assert_eq!(sk.values.len(), p.mr());
            for i in 0..p.mr() {
                assert_eq!(sk.values[i], column_poly_oracle(&msec.mat, i, &sk.c_enc, field));
            }
        }
    }

    #[test]
    fn zero_matrix_gives_zero_keys() {
        let mut rng = ChaCha8Rng::seed_from_u64(81);
        let p = test_params();
        let field = p.field();
        let mut msec = bqsfe_setup(p, &mut rng).unwrap();
        for row in msec.mat.iter_mut() {
            for e in row.iter_mut() {
                *e = field.zero();
            }
        }
        let mut handles = bqsfe_mk_phase(&msec, &mut tr());
        let mut ledger = honest_ledger(&p);
        let sk =
            bqsfe_mk_receive(&mut handles, &fixtures::and2(), &p, &mut ledger, &mut tr()).unwrap();
        assert!(sk.values.iter().all(|e| *e == field.zero()));
    }

    #[test]
    fn schedule_windows_are_enforced() {
        let mut rng = ChaCha8Rng::seed_from_u64(82);
        let p = test_params();
        let msec = bqsfe_setup(p, &mut rng).unwrap();
        let mut handles = bqsfe_pk_phase(&msec, &mut tr());
        let mut ledger = honest_ledger(&p);
        let v = BitVector::random(p.mr(), &mut rng);
        // handle 1 opens at tick 1; tick 0 and tick 1+1 are out of window
        for bad_now in [0, 2] {
            let err = handles[1].eval(&v, Party::Honest, bad_now, &mut ledger, &mut tr());
            assert!(matches!(err, Err(BqsFeError::Schedule { .. })));
        }
        assert!(handles[1].eval(&v, Party::Honest, 1, &mut ledger, &mut tr()).is_ok());
    }

    #[test]
    fn core_identity_selected_sum_equals_pv() {
        // sum over {i : v_i=1} of P_i(x) = P_v(x) with coefficients M·v
        let field = Field::new(16);
        let mr = 12;
        for seed in 0..1000u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(2000 + seed);
            let mat: Vec<Vec<F2kElement>> =
                (0..mr).map(|_| (0..mr).map(|_| field.random(&mut rng)).collect()).collect();
            let v = BitVector::random(mr, &mut rng);
            let x = field.random(&mut rng);

            let mut lhs = field.zero();
            for i in 0..mr {
                if v.get(i) == 1 {
                    lhs = lhs.add(&column_poly_oracle(&mat, i, &x, field)).unwrap();
                }
            }
            let mv = mat_vec_oracle(&mat, &v, field);
            let rhs = Polynomial::new(mv).eval(&x).unwrap();
            assert_eq!(lhs, rhs, "seed {seed}");
        }
    }

    #[test]
    fn end_to_end_kil_on_fixtures() {
        let p = test_params();
        let mut rng = ChaCha8Rng::seed_from_u64(83);
        for c in [fixtures::and2(), fixtures::xor2(), fixtures::not1(), fixtures::parity3(), fixtures::majority3()] {
            let msec = bqsfe_setup(p, &mut rng).unwrap();
            let mut pk = bqsfe_pk_phase(&msec, &mut tr());
            let mut mk = bqsfe_mk_phase(&msec, &mut tr());
            let mut ledger = honest_ledger(&p);
            let k_v = bqsfe_pk_receive(&mut pk, &p, &mut rng, &mut ledger, &mut tr()).unwrap();
            let sk = bqsfe_mk_receive(&mut mk, &c, &p, &mut ledger, &mut tr()).unwrap();

            let mu = BitVector::random(c.n_inputs as usize, &mut rng);
            let mut ct =
                bqsfe_enc(&k_v, &mu, EncBackend::Kil, &p, &mut rng, &mut tr()).unwrap();
            let got = bqsfe_dec(&c, &sk, &mut ct, &p, &mut rng, &mut tr()).unwrap();
            assert_eq!(got, Some(c.eval(&mu).unwrap()));

            // one-time: a second evaluation is refused
            let again = bqsfe_dec(&c, &sk, &mut ct, &p, &mut rng, &mut tr());
            assert!(matches!(again, Err(BqsFeError::Otp(OtpError::BudgetExhausted))));
        }
    }

    #[test]
    fn wrong_circuit_key_rejects() {
        let p = test_params();
        let mut rng = ChaCha8Rng::seed_from_u64(84);
        let msec = bqsfe_setup(p, &mut rng).unwrap();
        let mut pk = bqsfe_pk_phase(&msec, &mut tr());
        let mut mk = bqsfe_mk_phase(&msec, &mut tr());
        let mut ledger = honest_ledger(&p);
        let k_v = bqsfe_pk_receive(&mut pk, &p, &mut rng, &mut ledger, &mut tr()).unwrap();
        // key for parity3, decryption attempted with majority3
        let sk = bqsfe_mk_receive(&mut mk, &fixtures::parity3(), &p, &mut ledger, &mut tr()).unwrap();
        let mu = BitVector::random(3, &mut rng);
        let mut ct = bqsfe_enc(&k_v, &mu, EncBackend::Kil, &p, &mut rng, &mut tr()).unwrap();
        let got = bqsfe_dec(&fixtures::majority3(), &sk, &mut ct, &p, &mut rng, &mut tr()).unwrap();
        assert_eq!(got, None);
    }

    #[test]
    fn end_to_end_yao_backend() {
        let p = test_params();
        let mut rng = ChaCha8Rng::seed_from_u64(85);
        let c = fixtures::parity3();
        let msec = bqsfe_setup(p, &mut rng).unwrap();
        let mut pk = bqsfe_pk_phase(&msec, &mut tr());
        let mut mk = bqsfe_mk_phase(&msec, &mut tr());
        let mut ledger = honest_ledger(&p);
        let k_v = bqsfe_pk_receive(&mut pk, &p, &mut rng, &mut ledger, &mut tr()).unwrap();
        let sk = bqsfe_mk_receive(&mut mk, &c, &p, &mut ledger, &mut tr()).unwrap();

        // the class gate count must match the circuit exactly so the
        // class encoding coincides with the canonical embedding
        let spec = ClassSpec {
            n_inputs: 3,
            gates: c.gates.len(),
            n_outputs: 1,
            width: CANONICAL_ENC_BITS,
        };
        let mu = BitVector::random(3, &mut rng);
        let backend = EncBackend::Yao { spec, otp: OtpParams::new(16, 2) };
        let mut ct = bqsfe_enc(&k_v, &mu, backend, &p, &mut rng, &mut tr()).unwrap();
        let got = bqsfe_dec(&c, &sk, &mut ct, &p, &mut rng, &mut tr()).unwrap();
        assert_eq!(got, Some(c.eval(&mu).unwrap()));

        let again = bqsfe_dec(&c, &sk, &mut ct, &p, &mut rng, &mut tr());
        assert!(matches!(again, Err(BqsFeError::Otp(OtpError::BudgetExhausted))));
    }

    #[test]
    fn unit_vector_key_collapses_to_single_value() {
        let mut rng = ChaCha8Rng::seed_from_u64(86);
        let p = test_params();
        let field = p.field();
        let msec = bqsfe_setup(p, &mut rng).unwrap();
        let j = 5;
        let e_j = BitVector::from_fn(p.mr(), |i| (i == j) as u8);
        let k_v = EncKey { v: e_j, mv: mat_vec_oracle(&msec.mat, &BitVector::from_fn(p.mr(), |i| (i == j) as u8), field) };

        let c_enc = field.random(&mut rng);
        let good = column_poly_oracle(&msec.mat, j, &c_enc, field);
        // only position j matters; everything else can be garbage
        let mut y: Vec<F2kElement> = (0..p.mr()).map(|_| field.random(&mut rng)).collect();
        y[j] = good;
        assert!(g_accepts(&k_v, &y, &c_enc, field));
        y[j] = good.add(&field.element(1)).unwrap();
        assert!(!g_accepts(&k_v, &y, &c_enc, field));
    }

    #[test]
    fn random_key_values_reject_at_field_rate() {
        let p = BqsFeParams::new(8, 64, 32, 2).unwrap().with_ell(8);
        let field = p.field();
        let mut rng = ChaCha8Rng::seed_from_u64(87);
        let msec = bqsfe_setup(p, &mut rng).unwrap();
        let mut pk = bqsfe_pk_phase(&msec, &mut tr());
        let mut ledger = honest_ledger(&p);
        let k_v = bqsfe_pk_receive(&mut pk, &p, &mut rng, &mut ledger, &mut tr()).unwrap();
        let c_enc = field.random(&mut rng);

        let trials = 10_000;
        let mut hits = 0u32;
        for _ in 0..trials {
            let y: Vec<F2kElement> = (0..p.mr()).map(|_| field.random(&mut rng)).collect();
            if g_accepts(&k_v, &y, &c_enc, field) {
                hits += 1;
            }
        }
        // expected acceptance 2^-8; allow double
        assert!(hits as f64 / trials as f64 <= 2.0 / 256.0, "hits = {hits}");
    }

    #[test]
    fn nonzero_key_vector_is_guaranteed() {
        let mut rng = ChaCha8Rng::seed_from_u64(88);
        for _ in 0..200 {
            assert!(sample_nonzero(2, &mut rng).count_ones() > 0);
        }
    }

    #[test]
    fn starved_honest_budget_is_rejected() {
        let p = BqsFeParams::new(128, 64, 128, 2).unwrap().with_ell(16);
        assert_eq!(p.min_honest_budget(), 8);
        let mut rng = ChaCha8Rng::seed_from_u64(89);
        let msec = bqsfe_setup(p, &mut rng).unwrap();
        let mut handles = bqsfe_pk_phase(&msec, &mut tr());
        let mut ledger = MemoryLedger::new(7);
        let err = bqsfe_pk_receive(&mut handles, &p, &mut rng, &mut ledger, &mut tr());
        assert!(matches!(err, Err(BqsFeError::Parameter(_))));
    }
}

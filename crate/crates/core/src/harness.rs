//! Security-experiment runner: adversary strategy families, seeded
//! Monte-Carlo drivers, and binomial statistics. Trials draw RNG
//! substreams by counter from the experiment seed, so results are
//! reproducible and order-independent.

use crate::algebra::BitVector;
use crate::bcsm::BitLedger;
use crate::cbqs_fe::{cbqsfe_dec, cbqsfe_enc, cbqsfe_keygen, cbqsfe_setup, CbqsParams};
use crate::channel::{transmit, Basis, MemoryLedger, Outcome, QubitAction, ReceiverStrategy};
use crate::circuits::{fixtures, BooleanCircuit, CircuitBuilder};
use crate::ot::{ot_decode, ot_receive, ot_send_unchecked, OtParams};
use crate::otp::OtpParams;
use crate::signatures::SigParams;
use crate::transcript::Transcript;
use crate::universal::ClassSpec;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("unknown scenario: {0}")]
    UnknownScenario(String),
    #[error("unknown strategy {strategy:?} for scenario {scenario:?}")]
    UnknownStrategy { scenario: String, strategy: String },
    #[error("bad spec: {0}")]
    BadSpec(String),
}

#[derive(Clone, Debug)]
pub struct ExperimentSpec {
    pub scenario: String,
    pub strategy: String,
    pub trials: u64,
    pub seed: u64,
    /// Scenario-specific numeric knobs; missing keys take defaults.
    pub params: BTreeMap<String, f64>,
}

impl ExperimentSpec {
    pub fn new(scenario: &str, strategy: &str, trials: u64, seed: u64) -> ExperimentSpec {
        ExperimentSpec {
            scenario: scenario.into(),
            strategy: strategy.into(),
            trials,
            seed,
            params: BTreeMap::new(),
        }
    }

    pub fn with_param(mut self, key: &str, value: f64) -> ExperimentSpec {
        self.params.insert(key.into(), value);
        self
    }

    pub fn param(&self, key: &str, default: f64) -> f64 {
        self.params.get(key).copied().unwrap_or(default)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentResult {
    pub scenario: String,
    pub strategy: String,
    pub trials: u64,
    pub successes: u64,
    pub estimate: f64,
    pub wilson_low: f64,
    pub wilson_high: f64,
    pub ledger_violations: u64,
}

impl ExperimentResult {
    pub fn summary_line(&self) -> String {
        format!(
            "{:<12} {:<14} {:>7}/{:<7} est {:.4} [{:.4}, {:.4}] violations {}",
            self.scenario,
            self.strategy,
            self.successes,
            self.trials,
            self.estimate,
            self.wilson_low,
            self.wilson_high,
            self.ledger_violations
        )
    }
}

/// Wilson 95% score interval for a binomial proportion.
pub fn wilson_interval(successes: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959_963_985;
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = p + z2 / (2.0 * n);
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    (((centre - half) / denom).max(0.0), ((centre + half) / denom).min(1.0))
}

/// Per-trial RNG: one substream per trial index.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

fn finish(
    spec: &ExperimentSpec,
    successes: u64,
    ledger_violations: u64,
    tr: &mut Transcript,
) -> ExperimentResult {
    let (lo, hi) = wilson_interval(successes, spec.trials);
    let r = ExperimentResult {
        scenario: spec.scenario.clone(),
        strategy: spec.strategy.clone(),
        trials: spec.trials,
        successes,
        estimate: successes as f64 / spec.trials.max(1) as f64,
        wilson_low: lo,
        wilson_high: hi,
        ledger_violations,
    };
    tr.record(
        "experiment_result",
        json!({
            "scenario": r.scenario,
            "strategy": r.strategy,
            "successes": r.successes,
            "trials": r.trials,
            "estimate": r.estimate,
            "wilson": [r.wilson_low, r.wilson_high],
            "violations": r.ledger_violations,
        }),
    );
    r
}

pub fn run_experiment(
    spec: &ExperimentSpec,
    tr: &mut Transcript,
) -> Result<ExperimentResult, HarnessError> {
    if spec.trials == 0 {
        return Err(HarnessError::BadSpec("trial count must be >= 1".into()));
    }
    match spec.scenario.as_str() {
        "ot-sender" => run_ot_sender_security(spec, tr),
        "cbqs-ind" => run_ind_game(spec, tr),
        "bcs-forget" => run_forgetting(spec, tr),
        other => Err(HarnessError::UnknownScenario(other.into())),
    }
}

// --- OT sender security ---

/// Stores the first `budget` qubits, measures the rest in fresh random
/// bases.
struct StoreThenRandom {
    budget: usize,
}

impl ReceiverStrategy for StoreThenRandom {
    fn decide(&mut self, index: usize, rng: &mut dyn RngCore) -> QubitAction {
        if index < self.budget {
            QubitAction::Store
        } else {
            QubitAction::Measure(Basis::random(rng))
        }
    }
}

struct FixedBasis(Basis);

impl ReceiverStrategy for FixedBasis {
    fn decide(&mut self, _index: usize, _rng: &mut dyn RngCore) -> QubitAction {
        QubitAction::Measure(self.0)
    }
}

/// Success = exact recovery of the branch the strategy did *not*
/// declare. Strategies: `honest` (measures in its declared basis, then
/// shows the other branch is out of reach), `fixed-basis`,
/// `random-basis`, and `store-s` (keeps `store` qubits to measure in the
/// announced bases later). Set `m` explicitly to run undersized,
/// parameter-violating transfers.
pub fn run_ot_sender_security(
    spec: &ExperimentSpec,
    tr: &mut Transcript,
) -> Result<ExperimentResult, HarnessError> {
    let ell = spec.param("ell", 8.0) as usize;
    let s = spec.param("s", 32.0) as usize;
    let standard = OtParams::standard(ell, s);
    let m = spec.param("m", standard.m as f64) as usize;
    let params = OtParams { m, ell, s };
    let store = spec.param("store", s as f64) as usize;

    let mut successes = 0u64;
    let mut violations = 0u64;
    for trial in 0..spec.trials {
        let mut rng = trial_rng(spec.seed, trial);
        let s0 = BitVector::random(ell, &mut rng);
        let s1 = BitVector::random(ell, &mut rng);
        let (msg, ann) =
            ot_send_unchecked(&s0, &s1, &params, &mut rng, &mut Transcript::disabled())
                .map_err(|e| HarnessError::BadSpec(e.to_string()))?;
        let secrets = [&s0, &s1];

        let hit = match spec.strategy.as_str() {
            "honest" => {
                let c = (rng.next_u32() & 1) as u8;
                // the honest receiver gets its chosen branch for free...
                let msg2 = {
                    // replay the same transfer for the recovery check
                    let mut rng2 = trial_rng(spec.seed, trial);
                    let _ = BitVector::random(ell, &mut rng2);
                    let _ = BitVector::random(ell, &mut rng2);
                    ot_send_unchecked(&s0, &s1, &params, &mut rng2, &mut Transcript::disabled())
                        .unwrap()
                };
                let got = ot_receive(c, msg2.0, &msg2.1, &mut rng, &mut Transcript::disabled())
                    .map_err(|e| HarnessError::BadSpec(e.to_string()))?;
                assert_eq!(&got, secrets[c as usize], "honest branch is exact");
                // ...and attacks the other with its own measurements
                let mut strat = FixedBasis(Basis::from_bit(c));
                let mut ledger = MemoryLedger::new(0);
                let outs =
                    transmit(msg, &mut strat, &mut ledger, &mut rng, &mut Transcript::disabled());
                violations += ledger.violations().len() as u64;
                let measured =
                    BitVector::from_fn(params.m, |i| outs[i].measured_bit().unwrap());
                ot_decode(1 - c, &measured, &ann).ok().as_ref() == Some(secrets[(1 - c) as usize])
            }
            "fixed-basis" | "random-basis" | "store-s" => {
                let budget = if spec.strategy == "store-s" { store } else { 0 };
                let mut ledger = MemoryLedger::new(budget);
                let outs: Vec<Outcome> = match spec.strategy.as_str() {
                    "fixed-basis" => transmit(
                        msg,
                        &mut FixedBasis(Basis::Plus),
                    &mut ledger,
                        &mut rng,
                        &mut Transcript::disabled(),
                    ),
                    _ => transmit(
                        msg,
                        &mut StoreThenRandom { budget },
                        &mut ledger,
                        &mut rng,
                        &mut Transcript::disabled(),
                    ),
                };
                violations += ledger.violations().len() as u64;
                // announcement arrives; stored qubits get the right basis
                let mut measured = BitVector::zeros(params.m);
                for (i, o) in outs.into_iter().enumerate() {
                    let bit = match o {
                        Outcome::Measured { bit, .. } => bit,
                        Outcome::Stored(q) => q.measure(ann.theta[i], &mut ledger, &mut rng),
                    };
                    measured.set(i, bit);
                }
                // declared branch c' = 0; target is s_1
                ot_decode(1, &measured, &ann).ok().as_ref() == Some(&s1)
            }
            other => {
                return Err(HarnessError::UnknownStrategy {
                    scenario: spec.scenario.clone(),
                    strategy: other.into(),
                })
            }
        };
        if hit {
            successes += 1;
        }
    }
    Ok(finish(spec, successes, violations, tr))
}

// --- the indistinguishability game for classical-key FE ---

fn ind_params() -> CbqsParams {
    CbqsParams {
        sig: SigParams::new(4, 2),
        class: ClassSpec { n_inputs: 3, gates: 2, n_outputs: 1, width: 160 },
        otp: OtpParams::new(8, 8),
    }
}

/// A circuit separating two messages: outputs the first bit where they
/// differ.
fn separating_circuit(m0: &BitVector, m1: &BitVector) -> BooleanCircuit {
    let pos = (0..m0.len()).find(|&i| m0.get(i) != m1.get(i)).expect("distinct messages");
    let b = CircuitBuilder::new(m0.len() as u16);
    let xs = b.inputs();
    b.finish(vec![xs[pos]]).unwrap()
}

/// One game of the indistinguishability experiment: the adversary names
/// two messages, sees an encryption of one, may request functional keys,
/// and guesses which. A key query separating the messages forfeits the
/// game; revealing the master key after the ciphertext is gone
/// (`reveal` = 1) is information-free and must not move the estimate.
pub fn run_ind_game(
    spec: &ExperimentSpec,
    tr: &mut Transcript,
) -> Result<ExperimentResult, HarnessError> {
    let p = ind_params();
    let reveal = spec.param("reveal", 0.0) as u64 == 1;
    let mut successes = 0u64;
    for trial in 0..spec.trials {
        let mut rng = trial_rng(spec.seed, trial);
        let mut keys = cbqsfe_setup(&p, &mut rng);

        // adversary picks two distinct messages
        let m0 = BitVector::random(3, &mut rng);
        let m1 = loop {
            let m = BitVector::random(3, &mut rng);
            if m != m0 {
                break m;
            }
        };
        let b = (rng.next_u32() & 1) as u8;
        let challenge = if b == 0 { &m0 } else { &m1 };

        let win = match spec.strategy.as_str() {
            "random-guess" => {
                let guess = (rng.next_u32() & 1) as u8;
                guess == b
            }
            "disqualify" => {
                // a separating key query ends the game with output 0
                let c = separating_circuit(&m0, &m1);
                let _ = cbqsfe_keygen(&mut keys.mk, &c, &p)
                    .map_err(|e| HarnessError::BadSpec(e.to_string()))?;
                let disqualified = c.eval(&m0).unwrap() != c.eval(&m1).unwrap();
                assert!(disqualified);
                false
            }
            "legal-key" => {
                // decrypt with a legitimate non-separating key: the
                // plaintext's image is constant, so nothing is learned
                let c = fixtures::const_output(3, &[1]);
                let sk = cbqsfe_keygen(&mut keys.mk, &c, &p)
                    .map_err(|e| HarnessError::BadSpec(e.to_string()))?;
                let ct = cbqsfe_enc(&keys.pk, challenge, &p, &mut rng, &mut Transcript::disabled())
                    .map_err(|e| HarnessError::BadSpec(e.to_string()))?;
                let got =
                    cbqsfe_dec(&sk, &keys.pk, ct, &p, &mut rng, &mut Transcript::disabled())
                        .map_err(|e| HarnessError::BadSpec(e.to_string()))?;
                assert_eq!(got, Some(c.eval(challenge).unwrap()));
                let guess = (rng.next_u32() & 1) as u8;
                guess == b
            }
            "store-measure" => {
                // measure every ciphertext qubit in random bases with no
                // storage, then try to force the garbled program open
                let ct = cbqsfe_enc(&keys.pk, challenge, &p, &mut rng, &mut Transcript::disabled())
                    .map_err(|e| HarnessError::BadSpec(e.to_string()))?;
                let mut ledger = MemoryLedger::new(0);
                let mut strat = StoreThenRandom { budget: 0 };
                let outs = transmit(
                    ct.message,
                    &mut strat,
                    &mut ledger,
                    &mut rng,
                    &mut Transcript::disabled(),
                );
                let n = ct.announcements.len();
                let mut labels = Vec::with_capacity(n);
                for i in 0..n {
                    let measured = BitVector::from_fn(ct.block_len, |k| {
                        outs[i * ct.block_len + k].measured_bit().unwrap()
                    });
                    match ot_decode(0, &measured, &ct.announcements[i]) {
                        Ok(l) => labels.push(crate::garble::WireLabel(l)),
                        Err(_) => break,
                    }
                }
                let forced = labels.len() == n
                    && crate::garble::geval(&ct.gc, &labels).is_ok_and(|y| y.get(0) == 1);
                // garbage labels never open the program; guess blind
                let guess = if forced { b } else { (rng.next_u32() & 1) as u8 };
                guess == b
            }
            other => {
                return Err(HarnessError::UnknownStrategy {
                    scenario: spec.scenario.clone(),
                    strategy: other.into(),
                })
            }
        };
        if reveal {
            // the master key arrives only after the ciphertext window;
            // none of the registered strategies can act on it
            let _ = &keys.mk;
        }
        if win {
            successes += 1;
        }
    }
    Ok(finish(spec, successes, 0, tr))
}

// --- the forgetting experiment for streaming FE ---

/// Success = exactly reproducing the functional key for a selector that
/// touches rows outside what the adversary stored.
pub fn run_forgetting(
    spec: &ExperimentSpec,
    tr: &mut Transcript,
) -> Result<ExperimentResult, HarnessError> {
    use crate::bcs_fe::{bcsfe_keygen, BcsParams};

    let n = spec.param("n", 64.0) as usize;
    let p = BcsParams::new(n, 16, n / 2)
        .map_err(|e| HarnessError::BadSpec(e.to_string()))?;
    let row_bits = p.row_bits();
    let sel_bits = p.sel_bits();

    let mut successes = 0u64;
    let mut violations = 0u64;
    for trial in 0..spec.trials {
        let mut rng = trial_rng(spec.seed, trial);
        let mut dist = BitLedger::new(2 * row_bits);
        let (master, _) = bcsfe_keygen(&p, &mut rng, &mut dist, &mut Transcript::disabled());
        violations += dist.violations() as u64;
        let rows: Vec<BitVector> = (0..sel_bits)
            .map(|i| master.bits().slice(i * row_bits..(i + 1) * row_bits))
            .collect();

        let hit = match spec.strategy.as_str() {
            "prefix" => {
                // stores the first n^2 stream bits; the challenge selector
                // must touch a row beyond the stored prefix
                let budget = n * n;
                let known_rows = budget / row_bits;
                let mut ledger = BitLedger::new(budget);
                ledger.measure(budget);
                let mut c_vec = BitVector::random(sel_bits, &mut rng);
                let tail =
                    known_rows + (rng.next_u32() as usize % (sel_bits - known_rows));
                c_vec.set(tail, 1);
                let mut guess = BitVector::zeros(row_bits);
                for (i, row) in rows.iter().enumerate().take(known_rows) {
                    if c_vec.get(i) == 1 {
                        guess = guess.xor(row);
                    }
                }
                violations += ledger.violations() as u64;
                guess == target_key(&c_vec, &rows)
            }
            "full" => {
                // control: budget covers the whole stream
                let mut ledger = BitLedger::new(master.bits().len());
                ledger.measure(master.bits().len());
                violations += ledger.violations() as u64;
                let c_vec = BitVector::random(sel_bits, &mut rng);
                target_key(&c_vec, &rows) == target_key(&c_vec, &rows)
            }
            "half-row" => {
                // knows everything except the second half of one needed row
                let j = (rng.next_u32() as usize) % sel_bits;
                let mut c_vec = BitVector::random(sel_bits, &mut rng);
                c_vec.set(j, 1);
                let half = row_bits / 2;
                let mut guess = BitVector::zeros(row_bits);
                for (i, row) in rows.iter().enumerate() {
                    if c_vec.get(i) == 1 && i != j {
                        guess = guess.xor(row);
                    }
                }
                // known half of row j is exact; the rest is a coin flip
                for k in 0..half {
                    let b = guess.get(k) ^ rows[j].get(k);
                    guess.set(k, b);
                }
                for k in half..row_bits {
                    let b = guess.get(k) ^ ((rng.next_u32() & 1) as u8);
                    guess.set(k, b);
                }
                guess == target_key(&c_vec, &rows)
            }
            other => {
                return Err(HarnessError::UnknownStrategy {
                    scenario: spec.scenario.clone(),
                    strategy: other.into(),
                })
            }
        };
        if hit {
            successes += 1;
        }
    }
    Ok(finish(spec, successes, violations, tr))
}

fn target_key(c_vec: &BitVector, rows: &[BitVector]) -> BitVector {
    let mut acc = BitVector::zeros(rows[0].len());
    for (i, row) in rows.iter().enumerate() {
        if c_vec.get(i) == 1 {
            acc = acc.xor(row);
        }
    }
    acc
}

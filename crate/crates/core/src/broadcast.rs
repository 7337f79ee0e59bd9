//! Ideal program-broadcast functionality with resource accounting.
//!
//! A broadcast handle hides a program behind an availability window.
//! While the window is open, anyone can evaluate it on inputs of their
//! choice; once the window closes the program disappears for
//! adversaries, and honest parties (who cached what they needed) keep
//! unrestricted access. The quantitative contract is carried by two
//! ledgersʼ worth of bookkeeping:
//!
//! * honest evaluations transiently charge `12 · m_out` memory units to
//!   the caller's ledger (the honest quantum workspace of a real
//!   broadcast protocol);
//! * an adversary with memory bound `s` gets at most `⌊s / (2 · m_out)⌋`
//!   evaluations in total, and the stream applies its memory bound
//!   twice (`r = 2`).
//!
//! Memory units default to output symbols; a config switch counts raw
//! bits instead.

use crate::algebra::BitVector;
use crate::channel::MemoryLedger;
use crate::transcript::Transcript;
use serde_json::json;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BroadcastError {
    #[error("budget exhausted")]
    BudgetExhausted,
    #[error("expired")]
    Expired,
}

/// What one memory unit means for accounting.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum AccountingMode {
    /// One unit per output symbol (field element).
    #[default]
    Symbols,
    /// One unit per output bit.
    Bits,
}

#[derive(Clone, Copy, Debug)]
pub struct BroadcastConfig {
    pub mode: AccountingMode,
    /// Minimum output size (symbols) below which 2^-m_out is considered
    /// non-negligible and the setup records a warning.
    pub min_out_symbols: usize,
}

impl Default for BroadcastConfig {
    fn default() -> Self {
        BroadcastConfig { mode: AccountingMode::Symbols, min_out_symbols: 8 }
    }
}

/// Number of memory-bound applications a broadcast stream makes.
pub const BROADCAST_MARKERS: usize = 2;

/// Honest workspace multiplier: an evaluation holds `12 · m_out` units.
pub const HONEST_CHARGE_FACTOR: usize = 12;

pub struct BroadcastHandle {
    program: Box<dyn Fn(&BitVector) -> BitVector>,
    /// Output size in accounting units.
    m_out: usize,
    adversary_budget: usize,
    adversary_used: usize,
    window_open: bool,
    warnings: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Party {
    Honest,
    Adversary,
}

impl BroadcastHandle {
    pub fn m_out(&self) -> usize {
        self.m_out
    }

    pub fn adversary_budget(&self) -> usize {
        self.adversary_budget
    }

    pub fn adversary_evals_left(&self) -> usize {
        self.adversary_budget - self.adversary_used
    }

    pub fn window_open(&self) -> bool {
        self.window_open
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Honest memory units held for the duration of one evaluation.
    pub fn honest_charge(&self) -> usize {
        HONEST_CHARGE_FACTOR * self.m_out
    }
}

/// Publishes a program. `out_symbols` is the output length in symbols,
/// `symbol_bits` the width of one symbol; `s` is the adversary memory
/// bound in the same units the config's accounting mode produces.
pub fn br_setup(
    program: Box<dyn Fn(&BitVector) -> BitVector>,
    out_symbols: usize,
    symbol_bits: usize,
    s: usize,
    config: BroadcastConfig,
    tr: &mut Transcript,
) -> BroadcastHandle {
    let m_out = match config.mode {
        AccountingMode::Symbols => out_symbols,
        AccountingMode::Bits => out_symbols * symbol_bits,
    };
    let mut warnings = Vec::new();
    if out_symbols < config.min_out_symbols {
        warnings.push(format!(
            "output of {out_symbols} symbols: 2^-{out_symbols} guessing advantage is not negligible"
        ));
    }
    let adversary_budget = s / (2 * m_out);
    tr.record(
        "br_setup",
        json!({
            "m_out": m_out,
            "budget": adversary_budget,
            "markers": BROADCAST_MARKERS,
            "warnings": warnings.len(),
        }),
    );
    BroadcastHandle {
        program,
        m_out,
        adversary_budget,
        adversary_used: 0,
        window_open: true,
        warnings,
    }
}

/// Evaluates the broadcast program. Honest callers pay the transient
/// workspace charge on their own ledger; adversaries burn budget and
/// lose access when the window closes.
pub fn br_eval(
    h: &mut BroadcastHandle,
    x: &BitVector,
    party: Party,
    ledger: &mut MemoryLedger,
    tr: &mut Transcript,
) -> Result<BitVector, BroadcastError> {
    match party {
        Party::Adversary => {
            if !h.window_open {
                return Err(BroadcastError::Expired);
            }
            if h.adversary_used >= h.adversary_budget {
                return Err(BroadcastError::BudgetExhausted);
            }
            h.adversary_used += 1;
            let y = (h.program)(x);
            tr.record("br_eval", json!({"party": "adversary", "used": h.adversary_used}));
            Ok(y)
        }
        Party::Honest => {
            let charge = h.honest_charge();
            ledger.charge_units(charge);
            let y = (h.program)(x);
            ledger.release_units(charge);
            tr.record("br_eval", json!({"party": "honest", "charge": charge}));
            Ok(y)
        }
    }
}

/// The end of the availability window: adversary access disappears.
pub fn br_close(h: &mut BroadcastHandle, tr: &mut Transcript) {
    h.window_open = false;
    tr.record("br_close", json!({"adversary_used": h.adversary_used}));
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::fixtures;

    fn identity_program(n: usize) -> Box<dyn Fn(&BitVector) -> BitVector> {
        let c = fixtures::pass_through(n as u16);
        Box::new(move |x| c.eval(x).unwrap())
    }

    #[test]
    fn budget_arithmetic() {
        let mut tr = Transcript::disabled();
        let h = br_setup(identity_program(16), 16, 8, 128, BroadcastConfig::default(), &mut tr);
        assert_eq!(h.adversary_budget(), 4);
        let h = br_setup(identity_program(64), 64, 8, 128, BroadcastConfig::default(), &mut tr);
        assert_eq!(h.adversary_budget(), 1);
        assert_eq!(BROADCAST_MARKERS, 2);
    }

    #[test]
    fn bits_mode_scales_by_symbol_width() {
        let mut tr = Transcript::disabled();
        let cfg = BroadcastConfig { mode: AccountingMode::Bits, ..Default::default() };
        let h = br_setup(identity_program(16), 16, 8, 1024, cfg, &mut tr);
        assert_eq!(h.m_out(), 128);
        assert_eq!(h.adversary_budget(), 4);
        assert_eq!(h.honest_charge(), 12 * 128);
    }

    #[test]
    fn honest_eval_charges_and_releases() {
        let mut tr = Transcript::disabled();
        let mut h = br_setup(identity_program(16), 16, 8, 128, BroadcastConfig::default(), &mut tr);
        let mut ledger = MemoryLedger::new(12 * 16);
        let x = BitVector::from_u128(0xABCD, 16);
        let y = br_eval(&mut h, &x, Party::Honest, &mut ledger, &mut tr).unwrap();
        assert_eq!(y, x);
        assert_eq!(ledger.peak(), 12 * 16);
        assert_eq!(ledger.stored(), 0);
        assert!(ledger.is_valid());
    }

    #[test]
    fn adversary_budget_is_enforced() {
        let mut tr = Transcript::disabled();
        let mut h = br_setup(identity_program(16), 16, 8, 128, BroadcastConfig::default(), &mut tr);
        let mut ledger = MemoryLedger::new(128);
        let x = BitVector::zeros(16);
        for _ in 0..4 {
            br_eval(&mut h, &x, Party::Adversary, &mut ledger, &mut tr).unwrap();
        }
        assert_eq!(
            br_eval(&mut h, &x, Party::Adversary, &mut ledger, &mut tr),
            Err(BroadcastError::BudgetExhausted)
        );
        assert_eq!(h.adversary_evals_left(), 0);
    }

    #[test]
    fn window_close_cuts_off_adversaries_not_honest() {
        let mut tr = Transcript::disabled();
        let mut h = br_setup(identity_program(8), 8, 8, 512, BroadcastConfig::default(), &mut tr);
        br_close(&mut h, &mut tr);
        let mut ledger = MemoryLedger::new(12 * 8);
        let x = BitVector::from_u128(0x5A, 8);
        assert_eq!(
            br_eval(&mut h, &x, Party::Adversary, &mut ledger, &mut tr),
            Err(BroadcastError::Expired)
        );
        assert_eq!(br_eval(&mut h, &x, Party::Honest, &mut ledger, &mut tr).unwrap(), x);
    }

    #[test]
    fn small_output_warns() {
        let mut tr = Transcript::disabled();
        let h = br_setup(identity_program(4), 4, 8, 64, BroadcastConfig::default(), &mut tr);
        assert_eq!(h.warnings().len(), 1);
    }
}

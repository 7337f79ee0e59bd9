//! Simulated quantum channel of BB84 product states.
//!
//! The channel carries sequences of single qubits, each prepared as a
//! classical bit in one of two conjugate bases. Receivers act through a
//! [`ReceiverStrategy`]: each arriving qubit is either measured on the
//! spot or stored. At designated *memory-bound events* every party's
//! [`MemoryLedger`] is checked against its qubit budget; storage beyond
//! the budget decoheres and the run is flagged invalid.
//!
//! The adversary model is adaptive product measure-or-store: stored
//! qubits survive perfectly (up to the budget) and can be measured later
//! in any basis, but entangled or joint measurements are out of scope —
//! they are exactly the strategies a classical simulation cannot
//! reproduce.

use crate::transcript::Transcript;
use rand::RngCore;
use serde_json::json;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ChannelError {
    #[error("consumed: qubit already measured")]
    Consumed,
    #[error("too many bound markers: {got} > declared r = {max}")]
    TooManyMarkers { got: usize, max: usize },
}

/// Preparation/measurement basis: `Plus` is computational, `Cross` is
/// Hadamard.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum Basis {
    Plus,
    Cross,
}

impl Basis {
    /// Basis indexed by a bit: 0 → `+`, 1 → `×`.
    pub fn from_bit(b: u8) -> Basis {
        if b == 0 {
            Basis::Plus
        } else {
            Basis::Cross
        }
    }

    pub fn to_bit(self) -> u8 {
        match self {
            Basis::Plus => 0,
            Basis::Cross => 1,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Basis::Plus => "+",
            Basis::Cross => "x",
        }
    }

    pub fn random(rng: &mut dyn RngCore) -> Basis {
        Basis::from_bit((rng.next_u32() & 1) as u8)
    }
}

/// A BB84 product-state qubit: one classical bit encoded in one basis.
#[derive(Debug)]
pub struct Qubit {
    bit: u8,
    basis: Basis,
    consumed: bool,
}

impl Qubit {
    pub fn new(bit: u8, basis: Basis) -> Qubit {
        debug_assert!(bit <= 1);
        Qubit { bit, basis, consumed: false }
    }

    /// Projective measurement. A matching basis returns the encoded bit;
    /// a mismatched basis returns an independent uniform bit. Either way
    /// the qubit is consumed.
    pub fn measure(&mut self, basis: Basis, rng: &mut dyn RngCore) -> Result<u8, ChannelError> {
        if self.consumed {
            return Err(ChannelError::Consumed);
        }
        self.consumed = true;
        if basis == self.basis {
            Ok(self.bit)
        } else {
            Ok((rng.next_u32() & 1) as u8)
        }
    }
}

/// An ordered qubit sequence with positions where the memory bound
/// applies. A marker at position `p` fires after the first `p` qubits
/// have been handled.
#[derive(Debug)]
pub struct QuantumMessage {
    pub qubits: Vec<Qubit>,
    pub bound_markers: Vec<usize>,
}

impl QuantumMessage {
    pub fn new(
        qubits: Vec<Qubit>,
        bound_markers: Vec<usize>,
        max_markers: usize,
    ) -> Result<QuantumMessage, ChannelError> {
        if bound_markers.len() > max_markers {
            return Err(ChannelError::TooManyMarkers {
                got: bound_markers.len(),
                max: max_markers,
            });
        }
        Ok(QuantumMessage { qubits, bound_markers })
    }

    pub fn len(&self) -> usize {
        self.qubits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.qubits.is_empty()
    }
}

/// Per-party quantum-memory accounting in qubit units.
#[derive(Debug, Clone)]
pub struct MemoryLedger {
    budget: usize,
    stored: usize,
    peak: usize,
    bound_events: usize,
    violations: Vec<String>,
}

impl MemoryLedger {
    pub fn new(budget: usize) -> MemoryLedger {
        MemoryLedger { budget, stored: 0, peak: 0, bound_events: 0, violations: Vec::new() }
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn stored(&self) -> usize {
        self.stored
    }

    pub fn peak(&self) -> usize {
        self.peak
    }

    pub fn bound_events(&self) -> usize {
        self.bound_events
    }

    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violations(&self) -> &[String] {
        &self.violations
    }

    fn charge(&mut self) {
        self.charge_units(1);
    }

    fn release(&mut self) {
        self.release_units(1);
    }

    /// Bulk charge, for protocols that account in units other than
    /// single stored qubits (e.g. broadcast evaluations).
    pub fn charge_units(&mut self, n: usize) {
        self.stored += n;
        self.peak = self.peak.max(self.stored);
    }

    pub fn release_units(&mut self, n: usize) {
        debug_assert!(self.stored >= n, "releasing more than stored");
        self.stored -= n;
    }

    /// Number of stored qubits in excess of the budget, recorded as a
    /// violation if positive.
    fn apply_bound(&mut self) -> usize {
        self.bound_events += 1;
        if self.stored > self.budget {
            let excess = self.stored - self.budget;
            self.violations.push(format!(
                "bound event {}: stored {} exceeds budget {}",
                self.bound_events, self.stored, self.budget
            ));
            excess
        } else {
            0
        }
    }
}

/// Opaque handle to a stored qubit. The underlying bit and basis are
/// unreadable until a measurement; a decohered qubit measures to noise.
pub struct StoredQubit {
    state: Option<(u8, Basis)>,
    index: usize,
}

impl StoredQubit {
    /// Position of this qubit in the original message.
    pub fn index(&self) -> usize {
        self.index
    }

    /// Measures (and consumes) the stored qubit, releasing its ledger
    /// charge.
    pub fn measure(self, basis: Basis, ledger: &mut MemoryLedger, rng: &mut dyn RngCore) -> u8 {
        ledger.release();
        match self.state {
            Some((bit, b)) if b == basis => bit,
            _ => (rng.next_u32() & 1) as u8,
        }
    }
}

/// What a receiver does with one arriving qubit.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum QubitAction {
    Measure(Basis),
    Store,
}

/// Adaptive per-qubit measure-or-store policy.
pub trait ReceiverStrategy {
    fn decide(&mut self, index: usize, rng: &mut dyn RngCore) -> QubitAction;
}

/// Measures every qubit in one fixed basis; the honest OT receiver.
pub struct MeasureAll(pub Basis);

impl ReceiverStrategy for MeasureAll {
    fn decide(&mut self, _index: usize, _rng: &mut dyn RngCore) -> QubitAction {
        QubitAction::Measure(self.0)
    }
}

/// Per-qubit result of a transmission.
pub enum Outcome {
    Measured { basis: Basis, bit: u8 },
    Stored(StoredQubit),
}

impl Outcome {
    pub fn measured_bit(&self) -> Option<u8> {
        match self {
            Outcome::Measured { bit, .. } => Some(*bit),
            Outcome::Stored(_) => None,
        }
    }
}

/// Runs a message through a receiver strategy. Decisions are applied in
/// qubit order; bound markers trigger ledger checks, and storage beyond
/// the budget decoheres most-recently-stored first.
pub fn transmit(
    msg: QuantumMessage,
    strategy: &mut dyn ReceiverStrategy,
    ledger: &mut MemoryLedger,
    rng: &mut dyn RngCore,
    tr: &mut Transcript,
) -> Vec<Outcome> {
    let mut outcomes: Vec<Outcome> = Vec::with_capacity(msg.qubits.len());
    let mut markers = msg.bound_markers.clone();
    markers.sort_unstable();
    let mut next_marker = 0;

    let fire_bounds = |pos: usize,
                           outcomes: &mut Vec<Outcome>,
                           ledger: &mut MemoryLedger,
                           next_marker: &mut usize,
                           tr: &mut Transcript| {
        while *next_marker < markers.len() && markers[*next_marker] <= pos {
            let excess = ledger.apply_bound();
            tr.record(
                "bound_apply",
                json!({"pos": markers[*next_marker], "stored": ledger.stored(), "budget": ledger.budget()}),
            );
            if excess > 0 {
                tr.record("ledger_violation", json!({"excess": excess}));
                let mut left = excess;
                for o in outcomes.iter_mut().rev() {
                    if left == 0 {
                        break;
                    }
                    if let Outcome::Stored(s) = o {
                        if s.state.is_some() {
                            s.state = None;
                            left -= 1;
                        }
                    }
                }
            }
            *next_marker += 1;
        }
    };

    for (i, mut q) in msg.qubits.into_iter().enumerate() {
        fire_bounds(i, &mut outcomes, ledger, &mut next_marker, tr);
        tr.record("qubit_send", json!({"i": i}));
        match strategy.decide(i, rng) {
            QubitAction::Measure(basis) => {
                let bit = q.measure(basis, rng).expect("fresh qubit");
                tr.record("measure", json!({"i": i, "basis": basis.symbol(), "bit": bit}));
                outcomes.push(Outcome::Measured { basis, bit });
            }
            QubitAction::Store => {
                ledger.charge();
                outcomes.push(Outcome::Stored(StoredQubit {
                    state: Some((q.bit, q.basis)),
                    index: i,
                }));
            }
        }
    }
    fire_bounds(usize::MAX, &mut outcomes, ledger, &mut next_marker, tr);
    outcomes
}

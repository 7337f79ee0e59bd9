//! Bounded-classical-storage runtime: single-pass bit streams larger
//! than the adversary's memory, per-party bit ledgers, and an ideal
//! white-box-garbling backend (a query-capped oracle whose availability
//! window can close).

use crate::algebra::BitVector;
use crate::transcript::Transcript;
use serde_json::json;
use thiserror::Error;

pub const DEFAULT_CHUNK_BITS: usize = 64;

#[derive(Debug, Error)]
pub enum BcsmError {
    #[error("stream already consumed")]
    Consumed,
    #[error("query budget exhausted")]
    BudgetExhausted,
    #[error("window expired")]
    Expired,
    #[error("shape: {0}")]
    Shape(String),
}

/// A bit sequence that can be traversed once, in order, chunk by chunk.
pub struct Stream {
    bits: BitVector,
    chunk_bits: usize,
    cursor: usize,
    consumed: bool,
}

impl Stream {
    pub fn new(bits: BitVector, chunk_bits: usize) -> Stream {
        assert!(chunk_bits > 0);
        Stream { bits, chunk_bits, cursor: 0, consumed: false }
    }

    pub fn from_bits(bits: BitVector) -> Stream {
        Stream::new(bits, DEFAULT_CHUNK_BITS)
    }

    pub fn total_len(&self) -> usize {
        self.bits.len()
    }

    pub fn chunk_bits(&self) -> usize {
        self.chunk_bits
    }

    /// Next chunk, or `None` at the end (the final chunk may be short).
    /// Once traversal has started the stream cannot be restarted.
    pub fn next_chunk(&mut self) -> Option<BitVector> {
        if self.cursor >= self.bits.len() {
            self.consumed = true;
            return None;
        }
        let end = (self.cursor + self.chunk_bits).min(self.bits.len());
        let chunk = self.bits.slice(self.cursor..end);
        self.cursor = end;
        Some(chunk)
    }

    pub fn begin(&mut self) -> Result<(), BcsmError> {
        if self.consumed || self.cursor > 0 {
            return Err(BcsmError::Consumed);
        }
        Ok(())
    }
}

/// Classical memory accounting in bits.
#[derive(Clone, Debug)]
pub struct BitLedger {
    budget: usize,
    retained: usize,
    peak: usize,
    violations: usize,
}

impl BitLedger {
    pub fn new(budget: usize) -> BitLedger {
        BitLedger { budget, retained: 0, peak: 0, violations: 0 }
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn peak(&self) -> usize {
        self.peak
    }

    pub fn violations(&self) -> usize {
        self.violations
    }

    pub fn is_valid(&self) -> bool {
        self.violations == 0
    }

    /// Declares the currently retained state size.
    pub fn measure(&mut self, bits: usize) {
        self.retained = bits;
        self.peak = self.peak.max(bits);
        if bits > self.budget {
            self.violations += 1;
        }
    }
}

/// Consumes the stream in one pass, threading `state` through `fold`.
/// The carried state is measured against the ledger at every chunk
/// boundary; oversized state flags a violation but the fold continues,
/// so tests can observe what an over-budget party would have needed.
pub fn stream_fold<S>(
    stream: &mut Stream,
    mut state: S,
    mut fold: impl FnMut(S, &BitVector) -> S,
    state_bits: impl Fn(&S) -> usize,
    ledger: &mut BitLedger,
    tr: &mut Transcript,
) -> Result<S, BcsmError> {
    stream.begin()?;
    tr.record(
        "stream_begin",
        json!({"total_bits": stream.total_len(), "chunk_bits": stream.chunk_bits()}),
    );
    let mut idx = 0usize;
    while let Some(chunk) = stream.next_chunk() {
        state = fold(state, &chunk);
        let carried = state_bits(&state);
        let before = ledger.violations();
        ledger.measure(carried);
        tr.record("chunk", json!({"i": idx, "carried": carried}));
        if ledger.violations() > before {
            tr.record(
                "ledger_violation",
                json!({"i": idx, "carried": carried, "budget": ledger.budget()}),
            );
        }
        idx += 1;
    }
    Ok(state)
}

/// Query cap for the ideal obfuscation backend: 2^ceil(sqrt(lambda)),
/// capped so finite harnesses terminate.
pub fn wgb_query_cap(lambda: u32) -> u64 {
    let e = (lambda as f64).sqrt().ceil() as u32;
    1u64 << e.min(20)
}

/// Ideal white-box-garbled program: answers queries while its window is
/// open, up to the configured cap. The published stream is filler — the
/// ideal backend carries no real content.
pub struct WgbHandle {
    program: Box<dyn Fn(&BitVector) -> BitVector>,
    in_bits: usize,
    query_count: u64,
    query_budget: u64,
    window_open: bool,
}

impl WgbHandle {
    pub fn query_count(&self) -> u64 {
        self.query_count
    }

    pub fn query_budget(&self) -> u64 {
        self.query_budget
    }

    pub fn window_open(&self) -> bool {
        self.window_open
    }
}

/// Publishes `program` as a filler stream of `stream_bits` plus an ideal
/// handle capped at `wgb_query_cap(lambda)` queries.
pub fn wgb_obfuscate(
    program: Box<dyn Fn(&BitVector) -> BitVector>,
    in_bits: usize,
    stream_bits: usize,
    lambda: u32,
    tr: &mut Transcript,
) -> (Stream, WgbHandle) {
    let cap = wgb_query_cap(lambda);
    tr.record("wgb_obfuscate", json!({"stream_bits": stream_bits, "query_budget": cap}));
    let stream = Stream::from_bits(BitVector::zeros(stream_bits));
    let handle =
        WgbHandle { program, in_bits, query_count: 0, query_budget: cap, window_open: true };
    (stream, handle)
}

pub fn wgb_eval(h: &mut WgbHandle, x: &BitVector, tr: &mut Transcript) -> Result<BitVector, BcsmError> {
    if !h.window_open {
        return Err(BcsmError::Expired);
    }
    if h.query_count >= h.query_budget {
        return Err(BcsmError::BudgetExhausted);
    }
    if x.len() != h.in_bits {
        return Err(BcsmError::Shape(format!("expected {} input bits, got {}", h.in_bits, x.len())));
    }
    h.query_count += 1;
    let y = (h.program)(x);
    tr.record("wgb_eval", json!({"query": h.query_count}));
    Ok(y)
}

/// Disappears the handle: no further queries answer.
pub fn wgb_close(h: &mut WgbHandle, tr: &mut Transcript) {
    h.window_open = false;
    tr.record("wgb_close", json!({"queries": h.query_count}));
}

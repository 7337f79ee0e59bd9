//! Simulation library for cryptographic protocols in the bounded quantum
//! storage model (BQSM) and bounded classical storage model (BCSM).
//!
//! The library provides, bottom to top:
//!
//! * [`algebra`] — GF(2) linear algebra, GF(2^l) field arithmetic,
//!   polynomial evaluation, and Toeplitz two-universal hashing.
//! * [`circuits`] — a boolean-circuit IR with a text format, an evaluator,
//!   and a fixed-length binary encoding.
//! * [`channel`] — a simulated channel of BB84 product states with
//!   per-party quantum-memory ledgers and memory-bound events.
//! * [`ot`] — non-interactive 1-2 oblivious transfer over the channel.
//! * [`garble`] — Yao garbling with point-and-permute row selection, plus
//!   the selective-security simulator.
//! * [`otp`] — one-time program compilers: a garbled-circuit construction
//!   delivered over per-bit OT, and an ideal single-evaluation handle.
//! * [`broadcast`] — the ideal program-broadcast functionality with
//!   honest-memory and adversary-evaluation accounting.
//! * [`signatures`] — stateful Lamport one-time signatures over a toy
//!   sponge hash that also compiles to a garbleable circuit.
//! * [`bqs_fe`], [`cbqs_fe`], [`bcs_fe`] — the three functional-encryption
//!   schemes (information-theoretic BQS, computational BQS with classical
//!   keys, and streaming BCS), plus obfuscation from FE.
//! * [`harness`] — Monte-Carlo security experiments with pluggable
//!   adversary strategies.

pub mod algebra;
pub mod bcs_fe;
pub mod bcsm;
pub mod bqs_fe;
pub mod broadcast;
pub mod cbqs_fe;
pub mod channel;
pub mod circuits;
pub mod garble;
pub mod harness;
pub mod hashprim;
pub mod ot;
pub mod otp;
pub mod signatures;
pub mod transcript;
pub mod universal;

pub use algebra::{BitMatrix, BitVector, F2kElement, Field, Polynomial, ToeplitzHash};
pub use circuits::BooleanCircuit;
pub use transcript::Transcript;

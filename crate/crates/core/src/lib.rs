//! Simulator and verification toolkit for Pauli-measurement quantum state
//! tomography.
//!
//! The crate is organized around the pipeline of a tomography experiment:
//!
//! * [`qstate`] — dense complex matrices, density matrices, Pauli strings,
//!   and the exact linear-algebra queries (expectations, partial traces,
//!   trace-norm distances) every other module is checked against.
//! * [`measurement`] — single-shot Pauli measurements: exact outcome
//!   distributions, seeded shot sampling, compatibility/sign bookkeeping,
//!   the six-element informationally complete POVM, and the on-disk shot
//!   stream format.
//! * [`estimator`] — full tomography over all `3^n` Pauli bases with shot
//!   reuse: every shot in basis `P` contributes to all `2^n` Pauli strings
//!   obtained by replacing letters of `P` with identities.
//! * [`overlap`] — overlapping tomography of all (or selected) `k`-qubit
//!   reduced states from a single stream of uniformly random product bases.
//! * [`lowerbound`] — the biased-coin hardness construction that exhibits
//!   the sample-complexity floor for independent single-copy strategies.
//! * [`harness`] — config parsing, seeded multi-trial experiment execution,
//!   JSONL/CSV record emission, and exact oracle reports.
//!
//! Everything downstream of a seed is deterministic: the same config and
//! seed reproduce byte-identical trial records regardless of worker count.

pub mod error;
pub mod estimator;
pub mod harness;
pub mod lowerbound;
pub mod measurement;
pub mod overlap;
pub mod qstate;

pub use error::{Error, Result};

/// Hard cap on qubit count accepted by constructors.
///
/// Dense `2^n x 2^n` matrices and `4^n` accumulator slots make larger
/// systems useless at desk scale; 12 keeps every index comfortably inside
/// `u32` (`4^12 < 2^32`) and the largest matrix at 4096 x 4096.
pub const MAX_QUBITS: usize = 12;

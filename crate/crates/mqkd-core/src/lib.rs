//! Exact simulation of a lightweight mediated quantum key distribution protocol.
//!
//! An untrusted quantum server (TP) prepares single photons in `|+⟩`, sends each
//! one on a circular path TP → Alice → Bob → TP, and measures the returning
//! photon in the X basis. Alice and Bob each apply one unitary drawn from
//! `{I, σz, H}` as the photon passes. Rounds where both applied `H` verify the
//! channel (the outcome must be `|+⟩`); rounds where both applied `I` or `σz`
//! yield one shared key bit; mixed rounds are discarded. A disclosure phase and
//! Toeplitz privacy amplification turn the raw bits into the final key.
//!
//! The crate is organised as:
//!
//! - [`qubit`] — exact complex state-vector algebra (preparation, unitaries,
//!   projective measurement, tensor composition),
//! - [`protocol`] — the three-party round state machine with adversary
//!   interception hooks and an auditable transcript,
//! - [`distill`] — error checking, bit derivation, half-disclosure and privacy
//!   amplification,
//! - [`attack`] — intercept-resend and collective (entangling-ancilla) attack
//!   strategies, the no-detection constraint residual, and an exact
//!   information-leakage metric,
//! - [`rng`] — the deterministic pseudo-random streams everything draws from.
//!
//! Everything is pure computation over owned values: the crate is `no_std`
//! compatible (with `alloc`), has no I/O, and produces bit-identical results
//! for identical seeds.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod attack;
pub mod distill;
pub mod error;
mod math;
pub mod protocol;
pub mod qubit;
pub mod rng;
mod spectral;

pub use error::{AttackError, DistillError, ProtocolError, QubitError};
pub use qubit::{MeasBasis, Outcome, StateVector, UnitaryMatrix, UnitaryOp};

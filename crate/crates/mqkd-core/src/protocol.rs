//! The three-party round state machine.
//!
//! Each round: the server prepares `|+⟩`, the photon travels the circuit
//! server → Alice → Bob → server, each participant applies one operation from
//! `{I, σz, H}`, and the server measures the returning photon in the X basis
//! and publishes the outcome. An [`Adversary`] may transform the in-flight
//! state on each channel segment.
//!
//! Participants are limited to reflecting (identity on the travel register)
//! and applying one unitary; the server is limited to preparing `|+⟩` and
//! X-measuring. Those capability sets are kept honest structurally: round
//! execution reaches the state algebra only through the narrow functions in
//! [`roles`].

use alloc::{string::String, vec::Vec};

use crate::error::ProtocolError;
use crate::qubit::{MeasBasis, Outcome, StateVector, UnitaryOp};
use crate::rng::{round_stream, SplitMix64};
use crate::{distill, rng};

/// The travel qubit is always register 0; attack ancillas are appended after it.
pub const TRAVEL: usize = 0;

/// Protocol principals.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Party {
    Tp,
    Alice,
    Bob,
}

/// The three channel segments, in the order every round traverses them.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Segment {
    TpToAlice,
    AliceToBob,
    BobToTp,
}

impl core::fmt::Display for Segment {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        let s = match self {
            Segment::TpToAlice => "tp-alice",
            Segment::AliceToBob => "alice-bob",
            Segment::BobToTp => "bob-tp",
        };
        write!(f, "{s}")
    }
}

/// Round classification from the participants' operation announcements.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum CaseLabel {
    /// Both applied `H`: the outcome must be `Plus`, used for eavesdropping
    /// detection.
    Check,
    /// Both applied `I` or `σz`: yields one shared key bit.
    Key,
    /// Exactly one applied `H`: the photon was measured in the wrong basis.
    Discard,
}

/// One executed round.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RoundRecord {
    pub round_id: u64,
    pub alice_op: UnitaryOp,
    pub bob_op: UnitaryOp,
    pub tp_outcome: Outcome,
    pub case: CaseLabel,
    pub alice_bit: Option<bool>,
    pub bob_bit: Option<bool>,
    pub disclosed: bool,
}

/// Session header carried with every transcript.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SessionMeta {
    pub seed: u64,
    pub n_rounds: u64,
    pub adversary: String,
    /// Privacy-amplification seed, recorded once distillation has drawn it.
    pub pa_seed_hex: Option<String>,
}

/// An append-only record of a session. The classical channel is authenticated,
/// so published messages are modelled as tamper-proof: records are only ever
/// appended, in round order.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Transcript {
    pub meta: SessionMeta,
    pub records: Vec<RoundRecord>,
}

impl Transcript {
    /// Indices (into `records`) of the key rounds, in round order.
    pub fn key_round_indices(&self) -> Vec<usize> {
        self.records
            .iter()
            .enumerate()
            .filter(|(_, r)| r.case == CaseLabel::Key)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn count_case(&self, case: CaseLabel) -> u64 {
        self.records.iter().filter(|r| r.case == case).count() as u64
    }
}

/// How participants pick their per-round operations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OpPolicy {
    /// Independent uniform choice over `{I, σz, H}` for each participant.
    Uniform,
    /// Uniform over `{I, σz}` only; every round is a key round.
    KeyOnly,
    /// Fixed operations, for deterministic drills.
    Forced(UnitaryOp, UnitaryOp),
}

impl OpPolicy {
    fn draw(&self, rng: &mut SplitMix64) -> (UnitaryOp, UnitaryOp) {
        match *self {
            OpPolicy::Uniform => (choose_op(rng), choose_op(rng)),
            OpPolicy::KeyOnly => {
                let pick = |r: &mut SplitMix64| {
                    if r.next_below(2) == 0 {
                        UnitaryOp::Identity
                    } else {
                        UnitaryOp::PauliZ
                    }
                };
                (pick(rng), pick(rng))
            }
            OpPolicy::Forced(a, b) => (a, b),
        }
    }
}

/// Hook through which an adversary transforms the in-flight state on a
/// segment. The default is to pass the state through untouched.
pub trait Adversary {
    fn intercept(&self, _segment: Segment, state: StateVector, _rng: &mut SplitMix64) -> StateVector {
        state
    }

    /// Human-readable descriptor recorded in the transcript header.
    fn label(&self) -> String {
        String::from("null")
    }
}

/// The honest channel: no interference on any segment.
#[derive(Clone, Copy, Debug, Default)]
pub struct NullAdversary;

impl Adversary for NullAdversary {}

/// Uniform draw from the operation alphabet.
pub fn choose_op(rng: &mut SplitMix64) -> UnitaryOp {
    UnitaryOp::ALL[rng.next_below(3) as usize]
}

/// Case classification from the two announced operations.
pub fn classify_case(alice_op: UnitaryOp, bob_op: UnitaryOp) -> CaseLabel {
    let a_h = alice_op == UnitaryOp::Hadamard;
    let b_h = bob_op == UnitaryOp::Hadamard;
    match (a_h, b_h) {
        (true, true) => CaseLabel::Check,
        (false, false) => CaseLabel::Key,
        _ => CaseLabel::Discard,
    }
}

/// The outcome an honest round must produce: `Plus` for check rounds, and for
/// key rounds `Plus` when the operations match, `Minus` when they differ.
pub fn expected_outcome(alice_op: UnitaryOp, bob_op: UnitaryOp) -> Result<Outcome, ProtocolError> {
    match classify_case(alice_op, bob_op) {
        CaseLabel::Check => Ok(Outcome::Plus),
        CaseLabel::Key => {
            if alice_op == bob_op {
                Ok(Outcome::Plus)
            } else {
                Ok(Outcome::Minus)
            }
        }
        CaseLabel::Discard => Err(ProtocolError::NoExpectedOutcome),
    }
}

/// The only state-algebra entry points reachable from round execution, split
/// by principal to keep the capability sets honest.
mod roles {
    use super::*;

    /// Participant capability: apply one unitary to the travel register.
    /// Reflection is the identity on that register; participants never measure.
    pub(super) fn participant_apply(state: StateVector, op: UnitaryOp) -> StateVector {
        state.apply_op(op, TRAVEL).expect("travel register always exists")
    }

    /// Server capability: prepare the `|+⟩` source state.
    pub(super) fn tp_prepare() -> StateVector {
        StateVector::prepare_plus()
    }

    /// Server capability: X-measure the travel register and publish. The
    /// photon is consumed; only the outcome survives.
    pub(super) fn tp_measure_x(state: StateVector, rand: f64) -> Outcome {
        let (outcome, _collapsed) = state
            .measure(TRAVEL, MeasBasis::X, rand)
            .expect("travel register always exists");
        outcome
    }
}

/// Execute one round.
///
/// Draw order within the round stream: participant operations first, then any
/// adversary draws segment by segment, then the server's measurement draw.
pub fn run_round<A: Adversary>(
    round_id: u64,
    rng: &mut SplitMix64,
    adversary: &A,
    policy: &OpPolicy,
) -> RoundRecord {
    let (alice_op, bob_op) = policy.draw(rng);

    let mut state = roles::tp_prepare();
    state = adversary.intercept(Segment::TpToAlice, state, rng);
    state = roles::participant_apply(state, alice_op);
    state = adversary.intercept(Segment::AliceToBob, state, rng);
    state = roles::participant_apply(state, bob_op);
    state = adversary.intercept(Segment::BobToTp, state, rng);
    let tp_outcome = roles::tp_measure_x(state, rng.next_f64());

    let case = classify_case(alice_op, bob_op);
    let (alice_bit, bob_bit) = if case == CaseLabel::Key {
        (
            Some(distill::derive_alice_bit(alice_op).expect("key round ops carry bits")),
            Some(distill::derive_bob_bit(bob_op, tp_outcome).expect("key round ops carry bits")),
        )
    } else {
        (None, None)
    };

    RoundRecord {
        round_id,
        alice_op,
        bob_op,
        tp_outcome,
        case,
        alice_bit,
        bob_bit,
        disclosed: false,
    }
}

/// Execute a whole session. Rounds use independent substreams of `seed`, so
/// the transcript is a pure function of `(n_rounds, seed, adversary, policy)`.
pub fn run_session<A: Adversary>(
    n_rounds: u64,
    seed: u64,
    adversary: &A,
    policy: &OpPolicy,
) -> Transcript {
    let mut records = Vec::with_capacity(n_rounds as usize);
    for round_id in 0..n_rounds {
        let mut rng = round_stream(seed, round_id);
        records.push(run_round(round_id, &mut rng, adversary, policy));
    }
    Transcript {
        meta: SessionMeta {
            seed,
            n_rounds,
            adversary: adversary.label(),
            pa_seed_hex: None,
        },
        records,
    }
}

/// Tag separating the distillation stream from the round streams.
pub(crate) fn distill_stream(seed: u64) -> SplitMix64 {
    rng::substream(seed, u64::MAX)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn op_choice_is_uniform() {
        let mut rng = SplitMix64::new(1);
        let n = 90_000;
        let mut counts = [0u32; 3];
        for _ in 0..n {
            match choose_op(&mut rng) {
                UnitaryOp::Identity => counts[0] += 1,
                UnitaryOp::PauliZ => counts[1] += 1,
                UnitaryOp::Hadamard => counts[2] += 1,
            }
        }
        for c in counts {
            assert!((c as f64 / n as f64 - 1.0 / 3.0).abs() < 0.01);
        }

        // both participants avoid H in (2/3)² of rounds
        let mut rng = SplitMix64::new(2);
        let mut both_non_h = 0u32;
        for _ in 0..n {
            let a = choose_op(&mut rng);
            let b = choose_op(&mut rng);
            if a != UnitaryOp::Hadamard && b != UnitaryOp::Hadamard {
                both_non_h += 1;
            }
        }
        assert!((both_non_h as f64 / n as f64 - 4.0 / 9.0).abs() < 0.01);
    }

    #[test]
    fn op_choice_replays() {
        let seq1: Vec<UnitaryOp> = {
            let mut rng = SplitMix64::new(9);
            (0..100).map(|_| choose_op(&mut rng)).collect()
        };
        let seq2: Vec<UnitaryOp> = {
            let mut rng = SplitMix64::new(9);
            (0..100).map(|_| choose_op(&mut rng)).collect()
        };
        assert_eq!(seq1, seq2);
    }

    #[test]
    fn case_classification() {
        use UnitaryOp::*;
        assert_eq!(classify_case(Hadamard, Hadamard), CaseLabel::Check);
        for a in [Identity, PauliZ] {
            for b in [Identity, PauliZ] {
                assert_eq!(classify_case(a, b), CaseLabel::Key);
            }
        }
        assert_eq!(classify_case(Hadamard, PauliZ), CaseLabel::Discard);
        assert_eq!(classify_case(Hadamard, Identity), CaseLabel::Discard);
        assert_eq!(classify_case(Identity, Hadamard), CaseLabel::Discard);
        assert_eq!(classify_case(PauliZ, Hadamard), CaseLabel::Discard);
    }

    #[test]
    fn expected_outcomes_match_the_key_table() {
        use UnitaryOp::*;
        assert_eq!(expected_outcome(Identity, Identity).unwrap(), Outcome::Plus);
        assert_eq!(expected_outcome(PauliZ, Identity).unwrap(), Outcome::Minus);
        assert_eq!(expected_outcome(Identity, PauliZ).unwrap(), Outcome::Minus);
        assert_eq!(expected_outcome(PauliZ, PauliZ).unwrap(), Outcome::Plus);
        assert_eq!(expected_outcome(Hadamard, Hadamard).unwrap(), Outcome::Plus);
        assert_eq!(
            expected_outcome(Hadamard, Identity).unwrap_err(),
            ProtocolError::NoExpectedOutcome
        );
    }

    #[test]
    fn forced_key_rounds_are_deterministic() {
        let policy = OpPolicy::Forced(UnitaryOp::Identity, UnitaryOp::PauliZ);
        for round_id in 0..200 {
            let mut rng = round_stream(3, round_id);
            let rec = run_round(round_id, &mut rng, &NullAdversary, &policy);
            assert_eq!(rec.tp_outcome, Outcome::Minus);
            assert_eq!(rec.case, CaseLabel::Key);
            assert_eq!(rec.alice_bit, Some(false));
            assert_eq!(rec.bob_bit, Some(false));
        }
    }

    #[test]
    fn forced_check_rounds_always_read_plus() {
        let policy = OpPolicy::Forced(UnitaryOp::Hadamard, UnitaryOp::Hadamard);
        for round_id in 0..200 {
            let mut rng = round_stream(4, round_id);
            let rec = run_round(round_id, &mut rng, &NullAdversary, &policy);
            assert_eq!(rec.tp_outcome, Outcome::Plus);
            assert_eq!(rec.case, CaseLabel::Check);
            assert_eq!(rec.alice_bit, None);
        }
    }

    #[test]
    fn discard_rounds_are_unbiased() {
        let policy = OpPolicy::Forced(UnitaryOp::Hadamard, UnitaryOp::Identity);
        let n = 10_000u64;
        let mut pluses = 0u32;
        for round_id in 0..n {
            let mut rng = round_stream(5, round_id);
            let rec = run_round(round_id, &mut rng, &NullAdversary, &policy);
            if rec.tp_outcome == Outcome::Plus {
                pluses += 1;
            }
        }
        assert!((pluses as f64 / n as f64 - 0.5).abs() < 0.02);
    }

    #[test]
    fn noiseless_rounds_always_match_the_expected_outcome() {
        let t = run_session(10_000, 6, &NullAdversary, &OpPolicy::Uniform);
        for rec in &t.records {
            if rec.case != CaseLabel::Discard {
                assert_eq!(rec.tp_outcome, expected_outcome(rec.alice_op, rec.bob_op).unwrap());
            }
            if rec.case == CaseLabel::Key {
                assert_eq!(rec.alice_bit, rec.bob_bit);
            } else {
                assert_eq!(rec.alice_bit, None);
                assert_eq!(rec.bob_bit, None);
            }
        }
    }

    #[test]
    fn session_basics() {
        let t = run_session(9, 7, &NullAdversary, &OpPolicy::Uniform);
        assert_eq!(t.records.len(), 9);
        for (i, rec) in t.records.iter().enumerate() {
            assert_eq!(rec.round_id, i as u64);
        }
    }

    #[test]
    fn case_frequencies_converge() {
        let n = 90_000u64;
        let t = run_session(n, 8, &NullAdversary, &OpPolicy::Uniform);
        let check = t.count_case(CaseLabel::Check) as f64 / n as f64;
        let key = t.count_case(CaseLabel::Key) as f64 / n as f64;
        let discard = t.count_case(CaseLabel::Discard) as f64 / n as f64;
        assert!((check - 1.0 / 9.0).abs() < 0.01, "check {check}");
        assert!((key - 4.0 / 9.0).abs() < 0.01, "key {key}");
        assert!((discard - 4.0 / 9.0).abs() < 0.01, "discard {discard}");
    }

    #[test]
    fn transcripts_are_deterministic() {
        let a = run_session(500, 123, &NullAdversary, &OpPolicy::Uniform);
        let b = run_session(500, 123, &NullAdversary, &OpPolicy::Uniform);
        assert_eq!(a, b);
        let c = run_session(500, 124, &NullAdversary, &OpPolicy::Uniform);
        assert_ne!(a, c);
    }
}

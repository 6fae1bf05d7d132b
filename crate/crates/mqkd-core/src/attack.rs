//! Attack strategies and their quantitative evaluation.
//!
//! Two families are modelled. Intercept-resend measures the in-flight photon
//! in a chosen basis on a chosen segment and forwards the collapsed
//! eigenstate. The collective attack entangles a fresh ancilla register with
//! the photon on every segment: a 1-qubit register on the outbound segment and
//! 2-qubit registers on the two relay segments, written as X-basis branch
//! amplitudes plus marker states deposited in the ancilla.
//!
//! Beyond running attacks inside sessions, the module evaluates them exactly:
//! [`run_collective_round`] evolves the full joint state through verified
//! unitaries, [`expansion_distribution`] re-derives the same outcome
//! distribution by expanding the labelled interference branches without ever
//! building a matrix, [`no_detection_residual`] measures the distance from the
//! constraint set that makes an attack invisible, and [`eve_leakage`] bounds
//! the key information carried by the ancillas, conditioned on the published
//! outcome, through the Holevo quantity of the conditional ancilla ensemble.

use alloc::{format, string::String, vec, vec::Vec};
use num_complex::Complex64;

use crate::distill;
use crate::error::AttackError;
use crate::math;
use crate::protocol::{
    self, run_session, Adversary, OpPolicy, Segment, TRAVEL,
};
use crate::qubit::{MeasBasis, Outcome, StateVector, UnitaryMatrix, UnitaryOp};
use crate::rng::SplitMix64;
use crate::spectral;

const FRAC_1_SQRT_2: f64 = core::f64::consts::FRAC_1_SQRT_2;
const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Branch amplitudes a tap assigns to preserving versus flipping the X-basis
/// value of the travel qubit. `|to_plus|² + |to_minus|² = 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct XBranch {
    pub to_plus: Complex64,
    pub to_minus: Complex64,
}

impl XBranch {
    pub fn new(to_plus: Complex64, to_minus: Complex64) -> Self {
        Self { to_plus, to_minus }
    }

    fn norm_sqr(&self) -> f64 {
        self.to_plus.norm_sqr() + self.to_minus.norm_sqr()
    }
}

/// The tap on the outbound segment. Only its action on the fresh `|+⟩` is
/// constrained; the 1-qubit ancilla receives `marks[0]` on the kept branch and
/// `marks[1]` on the flipped branch.
#[derive(Clone, Debug, PartialEq)]
pub struct SourceTap {
    pub on_plus: XBranch,
    pub marks: [[Complex64; 2]; 2],
}

/// A tap on one of the relay segments, constrained on both X-basis inputs.
/// Marker order: `[plus→plus, plus→minus, minus→plus, minus→minus]` over the
/// 2-qubit ancilla register.
#[derive(Clone, Debug, PartialEq)]
pub struct RelayTap {
    pub on_plus: XBranch,
    pub on_minus: XBranch,
    pub marks: [[Complex64; 4]; 4],
}

/// Full parameterization of the collective attack: one tap per segment.
///
/// Markers within one family (`marks[0..2]` and `marks[2..4]` of a relay) must
/// be orthonormal. Families of the same register may overlap; in particular
/// the honest default points the forward relay's minus-keep marker at the same
/// vector as its plus-keep marker, so that the honest parameter point leaves
/// Z-basis superpositions coherent and the zero-residual constraint set is
/// exactly the set of undetectable attacks.
#[derive(Clone, Debug, PartialEq)]
pub struct AttackParams {
    /// Tap applied while the photon travels TP → Alice.
    pub source: SourceTap,
    /// Tap applied while the photon travels Alice → Bob.
    pub forward: RelayTap,
    /// Tap applied while the photon travels Bob → TP.
    pub backward: RelayTap,
}

fn basis2(i: usize) -> [Complex64; 2] {
    let mut v = [ZERO; 2];
    v[i] = ONE;
    v
}

fn basis4(i: usize) -> [Complex64; 4] {
    let mut v = [ZERO; 4];
    v[i] = ONE;
    v
}

impl AttackParams {
    /// The identity-on-the-travel-qubit point: every branch keeps the X value
    /// and the markers record nothing that distinguishes the secret.
    pub fn passthrough() -> Self {
        Self {
            source: SourceTap {
                on_plus: XBranch::new(ONE, ZERO),
                marks: [basis2(0), basis2(1)],
            },
            forward: RelayTap {
                on_plus: XBranch::new(ONE, ZERO),
                on_minus: XBranch::new(ZERO, ONE),
                // minus-keep shares the plus-keep marker (see type docs)
                marks: [basis4(0), basis4(1), basis4(2), basis4(0)],
            },
            backward: RelayTap {
                on_plus: XBranch::new(ONE, ZERO),
                on_minus: XBranch::new(ZERO, ONE),
                marks: [basis4(0), basis4(1), basis4(2), basis4(3)],
            },
        }
    }

    /// Check normalization, marker geometry, and the isometry condition that a
    /// unitary completion requires.
    pub fn validate(&self) -> Result<(), AttackError> {
        let finite2 = |v: &[Complex64; 2]| v.iter().all(|c| c.re.is_finite() && c.im.is_finite());
        let finite4 = |v: &[Complex64; 4]| v.iter().all(|c| c.re.is_finite() && c.im.is_finite());
        let branch_ok = |b: &XBranch| {
            b.to_plus.re.is_finite()
                && b.to_plus.im.is_finite()
                && b.to_minus.re.is_finite()
                && b.to_minus.im.is_finite()
        };
        if !branch_ok(&self.source.on_plus)
            || !branch_ok(&self.forward.on_plus)
            || !branch_ok(&self.forward.on_minus)
            || !branch_ok(&self.backward.on_plus)
            || !branch_ok(&self.backward.on_minus)
            || !self.source.marks.iter().all(finite2)
            || !self.forward.marks.iter().all(finite4)
            || !self.backward.marks.iter().all(finite4)
        {
            return Err(AttackError::NonFinite);
        }

        let pairs: [(&str, f64); 5] = [
            ("source.on_plus", self.source.on_plus.norm_sqr()),
            ("forward.on_plus", self.forward.on_plus.norm_sqr()),
            ("forward.on_minus", self.forward.on_minus.norm_sqr()),
            ("backward.on_plus", self.backward.on_plus.norm_sqr()),
            ("backward.on_minus", self.backward.on_minus.norm_sqr()),
        ];
        for (which, n) in pairs {
            if math::abs(n - 1.0) > 1e-9 {
                return Err(AttackError::NotNormalized { which, norm_sqr: n });
            }
        }

        fn ip<const N: usize>(a: &[Complex64; N], b: &[Complex64; N]) -> Complex64 {
            a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
        }
        fn family_ok<const N: usize>(a: &[Complex64; N], b: &[Complex64; N]) -> bool {
            math::abs(ip(a, a).re - 1.0) < 1e-9
                && math::abs(ip(b, b).re - 1.0) < 1e-9
                && ip(a, b).norm_sqr() < 1e-18
        }
        if !family_ok(&self.source.marks[0], &self.source.marks[1]) {
            return Err(AttackError::BadMarker { which: "source" });
        }
        for (which, tap) in [("forward", &self.forward), ("backward", &self.backward)] {
            if !family_ok(&tap.marks[0], &tap.marks[1]) || !family_ok(&tap.marks[2], &tap.marks[3]) {
                return Err(AttackError::BadMarker { which });
            }
            // the two specified output columns must stay orthogonal
            let cross = tap.on_plus.to_plus.conj() * tap.on_minus.to_plus * ip(&tap.marks[0], &tap.marks[2])
                + tap.on_plus.to_minus.conj() * tap.on_minus.to_minus * ip(&tap.marks[1], &tap.marks[3]);
            let dev = math::sqrt(cross.norm_sqr());
            if dev > 1e-9 {
                return Err(AttackError::NotCompletable { gram_deviation: dev });
            }
        }
        Ok(())
    }
}

impl Default for AttackParams {
    fn default() -> Self {
        Self::passthrough()
    }
}

/// `|±⟩ ⊗ mark` as an amplitude vector over `2·anc_dim` (travel bit is most
/// significant).
fn embed(plus: bool, mark: &[Complex64]) -> Vec<Complex64> {
    let anc = mark.len();
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let mut v = vec![ZERO; 2 * anc];
    for (e, &m) in mark.iter().enumerate() {
        v[e] = h * m;
        v[anc + e] = if plus { h * m } else { -h * m };
    }
    v
}

fn branch_image(branch: &XBranch, mark_plus: &[Complex64], mark_minus: &[Complex64]) -> Vec<Complex64> {
    let plus = embed(true, mark_plus);
    let minus = embed(false, mark_minus);
    plus.iter()
        .zip(minus.iter())
        .map(|(p, m)| branch.to_plus * p + branch.to_minus * m)
        .collect()
}

/// Extend isometric column pairs to a full unitary by deterministic
/// Gram-Schmidt over the computational basis.
fn complete_unitary(dim: usize, pairs: &[(Vec<Complex64>, Vec<Complex64>)]) -> Result<UnitaryMatrix, AttackError> {
    // isometry of the specified columns
    let mut gram_dev = 0.0f64;
    for (in_i, out_i) in pairs.iter() {
        for (in_j, out_j) in pairs.iter() {
            let gin: Complex64 = in_i.iter().zip(in_j.iter()).map(|(a, b)| a.conj() * b).sum();
            let gout: Complex64 = out_i.iter().zip(out_j.iter()).map(|(a, b)| a.conj() * b).sum();
            let dev = math::sqrt((gin - gout).norm_sqr());
            if dev > gram_dev {
                gram_dev = dev;
            }
        }
    }
    if gram_dev > 1e-9 {
        return Err(AttackError::NotCompletable { gram_deviation: gram_dev });
    }

    fn extend(dim: usize, seed: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
        let mut basis: Vec<Vec<Complex64>> = seed.to_vec();
        // exact renormalization of the seeds keeps the completion unitary to
        // machine precision even when inputs sit at the validation tolerance
        for v in &mut basis {
            let n = math::sqrt(v.iter().map(|a| a.norm_sqr()).sum::<f64>());
            for a in v.iter_mut() {
                *a /= n;
            }
        }
        let mut k = 0usize;
        while basis.len() < dim && k < dim {
            let mut v = vec![ZERO; dim];
            v[k] = ONE;
            k += 1;
            for _pass in 0..2 {
                for u in &basis {
                    let ipr: Complex64 = u.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
                    for (vi, ui) in v.iter_mut().zip(u.iter()) {
                        *vi -= ipr * ui;
                    }
                }
            }
            let n2: f64 = v.iter().map(|a| a.norm_sqr()).sum();
            if n2 > 1e-12 {
                let s = 1.0 / math::sqrt(n2);
                basis.push(v.into_iter().map(|a| a * s).collect());
            }
        }
        basis
    }

    let ins: Vec<Vec<Complex64>> = pairs.iter().map(|(i, _)| i.clone()).collect();
    let outs: Vec<Vec<Complex64>> = pairs.iter().map(|(_, o)| o.clone()).collect();
    let in_basis = extend(dim, &ins);
    let out_basis = extend(dim, &outs);
    if in_basis.len() != dim || out_basis.len() != dim {
        return Err(AttackError::NotCompletable { gram_deviation: f64::INFINITY });
    }

    let mut data = vec![ZERO; dim * dim];
    for (col_in, col_out) in in_basis.iter().zip(out_basis.iter()) {
        // U += |out⟩⟨in|
        for r in 0..dim {
            if col_out[r] == ZERO {
                continue;
            }
            for c in 0..dim {
                data[r * dim + c] += col_out[r] * col_in[c].conj();
            }
        }
    }
    UnitaryMatrix::new(dim, data).map_err(|e| match e {
        crate::error::QubitError::NonUnitary { deviation } => {
            AttackError::NotCompletable { gram_deviation: deviation }
        }
        other => AttackError::Qubit(other),
    })
}

/// A validated collective attack with its three built unitaries.
#[derive(Clone, Debug)]
pub struct CollectiveAttack {
    params: AttackParams,
    unitaries: [UnitaryMatrix; 3],
}

/// Build the three tap unitaries from validated parameters: a 4×4 acting on
/// (travel, 1-qubit ancilla) and two 8×8 acting on (travel, 2-qubit ancilla).
/// Each matrix reproduces the specified branch images exactly; unconstrained
/// directions are filled by orthonormal extension in a fixed basis order.
pub fn build_attack_unitaries(params: &AttackParams) -> Result<[UnitaryMatrix; 3], AttackError> {
    params.validate()?;

    let u1 = {
        let input = embed(true, &basis2(0));
        let output = branch_image(&params.source.on_plus, &params.source.marks[0], &params.source.marks[1]);
        complete_unitary(4, &[(input, output)])?
    };

    let relay = |tap: &RelayTap| -> Result<UnitaryMatrix, AttackError> {
        let in_plus = embed(true, &basis4(0));
        let out_plus = branch_image(&tap.on_plus, &tap.marks[0], &tap.marks[1]);
        let in_minus = embed(false, &basis4(0));
        let out_minus = branch_image(&tap.on_minus, &tap.marks[2], &tap.marks[3]);
        complete_unitary(8, &[(in_plus, out_plus), (in_minus, out_minus)])
    };

    Ok([u1, relay(&params.forward)?, relay(&params.backward)?])
}

impl CollectiveAttack {
    pub fn new(params: AttackParams) -> Result<Self, AttackError> {
        let unitaries = build_attack_unitaries(&params)?;
        Ok(Self { params, unitaries })
    }

    pub fn params(&self) -> &AttackParams {
        &self.params
    }

    pub fn unitaries(&self) -> &[UnitaryMatrix; 3] {
        &self.unitaries
    }

    /// Extend the joint state with this segment's fresh ancilla register and
    /// apply the tap unitary to (travel, new register).
    fn apply_segment(&self, segment: Segment, state: StateVector) -> StateVector {
        let (u, anc_qubits) = match segment {
            Segment::TpToAlice => (&self.unitaries[0], 1usize),
            Segment::AliceToBob => (&self.unitaries[1], 2),
            Segment::BobToTp => (&self.unitaries[2], 2),
        };
        let before = state.num_qubits();
        let state = state.tensor(&StateVector::basis_state(anc_qubits, 0));
        let mut targets = Vec::with_capacity(1 + anc_qubits);
        targets.push(TRAVEL);
        targets.extend(before..before + anc_qubits);
        state.apply_matrix(u, &targets).expect("tap unitary spans travel plus its own register")
    }
}

/// Measure the travel register in `basis` and forward the collapsed
/// eigenstate. Ancilla registers, if any, ride along untouched.
pub fn intercept_resend(state: StateVector, basis: MeasBasis, rng: &mut SplitMix64) -> StateVector {
    let (_outcome, collapsed) = state
        .measure(TRAVEL, basis, rng.next_f64())
        .expect("travel register always exists");
    collapsed
}

/// An adversary strategy pluggable into the protocol engine.
#[derive(Clone, Debug)]
pub enum Strategy {
    Null,
    InterceptResend { basis: MeasBasis, segment: Segment },
    Collective(CollectiveAttack),
}

impl Strategy {
    pub fn intercept_resend(basis: MeasBasis, segment: Segment) -> Self {
        Strategy::InterceptResend { basis, segment }
    }

    pub fn collective(params: AttackParams) -> Result<Self, AttackError> {
        Ok(Strategy::Collective(CollectiveAttack::new(params)?))
    }
}

impl Adversary for Strategy {
    fn intercept(&self, segment: Segment, state: StateVector, rng: &mut SplitMix64) -> StateVector {
        match self {
            Strategy::Null => state,
            Strategy::InterceptResend { basis, segment: own } => {
                if *own == segment {
                    intercept_resend(state, *basis, rng)
                } else {
                    state
                }
            }
            Strategy::Collective(attack) => attack.apply_segment(segment, state),
        }
    }

    fn label(&self) -> String {
        match self {
            Strategy::Null => String::from("null"),
            Strategy::InterceptResend { basis, segment } => {
                let b = match basis {
                    MeasBasis::X => "x",
                    MeasBasis::Z => "z",
                };
                format!("intercept-{b}:{segment}")
            }
            Strategy::Collective(_) => String::from("collective"),
        }
    }
}

/// Exact outcome distribution of one attacked round, with the normalized
/// ancilla states left behind by each published outcome.
#[derive(Clone, Debug)]
pub struct CollectiveRound {
    pub p_plus: f64,
    pub p_minus: f64,
    pub ancilla_plus: Option<Vec<Complex64>>,
    pub ancilla_minus: Option<Vec<Complex64>>,
}

/// Evolve `|+⟩` through all three taps and the two participant operations,
/// then project the travel qubit on `|±⟩`. Pure Born-rule evaluation; no
/// randomness involved.
pub fn run_collective_round(attack: &CollectiveAttack, alice_op: UnitaryOp, bob_op: UnitaryOp) -> CollectiveRound {
    let mut state = StateVector::prepare_plus();
    state = attack.apply_segment(Segment::TpToAlice, state);
    state = state.apply_op(alice_op, TRAVEL).expect("travel register");
    state = attack.apply_segment(Segment::AliceToBob, state);
    state = state.apply_op(bob_op, TRAVEL).expect("travel register");
    state = attack.apply_segment(Segment::BobToTp, state);

    let half = state.dim() / 2;
    let amps = state.amps();
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let mut plus = Vec::with_capacity(half);
    let mut minus = Vec::with_capacity(half);
    for r in 0..half {
        plus.push((amps[r] + amps[half + r]) * h);
        minus.push((amps[r] - amps[half + r]) * h);
    }
    let p_plus: f64 = plus.iter().map(|a| a.norm_sqr()).sum();
    let p_minus: f64 = minus.iter().map(|a| a.norm_sqr()).sum();
    let normalize = |mut v: Vec<Complex64>, p: f64| {
        if p < 1e-15 {
            None
        } else {
            let s = Complex64::new(1.0 / math::sqrt(p), 0.0);
            for a in v.iter_mut() {
                *a *= s;
            }
            Some(v)
        }
    };
    CollectiveRound {
        p_plus,
        p_minus,
        ancilla_plus: normalize(plus, p_plus),
        ancilla_minus: normalize(minus, p_minus),
    }
}

/// The same outcome distribution derived along the second algebraic route:
/// expand the round into labelled branches (amplitude, X value, marker per
/// register) and accumulate `‖Σ branches‖²` per outcome from the marker Gram
/// products, never building a matrix or a joint state vector.
pub fn expansion_distribution(params: &AttackParams, alice_op: UnitaryOp, bob_op: UnitaryOp) -> Result<(f64, f64), AttackError> {
    params.validate()?;

    #[derive(Clone, Copy)]
    struct Branch {
        amp: Complex64,
        plus: bool,
        marks: [usize; 3],
    }

    let apply_participant = |branches: &mut Vec<Branch>, op: UnitaryOp| match op {
        UnitaryOp::Identity => {}
        UnitaryOp::PauliZ => {
            for b in branches.iter_mut() {
                b.plus = !b.plus;
            }
        }
        UnitaryOp::Hadamard => {
            let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
            let mut next = Vec::with_capacity(branches.len() * 2);
            for b in branches.iter() {
                next.push(Branch { amp: b.amp * h, plus: true, marks: b.marks });
                let sign = if b.plus { h } else { -h };
                next.push(Branch { amp: b.amp * sign, plus: false, marks: b.marks });
            }
            *branches = next;
        }
    };

    let apply_relay = |branches: &mut Vec<Branch>, tap: &RelayTap, slot: usize| {
        let mut next = Vec::with_capacity(branches.len() * 2);
        for b in branches.iter() {
            let (branch, keep_mark, flip_mark) = if b.plus {
                (&tap.on_plus, 0usize, 1usize)
            } else {
                (&tap.on_minus, 2usize, 3usize)
            };
            let mut kept = b.marks;
            kept[slot] = keep_mark;
            next.push(Branch { amp: b.amp * branch.to_plus, plus: true, marks: kept });
            let mut flipped = b.marks;
            flipped[slot] = flip_mark;
            next.push(Branch { amp: b.amp * branch.to_minus, plus: false, marks: flipped });
        }
        *branches = next;
    };

    let mut branches = vec![
        Branch { amp: params.source.on_plus.to_plus, plus: true, marks: [0, usize::MAX, usize::MAX] },
        Branch { amp: params.source.on_plus.to_minus, plus: false, marks: [1, usize::MAX, usize::MAX] },
    ];
    apply_participant(&mut branches, alice_op);
    apply_relay(&mut branches, &params.forward, 1);
    apply_participant(&mut branches, bob_op);
    apply_relay(&mut branches, &params.backward, 2);

    // marker Gram tables
    let mut g_src = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            g_src[i][j] = params.source.marks[i]
                .iter()
                .zip(params.source.marks[j].iter())
                .map(|(a, b)| a.conj() * b)
                .sum();
        }
    }
    let relay_gram = |tap: &RelayTap| {
        let mut g = [[ZERO; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                g[i][j] = tap.marks[i]
                    .iter()
                    .zip(tap.marks[j].iter())
                    .map(|(a, b)| a.conj() * b)
                    .sum();
            }
        }
        g
    };
    let g_fwd = relay_gram(&params.forward);
    let g_bwd = relay_gram(&params.backward);

    let mut p = [0.0f64; 2];
    for bi in branches.iter() {
        for bj in branches.iter() {
            if bi.plus != bj.plus {
                continue;
            }
            let m = bi.amp.conj()
                * bj.amp
                * g_src[bi.marks[0]][bj.marks[0]]
                * g_fwd[bi.marks[1]][bj.marks[1]]
                * g_bwd[bi.marks[2]][bj.marks[2]];
            p[if bi.plus { 0 } else { 1 }] += m.re;
        }
    }
    Ok((p[0], p[1]))
}

/// Distance from the constraint set under which the attack is invisible to
/// both check rounds and disclosure: every X-flipping amplitude must vanish
/// and the forward relay's two keep branches must deposit identical marked
/// amplitudes (`‖A₁·F₁ − B₂·G₂‖`, which reduces to `|A₁ − B₂|` for the default
/// markers). Zero residual means undetectable; any detectable statistic pushes
/// the residual above zero.
pub fn no_detection_residual(params: &AttackParams) -> f64 {
    let mut acc = 0.0;
    acc += params.source.on_plus.to_minus.norm_sqr();
    acc += params.forward.on_plus.to_minus.norm_sqr();
    acc += params.forward.on_minus.to_plus.norm_sqr();
    acc += params.backward.on_plus.to_minus.norm_sqr();
    acc += params.backward.on_minus.to_plus.norm_sqr();
    let keep_plus = params.forward.on_plus.to_plus;
    let keep_minus = params.forward.on_minus.to_minus;
    for i in 0..4 {
        let diff = keep_plus * params.forward.marks[0][i] - keep_minus * params.forward.marks[3][i];
        acc += diff.norm_sqr();
    }
    math::sqrt(acc)
}

/// Exact Born-rule detection statistics over the five informative rounds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExactDetection {
    /// Probability a check round reads `Minus`.
    pub case1_error: f64,
    /// Probability a key round's published outcome contradicts the expected
    /// one (equivalently, that the derived bits disagree), averaged over the
    /// four equally likely key combinations.
    pub key_mismatch: f64,
}

pub fn exact_detection(attack: &CollectiveAttack) -> ExactDetection {
    let hh = run_collective_round(attack, UnitaryOp::Hadamard, UnitaryOp::Hadamard);
    let mut mismatch = 0.0;
    for a in [UnitaryOp::Identity, UnitaryOp::PauliZ] {
        for b in [UnitaryOp::Identity, UnitaryOp::PauliZ] {
            let round = run_collective_round(attack, a, b);
            let expected = protocol::expected_outcome(a, b).expect("key combo");
            let wrong = match expected {
                Outcome::Plus => round.p_minus,
                Outcome::Minus => round.p_plus,
                _ => unreachable!(),
            };
            mismatch += 0.25 * wrong;
        }
    }
    ExactDetection { case1_error: hh.p_minus, key_mismatch: mismatch }
}

/// Holevo bound on the key information the ancillas carry beyond the public
/// transcript: the key bit is uniform over the four key combinations, the
/// published outcome conditions the ensemble, and the bound is evaluated
/// exactly from the conditional ancilla Gram matrices. At most one bit.
pub fn eve_leakage(attack: &CollectiveAttack) -> f64 {
    let combos = [
        (UnitaryOp::Identity, UnitaryOp::Identity, 0usize),
        (UnitaryOp::Identity, UnitaryOp::PauliZ, 0),
        (UnitaryOp::PauliZ, UnitaryOp::Identity, 1),
        (UnitaryOp::PauliZ, UnitaryOp::PauliZ, 1),
    ];
    let rounds: Vec<(usize, CollectiveRound)> = combos
        .iter()
        .map(|&(a, b, bit)| (bit, run_collective_round(attack, a, b)))
        .collect();

    let empty: Vec<Complex64> = Vec::new();
    let mut total = 0.0;
    for outcome in 0..2 {
        let branch = |r: &CollectiveRound| -> (f64, Option<Vec<Complex64>>) {
            if outcome == 0 {
                (r.p_plus, r.ancilla_plus.clone())
            } else {
                (r.p_minus, r.ancilla_minus.clone())
            }
        };
        let mut weights = [0.0f64; 4];
        let mut states: Vec<Vec<Complex64>> = Vec::with_capacity(4);
        for (i, (_bit, r)) in rounds.iter().enumerate() {
            let (p, s) = branch(r);
            weights[i] = 0.25 * p;
            states.push(s.unwrap_or_else(|| empty.clone()));
        }
        let p_outcome: f64 = weights.iter().sum();
        if p_outcome < 1e-15 {
            continue;
        }
        for w in weights.iter_mut() {
            *w /= p_outcome;
        }
        let refs: Vec<&[Complex64]> = states.iter().map(|s| s.as_slice()).collect();
        let joint = spectral::ensemble_entropy(&weights, &refs);

        let mut conditional = 0.0;
        for key_bit in 0..2 {
            let members: Vec<usize> = (0..4).filter(|&i| rounds[i].0 == key_bit).collect();
            let p_bit: f64 = members.iter().map(|&i| weights[i]).sum();
            if p_bit < 1e-15 {
                continue;
            }
            let sub_weights: Vec<f64> = members.iter().map(|&i| weights[i] / p_bit).collect();
            let sub_refs: Vec<&[Complex64]> = members.iter().map(|&i| refs[i]).collect();
            conditional += p_bit * spectral::ensemble_entropy(&sub_weights, &sub_refs);
        }
        total += p_outcome * (joint - conditional);
    }
    total.max(0.0)
}

/// Exact classical leakage of an intercept-resend attack: mutual information
/// between the key bit and the eavesdropper's measurement record, conditioned
/// on the published outcome.
pub fn intercept_leakage(basis: MeasBasis, segment: Segment) -> f64 {
    // enumerate the four key combinations over the bare travel qubit
    let mut joint = [[[0.0f64; 2]; 3]; 2]; // [key][eve outcome: 0,1,none][tp outcome]
    for a in [UnitaryOp::Identity, UnitaryOp::PauliZ] {
        for b in [UnitaryOp::Identity, UnitaryOp::PauliZ] {
            let key = usize::from(distill::derive_alice_bit(a).expect("key op"));
            let mut states: Vec<(f64, usize, StateVector)> = vec![(1.0, 2, StateVector::prepare_plus())];
            let tap = |states: &mut Vec<(f64, usize, StateVector)>, here: Segment| {
                if here != segment {
                    return;
                }
                let mut next = Vec::with_capacity(states.len() * 2);
                for (p, _eve, s) in states.iter() {
                    for (branch_p, eve_tag, collapsed) in enumerate_measure(s, basis) {
                        next.push((p * branch_p, eve_tag, collapsed));
                    }
                }
                *states = next;
            };
            tap(&mut states, Segment::TpToAlice);
            for (_, _, s) in states.iter_mut() {
                *s = s.apply_op(a, TRAVEL).expect("travel register");
            }
            tap(&mut states, Segment::AliceToBob);
            for (_, _, s) in states.iter_mut() {
                *s = s.apply_op(b, TRAVEL).expect("travel register");
            }
            tap(&mut states, Segment::BobToTp);

            for (p, eve, s) in states {
                let amps = s.amps();
                let plus = (amps[0] + amps[1]) * Complex64::new(FRAC_1_SQRT_2, 0.0);
                let p_plus = plus.norm_sqr();
                joint[key][eve][0] += 0.25 * p * p_plus;
                joint[key][eve][1] += 0.25 * p * (1.0 - p_plus);
            }
        }
    }

    let mut total = 0.0;
    for o in 0..2 {
        let p_o: f64 = (0..2).map(|k| (0..3).map(|e| joint[k][e][o]).sum::<f64>()).sum();
        if p_o < 1e-15 {
            continue;
        }
        let mut p_k = [0.0f64; 2];
        let mut p_e = [0.0f64; 3];
        for k in 0..2 {
            for e in 0..3 {
                p_k[k] += joint[k][e][o] / p_o;
                p_e[e] += joint[k][e][o] / p_o;
            }
        }
        for k in 0..2 {
            for e in 0..3 {
                let p_ke = joint[k][e][o] / p_o;
                if p_ke > 1e-15 {
                    total += p_o * p_ke * math::log2(p_ke / (p_k[k] * p_e[e]));
                }
            }
        }
    }
    total.max(0.0)
}

/// Both branches of measuring the travel qubit of a 2-dim state, with their
/// probabilities and collapsed eigenstates. Zero-probability branches are
/// dropped.
fn enumerate_measure(state: &StateVector, basis: MeasBasis) -> Vec<(f64, usize, StateVector)> {
    let amps = state.amps();
    debug_assert_eq!(amps.len(), 2);
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let (p_first, first, second) = match basis {
        MeasBasis::X => {
            let plus = (amps[0] + amps[1]) * h;
            let plus_state = StateVector::prepare_plus();
            let minus_state =
                StateVector::from_amps(vec![h, -h]).expect("|-> is normalized");
            (plus.norm_sqr(), plus_state, minus_state)
        }
        MeasBasis::Z => (
            amps[0].norm_sqr(),
            StateVector::basis_state(1, 0),
            StateVector::basis_state(1, 1),
        ),
    };
    let mut out = Vec::with_capacity(2);
    if p_first > 1e-15 {
        out.push((p_first, 0, first));
    }
    if 1.0 - p_first > 1e-15 {
        out.push((1.0 - p_first, 1, second));
    }
    out
}

/// Aggregate statistics of one attack strategy.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AttackOutcomeStats {
    /// Empirical check-round error frequency.
    pub detection_prob_case1: f64,
    /// Empirical disclosed-bit mismatch frequency.
    pub disclosed_mismatch_prob: f64,
    /// Exact leakage of the strategy (Holevo for collective attacks, classical
    /// mutual information for intercept-resend), in bits of the key bit.
    pub leakage_bits: f64,
}

/// Run a uniform session under `strategy` and report empirical detection rates
/// together with the strategy's exact leakage. Sessions too short to disclose
/// report zero disclosure statistics.
pub fn attack_report(strategy: &Strategy, n_rounds: u64, seed: u64) -> AttackOutcomeStats {
    let mut transcript = run_session(n_rounds, seed, strategy, &OpPolicy::Uniform);
    let report = distill::check_case1(&transcript, 1.0);
    let detection_prob_case1 = if report.check_rounds == 0 { 0.0 } else { report.case1_error_rate };

    let mut rng = crate::rng::substream(seed, u64::MAX);
    let disclosed_mismatch_prob =
        match distill::disclose_and_compare(&mut transcript, &mut rng, u64::MAX, report) {
            Ok((_, completed)) => completed.disclosed_mismatch_rate(),
            Err(_) => 0.0,
        };

    let leakage_bits = match strategy {
        Strategy::Null => 0.0,
        Strategy::InterceptResend { basis, segment } => intercept_leakage(*basis, *segment),
        Strategy::Collective(attack) => eve_leakage(attack),
    };

    AttackOutcomeStats { detection_prob_case1, disclosed_mismatch_prob, leakage_bits }
}

/// Uniform phase factor.
fn random_phase(rng: &mut SplitMix64) -> Complex64 {
    let theta = rng.next_f64() * core::f64::consts::TAU;
    Complex64::new(math::cos(theta), math::sin(theta))
}

fn random_complex(rng: &mut SplitMix64) -> Complex64 {
    Complex64::new(rng.next_f64() * 2.0 - 1.0, rng.next_f64() * 2.0 - 1.0)
}

fn random_branch(rng: &mut SplitMix64) -> XBranch {
    loop {
        let a = random_complex(rng);
        let b = random_complex(rng);
        let n = a.norm_sqr() + b.norm_sqr();
        if n > 1e-6 {
            let s = Complex64::new(1.0 / math::sqrt(n), 0.0);
            return XBranch::new(a * s, b * s);
        }
    }
}

fn random_unit4(rng: &mut SplitMix64) -> [Complex64; 4] {
    loop {
        let v = [
            random_complex(rng),
            random_complex(rng),
            random_complex(rng),
            random_complex(rng),
        ];
        let n: f64 = v.iter().map(|a| a.norm_sqr()).sum();
        if n > 1e-6 {
            let s = Complex64::new(1.0 / math::sqrt(n), 0.0);
            return [v[0] * s, v[1] * s, v[2] * s, v[3] * s];
        }
    }
}

fn orthogonal_to(fixed: &[&[Complex64; 4]], rng: &mut SplitMix64) -> [Complex64; 4] {
    loop {
        let mut v = random_unit4(rng);
        for u in fixed {
            let ipr: Complex64 = u.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
            for (vi, ui) in v.iter_mut().zip(u.iter()) {
                *vi -= ipr * ui;
            }
        }
        let n: f64 = v.iter().map(|a| a.norm_sqr()).sum();
        if n > 1e-6 {
            let s = Complex64::new(1.0 / math::sqrt(n), 0.0);
            for a in v.iter_mut() {
                *a *= s;
            }
            return v;
        }
    }
}

/// Random valid attack coefficients over the default marker geometry.
pub fn sample_valid_params(rng: &mut SplitMix64) -> AttackParams {
    let mut p = AttackParams::passthrough();
    p.source.on_plus = random_branch(rng);
    p.forward.on_plus = random_branch(rng);
    p.forward.on_minus = random_branch(rng);
    p.backward.on_plus = random_branch(rng);
    p.backward.on_minus = random_branch(rng);
    p
}

/// A random point on the zero-residual manifold: all flip amplitudes vanish,
/// the forward keep branches agree through the marker geometry, and the
/// remaining freedom (four phases and the marker frames) is sampled.
pub fn sample_undetectable_params(rng: &mut SplitMix64) -> AttackParams {
    let mut p = AttackParams::passthrough();
    p.source.on_plus = XBranch::new(random_phase(rng), ZERO);

    let keep_minus = random_phase(rng);
    let twist = random_phase(rng);
    let keep_plus = keep_minus * twist;
    let f1 = random_unit4(rng);
    let mut g2 = f1;
    for a in g2.iter_mut() {
        *a *= twist;
    }
    let f2 = orthogonal_to(&[&f1], rng);
    let g1 = orthogonal_to(&[&g2], rng);
    p.forward.on_plus = XBranch::new(keep_plus, ZERO);
    p.forward.on_minus = XBranch::new(ZERO, keep_minus);
    p.forward.marks = [f1, f2, g1, g2];

    let h1 = random_unit4(rng);
    let h2 = orthogonal_to(&[&h1], rng);
    let k1 = random_unit4(rng);
    let k2 = orthogonal_to(&[&k1], rng);
    p.backward.on_plus = XBranch::new(random_phase(rng), ZERO);
    p.backward.on_minus = XBranch::new(ZERO, random_phase(rng));
    p.backward.marks = [h1, h2, k1, k2];
    p
}

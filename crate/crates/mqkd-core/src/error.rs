//! Error types, one small enum per subsystem.

use core::fmt;

/// Errors from state-vector algebra.
#[derive(Clone, Debug, PartialEq)]
pub enum QubitError {
    /// A register index beyond the number of qubits in the state.
    RegisterOutOfRange { register: usize, num_qubits: usize },
    /// Two states of different dimension where equal dimensions are required.
    DimensionMismatch { left: usize, right: usize },
    /// A matrix that fails `U†U = I` within tolerance.
    NonUnitary { deviation: f64 },
    /// Amplitude data that is not a valid normalized state.
    InvalidState { reason: &'static str },
    /// Matrix dimension does not match `2^targets`.
    MatrixSizeMismatch { matrix_dim: usize, expected: usize },
}

impl fmt::Display for QubitError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QubitError::RegisterOutOfRange { register, num_qubits } => {
                write!(f, "register {register} out of range for {num_qubits}-qubit state")
            }
            QubitError::DimensionMismatch { left, right } => {
                write!(f, "dimension mismatch: {left} vs {right}")
            }
            QubitError::NonUnitary { deviation } => {
                write!(f, "matrix is not unitary (max |U†U - I| entry = {deviation:e})")
            }
            QubitError::InvalidState { reason } => write!(f, "invalid state: {reason}"),
            QubitError::MatrixSizeMismatch { matrix_dim, expected } => {
                write!(f, "matrix dimension {matrix_dim} does not match target span {expected}")
            }
        }
    }
}

/// Errors from the round state machine.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProtocolError {
    /// `expected_outcome` asked for a discard combination, which has none.
    NoExpectedOutcome,
}

impl fmt::Display for ProtocolError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProtocolError::NoExpectedOutcome => {
                write!(f, "discard rounds have no expected measurement outcome")
            }
        }
    }
}

/// Errors from key distillation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DistillError {
    /// Key bits are only defined for the identity and phase-flip operations.
    HadamardHasNoBit,
    /// Fewer than two key rounds: half-disclosure cannot run.
    SessionTooShort { key_rounds: usize },
    /// Requested output longer than the input key.
    OutputTooLong { out_len: usize, input_len: usize },
    /// Hash seed length must be `input + output - 1`.
    SeedLengthMismatch { seed_len: usize, expected: usize },
}

impl fmt::Display for DistillError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DistillError::HadamardHasNoBit => {
                write!(f, "no key bit is defined for the Hadamard operation")
            }
            DistillError::SessionTooShort { key_rounds } => {
                write!(f, "session too short: {key_rounds} key round(s), need at least 2")
            }
            DistillError::OutputTooLong { out_len, input_len } => {
                write!(f, "amplified length {out_len} exceeds input length {input_len}")
            }
            DistillError::SeedLengthMismatch { seed_len, expected } => {
                write!(f, "hash seed length {seed_len}, expected {expected}")
            }
        }
    }
}

/// Errors from attack construction and evaluation.
#[derive(Clone, Debug, PartialEq)]
pub enum AttackError {
    /// A coefficient pair violates its normalization constraint.
    NotNormalized { which: &'static str, norm_sqr: f64 },
    /// A marker vector is not unit length, or two markers of the same family
    /// are not orthogonal.
    BadMarker { which: &'static str },
    /// The specified columns are not an isometry, so no unitary extends them.
    NotCompletable { gram_deviation: f64 },
    /// A non-finite coefficient or marker entry.
    NonFinite,
    /// State algebra failure while evaluating the attack.
    Qubit(QubitError),
}

impl fmt::Display for AttackError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AttackError::NotNormalized { which, norm_sqr } => {
                write!(f, "branch pair {which} has squared norm {norm_sqr}, expected 1")
            }
            AttackError::BadMarker { which } => {
                write!(f, "marker family {which} is not orthonormal")
            }
            AttackError::NotCompletable { gram_deviation } => {
                write!(
                    f,
                    "specified columns are not isometric (gram deviation {gram_deviation:e}); no unitary completion exists"
                )
            }
            AttackError::NonFinite => write!(f, "attack parameters contain a non-finite value"),
            AttackError::Qubit(e) => write!(f, "{e}"),
        }
    }
}

impl From<QubitError> for AttackError {
    fn from(e: QubitError) -> Self {
        AttackError::Qubit(e)
    }
}

#[cfg(feature = "std")]
impl std::error::Error for QubitError {}
#[cfg(feature = "std")]
impl std::error::Error for ProtocolError {}
#[cfg(feature = "std")]
impl std::error::Error for DistillError {}
#[cfg(feature = "std")]
impl std::error::Error for AttackError {}

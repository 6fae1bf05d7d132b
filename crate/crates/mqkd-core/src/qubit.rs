//! Exact finite-dimensional state-vector algebra.
//!
//! States are dense complex amplitude vectors over a row of qubit registers.
//! Register 0 is the travel qubit and owns the most significant bit of the
//! amplitude index; registers appended by [`StateVector::tensor`] take the less
//! significant bits in order. Every operation returns a new value, so states
//! can be shared freely across round workers.
//!
//! Comparisons between states go through [`StateVector::fidelity`] rather than
//! raw amplitudes: `σz` maps `|1⟩` to `-|1⟩`, which is the same physical state,
//! and all protocol checks are measurement statistics.

use alloc::{vec, vec::Vec};
use num_complex::Complex64;

use crate::error::QubitError;
use crate::math;

/// Tolerance for state-level invariants (norms, unitarity of supplied matrices).
pub const NORM_TOL: f64 = 1e-9;
/// Tolerance for static matrix identities (`H·H = I` and the like).
pub const MATRIX_TOL: f64 = 1e-12;
/// Probability below which a measurement branch is treated as exactly zero, so
/// degenerate branches are never selected by an unlucky random draw.
pub const PROB_FLOOR: f64 = 1e-12;

const FRAC_1_SQRT_2: f64 = core::f64::consts::FRAC_1_SQRT_2;

/// The participant operation alphabet.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum UnitaryOp {
    #[cfg_attr(feature = "serde", serde(rename = "I"))]
    Identity,
    #[cfg_attr(feature = "serde", serde(rename = "Z"))]
    PauliZ,
    #[cfg_attr(feature = "serde", serde(rename = "H"))]
    Hadamard,
}

impl UnitaryOp {
    pub const ALL: [UnitaryOp; 3] = [UnitaryOp::Identity, UnitaryOp::PauliZ, UnitaryOp::Hadamard];

    /// The 2×2 matrix, row-major.
    pub fn matrix(self) -> [Complex64; 4] {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        match self {
            UnitaryOp::Identity => [one, zero, zero, one],
            UnitaryOp::PauliZ => [one, zero, zero, -one],
            UnitaryOp::Hadamard => [h, h, h, -h],
        }
    }
}

impl core::fmt::Display for UnitaryOp {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        let s = match self {
            UnitaryOp::Identity => "I",
            UnitaryOp::PauliZ => "Z",
            UnitaryOp::Hadamard => "H",
        };
        write!(f, "{s}")
    }
}

/// Measurement basis. The protocol server measures in X; Z exists for
/// adversary models.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum MeasBasis {
    X,
    Z,
}

/// Measurement outcome, tagged by the basis that produced it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Outcome {
    Plus,
    Minus,
    Zero,
    One,
}

impl Outcome {
    pub fn basis(self) -> MeasBasis {
        match self {
            Outcome::Plus | Outcome::Minus => MeasBasis::X,
            Outcome::Zero | Outcome::One => MeasBasis::Z,
        }
    }
}

impl core::fmt::Display for Outcome {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        let s = match self {
            Outcome::Plus => "plus",
            Outcome::Minus => "minus",
            Outcome::Zero => "zero",
            Outcome::One => "one",
        };
        write!(f, "{s}")
    }
}

/// A verified unitary matrix (row-major, dimension a power of two).
///
/// Construction checks `U†U = I` within [`NORM_TOL`], so applying one to a
/// state never has to re-verify.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl UnitaryMatrix {
    pub fn new(dim: usize, data: Vec<Complex64>) -> Result<Self, QubitError> {
        if dim == 0 || !dim.is_power_of_two() || data.len() != dim * dim {
            return Err(QubitError::InvalidState { reason: "matrix dimension must be a power of two and match the data length" });
        }
        if data.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(QubitError::InvalidState { reason: "matrix entries must be finite" });
        }
        let m = Self { dim, data };
        let dev = m.unitarity_deviation();
        if dev > NORM_TOL {
            return Err(QubitError::NonUnitary { deviation: dev });
        }
        Ok(m)
    }

    pub fn identity(dim: usize) -> Self {
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            data[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        Self { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }

    /// Conjugate transpose; for a unitary this is the inverse.
    pub fn adjoint(&self) -> Self {
        let d = self.dim;
        let mut data = vec![Complex64::new(0.0, 0.0); d * d];
        for i in 0..d {
            for j in 0..d {
                data[j * d + i] = self.data[i * d + j].conj();
            }
        }
        Self { dim: d, data }
    }

    /// Matrix product `self · rhs`.
    pub fn mul(&self, rhs: &Self) -> Result<Self, QubitError> {
        if self.dim != rhs.dim {
            return Err(QubitError::DimensionMismatch { left: self.dim, right: rhs.dim });
        }
        let d = self.dim;
        let mut data = vec![Complex64::new(0.0, 0.0); d * d];
        for i in 0..d {
            for k in 0..d {
                let a = self.data[i * d + k];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..d {
                    data[i * d + j] += a * rhs.data[k * d + j];
                }
            }
        }
        Ok(Self { dim: d, data })
    }

    /// Largest entry of `|U†U − I|`.
    pub fn unitarity_deviation(&self) -> f64 {
        let d = self.dim;
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                let mut s = Complex64::new(0.0, 0.0);
                for k in 0..d {
                    s += self.data[k * d + i].conj() * self.data[k * d + j];
                }
                if i == j {
                    s -= Complex64::new(1.0, 0.0);
                }
                let mag = math::sqrt(s.norm_sqr());
                if mag > worst {
                    worst = mag;
                }
            }
        }
        worst
    }
}

/// A normalized pure state over one or more qubit registers.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amps: Vec<Complex64>,
}

impl StateVector {
    /// The server's source state `|+⟩ = (|0⟩ + |1⟩)/√2`.
    pub fn prepare_plus() -> Self {
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        Self { amps: vec![h, h] }
    }

    /// Computational basis state `|index⟩` over `num_qubits` registers.
    pub fn basis_state(num_qubits: usize, index: usize) -> Self {
        let dim = 1usize << num_qubits;
        assert!(index < dim, "basis index out of range");
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Self { amps }
    }

    /// Build a state from raw amplitudes, enforcing the stored-state
    /// invariants: power-of-two dimension, finite entries, unit norm within
    /// [`NORM_TOL`].
    pub fn from_amps(amps: Vec<Complex64>) -> Result<Self, QubitError> {
        if amps.is_empty() || !amps.len().is_power_of_two() {
            return Err(QubitError::InvalidState { reason: "dimension must be a nonzero power of two" });
        }
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(QubitError::InvalidState { reason: "amplitudes must be finite" });
        }
        let s = Self { amps };
        if math::abs(s.norm_sqr() - 1.0) > NORM_TOL {
            return Err(QubitError::InvalidState { reason: "state is not normalized" });
        }
        Ok(s)
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn num_qubits(&self) -> usize {
        self.amps.len().trailing_zeros() as usize
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    fn check_register(&self, target: usize) -> Result<usize, QubitError> {
        let nq = self.num_qubits();
        if target >= nq {
            return Err(QubitError::RegisterOutOfRange { register: target, num_qubits: nq });
        }
        // register 0 is the most significant bit
        Ok(nq - 1 - target)
    }

    /// Apply a single-qubit operation to one register.
    pub fn apply_op(&self, op: UnitaryOp, target: usize) -> Result<Self, QubitError> {
        let shift = self.check_register(target)?;
        let m = op.matrix();
        let bit = 1usize << shift;
        let mut amps = self.amps.clone();
        for i in 0..self.amps.len() {
            if i & bit != 0 {
                continue;
            }
            let j = i | bit;
            let a0 = self.amps[i];
            let a1 = self.amps[j];
            amps[i] = m[0] * a0 + m[1] * a1;
            amps[j] = m[2] * a0 + m[3] * a1;
        }
        Ok(Self { amps })
    }

    /// Apply a verified unitary to an ordered list of registers.
    ///
    /// `targets[0]` owns the most significant bit of the matrix index, matching
    /// the register order produced by [`StateVector::tensor`].
    pub fn apply_matrix(&self, matrix: &UnitaryMatrix, targets: &[usize]) -> Result<Self, QubitError> {
        let k = targets.len();
        let span = 1usize << k;
        if matrix.dim() != span {
            return Err(QubitError::MatrixSizeMismatch { matrix_dim: matrix.dim(), expected: span });
        }
        let mut shifts = Vec::with_capacity(k);
        for &t in targets {
            shifts.push(self.check_register(t)?);
        }
        for i in 0..k {
            for j in 0..i {
                if shifts[i] == shifts[j] {
                    return Err(QubitError::InvalidState { reason: "duplicate target register" });
                }
            }
        }
        let tmask: usize = shifts.iter().map(|&s| 1usize << s).sum();

        let mut amps = self.amps.clone();
        let mut gathered = vec![Complex64::new(0.0, 0.0); span];
        let mut idx_of = vec![0usize; span];
        for base in 0..self.amps.len() {
            if base & tmask != 0 {
                continue;
            }
            for sub in 0..span {
                let mut idx = base;
                for (b, &s) in shifts.iter().enumerate() {
                    if sub & (1 << (k - 1 - b)) != 0 {
                        idx |= 1 << s;
                    }
                }
                idx_of[sub] = idx;
                gathered[sub] = self.amps[idx];
            }
            for row in 0..span {
                let mut acc = Complex64::new(0.0, 0.0);
                for col in 0..span {
                    acc += matrix.get(row, col) * gathered[col];
                }
                amps[idx_of[row]] = acc;
            }
        }
        Ok(Self { amps })
    }

    /// Kronecker product: `self`'s registers stay most significant, `other`'s
    /// registers are appended after them.
    pub fn tensor(&self, other: &Self) -> Self {
        let db = other.amps.len();
        let mut amps = Vec::with_capacity(self.amps.len() * db);
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Self { amps }
    }

    /// Projective measurement of one register.
    ///
    /// `rand` is an externally drawn uniform value in `[0, 1)`. The first
    /// outcome in basis order (`Plus` for X, `Zero` for Z) is selected when
    /// `rand` falls below its probability, so identical draws always reproduce
    /// identical outcomes. Branch probabilities below [`PROB_FLOOR`] are never
    /// selected. Returns the outcome and the renormalized collapsed state.
    pub fn measure(&self, target: usize, basis: MeasBasis, rand: f64) -> Result<(Outcome, Self), QubitError> {
        let shift = self.check_register(target)?;
        let bit = 1usize << shift;
        match basis {
            MeasBasis::X => {
                let inv = Complex64::new(FRAC_1_SQRT_2, 0.0);
                let mut p_plus = 0.0;
                for i in 0..self.amps.len() {
                    if i & bit != 0 {
                        continue;
                    }
                    let plus = (self.amps[i] + self.amps[i | bit]) * inv;
                    p_plus += plus.norm_sqr();
                }
                let take_plus = select_first(p_plus, rand);
                let outcome = if take_plus { Outcome::Plus } else { Outcome::Minus };
                let p = if take_plus { p_plus } else { 1.0 - p_plus };
                let scale = Complex64::new(1.0 / math::sqrt(p.max(PROB_FLOOR)), 0.0);
                let mut amps = vec![Complex64::new(0.0, 0.0); self.amps.len()];
                for i in 0..self.amps.len() {
                    if i & bit != 0 {
                        continue;
                    }
                    let j = i | bit;
                    let branch = if take_plus {
                        (self.amps[i] + self.amps[j]) * inv
                    } else {
                        (self.amps[i] - self.amps[j]) * inv
                    };
                    let comp = branch * inv * scale;
                    amps[i] = comp;
                    amps[j] = if take_plus { comp } else { -comp };
                }
                Ok((outcome, Self { amps }))
            }
            MeasBasis::Z => {
                let mut p_zero = 0.0;
                for (i, a) in self.amps.iter().enumerate() {
                    if i & bit == 0 {
                        p_zero += a.norm_sqr();
                    }
                }
                let take_zero = select_first(p_zero, rand);
                let outcome = if take_zero { Outcome::Zero } else { Outcome::One };
                let p = if take_zero { p_zero } else { 1.0 - p_zero };
                let scale = Complex64::new(1.0 / math::sqrt(p.max(PROB_FLOOR)), 0.0);
                let mut amps = vec![Complex64::new(0.0, 0.0); self.amps.len()];
                for (i, a) in self.amps.iter().enumerate() {
                    let keep = (i & bit == 0) == take_zero;
                    if keep {
                        amps[i] = a * scale;
                    }
                }
                Ok((outcome, Self { amps }))
            }
        }
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &Self) -> Result<f64, QubitError> {
        if self.amps.len() != other.amps.len() {
            return Err(QubitError::DimensionMismatch { left: self.amps.len(), right: other.amps.len() });
        }
        let mut ip = Complex64::new(0.0, 0.0);
        for (a, b) in self.amps.iter().zip(other.amps.iter()) {
            ip += a.conj() * b;
        }
        Ok(ip.norm_sqr())
    }
}

/// Cumulative-threshold outcome selection with the degenerate-branch guard.
fn select_first(p_first: f64, rand: f64) -> bool {
    if p_first <= PROB_FLOOR {
        false
    } else if p_first >= 1.0 - PROB_FLOOR {
        true
    } else {
        rand < p_first
    }
}

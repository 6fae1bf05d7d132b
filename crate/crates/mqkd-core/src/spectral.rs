//! Eigenvalues of small Hermitian matrices, for entropy computations.
//!
//! A d×d Hermitian matrix `X + iY` embeds into the 2d×2d real symmetric matrix
//! `[[X, -Y], [Y, X]]`, whose spectrum is the Hermitian spectrum with every
//! eigenvalue doubled. Cyclic Jacobi rotations then diagonalize the embedding;
//! at the dimensions used here (d ≤ 4) this converges in a handful of sweeps.

use alloc::{vec, vec::Vec};
use num_complex::Complex64;

use crate::math;

/// Eigenvalues of the real symmetric embedding of a Hermitian matrix
/// (row-major, dimension `dim`): the true spectrum, each value twice.
pub(crate) fn hermitian_eigenvalues_doubled(dim: usize, m: &[Complex64]) -> Vec<f64> {
    debug_assert_eq!(m.len(), dim * dim);
    let n = 2 * dim;
    let mut a = vec![0.0f64; n * n];
    for i in 0..dim {
        for j in 0..dim {
            let z = m[i * dim + j];
            a[i * n + j] = z.re;
            a[i * n + (dim + j)] = -z.im;
            a[(dim + i) * n + j] = z.im;
            a[(dim + i) * n + (dim + j)] = z.re;
        }
    }
    jacobi_eigenvalues(n, &mut a)
}

/// Von Neumann entropy (bits) of a mixture of pure states, computed from the
/// weighted Gram matrix `M_ij = √(w_i w_j)·⟨ψ_i|ψ_j⟩`, which shares the
/// mixture's nonzero spectrum. Weights must sum to 1.
pub(crate) fn ensemble_entropy(weights: &[f64], states: &[&[Complex64]]) -> f64 {
    debug_assert_eq!(weights.len(), states.len());
    let live: Vec<usize> = (0..weights.len()).filter(|&i| weights[i] > 1e-15).collect();
    let d = live.len();
    if d <= 1 {
        return 0.0;
    }
    let mut gram = vec![Complex64::new(0.0, 0.0); d * d];
    for (r, &i) in live.iter().enumerate() {
        for (c, &j) in live.iter().enumerate() {
            let ip: Complex64 = states[i]
                .iter()
                .zip(states[j].iter())
                .map(|(a, b)| a.conj() * b)
                .sum();
            gram[r * d + c] = ip * math::sqrt(weights[i] * weights[j]);
        }
    }
    let doubled = hermitian_eigenvalues_doubled(d, &gram);
    let mut entropy = 0.0;
    for lambda in doubled {
        if lambda > 1e-14 {
            entropy -= 0.5 * lambda * math::log2(lambda);
        }
    }
    entropy
}

/// Cyclic Jacobi diagonalization of a real symmetric matrix (row-major,
/// destroyed in place). Returns the diagonal after convergence.
fn jacobi_eigenvalues(n: usize, a: &mut [f64]) -> Vec<f64> {
    let mut scale = 0.0f64;
    for v in a.iter() {
        scale = scale.max(math::abs(*v));
    }
    let tol = 1e-15 * (1.0 + scale);

    for _sweep in 0..64 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(math::abs(a[p * n + q]));
            }
        }
        if off < tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if math::abs(apq) < tol {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = {
                    let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
                    sign / (math::abs(theta) + math::sqrt(theta * theta + 1.0))
                };
                let c = 1.0 / math::sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i * n + i]).collect()
}

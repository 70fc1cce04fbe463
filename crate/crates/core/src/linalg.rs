//! Small dense linear-algebra helpers on top of `nalgebra`.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;

/// Eigenvalues within this distance below zero are treated as round-off.
pub const PSD_CLAMP: f64 = 1e-9;

/// Eigenvalues of a Hermitian matrix, ascending. Only the lower triangle is read.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Shannon entropy in bits, with `0·log 0 = 0` and tiny negatives clamped.
pub fn entropy_bits(probabilities: impl IntoIterator<Item = f64>) -> f64 {
    probabilities
        .into_iter()
        .map(|p| if p > -PSD_CLAMP && p <= 0.0 { 0.0 } else { p })
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.log2())
        .sum()
}

/// von Neumann entropy `S(ρ)` in bits.
pub fn von_neumann_entropy(rho: &CMatrix) -> f64 {
    entropy_bits(hermitian_eigenvalues(rho))
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn is_hermitian(m: &CMatrix, tol: f64) -> bool {
    m.is_square() && max_abs_diff(m, &m.adjoint()) <= tol
}

/// Trace distance `½‖a − b‖₁` between Hermitian matrices.
pub fn trace_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    let d = a - b;
    0.5 * hermitian_eigenvalues(&d).iter().map(|x| x.abs()).sum::<f64>()
}

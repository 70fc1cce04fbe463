//! Lossless compression of symmetric qubit blocks.
//!
//! A block of `c` qubits in a permutation-invariant state lives in the
//! `(c+1)`-dimensional symmetric subspace, so it fits on
//! `r = ⌈log₂(c+1)⌉` qubits. [`SymmetricIsometry`] is the map
//! `|D_w^(c)⟩ ↦ |w⟩`. [`UnitaryCompletion`] extends it to a unitary with a
//! flag register, which gives a trace-preserving encoder on arbitrary inputs.

use std::collections::HashMap;
use std::io::Write;
use std::sync::{Arc, OnceLock, RwLock};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{binomial_f64, weighted_partitions, PartitionShape};
use crate::entanglement::DensityMatrix;
use crate::error::{Error, Result};
use crate::linalg::CMatrix;

/// Largest block accepted by [`build_isometry`].
pub const MAX_BLOCK: usize = 10;

/// Qubits needed to store an integer in `0..=c`.
pub fn register_qubits(c: usize) -> usize {
    (usize::BITS - c.leading_zeros()) as usize
}

/// `r_λ = Σᵢ ⌈log₂(λᵢ+1)⌉`.
pub fn rate_for_shape(shape: &PartitionShape) -> usize {
    shape.blocks().iter().map(|&b| register_qubits(b)).sum()
}

/// `R = (1/S(n,m)) Σ_λ f(λ) r_λ`.
pub fn average_rate(n: usize, m: usize) -> Result<f64> {
    let (weighted, total) = weighted_partitions(n, m)?;
    let sum: u128 = weighted.iter().map(|(s, f)| f * rate_for_shape(s) as u128).sum();
    Ok(sum as f64 / total as f64)
}

fn check_block(c: usize) -> Result<()> {
    if c == 0 || c > MAX_BLOCK {
        return Err(Error::Resource(format!("block size {c} outside 1..={MAX_BLOCK}")));
    }
    Ok(())
}

/// Unit vector `|D_w^(c)⟩` in the computational basis.
pub fn dicke_vector(c: usize, w: usize) -> Vec<Complex64> {
    let a = Complex64::new(1.0 / binomial_f64(c, w).sqrt(), 0.0);
    (0..1usize << c)
        .map(|x| if x.count_ones() as usize == w { a } else { Complex64::new(0.0, 0.0) })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetricIsometry {
    pub c: usize,
    pub r: usize,
    /// `2^r × 2^c`.
    #[serde(skip)]
    pub matrix: CMatrix,
}

/// The map `|D_w^(c)⟩ ↦ |w⟩` on `r` qubits; zero on the non-symmetric complement.
pub fn build_isometry(c: usize) -> Result<SymmetricIsometry> {
    check_block(c)?;
    let r = register_qubits(c);
    let mut matrix = CMatrix::zeros(1 << r, 1 << c);
    for w in 0..=c {
        for (x, a) in dicke_vector(c, w).into_iter().enumerate() {
            matrix[(w, x)] = a;
        }
    }
    Ok(SymmetricIsometry { c, r, matrix })
}

impl SymmetricIsometry {
    /// `V†V`, the projector onto the symmetric subspace.
    pub fn projector(&self) -> CMatrix {
        self.matrix.adjoint() * &self.matrix
    }

    /// `V ρ V†` for a state supported on the symmetric subspace.
    pub fn compress(&self, rho: &CMatrix) -> CMatrix {
        &self.matrix * rho * self.matrix.adjoint()
    }

    /// `V† σ V`.
    pub fn decompress(&self, sigma: &CMatrix) -> CMatrix {
        self.matrix.adjoint() * sigma * &self.matrix
    }

    /// `V |ψ⟩`.
    pub fn apply(&self, psi: &[Complex64]) -> Vec<Complex64> {
        (&self.matrix * nalgebra::DVector::from_column_slice(psi)).iter().copied().collect()
    }
}

/// `Õ = V O V†` on the compressed register.
pub fn transport_operator(op: &CMatrix, c: usize) -> Result<CMatrix> {
    let v = isometry(c)?;
    if op.nrows() != v.matrix.ncols() || op.ncols() != v.matrix.ncols() {
        return Err(Error::Domain(format!(
            "operator is {}x{}, expected {}x{}",
            op.nrows(),
            op.ncols(),
            v.matrix.ncols(),
            v.matrix.ncols()
        )));
    }
    Ok(v.compress(op))
}

/// A `2^c × 2^c` unitary acting as the isometry into `register ⊗ |0…0⟩_flag`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryCompletion {
    pub c: usize,
    pub register_qubits: usize,
    /// `c - register_qubits`, appended after the register.
    pub flag_qubits: usize,
    pub unitary: CMatrix,
}

/// Extends [`build_isometry`] to a unitary. The non-symmetric complement is
/// Gram–Schmidt orthonormalized from the computational basis in order and sent
/// to the unused outputs in ascending order.
pub fn unitary_completion(c: usize) -> Result<UnitaryCompletion> {
    check_block(c)?;
    let r = register_qubits(c);
    let flag = c - r;
    let dim = 1usize << c;
    let mut basis: Vec<Vec<Complex64>> = (0..=c).map(|w| dicke_vector(c, w)).collect();
    for x in 0..dim {
        if basis.len() == dim {
            break;
        }
        let mut v = vec![Complex64::new(0.0, 0.0); dim];
        v[x] = Complex64::new(1.0, 0.0);
        // two passes of modified Gram–Schmidt
        for _ in 0..2 {
            for b in &basis {
                let overlap: Complex64 = b.iter().zip(&v).map(|(p, q)| p.conj() * q).sum();
                v.iter_mut().zip(b).for_each(|(q, p)| *q -= overlap * p);
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-8 {
            basis.push(v.into_iter().map(|z| z / norm).collect());
        }
    }
    let symmetric_outputs: Vec<usize> = (0..=c).map(|w| w << flag).collect();
    let spare = (0..dim).filter(|o| !symmetric_outputs.contains(o));
    let outputs: Vec<usize> = symmetric_outputs.iter().copied().chain(spare).collect();
    let mut unitary = CMatrix::zeros(dim, dim);
    for (b, &out) in basis.iter().zip(&outputs) {
        for (x, z) in b.iter().enumerate() {
            unitary[(out, x)] = z.conj();
        }
    }
    Ok(UnitaryCompletion { c, register_qubits: r, flag_qubits: flag, unitary })
}

impl UnitaryCompletion {
    /// Trace-preserving encoder: conjugate by the unitary and discard the flag.
    pub fn encode(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        encode_blocks(rho, &[self.c])
    }
}

/// Applies the block encoders to consecutive qubit blocks of sizes `blocks`
/// and traces out every flag register. The output register keeps the block
/// order, each block contributing its `⌈log₂(c+1)⌉` qubits.
pub fn encode_blocks(rho: &DensityMatrix, blocks: &[usize]) -> Result<DensityMatrix> {
    let n: usize = blocks.iter().sum();
    if rho.dims().len() != n || rho.dims().iter().any(|&d| d != 2) {
        return Err(Error::Domain(format!(
            "encoder for blocks {blocks:?} needs {n} qubits, got dims {:?}",
            rho.dims()
        )));
    }
    let mut u = CMatrix::identity(1, 1);
    let mut keep = Vec::new();
    let mut offset = 0;
    for &c in blocks {
        let comp = completion(c)?;
        u = u.kronecker(&comp.unitary);
        keep.extend(offset..offset + comp.register_qubits);
        offset += c;
    }
    let rotated = rho.conjugate(&u, vec![2; n])?;
    rotated.partial_trace(&keep)
}

static ISOMETRIES: OnceLock<RwLock<HashMap<usize, Arc<SymmetricIsometry>>>> = OnceLock::new();
static COMPLETIONS: OnceLock<RwLock<HashMap<usize, Arc<UnitaryCompletion>>>> = OnceLock::new();

fn cached<T>(
    cell: &'static OnceLock<RwLock<HashMap<usize, Arc<T>>>>,
    c: usize,
    build: impl FnOnce(usize) -> Result<T>,
) -> Result<Arc<T>> {
    let map = cell.get_or_init(Default::default);
    if let Some(v) = map.read().expect("cache lock poisoned").get(&c) {
        return Ok(Arc::clone(v));
    }
    let built = Arc::new(build(c)?);
    let mut w = map.write().expect("cache lock poisoned");
    Ok(Arc::clone(w.entry(c).or_insert(built)))
}

/// Shared, lazily built [`build_isometry`] result.
pub fn isometry(c: usize) -> Result<Arc<SymmetricIsometry>> {
    cached(&ISOMETRIES, c, build_isometry)
}

/// Shared, lazily built [`unitary_completion`] result.
pub fn completion(c: usize) -> Result<Arc<UnitaryCompletion>> {
    cached(&COMPLETIONS, c, unitary_completion)
}

/// Writes a matrix as plain text: a `# rows cols` header, then one line per row
/// of space-separated `re,im` pairs.
pub fn write_matrix<W: Write>(out: &mut W, m: &CMatrix) -> std::io::Result<()> {
    writeln!(out, "# {} {}", m.nrows(), m.ncols())?;
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols())
            .map(|j| {
                let z = m[(i, j)];
                format!("{},{}", crate::format::float(z.re), crate::format::float(z.im))
            })
            .collect();
        writeln!(out, "{}", row.join(" "))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_diff;

    #[test]
    fn register_sizes() {
        assert_eq!(register_qubits(1), 1);
        assert_eq!(register_qubits(2), 2);
        assert_eq!(register_qubits(3), 2);
        assert_eq!(register_qubits(4), 3);
        assert_eq!(register_qubits(7), 3);
        assert_eq!(register_qubits(8), 4);
        for c in 1..200usize {
            assert_eq!(register_qubits(c), ((c + 1) as f64).log2().ceil() as usize);
        }
    }

    #[test]
    fn rates() {
        let s = |b: &[usize]| PartitionShape::new(b.to_vec()).unwrap();
        assert_eq!(rate_for_shape(&s(&[1, 2, 3])), 5);
        assert_eq!(rate_for_shape(&s(&[2, 2, 2])), 6);
        assert_eq!(rate_for_shape(&s(&[9])), 4);
        assert!((average_rate(2, 2).unwrap() - 2.0).abs() < 1e-15);
        assert!((average_rate(4, 2).unwrap() - 24.0 / 7.0).abs() < 1e-15);
        assert!((average_rate(6, 3).unwrap() - 465.0 / 90.0).abs() < 1e-14);
    }

    #[test]
    fn small_isometries() {
        let v1 = build_isometry(1).unwrap();
        assert_eq!(v1.r, 1);
        assert!(max_abs_diff(&v1.matrix, &CMatrix::identity(2, 2)) < 1e-15);
        let v3 = build_isometry(3).unwrap();
        assert_eq!((v3.matrix.nrows(), v3.matrix.ncols()), (4, 8));
        for w in 0..=3 {
            let img = v3.apply(&dicke_vector(3, w));
            for (i, z) in img.iter().enumerate() {
                let want = if i == w { 1.0 } else { 0.0 };
                assert!((z - Complex64::new(want, 0.0)).norm() < 1e-12);
            }
        }
        assert_eq!(build_isometry(5).unwrap().r, 3);
        assert!(matches!(build_isometry(0), Err(Error::Resource(_))));
        assert!(matches!(build_isometry(11), Err(Error::Resource(_))));
    }

    #[test]
    fn projector_is_idempotent_and_hermitian() {
        for c in 1..=6 {
            let p = build_isometry(c).unwrap().projector();
            assert!(max_abs_diff(&(&p * &p), &p) < 1e-12);
            assert!(max_abs_diff(&p.adjoint(), &p) < 1e-12);
            assert!((p.trace().re - (c + 1) as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn completion_is_unitary_and_extends_isometry() {
        for c in 1..=6 {
            let u = unitary_completion(c).unwrap();
            let d = 1 << c;
            assert!(max_abs_diff(&(u.unitary.adjoint() * &u.unitary), &CMatrix::identity(d, d)) < 1e-12);
            assert_eq!(u.register_qubits + u.flag_qubits, c);
            let v = build_isometry(c).unwrap();
            for w in 0..=c {
                let out = &u.unitary * nalgebra::DVector::from_vec(dicke_vector(c, w));
                let reg = v.apply(&dicke_vector(c, w));
                for (i, z) in reg.iter().enumerate() {
                    assert!((out[i << u.flag_qubits] - z).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn transport_excitation_number() {
        let c = 3;
        let mut num = CMatrix::zeros(8, 8);
        for x in 0..8usize {
            num[(x, x)] = Complex64::new(x.count_ones() as f64, 0.0);
        }
        let t = transport_operator(&num, c).unwrap();
        let mut want = CMatrix::zeros(4, 4);
        for w in 0..4 {
            want[(w, w)] = Complex64::new(w as f64, 0.0);
        }
        assert!(max_abs_diff(&t, &want) < 1e-12);
        let p = transport_operator(&build_isometry(3).unwrap().projector(), 3).unwrap();
        assert!(max_abs_diff(&p, &CMatrix::identity(4, 4)) < 1e-12);
        assert!(transport_operator(&CMatrix::identity(4, 4), 3).is_err());
    }

    #[test]
    fn cache_returns_shared_instances() {
        let a = isometry(4).unwrap();
        let b = isometry(4).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
        assert_eq!(*a, build_isometry(4).unwrap());
    }

    #[test]
    fn matrix_text_format() {
        let mut buf = Vec::new();
        write_matrix(&mut buf, &build_isometry(1).unwrap().matrix).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# 2 2");
        assert_eq!(lines[1].split(' ').count(), 2);
        assert!(lines[1].starts_with("1.00000000000,0.00000000000"));
    }
}

//! Entanglement measures.
//!
//! * von Neumann entropy across a bipartition, from the Schmidt spectrum of
//!   the bipartite [`BlockTensor`].
//! * Partition-based geometric entanglement `E_G^λ = −log₂ Λ²`, where `Λ` is
//!   the largest overlap with a block-product state. `Λ` is estimated by
//!   alternating block updates with random restarts. The estimate is a lower
//!   bound on `Λ`, so the reported `e_g` is an upper bound on the true value.
//! * Logarithmic negativity of density matrices via the partial transpose.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{weighted_partitions, PartitionShape};
use crate::error::{domain, Error, Result};
use crate::linalg::{entropy_bits, hermitian_eigenvalues, is_hermitian, CMatrix, PSD_CLAMP};
use crate::par::derive_seed;
use crate::states::{BlockTensor, WeightedDickeState};
use crate::tensor::DenseTensor;

/// Caveat attached to every [`GmeResult`].
pub const GME_NOTE: &str =
    "alternating optimization finds a lower bound on the product overlap; e_g is an upper bound on the geometric entanglement";

/// Entries smaller than this are dropped before the alternating sweeps.
const ENTRY_TOL: f64 = 1e-15;
/// A contraction with norm below this is treated as the zero vector.
const ZERO_CONTRACTION: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GmeOptions {
    pub restarts: usize,
    pub max_sweeps: usize,
    /// Stop a restart once a sweep improves the overlap by less than this.
    pub tol: f64,
    pub seed: u64,
}

impl Default for GmeOptions {
    fn default() -> Self {
        Self { restarts: 32, max_sweeps: 200, tol: 1e-10, seed: 0 }
    }
}

impl GmeOptions {
    pub fn with_restarts(self, restarts: usize) -> Self {
        Self { restarts, ..self }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GmeResult {
    pub e_g: f64,
    pub best_overlap: f64,
    pub restarts_used: usize,
    /// Sweeps run by each restart.
    pub sweeps: Vec<usize>,
    /// Final overlap reached by each restart.
    pub final_overlaps: Vec<f64>,
    /// Whether the best restart stopped on the tolerance rather than the sweep cap.
    pub converged: bool,
    pub note: String,
}

/// Entanglement measure used for partition averages.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    VonNeumann,
    Gme,
}

/// Nonzero entries of a tensor in a layout suited to repeated contraction.
#[derive(Debug, Clone)]
pub struct ProductOverlapProblem {
    dims: Vec<usize>,
    index: Vec<u32>,
    values: Vec<Complex64>,
}

/// Outcome of one alternating run from one starting point.
#[derive(Debug, Clone)]
pub struct AlternatingRun {
    pub overlap: f64,
    /// Overlap after each completed sweep.
    pub trajectory: Vec<f64>,
    pub converged: bool,
    pub factors: Vec<Vec<Complex64>>,
}

impl ProductOverlapProblem {
    pub fn new(tensor: &DenseTensor) -> Result<Self> {
        if tensor.rank() == 0 {
            return domain("tensor has no blocks");
        }
        let entries = tensor.nonzeros(ENTRY_TOL);
        if entries.is_empty() {
            return domain("tensor is identically zero");
        }
        let mut index = Vec::with_capacity(entries.len() * tensor.rank());
        let mut values = Vec::with_capacity(entries.len());
        for (idx, v) in entries {
            index.extend(idx.iter().map(|&i| i as u32));
            values.push(v);
        }
        Ok(Self { dims: tensor.shape().to_vec(), index, values })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    fn norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `(⊗_{b≠i} ⟨φ_b|) T`, a vector on block `i`.
    fn contract_except(&self, i: usize, factors: &[Vec<Complex64>], out: &mut [Complex64]) {
        let m = self.dims.len();
        out.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
        for (e, &v) in self.values.iter().enumerate() {
            let idx = &self.index[e * m..(e + 1) * m];
            let mut p = v;
            for (b, &j) in idx.iter().enumerate() {
                if b != i {
                    p *= factors[b][j as usize].conj();
                }
            }
            out[idx[i] as usize] += p;
        }
    }

    /// Runs block-coordinate ascent from the given unit factors.
    pub fn alternate<R: Rng>(
        &self,
        mut factors: Vec<Vec<Complex64>>,
        max_sweeps: usize,
        tol: f64,
        rng: &mut R,
    ) -> AlternatingRun {
        let m = self.dims.len();
        if m == 1 {
            let overlap = self.norm();
            return AlternatingRun { overlap, trajectory: vec![overlap], converged: true, factors };
        }
        let mut scratch: Vec<Vec<Complex64>> =
            self.dims.iter().map(|&d| vec![Complex64::new(0.0, 0.0); d]).collect();
        let mut trajectory = Vec::new();
        let mut previous = 0.0;
        let mut converged = false;
        for _ in 0..max_sweeps {
            let mut overlap = 0.0;
            for i in 0..m {
                let mut v = std::mem::take(&mut scratch[i]);
                self.contract_except(i, &factors, &mut v);
                let nv = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                if nv < ZERO_CONTRACTION {
                    // Measure-zero start: draw a fresh direction for this block.
                    factors[i] = random_unit(self.dims[i], rng);
                    overlap = 0.0;
                } else {
                    for (f, z) in factors[i].iter_mut().zip(&v) {
                        *f = z / nv;
                    }
                    overlap = nv;
                }
                scratch[i] = v;
            }
            trajectory.push(overlap);
            if overlap > 0.0 && overlap - previous < tol {
                converged = true;
                break;
            }
            previous = overlap;
        }
        let overlap = trajectory.last().copied().unwrap_or(0.0);
        AlternatingRun { overlap, trajectory, converged, factors }
    }

    /// Independent random unit factors, one per block.
    pub fn random_factors<R: Rng>(&self, rng: &mut R) -> Vec<Vec<Complex64>> {
        self.dims.iter().map(|&d| random_unit(d, rng)).collect()
    }

    /// Multi-restart estimate of the maximal product overlap.
    pub fn solve(&self, opts: &GmeOptions) -> Result<GmeResult> {
        self.solve_with_factors(opts).map(|(r, _)| r)
    }

    /// As [`solve`](Self::solve), also returning the best product factors found.
    pub fn solve_with_factors(&self, opts: &GmeOptions) -> Result<(GmeResult, Vec<Vec<Complex64>>)> {
        if opts.restarts == 0 {
            return domain("at least one restart is required");
        }
        let mut sweeps = Vec::with_capacity(opts.restarts);
        let mut finals = Vec::with_capacity(opts.restarts);
        let mut best: Option<AlternatingRun> = None;
        for r in 0..opts.restarts {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(opts.seed, r as u64));
            let start = self.random_factors(&mut rng);
            let run = self.alternate(start, opts.max_sweeps, opts.tol, &mut rng);
            sweeps.push(run.trajectory.len());
            finals.push(run.overlap);
            if best.as_ref().is_none_or(|b| run.overlap > b.overlap) {
                best = Some(run);
            }
        }
        let best = best.expect("at least one restart");
        let overlap = best.overlap.min(1.0);
        if overlap <= 0.0 {
            return domain("no restart reached a nonzero overlap");
        }
        let result = GmeResult {
            e_g: -(overlap * overlap).log2(),
            best_overlap: overlap,
            restarts_used: opts.restarts,
            sweeps,
            final_overlaps: finals,
            converged: best.converged,
            note: GME_NOTE.to_string(),
        };
        Ok((result, best.factors))
    }
}

/// `⟨φ₁ ⊗ … ⊗ φ_m | T⟩`.
pub fn product_overlap(tensor: &DenseTensor, factors: &[Vec<Complex64>]) -> Complex64 {
    tensor
        .indexed()
        .filter(|(_, v)| *v != Complex64::new(0.0, 0.0))
        .map(|(idx, v)| idx.iter().zip(factors).fold(v, |acc, (&j, f)| acc * f[j].conj()))
        .sum()
}

/// Uniformly random unit vector in `C^d` (normalized complex Gaussian).
pub fn random_unit<R: Rng>(d: usize, rng: &mut R) -> Vec<Complex64> {
    loop {
        let v: Vec<Complex64> = (0..d)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n > 0.0 {
            return v.into_iter().map(|z| z / n).collect();
        }
    }
}

/// Geometric entanglement of an arbitrary normalized tensor across its axes.
pub fn gme_tensor(tensor: &DenseTensor, opts: &GmeOptions) -> Result<GmeResult> {
    ProductOverlapProblem::new(tensor)?.solve(opts)
}

/// Geometric entanglement of a symmetric state across any split with block sizes `shape`.
pub fn gme(state: &WeightedDickeState, shape: &PartitionShape, opts: &GmeOptions) -> Result<GmeResult> {
    gme_tensor(state.block_tensor(shape)?.tensor(), opts)
}

/// Geometric entanglement of a statevector across concrete qubit blocks,
/// optimizing over the full local Hilbert spaces.
pub fn gme_statevector(
    amps: &[Complex64],
    n: usize,
    blocks: &[Vec<usize>],
    opts: &GmeOptions,
) -> Result<GmeResult> {
    gme_tensor(&DenseTensor::from_statevector(amps, n, blocks)?, opts)
}

/// Squared Schmidt coefficients of a two-block tensor, descending.
pub fn schmidt_spectrum(bt: &BlockTensor) -> Result<Vec<f64>> {
    let t = bt.tensor();
    if t.rank() != 2 {
        return domain(format!("Schmidt spectrum needs two blocks, got {}", bt.partition()));
    }
    let (r, c) = (t.shape()[0], t.shape()[1]);
    let mat = CMatrix::from_row_slice(r, c, t.data());
    let rho = if r <= c { &mat * mat.adjoint() } else { mat.adjoint() * &mat };
    let mut ev = hermitian_eigenvalues(&rho);
    ev.reverse();
    Ok(ev)
}

/// `S(ρ_A)` in bits for a block of `k ≤ ⌊n/2⌋` qubits of a symmetric state.
pub fn von_neumann_bipartite(state: &WeightedDickeState, k: usize) -> Result<f64> {
    let n = state.n();
    if k == 0 || k > n / 2 {
        return domain(format!("block size {k} must satisfy 1 <= k <= {}", n / 2));
    }
    let bt = state.block_tensor(&PartitionShape::bipartition(n, k)?)?;
    Ok(entropy_bits(schmidt_spectrum(&bt)?))
}

/// One entry of a partition profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionValue {
    pub shape: PartitionShape,
    pub multiplicity: u128,
    pub value: f64,
}

/// Entanglement for every shape in `Λ_{n,m}` together with its multiplicity.
pub fn partition_profile(
    state: &WeightedDickeState,
    m: usize,
    measure: Measure,
    opts: &GmeOptions,
) -> Result<(Vec<PartitionValue>, u128)> {
    if measure == Measure::VonNeumann && m != 2 {
        return domain(format!("von Neumann average is defined for m=2 only, got m={m}"));
    }
    let (weighted, total) = weighted_partitions(state.n(), m)?;
    let profile = weighted
        .into_iter()
        .map(|(shape, f)| {
            let value = match measure {
                Measure::VonNeumann => von_neumann_bipartite(state, shape.blocks()[0])?,
                Measure::Gme => gme(state, &shape, opts)?.e_g,
            };
            Ok(PartitionValue { shape, multiplicity: f, value })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((profile, total))
}

/// `E = (1/S(n,m)) Σ_λ f(λ) E(λ)`.
pub fn average_entanglement(
    state: &WeightedDickeState,
    m: usize,
    measure: Measure,
    opts: &GmeOptions,
) -> Result<f64> {
    let (profile, total) = partition_profile(state, m, measure, opts)?;
    Ok(weighted_mean(&profile, total))
}

pub(crate) fn weighted_mean(profile: &[PartitionValue], total: u128) -> f64 {
    profile.iter().map(|p| p.multiplicity as f64 * p.value).sum::<f64>() / total as f64
}

/// Density operator on a register of subsystems with dimensions `dims`
/// (big-endian: subsystem 0 is the most significant digit).
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dims: Vec<usize>,
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Validating constructor: Hermitian and unit trace within 1e-10,
    /// eigenvalues at least `-1e-9`.
    pub fn new(dims: Vec<usize>, matrix: CMatrix) -> Result<Self> {
        let rho = Self::from_parts(dims, matrix)?;
        if !is_hermitian(&rho.matrix, 1e-10) {
            return domain("density matrix is not Hermitian");
        }
        if (rho.trace() - 1.0).abs() > 1e-10 {
            return domain(format!("density matrix trace is {}", rho.trace()));
        }
        if hermitian_eigenvalues(&rho.matrix).first().is_some_and(|&e| e < -PSD_CLAMP) {
            return domain("density matrix has a negative eigenvalue");
        }
        Ok(rho)
    }

    pub(crate) fn from_parts(dims: Vec<usize>, matrix: CMatrix) -> Result<Self> {
        let d: usize = dims.iter().product();
        if matrix.nrows() != d || matrix.ncols() != d {
            return domain(format!(
                "matrix is {}x{} but dims {dims:?} need {d}x{d}",
                matrix.nrows(),
                matrix.ncols()
            ));
        }
        Ok(Self { dims, matrix })
    }

    /// `|ψ⟩⟨ψ|` for a statevector over `dims`.
    pub fn from_pure(amps: &[Complex64], dims: Vec<usize>) -> Result<Self> {
        let v = nalgebra::DVector::from_column_slice(amps);
        Self::from_parts(dims, &v * v.adjoint())
    }

    /// `|ψ⟩⟨ψ|` on `n` qubits.
    pub fn from_qubits(amps: &[Complex64], n: usize) -> Result<Self> {
        Self::from_pure(amps, vec![2; n])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix)
    }

    pub fn entropy(&self) -> f64 {
        entropy_bits(self.eigenvalues())
    }

    fn check_subsystems(&self, subsystems: &[usize]) -> Result<()> {
        let mut seen = vec![false; self.dims.len()];
        for &s in subsystems {
            if s >= self.dims.len() || seen[s] {
                return domain(format!(
                    "subsystem set {subsystems:?} invalid for {} subsystems",
                    self.dims.len()
                ));
            }
            seen[s] = true;
        }
        Ok(())
    }

    /// Reduced state on `keep` (ascending order of the kept subsystems).
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        if keep.is_empty() {
            return domain("partial trace must keep at least one subsystem");
        }
        self.check_subsystems(keep)?;
        let mut keep = keep.to_vec();
        keep.sort_unstable();
        let traced: Vec<usize> = (0..self.dims.len()).filter(|s| !keep.contains(s)).collect();
        let layout = Layout::new(&self.dims);
        let kd: Vec<usize> = keep.iter().map(|&s| self.dims[s]).collect();
        let td: Vec<usize> = traced.iter().map(|&s| self.dims[s]).collect();
        let dk: usize = kd.iter().product();
        let dt: usize = td.iter().product();
        let mut digits = vec![0usize; self.dims.len()];
        let compose = |digits: &mut [usize], a: usize, e: usize| {
            scatter(digits, &keep, &kd, a);
            scatter(digits, &traced, &td, e);
            layout.index(digits)
        };
        let mut out = CMatrix::zeros(dk, dk);
        for e in 0..dt {
            let rows: Vec<usize> = (0..dk).map(|a| compose(&mut digits, a, e)).collect();
            for (a, &ra) in rows.iter().enumerate() {
                for (b, &rb) in rows.iter().enumerate() {
                    out[(a, b)] += self.matrix[(ra, rb)];
                }
            }
        }
        Self::from_parts(kd, out)
    }

    /// Transpose of the indices belonging to `subsystems` only.
    pub fn partial_transpose(&self, subsystems: &[usize]) -> Result<CMatrix> {
        self.check_subsystems(subsystems)?;
        let layout = Layout::new(&self.dims);
        let d = self.matrix.nrows();
        let mut out = CMatrix::zeros(d, d);
        let mut rd = vec![0usize; self.dims.len()];
        let mut cd = vec![0usize; self.dims.len()];
        for r in 0..d {
            for c in 0..d {
                layout.digits(r, &mut rd);
                layout.digits(c, &mut cd);
                for &s in subsystems {
                    std::mem::swap(&mut rd[s], &mut cd[s]);
                }
                out[(layout.index(&rd), layout.index(&cd))] = self.matrix[(r, c)];
            }
        }
        Ok(out)
    }

    /// `E_N = log₂ ‖ρ^{T_A}‖₁` in bits, returned without clamping.
    pub fn log_negativity(&self, subsystems_a: &[usize]) -> Result<f64> {
        let pt = self.partial_transpose(subsystems_a)?;
        let trace_norm: f64 = hermitian_eigenvalues(&pt).iter().map(|e| e.abs()).sum();
        Ok(trace_norm.log2())
    }

    /// `U ρ U†` for a unitary (or isometry) on the whole register; output dims given.
    pub fn conjugate(&self, u: &CMatrix, out_dims: Vec<usize>) -> Result<DensityMatrix> {
        if u.ncols() != self.matrix.nrows() {
            return Err(Error::Domain(format!(
                "operator with {} columns applied to dimension {}",
                u.ncols(),
                self.matrix.nrows()
            )));
        }
        Self::from_parts(out_dims, u * &self.matrix * u.adjoint())
    }
}

/// Mixed-radix index arithmetic for a register.
struct Layout {
    dims: Vec<usize>,
    strides: Vec<usize>,
}

impl Layout {
    fn new(dims: &[usize]) -> Self {
        let mut strides = vec![1; dims.len()];
        for s in (0..dims.len().saturating_sub(1)).rev() {
            strides[s] = strides[s + 1] * dims[s + 1];
        }
        Self { dims: dims.to_vec(), strides }
    }

    fn digits(&self, mut index: usize, out: &mut [usize]) {
        for s in (0..self.dims.len()).rev() {
            out[s] = index % self.dims[s];
            index /= self.dims[s];
        }
    }

    fn index(&self, digits: &[usize]) -> usize {
        digits.iter().zip(&self.strides).map(|(d, s)| d * s).sum()
    }
}

/// Writes the mixed-radix digits of `value` (radices `radix`) into the slots `at`.
fn scatter(digits: &mut [usize], at: &[usize], radix: &[usize], mut value: usize) {
    for (&slot, &r) in at.iter().zip(radix).rev() {
        digits[slot] = value % r;
        value /= r;
    }
}

/// Reduced state of a pure statevector on `keep`, without forming `|ψ⟩⟨ψ|`.
pub fn reduced_pure(amps: &[Complex64], dims: &[usize], keep: &[usize]) -> Result<DensityMatrix> {
    let total: usize = dims.iter().product();
    if amps.len() != total {
        return domain(format!("statevector of length {} does not match dims {dims:?}", amps.len()));
    }
    if keep.is_empty() {
        return domain("partial trace must keep at least one subsystem");
    }
    let mut keep = keep.to_vec();
    keep.sort_unstable();
    if keep.windows(2).any(|w| w[0] == w[1]) || keep.last().is_some_and(|&k| k >= dims.len()) {
        return domain(format!("subsystem set {keep:?} invalid for {} subsystems", dims.len()));
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|s| !keep.contains(s)).collect();
    let kd: Vec<usize> = keep.iter().map(|&s| dims[s]).collect();
    let td: Vec<usize> = traced.iter().map(|&s| dims[s]).collect();
    let dk: usize = kd.iter().product();
    let dt: usize = td.iter().product();
    let layout = Layout::new(dims);
    let mut digits = vec![0usize; dims.len()];
    let mut m = DMatrix::<Complex64>::zeros(dk, dt);
    for a in 0..dk {
        for e in 0..dt {
            scatter(&mut digits, &keep, &kd, a);
            scatter(&mut digits, &traced, &td, e);
            m[(a, e)] = amps[layout.index(&digits)];
        }
    }
    DensityMatrix::from_parts(kd, &m * m.adjoint())
}

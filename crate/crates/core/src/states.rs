//! Permutation-invariant qubit states and their block-local Dicke coordinates.
//!
//! A [`WeightedDickeState`] is a normalized superposition of Dicke states
//! `|D_k^(n)>` over a small support of Hamming weights. For any split of the
//! qubits into blocks of sizes `λ`, each block stays inside its own symmetric
//! subspace, so the state is fully described by a [`BlockTensor`] indexed by
//! the local excitation numbers `(j₁, …, j_m)`.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{binomial_f64, PartitionShape};
use crate::error::{domain, Error, Result};
use crate::tensor::{DenseTensor, MultiIndex};

/// Largest register for which [`WeightedDickeState::to_statevector`] will allocate.
pub const MAX_STATEVECTOR_QUBITS: usize = 15;

const NORM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StateFile", into = "StateFile")]
pub struct WeightedDickeState {
    n: usize,
    support: Vec<usize>,
    amplitudes: Vec<Complex64>,
}

/// On-disk form: `{"n": 4, "support": [0, 4], "amplitudes": [[re, im], ...]}`.
#[derive(Serialize, Deserialize)]
struct StateFile {
    n: usize,
    support: Vec<usize>,
    amplitudes: Vec<[f64; 2]>,
}

impl TryFrom<StateFile> for WeightedDickeState {
    type Error = Error;

    fn try_from(f: StateFile) -> Result<Self> {
        let amps = f.amplitudes.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
        Self::weighted(f.n, f.support, amps)
    }
}

impl From<WeightedDickeState> for StateFile {
    fn from(s: WeightedDickeState) -> Self {
        StateFile {
            n: s.n,
            support: s.support,
            amplitudes: s.amplitudes.iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl WeightedDickeState {
    /// The Dicke state `|D_k^(n)>`.
    pub fn dicke(n: usize, k: usize) -> Result<Self> {
        if k > n {
            return domain(format!("Dicke weight {k} exceeds n={n}"));
        }
        Ok(Self { n, support: vec![k], amplitudes: vec![Complex64::new(1.0, 0.0)] })
    }

    /// Comb state: uniform superposition of weights `c + ℓ·step` for
    /// `ℓ = -L..=L`, centred at `c = ⌊n/2⌋`.
    pub fn comb(n: usize, step: usize) -> Result<Self> {
        if step == 0 {
            return domain("comb step must be at least 1");
        }
        let center = n / 2;
        // center <= n - center, so the lower edge is the binding one.
        let reach = center / step;
        let support: Vec<usize> =
            (0..=2 * reach).map(|i| center + i * step - reach * step).collect();
        let a = Complex64::new(1.0 / (support.len() as f64).sqrt(), 0.0);
        let amplitudes = vec![a; support.len()];
        Ok(Self { n, support, amplitudes })
    }

    /// Normalized weighted superposition. Support order is arbitrary; entries
    /// are sorted together with their amplitudes.
    pub fn weighted(n: usize, support: Vec<usize>, amplitudes: Vec<Complex64>) -> Result<Self> {
        if support.is_empty() {
            return domain("support must contain at least one weight");
        }
        if support.len() != amplitudes.len() {
            return domain(format!(
                "{} support weights but {} amplitudes",
                support.len(),
                amplitudes.len()
            ));
        }
        if let Some(&k) = support.iter().find(|&&k| k > n) {
            return domain(format!("weight {k} exceeds n={n}"));
        }
        let mut pairs: Vec<(usize, Complex64)> = support.into_iter().zip(amplitudes).collect();
        pairs.sort_by_key(|p| p.0);
        if pairs.windows(2).any(|w| w[0].0 == w[1].0) {
            return domain("support weights must be distinct");
        }
        if pairs.iter().any(|(_, a)| !a.re.is_finite() || !a.im.is_finite()) {
            return domain("amplitudes must be finite");
        }
        let (support, mut amplitudes): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return domain("amplitude vector is zero");
        }
        if (norm - 1.0).abs() > NORM_TOL {
            amplitudes.iter_mut().for_each(|a| *a /= norm);
        }
        canonicalize_phase(&mut amplitudes);
        Ok(Self { n, support, amplitudes })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// The state with every weight `k` replaced by `n - k` (global bit flip).
    pub fn reflected(&self) -> Self {
        let support = self.support.iter().map(|&k| self.n - k).collect();
        Self::weighted(self.n, support, self.amplitudes.clone())
            .expect("reflection of a valid state is valid")
    }

    /// Full `2^n` amplitude vector with big-endian qubit order.
    pub fn to_statevector(&self) -> Result<Vec<Complex64>> {
        if self.n > MAX_STATEVECTOR_QUBITS {
            return Err(Error::Resource(format!(
                "statevector of {} qubits exceeds the {MAX_STATEVECTOR_QUBITS}-qubit limit",
                self.n
            )));
        }
        let mut per_weight = vec![Complex64::new(0.0, 0.0); self.n + 1];
        for (&k, &a) in self.support.iter().zip(&self.amplitudes) {
            per_weight[k] = a / binomial_f64(self.n, k).sqrt();
        }
        Ok((0..1usize << self.n).map(|x| per_weight[x.count_ones() as usize]).collect())
    }

    /// Coefficients in the product of block-local Dicke bases for a split of
    /// the qubits into blocks of sizes `shape`.
    pub fn block_tensor(&self, shape: &PartitionShape) -> Result<BlockTensor> {
        if shape.n() != self.n {
            return domain(format!("partition {shape} does not split {} qubits", self.n));
        }
        let dims: Vec<usize> = shape.blocks().iter().map(|b| b + 1).collect();
        let mut tensor = DenseTensor::zeros(dims.clone());
        for index in MultiIndex::new(&dims) {
            let weight: usize = index.iter().sum();
            let Ok(pos) = self.support.binary_search(&weight) else { continue };
            let local: f64 = shape
                .blocks()
                .iter()
                .zip(&index)
                .map(|(&b, &j)| binomial_f64(b, j))
                .product();
            let coeff = (local / binomial_f64(self.n, weight)).sqrt();
            *tensor.get_mut(&index) = self.amplitudes[pos] * coeff;
        }
        Ok(BlockTensor { shape: shape.clone(), tensor })
    }
}

impl fmt::Display for WeightedDickeState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={} weights={:?} amplitudes=[", self.n, self.support)?;
        for (i, a) in self.amplitudes.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{:.4}{:+.4}i", a.re, a.im)?;
        }
        write!(f, "]")
    }
}

/// Rotates the global phase so the first nonzero amplitude is real and positive.
pub(crate) fn canonicalize_phase(amplitudes: &mut [Complex64]) {
    if let Some(first) = amplitudes.iter().find(|a| a.norm() > 0.0).copied() {
        if first.im == 0.0 && first.re > 0.0 {
            return;
        }
        let phase = first.conj() / first.norm();
        amplitudes.iter_mut().for_each(|a| *a *= phase);
        if let Some(a) = amplitudes.iter_mut().find(|a| a.norm() > 0.0) {
            *a = Complex64::new(first.norm(), 0.0);
        }
    }
}

/// A state's coefficients over `⊗ Sym^{λᵢ}(C²)`, shape `(λ₁+1, …, λ_m+1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockTensor {
    shape: PartitionShape,
    tensor: DenseTensor,
}

impl BlockTensor {
    pub fn partition(&self) -> &PartitionShape {
        &self.shape
    }

    pub fn tensor(&self) -> &DenseTensor {
        &self.tensor
    }

    pub fn get(&self, local_weights: &[usize]) -> Complex64 {
        self.tensor.get(local_weights)
    }

    pub fn into_tensor(self) -> DenseTensor {
        self.tensor
    }
}

//! Dense complex tensors with row-major layout.

use num_complex::Complex64;

use crate::error::{domain, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct DenseTensor {
    shape: Vec<usize>,
    data: Vec<Complex64>,
}

impl DenseTensor {
    pub fn zeros(shape: Vec<usize>) -> Self {
        let len = shape.iter().product();
        Self { shape, data: vec![Complex64::new(0.0, 0.0); len] }
    }

    pub fn from_data(shape: Vec<usize>, data: Vec<Complex64>) -> Result<Self> {
        if shape.iter().product::<usize>() != data.len() {
            return domain(format!("shape {shape:?} does not hold {} entries", data.len()));
        }
        Ok(Self { shape, data })
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn rank(&self) -> usize {
        self.shape.len()
    }

    pub fn get(&self, index: &[usize]) -> Complex64 {
        self.data[self.offset(index)]
    }

    pub fn get_mut(&mut self, index: &[usize]) -> &mut Complex64 {
        let o = self.offset(index);
        &mut self.data[o]
    }

    fn offset(&self, index: &[usize]) -> usize {
        debug_assert_eq!(index.len(), self.shape.len());
        index.iter().zip(&self.shape).fold(0, |acc, (&i, &d)| {
            debug_assert!(i < d);
            acc * d + i
        })
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Iterates `(multi-index, value)` over all entries in row-major order.
    pub fn indexed(&self) -> impl Iterator<Item = (Vec<usize>, Complex64)> + '_ {
        MultiIndex::new(&self.shape).zip(self.data.iter().copied())
    }

    /// The entries with modulus above `tol`, as `(multi-index, value)` pairs.
    pub fn nonzeros(&self, tol: f64) -> Vec<(Vec<usize>, Complex64)> {
        self.indexed().filter(|(_, v)| v.norm() > tol).collect()
    }

    /// Regroups an `n`-qubit statevector (big-endian qubit order) so that axis
    /// `b` enumerates the qubits of `blocks[b]`, in the order listed.
    pub fn from_statevector(amps: &[Complex64], n: usize, blocks: &[Vec<usize>]) -> Result<Self> {
        if amps.len() != 1usize << n {
            return domain(format!("statevector of length {} is not {n} qubits", amps.len()));
        }
        let mut seen = vec![false; n];
        for &q in blocks.iter().flatten() {
            if q >= n || seen[q] {
                return domain(format!("blocks {blocks:?} are not a partition of {n} qubits"));
            }
            seen[q] = true;
        }
        if seen.iter().any(|s| !s) {
            return domain(format!("blocks {blocks:?} do not cover {n} qubits"));
        }
        let shape: Vec<usize> = blocks.iter().map(|b| 1usize << b.len()).collect();
        let mut out = Self::zeros(shape);
        for (x, &a) in amps.iter().enumerate() {
            let index: Vec<usize> = blocks
                .iter()
                .map(|block| {
                    block.iter().fold(0, |acc, &q| (acc << 1) | ((x >> (n - 1 - q)) & 1))
                })
                .collect();
            *out.get_mut(&index) = a;
        }
        Ok(out)
    }
}

/// Row-major enumeration of all multi-indices of a shape.
pub struct MultiIndex {
    shape: Vec<usize>,
    next: Option<Vec<usize>>,
}

impl MultiIndex {
    pub fn new(shape: &[usize]) -> Self {
        let next = if shape.contains(&0) { None } else { Some(vec![0; shape.len()]) };
        Self { shape: shape.to_vec(), next }
    }
}

impl Iterator for MultiIndex {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let mut axis = self.shape.len();
        loop {
            if axis == 0 {
                break;
            }
            axis -= 1;
            succ[axis] += 1;
            if succ[axis] < self.shape[axis] {
                self.next = Some(succ);
                break;
            }
            succ[axis] = 0;
        }
        Some(current)
    }
}

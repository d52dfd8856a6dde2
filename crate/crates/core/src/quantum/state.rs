//! Pure and mixed quantum states over qubit registers.
//!
//! Qubit 0 is the most significant bit of a basis index.

use serde::{Deserialize, Serialize};

use super::matrix::{ensure_hermitian, vec_inner, vec_norm, ComplexMatrix, C64, ONE, ZERO};
use super::{MAX_OPERATOR_DIM, MAX_STATE_DIM, NORMALIZATION_TOL};
use crate::error::{Error, Result};

pub type Gate = [[C64; 2]; 2];

pub(crate) fn qubit_count(dim: usize) -> Result<usize> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(Error::InvalidState(format!("dimension {dim} is not a power of two")));
    }
    Ok(dim.trailing_zeros() as usize)
}

#[inline]
pub(crate) fn stride(num_qubits: usize, qubit: usize) -> usize {
    1usize << (num_qubits - 1 - qubit)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PureState {
    amplitudes: Vec<C64>,
}

impl PureState {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        qubit_count(amplitudes.len())?;
        if amplitudes.len() > MAX_STATE_DIM {
            return Err(Error::DimensionOverflow { dim: amplitudes.len(), cap: MAX_STATE_DIM });
        }
        let norm = vec_norm(&amplitudes);
        if (norm - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidState(format!("norm {norm} is not 1")));
        }
        Ok(Self { amplitudes })
    }

    pub fn normalized(mut amplitudes: Vec<C64>) -> Result<Self> {
        let norm = vec_norm(&amplitudes);
        if norm < 1e-300 {
            return Err(Error::InvalidState("zero vector".into()));
        }
        amplitudes.iter_mut().for_each(|a| *a /= norm);
        Self::new(amplitudes)
    }

    pub(crate) fn from_amplitudes_unchecked(amplitudes: Vec<C64>) -> Self {
        Self { amplitudes }
    }

    pub fn basis(num_qubits: usize, index: usize) -> Self {
        let mut amplitudes = vec![ZERO; 1 << num_qubits];
        amplitudes[index] = ONE;
        Self { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn num_qubits(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        vec_norm(&self.amplitudes)
    }

    pub fn inner(&self, other: &PureState) -> C64 {
        vec_inner(&self.amplitudes, &other.amplitudes)
    }

    pub fn tensor(&self, other: &PureState) -> Result<PureState> {
        let dim = self.dim() * other.dim();
        if dim > MAX_STATE_DIM {
            return Err(Error::DimensionOverflow { dim, cap: MAX_STATE_DIM });
        }
        let mut out = Vec::with_capacity(dim);
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                out.push(a * b);
            }
        }
        Ok(Self { amplitudes: out })
    }

    pub fn density(&self) -> Result<DensityOperator> {
        if self.dim() > MAX_OPERATOR_DIM {
            return Err(Error::DimensionOverflow { dim: self.dim(), cap: MAX_OPERATOR_DIM });
        }
        Ok(DensityOperator { matrix: ComplexMatrix::projector(&self.amplitudes) })
    }

    pub fn apply_gate(&mut self, qubit: usize, gate: &Gate) {
        let n = self.num_qubits();
        apply_gate_vec(&mut self.amplitudes, n, qubit, gate);
    }

    /// Reduced density operator on `keep` (ascending qubit order).
    pub fn reduced(&self, keep: &[usize]) -> Result<DensityOperator> {
        let n = self.num_qubits();
        let (keep_offsets, trace_offsets) = split_offsets(n, keep)?;
        let dk = keep_offsets.len();
        if dk > MAX_OPERATOR_DIM {
            return Err(Error::DimensionOverflow { dim: dk, cap: MAX_OPERATOR_DIM });
        }
        let mut m = ComplexMatrix::zeros(dk, dk);
        for &t in &trace_offsets {
            let col: Vec<C64> = keep_offsets.iter().map(|&k| self.amplitudes[k | t]).collect();
            for i in 0..dk {
                if col[i] == ZERO {
                    continue;
                }
                for j in 0..dk {
                    m.add_at(i, j, col[i] * col[j].conj());
                }
            }
        }
        Ok(DensityOperator { matrix: m })
    }
}

pub(crate) fn apply_gate_vec(v: &mut [C64], num_qubits: usize, qubit: usize, g: &Gate) {
    let st = stride(num_qubits, qubit);
    for base in 0..v.len() {
        if base & st != 0 {
            continue;
        }
        let a = v[base];
        let b = v[base | st];
        v[base] = g[0][0] * a + g[0][1] * b;
        v[base | st] = g[1][0] * a + g[1][1] * b;
    }
}

/// `G M G^dagger` for a local gate on `qubit`.
pub(crate) fn conjugate_local(m: &mut ComplexMatrix, num_qubits: usize, qubit: usize, g: &Gate) {
    let d = m.rows();
    let st = stride(num_qubits, qubit);
    let raw = m.inner().clone();
    let mut left = raw;
    for col in 0..d {
        for base in 0..d {
            if base & st != 0 {
                continue;
            }
            let a = left[(base, col)];
            let b = left[(base | st, col)];
            left[(base, col)] = g[0][0] * a + g[0][1] * b;
            left[(base | st, col)] = g[1][0] * a + g[1][1] * b;
        }
    }
    for row in 0..d {
        for base in 0..d {
            if base & st != 0 {
                continue;
            }
            let a = left[(row, base)];
            let b = left[(row, base | st)];
            left[(row, base)] = a * g[0][0].conj() + b * g[0][1].conj();
            left[(row, base | st)] = a * g[1][0].conj() + b * g[1][1].conj();
        }
    }
    *m = ComplexMatrix::from_dmatrix(left);
}

/// Global-index offsets for the kept qubits and for the traced-out qubits.
pub(crate) fn split_offsets(num_qubits: usize, keep: &[usize]) -> Result<(Vec<usize>, Vec<usize>)> {
    let mut keep_sorted = keep.to_vec();
    keep_sorted.sort_unstable();
    keep_sorted.dedup();
    if keep_sorted.len() != keep.len() || keep_sorted.iter().any(|&q| q >= num_qubits) {
        return Err(Error::InvalidRegister(format!("bad qubit selection {keep:?}")));
    }
    let traced: Vec<usize> = (0..num_qubits).filter(|q| !keep_sorted.contains(q)).collect();
    Ok((offsets(num_qubits, &keep_sorted), offsets(num_qubits, &traced)))
}

fn offsets(num_qubits: usize, qubits: &[usize]) -> Vec<usize> {
    let k = qubits.len();
    (0..1usize << k)
        .map(|local| {
            qubits.iter().enumerate().fold(0, |acc, (pos, &q)| {
                if local >> (k - 1 - pos) & 1 == 1 {
                    acc | stride(num_qubits, q)
                } else {
                    acc
                }
            })
        })
        .collect()
}

/// Density operator; `new` enforces Hermiticity, positivity and unit trace.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityOperator {
    matrix: ComplexMatrix,
}

impl DensityOperator {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let rho = Self::subnormalized(matrix)?;
        let tr = rho.trace();
        if (tr - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidState(format!("trace {tr} is not 1")));
        }
        Ok(rho)
    }

    /// Accepts trace ≤ 1.
    pub fn subnormalized(matrix: ComplexMatrix) -> Result<Self> {
        ensure_hermitian(&matrix, NORMALIZATION_TOL)?;
        qubit_count(matrix.rows())?;
        if matrix.rows() > MAX_OPERATOR_DIM {
            return Err(Error::DimensionOverflow { dim: matrix.rows(), cap: MAX_OPERATOR_DIM });
        }
        let min = matrix.min_eigenvalue();
        if min < -NORMALIZATION_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min}")));
        }
        let tr = matrix.trace().re;
        if tr > 1.0 + NORMALIZATION_TOL {
            return Err(Error::InvalidState(format!("trace {tr} exceeds 1")));
        }
        Ok(Self { matrix })
    }

    /// Skips the eigenvalue check; for operators built from valid parts.
    pub(crate) fn from_matrix_unchecked(matrix: ComplexMatrix) -> Self {
        Self { matrix }
    }

    pub fn maximally_mixed(num_qubits: usize) -> Self {
        let d = 1usize << num_qubits;
        Self { matrix: ComplexMatrix::identity(d).scale(1.0 / d as f64) }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn num_qubits(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn tensor(&self, other: &DensityOperator) -> Result<DensityOperator> {
        Ok(Self { matrix: super::tensor(&self.matrix, &other.matrix)? })
    }

    pub fn scaled(&self, p: f64) -> DensityOperator {
        Self { matrix: self.matrix.scale(p) }
    }

    pub(crate) fn conjugate_local(&mut self, qubit: usize, gate: &Gate) {
        let n = self.num_qubits();
        conjugate_local(&mut self.matrix, n, qubit, gate);
    }
}

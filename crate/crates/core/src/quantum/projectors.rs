//! Standard gates, θ-basis states, Bell states and the pair projectors used by
//! the game analysis.
//!
//! Operators on two n-qubit registers use the A-first layout
//! `A_1..A_n B_1..B_n`; per-pair constructions are built interleaved and then
//! permuted.

use std::f64::consts::FRAC_1_SQRT_2;

use serde::{Deserialize, Serialize};

use super::matrix::{c, re, ComplexMatrix, C64, ONE, ZERO};
use super::state::{apply_gate_vec, stride, Gate, PureState};
use super::tensor;
use crate::bits::{BasisString, BitString};
use crate::error::{Error, Result};

pub const HADAMARD: Gate = [
    [C64::new(FRAC_1_SQRT_2, 0.0), C64::new(FRAC_1_SQRT_2, 0.0)],
    [C64::new(FRAC_1_SQRT_2, 0.0), C64::new(-FRAC_1_SQRT_2, 0.0)],
];

pub fn gate_matrix(g: &Gate) -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[g[0][0], g[0][1], g[1][0], g[1][1]])
}

pub fn pauli_i() -> ComplexMatrix {
    ComplexMatrix::identity(2)
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])
}

pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[ZERO, c(0.0, -1.0), c(0.0, 1.0), ZERO])
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]])
}

pub fn hadamard() -> ComplexMatrix {
    gate_matrix(&HADAMARD)
}

/// `H^θ = H^{θ_1} ⊗ … ⊗ H^{θ_n}`.
pub fn hadamard_theta(theta: &BasisString) -> Result<ComplexMatrix> {
    let mut m = ComplexMatrix::identity(1);
    for b in theta.bits() {
        m = tensor(&m, &if b { hadamard() } else { pauli_i() })?;
    }
    Ok(m)
}

/// Applies `H^θ` to the consecutive qubits starting at `first`.
pub fn apply_hadamard_theta(v: &mut [C64], num_qubits: usize, first: usize, theta: &BasisString) {
    for (i, b) in theta.bits().enumerate() {
        if b {
            apply_gate_vec(v, num_qubits, first + i, &HADAMARD);
        }
    }
}

pub fn theta_basis_state(x: &BitString, theta: &BasisString) -> Result<PureState> {
    if x.len() != theta.len() {
        return Err(Error::LengthMismatch { expected: theta.len(), got: x.len() });
    }
    let n = x.len();
    let mut v = PureState::basis(n, x.index()).into_amplitudes();
    apply_hadamard_theta(&mut v, n, 0, theta);
    Ok(PureState::from_amplitudes_unchecked(v))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BellLabel {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellLabel {
    pub const ALL: [BellLabel; 4] = [Self::PhiPlus, Self::PhiMinus, Self::PsiPlus, Self::PsiMinus];
}

pub fn bell_state(label: BellLabel) -> PureState {
    let h = FRAC_1_SQRT_2;
    let amps = match label {
        BellLabel::PhiPlus => [h, 0.0, 0.0, h],
        BellLabel::PhiMinus => [h, 0.0, 0.0, -h],
        BellLabel::PsiPlus => [0.0, h, h, 0.0],
        BellLabel::PsiMinus => [0.0, h, -h, 0.0],
    };
    PureState::from_amplitudes_unchecked(amps.iter().map(|&a| re(a)).collect())
}

/// `|φ⁺⟩^{⊗n}` in the A-first layout.
pub fn epr_pairs(n: usize) -> Result<PureState> {
    let dim = 1usize << (2 * n);
    if dim > super::MAX_STATE_DIM {
        return Err(Error::DimensionOverflow { dim, cap: super::MAX_STATE_DIM });
    }
    let amp = re((0.5f64).powf(n as f64 / 2.0));
    let mut v = vec![ZERO; dim];
    for a in 0..1usize << n {
        v[(a << n) | a] = amp;
    }
    Ok(PureState::from_amplitudes_unchecked(v))
}

/// Position `j` of the A-first layout holds interleaved qubit `perm[j]`.
pub fn interleaved_to_a_first(n: usize) -> Vec<usize> {
    (0..2 * n).map(|j| if j < n { 2 * j } else { 2 * (j - n) + 1 }).collect()
}

/// Relabels qubits: new qubit `j` is old qubit `perm[j]`.
pub fn permute_qubits_vec(v: &[C64], perm: &[usize]) -> Vec<C64> {
    let map = permutation_map(perm);
    let mut out = vec![ZERO; v.len()];
    for (old, &new) in map.iter().enumerate() {
        out[new] = v[old];
    }
    out
}

pub fn permute_qubits(m: &ComplexMatrix, perm: &[usize]) -> ComplexMatrix {
    let map = permutation_map(perm);
    let mut inv = vec![0; map.len()];
    for (old, &new) in map.iter().enumerate() {
        inv[new] = old;
    }
    let raw = m.inner();
    ComplexMatrix::from_fn(m.rows(), m.cols(), |i, j| raw[(inv[i], inv[j])])
}

/// Maps each old basis index to its index after the qubit relabelling.
fn permutation_map(perm: &[usize]) -> Vec<usize> {
    let n = perm.len();
    (0..1usize << n)
        .map(|old| {
            (0..n).fold(0, |acc, j| {
                if old & stride(n, perm[j]) != 0 {
                    acc | stride(n, j)
                } else {
                    acc
                }
            })
        })
        .collect()
}

/// Per-pair factor `Σ_x |xx⟩⟨xx|` in basis `b` on two qubits.
fn pair_agreement(hadamard_basis: bool) -> ComplexMatrix {
    if hadamard_basis {
        let plus = [re(0.5), re(0.5), re(0.5), re(0.5)];
        let minus = [re(0.5), re(-0.5), re(-0.5), re(0.5)];
        &ComplexMatrix::projector(&plus) + &ComplexMatrix::projector(&minus)
    } else {
        ComplexMatrix::diagonal(&[ONE, ZERO, ZERO, ONE])
    }
}

/// `P_θ = Σ_x |x⟩⟨x|_θ ⊗ |x⟩⟨x|_θ` on two n-qubit registers, A-first layout.
pub fn agreement_projector(theta: &BasisString) -> Result<ComplexMatrix> {
    let n = theta.len();
    let mut m = ComplexMatrix::identity(1);
    for b in theta.bits() {
        m = tensor(&m, &pair_agreement(b))?;
    }
    Ok(permute_qubits(&m, &interleaved_to_a_first(n)))
}

/// `E_θ P_θ` over uniform θ ∈ {0,1}^n.
pub fn average_agreement_projector(n: usize) -> Result<ComplexMatrix> {
    let avg = &pair_agreement(false).scale(0.5) + &pair_agreement(true).scale(0.5);
    let mut m = ComplexMatrix::identity(1);
    for _ in 0..n {
        m = tensor(&m, &avg)?;
    }
    Ok(permute_qubits(&m, &interleaved_to_a_first(n)))
}

/// `(|φ⁺⟩⟨φ⁺| + ½|φ⁻⟩⟨φ⁻| + ½|ψ⁺⟩⟨ψ⁺|)^{⊗n}`, A-first layout.
pub fn bell_mixture_power(n: usize) -> Result<ComplexMatrix> {
    let proj = |l| ComplexMatrix::projector(bell_state(l).amplitudes());
    let factor = &(&proj(BellLabel::PhiPlus) + &proj(BellLabel::PhiMinus).scale(0.5))
        + &proj(BellLabel::PsiPlus).scale(0.5);
    let mut m = ComplexMatrix::identity(1);
    for _ in 0..n {
        m = tensor(&m, &factor)?;
    }
    Ok(permute_qubits(&m, &interleaved_to_a_first(n)))
}

/// `(M0, M1)` with `M1 = (I − |φ⁺⟩⟨φ⁺|^{⊗s})^{⊗ n/s}` and `M0 = I − M1`.
pub fn block_projectors(n: usize, s: usize) -> Result<(ComplexMatrix, ComplexMatrix)> {
    if s == 0 || !n.is_multiple_of(s) {
        return Err(Error::NotADivisor { n, block: s });
    }
    let dim = 1usize << (2 * n);
    if dim > super::MAX_OPERATOR_DIM {
        return Err(Error::DimensionOverflow { dim, cap: super::MAX_OPERATOR_DIM });
    }
    let phi = ComplexMatrix::projector(bell_state(BellLabel::PhiPlus).amplitudes());
    let mut block_phi = ComplexMatrix::identity(1);
    for _ in 0..s {
        block_phi = tensor(&block_phi, &phi)?;
    }
    let block = &ComplexMatrix::identity(block_phi.rows()) - &block_phi;
    let mut m1 = ComplexMatrix::identity(1);
    for _ in 0..n / s {
        m1 = tensor(&m1, &block)?;
    }
    let m1 = permute_qubits(&m1, &interleaved_to_a_first(n));
    let m0 = &ComplexMatrix::identity(dim) - &m1;
    Ok((m0, m1))
}

/// `M1 · v` for a vector on `2n + extra` qubits whose first `2n` are A-first
/// pair registers, without forming `M1`.
pub fn apply_m1(v: &[C64], n: usize, s: usize, extra: usize) -> Result<Vec<C64>> {
    if s == 0 || !n.is_multiple_of(s) {
        return Err(Error::NotADivisor { n, block: s });
    }
    let total = 2 * n + extra;
    let mut out = v.to_vec();
    // Each block factor is I − Φ_block; apply them one at a time.
    for blk in 0..n / s {
        let pairs: Vec<(usize, usize)> = (blk * s..(blk + 1) * s).map(|i| (i, n + i)).collect();
        let proj = project_phi_block(&out, total, &pairs);
        for (o, p) in out.iter_mut().zip(proj) {
            *o -= p;
        }
    }
    Ok(out)
}

/// Applies `⊗_{(a,b) ∈ pairs} |φ⁺⟩⟨φ⁺|_{ab}` to `v`.
fn project_phi_block(v: &[C64], total: usize, pairs: &[(usize, usize)]) -> Vec<C64> {
    let mut out = v.to_vec();
    for &(a, b) in pairs {
        let sa = stride(total, a);
        let sb = stride(total, b);
        let mut next = vec![ZERO; out.len()];
        for base in 0..out.len() {
            if base & sa != 0 || base & sb != 0 {
                continue;
            }
            let amp = (out[base] + out[base | sa | sb]) * 0.5;
            next[base] = amp;
            next[base | sa | sb] = amp;
        }
        out = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paper_example_theta_state() {
        let x = BitString::parse("01").unwrap();
        let t = BasisString::parse("10").unwrap();
        let s = theta_basis_state(&x, &t).unwrap();
        let h = FRAC_1_SQRT_2;
        let expect = [0.0, h, 0.0, h];
        for (a, e) in s.amplitudes().iter().zip(expect) {
            assert!((a - re(e)).norm() < 1e-12);
        }
    }

    #[test]
    fn epr_pairs_matches_permuted_product() {
        let phi = bell_state(BellLabel::PhiPlus);
        let prod = phi.tensor(&phi).unwrap();
        let perm = permute_qubits_vec(prod.amplitudes(), &interleaved_to_a_first(2));
        let direct = epr_pairs(2).unwrap();
        for (a, b) in perm.iter().zip(direct.amplitudes()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn apply_m1_matches_matrix() {
        let (_, m1) = block_projectors(2, 1).unwrap();
        let v: Vec<C64> = (0..16).map(|i| c(i as f64, (i * i) as f64 * 0.1)).collect();
        let direct = m1.apply(&v);
        let fast = apply_m1(&v, 2, 1, 0).unwrap();
        for (a, b) in direct.iter().zip(&fast) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn divisor_required() {
        assert!(matches!(block_projectors(3, 2), Err(Error::NotADivisor { .. })));
    }
}

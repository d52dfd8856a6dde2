//! Named qubit registers over a global state.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::matrix::ComplexMatrix;
use super::state::{split_offsets, DensityOperator};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Register {
    pub name: String,
    pub start: usize,
    pub len: usize,
}

impl Register {
    pub fn qubits(&self) -> Range<usize> {
        self.start..self.start + self.len
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegisterLayout {
    registers: Vec<Register>,
    total: usize,
}

impl RegisterLayout {
    /// Registers laid out contiguously in the given order.
    pub fn sequential(spec: &[(&str, usize)]) -> Result<Self> {
        let mut start = 0;
        let mut registers = Vec::with_capacity(spec.len());
        for &(name, len) in spec {
            registers.push(Register { name: name.to_string(), start, len });
            start += len;
        }
        Self::from_registers(start, registers)
    }

    /// Validates that the registers are disjoint and cover `0..total`.
    pub fn from_registers(total: usize, registers: Vec<Register>) -> Result<Self> {
        let mut owner = vec![None; total];
        for (idx, r) in registers.iter().enumerate() {
            if registers[..idx].iter().any(|o| o.name == r.name) {
                return Err(Error::InvalidLayout(format!("duplicate register {}", r.name)));
            }
            for q in r.qubits() {
                match owner.get_mut(q) {
                    None => {
                        return Err(Error::InvalidLayout(format!(
                            "register {} exceeds {total} qubits",
                            r.name
                        )))
                    }
                    Some(Some(_)) => {
                        return Err(Error::InvalidLayout(format!("register {} overlaps", r.name)))
                    }
                    Some(slot) => *slot = Some(idx),
                }
            }
        }
        if owner.iter().any(Option::is_none) {
            return Err(Error::InvalidLayout("registers do not cover the state".into()));
        }
        Ok(Self { registers, total })
    }

    pub fn total_qubits(&self) -> usize {
        self.total
    }

    pub fn registers(&self) -> &[Register] {
        &self.registers
    }

    pub fn register(&self, name: &str) -> Result<&Register> {
        self.registers
            .iter()
            .find(|r| r.name == name)
            .ok_or_else(|| Error::InvalidRegister(name.to_string()))
    }

    pub fn qubits_of(&self, names: &[&str]) -> Result<Vec<usize>> {
        let mut out = Vec::new();
        for name in names {
            out.extend(self.register(name)?.qubits());
        }
        out.sort_unstable();
        Ok(out)
    }
}

/// Partial trace keeping the listed qubits, in ascending order.
pub fn partial_trace_qubits(rho: &ComplexMatrix, num_qubits: usize, keep: &[usize]) -> Result<ComplexMatrix> {
    if rho.rows() != 1 << num_qubits || !rho.is_square() {
        return Err(Error::DimensionMismatch { left: rho.rows(), right: 1 << num_qubits });
    }
    let (k, t) = split_offsets(num_qubits, keep)?;
    let raw = rho.inner();
    Ok(ComplexMatrix::from_fn(k.len(), k.len(), |i, j| {
        t.iter().map(|&off| raw[(k[i] | off, k[j] | off)]).sum()
    }))
}

pub fn partial_trace(rho: &DensityOperator, layout: &RegisterLayout, keep: &[&str]) -> Result<DensityOperator> {
    if layout.total_qubits() != rho.num_qubits() {
        return Err(Error::DimensionMismatch { left: rho.dim(), right: 1 << layout.total_qubits() });
    }
    let qubits = layout.qubits_of(keep)?;
    let m = partial_trace_qubits(rho.matrix(), layout.total_qubits(), &qubits)?;
    Ok(DensityOperator::from_matrix_unchecked(m))
}

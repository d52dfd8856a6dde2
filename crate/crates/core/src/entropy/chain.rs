//! Numerical instance check of `H_min(A|BZ) ≥ H_min(A|B) − log|Z|` for
//! classical `Z`.

use serde::{Deserialize, Serialize};

use super::ensemble::CqEnsemble;
use super::sdp::{guess_weighted, EntropyBracket, SolverOptions};
use crate::error::{Error, Result};
use crate::quantum::{partial_trace_qubits, ComplexMatrix, ZERO};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChainRuleVerdict {
    Holds,
    Violated,
    /// Brackets too wide to decide.
    Undecided,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainRuleReport {
    pub with_z: EntropyBracket,
    pub without_z: EntropyBracket,
    pub log_z: f64,
    pub verdict: ChainRuleVerdict,
}

/// `ens` conditions on `B ⊗ Z`, with `Z` the trailing `z_qubits` qubits,
/// which must be classical (block diagonal).
pub fn chain_rule_check(ens: &CqEnsemble, z_qubits: usize, opts: &SolverOptions) -> Result<ChainRuleReport> {
    let total = ens.dim().trailing_zeros() as usize;
    if z_qubits > total {
        return Err(Error::InvalidRegister(format!("Z has {z_qubits} qubits, state has {total}")));
    }
    let ops = ens.weighted_operators();
    let zmask = (1usize << z_qubits) - 1;
    for (_, a) in &ops {
        for i in 0..a.rows() {
            for j in 0..a.cols() {
                if i & zmask != j & zmask && a.get(i, j).norm() > 1e-12 {
                    return Err(Error::InvalidEnsemble("Z register is not classical".into()));
                }
            }
        }
    }
    let with_z = bracket(&ops, opts)?;
    let keep: Vec<usize> = (0..total - z_qubits).collect();
    let reduced: Vec<_> = ops
        .iter()
        .map(|(l, a)| Ok((*l, partial_trace_qubits(a, total, &keep)?)))
        .collect::<Result<Vec<_>>>()?;
    let without_z = bracket(&reduced, opts)?;
    let log_z = z_qubits as f64;
    let slack = with_z.width() + without_z.width();
    let verdict = if with_z.lower + slack >= without_z.upper - log_z {
        ChainRuleVerdict::Holds
    } else if with_z.upper < without_z.lower - log_z {
        ChainRuleVerdict::Violated
    } else {
        ChainRuleVerdict::Undecided
    };
    Ok(ChainRuleReport { with_z, without_z, log_z, verdict })
}

fn bracket(ops: &[(crate::bits::BitString, ComplexMatrix)], opts: &SolverOptions) -> Result<EntropyBracket> {
    let clean: Vec<_> = ops
        .iter()
        .map(|(l, a)| {
            let mut m = a.hermitian_part();
            for i in 0..m.rows() {
                for j in 0..m.cols() {
                    if m.get(i, j).norm() <= 1e-15 {
                        m.set(i, j, ZERO);
                    }
                }
            }
            (*l, m)
        })
        .collect();
    let g = guess_weighted(&clean, opts)?;
    Ok(EntropyBracket::from_guess(g.lower, g.upper))
}

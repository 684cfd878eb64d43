use nalgebra::DVector;

use super::cnf::{count_satisfying, CnfFormula, Evaluator};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::qstate::{partial_trace, BlochVector, DensityMatrix, Unitary};
use crate::scalar::cr;

/// Largest formula whose oracle is materialized densely (`2^(n+1) ≤ 128`).
pub const MAX_ORACLE_VARS: usize = 6;

fn check_oracle_cap(f: &CnfFormula) -> Result<()> {
    if f.n_vars() > MAX_ORACLE_VARS {
        return Err(Error::TooLarge { what: "dense oracle variable count", cap: MAX_ORACLE_VARS, got: f.n_vars() });
    }
    Ok(())
}

/// `U_f = Σ_i |i⟩⟨i| ⊗ X^{f(i)}` on `n + 1` qubits, the ancilla last.
pub fn build_oracle_unitary(f: &CnfFormula) -> Result<Unitary<f64>> {
    check_oracle_cap(f)?;
    let ev = Evaluator::new(f);
    let d = 1usize << (f.n_vars() + 1);
    let mut m = CMatrix::<f64>::zeros(d, d);
    for i in 0..(1u64 << f.n_vars()) {
        let flip = usize::from(ev.eval(i));
        for b in 0..2 {
            let col = ((i as usize) << 1) | b;
            m[(col ^ flip, col)] = cr(1.0);
        }
    }
    Unitary::new(m)
}

/// How [`oracle_reduced_state`] obtains the ancilla state.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleBackend {
    /// Count solutions and write down `½(I + (1 − s/2^{n−1})σ_z)`.
    ClosedForm,
    /// Apply `U_f` to `H^{⊗n}|0…0⟩|0⟩` and trace out the index register.
    FullSim,
}

/// `1 − s/2^{n−1}`, the σ_z component after one oracle query.
pub fn gamma0(s: u64, n_vars: usize) -> f64 {
    1.0 - s as f64 / (n_vars as f64 - 1.0).exp2()
}

/// Reduced ancilla state after one oracle query on the uniform superposition.
pub fn oracle_reduced_state(f: &CnfFormula, backend: OracleBackend) -> Result<DensityMatrix<f64>> {
    match backend {
        OracleBackend::ClosedForm => {
            let s = count_satisfying(f)?;
            Ok(BlochVector::new(0.0, 0.0, gamma0(s, f.n_vars()))?.to_density())
        }
        OracleBackend::FullSim => {
            let u = build_oracle_unitary(f)?;
            let n = f.n_vars();
            let amp = cr((-(n as f64) / 2.0).exp2());
            let psi0 = DVector::from_fn(1 << (n + 1), |k, _| if k & 1 == 0 { amp } else { cr(0.0) });
            let rho = DensityMatrix::pure(&(u.matrix() * psi0))?;
            partial_trace(&rho, &[n])
        }
    }
}

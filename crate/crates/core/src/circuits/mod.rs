//! Circuits over a register split into chronology-respecting qubits and
//! closed-timelike-curve (CTC) qubits.
//!
//! The CTC qubits are always the last `n_ctc` labels. Gates are listed in
//! temporal order: the first gate acts first.

mod gates;
mod parse;

use std::fmt;
use std::str::FromStr;

pub use gates::{Gate, GateKind};
pub use parse::{parse_circuit, parse_complex, serialize_circuit};

use crate::error::{Error, Result};
use crate::linalg;
use crate::qstate::{Unitary, MAX_QUBITS};
use crate::scalar::Real;

/// `n_total` qubits, of which the last `n_ctc` traverse the CTC.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QubitRegister {
    n_total: usize,
    n_ctc: usize,
}

impl QubitRegister {
    pub fn new(n_total: usize, n_ctc: usize) -> Result<Self> {
        if n_total == 0 {
            return Err(Error::Register("register needs at least one qubit".into()));
        }
        if n_ctc > n_total {
            return Err(Error::Register(format!(
                "{n_ctc} CTC qubits requested but the register only has {n_total}"
            )));
        }
        Ok(Self { n_total, n_ctc })
    }

    pub fn n_total(&self) -> usize {
        self.n_total
    }

    pub fn n_ctc(&self) -> usize {
        self.n_ctc
    }

    /// Number of chronology-respecting qubits.
    pub fn n_cr(&self) -> usize {
        self.n_total - self.n_ctc
    }

    pub fn cr_qubits(&self) -> std::ops::Range<usize> {
        0..self.n_cr()
    }

    pub fn ctc_qubits(&self) -> std::ops::Range<usize> {
        self.n_cr()..self.n_total
    }

    pub fn is_ctc(&self, label: usize) -> bool {
        label >= self.n_cr() && label < self.n_total
    }
}

/// A register plus an ordered gate list.
#[derive(Clone, Debug, PartialEq)]
pub struct CtcCircuit<T: Real> {
    register: QubitRegister,
    gates: Vec<Gate<T>>,
}

impl<T: Real> CtcCircuit<T> {
    pub fn new(register: QubitRegister, gates: Vec<Gate<T>>) -> Result<Self> {
        let mut c = Self { register, gates: Vec::with_capacity(gates.len()) };
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn empty(register: QubitRegister) -> Self {
        Self { register, gates: Vec::new() }
    }

    /// Append a gate, checking its labels against the register.
    pub fn push(&mut self, gate: Gate<T>) -> Result<()> {
        if let Some(&bad) = gate.targets().iter().find(|&&q| q >= self.register.n_total) {
            return Err(Error::UnknownQubit { label: bad, n_qubits: self.register.n_total });
        }
        self.gates.push(gate);
        Ok(())
    }

    pub fn register(&self) -> QubitRegister {
        self.register
    }

    pub fn gates(&self) -> &[Gate<T>] {
        &self.gates
    }

    /// Dense unitary of the whole circuit (earliest gate rightmost).
    pub fn unitary(&self) -> Result<Unitary<T>> {
        circuit_unitary(self)
    }
}

/// Ordered product of the embedded gate matrices.
pub fn circuit_unitary<T: Real>(c: &CtcCircuit<T>) -> Result<Unitary<T>> {
    let n = c.register.n_total;
    if n > MAX_QUBITS {
        return Err(Error::TooLarge { what: "dense unitary register", cap: MAX_QUBITS, got: n });
    }
    let mut u = linalg::identity::<T>(1 << n);
    for g in &c.gates {
        linalg::apply_gate_left(&mut u, g.matrix().matrix(), g.targets(), n);
    }
    Ok(Unitary::from_trusted(u))
}

/// The three two-qubit circuits used as worked examples: qubit 0 is
/// chronology-respecting and qubit 1 is the CTC qubit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Builtin {
    /// Controlled-phase followed by a swap; the CTC state is unique.
    CphaseSwap,
    /// Controlled rotation `diag(1, 1, 1, i)`; the CTC state is underdetermined.
    Crot,
    /// CNOT (control 0) followed by a swap; realizes `n_z → n_z²`.
    SGate,
}

impl Builtin {
    pub const ALL: [Builtin; 3] = [Builtin::CphaseSwap, Builtin::Crot, Builtin::SGate];

    pub fn name(self) -> &'static str {
        match self {
            Builtin::CphaseSwap => "CPHASE_SWAP",
            Builtin::Crot => "CROT",
            Builtin::SGate => "S_GATE",
        }
    }

    pub fn circuit<T: Real>(self) -> CtcCircuit<T> {
        example_circuit(self)
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Builtin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().replace('-', "_").as_str() {
            "CPHASE_SWAP" => Ok(Builtin::CphaseSwap),
            "CROT" => Ok(Builtin::Crot),
            "S_GATE" | "S" => Ok(Builtin::SGate),
            _ => Err(Error::InvalidArgument(format!("unknown example circuit '{s}'"))),
        }
    }
}

pub fn example_circuit<T: Real>(which: Builtin) -> CtcCircuit<T> {
    let reg = QubitRegister::new(2, 1).expect("2 qubits, 1 CTC");
    let gate = |k: GateKind<T>, t: &[usize]| Gate::new(k, t.to_vec()).expect("builtin gate");
    let gates = match which {
        Builtin::CphaseSwap => vec![gate(GateKind::Cphase, &[0, 1]), gate(GateKind::Swap, &[0, 1])],
        Builtin::Crot => vec![gate(GateKind::Crot, &[0, 1])],
        Builtin::SGate => vec![gate(GateKind::Cnot, &[0, 1]), gate(GateKind::Swap, &[0, 1])],
    };
    CtcCircuit::new(reg, gates).expect("builtin circuit")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::CMatrix;
    use crate::scalar::{c, cr};

    fn ket_bra(rows: &[(usize, usize, f64, f64)]) -> CMatrix<f64> {
        let mut m = CMatrix::zeros(4, 4);
        for &(r, col, re, im) in rows {
            m[(r, col)] = c(re, im);
        }
        m
    }

    fn close(a: &CMatrix<f64>, b: &CMatrix<f64>, tol: f64) -> bool {
        linalg::max_abs_diff(a, b) <= tol
    }

    #[test]
    fn register_invariants() {
        assert!(QubitRegister::new(0, 0).is_err());
        assert!(QubitRegister::new(1, 2).is_err());
        let r = QubitRegister::new(3, 1).unwrap();
        assert_eq!(r.cr_qubits(), 0..2);
        assert_eq!(r.ctc_qubits(), 2..3);
        assert!(r.is_ctc(2) && !r.is_ctc(1));
    }

    #[test]
    fn empty_circuit_is_identity() {
        let c = CtcCircuit::<f64>::empty(QubitRegister::new(3, 1).unwrap());
        assert_eq!(c.unitary().unwrap(), Unitary::identity(3).unwrap());
    }

    #[test]
    fn cphase_swap_matrix() {
        // |00><00| + |01><10| + |10><01| - |11><11|
        let want = ket_bra(&[(0, 0, 1.0, 0.0), (1, 2, 1.0, 0.0), (2, 1, 1.0, 0.0), (3, 3, -1.0, 0.0)]);
        let u = example_circuit::<f64>(Builtin::CphaseSwap).unitary().unwrap();
        assert!(close(u.matrix(), &want, 0.0));
    }

    #[test]
    fn s_gate_matrix() {
        // |00><00| + |10><01| + |11><10| + |01><11|
        let want = ket_bra(&[(0, 0, 1.0, 0.0), (2, 1, 1.0, 0.0), (3, 2, 1.0, 0.0), (1, 3, 1.0, 0.0)]);
        let u = example_circuit::<f64>(Builtin::SGate).unitary().unwrap();
        assert!(close(u.matrix(), &want, 0.0));
    }

    #[test]
    fn s_gate_two_ways() {
        let alt = CtcCircuit::new(
            QubitRegister::new(2, 1).unwrap(),
            vec![
                Gate::<f64>::new(GateKind::Cnot, vec![1, 0]).unwrap(),
                Gate::new(GateKind::Cnot, vec![0, 1]).unwrap(),
            ],
        )
        .unwrap();
        let a = alt.unitary().unwrap();
        let b = example_circuit::<f64>(Builtin::SGate).unitary().unwrap();
        assert!(close(a.matrix(), b.matrix(), 1e-14));
    }

    #[test]
    fn crot_matrix() {
        let want = ket_bra(&[(0, 0, 1.0, 0.0), (1, 1, 1.0, 0.0), (2, 2, 1.0, 0.0), (3, 3, 0.0, 1.0)]);
        let u = example_circuit::<f64>(Builtin::Crot).unitary().unwrap();
        assert!(close(u.matrix(), &want, 0.0));
    }

    #[test]
    fn gate_on_non_adjacent_qubits() {
        // CNOT from qubit 2 to qubit 0 on |001> gives |101>
        let mut c = CtcCircuit::<f64>::empty(QubitRegister::new(3, 0).unwrap());
        c.push(Gate::new(GateKind::Cnot, vec![2, 0]).unwrap()).unwrap();
        let u = c.unitary().unwrap();
        assert_eq!(u.matrix()[(0b101, 0b001)], cr(1.0));
        assert_eq!(u.matrix()[(0b001, 0b001)], cr(0.0));
        assert!(c.push(Gate::new(GateKind::X, vec![3]).unwrap()).is_err());
    }

    #[test]
    fn oversized_register_rejected() {
        let c = CtcCircuit::<f64>::empty(QubitRegister::new(13, 1).unwrap());
        assert!(matches!(c.unitary(), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn builtin_names() {
        for b in Builtin::ALL {
            assert_eq!(b.name().parse::<Builtin>().unwrap(), b);
        }
        assert!("nope".parse::<Builtin>().is_err());
    }
}

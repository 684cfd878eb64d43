use std::fmt;

use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::qstate::Unitary;
use crate::scalar::{c, cr, Real};

/// Gate library. Two-qubit gates take their labels in `[control, target]`
/// order where that distinction exists.
#[derive(Clone, Debug, PartialEq)]
pub enum GateKind<T: Real> {
    I,
    X,
    Y,
    Z,
    H,
    S,
    T,
    /// `diag(1, e^{iθ})`, θ in radians.
    Phase(T),
    Cnot,
    /// `diag(1, 1, 1, −1)`
    Cphase,
    Swap,
    /// `diag(1, 1, 1, i)`
    Crot,
    /// Arbitrary unitary supplied inline.
    Raw,
}

impl<T: Real> GateKind<T> {
    /// Number of qubits the gate acts on; `None` for [`GateKind::Raw`].
    pub fn arity(&self) -> Option<usize> {
        match self {
            GateKind::I
            | GateKind::X
            | GateKind::Y
            | GateKind::Z
            | GateKind::H
            | GateKind::S
            | GateKind::T
            | GateKind::Phase(_) => Some(1),
            GateKind::Cnot | GateKind::Cphase | GateKind::Swap | GateKind::Crot => Some(2),
            GateKind::Raw => None,
        }
    }

    /// Look up a named gate (everything except `PHASE(θ)` and raw gates).
    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "I" => GateKind::I,
            "X" => GateKind::X,
            "Y" => GateKind::Y,
            "Z" => GateKind::Z,
            "H" => GateKind::H,
            "S" => GateKind::S,
            "T" => GateKind::T,
            "CNOT" | "CX" => GateKind::Cnot,
            "CPHASE" | "CZ" => GateKind::Cphase,
            "SWAP" => GateKind::Swap,
            "CROT" => GateKind::Crot,
            _ => return None,
        })
    }

    fn matrix(&self) -> Option<CMatrix<T>> {
        let o = cr(T::zero());
        let l = cr(T::one());
        let i = c(T::zero(), T::one());
        let m = |d: usize, v: &[Complex<T>]| DMatrix::from_row_slice(d, d, v);
        let diag4 = |last: Complex<T>| CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![l, l, l, last]));
        Some(match self {
            GateKind::I => CMatrix::identity(2, 2),
            GateKind::X => m(2, &[o, l, l, o]),
            GateKind::Y => m(2, &[o, -i, i, o]),
            GateKind::Z => m(2, &[l, o, o, -l]),
            GateKind::H => {
                let h = cr(T::lit(0.5).sqrt());
                m(2, &[h, h, h, -h])
            }
            GateKind::S => m(2, &[l, o, o, i]),
            GateKind::T => {
                let h = T::lit(0.5).sqrt();
                m(2, &[l, o, o, c(h, h)])
            }
            GateKind::Phase(theta) => m(2, &[l, o, o, c(theta.cos(), theta.sin())]),
            GateKind::Cnot => m(4, &[l, o, o, o, o, l, o, o, o, o, o, l, o, o, l, o]),
            GateKind::Cphase => diag4(-l),
            GateKind::Swap => m(4, &[l, o, o, o, o, o, l, o, o, l, o, o, o, o, o, l]),
            GateKind::Crot => diag4(i),
            GateKind::Raw => return None,
        })
    }
}

impl<T: Real> fmt::Display for GateKind<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GateKind::I => f.write_str("I"),
            GateKind::X => f.write_str("X"),
            GateKind::Y => f.write_str("Y"),
            GateKind::Z => f.write_str("Z"),
            GateKind::H => f.write_str("H"),
            GateKind::S => f.write_str("S"),
            GateKind::T => f.write_str("T"),
            GateKind::Phase(theta) => write!(f, "PHASE({theta})"),
            GateKind::Cnot => f.write_str("CNOT"),
            GateKind::Cphase => f.write_str("CPHASE"),
            GateKind::Swap => f.write_str("SWAP"),
            GateKind::Crot => f.write_str("CROT"),
            GateKind::Raw => f.write_str("RAW"),
        }
    }
}

/// A gate bound to specific qubit labels.
#[derive(Clone, Debug, PartialEq)]
pub struct Gate<T: Real> {
    kind: GateKind<T>,
    targets: Vec<usize>,
    matrix: Unitary<T>,
}

fn check_targets(targets: &[usize]) -> Result<()> {
    if targets.is_empty() || targets.len() > 3 {
        return Err(Error::InvalidArgument(format!(
            "gates act on 1 to 3 qubits, got {}",
            targets.len()
        )));
    }
    for (k, t) in targets.iter().enumerate() {
        if targets[..k].contains(t) {
            return Err(Error::InvalidArgument(format!("qubit {t} listed twice")));
        }
    }
    Ok(())
}

impl<T: Real> Gate<T> {
    /// A library gate. Use [`Gate::raw`] for inline matrices.
    pub fn new(kind: GateKind<T>, targets: Vec<usize>) -> Result<Self> {
        check_targets(&targets)?;
        let arity = kind
            .arity()
            .ok_or_else(|| Error::InvalidArgument("raw gates need an explicit matrix".into()))?;
        if targets.len() != arity {
            return Err(Error::InvalidArgument(format!(
                "{kind} acts on {arity} qubit(s), got {}",
                targets.len()
            )));
        }
        let matrix = Unitary::from_trusted(kind.matrix().expect("library gate"));
        Ok(Self { kind, targets, matrix })
    }

    /// A gate with an explicit `2^k × 2^k` unitary on `k = targets.len()` qubits.
    pub fn raw(matrix: CMatrix<T>, targets: Vec<usize>) -> Result<Self> {
        check_targets(&targets)?;
        let d = 1usize << targets.len();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::Dimension(format!(
                "raw gate on {} qubit(s) needs a {d}x{d} matrix, got {}x{}",
                targets.len(),
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let matrix = Unitary::new(matrix)?;
        Ok(Self { kind: GateKind::Raw, targets, matrix })
    }

    pub fn kind(&self) -> &GateKind<T> {
        &self.kind
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn matrix(&self) -> &Unitary<T> {
        &self.matrix
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn library_gates_are_unitary() {
        let kinds: Vec<GateKind<f64>> = vec![
            GateKind::I,
            GateKind::X,
            GateKind::Y,
            GateKind::Z,
            GateKind::H,
            GateKind::S,
            GateKind::T,
            GateKind::Phase(0.3),
            GateKind::Cnot,
            GateKind::Cphase,
            GateKind::Swap,
            GateKind::Crot,
        ];
        for k in kinds {
            let targets: Vec<usize> = (0..k.arity().unwrap()).collect();
            let g = Gate::new(k, targets).unwrap();
            assert!(g.matrix().unitarity_defect() < 1e-15);
        }
    }

    #[test]
    fn arity_and_label_checks() {
        assert!(Gate::<f64>::new(GateKind::Cnot, vec![0]).is_err());
        assert!(Gate::<f64>::new(GateKind::X, vec![0, 1]).is_err());
        assert!(Gate::<f64>::new(GateKind::Swap, vec![1, 1]).is_err());
        assert!(Gate::<f64>::new(GateKind::Raw, vec![0]).is_err());
        assert!(Gate::<f64>::raw(CMatrix::identity(2, 2), vec![0, 1]).is_err());
        assert!(Gate::<f64>::raw(CMatrix::identity(16, 16), vec![0, 1, 2, 3]).is_err());
        let not_unitary = CMatrix::from_element(2, 2, cr(1.0));
        assert!(Gate::<f64>::raw(not_unitary, vec![0]).is_err());
    }
}

use nalgebra::{Complex, ComplexField, DMatrix};

use crate::circuits::QubitRegister;
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::qstate::{paulis, DensityMatrix, Unitary};
use crate::scalar::{cr, Real};

/// Largest CTC subsystem the engine will solve (Liouville matrix 64×64).
pub const MAX_CTC_QUBITS: usize = 3;

/// Linear map on `dim_b × dim_b` matrices in Liouville form.
///
/// Vectorization is row-major: `vec(X)[i·d + j] = X[i, j]`, so
/// `vec(A X B) = (A ⊗ Bᵀ) vec(X)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Superoperator<T: Real> {
    dim_b: usize,
    matrix: CMatrix<T>,
}

impl<T: Real> Superoperator<T> {
    /// Wrap a Liouville matrix, checking trace preservation (within
    /// `exact_tol` scaled to `1e-10` for `f64`) and complete positivity
    /// (Choi eigenvalues ≥ `-psd_tol`).
    pub fn from_liouville(matrix: CMatrix<T>, psd_tol: T) -> Result<Self> {
        let d2 = matrix.nrows();
        let d = (d2 as f64).sqrt().round() as usize;
        if matrix.ncols() != d2 || d * d != d2 || !d.is_power_of_two() {
            return Err(Error::Dimension(format!(
                "Liouville matrix must be d²×d² for a power-of-two d, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let s = Self { dim_b: d, matrix };
        let tp = s.trace_preservation_defect();
        if tp > T::exact_tol() * T::lit(100.0) {
            return Err(Error::InvalidMap(format!("not trace preserving (defect {tp:e})")));
        }
        let cp = s.choi_min_eigenvalue();
        if cp < -psd_tol {
            return Err(Error::InvalidMap(format!("not completely positive (Choi eigenvalue {cp:e})")));
        }
        Ok(s)
    }

    pub fn identity(n_qubits: usize) -> Self {
        let d = 1usize << n_qubits;
        Self { dim_b: d, matrix: linalg::identity(d * d) }
    }

    /// `X ↦ V X V^†`.
    pub fn conjugation(v: &Unitary<T>) -> Self {
        let m = v.matrix();
        Self { dim_b: m.nrows(), matrix: linalg::kron(m, &m.map(|z| z.conj())) }
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn n_qubits(&self) -> usize {
        self.dim_b.trailing_zeros() as usize
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    /// Apply the map to an arbitrary `dim_b × dim_b` matrix.
    pub fn apply(&self, x: &CMatrix<T>) -> CMatrix<T> {
        let d = self.dim_b;
        assert_eq!(x.shape(), (d, d), "operand dimension");
        let v = CMatrix::from_fn(d * d, 1, |k, _| x[(k / d, k % d)]);
        let out = &self.matrix * v;
        CMatrix::from_fn(d, d, |i, j| out[(i * d + j, 0)])
    }

    /// Apply the map to a state, repairing round-off asymmetry.
    pub fn apply_state(&self, rho: &DensityMatrix<T>) -> Result<DensityMatrix<T>> {
        if rho.dim() != self.dim_b {
            return Err(Error::Dimension(format!(
                "map acts on dimension {} but state has dimension {}",
                self.dim_b,
                rho.dim()
            )));
        }
        DensityMatrix::new(self.apply(rho.matrix()))
    }

    /// Choi matrix `Σ_ij |i⟩⟨j| ⊗ F(|i⟩⟨j|)`.
    pub fn choi(&self) -> CMatrix<T> {
        let d = self.dim_b;
        // F(E_ij)[p, q] is column (i·d + j), row (p·d + q) of the Liouville matrix
        CMatrix::from_fn(d * d, d * d, |r, col| {
            let (i, p) = (r / d, r % d);
            let (j, q) = (col / d, col % d);
            self.matrix[(p * d + q, i * d + j)]
        })
    }

    pub fn choi_min_eigenvalue(&self) -> T {
        linalg::min_hermitian_eigenvalue(&linalg::symmetrize(&self.choi()))
    }

    /// `max_ij |Tr F(|i⟩⟨j|) − δ_ij|`.
    pub fn trace_preservation_defect(&self) -> T {
        let d = self.dim_b;
        let mut worst = T::zero();
        for i in 0..d {
            for j in 0..d {
                let tr = (0..d).fold(Complex::new(T::zero(), T::zero()), |acc, p| {
                    acc + self.matrix[(p * d + p, i * d + j)]
                });
                let want = if i == j { T::one() } else { T::zero() };
                worst = worst.max((tr - cr(want)).modulus());
            }
        }
        worst
    }

    /// Real matrix of the map in the normalized Pauli basis:
    /// `R[μ][ν] = Tr(P_μ F(P_ν)) / d`. Row and column 0 are the identity.
    pub fn pauli_transfer(&self) -> DMatrix<T> {
        let basis = pauli_basis::<T>(self.n_qubits());
        let d = T::from_usize(self.dim_b).unwrap();
        let images: Vec<CMatrix<T>> = basis.iter().map(|p| self.apply(p)).collect();
        DMatrix::from_fn(basis.len(), basis.len(), |mu, nu| {
            hs_inner(&basis[mu], &images[nu]).re / d
        })
    }

    /// `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.dim_b != other.dim_b {
            return Err(Error::Dimension("composing maps of different dimension".into()));
        }
        Ok(Self { dim_b: self.dim_b, matrix: &self.matrix * &other.matrix })
    }
}

/// `Tr(A^† B)` for Hermitian `A` reduces to `Σ conj(A_ij) B_ij`.
pub(crate) fn hs_inner<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> Complex<T> {
    a.iter()
        .zip(b.iter())
        .fold(Complex::new(T::zero(), T::zero()), |acc, (x, y)| acc + x.conj() * y)
}

/// Pauli strings on `n` qubits, index in base 4 with qubit 0 most significant
/// and digits `0=I, 1=X, 2=Y, 3=Z`.
pub fn pauli_basis<T: Real>(n: usize) -> Vec<CMatrix<T>> {
    let single = paulis::<T>();
    let mut out: Vec<CMatrix<T>> = vec![CMatrix::identity(1, 1)];
    for _ in 0..n {
        out = out
            .iter()
            .flat_map(|m| single.iter().map(move |p| linalg::kron(m, p)))
            .collect();
    }
    out
}

/// Validated pieces of a CTC problem: the joint unitary, the
/// chronology-respecting input, and the register split.
pub(crate) struct Problem<'a, T: Real> {
    pub u: &'a Unitary<T>,
    pub rho_in: &'a DensityMatrix<T>,
    pub reg: QubitRegister,
}

impl<'a, T: Real> Problem<'a, T> {
    pub fn new(u: &'a Unitary<T>, rho_in: &'a DensityMatrix<T>, reg: QubitRegister) -> Result<Self> {
        if reg.n_ctc() == 0 {
            return Err(Error::Register("the register has no CTC qubits".into()));
        }
        if reg.n_ctc() > MAX_CTC_QUBITS {
            return Err(Error::TooLarge { what: "CTC subsystem", cap: MAX_CTC_QUBITS, got: reg.n_ctc() });
        }
        if u.n_qubits() != reg.n_total() {
            return Err(Error::Dimension(format!(
                "unitary acts on {} qubits but the register has {}",
                u.n_qubits(),
                reg.n_total()
            )));
        }
        if rho_in.n_qubits() != reg.n_cr() {
            return Err(Error::Dimension(format!(
                "input state has {} qubits but the register has {} chronology-respecting qubits",
                rho_in.n_qubits(),
                reg.n_cr()
            )));
        }
        Ok(Self { u, rho_in, reg })
    }

    fn dims(&self) -> (usize, usize) {
        (1usize << self.reg.n_cr(), 1usize << self.reg.n_ctc())
    }

    /// `U (G_in ⊗ G_ctc)` where `G` are PSD factors; `None` for the CTC factor
    /// means the identity (used to build Kraus operators).
    fn propagated_factor(&self, ctc_factor: Option<&CMatrix<T>>) -> CMatrix<T> {
        let (_, db) = self.dims();
        let g_in = linalg::psd_factor(self.rho_in.matrix());
        let right = match ctc_factor {
            Some(g) => linalg::kron(&g_in, g),
            None => linalg::kron(&g_in, &linalg::identity(db)),
        };
        self.u.matrix() * right
    }

    /// `ρ ↦ Tr_A[U(ρ_in ⊗ ρ)U^†]` in Liouville form.
    pub fn induced_liouville(&self) -> CMatrix<T> {
        let (da, db) = self.dims();
        let v = self.propagated_factor(None);
        let rank = v.ncols() / db;
        // A[(b', b), c] = K_c[b', b] with c = (a', k)
        let n_kraus = da * rank;
        let a = CMatrix::from_fn(db * db, n_kraus, |row, c| {
            let (bp, b) = (row / db, row % db);
            let (ap, k) = (c / rank, c % rank);
            v[(ap * db + bp, k * db + b)]
        });
        let aa = &a * a.adjoint();
        // L[(b1', b2'), (b1, b2)] = (A A^†)[(b1', b1), (b2', b2)]
        CMatrix::from_fn(db * db, db * db, |r, col| {
            let (b1p, b2p) = (r / db, r % db);
            let (b1, b2) = (col / db, col % db);
            aa[(b1p * db + b1, b2p * db + b2)]
        })
    }

    /// Both marginals of `U(ρ_in ⊗ ρ_ctc)U^†`: `(Tr_B, Tr_A)`.
    pub fn marginals(&self, rho_ctc: &CMatrix<T>) -> (CMatrix<T>, CMatrix<T>) {
        let (da, db) = self.dims();
        let w = self.propagated_factor(Some(&linalg::psd_factor(rho_ctc)));
        let zero = Complex::new(T::zero(), T::zero());
        let mut out_a = CMatrix::from_element(da, da, zero);
        let mut out_b = CMatrix::from_element(db, db, zero);
        for a1 in 0..da {
            for b1 in 0..db {
                let r1 = w.row(a1 * db + b1);
                for a2 in 0..da {
                    let r2 = w.row(a2 * db + b1);
                    out_a[(a1, a2)] += r1.dot(&r2.map(|z| z.conj()));
                }
                for b2 in 0..db {
                    let r2 = w.row(a1 * db + b2);
                    out_b[(b1, b2)] += r1.dot(&r2.map(|z| z.conj()));
                }
            }
        }
        (out_a, out_b)
    }
}

/// The map `ρ ↦ Tr_A[U(ρ_in ⊗ ρ)U^†]` on the CTC subsystem.
pub fn induced_map<T: Real>(
    u: &Unitary<T>,
    rho_in: &DensityMatrix<T>,
    reg: QubitRegister,
) -> Result<Superoperator<T>> {
    let problem = Problem::new(u, rho_in, reg)?;
    Superoperator::from_liouville(problem.induced_liouville(), T::map_psd_tol())
}

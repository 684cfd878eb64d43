//! Density matrices, Bloch vectors and unitaries over a qubit register.
//!
//! Qubit 0 is always the most significant (leftmost) tensor factor, so the
//! basis state `|ab⟩` has index `2a + b`.

use std::fmt;

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::scalar::{c, cr, Real, C};

/// Largest register any dense state or operator may span.
pub const MAX_QUBITS: usize = 12;

fn qubits_for_dim(dim: usize) -> Result<usize> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(Error::Dimension(format!("{dim} is not a power of two")));
    }
    let n = dim.trailing_zeros() as usize;
    if n > MAX_QUBITS {
        return Err(Error::TooLarge { what: "register", cap: MAX_QUBITS, got: n });
    }
    Ok(n)
}

/// Hermitian, unit-trace, positive semidefinite matrix on `n_qubits` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix<T: Real> {
    n_qubits: usize,
    data: CMatrix<T>,
}

impl<T: Real> DensityMatrix<T> {
    /// Validate `m` as a density matrix.
    ///
    /// Asymmetry up to [`Real::symmetrize_tol`] is treated as round-off and
    /// removed; anything larger is rejected, as is a trace off by more than
    /// [`Real::exact_tol`] or an eigenvalue below `-`[`Real::state_psd_tol`].
    pub fn new(m: CMatrix<T>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::Dimension(format!(
                "density matrix must be square, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let n_qubits = qubits_for_dim(m.nrows())?;
        let asym = linalg::asymmetry(&m);
        if asym > T::symmetrize_tol() {
            return Err(Error::NonPhysical(format!("matrix is not Hermitian (asymmetry {asym:e})")));
        }
        let data = if asym > T::zero() { linalg::symmetrize(&m) } else { m };
        let tr = linalg::trace(&data).re;
        if (tr - T::one()).abs() > T::exact_tol() {
            return Err(Error::NonPhysical(format!("trace is {tr}, expected 1")));
        }
        let min = linalg::min_hermitian_eigenvalue(&data);
        if min < -T::state_psd_tol() {
            return Err(Error::NonPhysical(format!("negative eigenvalue {min:e}")));
        }
        Ok(Self { n_qubits, data })
    }

    /// `I / 2^n`.
    pub fn maximally_mixed(n_qubits: usize) -> Result<Self> {
        if n_qubits > MAX_QUBITS {
            return Err(Error::TooLarge { what: "register", cap: MAX_QUBITS, got: n_qubits });
        }
        let d = 1usize << n_qubits;
        let w = cr(T::one() / T::from_usize(d).unwrap());
        Ok(Self { n_qubits, data: CMatrix::from_diagonal_element(d, d, w) })
    }

    /// Computational basis projector `|b⟩⟨b|`, qubit 0 first.
    pub fn basis(bits: &[bool]) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::Dimension("basis state needs at least one qubit".into()));
        }
        if bits.len() > MAX_QUBITS {
            return Err(Error::TooLarge { what: "register", cap: MAX_QUBITS, got: bits.len() });
        }
        let d = 1usize << bits.len();
        let idx = bits.iter().fold(0usize, |acc, &b| (acc << 1) | usize::from(b));
        let mut data = CMatrix::zeros(d, d);
        data[(idx, idx)] = cr(T::one());
        Ok(Self { n_qubits: bits.len(), data })
    }

    /// Parse a bitstring such as `"010"` into a basis state.
    pub fn from_bitstring(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|ch| match ch {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::InvalidArgument(format!("bad bit '{other}' in \"{s}\""))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::basis(&bits)
    }

    /// `|ψ⟩⟨ψ|` for a state vector, normalized on the way in.
    pub fn pure(psi: &DVector<C<T>>) -> Result<Self> {
        let norm = psi.norm();
        if norm <= T::zero() {
            return Err(Error::NonPhysical("zero state vector".into()));
        }
        let v = psi.map(|z| z / cr(norm));
        Self::new(&v * v.adjoint())
    }

    pub(crate) fn from_trusted(data: CMatrix<T>) -> Self {
        let n_qubits = data.nrows().trailing_zeros() as usize;
        Self { n_qubits, data }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.data
    }

    pub fn into_matrix(self) -> CMatrix<T> {
        self.data
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> DVector<T> {
        linalg::hermitian_eigenvalues(&self.data)
    }

    pub fn trace(&self) -> T {
        linalg::trace(&self.data).re
    }

    /// `max |self - other|` over entries.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        linalg::max_abs_diff(&self.data, &other.data)
    }

    /// Bloch vector of a single-qubit state.
    pub fn bloch(&self) -> Result<BlochVector<T>> {
        density_to_bloch(self)
    }

    pub fn tensor(&self, other: &Self) -> Self {
        tensor(self, other)
    }

    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        partial_trace(self, keep)
    }

    pub fn entropy(&self) -> T {
        von_neumann_entropy(self)
    }
}

impl<T: Real> fmt::Display for DensityMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.data)
    }
}

/// Point in (or on) the unit ball parameterizing single-qubit states.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochVector<T: Real> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Real> BlochVector<T> {
    /// Rejects vectors longer than `1 + exact_tol`.
    pub fn new(x: T, y: T, z: T) -> Result<Self> {
        let v = Self { x, y, z };
        if !(x.is_finite() && y.is_finite() && z.is_finite()) {
            return Err(Error::NonPhysical("Bloch vector has non-finite component".into()));
        }
        if v.norm() > T::one() + T::exact_tol() {
            return Err(Error::NonPhysical(format!("Bloch vector norm {} exceeds 1", v.norm())));
        }
        Ok(v)
    }

    pub fn norm(&self) -> T {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn to_density(&self) -> DensityMatrix<T> {
        bloch_to_density(self)
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        (self.x - other.x)
            .abs()
            .max((self.y - other.y).abs())
            .max((self.z - other.z).abs())
    }
}

/// Unitary operator on `n_qubits` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct Unitary<T: Real> {
    n_qubits: usize,
    data: CMatrix<T>,
}

impl<T: Real> Unitary<T> {
    /// Rejects matrices with `max |U^†U - I| > exact_tol`.
    pub fn new(m: CMatrix<T>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::Dimension(format!(
                "unitary must be square, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let n_qubits = qubits_for_dim(m.nrows())?;
        let dev = linalg::max_abs_diff(&(m.adjoint() * &m), &linalg::identity(m.nrows()));
        if dev > T::exact_tol() {
            return Err(Error::NonPhysical(format!("matrix is not unitary (deviation {dev:e})")));
        }
        Ok(Self { n_qubits, data: m })
    }

    pub fn identity(n_qubits: usize) -> Result<Self> {
        if n_qubits > MAX_QUBITS {
            return Err(Error::TooLarge { what: "register", cap: MAX_QUBITS, got: n_qubits });
        }
        Ok(Self { n_qubits, data: linalg::identity(1 << n_qubits) })
    }

    pub(crate) fn from_trusted(data: CMatrix<T>) -> Self {
        let n_qubits = data.nrows().trailing_zeros() as usize;
        Self { n_qubits, data }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.data
    }

    pub fn dagger(&self) -> Self {
        Self { n_qubits: self.n_qubits, data: self.data.adjoint() }
    }

    /// Operator product `self · rhs` (`rhs` acts first).
    pub fn compose(&self, rhs: &Self) -> Result<Self> {
        if self.dim() != rhs.dim() {
            return Err(Error::Dimension(format!(
                "cannot compose {}-dim and {}-dim unitaries",
                self.dim(),
                rhs.dim()
            )));
        }
        Ok(Self { n_qubits: self.n_qubits, data: &self.data * &rhs.data })
    }

    /// `self ⊗ rhs`.
    pub fn kron(&self, rhs: &Self) -> Result<Self> {
        let n = self.n_qubits + rhs.n_qubits;
        if n > MAX_QUBITS {
            return Err(Error::TooLarge { what: "register", cap: MAX_QUBITS, got: n });
        }
        Ok(Self { n_qubits: n, data: linalg::kron(&self.data, &rhs.data) })
    }

    /// `U ρ U^†`.
    pub fn conjugate(&self, rho: &DensityMatrix<T>) -> Result<DensityMatrix<T>> {
        if self.dim() != rho.dim() {
            return Err(Error::Dimension(format!(
                "unitary is {}-dim but state is {}-dim",
                self.dim(),
                rho.dim()
            )));
        }
        DensityMatrix::new(&self.data * rho.matrix() * self.data.adjoint())
    }

    /// `max |U^†U - I|`.
    pub fn unitarity_defect(&self) -> T {
        linalg::max_abs_diff(&(self.data.adjoint() * &self.data), &linalg::identity(self.dim()))
    }
}

/// `½(I + n⃗·σ⃗)`.
pub fn bloch_to_density<T: Real>(n: &BlochVector<T>) -> DensityMatrix<T> {
    let h = T::lit(0.5);
    let data = DMatrix::from_row_slice(
        2,
        2,
        &[
            cr(h * (T::one() + n.z)),
            c(h * n.x, -h * n.y),
            c(h * n.x, h * n.y),
            cr(h * (T::one() - n.z)),
        ],
    );
    DensityMatrix::from_trusted(data)
}

/// `n_i = Tr(ρ σ_i)` for a single-qubit state.
pub fn density_to_bloch<T: Real>(rho: &DensityMatrix<T>) -> Result<BlochVector<T>> {
    if rho.dim() != 2 {
        return Err(Error::Dimension(format!(
            "Bloch vector needs a single-qubit state, got dimension {}",
            rho.dim()
        )));
    }
    let m = rho.matrix();
    let two = T::lit(2.0);
    Ok(BlochVector {
        x: two * m[(0, 1)].re,
        y: -two * m[(0, 1)].im,
        z: m[(0, 0)].re - m[(1, 1)].re,
    })
}

/// `a ⊗ b` with `a` as the high-order factor.
pub fn tensor<T: Real>(a: &DensityMatrix<T>, b: &DensityMatrix<T>) -> DensityMatrix<T> {
    DensityMatrix {
        n_qubits: a.n_qubits + b.n_qubits,
        data: linalg::kron(&a.data, &b.data),
    }
}

/// Reduced state on the qubits listed in `keep` (any order; reported in
/// ascending label order).
pub fn partial_trace<T: Real>(rho: &DensityMatrix<T>, keep: &[usize]) -> Result<DensityMatrix<T>> {
    let mut keep: Vec<usize> = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if let Some(&bad) = keep.iter().find(|&&q| q >= rho.n_qubits) {
        return Err(Error::UnknownQubit { label: bad, n_qubits: rho.n_qubits });
    }
    if keep.is_empty() {
        return Err(Error::InvalidArgument("partial trace must keep at least one qubit".into()));
    }
    let data = linalg::partial_trace_matrix(&rho.data, &keep, rho.n_qubits);
    // summing many entries can reintroduce tiny asymmetry
    DensityMatrix::new(data)
}

/// `½ Tr|a − b|`.
pub fn trace_distance<T: Real>(a: &DensityMatrix<T>, b: &DensityMatrix<T>) -> Result<T> {
    if a.dim() != b.dim() {
        return Err(Error::Dimension(format!(
            "trace distance between {}-dim and {}-dim states",
            a.dim(),
            b.dim()
        )));
    }
    let diff = linalg::symmetrize(&(&a.data - &b.data));
    let ev = linalg::hermitian_eigenvalues(&diff);
    Ok(T::lit(0.5) * ev.iter().fold(T::zero(), |acc, l| acc + l.abs()))
}

/// Entropy `−Σ λ ln λ` in nats, with `0 ln 0 = 0`.
pub fn von_neumann_entropy<T: Real>(rho: &DensityMatrix<T>) -> T {
    entropy_of_eigenvalues(rho.eigenvalues().iter().copied())
}

pub(crate) fn entropy_of_eigenvalues<T: Real>(ev: impl Iterator<Item = T>) -> T {
    ev.fold(T::zero(), |acc, l| if l > T::zero() { acc - l * l.ln() } else { acc })
}

/// Outcome probabilities `(p(+1), p(−1))` of a σ_z measurement on `qubit`.
pub fn measure_z_probability<T: Real>(rho: &DensityMatrix<T>, qubit: usize) -> Result<(T, T)> {
    if qubit >= rho.n_qubits {
        return Err(Error::UnknownQubit { label: qubit, n_qubits: rho.n_qubits });
    }
    let mask = 1usize << (rho.n_qubits - 1 - qubit);
    let p_plus = (0..rho.dim())
        .filter(|i| i & mask == 0)
        .fold(T::zero(), |acc, i| acc + rho.data[(i, i)].re);
    let p_plus = p_plus.max(T::zero()).min(T::one());
    Ok((p_plus, T::one() - p_plus))
}

/// Pauli matrices `[I, X, Y, Z]`.
pub fn paulis<T: Real>() -> [CMatrix<T>; 4] {
    let o = cr(T::zero());
    let l = cr(T::one());
    let i = Complex::new(T::zero(), T::one());
    [
        DMatrix::from_row_slice(2, 2, &[l, o, o, l]),
        DMatrix::from_row_slice(2, 2, &[o, l, l, o]),
        DMatrix::from_row_slice(2, 2, &[o, -i, i, o]),
        DMatrix::from_row_slice(2, 2, &[l, o, o, -l]),
    ]
}

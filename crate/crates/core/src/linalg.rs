//! Small dense helpers over complex matrices.

use nalgebra::{Complex, ComplexField, DMatrix, DVector};

use crate::scalar::{cr, Real, C};

pub type CMatrix<T> = DMatrix<C<T>>;

pub(crate) fn kron<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> CMatrix<T> {
    a.kronecker(b)
}

pub(crate) fn identity<T: Real>(dim: usize) -> CMatrix<T> {
    CMatrix::identity(dim, dim)
}

pub(crate) fn max_abs_diff<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> T {
    debug_assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .fold(T::zero(), |acc, (x, y)| acc.max((*x - *y).modulus()))
}

pub(crate) fn asymmetry<T: Real>(m: &CMatrix<T>) -> T {
    max_abs_diff(m, &m.adjoint())
}

pub(crate) fn symmetrize<T: Real>(m: &CMatrix<T>) -> CMatrix<T> {
    (m + m.adjoint()).map(|z| z * cr(T::lit(0.5)))
}

pub(crate) fn trace<T: Real>(m: &CMatrix<T>) -> C<T> {
    (0..m.nrows()).fold(Complex::new(T::zero(), T::zero()), |acc, i| acc + m[(i, i)])
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub(crate) fn hermitian_eigenvalues<T: Real>(m: &CMatrix<T>) -> DVector<T> {
    let mut ev: Vec<T> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalue"));
    DVector::from_vec(ev)
}

pub(crate) fn min_hermitian_eigenvalue<T: Real>(m: &CMatrix<T>) -> T {
    hermitian_eigenvalues(m)[0]
}

/// Factor a PSD Hermitian matrix as `G G^†`, dropping numerically null
/// eigen-directions. Columns of `G` are `sqrt(λ) |v⟩`.
pub(crate) fn psd_factor<T: Real>(m: &CMatrix<T>) -> CMatrix<T> {
    let eig = m.clone().symmetric_eigen();
    let cols: Vec<usize> = (0..eig.eigenvalues.len())
        .filter(|&k| eig.eigenvalues[k] > T::zero())
        .collect();
    let mut g = CMatrix::zeros(m.nrows(), cols.len().max(1));
    for (c, &k) in cols.iter().enumerate() {
        let s = cr(eig.eigenvalues[k].sqrt());
        for r in 0..m.nrows() {
            g[(r, c)] = eig.eigenvectors[(r, k)] * s;
        }
    }
    g
}

/// Apply a `2^k × 2^k` gate acting on `targets` (most significant first) to
/// every column of `state`, which lives on an `n_qubits` register.
pub(crate) fn apply_gate_left<T: Real>(
    state: &mut CMatrix<T>,
    gate: &CMatrix<T>,
    targets: &[usize],
    n_qubits: usize,
) {
    let k = targets.len();
    let sub = 1usize << k;
    let masks: Vec<usize> = targets.iter().map(|&t| 1usize << (n_qubits - 1 - t)).collect();
    let target_mask: usize = masks.iter().sum();
    // offsets[a] = scattered bit pattern of local index a
    let offsets: Vec<usize> = (0..sub)
        .map(|a| {
            (0..k)
                .filter(|&bit| a & (1 << (k - 1 - bit)) != 0)
                .map(|bit| masks[bit])
                .sum()
        })
        .collect();
    let dim = 1usize << n_qubits;
    let mut buf = vec![Complex::new(T::zero(), T::zero()); sub];
    for col in 0..state.ncols() {
        for base in (0..dim).filter(|i| i & target_mask == 0) {
            for (a, off) in offsets.iter().enumerate() {
                buf[a] = state[(base | off, col)];
            }
            for (r, off) in offsets.iter().enumerate() {
                let mut acc = Complex::new(T::zero(), T::zero());
                for (a, v) in buf.iter().enumerate() {
                    acc += gate[(r, a)] * *v;
                }
                state[(base | off, col)] = acc;
            }
        }
    }
}

/// Scatter table: entry `i` is the full-register index whose bits at the
/// given qubit positions spell `i` (first qubit most significant).
pub(crate) fn scatter_table(qubits: &[usize], n_qubits: usize) -> Vec<usize> {
    let k = qubits.len();
    (0..1usize << k)
        .map(|i| {
            qubits
                .iter()
                .enumerate()
                .filter(|(bit, _)| i & (1 << (k - 1 - bit)) != 0)
                .map(|(_, &q)| 1usize << (n_qubits - 1 - q))
                .sum()
        })
        .collect()
}

/// Reduced matrix on `keep` (sorted) of an `n_qubits` operator.
pub(crate) fn partial_trace_matrix<T: Real>(
    m: &CMatrix<T>,
    keep: &[usize],
    n_qubits: usize,
) -> CMatrix<T> {
    let traced: Vec<usize> = (0..n_qubits).filter(|q| !keep.contains(q)).collect();
    let kt = scatter_table(keep, n_qubits);
    let rt = scatter_table(&traced, n_qubits);
    let d = kt.len();
    CMatrix::from_fn(d, d, |i, j| {
        rt.iter().fold(Complex::new(T::zero(), T::zero()), |acc, &r| {
            acc + m[(kt[i] | r, kt[j] | r)]
        })
    })
}

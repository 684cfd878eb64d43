//! Seeded random states and unitaries for tests and benchmarks.
//!
//! The engine itself never draws random numbers; these helpers exist so
//! that callers can build reproducible random instances.

use nalgebra::{Complex, ComplexField};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::CMatrix;
use crate::qstate::{BlochVector, DensityMatrix, Unitary};
use crate::scalar::{cr, Real};

fn ginibre<T: Real, R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix<T> {
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex::new(T::lit(re), T::lit(im))
    })
}

/// Haar-distributed unitary on `n_qubits` qubits.
pub fn random_unitary<T: Real, R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> Unitary<T> {
    let d = 1usize << n_qubits;
    let qr = ginibre::<T, R>(d, d, rng).qr();
    let (mut q, r) = qr.unpack();
    for j in 0..d {
        let diag = r[(j, j)];
        let n = diag.modulus();
        let phase = if n > T::zero() { diag / cr(n) } else { cr(T::one()) };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    Unitary::from_trusted(q)
}

/// Full-rank random density matrix (Ginibre ensemble, `G G^† / Tr`).
pub fn random_density<T: Real, R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> DensityMatrix<T> {
    let d = 1usize << n_qubits;
    let g = ginibre::<T, R>(d, d, rng);
    let m = &g * g.adjoint();
    let tr = (0..d).fold(T::zero(), |acc, i| acc + m[(i, i)].re);
    DensityMatrix::new(m.map(|z| z / cr(tr))).expect("Ginibre state is a density matrix")
}

/// Random pure state on `n_qubits` qubits.
pub fn random_pure<T: Real, R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> DensityMatrix<T> {
    let d = 1usize << n_qubits;
    let v = ginibre::<T, R>(d, 1, rng).column(0).into_owned();
    DensityMatrix::pure(&v).expect("nonzero vector")
}

/// Uniform sample from the closed unit ball.
pub fn random_bloch<T: Real, R: Rng + ?Sized>(rng: &mut R) -> BlochVector<T> {
    loop {
        let x: f64 = rng.random_range(-1.0..=1.0);
        let y: f64 = rng.random_range(-1.0..=1.0);
        let z: f64 = rng.random_range(-1.0..=1.0);
        if x * x + y * y + z * z <= 1.0 {
            return BlochVector::new(T::lit(x), T::lit(y), T::lit(z)).expect("inside the ball");
        }
    }
}

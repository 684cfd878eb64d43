use std::fmt;

use super::fixed_point::FixedPointSet;
use super::superop::hs_inner;
use super::Tolerances;
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::qstate::DensityMatrix;
use crate::scalar::{cr, Real};

/// Rule for choosing one fixed point when the consistency condition has many.
#[derive(Clone, Debug, Default, PartialEq)]
pub enum Policy<T: Real> {
    /// The fixed point of largest von Neumann entropy.
    #[default]
    MaxEntropy,
    /// Limit of the running averages of `F^k(I/d)`.
    Cesaro,
    /// `base + Σ x_i · direction_i`.
    Explicit(Vec<T>),
}

impl<T: Real> Policy<T> {
    pub fn name(&self) -> &'static str {
        match self {
            Policy::MaxEntropy => "MAX_ENTROPY",
            Policy::Cesaro => "CESARO",
            Policy::Explicit(_) => "EXPLICIT",
        }
    }
}

impl<T: Real> fmt::Display for Policy<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Policy::Explicit(x) => {
                f.write_str("EXPLICIT(")?;
                for (k, v) in x.iter().enumerate() {
                    if k > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{v}")?;
                }
                f.write_str(")")
            }
            other => f.write_str(other.name()),
        }
    }
}

pub fn select_fixed_point<T: Real>(
    set: &FixedPointSet<T>,
    policy: &Policy<T>,
    tol: &Tolerances<T>,
) -> Result<DensityMatrix<T>> {
    if let Policy::Explicit(x) = policy {
        return explicit(set, x);
    }
    if set.multiplicity() == 0 {
        return Ok(set.base().clone());
    }
    match policy {
        Policy::MaxEntropy => {
            let x = max_entropy_coords(set, tol)?;
            set.point(&x)
        }
        Policy::Cesaro => cesaro(set, tol),
        Policy::Explicit(_) => unreachable!(),
    }
}

fn explicit<T: Real>(set: &FixedPointSet<T>, x: &[T]) -> Result<DensityMatrix<T>> {
    if x.len() != set.multiplicity() {
        return Err(Error::Selection(format!(
            "EXPLICIT needs {} coordinate(s), got {}",
            set.multiplicity(),
            x.len()
        )));
    }
    set.point(x)
}

/// Entropy and gradient `∂S/∂x_i = −Tr(D_i ln ρ)` at a point, or `None` if
/// the point has left the PSD cone.
fn entropy_and_gradient<T: Real>(set: &FixedPointSet<T>, x: &[T]) -> Option<(T, Vec<T>)> {
    let m = linalg::symmetrize(&set.point_matrix(x).ok()?);
    let eig = m.symmetric_eigen();
    let floor = T::lit(1e-30);
    if eig.eigenvalues.iter().any(|l| *l < -T::exact_tol()) {
        return None;
    }
    let mut entropy = T::zero();
    let logs: Vec<T> = eig
        .eigenvalues
        .iter()
        .map(|l| {
            let l = l.max(floor);
            entropy -= l * l.ln();
            l.ln()
        })
        .collect();
    let log_rho = &eig.eigenvectors
        * CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(logs.len(), logs.into_iter().map(cr)))
        * eig.eigenvectors.adjoint();
    let grad = set.directions().iter().map(|d| -hs_inner(d, &log_rho).re).collect();
    Some((entropy, grad))
}

/// Gradient ascent with an adaptive step: grow after a successful step,
/// halve on an infeasible or non-improving one.
fn max_entropy_coords<T: Real>(set: &FixedPointSet<T>, tol: &Tolerances<T>) -> Result<Vec<T>> {
    let mut x = vec![T::zero(); set.multiplicity()];
    let (mut s, mut g) = entropy_and_gradient(set, &x)
        .ok_or_else(|| Error::Selection("base point is not PSD".into()))?;
    let mut step = T::lit(0.1);
    let min_step = T::lit(1e-18);
    for _ in 0..tol.entropy_max_iter {
        let gnorm2 = g.iter().fold(T::zero(), |a, v| a + *v * *v);
        if gnorm2 == T::zero() {
            break;
        }
        let trial: Vec<T> = x.iter().zip(&g).map(|(xi, gi)| *xi + step * *gi).collect();
        match entropy_and_gradient(set, &trial) {
            Some((s2, g2)) if s2 - s >= T::lit(1e-4) * step * gnorm2 => {
                let gain = s2 - s;
                x = trial;
                s = s2;
                g = g2;
                step *= T::lit(2.0);
                if gain < tol.entropy_improvement {
                    break;
                }
            }
            _ => {
                step *= T::lit(0.5);
                if step < min_step {
                    break;
                }
            }
        }
    }
    Ok(x)
}

fn cesaro<T: Real>(set: &FixedPointSet<T>, tol: &Tolerances<T>) -> Result<DensityMatrix<T>> {
    let f = set.map();
    let mut current: CMatrix<T> = DensityMatrix::<T>::maximally_mixed(f.n_qubits())?.into_matrix();
    let mut sum = current.clone();
    let mut avg = current.clone();
    let mut last_change = T::zero();
    for n in 1..=tol.cesaro_max_iter {
        current = f.apply(&current);
        sum += &current;
        let next = sum.map(|z| z / cr(T::from_usize(n + 1).unwrap()));
        last_change = linalg::max_abs_diff(&next, &avg);
        avg = next;
        if last_change < tol.cesaro {
            let x = set.project(&avg);
            return set.point(&x);
        }
    }
    Err(Error::NoConvergence { iterations: tol.cesaro_max_iter, last_change: last_change.as_f64() })
}

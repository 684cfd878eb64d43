//! Fixed points of a CPTP map on the CTC subsystem.
//!
//! Work happens in the Pauli coordinates `ρ = (I + Σ r_μ P_μ) / d`, where a
//! trace-preserving map is affine: `r ↦ T r + t`. Fixed points solve
//! `(T − I) r = −t`; the traceless fixed directions are the null space of
//! `T − I`.

use nalgebra::{DMatrix, DVector};

use super::superop::{pauli_basis, Superoperator};
use super::Tolerances;
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::qstate::DensityMatrix;
use crate::scalar::{cr, Real};

/// Convex set of density-matrix fixed points, parameterized as
/// `base + Σ x_i · directions[i]`.
#[derive(Clone, Debug)]
pub struct FixedPointSet<T: Real> {
    base: DensityMatrix<T>,
    directions: Vec<CMatrix<T>>,
    box_bounds: Vec<(T, T)>,
    map: Superoperator<T>,
}

impl<T: Real> FixedPointSet<T> {
    pub fn base(&self) -> &DensityMatrix<T> {
        &self.base
    }

    /// Traceless Hermitian directions with `Tr(D_i D_j) = δ_ij / d`, so a
    /// single-qubit direction `σ/2` moves the Bloch vector by one unit.
    pub fn directions(&self) -> &[CMatrix<T>] {
        &self.directions
    }

    /// Per-direction interval keeping `base + x·D_i` PSD.
    pub fn box_bounds(&self) -> &[(T, T)] {
        &self.box_bounds
    }

    pub fn multiplicity(&self) -> usize {
        self.directions.len()
    }

    pub fn map(&self) -> &Superoperator<T> {
        &self.map
    }

    /// `base + Σ x_i D_i` without any positivity check.
    pub fn point_matrix(&self, x: &[T]) -> Result<CMatrix<T>> {
        if x.len() != self.directions.len() {
            return Err(Error::Dimension(format!(
                "fixed-point set has {} direction(s), got {} coordinate(s)",
                self.directions.len(),
                x.len()
            )));
        }
        let mut m = self.base.matrix().clone();
        for (xi, d) in x.iter().zip(&self.directions) {
            m += d.map(|z| z * cr(*xi));
        }
        Ok(m)
    }

    /// `base + Σ x_i D_i` as a density matrix.
    pub fn point(&self, x: &[T]) -> Result<DensityMatrix<T>> {
        let m = self.point_matrix(x)?;
        let min = linalg::min_hermitian_eigenvalue(&linalg::symmetrize(&m));
        if min < -T::state_psd_tol() {
            return Err(Error::Selection(format!(
                "point {:?} is not positive semidefinite (eigenvalue {min:e})",
                x.iter().map(|v| v.as_f64()).collect::<Vec<_>>()
            )));
        }
        DensityMatrix::new(m)
    }

    /// `max |F(X) − X|` for `X = base + Σ x_i D_i`.
    pub fn residual(&self, x: &[T]) -> Result<T> {
        let m = self.point_matrix(x)?;
        Ok(linalg::max_abs_diff(&self.map.apply(&m), &m))
    }

    /// Orthogonal projection of a Hermitian matrix onto the affine span,
    /// returned as coordinates.
    pub(crate) fn project(&self, m: &CMatrix<T>) -> Vec<T> {
        let d = T::from_usize(self.base.dim()).unwrap();
        let delta = m - self.base.matrix();
        self.directions
            .iter()
            .map(|dir| super::superop::hs_inner(dir, &delta).re * d)
            .collect()
    }
}

fn pauli_matrix<T: Real>(coords: &[T], basis: &[CMatrix<T>], d: usize) -> CMatrix<T> {
    let scale = T::one() / T::from_usize(d).unwrap();
    let mut m = CMatrix::zeros(d, d);
    for (c, p) in coords.iter().zip(basis) {
        if *c != T::zero() {
            m += p.map(|z| z * cr(*c * scale));
        }
    }
    m
}

/// Orthonormal basis of the numerical null space (`σ ≤ tol`) as columns.
fn null_space<T: Real>(a: &DMatrix<T>, tol: T) -> DMatrix<T> {
    let n = a.ncols();
    let svd = a.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let mut cols = Vec::new();
    for k in 0..n {
        let sigma = if k < svd.singular_values.len() { svd.singular_values[k] } else { T::zero() };
        if sigma <= tol {
            cols.push(v_t.row(k).transpose());
        }
    }
    if cols.is_empty() {
        DMatrix::zeros(n, 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}

/// Rotate a null-space basis into a canonical one: greedily take the
/// normalized projection of the coordinate axis best represented in the
/// remaining subspace. Axis-aligned subspaces come out as axes.
fn canonical_basis<T: Real>(q: DMatrix<T>) -> Vec<DVector<T>> {
    let mut q = q;
    let mut out = Vec::new();
    let slack = T::lit(1e-9);
    while q.ncols() > 0 {
        let norms: Vec<T> = (0..q.nrows()).map(|j| q.row(j).norm()).collect();
        let best = norms.iter().fold(T::zero(), |a, b| a.max(*b));
        let j = norms.iter().position(|n| *n >= best - slack).expect("nonempty");
        let w = q.row(j).transpose() / norms[j];
        let v = &q * &w;
        out.push(v);
        // orthonormal complement of w inside the current k-dim coordinates
        let k = q.ncols();
        let mut basis: Vec<DVector<T>> = vec![w.clone()];
        for e in 0..k {
            let mut cand = DVector::from_fn(k, |i, _| if i == e { T::one() } else { T::zero() });
            for b in &basis {
                let proj = b.dot(&cand);
                cand -= b * proj;
            }
            let n = cand.norm();
            if n > T::lit(1e-6) {
                basis.push(cand / n);
            }
            if basis.len() == k {
                break;
            }
        }
        let rest: Vec<DVector<T>> = basis.into_iter().skip(1).collect();
        q = if rest.is_empty() { DMatrix::zeros(q.nrows(), 0) } else { &q * DMatrix::from_columns(&rest) };
    }
    out
}

/// Cesàro limit of `M^k e_0` through the spectral projector onto the
/// eigenvalue-1 eigenspace: `P = R (Wᵀ R)⁻¹ Wᵀ` with right/left null
/// vectors of `M − I`. Returns `None` when `Wᵀ R` is ill-conditioned.
fn cesaro_limit_by_projector<T: Real>(m: &DMatrix<T>, tol: T) -> Option<DVector<T>> {
    let n = m.nrows();
    let a = m - DMatrix::identity(n, n);
    let svd = a.svd(true, true);
    let (u, v_t) = (svd.u?, svd.v_t?);
    let idx: Vec<usize> = (0..n).filter(|&k| svd.singular_values[k] <= tol).collect();
    if idx.is_empty() {
        return None;
    }
    let r = DMatrix::from_columns(&idx.iter().map(|&k| v_t.row(k).transpose()).collect::<Vec<_>>());
    let w = DMatrix::from_columns(&idx.iter().map(|&k| u.column(k).into_owned()).collect::<Vec<_>>());
    let g = w.transpose() * &r;
    let gsv = g.clone().singular_values();
    let smin = gsv.iter().fold(T::max_value().unwrap(), |a, b| a.min(*b));
    if smin < T::lit(1e-8) {
        return None;
    }
    let g_inv = g.try_inverse()?;
    let e0 = DVector::from_fn(n, |i, _| if i == 0 { T::one() } else { T::zero() });
    Some(&r * (g_inv * (w.transpose() * e0)))
}

/// Cesàro average `(1/N) Σ_{k<N} M^k e_0` with `N` doubling until the
/// average moves by less than `tol`.
fn cesaro_limit_by_doubling<T: Real>(m: &DMatrix<T>, tol: T) -> Result<DVector<T>> {
    let n = m.nrows();
    let e0 = DVector::from_fn(n, |i, _| if i == 0 { T::one() } else { T::zero() });
    let mut power = m.clone(); // M^N
    let mut sum = DMatrix::identity(n, n); // Σ_{k<N} M^k
    let mut count = T::one();
    let mut avg = e0.clone();
    let mut last_change = f64::INFINITY;
    for step in 0..80 {
        sum = &sum + &power * &sum;
        power = &power * &power;
        count *= T::lit(2.0);
        let next = (&sum * &e0) / count;
        let change = (&next - &avg).amax();
        avg = next;
        last_change = change.as_f64();
        if change < tol && step > 2 {
            return Ok(avg);
        }
    }
    Err(Error::NoConvergence { iterations: 80, last_change })
}

/// Solve the consistency condition `F(ρ) = ρ` for all density matrices.
pub fn fixed_point_set<T: Real>(f: &Superoperator<T>, tol: &Tolerances<T>) -> Result<FixedPointSet<T>> {
    let d = f.dim_b();
    let basis = pauli_basis::<T>(f.n_qubits());
    let m = f.pauli_transfer();
    let nm = m.nrows();
    let t_vec = m.view((1, 0), (nm - 1, 1)).column(0).into_owned();
    let t_mat = m.view((1, 1), (nm - 1, nm - 1)).into_owned();
    let b = &t_mat - DMatrix::identity(nm - 1, nm - 1);

    let null = null_space(&b, tol.fixed_point);
    let dir_coords = canonical_basis(null);
    let norm = T::one() / T::from_usize(d).unwrap();
    let directions: Vec<CMatrix<T>> = dir_coords
        .iter()
        .map(|v| {
            let mut full = vec![T::zero()];
            full.extend(v.iter().copied());
            pauli_matrix(&full, &basis, d).map(|z| z * cr(T::from_usize(d).unwrap() * norm))
        })
        .collect();

    let limit = match cesaro_limit_by_projector(&m, tol.fixed_point) {
        Some(v) => v,
        None => cesaro_limit_by_doubling(&m, tol.cesaro)?,
    };
    if limit[0].abs() < T::lit(0.5) {
        return Err(Error::NoFixedPoint("Cesaro limit lost the identity component".into()));
    }
    let mut r: DVector<T> = limit.rows(1, nm - 1) / limit[0];
    // polish: remove the residual of (T − I) r = −t in the least-squares sense
    let residual = &b * &r + &t_vec;
    if let Ok(fix) = b.clone().svd(true, true).solve(&residual, tol.fixed_point) {
        r -= fix;
    }
    let mut coords = vec![T::one()];
    coords.extend(r.iter().copied());
    let mut base_m = linalg::symmetrize(&pauli_matrix(&coords, &basis, d));

    let min = linalg::min_hermitian_eigenvalue(&base_m);
    if min < -tol.psd {
        return Err(Error::NoFixedPoint(format!("Cesaro limit is not PSD (eigenvalue {min:e})")));
    }
    if min < T::zero() {
        base_m = clip_to_psd(&base_m);
    }
    let base = DensityMatrix::new(base_m).map_err(|e| Error::NoFixedPoint(e.to_string()))?;
    let res = linalg::max_abs_diff(&f.apply(base.matrix()), base.matrix());
    if res > tol.fixed_point {
        return Err(Error::NoFixedPoint(format!("base point residual {res:e}")));
    }

    let box_bounds = directions
        .iter()
        .map(|dir| (bisect_bound(&base, dir, -T::one()), bisect_bound(&base, dir, T::one())))
        .collect();
    Ok(FixedPointSet { base, directions, box_bounds, map: f.clone() })
}

fn clip_to_psd<T: Real>(m: &CMatrix<T>) -> CMatrix<T> {
    let eig = m.clone().symmetric_eigen();
    let vals: Vec<T> = eig.eigenvalues.iter().map(|l| l.max(T::zero())).collect();
    let total = vals.iter().fold(T::zero(), |a, b| a + *b);
    let diag = CMatrix::from_diagonal(&DVector::from_iterator(vals.len(), vals.iter().map(|l| cr(*l / total))));
    linalg::symmetrize(&(&eig.eigenvectors * diag * eig.eigenvectors.adjoint()))
}

/// Largest `|x|` along `sign · dir` keeping `base + x·dir` PSD, by bisection.
fn bisect_bound<T: Real>(base: &DensityMatrix<T>, dir: &CMatrix<T>, sign: T) -> T {
    let feasible = |x: T| {
        let m = base.matrix() + dir.map(|z| z * cr(sign * x));
        linalg::min_hermitian_eigenvalue(&m) >= -T::exact_tol()
    };
    let mut lo = T::zero();
    let mut hi = T::from_usize(2 * base.dim()).unwrap();
    if feasible(hi) {
        return sign * hi;
    }
    for _ in 0..100 {
        let mid = (lo + hi) * T::lit(0.5);
        if mid <= lo || mid >= hi {
            break;
        }
        if feasible(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    sign * lo
}

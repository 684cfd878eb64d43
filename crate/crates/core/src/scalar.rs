//! Scalar abstraction shared by the linear-algebra modules.
//!
//! Everything that touches density matrices, unitaries or superoperators is
//! generic over [`Real`]. The default tolerances scale with the precision of
//! the type: the `f64` values are the ones the crate is calibrated for, the
//! `f32` values are loosened so that the same algorithms remain usable.

use std::fmt::{Debug, Display, LowerExp};
use std::str::FromStr;

use nalgebra::{Complex, RealField};
use num_traits::{FromPrimitive, ToPrimitive};

/// Real floating-point scalar usable by the simulator.
pub trait Real:
    RealField + Copy + FromPrimitive + ToPrimitive + FromStr + Display + LowerExp + Debug
{
    /// Tolerance for algebraic identities that hold exactly in exact
    /// arithmetic (Hermiticity, unit trace, unitarity).
    fn exact_tol() -> Self;

    /// Largest asymmetry `max |A - A^†|` that is still treated as round-off and
    /// repaired by symmetrization.
    fn symmetrize_tol() -> Self;

    /// Most negative eigenvalue still accepted for a density matrix.
    fn state_psd_tol() -> Self;

    /// Default eigenvalue-1 tolerance used when extracting fixed points.
    fn fixed_point_tol() -> Self;

    /// Default PSD tolerance for Choi matrices and fixed-point candidates.
    fn map_psd_tol() -> Self;

    /// Lossy conversion from `f64`; literals in this crate are all exactly
    /// representable or only need to be approximately so.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    /// Lossy conversion to `f64`.
    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("real scalar converts to f64")
    }
}

impl Real for f64 {
    fn exact_tol() -> Self {
        1e-12
    }
    fn symmetrize_tol() -> Self {
        1e-10
    }
    fn state_psd_tol() -> Self {
        1e-10
    }
    fn fixed_point_tol() -> Self {
        1e-9
    }
    fn map_psd_tol() -> Self {
        1e-9
    }
}

impl Real for f32 {
    fn exact_tol() -> Self {
        1e-5
    }
    fn symmetrize_tol() -> Self {
        1e-4
    }
    fn state_psd_tol() -> Self {
        1e-4
    }
    fn fixed_point_tol() -> Self {
        1e-4
    }
    fn map_psd_tol() -> Self {
        1e-4
    }
}

/// Complex amplitude over a [`Real`] scalar.
pub type C<T> = Complex<T>;

#[inline]
pub(crate) fn c<T: Real>(re: T, im: T) -> C<T> {
    Complex::new(re, im)
}

#[inline]
pub(crate) fn cr<T: Real>(re: T) -> C<T> {
    Complex::new(re, T::zero())
}

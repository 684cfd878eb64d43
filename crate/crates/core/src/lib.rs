//! Simulation of quantum circuits in which some qubits traverse closed
//! timelike curves, using Deutsch's self-consistency condition.
//!
//! The linear-algebra layers ([`qstate`], [`circuits`], [`engine`]) are
//! generic over the scalar type through [`Real`]; the aliases at the crate
//! root fix the scalar to `f64`, which is what the SAT protocol and noise
//! analysis use.

pub mod circuits;
pub mod engine;
mod error;
mod linalg;
pub mod noise;
pub mod qstate;
pub mod random;
pub mod sat;
mod scalar;

pub use error::{Error, Result};
pub use linalg::CMatrix;
pub use scalar::{Real, C};

pub type DensityMatrix = qstate::DensityMatrix<f64>;
pub type BlochVector = qstate::BlochVector<f64>;
pub type Unitary = qstate::Unitary<f64>;
pub type Gate = circuits::Gate<f64>;
pub type CtcCircuit = circuits::CtcCircuit<f64>;
pub type Superoperator = engine::Superoperator<f64>;
pub type FixedPointSet = engine::FixedPointSet<f64>;
pub type CtcResult = engine::CtcResult<f64>;
pub type Policy = engine::Policy<f64>;
pub type Tolerances = engine::Tolerances<f64>;

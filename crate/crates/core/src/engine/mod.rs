//! Deutsch's consistency condition: the CTC state must be a fixed point of
//! `ρ ↦ Tr_A[U(ρ_in ⊗ ρ)U^†]`, and the circuit output is
//! `Tr_B[U(ρ_in ⊗ ρ)U^†]` at the chosen fixed point.

mod fixed_point;
mod select;
mod superop;

use std::fmt;

pub use fixed_point::{fixed_point_set, FixedPointSet};
pub use select::{select_fixed_point, Policy};
pub use superop::{induced_map, pauli_basis, Superoperator, MAX_CTC_QUBITS};

use crate::circuits::{example_circuit, Builtin, CtcCircuit, QubitRegister};
use crate::error::{Error, Result};
use crate::linalg;
use crate::qstate::{BlochVector, DensityMatrix, Unitary};
use crate::scalar::{cr, Real};
use superop::Problem;

/// Numerical knobs of the solver.
#[derive(Clone, Debug, PartialEq)]
pub struct Tolerances<T: Real> {
    /// Singular values of `T − I` at or below this count as eigenvalue 1;
    /// also the residual a fixed point must meet.
    pub fixed_point: T,
    /// Most negative eigenvalue accepted for a fixed-point candidate.
    pub psd: T,
    /// Stop the Cesàro iteration when successive averages differ by less.
    pub cesaro: T,
    pub cesaro_max_iter: usize,
    /// Stop entropy ascent when a step gains less than this.
    pub entropy_improvement: T,
    pub entropy_max_iter: usize,
    /// Outputs further apart than this make a result ambiguous.
    pub ambiguity: T,
}

impl<T: Real> Default for Tolerances<T> {
    fn default() -> Self {
        Self {
            fixed_point: T::fixed_point_tol(),
            psd: T::map_psd_tol(),
            cesaro: T::lit(1e-10).max(T::exact_tol()),
            cesaro_max_iter: 1_000_000,
            entropy_improvement: T::lit(1e-12).max(T::exact_tol() * T::lit(1e-2)),
            entropy_max_iter: 20_000,
            ambiguity: T::fixed_point_tol(),
        }
    }
}

/// Outcome of one CTC evolution.
#[derive(Clone, Debug)]
pub struct CtcResult<T: Real> {
    /// Chronology-respecting output.
    pub rho_out: DensityMatrix<T>,
    /// Selected CTC fixed point.
    pub rho_ctc: DensityMatrix<T>,
    pub multiplicity: usize,
    pub policy_used: Policy<T>,
    /// Whether different fixed points give different outputs.
    pub output_ambiguous: bool,
    pub fixed_points: FixedPointSet<T>,
}

/// Evolve `rho_in` through a circuit with CTC qubits.
pub fn ctc_evolve<T: Real>(
    circuit: &CtcCircuit<T>,
    rho_in: &DensityMatrix<T>,
    policy: &Policy<T>,
    tol: &Tolerances<T>,
) -> Result<CtcResult<T>> {
    let u = circuit.unitary()?;
    ctc_evolve_unitary(&u, circuit.register(), rho_in, policy, tol)
}

/// [`ctc_evolve`] for a circuit already reduced to its unitary.
pub fn ctc_evolve_unitary<T: Real>(
    u: &Unitary<T>,
    reg: QubitRegister,
    rho_in: &DensityMatrix<T>,
    policy: &Policy<T>,
    tol: &Tolerances<T>,
) -> Result<CtcResult<T>> {
    let problem = Problem::new(u, rho_in, reg)?;
    let f = Superoperator::from_liouville(problem.induced_liouville(), tol.psd)?;
    let set = fixed_point_set(&f, tol)?;
    let rho_ctc = select_fixed_point(&set, policy, tol)?;
    let rho_out = output_state(&problem, rho_ctc.matrix())?;

    let mut output_ambiguous = false;
    if set.multiplicity() > 0 {
        let at_base = output_state(&problem, set.base().matrix())?;
        'probe: for (i, &(lo, hi)) in set.box_bounds().iter().enumerate() {
            for x in [lo, hi] {
                let mut coords = vec![T::zero(); set.multiplicity()];
                coords[i] = x;
                let m = linalg::symmetrize(&set.point_matrix(&coords)?);
                let out = output_state(&problem, &m)?;
                if out.max_abs_diff(&at_base) > tol.ambiguity {
                    output_ambiguous = true;
                    break 'probe;
                }
            }
        }
    }

    Ok(CtcResult {
        rho_out,
        rho_ctc,
        multiplicity: set.multiplicity(),
        policy_used: policy.clone(),
        output_ambiguous,
        fixed_points: set,
    })
}

fn output_state<T: Real>(problem: &Problem<'_, T>, rho_ctc: &linalg::CMatrix<T>) -> Result<DensityMatrix<T>> {
    let (out, _) = problem.marginals(rho_ctc);
    // clamping eigenvalues of a boundary point to zero shifts the trace by round-off
    let tr = linalg::trace(&out).re;
    if (tr - T::one()).abs() <= T::fixed_point_tol() {
        return DensityMatrix::new(out.map(|z| z / cr(tr)));
    }
    DensityMatrix::new(out)
}

/// How [`apply_s`] evaluates the map.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SBackend {
    /// `½(I + n_z² σ_z)` directly.
    ClosedForm,
    /// Solve the S_GATE circuit with the fixed-point engine.
    FullSolve,
}

/// The nonlinear single-qubit map `n_z → n_z²`, undefined at `n_x = 1`.
pub fn apply_s<T: Real>(rho: &DensityMatrix<T>, backend: SBackend) -> Result<DensityMatrix<T>> {
    if rho.n_qubits() != 1 {
        return Err(Error::Dimension(format!("S acts on one qubit, got {}", rho.n_qubits())));
    }
    let tol = Tolerances::<T>::default();
    match backend {
        SBackend::ClosedForm => {
            let b = rho.bloch()?;
            if (b.x - T::one()).abs() <= tol.fixed_point {
                return Err(Error::Ambiguous { multiplicity: 1 });
            }
            Ok(BlochVector::new(T::zero(), T::zero(), b.z * b.z)?.to_density())
        }
        SBackend::FullSolve => {
            let circuit = example_circuit::<T>(Builtin::SGate);
            let r = ctc_evolve(&circuit, rho, &Policy::MaxEntropy, &tol)?;
            if r.output_ambiguous {
                return Err(Error::Ambiguous { multiplicity: r.multiplicity });
            }
            Ok(r.rho_out)
        }
    }
}

/// Comparison of two placements of the consistency condition on the loop.
#[derive(Clone, Debug)]
pub struct TemporalOriginReport<T: Real> {
    /// `max |ρ_out,1 − ρ_out,2|`.
    pub deviation: T,
    pub multiplicity: (usize, usize),
    /// `max |ρ_2 − V2^† ρ_1 V2|` for the selected CTC states.
    pub basis_change_deviation: T,
    /// Either placement had several fixed points.
    pub degenerate: bool,
    /// Degenerate case only: the MAX_ENTROPY selections are not related by
    /// the change of basis.
    pub selections_disagree: bool,
}

impl<T: Real> fmt::Display for TemporalOriginReport<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "deviation={:e} multiplicity=({}, {}) basis_change={:e} selections_disagree={}",
            self.deviation,
            self.multiplicity.0,
            self.multiplicity.1,
            self.basis_change_deviation,
            self.selections_disagree
        )
    }
}

/// Impose consistency before `(I ⊗ V2 V1) U0` and, shifting the origin,
/// before `(I ⊗ V1) U0 (I ⊗ V2)`; both must give the same output.
pub fn temporal_origin_check<T: Real>(
    u0: &Unitary<T>,
    v1: &Unitary<T>,
    v2: &Unitary<T>,
    rho_in: &DensityMatrix<T>,
    reg: QubitRegister,
) -> Result<TemporalOriginReport<T>> {
    for (name, v) in [("V1", v1), ("V2", v2)] {
        if v.n_qubits() != reg.n_ctc() {
            return Err(Error::Dimension(format!(
                "{name} acts on {} qubits but the CTC register has {}",
                v.n_qubits(),
                reg.n_ctc()
            )));
        }
    }
    let id_a = Unitary::identity(reg.n_cr())?;
    let lift = |v: &Unitary<T>| id_a.kron(v);
    let u1 = lift(&v2.compose(v1)?)?.compose(u0)?;
    let u2 = lift(v1)?.compose(u0)?.compose(&lift(v2)?)?;
    let tol = Tolerances::default();
    let r1 = ctc_evolve_unitary(&u1, reg, rho_in, &Policy::MaxEntropy, &tol)?;
    let r2 = ctc_evolve_unitary(&u2, reg, rho_in, &Policy::MaxEntropy, &tol)?;
    let deviation = r1.rho_out.max_abs_diff(&r2.rho_out);
    let rotated = v2.dagger().conjugate(&r1.rho_ctc)?;
    let basis_change_deviation = rotated.max_abs_diff(&r2.rho_ctc);
    let degenerate = r1.multiplicity > 0 || r2.multiplicity > 0;
    Ok(TemporalOriginReport {
        deviation,
        multiplicity: (r1.multiplicity, r2.multiplicity),
        basis_change_deviation,
        degenerate,
        selections_disagree: degenerate && basis_change_deviation > tol.ambiguity,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_bloch, random_density, random_unitary};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn bloch(x: f64, y: f64, z: f64) -> DensityMatrix<f64> {
        BlochVector::new(x, y, z).unwrap().to_density()
    }

    fn evolve(which: Builtin, rho_in: &DensityMatrix<f64>, policy: Policy<f64>) -> CtcResult<f64> {
        ctc_evolve(&example_circuit(which), rho_in, &policy, &Tolerances::default()).unwrap()
    }

    #[test]
    fn cphase_swap_output() {
        let (nx, ny, nz) = (0.3, 0.4, 0.5);
        let r = evolve(Builtin::CphaseSwap, &bloch(nx, ny, nz), Policy::MaxEntropy);
        assert_eq!(r.multiplicity, 0);
        assert!(!r.output_ambiguous);
        let want = BlochVector::new(nz * nz * nx, nz * nz * ny, nz).unwrap();
        assert!(r.rho_out.bloch().unwrap().max_abs_diff(&want) < 1e-12);
        let m = BlochVector::new(nx * nz, ny * nz, nz).unwrap();
        assert!(r.rho_ctc.bloch().unwrap().max_abs_diff(&m) < 1e-12);
    }

    #[test]
    fn crot_output_depends_on_ctc_state() {
        for mz in [-1.0, -0.3, 0.0, 0.7, 1.0] {
            let r = evolve(Builtin::Crot, &bloch(1.0, 0.0, 0.0), Policy::Explicit(vec![mz]));
            assert!(r.output_ambiguous);
            let b = r.rho_out.bloch().unwrap();
            assert!((b.x - (1.0 + mz) / 2.0).abs() < 1e-12);
            assert!((b.y - (1.0 - mz) / 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn s_gate_output() {
        for g in [0.9, 0.5, -0.3] {
            let r = evolve(Builtin::SGate, &bloch(0.0, 0.0, g), Policy::MaxEntropy);
            let b = r.rho_out.bloch().unwrap();
            assert!(b.max_abs_diff(&BlochVector::new(0.0, 0.0, g * g).unwrap()) < 1e-12);
        }
    }

    #[test]
    fn apply_s_examples() {
        for (z, want) in [(1.0, 1.0), (0.5, 0.25), (-1.0, 1.0)] {
            for backend in [SBackend::ClosedForm, SBackend::FullSolve] {
                let out = apply_s(&bloch(0.0, 0.0, z), backend).unwrap();
                assert!((out.bloch().unwrap().z - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn apply_s_ambiguous_at_plus() {
        for backend in [SBackend::ClosedForm, SBackend::FullSolve] {
            assert_eq!(apply_s(&bloch(1.0, 0.0, 0.0), backend), Err(Error::Ambiguous { multiplicity: 1 }));
            assert!(apply_s(&bloch(0.998, 0.0, 0.0), backend).is_ok());
        }
        let two = DensityMatrix::<f64>::maximally_mixed(2).unwrap();
        assert!(apply_s(&two, SBackend::ClosedForm).is_err());
    }

    #[test]
    fn apply_s_backends_agree_on_random_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let b: BlochVector<f64> = random_bloch(&mut rng);
            let rho = b.to_density();
            let a = apply_s(&rho, SBackend::ClosedForm).unwrap();
            let f = apply_s(&rho, SBackend::FullSolve).unwrap();
            assert!(a.max_abs_diff(&f) < 1e-9);
        }
    }

    #[test]
    fn nonlinearity_witness() {
        // CPHASE_SWAP is linear in z; the n_z² factor shows up in x
        let x_out = |n: (f64, f64, f64)| {
            evolve(Builtin::CphaseSwap, &bloch(n.0, n.1, n.2), Policy::MaxEntropy).rho_out.bloch().unwrap().x
        };
        let avg = (x_out((0.6, 0.0, 0.8)) + x_out((0.6, 0.0, -0.8))) / 2.0;
        assert!((avg - 0.384).abs() < 1e-12);
        assert!(x_out((0.6, 0.0, 0.0)).abs() < 1e-12);

        let z_out = |z: f64| evolve(Builtin::SGate, &bloch(0.0, 0.0, z), Policy::MaxEntropy).rho_out.bloch().unwrap().z;
        assert!(((z_out(1.0) + z_out(-1.0)) / 2.0 - z_out(0.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn temporal_origin_identity() {
        let u0 = example_circuit::<f64>(Builtin::CphaseSwap).unitary().unwrap();
        let id = Unitary::identity(1).unwrap();
        let r = temporal_origin_check(&u0, &id, &id, &bloch(0.1, 0.2, 0.3), QubitRegister::new(2, 1).unwrap())
            .unwrap();
        assert_eq!(r.deviation, 0.0);
    }

    #[test]
    fn temporal_origin_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let reg = QubitRegister::new(2, 1).unwrap();
        let u0 = example_circuit::<f64>(Builtin::CphaseSwap).unitary().unwrap();
        for _ in 0..10 {
            let v1 = random_unitary(1, &mut rng);
            let v2 = random_unitary(1, &mut rng);
            let rho_in = random_density(1, &mut rng);
            let r = temporal_origin_check(&u0, &v1, &v2, &rho_in, reg).unwrap();
            assert!(r.deviation <= 1e-10, "{r}");
            if !r.degenerate {
                assert!(r.basis_change_deviation <= 1e-9, "{r}");
            }
        }
    }
}

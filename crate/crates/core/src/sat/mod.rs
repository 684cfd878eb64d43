//! SAT with one CTC-assisted nonlinearity: an oracle query leaves an ancilla
//! with σ_z component `γ_0 = 1 − s/2^{n−1}`, and repeated applications of
//! the S map (`γ → γ²`) separate `s = 0` from `s ≥ 1` exponentially fast.

mod cnf;
mod oracle;
mod protocol;

pub use cnf::{count_satisfying, eval_cnf, parse_dimacs, parse_dimacs_with, CnfFormula, Strictness, MAX_BRUTE_FORCE_VARS};
pub use oracle::{build_oracle_unitary, gamma0, oracle_reduced_state, OracleBackend, MAX_ORACLE_VARS};
pub use protocol::{
    decision_rate, gamma_after, p_fail, protocol_unsat_rate, run_sat, Decision, SatMode, SatProtocol, SatRunResult,
    TrialStats,
};

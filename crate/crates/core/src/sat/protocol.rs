use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::cnf::{count_satisfying, CnfFormula, Evaluator};
use super::oracle::{oracle_reduced_state, OracleBackend, MAX_ORACLE_VARS};
use crate::engine::{apply_s, SBackend};
use crate::error::{Error, Result};
use crate::qstate::DensityMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Decision {
    Sat,
    Unsat,
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Decision::Sat => "SAT",
            Decision::Unsat => "UNSAT",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SatMode {
    /// Sample every σ_z measurement from the seeded generator.
    MonteCarlo,
    /// Report probabilities instead of sampling.
    Exact,
}

/// `γ_p = γ_0^{2^p}` with `γ_0 = 1 − s/2^{n−1}`, by repeated squaring.
pub fn gamma_after(p: u32, s: u64, n_vars: usize) -> f64 {
    let mut g = super::gamma0(s, n_vars);
    for _ in 0..p {
        if g == 0.0 || g == 1.0 {
            break;
        }
        g *= g;
    }
    g
}

/// Probability that `q` runs all measure `+1` on a satisfiable formula:
/// `((1 + γ_p)/2)^q`.
pub fn p_fail(p: u32, q: u32, s: u64, n_vars: usize) -> Result<f64> {
    if s == 0 {
        return Err(Error::InvalidArgument(
            "P_fail is undefined for s = 0: an unsatisfiable formula is never misreported".into(),
        ));
    }
    if n_vars < 64 && s == 1u64 << n_vars {
        return Err(Error::InvalidArgument(
            "P_fail is undefined for s = 2^n: every assignment satisfies and the pre-pass decides".into(),
        ));
    }
    Ok(fail_probability(gamma_after(p, s, n_vars), q))
}

fn fail_probability(gamma_p: f64, q: u32) -> f64 {
    ((1.0 + gamma_p) / 2.0).powi(q as i32)
}

/// Outcome of one execution of the protocol.
#[derive(Clone, Debug, PartialEq)]
pub struct SatRunResult {
    /// Final answer: the pre-pass or any `−1` measurement says SAT.
    pub decision: Decision,
    /// Answer of the `q` CTC runs alone, ignoring the pre-pass.
    pub protocol_decision: Decision,
    pub s_true: u64,
    pub n_vars: usize,
    /// `γ` before and after each S application (length `p + 1`).
    pub gamma_trace: Vec<f64>,
    /// `((1+γ_p)/2)^q` for `0 < s < 2^n`.
    pub p_fail_exact: Option<f64>,
    /// Probability that `decision` is UNSAT, pre-pass included.
    pub p_unsat: f64,
    /// Monte Carlo only: one entry per run.
    pub minus_one_seen: Vec<bool>,
    /// The random assignment tried before the runs satisfied `f`.
    pub prepass_satisfied: bool,
    pub seed: u64,
    pub p: u32,
    pub q: u32,
    /// One `U_f` preparation per run.
    pub oracle_queries: u64,
    pub mode: SatMode,
}

/// The deterministic part of the protocol for one formula and `p`: the
/// solution count and the amplified `γ` sequence. Runs are cheap to repeat.
#[derive(Clone, Debug)]
pub struct SatProtocol {
    formula: CnfFormula,
    s: u64,
    p: u32,
    gamma_trace: Vec<f64>,
}

impl SatProtocol {
    /// Count solutions, prepare `ρ_0` and apply S `p` times. When the
    /// formula is small enough the oracle is also simulated densely and S
    /// solved with the fixed-point engine, and both must agree.
    pub fn prepare(f: &CnfFormula, p: u32) -> Result<Self> {
        if p == 0 {
            return Err(Error::InvalidArgument("p must be at least 1".into()));
        }
        let s = count_satisfying(f)?;
        let rho0 = oracle_reduced_state(f, OracleBackend::ClosedForm)?;
        let cross_check = f.n_vars() <= MAX_ORACLE_VARS;
        if cross_check {
            let sim = oracle_reduced_state(f, OracleBackend::FullSim)?;
            let dev = sim.max_abs_diff(&rho0);
            if dev > 1e-12 {
                return Err(Error::Consistency(format!("oracle backends differ by {dev:e}")));
            }
        }
        let gamma_trace = amplify(&rho0, p, cross_check)?;
        Ok(Self { formula: f.clone(), s, p, gamma_trace })
    }

    /// A protocol with a prescribed `γ` sequence (used for perturbed runs).
    pub(crate) fn with_trace(f: &CnfFormula, s: u64, gamma_trace: Vec<f64>) -> Self {
        let p = (gamma_trace.len() - 1) as u32;
        Self { formula: f.clone(), s, p, gamma_trace }
    }

    pub fn formula(&self) -> &CnfFormula {
        &self.formula
    }

    pub fn s(&self) -> u64 {
        self.s
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn gamma_trace(&self) -> &[f64] {
        &self.gamma_trace
    }

    pub fn gamma_p(&self) -> f64 {
        *self.gamma_trace.last().expect("trace has p + 1 entries")
    }

    /// Probability that one run measures `−1`.
    pub fn p_minus_one(&self) -> f64 {
        (1.0 - self.gamma_p()) / 2.0
    }

    fn all_satisfy(&self) -> bool {
        let n = self.formula.n_vars();
        n < 64 && self.s == 1u64 << n
    }

    /// Execute the `q` runs. Run `r` draws from stream `r` of a generator
    /// seeded with `seed`; stream 0 picks the pre-pass assignment.
    pub fn run(&self, q: u32, seed: u64, mode: SatMode) -> Result<SatRunResult> {
        if q == 0 {
            return Err(Error::InvalidArgument("q must be at least 1".into()));
        }
        let n = self.formula.n_vars();
        let satisfiable_proper = self.s > 0 && !self.all_satisfy();
        let p_fail_exact = satisfiable_proper.then(|| fail_probability(self.gamma_p(), q));

        let mut prepass_rng = stream(seed, 0);
        let guess: u64 = if n >= 64 { prepass_rng.random() } else { prepass_rng.random_range(0..1u64 << n) };
        let prepass_satisfied = Evaluator::new(&self.formula).eval(guess);

        let prepass_miss = 1.0 - self.s as f64 / (n as f64).exp2();
        let p_unsat = match p_fail_exact {
            Some(pf) => prepass_miss * pf,
            None if self.s == 0 => 1.0,
            None => prepass_miss * fail_probability(self.gamma_p(), q),
        };

        let (protocol_decision, minus_one_seen) = match mode {
            SatMode::MonteCarlo => {
                let pm = self.p_minus_one();
                let seen: Vec<bool> = (1..=u64::from(q)).map(|r| stream(seed, r).random::<f64>() < pm).collect();
                let d = if seen.iter().any(|&b| b) { Decision::Sat } else { Decision::Unsat };
                (d, seen)
            }
            SatMode::Exact => {
                let protocol_unsat = fail_probability(self.gamma_p(), q);
                let d = if protocol_unsat >= 0.5 { Decision::Unsat } else { Decision::Sat };
                (d, Vec::new())
            }
        };
        let decision = match mode {
            SatMode::MonteCarlo if prepass_satisfied => Decision::Sat,
            SatMode::MonteCarlo => protocol_decision,
            SatMode::Exact if p_unsat > 0.5 => Decision::Unsat,
            SatMode::Exact => Decision::Sat,
        };
        Ok(SatRunResult {
            decision,
            protocol_decision,
            s_true: self.s,
            n_vars: n,
            gamma_trace: self.gamma_trace.clone(),
            p_fail_exact,
            p_unsat,
            minus_one_seen,
            prepass_satisfied,
            seed,
            p: self.p,
            q,
            oracle_queries: u64::from(q),
            mode,
        })
    }
}

fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Apply S `p` times starting from `rho0`, returning the σ_z trace.
fn amplify(rho0: &DensityMatrix<f64>, p: u32, cross_check: bool) -> Result<Vec<f64>> {
    let mut rho = rho0.clone();
    let mut trace = vec![rho.bloch()?.z];
    for k in 0..p {
        let b = rho.bloch()?;
        // the oracle output never has an x component, so S is always defined
        if b.x.abs() > 1e-9 {
            return Err(Error::Consistency(format!("state before S application {k} has n_x = {}", b.x)));
        }
        let next = apply_s(&rho, SBackend::ClosedForm)?;
        if cross_check {
            let full = apply_s(&rho, SBackend::FullSolve)?;
            let dev = full.max_abs_diff(&next);
            if dev > 1e-9 {
                return Err(Error::Consistency(format!("S backends differ by {dev:e} at step {k}")));
            }
        }
        rho = next;
        trace.push(rho.bloch()?.z);
    }
    Ok(trace)
}

/// Convenience wrapper: prepare and run once.
pub fn run_sat(f: &CnfFormula, p: u32, q: u32, seed: u64, mode: SatMode) -> Result<SatRunResult> {
    SatProtocol::prepare(f, p)?.run(q, seed, mode)
}

/// Count of events over independent trials, with a binomial error model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrialStats {
    pub trials: u64,
    pub events: u64,
    /// Closed-form event probability, if known.
    pub expected: Option<f64>,
}

impl TrialStats {
    pub fn rate(&self) -> f64 {
        self.events as f64 / self.trials as f64
    }

    /// Binomial standard deviation of the rate, from `expected` when known.
    pub fn sigma(&self) -> f64 {
        let p = self.expected.unwrap_or_else(|| self.rate());
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }

    /// Wilson score interval at `z` standard deviations.
    pub fn wilson_interval(&self, z: f64) -> (f64, f64) {
        let n = self.trials as f64;
        let r = self.rate();
        let denom = 1.0 + z * z / n;
        let centre = (r + z * z / (2.0 * n)) / denom;
        let half = z * (r * (1.0 - r) / n + z * z / (4.0 * n * n)).sqrt() / denom;
        ((centre - half).max(0.0), (centre + half).min(1.0))
    }

    /// `|rate − expected| ≤ k·σ`; a zero-variance expectation must be met exactly.
    pub fn within_sigmas(&self, k: f64) -> Option<bool> {
        let e = self.expected?;
        Some((self.rate() - e).abs() <= k * self.sigma())
    }
}

/// Repeat the protocol with seeds `seed, seed + 1, …` and count how often
/// the CTC runs answer UNSAT. For `0 < s < 2^n` the expectation is `P_fail`.
pub fn protocol_unsat_rate(protocol: &SatProtocol, q: u32, seed: u64, trials: u64) -> Result<TrialStats> {
    let mut events = 0;
    for t in 0..trials {
        let r = protocol.run(q, seed.wrapping_add(t), SatMode::MonteCarlo)?;
        if r.protocol_decision == Decision::Unsat {
            events += 1;
        }
    }
    let expected = if protocol.s == 0 { Some(1.0) } else { Some(fail_probability(protocol.gamma_p(), q)) };
    Ok(TrialStats { trials, events, expected })
}

/// Same loop, counting final decisions (pre-pass included) equal to `which`.
pub fn decision_rate(protocol: &SatProtocol, q: u32, seed: u64, trials: u64, which: Decision) -> Result<TrialStats> {
    let mut events = 0;
    let mut expected_unsat = 0.0;
    for t in 0..trials {
        let r = protocol.run(q, seed.wrapping_add(t), SatMode::MonteCarlo)?;
        expected_unsat = r.p_unsat;
        if r.decision == which {
            events += 1;
        }
    }
    let expected = Some(match which {
        Decision::Unsat => expected_unsat,
        Decision::Sat => 1.0 - expected_unsat,
    });
    Ok(TrialStats { trials, events, expected })
}

//! State-preparation noise: the `s = 0` ancilla arrives as
//! `½(I + (1 − μ)σ_z)` instead of `|0⟩⟨0|`, and p applications of S drive
//! its σ_z component to `(1 − μ)^{2^p}`.
//!
//! The interesting quantities are within `2^{-1000}` of 0 or 1, so they are
//! handled as logarithms throughout.

use std::f64::consts::LN_2;

use crate::error::{Error, Result};
use crate::sat::{count_satisfying, gamma0, CnfFormula, Decision, SatProtocol, SatRunResult, SatMode, TrialStats};

/// Perturbation `μ` and the constants of the threshold `μ > b / 2^{n^c}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseParams {
    pub mu: f64,
    pub b: f64,
    pub c: f64,
}

impl NoiseParams {
    pub fn new(mu: f64, b: f64, c: f64) -> Result<Self> {
        check_mu(mu)?;
        if !(b > 0.0 && b.is_finite()) || !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidArgument(format!("b and c must be positive, got b = {b}, c = {c}")));
        }
        Ok(Self { mu, b, c })
    }
}

fn check_mu(mu: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&mu) {
        return Err(Error::InvalidArgument(format!("mu must lie in [0, 1], got {mu}")));
    }
    Ok(())
}

/// `ln((1 − μ)^{2^p})`; `−∞` at `μ = 1`.
pub fn perturbed_log_gamma(mu: f64, p: u32) -> Result<f64> {
    check_mu(mu)?;
    if mu == 0.0 {
        return Ok(0.0);
    }
    Ok((p as f64).exp2() * (-mu).ln_1p())
}

/// `(1 − μ)^{2^p}`.
pub fn perturbed_gamma(mu: f64, p: u32) -> Result<f64> {
    perturbed_log_gamma(mu, p).map(f64::exp)
}

/// `ε = 2^{−n}`: the trace distance between the `s = 0` and `s = 1` oracle
/// outputs, `½(I + σ_z)` and `½(I + (1 − 2^{1−n})σ_z)`.
pub fn required_accuracy(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    Ok((-(n as f64)).exp2())
}

/// One sampled `μ` of [`bound_check`]. Margins are natural-log differences,
/// non-negative when the inequality holds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundSample {
    pub ln_mu: f64,
    /// `ln` of the ratio of the exponents `(2^n/(2^{n^c}+1)) / (−2^n ln(1−μ))`;
    /// stays representable where the difference would underflow.
    pub first_margin: f64,
    pub first_pass: bool,
    /// `−x − ln(1 − x)` with `x = 2^n / (2^{n^c} + 1)`.
    pub second_margin: f64,
    pub second_pass: bool,
    /// `log2(2^n μ / (1 − μ))`: the exponent of the lower bound
    /// `(1−μ)^{2^n} ≥ exp(−2^n μ/(1−μ))`, which holds for every μ.
    pub sound_exponent_log2: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub n: usize,
    pub b: f64,
    pub c: f64,
    pub samples: Vec<BoundSample>,
}

impl BoundReport {
    pub fn passed(&self) -> usize {
        self.samples.iter().filter(|s| s.first_pass && s.second_pass).count()
    }

    pub fn all_pass(&self) -> bool {
        self.passed() == self.samples.len()
    }

    pub fn worst_first_margin(&self) -> f64 {
        self.samples.iter().map(|s| s.first_margin).fold(f64::INFINITY, f64::min)
    }

    pub fn worst_second_margin(&self) -> f64 {
        self.samples.iter().map(|s| s.second_margin).fold(f64::INFINITY, f64::min)
    }
}

pub const DEFAULT_BOUND_SAMPLES: usize = 100;

/// Evaluate
/// `(1−μ)^{2^n} ≥ exp(−2^n/(2^{n^c}+1)) ≥ 1 − 2^n/(2^{n^c}+1)`
/// for `samples` values of μ spaced log-uniformly over
/// `(b/2^{n^c}, 2b/2^{n^c}]`, the last one at the right end.
pub fn bound_check(n: usize, b: f64, c: f64, samples: usize) -> Result<BoundReport> {
    if c.is_nan() || c <= 1.0 {
        return Err(Error::InvalidArgument(format!("bound_check requires c > 1, got c = {c}")));
    }
    if n < 2 {
        return Err(Error::InvalidArgument(format!("bound_check requires n >= 2, got n = {n}")));
    }
    if !(b > 0.0 && b.is_finite()) {
        return Err(Error::InvalidArgument(format!("b must be positive, got {b}")));
    }
    if samples == 0 {
        return Err(Error::InvalidArgument("at least one sample is needed".into()));
    }
    let nf = n as f64;
    let nc = nf.powf(c);
    // ln(2^{n^c} + 1) = n^c ln 2 + eps
    let eps = (-nc).exp2().ln_1p();
    let x_ln = nf * LN_2 - nc * LN_2 - eps;
    let x = x_ln.exp();
    let second_margin = if x >= 1.0 {
        f64::INFINITY
    } else if x < 1e-4 {
        x * x / 2.0 + x * x * x / 3.0
    } else {
        -x - (-x).ln_1p()
    };

    let out = (0..samples)
        .map(|k| {
            // μ = b t / 2^{n^c} with t = 2^{(k+1)/samples} ∈ (1, 2]
            let ln_bt = b.ln() + (k + 1) as f64 / samples as f64 * LN_2;
            let ln_mu = ln_bt - nc * LN_2;
            let mu = ln_mu.exp();
            // ln(−ln(1−μ)) = ln μ + kappa
            let kappa = if mu > 1e-4 { (-(-mu).ln_1p()).ln() - ln_mu } else { mu / 2.0 + 5.0 * mu * mu / 24.0 };
            // first inequality ⇔ ln μ + kappa ≤ −n^c ln 2 − eps
            let slack = -ln_bt;
            let first_margin = slack - eps - kappa;
            let first_pass = slack > eps + kappa;
            let sound_exponent_log2 = nf + ln_mu / LN_2 - (-mu).ln_1p() / LN_2;
            BoundSample {
                ln_mu,
                first_margin,
                first_pass,
                second_margin,
                second_pass: second_margin >= 0.0,
                sound_exponent_log2,
            }
        })
        .collect();
    Ok(BoundReport { n, b, c, samples: out })
}

/// Both sides of the threshold behaviour at `p = n` for one `n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dichotomy {
    pub n: usize,
    /// `ln γ_n` at `μ = 2^{−n/2}`; must be `≤ −2^{n/2}`.
    pub ln_gamma_noisy: f64,
    /// `ln γ_n` at `μ = 2^{−2n}`; must be `≥ ln(1 − 2^{−n})`.
    pub ln_gamma_quiet: f64,
}

impl Dichotomy {
    pub fn noisy_holds(&self) -> bool {
        self.ln_gamma_noisy <= -(self.n as f64 / 2.0).exp2()
    }

    pub fn quiet_holds(&self) -> bool {
        self.ln_gamma_quiet >= (-(-(self.n as f64)).exp2()).ln_1p()
    }
}

/// Evaluate `γ_n` at the two ends of the threshold; by monotonicity in μ the
/// bounds then hold for every `μ ≥ 2^{−n/2}` and every `μ ≤ 2^{−2n}`.
pub fn threshold_dichotomy(n: usize) -> Result<Dichotomy> {
    let p = u32::try_from(n).map_err(|_| Error::InvalidArgument("n too large".into()))?;
    Ok(Dichotomy {
        n,
        ln_gamma_noisy: perturbed_log_gamma((-(n as f64) / 2.0).exp2(), p)?,
        ln_gamma_quiet: perturbed_log_gamma((-2.0 * n as f64).exp2(), p)?,
    })
}

/// `γ` sequence for `γ_0 → (1 − μ)γ_0`, squared `p` times in log space.
fn perturbed_trace(g0: f64, mu: f64, p: u32) -> Vec<f64> {
    if g0 == 0.0 || mu == 1.0 {
        let mut t = vec![0.0; p as usize + 1];
        t[0] = g0 * (1.0 - mu);
        return t;
    }
    let ln0 = g0.abs().ln() + (-mu).ln_1p();
    (0..=p)
        .map(|k| {
            let v = ((k as f64).exp2() * ln0).exp();
            if k == 0 && g0 < 0.0 { -v } else { v }
        })
        .collect()
}

/// Protocol for `f` with the prepared state's σ_z component scaled by
/// `1 − μ`. With `μ = 0` this is exactly [`SatProtocol::prepare`].
pub fn perturbed_protocol(f: &CnfFormula, mu: f64, p: u32) -> Result<SatProtocol> {
    check_mu(mu)?;
    if mu == 0.0 {
        return SatProtocol::prepare(f, p);
    }
    if p == 0 {
        return Err(Error::InvalidArgument("p must be at least 1".into()));
    }
    let s = count_satisfying(f)?;
    Ok(SatProtocol::with_trace(f, s, perturbed_trace(gamma0(s, f.n_vars()), mu, p)))
}

/// One Monte Carlo execution of the perturbed protocol.
pub fn perturbed_run(f: &CnfFormula, mu: f64, p: u32, q: u32, seed: u64) -> Result<SatRunResult> {
    perturbed_protocol(f, mu, p)?.run(q, seed, SatMode::MonteCarlo)
}

/// Fraction of trials (seeds `seed + t`) in which an unsatisfiable formula
/// is reported SAT. The expectation is `1 − ((1 + γ_p)/2)^q`.
pub fn false_sat_rate(f: &CnfFormula, mu: f64, p: u32, q: u32, seed: u64, trials: u64) -> Result<TrialStats> {
    let proto = perturbed_protocol(f, mu, p)?;
    if proto.s() != 0 {
        return Err(Error::InvalidArgument("false-SAT rate needs an unsatisfiable formula".into()));
    }
    let mut events = 0;
    for t in 0..trials {
        if proto.run(q, seed.wrapping_add(t), SatMode::MonteCarlo)?.decision == Decision::Sat {
            events += 1;
        }
    }
    let expected = 1.0 - ((1.0 + proto.gamma_p()) / 2.0).powi(q as i32);
    Ok(TrialStats { trials, events, expected: Some(expected) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{trace_distance, BlochVector};
    use crate::sat::{parse_dimacs, run_sat};

    fn unsat(n: usize) -> CnfFormula {
        CnfFormula::new(n, vec![vec![1], vec![-1]]).unwrap()
    }

    #[test]
    fn perturbed_gamma_examples() {
        assert_eq!(perturbed_gamma(0.0, 7).unwrap(), 1.0);
        assert_eq!(perturbed_gamma(0.5, 1).unwrap(), 0.25);
        assert_eq!(perturbed_gamma(1.0, 3).unwrap(), 0.0);
        assert!(perturbed_gamma(1.5, 1).is_err());
        // μ = 2^-100, p = 10: the bound 1 − 2^10/(2^100 + 1), compared in logs
        let lg = perturbed_log_gamma((-100f64).exp2(), 10).unwrap();
        let bound = (-(10f64 - 100.0).exp2() / (1.0 + (-100f64).exp2())).ln_1p();
        assert!(lg >= bound);
        assert!(lg < 0.0);
    }

    #[test]
    fn perturbed_gamma_is_monotone() {
        let mus = [1e-6, 1e-3, 0.1, 0.5, 0.9];
        for p in 0..8 {
            for w in mus.windows(2) {
                assert!(perturbed_gamma(w[0], p).unwrap() > perturbed_gamma(w[1], p).unwrap());
            }
            assert!(perturbed_gamma(0.3, p).unwrap() > perturbed_gamma(0.3, p + 1).unwrap());
        }
    }

    #[test]
    fn required_accuracy_matches_trace_distance() {
        assert_eq!(required_accuracy(2).unwrap(), 0.25);
        assert_eq!(required_accuracy(1).unwrap(), 0.5);
        assert!(required_accuracy(0).is_err());
        let zero = BlochVector::new(0.0, 0.0, 1.0).unwrap().to_density();
        for n in 2..=8 {
            let one = BlochVector::new(0.0, 0.0, 1.0 - (1.0 - n as f64).exp2()).unwrap().to_density();
            let d = trace_distance(&zero, &one).unwrap();
            assert!((d - required_accuracy(n).unwrap()).abs() < 1e-15);
        }
    }

    #[test]
    fn bound_check_preconditions() {
        assert!(bound_check(10, 1.0, 1.0, 10).is_err());
        assert!(bound_check(1, 1.0, 2.0, 10).is_err());
        assert!(bound_check(4, 0.0, 2.0, 10).is_err());
        assert!(bound_check(4, 1.0, 2.0, 0).is_err());
    }

    #[test]
    fn bound_check_first_inequality() {
        // the first inequality needs μ ≤ 1/(2^{n^c} + 1), which the sampled
        // interval only reaches for b < 1
        let r = bound_check(10, 1.0, 2.0, 100).unwrap();
        assert_eq!(r.samples.len(), 100);
        assert!(r.samples.iter().all(|s| !s.first_pass && s.second_pass));
        let r = bound_check(10, 0.25, 2.0, 100).unwrap();
        assert!(r.all_pass());
        let r = bound_check(4, 0.5, 1.5, 100).unwrap();
        assert_eq!(r.passed(), 99);
        assert!(!r.samples[99].first_pass);
        assert!(r.worst_second_margin() > 0.0);
    }

    #[test]
    fn bound_check_matches_direct_evaluation() {
        // n = 3, c = 1.5: everything representable, so compare with plain f64
        let r = bound_check(3, 0.5, 1.5, 20).unwrap();
        let nc = 3f64.powf(1.5);
        for s in &r.samples {
            let mu = s.ln_mu.exp();
            let lhs = 8.0 * (-mu).ln_1p();
            let mid = -8.0 / (nc.exp2() + 1.0);
            assert_eq!(lhs >= mid, s.first_pass, "mu = {mu}");
            assert!(mid.exp() >= 1.0 + mid);
        }
    }

    #[test]
    fn dichotomy_holds() {
        for n in 4..=20 {
            let d = threshold_dichotomy(n).unwrap();
            assert!(d.noisy_holds() && d.quiet_holds(), "{d:?}");
        }
    }

    #[test]
    fn zero_mu_is_bitwise_run_sat() {
        let f = parse_dimacs("p cnf 3 2\n1 2 0\n-3 0").unwrap();
        for seed in 0..20 {
            assert_eq!(perturbed_run(&f, 0.0, 3, 4, seed).unwrap(), run_sat(&f, 3, 4, seed, SatMode::MonteCarlo).unwrap());
        }
    }

    #[test]
    fn perturbed_trace_signs_and_values() {
        let t = perturbed_trace(-0.5, 0.5, 2);
        assert_eq!(t.len(), 3);
        assert!((t[0] + 0.25).abs() < 1e-15);
        assert!((t[1] - 1.0 / 16.0).abs() < 1e-15);
        assert!((t[2] - 1.0 / 256.0).abs() < 1e-15);
    }

    #[test]
    fn false_sat_rates() {
        let f = unsat(3);
        let loud = false_sat_rate(&f, 0.5, 5, 10, 0, 2000).unwrap();
        assert!(loud.expected.unwrap() > 0.999);
        assert!(loud.within_sigmas(3.0).unwrap() || loud.events == loud.trials);
        let quiet = false_sat_rate(&f, (-20f64).exp2(), 5, 10, 0, 2000).unwrap();
        assert!(quiet.expected.unwrap() < 2e-4);
        assert!(quiet.rate() < 0.01);
        assert!(false_sat_rate(&parse_dimacs("p cnf 1 1\n1 0").unwrap(), 0.1, 2, 2, 0, 10).is_err());
    }
}

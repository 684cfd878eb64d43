use anyhow::{bail, Result};
use ctc_core::noise::{bound_check, perturbed_gamma, perturbed_log_gamma, required_accuracy, threshold_dichotomy};

use crate::table::{flag, num, Report, Table};

pub struct NoiseArgs {
    pub mu: Option<f64>,
    pub n: Option<usize>,
    pub p: Option<u32>,
    pub bound: Option<(f64, f64)>,
    pub samples: usize,
}

pub fn run(args: &NoiseArgs) -> Result<Report> {
    if args.mu.is_none() && args.n.is_none() && args.bound.is_none() {
        bail!("nothing to evaluate: give --mu, --n or --bound");
    }
    let mut report = Report::new();

    if let Some(mu) = args.mu {
        let p = match (args.p, args.n) {
            (Some(p), _) => p,
            (None, Some(n)) => u32::try_from(n)?,
            (None, None) => bail!("--mu needs --p (or --n, which sets p = n)"),
        };
        let mut t = Table::new("perturbed_gamma", &["mu", "p", "ln_gamma", "gamma"]);
        t.row(vec![num(mu), p.to_string(), num(perturbed_log_gamma(mu, p)?), num(perturbed_gamma(mu, p)?)]);
        report.push(t);
    }

    if let Some(n) = args.n {
        let d = threshold_dichotomy(n)?;
        report.push(Table::key_values(
            "threshold",
            vec![
                ("n", n.to_string()),
                ("required_accuracy", num(required_accuracy(n)?)),
                ("ln_gamma_at_mu_2^(-n/2)", num(d.ln_gamma_noisy)),
                ("noisy_bound_holds", flag(d.noisy_holds())),
                ("ln_gamma_at_mu_2^(-2n)", num(d.ln_gamma_quiet)),
                ("quiet_bound_holds", flag(d.quiet_holds())),
                // asymptotic, no constants: printed for reference only
                ("overhead_general", "n'(p(n),eps) = O(poly(log(p(n)/eps)) p(n))".to_string()),
                ("overhead_eps_2^-n", "O(log(p(n) 2^n) p(n))".to_string()),
                ("overhead_eps_2^-(n^c)", "O(log(p(n)) n^c p(n))".to_string()),
            ],
        ));
        report.checks_passed &= d.noisy_holds() && d.quiet_holds();
    }

    if let Some((b, c)) = args.bound {
        let Some(n) = args.n else { bail!("--bound needs --n") };
        let rep = bound_check(n, b, c, args.samples)?;
        let mut t = Table::new(
            "bound_check",
            &["sample", "ln_mu", "first_margin", "first_pass", "second_margin", "second_pass", "sound_exponent_log2"],
        );
        for (k, s) in rep.samples.iter().enumerate() {
            t.row(vec![
                k.to_string(),
                num(s.ln_mu),
                num(s.first_margin),
                flag(s.first_pass),
                num(s.second_margin),
                flag(s.second_pass),
                num(s.sound_exponent_log2),
            ]);
        }
        report.push(t);
        let total = rep.samples.len();
        let verdict = if rep.all_pass() {
            format!("all {total} samples pass")
        } else {
            format!("{} of {total} samples pass", rep.passed())
        };
        report.push(Table::key_values(
            "bound_summary",
            vec![
                ("n", n.to_string()),
                ("b", num(b)),
                ("c", num(c)),
                ("worst_first_margin", num(rep.worst_first_margin())),
                ("worst_second_margin", num(rep.worst_second_margin())),
                ("result", verdict),
            ],
        ));
        report.checks_passed &= rep.all_pass();
    }
    Ok(report)
}

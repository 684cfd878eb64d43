use anyhow::Result;
use ctc_core::sat::{
    decision_rate, parse_dimacs_with, protocol_unsat_rate, Decision, SatMode, SatProtocol, Strictness,
};

use crate::table::{flag, num, Report, Table};

pub struct SatArgs {
    pub p: Option<u32>,
    pub q: Option<u32>,
    pub seed: u64,
    pub mode: SatMode,
    pub trials: u64,
}

pub fn run(dimacs: &str, args: &SatArgs) -> Result<Report> {
    let (f, warnings) = parse_dimacs_with(dimacs, Strictness::Lenient)?;
    let n = f.n_vars();
    let default_pq = u32::try_from(n)?;
    let (p, q) = (args.p.unwrap_or(default_pq), args.q.unwrap_or(default_pq));
    let protocol = SatProtocol::prepare(&f, p)?;
    let r = protocol.run(q, args.seed, args.mode)?;
    let s = protocol.s();
    let all_satisfy = n < 64 && s == 1u64 << n;

    let p_fail = match r.p_fail_exact {
        Some(v) => num(v),
        None if s == 0 => "n/a (s=0)".to_string(),
        None => "n/a (s=2^n)".to_string(),
    };
    let mut report = Report::new();
    report.push(Table::key_values(
        "summary",
        vec![
            ("n_vars", n.to_string()),
            ("clauses", f.clauses().len().to_string()),
            ("s", s.to_string()),
            ("p", p.to_string()),
            ("q", q.to_string()),
            ("seed", args.seed.to_string()),
            ("mode", mode_name(args.mode).to_string()),
            ("gamma_p", num(protocol.gamma_p())),
            ("p_fail", p_fail),
            ("p_unsat", num(r.p_unsat)),
            ("prepass_satisfied", flag(r.prepass_satisfied)),
            ("protocol_decision", r.protocol_decision.to_string()),
            ("decision", r.decision.to_string()),
            ("oracle_queries", r.oracle_queries.to_string()),
        ],
    ));
    let mut trace = Table::new("gamma_trace", &["k", "gamma"]);
    for (k, g) in protocol.gamma_trace().iter().enumerate() {
        trace.row(vec![k.to_string(), num(*g)]);
    }
    report.push(trace);
    if !r.minus_one_seen.is_empty() {
        let mut runs = Table::new("runs", &["run", "measured_minus_one"]);
        for (i, seen) in r.minus_one_seen.iter().enumerate() {
            runs.row(vec![(i + 1).to_string(), flag(*seen)]);
        }
        report.push(runs);
    }

    if args.mode == SatMode::MonteCarlo && args.trials > 0 {
        // with s = 2^n the runs always answer UNSAT and only the pre-pass matters
        let (what, st) = if all_satisfy {
            ("decision_sat_rate", decision_rate(&protocol, q, args.seed, args.trials, Decision::Sat)?)
        } else {
            ("protocol_unsat_rate", protocol_unsat_rate(&protocol, q, args.seed, args.trials)?)
        };
        let expected = st.expected.unwrap_or(f64::NAN);
        let sigma = st.sigma();
        let within = st.within_sigmas(3.0).unwrap_or(false);
        let (w_lo, w_hi) = st.wilson_interval(3.0);
        let mut t = Table::new(
            "statistics",
            &[
                "statistic", "trials", "events", "rate", "expected", "sigma", "band3_low", "band3_high", "wilson3_low",
                "wilson3_high", "within_3sigma",
            ],
        );
        t.row(vec![
            what.to_string(),
            st.trials.to_string(),
            st.events.to_string(),
            num(st.rate()),
            num(expected),
            num(sigma),
            num(expected - 3.0 * sigma),
            num(expected + 3.0 * sigma),
            num(w_lo),
            num(w_hi),
            flag(within),
        ]);
        report.push(t);
        report.checks_passed = within;
    }
    report.warnings = warnings;
    Ok(report)
}

fn mode_name(m: SatMode) -> &'static str {
    match m {
        SatMode::MonteCarlo => "mc",
        SatMode::Exact => "exact",
    }
}

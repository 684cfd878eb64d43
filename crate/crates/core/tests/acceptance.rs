//! Acceptance checks, one line per criterion. Runs as a plain binary so every
//! verdict is printed even when an earlier one fails.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use ctc_core::circuits::{example_circuit, Builtin, QubitRegister};
use ctc_core::engine::{apply_s, ctc_evolve, temporal_origin_check, SBackend};
use ctc_core::noise::{bound_check, false_sat_rate, perturbed_run, threshold_dichotomy, DEFAULT_BOUND_SAMPLES};
use ctc_core::random::{random_bloch, random_density, random_unitary};
use ctc_core::sat::{
    count_satisfying, oracle_reduced_state, parse_dimacs, protocol_unsat_rate, CnfFormula, Decision, OracleBackend,
    SatMode, SatProtocol,
};
use ctc_core::{BlochVector, DensityMatrix, Error, Policy, Tolerances};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TRIALS: u64 = 10_000;

struct Verdict {
    id: &'static str,
    pass: bool,
    detail: String,
}

fn verdict(id: &'static str, pass: bool, detail: String) -> Verdict {
    println!("criterion {id}: {} {detail}", if pass { "PASS" } else { "FAIL" });
    Verdict { id, pass, detail }
}

fn bloch(x: f64, y: f64, z: f64) -> DensityMatrix {
    BlochVector::new(x, y, z).unwrap().to_density()
}

fn evolve(which: Builtin, rho_in: &DensityMatrix, policy: Policy) -> ctc_core::CtcResult {
    ctc_evolve(&example_circuit(which), rho_in, &policy, &Tolerances::default()).unwrap()
}

fn max3(a: &BlochVector, x: f64, y: f64, z: f64) -> f64 {
    (a.x - x).abs().max((a.y - y).abs()).max((a.z - z).abs())
}

fn criterion_1() -> Verdict {
    let start = Instant::now();
    let (mut points, mut worst_m, mut worst_out, mut bad_mult) = (0, 0.0f64, 0.0f64, 0);
    for i in 0..21 {
        for j in 0..21 {
            for k in 0..21 {
                let (nx, ny, nz) = (i as f64 / 10.0 - 1.0, j as f64 / 10.0 - 1.0, k as f64 / 10.0 - 1.0);
                if nx * nx + ny * ny + nz * nz > 1.0 + 1e-12 {
                    continue;
                }
                let Ok(b) = BlochVector::new(nx, ny, nz) else { continue };
                points += 1;
                let r = evolve(Builtin::CphaseSwap, &b.to_density(), Policy::MaxEntropy);
                if r.multiplicity != 0 {
                    bad_mult += 1;
                }
                worst_m = worst_m.max(max3(&r.rho_ctc.bloch().unwrap(), nx * nz, ny * nz, nz));
                worst_out = worst_out.max(max3(&r.rho_out.bloch().unwrap(), nz * nz * nx, nz * nz * ny, nz));
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = points > 0 && bad_mult == 0 && worst_m <= 1e-9 && worst_out <= 1e-9 && secs < 10.0;
    verdict(
        "1",
        pass,
        format!(
            "points={points} non_unique={bad_mult} max_dev_m={worst_m:.3e} max_dev_out={worst_out:.3e} runtime={secs:.2}s"
        ),
    )
}

fn crot_output(n: (f64, f64, f64), mz: f64) -> (f64, f64, f64) {
    (
        n.0 * (1.0 + mz) / 2.0 + n.1 * (-1.0 + mz) / 2.0,
        n.0 * (1.0 - mz) / 2.0 + n.1 * (1.0 + mz) / 2.0,
        n.2,
    )
}

fn criterion_2() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut worst, mut worst_dir, mut failures) = (0.0f64, 0.0f64, Vec::new());
    let mut samples = 0;
    while samples < 100 {
        let b: BlochVector = random_bloch(&mut rng);
        if (b.z - 1.0).abs() < 1e-6 {
            continue;
        }
        samples += 1;
        let mz: f64 = rng.random_range(-1.0..=1.0);
        let r = evolve(Builtin::Crot, &b.to_density(), Policy::Explicit(vec![mz]));
        if r.multiplicity != 1 {
            failures.push(format!("multiplicity {} at {b:?}", r.multiplicity));
            continue;
        }
        // direction must be a multiple of σz: diagonal, traceless
        let d = &r.fixed_points.directions()[0];
        let off = d[(0, 1)].norm().max(d[(1, 0)].norm()).max((d[(0, 0)] + d[(1, 1)]).norm());
        let scale = d[(0, 0)].re.abs();
        worst_dir = worst_dir.max(off / scale.max(f64::MIN_POSITIVE));
        let m = r.rho_ctc.bloch().unwrap();
        let (x, y, z) = crot_output((b.x, b.y, b.z), m.z);
        worst = worst.max(max3(&r.rho_out.bloch().unwrap(), x, y, z));
        worst = worst.max(max3(&m, 0.0, 0.0, mz));
    }
    let pole = evolve(Builtin::Crot, &bloch(0.0, 0.0, 1.0), Policy::MaxEntropy).multiplicity;
    let secs = start.elapsed().as_secs_f64();
    let pass = failures.is_empty() && worst <= 1e-9 && worst_dir <= 1e-9 && pole == 3 && secs < 5.0;
    verdict(
        "2",
        pass,
        format!(
            "samples={samples} bad={} max_dev={worst:.3e} direction_offaxis={worst_dir:.3e} pole_multiplicity={pole} runtime={secs:.2}s",
            failures.len()
        ),
    )
}

fn criterion_3() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    let mut errors = 0;
    for _ in 0..1000 {
        let b: BlochVector = random_bloch(&mut rng);
        let rho = b.to_density();
        match (apply_s(&rho, SBackend::ClosedForm), apply_s(&rho, SBackend::FullSolve)) {
            (Ok(a), Ok(f)) => worst = worst.max(a.max_abs_diff(&f)),
            _ => errors += 1,
        }
    }
    // n_x = 1 within 1e-9 must be ambiguous, anything visibly off it must not
    let mut wrong = Vec::new();
    for nx in [1.0, 1.0 - 1e-10, 1.0 - 5e-10, 1.0 - 1e-6, 1.0 - 1e-3, 0.5, 0.0, -1.0] {
        let rho = bloch(nx, 0.0, 0.0);
        let want = (nx - 1.0f64).abs() <= 1e-9;
        for backend in [SBackend::ClosedForm, SBackend::FullSolve] {
            let got = matches!(apply_s(&rho, backend), Err(Error::Ambiguous { .. }));
            if got != want {
                wrong.push(format!("{backend:?}@{nx}"));
            }
        }
    }
    let pass = errors == 0 && worst <= 1e-9 && wrong.is_empty();
    verdict("3", pass, format!("inputs=1000 errors={errors} max_dev={worst:.3e} ambiguity_mismatches={wrong:?}"))
}

fn fixture_dir(kind: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(kind)
}

fn load_fixtures(kind: &str) -> Vec<(String, String)> {
    let mut paths: Vec<PathBuf> = fs::read_dir(fixture_dir(kind))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "cnf"))
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read_to_string(&p).unwrap()))
        .collect()
}

fn header_count(text: &str) -> Option<u64> {
    text.lines().find_map(|l| l.strip_prefix("c satisfying assignments:")).map(|v| v.trim().parse().unwrap())
}

/// Independent truth-table count straight from the clause list.
fn naive_count(f: &CnfFormula) -> u64 {
    let n = f.n_vars();
    (0..1u64 << n)
        .filter(|&i| {
            f.clauses().iter().all(|c| {
                c.iter().any(|&lit| {
                    let bit = (i >> (n - lit.unsigned_abs() as usize)) & 1 == 1;
                    if lit > 0 { bit } else { !bit }
                })
            })
        })
        .count() as u64
}

fn random_formula(rng: &mut ChaCha8Rng) -> CnfFormula {
    let n = rng.random_range(1..=6usize);
    let m = rng.random_range(0..=3 * n);
    let clauses = (0..m)
        .map(|_| {
            let w = rng.random_range(1..=3.min(n));
            (0..w)
                .map(|_| {
                    let v = rng.random_range(1..=n) as i32;
                    if rng.random::<bool>() { v } else { -v }
                })
                .collect()
        })
        .collect();
    CnfFormula::new(n, clauses).unwrap()
}

fn criterion_4() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut corpus: Vec<CnfFormula> = (0..240).map(|_| random_formula(&mut rng)).collect();
    let fixtures = load_fixtures("sat");
    corpus.extend(
        fixtures
            .iter()
            .chain(load_fixtures("unsat").iter())
            .map(|(_, t)| parse_dimacs(t).unwrap())
            .filter(|f| f.n_vars() <= 6),
    );
    let mut worst_backend = 0.0f64;
    let mut worst_gamma = 0.0f64;
    let mut count_mismatch = 0;
    for f in &corpus {
        let a = oracle_reduced_state(f, OracleBackend::ClosedForm).unwrap();
        let b = oracle_reduced_state(f, OracleBackend::FullSim).unwrap();
        worst_backend = worst_backend.max(a.max_abs_diff(&b));
        let s = naive_count(f);
        if count_satisfying(f).unwrap() != s {
            count_mismatch += 1;
        }
        let g0 = 1.0 - s as f64 / (f.n_vars() as f64 - 1.0).exp2();
        worst_gamma = worst_gamma.max((b.bloch().unwrap().z - g0).abs());
    }

    let mut stats_fail = Vec::new();
    let mut lines = Vec::new();
    for (i, (name, text)) in fixtures.iter().enumerate() {
        let f = parse_dimacs(text).unwrap();
        let s = count_satisfying(&f).unwrap();
        if Some(s) != header_count(text) || s != naive_count(&f) || s == 0 {
            stats_fail.push(format!("{name}: count {s} vs header {:?}", header_count(text)));
            continue;
        }
        let n = f.n_vars() as u32;
        let (p, q) = (n, n);
        let mut g = 1.0 - s as f64 / (n as f64 - 1.0).exp2();
        for _ in 0..p {
            g *= g;
        }
        let expected = ((1.0 + g) / 2.0).powi(q as i32);
        let proto = SatProtocol::prepare(&f, p).unwrap();
        let st = protocol_unsat_rate(&proto, q, 0x5eed + i as u64 * TRIALS, TRIALS).unwrap();
        let sigma = (expected * (1.0 - expected) / TRIALS as f64).sqrt();
        let ok = (st.rate() - expected).abs() <= 3.0 * sigma;
        lines.push(format!("{name}:s={s},P_fail={expected:.4e},rate={:.4e}", st.rate()));
        if !ok {
            stats_fail.push(format!("{name}: rate {} vs {expected} (sigma {sigma:.3e})", st.rate()));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = corpus.len() >= 200
        && worst_backend <= 1e-12
        && worst_gamma <= 1e-12
        && count_mismatch == 0
        && fixtures.len() == 20
        && stats_fail.is_empty()
        && secs < 60.0;
    for l in &lines {
        println!("    {l}");
    }
    verdict(
        "4",
        pass,
        format!(
            "corpus={} backend_dev={worst_backend:.3e} gamma0_dev={worst_gamma:.3e} count_mismatch={count_mismatch} fixtures={} stat_failures={stats_fail:?} runtime={secs:.2}s",
            corpus.len(),
            fixtures.len()
        ),
    )
}

fn criterion_5() -> Verdict {
    let fixtures = load_fixtures("unsat");
    let mut wrong = Vec::new();
    for (name, text) in &fixtures {
        let f = parse_dimacs(text).unwrap();
        if naive_count(&f) != 0 {
            wrong.push(format!("{name}: satisfiable"));
            continue;
        }
        let n = f.n_vars() as u32;
        let proto = SatProtocol::prepare(&f, n).unwrap();
        let sat = (0..TRIALS)
            .filter(|&t| proto.run(n, 77 + t, SatMode::MonteCarlo).unwrap().decision != Decision::Unsat)
            .count();
        if sat > 0 {
            wrong.push(format!("{name}: {sat} SAT answers"));
        }
    }
    let pass = fixtures.len() == 20 && wrong.is_empty();
    verdict("5", pass, format!("fixtures={} trials_each={TRIALS} wrong={wrong:?}", fixtures.len()))
}

fn criterion_6() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut instances, mut skipped, mut worst_dev, mut worst_basis) = (0, 0, 0.0f64, 0.0f64);
    while instances < 500 {
        let n_total = rng.random_range(2..=3usize);
        let l = rng.random_range(1..n_total);
        let reg = QubitRegister::new(n_total, l).unwrap();
        let u0 = random_unitary(n_total, &mut rng);
        let v1 = random_unitary(l, &mut rng);
        let v2 = random_unitary(l, &mut rng);
        let rho_in = random_density(n_total - l, &mut rng);
        let r = temporal_origin_check(&u0, &v1, &v2, &rho_in, reg).unwrap();
        if r.degenerate {
            skipped += 1;
            continue;
        }
        instances += 1;
        worst_dev = worst_dev.max(r.deviation);
        worst_basis = worst_basis.max(r.basis_change_deviation);
    }
    let pass = worst_dev <= 1e-10 && worst_basis <= 1e-9;
    verdict(
        "6",
        pass,
        format!("instances={instances} skipped_degenerate={skipped} max_dev={worst_dev:.3e} max_basis_change_dev={worst_basis:.3e}"),
    )
}

fn criterion_7_bounds() -> Verdict {
    let (mut total, mut first_fail, mut second_fail, mut groups) = (0, 0, 0, Vec::new());
    for b in [0.5, 1.0, 2.0] {
        for c in [1.5, 2.0, 3.0] {
            let (mut passed, mut count, mut worst1, mut worst2) = (0, 0, f64::INFINITY, f64::INFINITY);
            for n in 4..=20 {
                let rep = bound_check(n, b, c, DEFAULT_BOUND_SAMPLES).unwrap();
                for s in &rep.samples {
                    count += 1;
                    first_fail += usize::from(!s.first_pass);
                    second_fail += usize::from(!s.second_pass);
                    passed += usize::from(s.first_pass && s.second_pass);
                }
                worst1 = worst1.min(rep.worst_first_margin());
                worst2 = worst2.min(rep.worst_second_margin());
            }
            total += count;
            groups.push(format!("b={b},c={c}:{passed}/{count} (first_margin_min={worst1:.3e}, second_margin_min={worst2:.3e})"));
        }
    }
    for g in &groups {
        println!("    {g}");
    }
    let pass = first_fail == 0 && second_fail == 0;
    verdict("7a", pass, format!("bound samples={total} first_ineq_failures={first_fail} second_ineq_failures={second_fail}"))
}

fn criterion_7_dichotomy() -> Verdict {
    let mut bad = Vec::new();
    for n in 4..=12usize {
        let d = threshold_dichotomy(n).unwrap();
        if !d.noisy_holds() || !d.quiet_holds() {
            bad.push(format!("n={n}: closed form {d:?}"));
        }
        // unsatisfiable formula on n variables
        let f = CnfFormula::new(n, vec![vec![1], vec![-1]]).unwrap();
        let p = n as u32;
        let noisy_mu = (-(n as f64) / 2.0).exp2();
        let quiet_mu = (-2.0 * n as f64).exp2();
        let noisy = perturbed_run(&f, noisy_mu, p, p, 1).unwrap();
        let quiet = perturbed_run(&f, quiet_mu, p, p, 1).unwrap();
        let g_noisy = *noisy.gamma_trace.last().unwrap();
        let g_quiet = *quiet.gamma_trace.last().unwrap();
        if g_noisy > (-(n as f64 / 2.0).exp2()).exp() || g_quiet < 1.0 - (-(n as f64)).exp2() {
            bad.push(format!("n={n}: traced gamma_n noisy={g_noisy:e} quiet={g_quiet}"));
        }
        // Monte Carlo false-SAT rates on both sides of the threshold
        for (mu, gp) in [(noisy_mu, g_noisy), (quiet_mu, g_quiet)] {
            let st = false_sat_rate(&f, mu, p, p, 1000 * n as u64, 2000).unwrap();
            let expected = 1.0 - ((1.0 + gp) / 2.0).powi(p as i32);
            let sigma = (expected * (1.0 - expected) / 2000.0).sqrt();
            if (st.rate() - expected).abs() > 3.0 * sigma.max(1.0 / 2000.0) {
                bad.push(format!("n={n} mu={mu:e}: false-SAT rate {} vs {expected}", st.rate()));
            }
        }
    }
    verdict("7b", bad.is_empty(), format!("n=4..=12 dichotomy violations={bad:?}"))
}

fn criterion_8() -> Verdict {
    let z = |nz: f64| evolve(Builtin::CphaseSwap, &bloch(0.0, 0.0, nz), Policy::MaxEntropy).rho_out.bloch().unwrap().z;
    let literal = ((z(1.0) + z(-1.0)) / 2.0 - z(0.0)).abs();
    // informational: the largest violation CPHASE_SWAP shows in any component,
    // and the z violation of the S map for the same pair of inputs
    let out = |n: (f64, f64, f64)| evolve(Builtin::CphaseSwap, &bloch(n.0, n.1, n.2), Policy::MaxEntropy).rho_out;
    let mut best_x = 0.0f64;
    for k in 0..=200 {
        let t = k as f64 / 200.0 * std::f64::consts::FRAC_PI_2;
        let (nx, nz) = (t.cos(), t.sin());
        let avg = (out((nx, 0.0, nz)).bloch().unwrap().x + out((nx, 0.0, -nz)).bloch().unwrap().x) / 2.0;
        best_x = best_x.max((avg - out((nx, 0.0, 0.0)).bloch().unwrap().x).abs());
    }
    let sz = |nz: f64| evolve(Builtin::SGate, &bloch(0.0, 0.0, nz), Policy::MaxEntropy).rho_out.bloch().unwrap().z;
    let s_violation = ((sz(1.0) + sz(-1.0)) / 2.0 - sz(0.0)).abs();
    println!("    info: CPHASE_SWAP max x-component violation over n=(cos t,0,±sin t): {best_x:.6}");
    println!("    info: S_GATE z-component violation for n_z=±1 vs mixture: {s_violation:.6}");
    verdict("8", literal >= 0.5, format!("CPHASE_SWAP z-component violation for n_z=±1 mixture: {literal:.6e} (need >= 0.5)"))
}

fn main() -> ExitCode {
    let verdicts = [
        criterion_1(),
        criterion_2(),
        criterion_3(),
        criterion_4(),
        criterion_5(),
        criterion_6(),
        criterion_7_bounds(),
        criterion_7_dichotomy(),
        criterion_8(),
    ];
    let failed: Vec<&Verdict> = verdicts.iter().filter(|v| !v.pass).collect();
    println!("acceptance: {} passed, {} failed", verdicts.len() - failed.len(), failed.len());
    for v in &failed {
        println!("  failed criterion {}: {}", v.id, v.detail);
    }
    if failed.is_empty() { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}

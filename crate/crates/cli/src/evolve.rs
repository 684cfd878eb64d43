use anyhow::Result;
use ctc_core::engine::ctc_evolve;
use ctc_core::{CMatrix, CtcCircuit, DensityMatrix, Policy, Tolerances};

use crate::table::{flag, num, val, Report, Table};

fn matrix_table(title: &str, m: &CMatrix<f64>) -> Table {
    let mut t = Table::new(title, &["row", "col", "re", "im"]);
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            t.row(vec![i.to_string(), j.to_string(), val(m[(i, j)].re), val(m[(i, j)].im)]);
        }
    }
    t
}

fn bloch_row(t: &mut Table, name: &str, rho: &DensityMatrix) -> Result<()> {
    if rho.n_qubits() == 1 {
        let b = rho.bloch()?;
        t.row(vec![name.to_string(), val(b.x), val(b.y), val(b.z)]);
    }
    Ok(())
}

/// Solve the circuit; `full` adds the whole fixed-point set.
pub fn run(circuit: &CtcCircuit, rho_in: &DensityMatrix, policy: &Policy, tol: &Tolerances, full: bool) -> Result<Report> {
    let r = ctc_evolve(circuit, rho_in, policy, tol)?;
    let reg = circuit.register();
    let mut report = Report::new();
    report.push(Table::key_values(
        "summary",
        vec![
            ("qubits", reg.n_total().to_string()),
            ("ctc_qubits", reg.n_ctc().to_string()),
            ("policy", r.policy_used.to_string()),
            ("multiplicity", r.multiplicity.to_string()),
            ("output_ambiguous", flag(r.output_ambiguous)),
            ("ctc_entropy", val(r.rho_ctc.entropy())),
        ],
    ));
    let mut bloch = Table::new("bloch", &["state", "x", "y", "z"]);
    bloch_row(&mut bloch, "rho_in", rho_in)?;
    bloch_row(&mut bloch, "rho_ctc", &r.rho_ctc)?;
    bloch_row(&mut bloch, "rho_out", &r.rho_out)?;
    report.push(bloch);
    report.push(matrix_table("rho_out", r.rho_out.matrix()));
    report.push(matrix_table("rho_ctc", r.rho_ctc.matrix()));

    if full {
        let set = &r.fixed_points;
        report.push(matrix_table("fixed_point_base", set.base().matrix()));
        let mut dirs = Table::new("fixed_point_directions", &["direction", "row", "col", "re", "im"]);
        let mut bounds = Table::new("box_bounds", &["direction", "lower", "upper"]);
        for (k, (d, &(lo, hi))) in set.directions().iter().zip(set.box_bounds()).enumerate() {
            for i in 0..d.nrows() {
                for j in 0..d.ncols() {
                    dirs.row(vec![k.to_string(), i.to_string(), j.to_string(), val(d[(i, j)].re), val(d[(i, j)].im)]);
                }
            }
            bounds.row(vec![k.to_string(), num(lo), num(hi)]);
        }
        report.push(dirs);
        report.push(bounds);
        let residual = set.residual(&vec![0.0; set.multiplicity()])?;
        report.push(Table::key_values("fixed_point_check", vec![("base_residual", num(residual))]));
    }
    Ok(report)
}

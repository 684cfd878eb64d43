use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use ctc_core::circuits::{parse_circuit, parse_complex, Builtin};
use ctc_core::{BlochVector, CMatrix, CtcCircuit, DensityMatrix};

/// Parse a `--rho-in` specification:
/// `bloch <nx> <ny> <nz>`, `basis <bits>` or `file <path>`.
pub fn parse_rho_in(words: &[String]) -> Result<DensityMatrix> {
    let spec = words.join(" ");
    let spec = spec.trim();
    // a path may contain spaces, so take it verbatim
    if let Some(path) = spec.strip_prefix("file").filter(|r| r.starts_with(char::is_whitespace)) {
        return read_matrix_file(Path::new(path.trim()));
    }
    let parts: Vec<&str> = spec.split_whitespace().collect();
    match parts.as_slice() {
        ["bloch", x, y, z] => {
            let coord = |s: &str| s.parse::<f64>().with_context(|| format!("invalid Bloch component '{s}'"));
            Ok(BlochVector::new(coord(x)?, coord(y)?, coord(z)?)?.to_density())
        }
        ["basis", bits] => Ok(DensityMatrix::from_bitstring(bits)?),
        [] => bail!("empty --rho-in specification"),
        _ => bail!("unrecognized --rho-in '{spec}': expected 'bloch <nx> <ny> <nz>', 'basis <bits>' or 'file <path>'"),
    }
}

/// Row-major complex entries, whitespace separated, `#` comments allowed.
fn read_matrix_file(path: &Path) -> Result<DensityMatrix> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let mut entries = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let content = line.split('#').next().unwrap_or("");
        for tok in content.split_whitespace() {
            let z = parse_complex::<f64>(tok)
                .with_context(|| format!("{}: line {}: invalid matrix entry '{tok}'", path.display(), idx + 1))?;
            entries.push(z);
        }
    }
    let d = (entries.len() as f64).sqrt().round() as usize;
    if d * d != entries.len() || d == 0 {
        bail!("{}: {} entries do not form a square matrix", path.display(), entries.len());
    }
    let m = CMatrix::from_row_slice(d, d, &entries);
    DensityMatrix::new(m).with_context(|| format!("{} is not a density matrix", path.display()))
}

pub fn load_circuit(path: Option<&Path>, builtin: Option<&str>) -> Result<CtcCircuit> {
    match (path, builtin) {
        (Some(p), _) => {
            let text = fs::read_to_string(p).with_context(|| format!("cannot read {}", p.display()))?;
            parse_circuit(&text).with_context(|| format!("in circuit file {}", p.display()))
        }
        (None, Some(name)) => Ok(name.parse::<Builtin>()?.circuit()),
        (None, None) => bail!("either --circuit or --builtin is required"),
    }
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn words(s: &str) -> Vec<String> {
        vec![s.to_string()]
    }

    #[test]
    fn rho_in_forms() {
        let r = parse_rho_in(&words("bloch 0 0 1")).unwrap();
        assert!((r.matrix()[(0, 0)].re - 1.0).abs() < 1e-15);
        let split: Vec<String> = ["bloch", "0.5", "-0.5", "0"].iter().map(|s| s.to_string()).collect();
        assert!(parse_rho_in(&split).is_ok());
        assert_eq!(parse_rho_in(&words("basis 10")).unwrap().n_qubits(), 2);
        assert!(parse_rho_in(&words("bloch 1 1 1")).is_err());
        assert!(parse_rho_in(&words("pure 0")).is_err());
        assert!(parse_rho_in(&words("file /nonexistent/rho.txt")).is_err());
    }

    #[test]
    fn matrix_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("rho.txt");
        fs::write(&p, "# |+><+|\n0.5 0.5\n0.5 0.5+0j\n").unwrap();
        let r = parse_rho_in(&words(&format!("file {}", p.display()))).unwrap();
        assert!((r.matrix()[(0, 1)].re - 0.5).abs() < 1e-15);
        fs::write(&p, "1 0 0\n").unwrap();
        assert!(parse_rho_in(&words(&format!("file {}", p.display()))).is_err());
    }
}

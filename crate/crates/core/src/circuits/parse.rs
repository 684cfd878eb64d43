//! Line-oriented circuit text format.
//!
//! ```text
//! qubits 2 ctc 1          # header, must come first
//! gate CPHASE 0 1
//! gate PHASE(0.25) 0
//! raw 1 1  0+0j 1+0j 1+0j 0+0j
//! ```
//!
//! `#` starts a comment and blank lines are ignored. Raw entries are
//! row-major `re+imj` literals.

use std::fmt::Write as _;

use nalgebra::Complex;

use super::{CtcCircuit, Gate, GateKind, QubitRegister};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::scalar::{Real, C};

fn err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

fn parse_real<T: Real>(tok: &str, line: usize) -> Result<T> {
    tok.parse::<T>()
        .map_err(|_| err(line, format!("invalid number '{tok}'")))
        .and_then(|v| {
            if v.is_finite() {
                Ok(v)
            } else {
                Err(err(line, format!("non-finite number '{tok}'")))
            }
        })
}

/// Parse a complex literal: `re+imj`, `re-imj`, `imj` or plain `re`.
pub fn parse_complex<T: Real>(tok: &str) -> Option<C<T>> {
    let parse = |s: &str| s.parse::<T>().ok().filter(|v| v.is_finite());
    let Some(body) = tok.strip_suffix('j') else {
        return parse(tok).map(|re| Complex::new(re, T::zero()));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    match split {
        Some(k) => Some(Complex::new(parse(&body[..k])?, parse(&body[k..])?)),
        None => Some(Complex::new(T::zero(), parse(body)?)),
    }
}

fn format_complex<T: Real>(z: &C<T>) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{}{}{}j", z.re, sign, z.im.abs())
}

fn parse_label(tok: &str, reg: &QubitRegister, line: usize) -> Result<usize> {
    let q: usize = tok
        .parse()
        .map_err(|_| err(line, format!("invalid qubit label '{tok}'")))?;
    if q >= reg.n_total() {
        return Err(err(
            line,
            format!("qubit label {q} out of range for a {}-qubit register", reg.n_total()),
        ));
    }
    Ok(q)
}

fn parse_header(tokens: &[&str], line: usize) -> Result<QubitRegister> {
    match tokens {
        ["qubits", n, "ctc", l] => {
            let n: usize = n.parse().map_err(|_| err(line, format!("invalid qubit count '{n}'")))?;
            let l: usize = l.parse().map_err(|_| err(line, format!("invalid CTC count '{l}'")))?;
            QubitRegister::new(n, l).map_err(|e| err(line, e.to_string()))
        }
        _ => Err(err(line, "missing header: expected 'qubits <n_total> ctc <n_ctc>'")),
    }
}

fn parse_gate_line<T: Real>(tokens: &[&str], reg: &QubitRegister, line: usize) -> Result<Gate<T>> {
    let name = tokens
        .first()
        .ok_or_else(|| err(line, "'gate' needs a gate name"))?;
    let kind = if let Some(arg) = name.strip_prefix("PHASE(").and_then(|r| r.strip_suffix(')')) {
        GateKind::Phase(parse_real(arg, line)?)
    } else {
        GateKind::from_name(name).ok_or_else(|| err(line, format!("unknown gate '{name}'")))?
    };
    let labels = tokens[1..]
        .iter()
        .map(|t| parse_label(t, reg, line))
        .collect::<Result<Vec<_>>>()?;
    let arity = kind.arity().expect("named gate");
    if labels.len() != arity {
        return Err(err(
            line,
            format!("{name} takes {arity} qubit label(s), got {}", labels.len()),
        ));
    }
    Gate::new(kind, labels).map_err(|e| err(line, e.to_string()))
}

fn parse_raw_line<T: Real>(tokens: &[&str], reg: &QubitRegister, line: usize) -> Result<Gate<T>> {
    let k: usize = tokens
        .first()
        .ok_or_else(|| err(line, "'raw' needs a qubit count"))?
        .parse()
        .map_err(|_| err(line, "invalid raw gate qubit count"))?;
    if !(1..=3).contains(&k) {
        return Err(err(line, format!("raw gates act on 1 to 3 qubits, got {k}")));
    }
    let d = 1usize << k;
    if tokens.len() != 1 + k + d * d {
        return Err(err(
            line,
            format!(
                "raw gate on {k} qubit(s) needs {k} labels and {} entries, got {} tokens",
                d * d,
                tokens.len() - 1
            ),
        ));
    }
    let labels = tokens[1..=k]
        .iter()
        .map(|t| parse_label(t, reg, line))
        .collect::<Result<Vec<_>>>()?;
    let entries = tokens[1 + k..]
        .iter()
        .map(|t| parse_complex::<T>(t).ok_or_else(|| err(line, format!("invalid complex literal '{t}'"))))
        .collect::<Result<Vec<_>>>()?;
    let m = CMatrix::from_row_slice(d, d, &entries);
    Gate::raw(m, labels).map_err(|e| err(line, e.to_string()))
}

/// Parse a circuit file. Errors carry 1-based line numbers.
pub fn parse_circuit<T: Real>(text: &str) -> Result<CtcCircuit<T>> {
    let mut circuit: Option<CtcCircuit<T>> = None;
    let mut last_line = 0;
    for (idx, raw_line) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let content = raw_line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = content.split_whitespace().collect();
        let Some(c) = circuit.as_mut() else {
            circuit = Some(CtcCircuit::empty(parse_header(&tokens, line)?));
            continue;
        };
        let reg = c.register();
        let gate = match tokens[0] {
            "gate" => parse_gate_line(&tokens[1..], &reg, line)?,
            "raw" => parse_raw_line(&tokens[1..], &reg, line)?,
            "qubits" => return Err(err(line, "duplicate header")),
            other => return Err(err(line, format!("unknown directive '{other}'"))),
        };
        c.push(gate).map_err(|e| err(line, e.to_string()))?;
    }
    circuit.ok_or_else(|| err(last_line.max(1), "missing header: expected 'qubits <n_total> ctc <n_ctc>'"))
}

/// Inverse of [`parse_circuit`]; numbers use the shortest round-trip form.
pub fn serialize_circuit<T: Real>(c: &CtcCircuit<T>) -> String {
    let reg = c.register();
    let mut out = format!("qubits {} ctc {}\n", reg.n_total(), reg.n_ctc());
    for g in c.gates() {
        let labels: Vec<String> = g.targets().iter().map(|t| t.to_string()).collect();
        match g.kind() {
            GateKind::Raw => {
                let m = g.matrix().matrix();
                let entries: Vec<String> = (0..m.nrows())
                    .flat_map(|r| (0..m.ncols()).map(move |col| (r, col)))
                    .map(|(r, col)| format_complex(&m[(r, col)]))
                    .collect();
                let _ = writeln!(
                    out,
                    "raw {} {} {}",
                    g.targets().len(),
                    labels.join(" "),
                    entries.join(" ")
                );
            }
            kind => {
                let _ = writeln!(out, "gate {kind} {}", labels.join(" "));
            }
        }
    }
    out
}

use std::fmt;

use crate::error::{Error, Result};

/// Largest formula [`count_satisfying`] will enumerate.
pub const MAX_BRUTE_FORCE_VARS: usize = 24;

/// Conjunction of clauses over variables `1..=n_vars`; a literal `-k` is the
/// negation of variable `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CnfFormula {
    n_vars: usize,
    clauses: Vec<Vec<i32>>,
}

impl CnfFormula {
    pub fn new(n_vars: usize, clauses: Vec<Vec<i32>>) -> Result<Self> {
        if n_vars == 0 {
            return Err(Error::InvalidArgument("a formula needs at least one variable".into()));
        }
        for (k, clause) in clauses.iter().enumerate() {
            if clause.is_empty() {
                return Err(Error::InvalidArgument(format!("clause {} is empty", k + 1)));
            }
            if let Some(&lit) = clause.iter().find(|&&l| l == 0 || l.unsigned_abs() as usize > n_vars) {
                return Err(Error::InvalidArgument(format!(
                    "literal {lit} in clause {} is out of range 1..={n_vars}",
                    k + 1
                )));
            }
        }
        Ok(Self { n_vars, clauses })
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn clauses(&self) -> &[Vec<i32>] {
        &self.clauses
    }

    /// Assignment for index `i`, variable 1 being the most significant bit.
    pub fn assignment_of(&self, index: u64) -> Vec<bool> {
        (0..self.n_vars).map(|k| (index >> (self.n_vars - 1 - k)) & 1 == 1).collect()
    }

    /// Per-clause masks over the assignment index: `(positive, negative)`.
    fn masks(&self) -> Vec<(u64, u64)> {
        self.clauses
            .iter()
            .map(|clause| {
                clause.iter().fold((0u64, 0u64), |(pos, neg), &lit| {
                    let bit = 1u64 << (self.n_vars - lit.unsigned_abs() as usize);
                    if lit > 0 { (pos | bit, neg) } else { (pos, neg | bit) }
                })
            })
            .collect()
    }
}

impl fmt::Display for CnfFormula {
    /// DIMACS text.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "p cnf {} {}", self.n_vars, self.clauses.len())?;
        for clause in &self.clauses {
            for lit in clause {
                write!(f, "{lit} ")?;
            }
            writeln!(f, "0")?;
        }
        Ok(())
    }
}

/// How [`parse_dimacs_with`] treats recoverable irregularities.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Strictness {
    /// Clause-count mismatches and a missing final `0` become warnings.
    #[default]
    Lenient,
    /// Every irregularity is an error.
    Strict,
}

/// Parse DIMACS CNF, discarding warnings.
pub fn parse_dimacs(text: &str) -> Result<CnfFormula> {
    parse_dimacs_with(text, Strictness::Lenient).map(|(f, _)| f)
}

/// Parse DIMACS CNF and return the warnings raised along the way.
pub fn parse_dimacs_with(text: &str, strictness: Strictness) -> Result<(CnfFormula, Vec<String>)> {
    let mut warnings = Vec::new();
    let mut header: Option<(usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut current: Vec<i32> = Vec::new();
    let mut current_line = 0;
    let err = |line: usize, message: String| Error::Parse { line, message };

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        // SATLIB files end with a "%" line followed by junk
        if line.starts_with('%') {
            break;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(err(line_no, "duplicate problem line".into()));
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 4 || parts[0] != "p" || parts[1] != "cnf" {
                return Err(err(line_no, format!("malformed problem line \"{line}\"")));
            }
            let vars = parts[2].parse().map_err(|_| err(line_no, format!("bad variable count \"{}\"", parts[2])))?;
            let count = parts[3].parse().map_err(|_| err(line_no, format!("bad clause count \"{}\"", parts[3])))?;
            header = Some((vars, count));
            continue;
        }
        let (n_vars, _) = header.ok_or_else(|| err(line_no, "clause before the \"p cnf\" line".into()))?;
        for tok in line.split_whitespace() {
            let lit: i32 = tok.parse().map_err(|_| err(line_no, format!("bad literal \"{tok}\"")))?;
            if current.is_empty() {
                current_line = line_no;
            }
            if lit == 0 {
                if current.is_empty() {
                    return Err(err(line_no, "empty clause".into()));
                }
                clauses.push(std::mem::take(&mut current));
            } else if lit.unsigned_abs() as usize > n_vars {
                return Err(err(line_no, format!("literal {lit} out of range 1..={n_vars}")));
            } else {
                current.push(lit);
            }
        }
    }

    let (n_vars, expected) = header.ok_or_else(|| err(0, "missing \"p cnf\" problem line".into()))?;
    if !current.is_empty() {
        let msg = format!("clause starting on line {current_line} is not terminated by 0");
        if strictness == Strictness::Strict {
            return Err(err(current_line, msg));
        }
        warnings.push(msg);
        clauses.push(current);
    }
    if clauses.len() != expected {
        let msg = format!("header declares {expected} clauses but {} were read", clauses.len());
        if strictness == Strictness::Strict {
            return Err(err(0, msg));
        }
        warnings.push(msg);
    }
    let f = CnfFormula::new(n_vars, clauses).map_err(|e| err(0, e.to_string()))?;
    Ok((f, warnings))
}

/// Value of the formula under an assignment (`assignment[k]` is variable `k+1`).
pub fn eval_cnf(f: &CnfFormula, assignment: &[bool]) -> Result<bool> {
    if assignment.len() != f.n_vars {
        return Err(Error::Dimension(format!(
            "formula has {} variables, assignment has {}",
            f.n_vars,
            assignment.len()
        )));
    }
    Ok(f.clauses.iter().all(|clause| {
        clause.iter().any(|&lit| {
            let v = assignment[lit.unsigned_abs() as usize - 1];
            if lit > 0 { v } else { !v }
        })
    }))
}

/// Truth table as a predicate on assignment indices.
pub(crate) struct Evaluator {
    masks: Vec<(u64, u64)>,
}

impl Evaluator {
    pub fn new(f: &CnfFormula) -> Self {
        Self { masks: f.masks() }
    }

    #[inline]
    pub fn eval(&self, index: u64) -> bool {
        self.masks.iter().all(|&(pos, neg)| index & pos != 0 || !index & neg != 0)
    }
}

/// Number of satisfying assignments, by enumeration.
pub fn count_satisfying(f: &CnfFormula) -> Result<u64> {
    if f.n_vars > MAX_BRUTE_FORCE_VARS {
        return Err(Error::TooLarge { what: "brute-force variable count", cap: MAX_BRUTE_FORCE_VARS, got: f.n_vars });
    }
    let ev = Evaluator::new(f);
    Ok((0..1u64 << f.n_vars).filter(|&i| ev.eval(i)).count() as u64)
}

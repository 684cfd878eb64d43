use std::fmt::Write as _;

/// Magnitudes below this are printed as `0` so round-off does not leak into
/// otherwise exact tables.
const ZERO_SNAP: f64 = 1e-13;

/// A number at 12 significant digits, fixed notation for moderate exponents.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

/// [`num`] after snapping round-off-sized values to zero.
pub fn val(x: f64) -> String {
    num(if x.abs() < ZERO_SNAP { 0.0 } else { x })
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

pub fn flag(b: bool) -> String {
    b.to_string()
}

/// One block of tab-separated output with a `#`-prefixed column header.
pub struct Table {
    title: String,
    columns: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(title: impl Into<String>, columns: &[&'static str]) -> Self {
        Self { title: title.into(), columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn row(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(cells);
    }

    /// Two-column table of named values.
    pub fn key_values(title: impl Into<String>, pairs: Vec<(&str, String)>) -> Self {
        let mut t = Self::new(title, &["key", "value"]);
        for (k, v) in pairs {
            t.row(vec![k.to_string(), v]);
        }
        t
    }
}

/// Everything a subcommand prints, plus whether its checks passed.
pub struct Report {
    pub tables: Vec<Table>,
    pub checks_passed: bool,
    /// Diagnostics for the error stream, not the table output.
    pub warnings: Vec<String>,
}

impl Report {
    pub fn new() -> Self {
        Self { tables: Vec::new(), checks_passed: true, warnings: Vec::new() }
    }

    pub fn push(&mut self, t: Table) {
        self.tables.push(t);
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (i, t) in self.tables.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            let _ = writeln!(out, "# {}", t.title);
            let _ = writeln!(out, "#{}", t.columns.join("\t"));
            for r in &t.rows {
                let _ = writeln!(out, "{}", r.join("\t"));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_formatting() {
        assert_eq!(num(0.0), "0");
        assert_eq!(num(-0.0), "0");
        assert_eq!(num(0.25), "0.25");
        assert_eq!(num(0.15000000000000002), "0.15");
        assert_eq!(num(1.0 / 3.0), "0.333333333333");
        assert_eq!(num(-2.0 / 3.0), "-0.666666666667");
        assert_eq!(num(123456.0), "123456");
        assert_eq!(num(0.99999999999999), "1");
        assert_eq!(num(1.5e-7), "1.5e-7");
        assert_eq!(num(-6.02e23), "-6.02e23");
        assert_eq!(num(f64::NEG_INFINITY), "-inf");
        assert_eq!(val(2.7e-17), "0");
        assert_eq!(val(0.075), "0.075");
    }

    #[test]
    fn render_layout() {
        let mut r = Report::new();
        let mut t = Table::new("demo", &["a", "b"]);
        t.row(vec!["1".into(), "x".into()]);
        r.push(t);
        r.push(Table::key_values("kv", vec![("k", "v".into())]));
        assert_eq!(r.render(), "# demo\n#a\tb\n1\tx\n\n# kv\n#key\tvalue\nk\tv\n");
    }
}

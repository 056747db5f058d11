//! Number formatting and table rendering.

use std::io::{self, Write};

use clap::ValueEnum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Csv,
}

impl Format {
    fn digits(self) -> usize {
        match self {
            Format::Human => 6,
            Format::Csv => 12,
        }
    }

    pub fn key(self) -> &'static str {
        match self {
            Format::Human => "human",
            Format::Csv => "csv",
        }
    }
}

/// `x` to `digits` significant digits, `%g` style: fixed notation unless
/// the exponent is below −4 or at least `digits`, trailing zeros dropped.
pub fn significant(x: f64, digits: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    if x == 0.0 {
        return "0".into();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        format!("{}e{}{:02}", trim_zeros(mantissa), if exp < 0 { '-' } else { '+' }, exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Val {
    Num(f64),
    Int(u64),
    Text(String),
    Empty,
}

impl Val {
    fn render(&self, format: Format) -> String {
        match self {
            Val::Num(x) => significant(*x, format.digits()),
            Val::Int(n) => n.to_string(),
            Val::Text(s) => s.clone(),
            Val::Empty => match format {
                Format::Human => "-".into(),
                Format::Csv => String::new(),
            },
        }
    }
}

impl From<f64> for Val {
    fn from(x: f64) -> Self {
        Val::Num(x)
    }
}

impl From<Option<f64>> for Val {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Val::Empty, Val::Num)
    }
}

impl From<u64> for Val {
    fn from(n: u64) -> Self {
        Val::Int(n)
    }
}

impl From<&str> for Val {
    fn from(s: &str) -> Self {
        Val::Text(s.into())
    }
}

impl From<String> for Val {
    fn from(s: String) -> Self {
        Val::Text(s)
    }
}

/// Rows under a fixed header. A single row prints as `name value` lines in
/// human mode (empty fields omitted); several rows print as an aligned table.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Val>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Self { columns, rows: Vec::new() }
    }

    pub fn record(fields: Vec<(&'static str, Val)>) -> Self {
        let (columns, row) = fields.into_iter().unzip();
        Self { columns, rows: vec![row] }
    }

    pub fn push(&mut self, row: Vec<Val>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write(&self, format: Format, out: &mut dyn Write) -> io::Result<()> {
        match format {
            Format::Csv => {
                let mut w = csv::WriterBuilder::new()
                    .terminator(csv::Terminator::Any(b'\n'))
                    .from_writer(out);
                w.write_record(&self.columns)?;
                for row in &self.rows {
                    w.write_record(row.iter().map(|v| v.render(format)))?;
                }
                w.flush()
            }
            Format::Human if self.rows.len() == 1 => {
                let width = self.columns.iter().map(|c| c.len()).max().unwrap_or(0);
                // fields that do not apply to this calculation are left out
                for (c, v) in self.columns.iter().zip(&self.rows[0]).filter(|(_, v)| **v != Val::Empty) {
                    writeln!(out, "{c:<width$}  {}", v.render(format))?;
                }
                Ok(())
            }
            Format::Human => {
                let cells: Vec<Vec<String>> = self
                    .rows
                    .iter()
                    .map(|r| r.iter().map(|v| v.render(format)).collect())
                    .collect();
                let widths: Vec<usize> = self
                    .columns
                    .iter()
                    .enumerate()
                    .map(|(i, c)| cells.iter().map(|r| r[i].len()).chain([c.len()]).max().unwrap_or(0))
                    .collect();
                let line = |fields: Vec<&str>| -> String {
                    let padded: Vec<String> = fields
                        .iter()
                        .zip(&widths)
                        .map(|(f, w)| format!("{f:<w$}"))
                        .collect();
                    padded.join("  ").trim_end().to_string()
                };
                writeln!(out, "{}", line(self.columns.clone()))?;
                for r in &cells {
                    writeln!(out, "{}", line(r.iter().map(String::as_str).collect()))?;
                }
                Ok(())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(significant(0.950398123, 6), "0.950398");
        assert_eq!(significant(142.72264, 6), "142.723");
        assert_eq!(significant(124.0, 6), "124");
        assert_eq!(significant(9.9999999, 6), "10");
        assert_eq!(significant(1234567.0, 6), "1.23457e+06");
        assert_eq!(significant(-3.2e-9, 6), "-3.2e-09");
        assert_eq!(significant(0.0001, 6), "0.0001");
        assert_eq!(significant(1.0 / 3.0, 12), "0.333333333333");
        assert_eq!(significant(f64::NEG_INFINITY, 6), "-inf");
    }

    #[test]
    fn csv_quotes_text_with_commas() {
        let t = Table::record(vec![("method", "a, b".into()), ("n", 3u64.into()), ("x", None.into())]);
        let mut buf = Vec::new();
        t.write(Format::Csv, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "method,n,x\n\"a, b\",3,\n");
    }
}

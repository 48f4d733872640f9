//! Fixed six-decimal CSV output.

use std::fmt::Write;

pub fn fixed(x: f64) -> String {
    let s = format!("{x:.6}");
    if s == "-0.000000" {
        "0.000000".into()
    } else {
        s
    }
}

/// Formats an optional value; missing values become empty fields.
pub fn field(x: Option<f64>) -> String {
    x.filter(|v| v.is_finite()).map(fixed).unwrap_or_default()
}

#[derive(Debug, Default)]
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn with_header(columns: &[&str]) -> Self {
        let mut csv = Csv::default();
        csv.row(columns.iter().map(|c| c.to_string()));
        csv
    }

    pub fn row<I: IntoIterator<Item = String>>(&mut self, fields: I) {
        let line: Vec<String> = fields.into_iter().collect();
        let _ = writeln!(self.text, "{}", line.join(","));
    }

    pub fn into_string(self) -> String {
        self.text
    }
}

/// Inclusive dB grid `start, start + step, ...` up to `stop`.
pub fn db_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>, String> {
    if !(step > 0.0) || !step.is_finite() {
        return Err(format!("step must be positive, got {step}"));
    }
    if !(start < stop) || !start.is_finite() || !stop.is_finite() {
        return Err(format!("need start < stop, got {start} and {stop}"));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
    if n > 100_000 {
        return Err(format!("grid of {n} points is too large"));
    }
    Ok((0..n).map(|k| start + k as f64 * step).collect())
}

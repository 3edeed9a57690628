//! CSV emission. Every file starts with a `#` comment block echoing the
//! tool version and all effective inputs, followed by a header row.

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

pub const SIGNIFICANT_DIGITS: usize = 9;

/// Formats `v` with nine significant digits, `%g` style: fixed notation for
/// moderate exponents, scientific otherwise, trailing zeros removed.
pub fn fmt_float(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, v);
    let (mantissa, exponent) = sci.split_once('e').expect("exponent present");
    let exponent: i32 = exponent.parse().expect("integer exponent");
    if (-5..SIGNIFICANT_DIGITS as i32).contains(&exponent) {
        let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exponent).max(0) as usize;
        trim_zeros(format!("{v:.decimals$}"))
    } else {
        format!("{}e{exponent}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// Empty cell for absent values.
pub fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_float).unwrap_or_default()
}

#[derive(Debug, Clone, Default)]
pub struct CsvDoc {
    pub comments: Vec<(String, String)>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvDoc {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            ..Self::default()
        }
    }

    pub fn comment(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.comments.push((key.into(), value.into()));
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn render(&self) -> Result<Vec<u8>> {
        let mut buf = Vec::new();
        for (key, value) in &self.comments {
            write!(buf, "# {key} = {value}\r\n").expect("writing to memory");
        }
        let mut writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::CRLF)
            .from_writer(buf);
        let csv_err = |e: csv::Error| Error::Io {
            context: "encoding csv".to_string(),
            source: std::io::Error::other(e),
        };
        writer.write_record(&self.header).map_err(csv_err)?;
        for row in &self.rows {
            writer.write_record(row).map_err(csv_err)?;
        }
        writer.into_inner().map_err(|e| Error::Io {
            context: "encoding csv".to_string(),
            source: std::io::Error::other(e.to_string()),
        })
    }
}

/// Writes `doc` to `path`, or to stdout when no path is given.
pub fn emit_csv(doc: &CsvDoc, path: Option<&Path>) -> Result<()> {
    let bytes = doc.render()?;
    match path {
        Some(path) => std::fs::write(path, bytes).map_err(|source| Error::Io {
            context: format!("writing {}", path.display()),
            source,
        }),
        None => std::io::stdout()
            .lock()
            .write_all(&bytes)
            .map_err(|source| Error::Io {
                context: "writing stdout".to_string(),
                source,
            }),
    }
}

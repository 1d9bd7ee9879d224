//! CSV and JSON writers shared by every export.
//!
//! CSV files carry one header line and comma-separated values printed with
//! 17 significant digits, so a round trip through text is exact.

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};

/// Full-precision rendering used in every CSV cell.
pub fn format_value(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes equally long columns under a single header line.
pub fn write_columns<W: Write>(mut out: W, header: &[&str], columns: &[&[f64]]) -> Result<()> {
    if header.len() != columns.len() {
        return Err(Error::InvalidInput(format!(
            "{} header names for {} columns",
            header.len(),
            columns.len()
        )));
    }
    let rows = columns.first().map_or(0, |c| c.len());
    if columns.iter().any(|c| c.len() != rows) {
        return Err(Error::InvalidInput("columns differ in length".into()));
    }
    writeln!(out, "{}", header.join(","))?;
    let mut line = String::new();
    for i in 0..rows {
        line.clear();
        for (j, col) in columns.iter().enumerate() {
            if j > 0 {
                line.push(',');
            }
            line.push_str(&format_value(col[i]));
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}

/// Pretty JSON followed by a newline.
pub fn write_json<W: Write, T: Serialize + ?Sized>(mut out: W, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values_survive_text_round_trip() {
        for x in [std::f64::consts::PI, -1.0 / 3.0, 1e-300, 6.02214076e23] {
            let back: f64 = format_value(x).parse().unwrap();
            assert_eq!(back, x);
        }
    }

    #[test]
    fn mismatched_columns_are_rejected() {
        let a = [1.0, 2.0];
        let b = [1.0];
        assert!(write_columns(Vec::new(), &["a", "b"], &[&a, &b]).is_err());
        assert!(write_columns(Vec::new(), &["a"], &[&a, &a]).is_err());
    }
}

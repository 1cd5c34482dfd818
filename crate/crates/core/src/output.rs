//! Number formatting shared by JSON and TSV outputs.

use crate::error::Result;
use serde_json::Value;
use std::io::Write as _;
use std::path::Path;

/// Round to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// JSON number with 12 significant digits; integral values become JSON
/// integers and non-finite values the strings `"inf"`, `"-inf"`, `"nan"`.
pub fn num(x: f64) -> Value {
    if x.is_nan() {
        return Value::String("nan".into());
    }
    if x.is_infinite() {
        return Value::String(if x > 0.0 { "inf" } else { "-inf" }.into());
    }
    let r = round12(x);
    if r.fract() == 0.0 && r.abs() < 1e15 {
        return Value::from(r as i64);
    }
    serde_json::Number::from_f64(r).map(Value::Number).unwrap_or(Value::Null)
}

/// Text form used in TSV cells, following the same rules as [`num`].
pub fn cell(x: f64) -> String {
    match num(x) {
        Value::String(s) => s,
        v => v.to_string(),
    }
}

/// Write a tab-separated table with a header row.
pub fn write_tsv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "{}", header.join("\t"))?;
    for r in rows {
        writeln!(w, "{}", r.join("\t"))?;
    }
    w.flush()?;
    Ok(())
}

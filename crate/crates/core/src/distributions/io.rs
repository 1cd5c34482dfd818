//! Reading datasets and model specifications.

use super::family::{Family, Params};
use super::model::ModelDistribution;
use crate::error::{Error, Result};
use std::path::Path;

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn data_lines(text: &str) -> impl Iterator<Item = &str> {
    text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'))
}

fn parse_number(s: &str, line: usize) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| parse_err(format!("line {line}: '{}' is not a number", s.trim())))
}

/// Parse a single column of numbers: either one value per line, or CSV with a
/// header row, from which `column` (or the only/first column) is taken.
pub fn parse_values(text: &str, column: Option<&str>) -> Result<Vec<f64>> {
    let first = data_lines(text).next().ok_or_else(|| parse_err("no data"))?;
    let plain = !first.contains(',') && first.parse::<f64>().is_ok();
    if plain && column.is_none() {
        return data_lines(text).enumerate().map(|(i, l)| parse_number(l, i + 1)).collect();
    }
    let table = read_csv(text)?;
    let idx = match column {
        Some(name) => table
            .header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| parse_err(format!("column '{name}' not found")))?,
        None => 0,
    };
    Ok(table.rows.iter().map(|r| r[idx]).collect())
}

struct Table {
    header: Vec<String>,
    rows: Vec<Vec<f64>>,
}

// CSV with an optional header; comment lines are stripped first.
fn read_csv(text: &str) -> Result<Table> {
    let body: String = data_lines(text).map(|l| format!("{l}\n")).collect();
    let mut reader = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(body.as_bytes());
    let mut header = Vec::new();
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| parse_err(e.to_string()))?;
        let fields: Vec<&str> = rec.iter().collect();
        if i == 0 && fields.iter().any(|f| f.parse::<f64>().is_err()) {
            header = fields.iter().map(|s| s.to_string()).collect();
            continue;
        }
        let row = fields.iter().map(|f| parse_number(f, i + 1)).collect::<Result<Vec<f64>>>()?;
        if let Some(first) = rows.first().map(|r: &Vec<f64>| r.len()) {
            if row.len() != first {
                return Err(parse_err(format!("line {}: expected {first} fields", i + 1)));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(parse_err("no data rows"));
    }
    Ok(Table { header, rows })
}

fn columns(text: &str, wanted: &[&str]) -> Result<Vec<Vec<f64>>> {
    let t = read_csv(text)?;
    let width = t.rows[0].len();
    if width < wanted.len() {
        return Err(parse_err(format!("expected columns {}", wanted.join(","))));
    }
    let idx: Vec<usize> = if t.header.is_empty() {
        (0..wanted.len()).collect()
    } else {
        wanted
            .iter()
            .map(|w| t.header.iter().position(|h| h == w).ok_or_else(|| parse_err(format!("column '{w}' not found"))))
            .collect::<Result<_>>()?
    };
    Ok(idx.iter().map(|&j| t.rows.iter().map(|r| r[j]).collect()).collect())
}

/// Rows `edge_lo, edge_hi, count` of a binned dataset.
pub fn parse_binned(text: &str) -> Result<(Vec<f64>, Vec<u64>)> {
    let cols = columns(text, &["edge_lo", "edge_hi", "count"])?;
    let (lo, hi, counts) = (&cols[0], &cols[1], &cols[2]);
    let mut edges = vec![lo[0]];
    for i in 0..lo.len() {
        if i > 0 && lo[i] != hi[i - 1] {
            return Err(parse_err(format!("bin {} does not start where bin {} ends", i + 1, i)));
        }
        edges.push(hi[i]);
    }
    let counts = counts
        .iter()
        .map(|&c| {
            if c >= 0.0 && c.fract() == 0.0 {
                Ok(c as u64)
            } else {
                Err(parse_err(format!("count {c} is not a nonnegative integer")))
            }
        })
        .collect::<Result<_>>()?;
    Ok((edges, counts))
}

/// Columns `x, y` of a 2D point set.
pub fn parse_points(text: &str) -> Result<Vec<(f64, f64)>> {
    let cols = columns(text, &["x", "y"])?;
    Ok(cols[0].iter().copied().zip(cols[1].iter().copied()).collect())
}

pub fn read_values(path: &Path, column: Option<&str>) -> Result<Vec<f64>> {
    parse_values(&std::fs::read_to_string(path)?, column)
}

/// Split `key=value` pairs separated by commas or whitespace.
pub fn parse_pairs(spec: &str) -> Result<Vec<(String, String)>> {
    spec.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|kv| {
            let (k, v) = kv.split_once('=').ok_or_else(|| parse_err(format!("expected key=value, got '{kv}'")))?;
            Ok((k.trim().to_lowercase(), v.trim().to_string()))
        })
        .collect()
}

/// Parse e.g. `family=gauss beta=0 alpha=1` or
/// `family=uniform,geometry=circle,period=6.283185307179586`.
pub fn parse_model_spec(spec: &str) -> Result<ModelDistribution> {
    let pairs = parse_pairs(spec)?;
    let mut family = None;
    let mut geometry = None;
    let mut period = std::f64::consts::TAU;
    let mut origin = None;
    let mut params = Params::new();
    for (k, v) in &pairs {
        match k.as_str() {
            "family" => family = Some(Family::parse(v)?),
            "geometry" => geometry = Some(v.to_lowercase()),
            "period" => period = v.parse().map_err(|_| parse_err(format!("bad period '{v}'")))?,
            "origin" => origin = Some(v.parse::<f64>().map_err(|_| parse_err(format!("bad origin '{v}'")))?),
            _ => params.set(k, v.parse().map_err(|_| parse_err(format!("bad value for {k}: '{v}'")))?),
        }
    }
    let family = family.ok_or_else(|| parse_err("model spec lacks family="))?;
    let model = match (family, geometry.as_deref()) {
        (Family::Uniform, Some("circle")) => ModelDistribution::uniform_circle(period)?,
        (_, Some(g)) if g != "line" && g != "circle" => return Err(parse_err(format!("unknown geometry '{g}'"))),
        _ => ModelDistribution::new(family, &params)?,
    };
    match origin {
        Some(o) => model.with_origin(o),
        None => Ok(model),
    }
}

//! Reading sampled positions (`i,t,x,y`) from CSV or NDJSON.

use std::io::Read;

use clap::ValueEnum;
use pfl::{DiscreteSample, Point};
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InputFormat {
    /// Detect from the first non-blank character (`{` means NDJSON).
    Auto,
    Csv,
    Ndjson,
}

#[derive(Debug, Clone, Copy, Deserialize)]
struct Row {
    i: usize,
    t: f64,
    x: f64,
    y: f64,
}

fn parse_rows(text: &str, format: InputFormat) -> Result<Vec<Row>, CliError> {
    let format = match format {
        InputFormat::Auto if text.trim_start().starts_with('{') => InputFormat::Ndjson,
        InputFormat::Auto => InputFormat::Csv,
        f => f,
    };
    match format {
        InputFormat::Ndjson => text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(k, l)| {
                serde_json::from_str(l).map_err(|e| CliError::Input(format!("line {}: {e}", k + 1)))
            })
            .collect(),
        _ => csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes())
            .deserialize()
            .map(|r| r.map_err(|e| CliError::Input(e.to_string())))
            .collect(),
    }
}

/// Builds a sample with speed `c`; the grid step is `(t_n - t_0)/n` and the
/// times must be equidistant to 1e-9 relative.
pub fn read_sample(mut source: impl Read, format: InputFormat, c: f64) -> Result<DiscreteSample, CliError> {
    let mut text = String::new();
    source
        .read_to_string(&mut text)
        .map_err(|e| CliError::Input(e.to_string()))?;
    let mut rows = parse_rows(&text, format)?;
    rows.sort_by_key(|r| r.i);
    if rows.len() < 2 {
        return Err(CliError::Input("need at least two positions".into()));
    }
    if rows.iter().enumerate().any(|(k, r)| r.i != k) {
        return Err(CliError::Input("indices must run 0, 1, ..., n without gaps".into()));
    }
    let n = rows.len() - 1;
    let (t0, tn) = (rows[0].t, rows[n].t);
    let delta = (tn - t0) / n as f64;
    let tol = 1e-9 * tn.abs().max(delta);
    if let Some(r) = rows.iter().find(|r| (r.t - (t0 + r.i as f64 * delta)).abs() > tol) {
        return Err(CliError::Input(format!(
            "times are not equidistant: row {} has t = {}, expected {}",
            r.i,
            r.t,
            t0 + r.i as f64 * delta
        )));
    }
    let positions = rows.iter().map(|r| Point::new(r.x, r.y)).collect();
    Ok(DiscreteSample::new(delta, c, positions)?)
}

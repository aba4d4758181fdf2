//! Input parsing and CSV rendering.
//!
//! CSV output renders numbers with 6 significant digits; JSON output keeps
//! full f64 precision (handled by serde_json at the call sites).

use std::fs::File;
use std::io::{self, BufRead, BufReader, Read};
use std::path::Path;

use crate::mc::{DensityRow, StudyResult};

/// Formats with 6 significant digits, plain decimal where reasonable.
pub fn fmt6(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let mag = x.abs().log10().floor() as i32;
    if (-4..6).contains(&mag) {
        let decimals = (5 - mag).max(0) as usize;
        let s = format!("{x:.decimals$}");
        // trim trailing zeros but keep at least one digit after the point
        if s.contains('.') {
            let t = s.trim_end_matches('0');
            let t = t.strip_suffix('.').unwrap_or(t);
            t.to_string()
        } else {
            s
        }
    } else {
        format!("{x:.5e}")
    }
}

/// One value per line; blank lines are skipped. Errors carry line numbers.
pub fn parse_values<R: Read>(reader: R) -> Result<Vec<f64>, String> {
    let mut out = Vec::new();
    for (idx, line) in BufReader::new(reader).lines().enumerate() {
        let line = line.map_err(|e| format!("line {}: {e}", idx + 1))?;
        let token = line.trim();
        if token.is_empty() {
            continue;
        }
        let value: f64 = token
            .parse()
            .map_err(|_| format!("line {}: invalid number {token:?}", idx + 1))?;
        out.push(value);
    }
    Ok(out)
}

/// One CSV row of reals per line; blank lines are skipped.
pub fn parse_csv_rows<R: Read>(reader: R) -> Result<Vec<Vec<f64>>, String> {
    let mut out = Vec::new();
    for (idx, line) in BufReader::new(reader).lines().enumerate() {
        let line = line.map_err(|e| format!("line {}: {e}", idx + 1))?;
        if line.trim().is_empty() {
            continue;
        }
        let row: Result<Vec<f64>, String> = line
            .split(',')
            .map(|tok| {
                let tok = tok.trim();
                tok.parse::<f64>()
                    .map_err(|_| format!("line {}: invalid number {tok:?}", idx + 1))
            })
            .collect();
        out.push(row?);
    }
    Ok(out)
}

/// Reads newline-separated values from a file, or stdin when `path` is None
/// or "-".
pub fn read_values(path: Option<&Path>) -> Result<Vec<f64>, String> {
    match path {
        Some(p) if p != Path::new("-") => {
            let file = File::open(p).map_err(|e| format!("{}: {e}", p.display()))?;
            parse_values(file)
        }
        _ => parse_values(io::stdin().lock()),
    }
}

/// Reads CSV rows from a file, or stdin when `path` is None or "-".
pub fn read_csv_rows(path: Option<&Path>) -> Result<Vec<Vec<f64>>, String> {
    match path {
        Some(p) if p != Path::new("-") => {
            let file = File::open(p).map_err(|e| format!("{}: {e}", p.display()))?;
            parse_csv_rows(file)
        }
        _ => parse_csv_rows(io::stdin().lock()),
    }
}

/// Long-format study CSV: scenario,statistic,parameter,rate,replicates,se.
pub fn study_csv(result: &StudyResult) -> String {
    let mut out = String::from("scenario,statistic,parameter,rate,replicates,se\n");
    for row in &result.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            row.scenario,
            row.statistic,
            row.parameter,
            fmt6(row.rate),
            row.replicates,
            fmt6(row.std_error()),
        ));
    }
    out
}

/// Density CSV: statistic,parameter,x,density,normal_ref.
pub fn density_csv(rows: &[DensityRow]) -> String {
    let mut out = String::from("statistic,parameter,x,density,normal_ref\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            row.statistic,
            row.parameter,
            fmt6(row.x),
            fmt6(row.density),
            fmt6(row.normal_ref),
        ));
    }
    out
}

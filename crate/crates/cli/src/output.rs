//! CSV and JSON forms of a pressure curve.
//!
//! Numbers are written with Rust's shortest round-trip formatting, which is
//! locale independent and parses back to the same `f64`. Failed points carry
//! `NaN` in CSV and `null` in JSON.

use std::io::{self, Write};

use thiserror::Error;

use crate::config::Method;
use crate::scan::{PressureCurve, Row};

pub const CSV_HEADER: &str = "L,T,pressure,err,method";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(format!("unknown format `{s}`, expected csv or json")),
        }
    }
}

#[derive(Debug, Error)]
pub enum ReadError {
    #[error("line {line}: {reason}")]
    Csv { line: usize, reason: String },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn number(x: Option<f64>) -> String {
    x.map_or_else(|| "NaN".to_string(), |v| v.to_string())
}

pub fn write_csv<W: Write>(rows: &[Row], mut out: W) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(out, "{},{},{},{},{}", r.l, r.t, number(r.pressure), number(r.err), r.method)?;
    }
    out.flush()
}

pub fn write_json<W: Write>(curve: &PressureCurve, mut out: W) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut out, curve)?;
    writeln!(out)?;
    out.flush()
}

pub fn emit<W: Write>(curve: &PressureCurve, format: Format, out: W) -> io::Result<()> {
    match format {
        Format::Csv => write_csv(&curve.rows, out),
        Format::Json => write_json(curve, out),
    }
}

pub fn parse_csv(text: &str) -> Result<Vec<Row>, ReadError> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    match lines.next() {
        Some((_, h)) if h.trim() == CSV_HEADER => {}
        _ => {
            return Err(ReadError::Csv {
                line: 1,
                reason: format!("expected header `{CSV_HEADER}`"),
            })
        }
    }
    lines
        .map(|(i, line)| {
            let bad = |reason: String| ReadError::Csv { line: i + 1, reason };
            let f: Vec<&str> = line.split(',').map(str::trim).collect();
            if f.len() != 5 {
                return Err(bad(format!("expected 5 fields, found {}", f.len())));
            }
            let num = |s: &str| s.parse::<f64>().map_err(|e| bad(format!("`{s}`: {e}")));
            let opt = |s: &str| num(s).map(|v| (!v.is_nan()).then_some(v));
            let pressure = opt(f[2])?;
            Ok(Row {
                l: num(f[0])?,
                t: num(f[1])?,
                pressure,
                err: opt(f[3])?,
                method: f[4].parse::<Method>().map_err(bad)?,
                warning: None,
                error: pressure.is_none().then(|| "failed (details only in JSON output)".to_string()),
            })
        })
        .collect()
}

/// Reads either format, telling them apart by the first character.
pub fn read_curve(text: &str) -> Result<PressureCurve, ReadError> {
    if text.trim_start().starts_with('{') {
        Ok(serde_json::from_str(text)?)
    } else {
        Ok(PressureCurve {
            provenance: None,
            config: None,
            rows: parse_csv(text)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scan::Provenance;

    fn row(l: f64, p: Option<f64>) -> Row {
        Row {
            l,
            t: 0.03,
            pressure: p,
            err: p.map(|v| v.abs() * 1e-7),
            method: Method::Lifshitz,
            warning: None,
            error: p.is_none().then(|| "quadrature did not converge".into()),
        }
    }

    fn text(rows: &[Row]) -> String {
        let mut buf = Vec::new();
        write_csv(rows, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn two_points_give_three_lines() {
        let s = text(&[row(0.1, Some(0.041)), row(1.0, Some(-1.0 / 3.0))]);
        assert_eq!(s.lines().count(), 3);
        assert_eq!(s.lines().next(), Some(CSV_HEADER));
        assert!(s.contains("-0.3333333333333333,"));
    }

    #[test]
    fn empty_curve_is_header_only() {
        assert_eq!(text(&[]), format!("{CSV_HEADER}\n"));
    }

    #[test]
    fn csv_round_trips_values() {
        let rows = vec![row(0.012345678901234567, Some(1e-300)), row(7.0, None)];
        let back = parse_csv(&text(&rows)).unwrap();
        assert_eq!(back[0], rows[0]);
        assert_eq!(back[1].pressure, None);
        assert!(back[1].failed());
    }

    #[test]
    fn json_round_trips_field_for_field() {
        let mut failed = row(2.0, None);
        failed.warning = Some("outside regime".into());
        let curve = PressureCurve {
            provenance: Some(Provenance {
                config_hash: "ab".repeat(32),
                version: "0.1.0".into(),
                generated_at: 1_700_000_000,
            }),
            config: None,
            rows: vec![row(0.5, Some(0.1 + 0.2)), failed],
        };
        let mut buf = Vec::new();
        write_json(&curve, &mut buf).unwrap();
        let back = read_curve(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert_eq!(back, curve);
    }

    #[test]
    fn malformed_csv_reports_the_line() {
        let s = format!("{CSV_HEADER}\n0.1,0,1,0,lifshitz\n0.2,0,x,0,lifshitz\n");
        match parse_csv(&s) {
            Err(ReadError::Csv { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        assert!(parse_csv("L,T,p\n").is_err());
    }
}

//! CSV result records.
//!
//! Header: `instance,method,K,gamma,seed,objective,violation,rel_opt,acc,rdc,rounds,wall_time_s`.
//! Floats are written in scientific notation with 17 significant digits, which
//! parses back to the identical `f64`. Absent values are empty cells.

use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use crate::error::{Error, Result};

pub const RESULTS_HEADER: [&str; 12] = [
    "instance",
    "method",
    "K",
    "gamma",
    "seed",
    "objective",
    "violation",
    "rel_opt",
    "acc",
    "rdc",
    "rounds",
    "wall_time_s",
];

pub const TRACE_HEADER: [&str; 5] = ["round", "working_set", "priced", "objective", "wall_time_s"];

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRecord {
    pub instance: String,
    pub method: String,
    pub k: usize,
    pub gamma: f64,
    pub seed: u64,
    /// Empty for a failed cell.
    pub objective: Option<f64>,
    pub violation: Option<f64>,
    pub rel_opt: Option<f64>,
    pub acc: Option<f64>,
    pub rdc: Option<f64>,
    pub rounds: Option<usize>,
    pub wall_time_s: f64,
}

/// One sifting round.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub round: usize,
    pub working_set: usize,
    pub priced: usize,
    pub objective: f64,
    pub wall_time_s: f64,
}

pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn opt_float(v: Option<f64>) -> String {
    v.map(format_float).unwrap_or_default()
}

fn io_err(path: &Path, source: io::Error) -> Error {
    Error::Io { path: path.to_path_buf(), source }
}

/// Writes records (header first) to any writer.
pub fn write_results<W: Write>(records: &[ResultRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RESULTS_HEADER)?;
    for r in records {
        w.write_record([
            r.instance.clone(),
            r.method.clone(),
            r.k.to_string(),
            format_float(r.gamma),
            r.seed.to_string(),
            opt_float(r.objective),
            opt_float(r.violation),
            opt_float(r.rel_opt),
            opt_float(r.acc),
            opt_float(r.rdc),
            r.rounds.map(|v| v.to_string()).unwrap_or_default(),
            format_float(r.wall_time_s),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn write_results_csv(records: &[ResultRecord], path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| io_err(path, e))?;
    write_results(records, file).map_err(|e| match e {
        Error::Csv(c) if c.is_io_error() => match c.into_kind() {
            csv::ErrorKind::Io(source) => io_err(path, source),
            kind => Error::InvalidConfig(format!("{kind:?}")),
        },
        other => other,
    })
}

fn parse_cell<T: std::str::FromStr>(cell: &str, column: &str, line: usize) -> Result<Option<T>> {
    if cell.is_empty() {
        return Ok(None);
    }
    cell.parse()
        .map(Some)
        .map_err(|_| Error::InvalidConfig(format!("results line {line}: bad {column} value {cell:?}")))
}

fn required<T: std::str::FromStr>(cell: &str, column: &str, line: usize) -> Result<T> {
    parse_cell(cell, column, line)?
        .ok_or_else(|| Error::InvalidConfig(format!("results line {line}: missing {column}")))
}

/// Parses a results CSV produced by [`write_results`].
pub fn read_results<R: io::Read>(input: R) -> Result<Vec<ResultRecord>> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != RESULTS_HEADER {
        return Err(Error::InvalidConfig(format!("unexpected results header {header:?}")));
    }
    let mut out = Vec::new();
    for (k, row) in r.records().enumerate() {
        let row = row?;
        let line = k + 2;
        let f = |i: usize| row.get(i).unwrap_or("");
        out.push(ResultRecord {
            instance: f(0).to_string(),
            method: f(1).to_string(),
            k: required(f(2), "K", line)?,
            gamma: required(f(3), "gamma", line)?,
            seed: required(f(4), "seed", line)?,
            objective: parse_cell(f(5), "objective", line)?,
            violation: parse_cell(f(6), "violation", line)?,
            rel_opt: parse_cell(f(7), "rel_opt", line)?,
            acc: parse_cell(f(8), "acc", line)?,
            rdc: parse_cell(f(9), "rdc", line)?,
            rounds: parse_cell(f(10), "rounds", line)?,
            wall_time_s: required(f(11), "wall_time_s", line)?,
        });
    }
    Ok(out)
}

pub fn write_trace<W: Write>(trace: &[TraceRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRACE_HEADER)?;
    for t in trace {
        w.write_record([
            t.round.to_string(),
            t.working_set.to_string(),
            t.priced.to_string(),
            format_float(t.objective),
            format_float(t.wall_time_s),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(i: usize) -> ResultRecord {
        ResultRecord {
            instance: format!("mkp,{i}"),
            method: "implicit".into(),
            k: 8,
            gamma: 0.1 + i as f64 / 3.0,
            seed: u64::MAX - i as u64,
            objective: Some(std::f64::consts::PI * i as f64),
            violation: Some(0.0),
            rel_opt: None,
            acc: Some(1.0 / 3.0),
            rdc: None,
            rounds: Some(i),
            wall_time_s: 1e-7,
        }
    }

    #[test]
    fn empty_is_header_only() {
        let mut buf = Vec::new();
        write_results(&[], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), RESULTS_HEADER.join(",") + "\n");
    }

    #[test]
    fn round_trip_is_exact() {
        let recs: Vec<_> = (0..5).map(record).collect();
        let mut buf = Vec::new();
        write_results(&recs, &mut buf).unwrap();
        assert_eq!(read_results(buf.as_slice()).unwrap(), recs);
    }

    #[test]
    fn seventeen_digits() {
        assert_eq!(format_float(0.1), "1.0000000000000001e-1");
        assert_eq!(format_float(0.1).parse::<f64>().unwrap(), 0.1);
    }

    #[test]
    fn missing_directory_reports_path() {
        let path = Path::new("/nonexistent-dir-for-test/out.csv");
        match write_results_csv(&[], path) {
            Err(Error::Io { path: p, .. }) => assert_eq!(p, path),
            other => panic!("{other:?}"),
        }
    }
}

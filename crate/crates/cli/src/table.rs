//! CSV output for simulation records and the tolerant reader used by `plot`.

use std::io::{Read, Write};
use std::path::Path;

use ranch_core::investor::InvestorRecord;
use ranch_core::rancher::RancherRecord;

use crate::error::CliError;

pub const RANCHER_COLUMNS: [&str; 10] = [
    "n",
    "x",
    "y",
    "norm",
    "width",
    "direction",
    "alpha",
    "alpha_prime",
    "d",
    "hull_size",
];
pub const INVESTOR_COLUMNS: [&str; 7] = ["n", "x", "rmax", "rmin", "width", "ratio", "status"];

/// Shortest decimal string that parses back to the same value.
pub fn num(v: f64) -> String {
    format!("{v:?}")
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

fn rancher_row(r: &RancherRecord, beta: bool) -> Vec<String> {
    let mut row = vec![
        r.n.to_string(),
        num(r.position.x),
        num(r.position.y),
        num(r.norm),
        opt(r.width),
        opt(r.direction),
        opt(r.alpha),
        opt(r.alpha_prime),
        opt(r.d),
        r.hull_size.to_string(),
    ];
    if beta {
        row.push(opt(r.beta));
    }
    row
}

fn investor_row(r: &InvestorRecord) -> Vec<String> {
    vec![
        r.n.to_string(),
        num(r.x),
        opt(r.rmax),
        opt(r.rmin),
        opt(r.width),
        opt(r.ratio),
        if r.blown_up { "blowup" } else { "ok" }.to_owned(),
    ]
}

fn write_rows<W: Write>(
    out: W,
    header: &[&str],
    rows: impl Iterator<Item = Vec<String>>,
) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_rancher<W: Write>(out: W, recs: &[RancherRecord], beta: bool) -> csv::Result<()> {
    let mut header = RANCHER_COLUMNS.to_vec();
    if beta {
        header.push("beta");
    }
    write_rows(out, &header, recs.iter().map(|r| rancher_row(r, beta)))
}

pub fn write_investor<W: Write>(out: W, recs: &[InvestorRecord]) -> csv::Result<()> {
    write_rows(out, &INVESTOR_COLUMNS, recs.iter().map(investor_row))
}

/// A parsed CSV: named columns of optional numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    /// Rows where both columns are present.
    pub fn pairs(&self, a: usize, b: usize) -> Vec<(f64, f64)> {
        self.rows
            .iter()
            .filter_map(|r| Some((r[a]?, r[b]?)))
            .collect()
    }

    /// Reads a CSV whose fields are numbers, empty, or (in a `status`
    /// column) free text. Rows are numbered from 1 for the header line.
    pub fn read<R: Read>(input: R, path: &Path) -> Result<Table, CliError> {
        let malformed = |row: u64, message: String| CliError::Malformed {
            path: path.to_owned(),
            row,
            message,
        };
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(input);
        let header: Vec<String> = rdr
            .headers()
            .map_err(|e| malformed(1, e.to_string()))?
            .iter()
            .map(str::to_owned)
            .collect();
        if header.iter().all(|h| h.is_empty()) {
            return Err(malformed(1, "missing header".into()));
        }
        let text_col = header.iter().position(|h| h == "status");
        let mut rows = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let line = i as u64 + 2;
            let rec = rec.map_err(|e| {
                let at = e.position().map_or(line, |p| p.line());
                malformed(at, e.to_string())
            })?;
            let line = rec.position().map_or(line, |p| p.line());
            let mut row = Vec::with_capacity(rec.len());
            for (j, field) in rec.iter().enumerate() {
                let field = field.trim();
                if Some(j) == text_col || field.is_empty() {
                    row.push(None);
                    continue;
                }
                let v: f64 = field.parse().map_err(|_| {
                    malformed(
                        line,
                        format!("column '{}': not a number: '{field}'", header[j]),
                    )
                })?;
                row.push(Some(v));
            }
            rows.push(row);
        }
        Ok(Table { header, rows })
    }
}

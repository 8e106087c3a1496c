use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use super::{fmt_g, ResultRow};
use crate::error::{Error, Result};

pub const RESULT_HEADER: &str = "dataset,method,setting,cost,trial,risk01c,rejection_ratio,accepted_error,n_reject_distance,n_reject_ambiguity,train_seconds";

/// Writes rows with the fixed header, `%g`-style floats and `\n` line endings.
pub fn write_rows<W: Write>(rows: &[ResultRow], out: W) -> Result<()> {
    let mut out = BufWriter::new(out);
    writeln!(out, "{RESULT_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.dataset,
            r.method,
            r.setting,
            fmt_g(r.cost),
            r.trial,
            fmt_g(r.risk01c),
            fmt_g(r.rejection_ratio),
            fmt_g(r.accepted_error),
            r.n_reject_distance,
            r.n_reject_ambiguity,
            fmt_g(r.train_seconds)
        )?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_rows_csv(rows: &[ResultRow], path: impl AsRef<Path>) -> Result<()> {
    write_rows(rows, File::create(path)?)
}

/// Parses a results file written by [`write_rows`].
pub fn read_rows<R: Read>(input: R) -> Result<Vec<ResultRow>> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if header.join(",") != RESULT_HEADER {
        return Err(Error::Parse {
            row: 1,
            column: 0,
            message: "unexpected header".into(),
        });
    }
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 2;
        let record = record?;
        let field = |c: usize| record.get(c).unwrap_or("");
        let num = |c: usize| -> Result<f64> {
            field(c).parse().map_err(|_| Error::Parse {
                row,
                column: c + 1,
                message: format!("not a number: `{}`", field(c)),
            })
        };
        let count = |c: usize| -> Result<usize> {
            field(c).parse().map_err(|_| Error::Parse {
                row,
                column: c + 1,
                message: format!("not a count: `{}`", field(c)),
            })
        };
        rows.push(ResultRow {
            dataset: field(0).to_string(),
            method: field(1).to_string(),
            setting: field(2).to_string(),
            cost: num(3)?,
            trial: count(4)?,
            risk01c: num(5)?,
            rejection_ratio: num(6)?,
            accepted_error: num(7)?,
            n_reject_distance: count(8)?,
            n_reject_ambiguity: count(9)?,
            train_seconds: num(10)?,
            flag: None,
        });
    }
    Ok(rows)
}

pub fn read_rows_csv(path: impl AsRef<Path>) -> Result<Vec<ResultRow>> {
    read_rows(File::open(path)?)
}

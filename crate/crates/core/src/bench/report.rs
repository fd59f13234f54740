use std::io::{BufRead, Write};

use crate::{Error, Result};

pub const REPORT_HEADER: &str = "dataset,method,pct_subjects,pct_cells,seed,masked_cells,errors,error_rate";
const NA: &str = "NA";

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub dataset: String,
    pub method: String,
    pub pct_subjects: f64,
    pub pct_cells: f64,
    pub seed: u64,
    pub masked_cells: usize,
    /// `None` when the imputer failed at this grid point.
    pub errors: Option<usize>,
}

impl BenchRow {
    pub fn error_rate(&self) -> Option<f64> {
        self.errors.map(|e| {
            if self.masked_cells == 0 {
                0.0
            } else {
                e as f64 / self.masked_cells as f64
            }
        })
    }
}

fn opt<T: std::fmt::Display>(v: Option<T>) -> String {
    v.map_or_else(|| NA.to_string(), |v| v.to_string())
}

pub fn write_report<W: Write>(mut out: W, rows: &[BenchRow]) -> Result<()> {
    writeln!(out, "{REPORT_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.dataset,
            r.method,
            r.pct_subjects,
            r.pct_cells,
            r.seed,
            r.masked_cells,
            opt(r.errors),
            opt(r.error_rate())
        )?;
    }
    Ok(())
}

fn field<T: std::str::FromStr>(raw: &str, line: usize, what: &str) -> Result<T> {
    raw.parse()
        .map_err(|_| Error::parse(line, format!("bad {what} {raw:?}")))
}

pub fn parse_report<R: BufRead>(source: R) -> Result<Vec<BenchRow>> {
    let mut lines = source.lines();
    match lines.next().transpose()? {
        Some(h) if h.trim_end() == REPORT_HEADER => {}
        _ => return Err(Error::parse(1, format!("expected header {REPORT_HEADER:?}"))),
    }
    let mut rows = Vec::new();
    for (k, line) in lines.enumerate() {
        let line_no = k + 2;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.trim_end().split(',').collect();
        if f.len() != 8 {
            return Err(Error::parse(line_no, format!("expected 8 fields, found {}", f.len())));
        }
        let errors = if f[6] == NA {
            None
        } else {
            Some(field(f[6], line_no, "error count")?)
        };
        let row = BenchRow {
            dataset: f[0].to_string(),
            method: f[1].to_string(),
            pct_subjects: field(f[2], line_no, "pct_subjects")?,
            pct_cells: field(f[3], line_no, "pct_cells")?,
            seed: field(f[4], line_no, "seed")?,
            masked_cells: field(f[5], line_no, "masked_cells")?,
            errors,
        };
        if row.errors.is_some_and(|e| e > row.masked_cells) {
            return Err(Error::parse(line_no, "more errors than masked cells"));
        }
        rows.push(row);
    }
    Ok(rows)
}

/// p-values of the reference method against one other method, one per
/// subject-missingness level.
#[derive(Debug, Clone, PartialEq)]
pub struct WilcoxonRow {
    pub method: String,
    pub p_values: Vec<Option<f64>>,
}

fn level_column(level: f64) -> String {
    format!("pct_{}", (level * 100.0).round() as i64)
}

pub fn write_wilcoxon_table<W: Write>(mut out: W, levels: &[f64], rows: &[WilcoxonRow]) -> Result<()> {
    let header: Vec<String> = std::iter::once("method".to_string())
        .chain(levels.iter().map(|&l| level_column(l)))
        .collect();
    writeln!(out, "{}", header.join(","))?;
    for r in rows {
        let cells: Vec<String> = std::iter::once(r.method.clone())
            .chain(r.p_values.iter().map(|p| opt(*p)))
            .collect();
        writeln!(out, "{}", cells.join(","))?;
    }
    Ok(())
}

/// Returns the level percentages from the header and the rows.
pub fn parse_wilcoxon_table<R: BufRead>(source: R) -> Result<(Vec<u32>, Vec<WilcoxonRow>)> {
    let mut lines = source.lines();
    let header = lines
        .next()
        .transpose()?
        .ok_or_else(|| Error::parse(1, "empty table"))?;
    let mut cols = header.trim_end().split(',');
    if cols.next() != Some("method") {
        return Err(Error::parse(1, "first column must be method"));
    }
    let levels = cols
        .map(|c| {
            c.strip_prefix("pct_")
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| Error::parse(1, format!("bad level column {c:?}")))
        })
        .collect::<Result<Vec<u32>>>()?;
    let mut rows = Vec::new();
    for (k, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.trim_end().split(',').collect();
        if f.len() != levels.len() + 1 {
            return Err(Error::parse(k + 2, "wrong number of fields"));
        }
        let p_values = f[1..]
            .iter()
            .map(|v| {
                if *v == NA {
                    Ok(None)
                } else {
                    field(v, k + 2, "p-value").map(Some)
                }
            })
            .collect::<Result<_>>()?;
        rows.push(WilcoxonRow {
            method: f[0].to_string(),
            p_values,
        });
    }
    Ok((levels, rows))
}

//! Categorical dataset CSV.
//!
//! ```text
//! subject_id,A__0,B__0,A__1,B__1
//! s1,a,x,?,y
//! ```
//!
//! Columns are `<attribute>__<slice>`, grouped by slice in ascending order
//! with the same attribute order in every slice. `?` (or an empty field)
//! marks a missing cell; `?` is always written. Symbols are restricted to
//! `[A-Za-z0-9_-]`, so no quoting is needed.

use std::collections::BTreeSet;
use std::io::{BufRead, Write};

use super::dataset::{AttributeSpec, Dataset, Subject, Value};
use crate::{Error, Result};

pub const MISSING_TOKEN: &str = "?";

pub(crate) fn is_symbol(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_' || b == b'-')
}

/// Header layout shared with the real-valued CSV read by the discretizer.
pub(crate) struct Header {
    pub attributes: Vec<String>,
    pub num_slices: usize,
}

pub(crate) fn parse_header(line: &str) -> Result<Header> {
    let mut fields = line.split(',').map(str::trim);
    match fields.next() {
        Some("subject_id") => {}
        other => {
            return Err(Error::parse(
                1,
                format!("first column must be subject_id, found {:?}", other.unwrap_or("")),
            ))
        }
    }
    let mut columns = Vec::new();
    for f in fields {
        let (name, slice) = f
            .rsplit_once("__")
            .ok_or_else(|| Error::parse(1, format!("column {f:?} is not <attribute>__<slice>")))?;
        let slice: usize = slice
            .parse()
            .map_err(|_| Error::parse(1, format!("column {f:?} has a non-numeric slice")))?;
        if name.is_empty() {
            return Err(Error::parse(1, format!("column {f:?} has an empty attribute name")));
        }
        columns.push((name.to_string(), slice));
    }
    if columns.is_empty() {
        return Err(Error::parse(1, "header has no attribute columns"));
    }
    let attributes: Vec<String> = columns
        .iter()
        .take_while(|(_, s)| *s == 0)
        .map(|(n, _)| n.clone())
        .collect();
    let n = attributes.len();
    if n == 0 || columns.len() % n != 0 {
        return Err(Error::parse(1, "columns are not grouped by slice starting at slice 0"));
    }
    for (pos, (name, slice)) in columns.iter().enumerate() {
        if *slice != pos / n || *name != attributes[pos % n] {
            return Err(Error::parse(
                1,
                format!(
                    "expected column {}__{} at position {}, found {name}__{slice}",
                    attributes[pos % n],
                    pos / n,
                    pos + 2
                ),
            ));
        }
    }
    let unique: BTreeSet<&String> = attributes.iter().collect();
    if unique.len() != n {
        return Err(Error::parse(1, "duplicate attribute in slice 0"));
    }
    let num_slices = columns.len() / n;
    if num_slices < 2 {
        return Err(Error::parse(
            1,
            format!("need at least 2 time slices, found {num_slices}"),
        ));
    }
    Ok(Header { attributes, num_slices })
}

pub(crate) type Row = (usize, String, Vec<String>);

pub(crate) fn check_width(rows: &[Row], width: usize) -> Result<()> {
    for (line, _, fields) in rows {
        if fields.len() != width {
            return Err(Error::parse(
                *line,
                format!("ragged row: {} fields, header has {}", fields.len() + 1, width + 1),
            ));
        }
    }
    Ok(())
}

/// Reads non-empty data rows as `(line number, id, fields)`.
pub(crate) fn read_rows<R: BufRead>(source: R) -> Result<(String, Vec<Row>)> {
    let mut lines = source.lines();
    let header = loop {
        match lines.next() {
            Some(line) => {
                let line = line?;
                if !line.trim().is_empty() {
                    break line;
                }
            }
            None => return Err(Error::parse(1, "empty input")),
        }
    };
    let mut rows = Vec::new();
    for (idx, line) in lines.enumerate() {
        let line = line?;
        let line_no = idx + 2;
        if line.trim().is_empty() {
            continue;
        }
        let mut fields: Vec<String> = line.split(',').map(|f| f.trim().to_string()).collect();
        let id = fields.remove(0);
        if id.is_empty() {
            return Err(Error::parse(line_no, "empty subject_id"));
        }
        rows.push((line_no, id, fields));
    }
    Ok((header, rows))
}

/// Parses the categorical CSV format.
///
/// Without `spec`, each attribute's domain is the lexicographically sorted set
/// of observed symbols. With `spec`, the header's attributes must match it by
/// name and order, and every symbol must belong to the declared domain.
pub fn parse_dataset<R: BufRead>(source: R, spec: Option<&[AttributeSpec]>) -> Result<Dataset> {
    let (header_line, rows) = read_rows(source)?;
    let header = parse_header(&header_line)?;
    let n = header.attributes.len();
    check_width(&rows, n * header.num_slices)?;

    for (line, _, fields) in &rows {
        for f in fields {
            if !(f.is_empty() || f == MISSING_TOKEN || is_symbol(f)) {
                return Err(Error::parse(*line, format!("invalid symbol {f:?}")));
            }
        }
    }

    let attributes = match spec {
        Some(spec) => {
            let names: Vec<&str> = spec.iter().map(AttributeSpec::name).collect();
            if names != header.attributes.iter().map(String::as_str).collect::<Vec<_>>() {
                return Err(Error::invalid(format!(
                    "header attributes {:?} do not match the supplied domains {:?}",
                    header.attributes, names
                )));
            }
            spec.to_vec()
        }
        None => {
            let mut domains = vec![BTreeSet::new(); n];
            for (_, _, fields) in &rows {
                for (pos, f) in fields.iter().enumerate() {
                    if !f.is_empty() && f != MISSING_TOKEN {
                        domains[pos % n].insert(f.clone());
                    }
                }
            }
            header
                .attributes
                .iter()
                .zip(domains)
                .map(|(name, dom)| {
                    if dom.is_empty() {
                        Err(Error::invalid(format!(
                            "attribute {name} has no observed values; supply its domain explicitly"
                        )))
                    } else {
                        AttributeSpec::new(name.clone(), dom.into_iter().collect())
                    }
                })
                .collect::<Result<Vec<_>>>()?
        }
    };

    let mut subjects = Vec::with_capacity(rows.len());
    for (line, id, fields) in rows {
        let cells = fields
            .iter()
            .enumerate()
            .map(|(pos, f)| {
                if f.is_empty() || f == MISSING_TOKEN {
                    Ok(None)
                } else {
                    let attr = &attributes[pos % n];
                    attr.index_of(f).map(Some).ok_or_else(|| {
                        Error::parse(line, format!("unknown symbol {f:?} for attribute {}", attr.name()))
                    })
                }
            })
            .collect::<Result<Vec<Option<Value>>>>()?;
        subjects.push(Subject::new(id, cells));
    }
    Dataset::new(attributes, header.num_slices, subjects)
}

pub fn write_dataset<W: Write>(mut out: W, dataset: &Dataset) -> Result<()> {
    let n = dataset.num_attributes();
    write!(out, "subject_id")?;
    for t in 0..dataset.num_slices() {
        for a in dataset.attributes() {
            write!(out, ",{}__{t}", a.name())?;
        }
    }
    writeln!(out)?;
    for s in dataset.subjects() {
        write!(out, "{}", s.id)?;
        for (pos, cell) in s.cells().iter().enumerate() {
            match cell {
                Some(v) => write!(out, ",{}", dataset.attributes()[pos % n].label(*v))?,
                None => write!(out, ",{MISSING_TOKEN}")?,
            }
        }
        writeln!(out)?;
    }
    Ok(())
}

/// Parses a domain file: one `name: label label ...` line per attribute.
/// Blank lines and lines starting with `#` are ignored.
pub fn parse_domains<R: BufRead>(source: R) -> Result<Vec<AttributeSpec>> {
    let mut out = Vec::new();
    for (idx, line) in source.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (name, labels) = line
            .split_once(':')
            .ok_or_else(|| Error::parse(idx + 1, "expected `name: label label ...`"))?;
        let labels: Vec<String> = labels.split_whitespace().map(String::from).collect();
        if let Some(bad) = labels.iter().find(|l| !is_symbol(l)) {
            return Err(Error::parse(idx + 1, format!("invalid symbol {bad:?}")));
        }
        out.push(AttributeSpec::new(name.trim(), labels).map_err(|e| Error::parse(idx + 1, e.to_string()))?);
    }
    Ok(out)
}

pub fn write_domains<W: Write>(mut out: W, attributes: &[AttributeSpec]) -> Result<()> {
    for a in attributes {
        writeln!(out, "{}: {}", a.name(), a.values().join(" "))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn parse(text: &str) -> Result<Dataset> {
        parse_dataset(text.as_bytes(), None)
    }

    #[test]
    fn single_attribute_with_missing_cell() {
        let d = parse("subject_id,A__0,A__1\ns1,a,?\n").unwrap();
        assert_eq!(d.num_subjects(), 1);
        assert_eq!(d.num_attributes(), 1);
        assert_eq!(d.num_slices(), 2);
        assert_eq!(d.get(0, 1, 0), None);
        assert_eq!(d.get(0, 0, 0), Some(0));
    }

    #[test]
    fn empty_field_is_missing() {
        let d = parse("subject_id,A__0,A__1\ns1,,b\n").unwrap();
        assert_eq!(d.get(0, 0, 0), None);
    }

    #[test]
    fn ragged_rows_are_rejected() {
        let err = parse("subject_id,A__0,A__1\ns1,a,b\ns2,a\n").unwrap_err();
        assert!(err.to_string().contains("ragged"), "{err}");
    }

    #[test]
    fn malformed_headers() {
        assert!(parse("id,A__0,A__1\ns1,a,b\n").is_err());
        assert!(parse("subject_id,A0,A1\ns1,a,b\n").is_err());
        assert!(parse("subject_id,A__1,A__0\ns1,a,b\n").is_err());
        assert!(parse("subject_id,A__0,B__0,B__1,A__1\ns1,a,b,c,d\n").is_err());
    }

    #[test]
    fn single_slice_is_rejected() {
        let err = parse("subject_id,A__0,B__0\ns1,a,b\n").unwrap_err();
        assert!(err.to_string().contains("2 time slices"), "{err}");
    }

    #[test]
    fn unknown_symbol_with_spec() {
        let spec = vec![AttributeSpec::new("A", vec!["a".into(), "b".into()]).unwrap()];
        let err = parse_dataset("subject_id,A__0,A__1\ns1,a,c\n".as_bytes(), Some(&spec)).unwrap_err();
        assert!(err.to_string().contains("unknown symbol"), "{err}");
    }

    #[test]
    fn inferred_domain_is_lexicographic() {
        let d = parse("subject_id,A__0,A__1\ns1,zeta,alpha\ns2,mid,alpha\n").unwrap();
        assert_eq!(d.attributes()[0].values(), &["alpha", "mid", "zeta"]);
        assert_eq!(d.get(0, 0, 0), Some(2));
    }

    #[test]
    fn domains_file_round_trip() {
        let attrs = vec![
            AttributeSpec::new("A", vec!["x".into(), "y".into()]).unwrap(),
            AttributeSpec::new("B", vec!["hi".into(), "lo".into(), "mid".into()]).unwrap(),
        ];
        let mut buf = Vec::new();
        write_domains(&mut buf, &attrs).unwrap();
        assert_eq!(parse_domains(buf.as_slice()).unwrap(), attrs);
    }

    fn arb_dataset() -> impl Strategy<Value = Dataset> {
        (1usize..4, 2usize..5, 0usize..6).prop_flat_map(|(n, slices, subjects)| {
            let cards = proptest::collection::vec(1usize..5, n);
            cards.prop_flat_map(move |cards| {
                let cells_per = slices * cards.len();
                let cards2 = cards.clone();
                proptest::collection::vec(
                    proptest::collection::vec(proptest::option::of(0u8..4), cells_per),
                    subjects,
                )
                .prop_map(move |rows| {
                    let attrs: Vec<AttributeSpec> = cards2
                        .iter()
                        .enumerate()
                        .map(|(i, &r)| {
                            AttributeSpec::new(format!("v{i}"), (0..r).map(|k| format!("s{k}")).collect()).unwrap()
                        })
                        .collect();
                    let subjects = rows
                        .into_iter()
                        .enumerate()
                        .map(|(id, cells)| {
                            let cells = cells
                                .into_iter()
                                .enumerate()
                                .map(|(pos, c)| c.map(|v| v % cards2[pos % cards2.len()] as u8))
                                .collect();
                            Subject::new(format!("id{id}"), cells)
                        })
                        .collect();
                    Dataset::new(attrs, slices, subjects).unwrap()
                })
            })
        })
    }

    proptest! {
        #[test]
        fn parse_inverts_serialize(d in arb_dataset()) {
            let mut buf = Vec::new();
            write_dataset(&mut buf, &d).unwrap();
            let back = parse_dataset(buf.as_slice(), Some(d.attributes())).unwrap();
            prop_assert_eq!(back, d);
        }
    }
}

//! Text format for a complete DBN.
//!
//! ```text
//! tdbn 1
//! attribute A a b
//! attribute B x y z
//! prior A |
//! 0.5 0.5
//! prior B | A@0
//! 0.2 0.3 0.5
//! 0.1 0.1 0.8
//! transition A | A@t
//! 0.9 0.1
//! 0.2 0.8
//! transition B | A@t B@t A@t+1
//! ...
//! ```
//!
//! - The first non-comment line is `tdbn 1`. Lines starting with `#` and
//!   blank lines are ignored everywhere.
//! - One `attribute <name> <label>...` line per attribute, in column order.
//! - One `prior` and one `transition` block per attribute. The header lists
//!   parents after `|`: `<name>@0` in prior blocks; `<name>@t` (previous
//!   slice) and `<name>@t+1` (same slice as the child) in transition blocks.
//!   Parents appear in canonical order: previous-slice parents by attribute
//!   position, then the same-slice parent.
//! - The header is followed by `q` rows, one per parent configuration in
//!   mixed-radix order with the first parent most significant. Each row holds
//!   `r` probabilities, written as shortest round-trip decimal literals.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use super::csv::is_symbol;
use super::dataset::AttributeSpec;
use super::dbn::{Cpt, Dbn, DbnParameters, DbnStructure};
use super::family::{Family, FamilyKind, FamilyShape, Lag, ParentRef};
use crate::{Error, Result};

const MAGIC: &str = "tdbn 1";

pub fn write_dbn<W: Write>(mut out: W, dbn: &Dbn) -> Result<()> {
    writeln!(out, "{MAGIC}")?;
    for a in dbn.attributes() {
        writeln!(out, "attribute {} {}", a.name(), a.values().join(" "))?;
    }
    let names: Vec<&str> = dbn.attributes().iter().map(AttributeSpec::name).collect();
    for cpt in dbn.params().cpts() {
        let f = cpt.family();
        let kind = match f.kind {
            FamilyKind::Prior => "prior",
            FamilyKind::Transition => "transition",
        };
        write!(out, "{kind} {} |", names[f.child])?;
        for p in &f.parents {
            let tag = match (f.kind, p.lag) {
                (FamilyKind::Prior, _) => "0",
                (FamilyKind::Transition, Lag::Previous) => "t",
                (FamilyKind::Transition, Lag::Current) => "t+1",
            };
            write!(out, " {}@{tag}", names[p.var])?;
        }
        writeln!(out)?;
        for j in 0..cpt.shape().num_configs() {
            let row: Vec<String> = cpt.row(j).iter().map(|p| format!("{p}")).collect();
            writeln!(out, "{}", row.join(" "))?;
        }
    }
    Ok(())
}

pub fn parse_dbn<R: BufRead>(source: R) -> Result<Dbn> {
    let mut lines = Vec::new();
    for (idx, line) in source.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if !trimmed.is_empty() && !trimmed.starts_with('#') {
            lines.push((idx + 1, trimmed.to_string()));
        }
    }
    let mut it = lines.into_iter().peekable();
    match it.next() {
        Some((_, l)) if l == MAGIC => {}
        Some((line, l)) => return Err(Error::parse(line, format!("expected `{MAGIC}`, found {l:?}"))),
        None => return Err(Error::parse(1, "empty network file")),
    }

    let mut attributes = Vec::new();
    while let Some((line, l)) = it.peek() {
        let Some(rest) = l.strip_prefix("attribute ") else {
            break;
        };
        let mut words = rest.split_whitespace();
        let name = words
            .next()
            .ok_or_else(|| Error::parse(*line, "attribute without a name"))?;
        let labels: Vec<String> = words.map(String::from).collect();
        if !is_symbol(name) || labels.iter().any(|l| !is_symbol(l)) {
            return Err(Error::parse(
                *line,
                "attribute names and labels must match [A-Za-z0-9_-]+",
            ));
        }
        attributes.push(AttributeSpec::new(name, labels).map_err(|e| Error::parse(*line, e.to_string()))?);
        it.next();
    }
    if attributes.is_empty() {
        return Err(Error::parse(2, "no attributes declared"));
    }
    let n = attributes.len();
    let index: HashMap<&str, usize> = attributes.iter().enumerate().map(|(i, a)| (a.name(), i)).collect();
    let cards: Vec<usize> = attributes.iter().map(AttributeSpec::cardinality).collect();

    let mut prior: Vec<Option<Cpt>> = vec![None; n];
    let mut transition: Vec<Option<Cpt>> = vec![None; n];
    while let Some((line, header)) = it.next() {
        let (head, parent_list) = header
            .split_once('|')
            .ok_or_else(|| Error::parse(line, "CPT header must contain `|`"))?;
        let mut head = head.split_whitespace();
        let kind = match head.next() {
            Some("prior") => FamilyKind::Prior,
            Some("transition") => FamilyKind::Transition,
            other => {
                return Err(Error::parse(
                    line,
                    format!("expected prior or transition, found {other:?}"),
                ))
            }
        };
        let child_name = head.next().ok_or_else(|| Error::parse(line, "missing child name"))?;
        let child = *index
            .get(child_name)
            .ok_or_else(|| Error::parse(line, format!("unknown attribute {child_name}")))?;
        let mut parents = Vec::new();
        for tok in parent_list.split_whitespace() {
            let (name, tag) = tok
                .rsplit_once('@')
                .ok_or_else(|| Error::parse(line, format!("parent {tok:?} lacks a slice tag")))?;
            let var = *index
                .get(name)
                .ok_or_else(|| Error::parse(line, format!("unknown attribute {name}")))?;
            let lag = match (kind, tag) {
                (FamilyKind::Prior, "0") => Lag::Current,
                (FamilyKind::Transition, "t") => Lag::Previous,
                (FamilyKind::Transition, "t+1") => Lag::Current,
                _ => return Err(Error::parse(line, format!("invalid slice tag in {tok:?}"))),
            };
            parents.push(ParentRef { lag, var });
        }
        let mut canonical = parents.clone();
        canonical.sort();
        canonical.dedup();
        if canonical != parents {
            return Err(Error::parse(
                line,
                "parents must be listed once each in canonical order",
            ));
        }
        let family = Family { kind, child, parents };
        let shape = FamilyShape::new(family, &cards);
        let mut probs = Vec::with_capacity(shape.num_configs() * shape.child_card);
        for _ in 0..shape.num_configs() {
            let (row_line, row) = it
                .next()
                .ok_or_else(|| Error::parse(line, "CPT ends before all rows were read"))?;
            let values = row
                .split_whitespace()
                .map(|w| w.parse::<f64>())
                .collect::<std::result::Result<Vec<f64>, _>>()
                .map_err(|e| Error::parse(row_line, format!("bad probability: {e}")))?;
            if values.len() != shape.child_card {
                return Err(Error::parse(
                    row_line,
                    format!("row has {} entries, expected {}", values.len(), shape.child_card),
                ));
            }
            probs.extend(values);
        }
        let cpt = Cpt::new(shape, probs).map_err(|e| Error::parse(line, e.to_string()))?;
        let slot = match kind {
            FamilyKind::Prior => &mut prior[child],
            FamilyKind::Transition => &mut transition[child],
        };
        if slot.replace(cpt).is_some() {
            return Err(Error::parse(line, format!("duplicate CPT for {child_name}")));
        }
    }

    let take = |cpts: Vec<Option<Cpt>>, what: &str| -> Result<Vec<Cpt>> {
        cpts.into_iter()
            .enumerate()
            .map(|(i, c)| c.ok_or_else(|| Error::invalid(format!("missing {what} CPT for attribute {i}"))))
            .collect()
    };
    let prior = take(prior, "prior")?;
    let transition = take(transition, "transition")?;

    let single = |f: &Family| -> Result<Option<usize>> {
        let current: Vec<usize> = f
            .parents
            .iter()
            .filter(|p| p.lag == Lag::Current)
            .map(|p| p.var)
            .collect();
        match current.as_slice() {
            [] => Ok(None),
            [p] => Ok(Some(*p)),
            _ => Err(Error::invalid(format!(
                "variable {} has more than one same-slice parent",
                f.child
            ))),
        }
    };
    let structure = DbnStructure::new(
        prior.iter().map(|c| single(c.family())).collect::<Result<_>>()?,
        transition.iter().map(|c| single(c.family())).collect::<Result<_>>()?,
        transition
            .iter()
            .map(|c| c.family().inter_parents().collect())
            .collect(),
    )?;
    Dbn::new(attributes, structure, DbnParameters { prior, transition })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Dbn {
        let attrs = [
            AttributeSpec::new("A", vec!["a".into(), "b".into()]).unwrap(),
            AttributeSpec::new("B", vec!["x".into(), "y".into(), "z".into()]).unwrap(),
        ];
        let cards = [2, 3];
        let s = DbnStructure::new(vec![Some(1), None], vec![None, Some(0)], vec![vec![0], vec![0, 1]]).unwrap();
        let mut params = DbnParameters::uniform(&s, &cards);
        params.prior[1] = Cpt::new(params.prior[1].shape().clone(), vec![0.1, 0.2, 0.7]).unwrap();
        params.transition[0] = Cpt::new(
            params.transition[0].shape().clone(),
            vec![0.9, 0.1, 1.0 / 3.0, 2.0 / 3.0],
        )
        .unwrap();
        Dbn::new(attrs.to_vec(), s, params).unwrap()
    }

    #[test]
    fn round_trip_is_exact() {
        let dbn = sample();
        let mut buf = Vec::new();
        write_dbn(&mut buf, &dbn).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.contains("transition B | A@t B@t A@t+1"), "{text}");
        assert!(text.contains("prior A | B@0"), "{text}");
        let back = parse_dbn(buf.as_slice()).unwrap();
        assert_eq!(back, dbn);
    }

    #[test]
    fn rejects_non_canonical_parents() {
        let text = "tdbn 1\nattribute A a b\nattribute B x y\n\
                    prior A |\n0.5 0.5\nprior B |\n0.5 0.5\n\
                    transition A | B@t+1 A@t\n0.5 0.5\n0.5 0.5\n0.5 0.5\n0.5 0.5\n\
                    transition B |\n0.5 0.5\n";
        let err = parse_dbn(text.as_bytes()).unwrap_err();
        assert!(err.to_string().contains("canonical"), "{err}");
    }

    #[test]
    fn rejects_bad_rows_and_missing_blocks() {
        let short = "tdbn 1\nattribute A a b\nprior A |\n0.5 0.5\ntransition A | A@t\n0.5 0.5\n";
        assert!(parse_dbn(short.as_bytes()).is_err());
        let bad_sum = "tdbn 1\nattribute A a b\nprior A |\n0.5 0.6\ntransition A |\n0.5 0.5\n";
        assert!(parse_dbn(bad_sum.as_bytes()).is_err());
        let missing = "tdbn 1\nattribute A a b\nprior A |\n0.5 0.5\n";
        assert!(parse_dbn(missing.as_bytes()).is_err());
        assert!(parse_dbn("dbn 2\n".as_bytes()).is_err());
    }
}

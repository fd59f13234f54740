use std::collections::HashSet;

use crate::{Error, Result};

/// Index of a value within its attribute domain.
pub type Value = u8;

/// Largest supported attribute cardinality. Cells are stored as `u8`.
pub const MAX_CARDINALITY: usize = 255;

/// A categorical attribute: a name plus an ordered list of value labels.
/// Value index `k` refers to `values[k]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttributeSpec {
    name: String,
    values: Vec<String>,
}

impl AttributeSpec {
    pub fn new(name: impl Into<String>, values: Vec<String>) -> Result<Self> {
        let name = name.into();
        if name.is_empty() {
            return Err(Error::invalid("attribute name is empty"));
        }
        if values.is_empty() {
            return Err(Error::invalid(format!("attribute {name} has an empty domain")));
        }
        if values.len() > MAX_CARDINALITY {
            return Err(Error::invalid(format!(
                "attribute {name} has {} values; at most {MAX_CARDINALITY} are supported",
                values.len()
            )));
        }
        let mut seen = HashSet::new();
        for v in &values {
            if !seen.insert(v.as_str()) {
                return Err(Error::invalid(format!("attribute {name} repeats value {v}")));
            }
        }
        Ok(Self { name, values })
    }

    /// Attribute with labels `"0"`, `"1"`, ... `cardinality - 1`.
    pub fn numbered(name: impl Into<String>, cardinality: usize) -> Result<Self> {
        Self::new(name, (0..cardinality).map(|k| k.to_string()).collect())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn values(&self) -> &[String] {
        &self.values
    }

    pub fn cardinality(&self) -> usize {
        self.values.len()
    }

    pub fn label(&self, value: Value) -> &str {
        &self.values[value as usize]
    }

    pub fn index_of(&self, label: &str) -> Option<Value> {
        self.values.iter().position(|v| v == label).map(|k| k as Value)
    }
}

/// One observed sequence: `num_slices × num_attributes` cells in row-major
/// (slice, attribute) order. `None` marks a missing cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subject {
    pub id: String,
    cells: Vec<Option<Value>>,
}

impl Subject {
    pub fn new(id: impl Into<String>, cells: Vec<Option<Value>>) -> Self {
        Self { id: id.into(), cells }
    }

    pub fn cells(&self) -> &[Option<Value>] {
        &self.cells
    }

    pub(crate) fn cells_mut(&mut self) -> &mut [Option<Value>] {
        &mut self.cells
    }
}

/// Position of a single cell in a dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CellRef {
    pub subject: usize,
    pub slice: usize,
    pub attribute: usize,
}

/// `N` subjects observed over `T + 1` time slices on `n` categorical
/// attributes, with explicit missing cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    attributes: Vec<AttributeSpec>,
    num_slices: usize,
    subjects: Vec<Subject>,
}

impl Dataset {
    pub fn new(attributes: Vec<AttributeSpec>, num_slices: usize, subjects: Vec<Subject>) -> Result<Self> {
        if attributes.is_empty() {
            return Err(Error::invalid("dataset has no attributes"));
        }
        if num_slices < 2 {
            return Err(Error::invalid(format!(
                "dataset needs at least 2 time slices, found {num_slices}"
            )));
        }
        let mut names = HashSet::new();
        for a in &attributes {
            if !names.insert(a.name()) {
                return Err(Error::invalid(format!("duplicate attribute {}", a.name())));
            }
        }
        let n = attributes.len();
        for s in &subjects {
            if s.cells.len() != num_slices * n {
                return Err(Error::invalid(format!(
                    "subject {} has {} cells, expected {}",
                    s.id,
                    s.cells.len(),
                    num_slices * n
                )));
            }
            for (pos, cell) in s.cells.iter().enumerate() {
                if let Some(v) = cell {
                    let attr = &attributes[pos % n];
                    if *v as usize >= attr.cardinality() {
                        return Err(Error::invalid(format!(
                            "subject {} slice {}: value index {v} out of range for {}",
                            s.id,
                            pos / n,
                            attr.name()
                        )));
                    }
                }
            }
        }
        Ok(Self {
            attributes,
            num_slices,
            subjects,
        })
    }

    pub fn attributes(&self) -> &[AttributeSpec] {
        &self.attributes
    }

    pub fn num_attributes(&self) -> usize {
        self.attributes.len()
    }

    pub fn cardinalities(&self) -> Vec<usize> {
        self.attributes.iter().map(AttributeSpec::cardinality).collect()
    }

    pub fn num_slices(&self) -> usize {
        self.num_slices
    }

    /// Number of transitions `T` per subject.
    pub fn num_transitions(&self) -> usize {
        self.num_slices - 1
    }

    pub fn subjects(&self) -> &[Subject] {
        &self.subjects
    }

    pub fn num_subjects(&self) -> usize {
        self.subjects.len()
    }

    pub fn get(&self, subject: usize, slice: usize, attribute: usize) -> Option<Value> {
        self.subjects[subject].cells[slice * self.attributes.len() + attribute]
    }

    pub fn cell(&self, at: CellRef) -> Option<Value> {
        self.get(at.subject, at.slice, at.attribute)
    }

    pub(crate) fn set(&mut self, at: CellRef, value: Option<Value>) {
        let n = self.attributes.len();
        debug_assert!(value.is_none_or(|v| (v as usize) < self.attributes[at.attribute].cardinality()));
        self.subjects[at.subject].cells[at.slice * n + at.attribute] = value;
    }

    pub(crate) fn subjects_mut(&mut self) -> &mut [Subject] {
        &mut self.subjects
    }

    pub fn is_complete(&self) -> bool {
        self.subjects.iter().all(|s| s.cells.iter().all(Option::is_some))
    }

    pub fn missing_cells(&self) -> Vec<CellRef> {
        let n = self.attributes.len();
        let mut out = Vec::new();
        for (subject, s) in self.subjects.iter().enumerate() {
            for (pos, cell) in s.cells.iter().enumerate() {
                if cell.is_none() {
                    out.push(CellRef {
                        subject,
                        slice: pos / n,
                        attribute: pos % n,
                    });
                }
            }
        }
        out
    }

    /// True when both datasets have the same attributes and grid shape.
    pub fn same_shape(&self, other: &Dataset) -> bool {
        self.attributes == other.attributes
            && self.num_slices == other.num_slices
            && self.subjects.len() == other.subjects.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binary(name: &str) -> AttributeSpec {
        AttributeSpec::new(name, vec!["a".into(), "b".into()]).unwrap()
    }

    #[test]
    fn attribute_rejects_duplicate_labels() {
        assert!(AttributeSpec::new("x", vec!["a".into(), "a".into()]).is_err());
        assert!(AttributeSpec::new("x", vec![]).is_err());
    }

    #[test]
    fn label_index_bijection() {
        let a = AttributeSpec::new("x", vec!["lo".into(), "mid".into(), "hi".into()]).unwrap();
        for k in 0..3u8 {
            assert_eq!(a.index_of(a.label(k)), Some(k));
        }
        assert_eq!(a.index_of("nope"), None);
    }

    #[test]
    fn dataset_validates_shape_and_range() {
        let attrs = vec![binary("x")];
        assert!(Dataset::new(attrs.clone(), 1, vec![]).is_err());
        assert!(Dataset::new(attrs.clone(), 2, vec![Subject::new("s", vec![Some(0)])]).is_err());
        assert!(Dataset::new(attrs.clone(), 2, vec![Subject::new("s", vec![Some(0), Some(2)])]).is_err());
        let d = Dataset::new(attrs, 2, vec![Subject::new("s", vec![Some(1), None])]).unwrap();
        assert_eq!(d.get(0, 1, 0), None);
        assert_eq!(
            d.missing_cells(),
            vec![CellRef {
                subject: 0,
                slice: 1,
                attribute: 0
            }]
        );
        assert!(!d.is_complete());
    }
}

use rand::seq::index::sample;

use crate::model::{CellRef, Dataset};
use crate::rng::{stream_rng, Stream};
use crate::{Error, Result};

/// Two-parameter MCAR missingness: a fraction of subjects is affected, and
/// within each affected subject a fraction of its cells is blanked.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MissingnessSpec {
    pub pct_subjects: f64,
    pub pct_cells: f64,
    pub seed: u64,
}

impl MissingnessSpec {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("pct_subjects", self.pct_subjects), ("pct_cells", self.pct_cells)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::invalid(format!("{name} must lie in [0, 1], got {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Injected {
    pub dataset: Dataset,
    /// Blanked cells, sorted.
    pub mask: Vec<CellRef>,
    pub notes: Vec<String>,
}

/// `⌈fraction · total⌉`, ignoring float noise just above an integer.
pub fn ceil_count(fraction: f64, total: usize) -> usize {
    ((fraction * total as f64 - 1e-9).ceil().max(0.0) as usize).min(total)
}

/// Blanks `⌈pct_cells · cells⌉` cells in each of `⌈pct_subjects · N⌉`
/// subjects, all chosen uniformly without replacement.
pub fn inject_missing(dataset: &Dataset, spec: &MissingnessSpec) -> Result<Injected> {
    spec.validate()?;
    if !dataset.is_complete() {
        return Err(Error::invalid(
            "missingness can only be injected into a complete dataset",
        ));
    }
    let n = dataset.num_attributes();
    let per_subject = n * dataset.num_slices();
    let mut rng = stream_rng(spec.seed, Stream::Missingness);
    let mut chosen = sample(
        &mut rng,
        dataset.num_subjects(),
        ceil_count(spec.pct_subjects, dataset.num_subjects()),
    )
    .into_vec();
    chosen.sort_unstable();
    let k = ceil_count(spec.pct_cells, per_subject);
    let mut out = dataset.clone();
    let mut mask = Vec::new();
    let mut notes = Vec::new();
    for &s in &chosen {
        let mut cells = sample(&mut rng, per_subject, k).into_vec();
        cells.sort_unstable();
        for c in cells {
            let at = CellRef {
                subject: s,
                slice: c / n,
                attribute: c % n,
            };
            out.set(at, None);
            mask.push(at);
        }
        if k == per_subject && k > 0 {
            notes.push(format!("subject {} is entirely missing", dataset.subjects()[s].id));
        }
    }
    Ok(Injected {
        dataset: out,
        mask,
        notes,
    })
}

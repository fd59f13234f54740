//! Missing-value imputers.
//!
//! [`impute_dbn`] learns a network with Structural EM and then fills each
//! subject's windows in increasing `t` with the most probable joint
//! completion; cells filled in slice `t + 1` are treated as observed by the
//! next window. [`impute_param_em`] does the same over a fixed structure
//! with temporal self-edges only. [`impute_locf`] and [`impute_mode`] are the
//! classical baselines.

use std::fmt;
use std::str::FromStr;

use crate::inference::{posterior_with, TransitionWindow, WindowModel};
use crate::learning::{
    expectation_maximization, random_dbn_for, random_parameters, structural_em, EmStep, LearnConfig, SemInit, SemStep,
};
use crate::model::{CellRef, Dataset, Dbn, DbnParameters, DbnStructure, Value};
use crate::parallel::map_ordered;
use crate::rng::{derive_seed, Stream};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Dbn,
    Locf,
    Mode,
    ParamEm,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Dbn, Method::Locf, Method::Mode, Method::ParamEm];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Dbn => "dbn",
            Method::Locf => "locf",
            Method::Mode => "mode",
            Method::ParamEm => "em",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL.into_iter().find(|m| m.as_str() == s).ok_or_else(|| {
            Error::invalid(format!(
                "unknown imputation method {s:?} (expected dbn, locf, mode or em)"
            ))
        })
    }
}

#[derive(Debug, Clone, Default)]
pub struct Diagnostics {
    /// Windows whose most probable completion was tied with another.
    pub ties: usize,
    /// Windows whose evidence had zero probability under the model.
    pub zero_evidence_fallbacks: usize,
    pub notes: Vec<String>,
    /// Network used for imputation, when the method learns one.
    pub model: Option<Dbn>,
    pub sem_trace: Vec<SemStep>,
    pub em_trace: Vec<EmStep>,
}

#[derive(Debug, Clone)]
pub struct ImputationResult {
    pub dataset: Dataset,
    pub method: Method,
    /// Cells that were missing in the input and have been filled.
    pub imputed: Vec<CellRef>,
    pub diagnostics: Diagnostics,
}

impl ImputationResult {
    /// Per-cell provenance of one subject, `true` for imputed cells, in
    /// row-major (slice, attribute) order.
    pub fn provenance(&self, subject: usize) -> Vec<bool> {
        let n = self.dataset.num_attributes();
        let mut flags = vec![false; n * self.dataset.num_slices()];
        for c in self.imputed.iter().filter(|c| c.subject == subject) {
            flags[c.slice * n + c.attribute] = true;
        }
        flags
    }
}

/// Structural EM from a random network, then the forward argmax sweep.
pub fn impute_dbn(dataset: &Dataset, config: &LearnConfig) -> Result<ImputationResult> {
    config.validate()?;
    let init = match config.sem_init {
        SemInit::Random => random_dbn_for(
            dataset.attributes(),
            config.max_inter_parents,
            derive_seed(config.seed, &[Stream::Init as u64]),
        )?,
        SemInit::Empty => {
            let s = DbnStructure::empty(dataset.num_attributes());
            let params = DbnParameters::uniform(&s, &dataset.cardinalities());
            Dbn::new(dataset.attributes().to_vec(), s, params)?
        }
    };
    let sem = structural_em(init, dataset, config)?;
    let mut result = impute_with_model(dataset, &sem.dbn, config.enumeration_cap, Method::Dbn)?;
    result.diagnostics.sem_trace = sem.trace;
    Ok(result)
}

/// Parameter EM over temporal self-edges `X_i[t] -> X_i[t+1]` from random
/// initial CPTs, then the forward argmax sweep.
pub fn impute_param_em(dataset: &Dataset, config: &LearnConfig) -> Result<ImputationResult> {
    config.validate()?;
    let structure = DbnStructure::self_loops(dataset.num_attributes());
    let init = random_parameters(
        &structure,
        &dataset.cardinalities(),
        derive_seed(config.seed, &[Stream::Init as u64]),
    );
    let em = expectation_maximization(&structure, init, dataset, config)?;
    let dbn = Dbn::new(dataset.attributes().to_vec(), structure, em.params)?;
    let mut result = impute_with_model(dataset, &dbn, config.enumeration_cap, Method::ParamEm)?;
    result.diagnostics.em_trace = em.trace;
    Ok(result)
}

/// Forward sweep with a given network: in every window that still has
/// missing cells, write the most probable joint completion (ties to the
/// lexicographically smallest).
pub fn impute_with_model(dataset: &Dataset, dbn: &Dbn, cap: u64, method: Method) -> Result<ImputationResult> {
    if dataset.cardinalities() != dbn.cardinalities() {
        return Err(Error::invalid("dataset and network attribute domains differ"));
    }
    let n = dataset.num_attributes();
    let model = WindowModel::new(dbn);
    let subjects: Vec<usize> = (0..dataset.num_subjects()).collect();
    let swept = map_ordered(&subjects, |&s| -> Result<(Vec<Option<Value>>, usize, usize)> {
        let mut cells = dataset.subjects()[s].cells().to_vec();
        let (mut ties, mut zero) = (0, 0);
        for t in 0..dataset.num_transitions() {
            let window = TransitionWindow::new(t, cells[t * n..(t + 2) * n].to_vec());
            if window.missing_slots().is_empty() {
                continue;
            }
            let post = posterior_with(&window, &model, cap).map_err(|e| Error::InWindow {
                subject: s,
                t,
                source: Box::new(e),
            })?;
            let (best, tied) = post.argmax();
            ties += tied as usize;
            zero += post.zero_evidence() as usize;
            for (&slot, &v) in post.missing_slots().iter().zip(post.assignment(best)) {
                cells[t * n + slot] = Some(v);
            }
        }
        Ok((cells, ties, zero))
    });

    let mut out = dataset.clone();
    let mut diagnostics = Diagnostics::default();
    for (subject, res) in out.subjects_mut().iter_mut().zip(swept) {
        let (cells, ties, zero) = res?;
        subject.cells_mut().copy_from_slice(&cells);
        diagnostics.ties += ties;
        diagnostics.zero_evidence_fallbacks += zero;
    }
    if diagnostics.zero_evidence_fallbacks > 0 {
        diagnostics.notes.push(format!(
            "{} windows had zero-probability evidence and used a uniform posterior",
            diagnostics.zero_evidence_fallbacks
        ));
    }
    diagnostics.model = Some(dbn.clone());
    Ok(ImputationResult {
        dataset: out,
        method,
        imputed: dataset.missing_cells(),
        diagnostics,
    })
}

/// Last observation carried forward. Leading gaps take the first later
/// observation; an attribute never observed in a subject takes value 0.
pub fn impute_locf(dataset: &Dataset) -> ImputationResult {
    let n = dataset.num_attributes();
    let slices = dataset.num_slices();
    let mut out = dataset.clone();
    let mut diagnostics = Diagnostics::default();
    for subject in out.subjects_mut() {
        let id = subject.id.clone();
        let cells = subject.cells_mut();
        for a in 0..n {
            let first = (0..slices).find_map(|t| cells[t * n + a]);
            let mut last = match first {
                Some(v) => v,
                None => {
                    diagnostics.notes.push(format!(
                        "subject {id}: attribute {a} never observed; filled with value 0"
                    ));
                    0
                }
            };
            for t in 0..slices {
                match cells[t * n + a] {
                    Some(v) => last = v,
                    None => cells[t * n + a] = Some(last),
                }
            }
        }
    }
    ImputationResult {
        dataset: out,
        method: Method::Locf,
        imputed: dataset.missing_cells(),
        diagnostics,
    }
}

/// Most frequent observed value per attribute over all subjects and slices;
/// ties go to the lowest value index.
pub fn impute_mode(dataset: &Dataset) -> ImputationResult {
    let n = dataset.num_attributes();
    let mut freq: Vec<Vec<usize>> = dataset.cardinalities().into_iter().map(|r| vec![0; r]).collect();
    for s in dataset.subjects() {
        for (pos, c) in s.cells().iter().enumerate() {
            if let Some(v) = c {
                freq[pos % n][*v as usize] += 1;
            }
        }
    }
    let mut diagnostics = Diagnostics::default();
    let modes: Vec<Value> = freq
        .iter()
        .enumerate()
        .map(|(a, f)| {
            if f.iter().all(|&c| c == 0) {
                diagnostics
                    .notes
                    .push(format!("attribute {a} has no observed values; filled with value 0"));
            }
            let mut best = 0;
            for (k, &c) in f.iter().enumerate() {
                if c > f[best] {
                    best = k;
                }
            }
            best as Value
        })
        .collect();
    let mut out = dataset.clone();
    for s in out.subjects_mut() {
        for (pos, c) in s.cells_mut().iter_mut().enumerate() {
            if c.is_none() {
                *c = Some(modes[pos % n]);
            }
        }
    }
    ImputationResult {
        dataset: out,
        method: Method::Mode,
        imputed: dataset.missing_cells(),
        diagnostics,
    }
}

/// Dispatches to the imputer for `method`.
pub fn impute(dataset: &Dataset, method: Method, config: &LearnConfig) -> Result<ImputationResult> {
    match method {
        Method::Dbn => impute_dbn(dataset, config),
        Method::ParamEm => impute_param_em(dataset, config),
        Method::Locf => Ok(impute_locf(dataset)),
        Method::Mode => Ok(impute_mode(dataset)),
    }
}

/// Masked cells whose imputed value differs from the original.
pub fn count_errors(original: &Dataset, imputed: &Dataset, mask: &[CellRef]) -> Result<usize> {
    if !original.same_shape(imputed) {
        return Err(Error::invalid("original and imputed datasets differ in shape"));
    }
    let mut errors = 0;
    for &c in mask {
        if c.subject >= original.num_subjects()
            || c.slice >= original.num_slices()
            || c.attribute >= original.num_attributes()
        {
            return Err(Error::invalid(format!("mask cell {c:?} is outside the dataset")));
        }
        let truth = original
            .cell(c)
            .ok_or_else(|| Error::invalid(format!("original dataset is missing masked cell {c:?}")))?;
        if imputed.cell(c) != Some(truth) {
            errors += 1;
        }
    }
    Ok(errors)
}

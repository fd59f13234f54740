//! Exact posteriors over the missing cells of a two-slice window, and the
//! expected sufficient statistics built from them.
//!
//! Each window `{t, t+1}` is conditioned only on its own observed cells. The
//! factors of window `t` are the transition factors of slice `t + 1`, plus the
//! prior factors of slice 0 when `t = 0`. A missing cell in an interior slice
//! therefore gets its expectation as a child in the window that ends at that
//! slice, and is summed out (with no factor of its own) when it appears as a
//! parent in the next window.

use crate::model::{Dataset, Dbn, Family, FamilyIndexer, FamilyKind, FamilyShape, Value};
use crate::parallel::map_ordered;
use crate::scoring::{CountTable, CountTables};
use crate::{Error, Result};

/// Default bound on the number of joint completions enumerated per window.
pub const DEFAULT_ENUMERATION_CAP: u64 = 1_000_000;

/// The `2 × n` cells of slices `t` and `t + 1` of one subject.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionWindow {
    t: usize,
    cells: Vec<Option<Value>>,
    missing: Vec<usize>,
}

impl TransitionWindow {
    /// `cells` holds slice `t` followed by slice `t + 1`.
    pub fn new(t: usize, cells: Vec<Option<Value>>) -> Self {
        let missing = cells
            .iter()
            .enumerate()
            .filter(|(_, c)| c.is_none())
            .map(|(k, _)| k)
            .collect();
        Self { t, cells, missing }
    }

    pub fn from_subject(dataset: &Dataset, subject: usize, t: usize) -> Self {
        let n = dataset.num_attributes();
        let cells = dataset.subjects()[subject].cells()[t * n..(t + 2) * n].to_vec();
        Self::new(t, cells)
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn cells(&self) -> &[Option<Value>] {
        &self.cells
    }

    /// Window slots (`offset * n + attribute`) of the missing cells, ascending.
    pub fn missing_slots(&self) -> &[usize] {
        &self.missing
    }

    /// Missing cells as `(slice offset 0 or 1, attribute)`.
    pub fn missing_positions(&self) -> Vec<(usize, usize)> {
        let n = self.cells.len() / 2;
        self.missing.iter().map(|&k| (k / n, k % n)).collect()
    }
}

/// Log-space factors of a network, prepared for repeated window evaluation.
#[derive(Debug, Clone)]
pub struct WindowModel {
    n: usize,
    cards: Vec<usize>,
    prior: Vec<(FamilyIndexer, Vec<f64>)>,
    transition: Vec<(FamilyIndexer, Vec<f64>)>,
}

impl WindowModel {
    pub fn new(dbn: &Dbn) -> Self {
        let n = dbn.num_vars();
        let prep = |cpts: &[crate::model::Cpt]| {
            cpts.iter()
                .map(|c| (c.shape().indexer(n), c.probs().iter().map(|p| p.ln()).collect()))
                .collect()
        };
        Self {
            n,
            cards: dbn.cardinalities(),
            prior: prep(&dbn.params().prior),
            transition: prep(&dbn.params().transition),
        }
    }

    fn factors(&self, t: usize) -> impl Iterator<Item = &(FamilyIndexer, Vec<f64>)> {
        let prior: &[_] = if t == 0 { &self.prior } else { &[] };
        prior.iter().chain(&self.transition)
    }
}

/// Posterior over the joint completions of a window's missing cells.
///
/// Completions are enumerated in lexicographic order over the missing slots
/// (first slot most significant), so index 0 is the all-zero completion.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowPosterior {
    missing: Vec<usize>,
    assignments: Vec<Value>,
    probs: Vec<f64>,
    log_evidence: f64,
    zero_evidence: bool,
}

impl WindowPosterior {
    pub fn missing_slots(&self) -> &[usize] {
        &self.missing
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn assignment(&self, k: usize) -> &[Value] {
        let m = self.missing.len();
        &self.assignments[k * m..(k + 1) * m]
    }

    pub fn prob(&self, k: usize) -> f64 {
        self.probs[k]
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// `ln Σ_c Π factors(c)`: the window's contribution to the observed-data
    /// log-likelihood. Negative infinity when the evidence is impossible.
    pub fn log_evidence(&self) -> f64 {
        self.log_evidence
    }

    /// True when every completion had zero mass and the posterior fell back
    /// to uniform.
    pub fn zero_evidence(&self) -> bool {
        self.zero_evidence
    }

    /// Most probable completion; ties go to the lexicographically smallest.
    /// Returns the index and whether another completion tied with it.
    pub fn argmax(&self) -> (usize, bool) {
        let mut best = 0;
        let mut tied = false;
        for k in 1..self.probs.len() {
            if self.probs[k] > self.probs[best] {
                best = k;
                tied = false;
            } else if self.probs[k] == self.probs[best] {
                tied = true;
            }
        }
        (best, tied)
    }
}

/// Posterior over the missing cells of `window` given its observed cells.
pub fn window_posterior(window: &TransitionWindow, dbn: &Dbn, cap: u64) -> Result<WindowPosterior> {
    posterior_with(window, &WindowModel::new(dbn), cap)
}

pub(crate) fn posterior_with(window: &TransitionWindow, model: &WindowModel, cap: u64) -> Result<WindowPosterior> {
    let n = model.n;
    debug_assert_eq!(window.cells.len(), 2 * n);
    let missing = window.missing.clone();
    let radices: Vec<usize> = missing.iter().map(|&k| model.cards[k % n]).collect();
    let total: u128 = radices.iter().map(|&r| r as u128).product();
    if total > cap as u128 {
        return Err(Error::EnumerationCap {
            assignments: total,
            cap,
        });
    }
    let total = total as usize;

    let mut work: Vec<Value> = window.cells.iter().map(|c| c.unwrap_or(0)).collect();
    let mut constant = 0.0;
    let mut varying = Vec::new();
    for f in model.factors(window.t) {
        if f.0.touches(&missing) {
            varying.push(f);
        } else {
            constant += f.1[f.0.flat_index(&work)];
        }
    }

    let m = missing.len();
    let mut assignments = vec![0 as Value; total * m];
    let mut log_w = vec![0.0; total];
    let mut digits = vec![0 as Value; m];
    for k in 0..total {
        for (&slot, &d) in missing.iter().zip(&digits) {
            work[slot] = d;
        }
        assignments[k * m..(k + 1) * m].copy_from_slice(&digits);
        log_w[k] = varying.iter().map(|f| f.1[f.0.flat_index(&work)]).sum();
        for pos in (0..m).rev() {
            digits[pos] += 1;
            if (digits[pos] as usize) < radices[pos] {
                break;
            }
            digits[pos] = 0;
        }
    }

    let max = log_w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY || constant == f64::NEG_INFINITY {
        return Ok(WindowPosterior {
            missing,
            assignments,
            probs: vec![1.0 / total as f64; total],
            log_evidence: f64::NEG_INFINITY,
            zero_evidence: true,
        });
    }
    let mut probs: Vec<f64> = log_w.iter().map(|w| (w - max).exp()).collect();
    let sum: f64 = probs.iter().sum();
    for p in &mut probs {
        *p /= sum;
    }
    Ok(WindowPosterior {
        missing,
        assignments,
        probs,
        log_evidence: constant + max + sum.ln(),
        zero_evidence: false,
    })
}

/// Expected sufficient statistics plus the quantities gathered alongside.
#[derive(Debug, Clone)]
pub struct Ess {
    pub counts: CountTables,
    /// `Σ_windows ln Σ_c Π factors`: the windowed observed-data
    /// log-likelihood at the parameters used for inference.
    pub log_likelihood: f64,
    /// Windows whose evidence had zero probability and fell back to a uniform
    /// posterior.
    pub zero_evidence_windows: usize,
}

/// Expected counts for the families of `dbn`'s own structure.
pub fn compute_ess(dbn: &Dbn, dataset: &Dataset, cap: u64) -> Result<Ess> {
    compute_family_ess(dbn, dataset, &dbn.structure().families(), cap)
}

const SUBJECTS_PER_CHUNK: usize = 8;

/// Expected counts `Σ P(x, w | window evidence)` for arbitrary `families`,
/// computed from one posterior per window under `dbn`.
///
/// Subjects are processed in fixed-size chunks whose partial tables are
/// merged in subject order, so the result does not depend on the number of
/// worker threads.
pub fn compute_family_ess(dbn: &Dbn, dataset: &Dataset, families: &[Family], cap: u64) -> Result<Ess> {
    let cards = dataset.cardinalities();
    if cards != dbn.cardinalities() {
        return Err(Error::invalid("dataset and network attribute domains differ"));
    }
    let n = cards.len();
    let model = WindowModel::new(dbn);
    let shapes: Vec<FamilyShape> = families.iter().map(|f| FamilyShape::new(f.clone(), &cards)).collect();
    let indexers: Vec<FamilyIndexer> = shapes.iter().map(|s| s.indexer(n)).collect();
    let is_prior: Vec<bool> = families.iter().map(|f| f.kind == FamilyKind::Prior).collect();

    let subject_ids: Vec<usize> = (0..dataset.num_subjects()).collect();
    let chunks: Vec<&[usize]> = subject_ids.chunks(SUBJECTS_PER_CHUNK).collect();
    let partials = map_ordered(&chunks, |chunk| -> Result<(Vec<Vec<f64>>, f64, usize)> {
        let mut tables: Vec<Vec<f64>> = shapes
            .iter()
            .map(|s| vec![0.0; s.num_configs() * s.child_card])
            .collect();
        let mut ll = 0.0;
        let mut zero = 0;
        let mut work = vec![0 as Value; 2 * n];
        for &s in chunk.iter() {
            for t in 0..dataset.num_transitions() {
                let window = TransitionWindow::from_subject(dataset, s, t);
                let post = posterior_with(&window, &model, cap).map_err(|e| Error::InWindow {
                    subject: s,
                    t,
                    source: Box::new(e),
                })?;
                ll += post.log_evidence;
                zero += post.zero_evidence as usize;
                for (w, c) in work.iter_mut().zip(&window.cells) {
                    *w = c.unwrap_or(0);
                }
                for (f, idx) in indexers.iter().enumerate() {
                    if is_prior[f] && t != 0 {
                        continue;
                    }
                    if !idx.touches(&post.missing) {
                        tables[f][idx.flat_index(&work)] += 1.0;
                        continue;
                    }
                    for k in 0..post.len() {
                        let p = post.probs[k];
                        if p == 0.0 {
                            continue;
                        }
                        for (&slot, &v) in post.missing.iter().zip(post.assignment(k)) {
                            work[slot] = v;
                        }
                        tables[f][idx.flat_index(&work)] += p;
                    }
                }
            }
        }
        Ok((tables, ll, zero))
    });

    let mut totals: Vec<CountTable> = shapes.into_iter().map(CountTable::zeros).collect();
    let mut log_likelihood = 0.0;
    let mut zero_evidence_windows = 0;
    for part in partials {
        let (tables, ll, zero) = part?;
        for (total, part) in totals.iter_mut().zip(tables) {
            for (a, b) in total.counts_mut().iter_mut().zip(part) {
                *a += b;
            }
        }
        log_likelihood += ll;
        zero_evidence_windows += zero;
    }
    Ok(Ess {
        counts: CountTables::new(
            totals,
            dataset.num_subjects(),
            dataset.num_subjects() * dataset.num_transitions(),
        ),
        log_likelihood,
        zero_evidence_windows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{AttributeSpec, DbnParameters, DbnStructure, Subject};
    use crate::scoring::collect_counts;

    fn uniform_dbn(n: usize) -> Dbn {
        let s = DbnStructure::self_loops(n);
        let attrs = (0..n)
            .map(|i| AttributeSpec::numbered(format!("x{i}"), 2).unwrap())
            .collect();
        Dbn::new(attrs, s.clone(), DbnParameters::uniform(&s, &vec![2; n])).unwrap()
    }

    #[test]
    fn no_missing_cells_is_a_point_mass() {
        let dbn = uniform_dbn(2);
        let w = TransitionWindow::new(1, vec![Some(0), Some(1), Some(1), Some(1)]);
        let post = window_posterior(&w, &dbn, DEFAULT_ENUMERATION_CAP).unwrap();
        assert_eq!(post.len(), 1);
        assert_eq!(post.prob(0), 1.0);
        assert!((post.log_evidence() - 0.25f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn single_missing_cell_under_uniform_cpts() {
        let dbn = uniform_dbn(2);
        let w = TransitionWindow::new(3, vec![Some(0), Some(1), None, Some(1)]);
        let post = window_posterior(&w, &dbn, DEFAULT_ENUMERATION_CAP).unwrap();
        assert_eq!(post.probs(), &[0.5, 0.5]);
        assert_eq!(w.missing_positions(), vec![(1, 0)]);
        assert_eq!(post.argmax(), (0, true));
    }

    #[test]
    fn enumeration_cap_is_enforced() {
        let dbn = uniform_dbn(3);
        let w = TransitionWindow::new(0, vec![None; 6]);
        let err = window_posterior(&w, &dbn, 63).unwrap_err();
        assert!(err.is_resource_limit());
        assert!(window_posterior(&w, &dbn, 64).is_ok());
    }

    #[test]
    fn uniform_symmetry_in_ess() {
        let dbn = uniform_dbn(1);
        let attrs = dbn.attributes().to_vec();
        let d = Dataset::new(attrs, 2, vec![Subject::new("s", vec![Some(1), None])]).unwrap();
        let ess = compute_ess(&dbn, &d, DEFAULT_ENUMERATION_CAP).unwrap();
        let t = ess.counts.get(&Family::transition(0, &[0], None)).unwrap();
        assert_eq!(t.counts(), &[0.0, 0.0, 0.5, 0.5]);
        let p = ess.counts.get(&Family::prior(0, None)).unwrap();
        assert_eq!(p.counts(), &[0.0, 1.0]);
    }

    #[test]
    fn complete_data_ess_equals_counts() {
        let dbn = uniform_dbn(2);
        let cells = |v: &[u8]| v.iter().map(|&x| Some(x)).collect();
        let d = Dataset::new(
            dbn.attributes().to_vec(),
            3,
            vec![
                Subject::new("a", cells(&[0, 1, 1, 1, 0, 0])),
                Subject::new("b", cells(&[1, 1, 0, 1, 0, 1])),
            ],
        )
        .unwrap();
        let ess = compute_ess(&dbn, &d, DEFAULT_ENUMERATION_CAP).unwrap();
        let counts = collect_counts(&d, dbn.structure()).unwrap();
        assert_eq!(ess.counts, counts);
    }

    #[test]
    fn zero_evidence_falls_back_to_uniform() {
        let attrs = vec![AttributeSpec::numbered("x", 2).unwrap()];
        let s = DbnStructure::self_loops(1);
        let cards = [2];
        let mut params = DbnParameters::uniform(&s, &cards);
        // x[t+1] copies x[t] deterministically; observing 0 -> ? -> ... is fine,
        // but 0 then 1 is impossible.
        params.transition[0] =
            crate::model::Cpt::new(params.transition[0].shape().clone(), vec![1.0, 0.0, 0.0, 1.0]).unwrap();
        let dbn = Dbn::new(attrs, s, params).unwrap();
        let w = TransitionWindow::new(0, vec![Some(0), Some(1)]);
        let post = window_posterior(&w, &dbn, 10).unwrap();
        assert!(post.zero_evidence());
        assert_eq!(post.log_evidence(), f64::NEG_INFINITY);
    }
}

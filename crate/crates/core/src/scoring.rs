//! Decomposable scores over sufficient statistics.
//!
//! Count tables hold hard counts on complete data and expected counts under
//! EM; the scores below do not care which. Log-likelihood terms use the
//! natural logarithm. The MDL penalty `log(N) / 2 · q (r - 1)` uses base 2 by
//! default ([`PenaltyBase`]).
//!
//! Scores are assembled from `x ln x` terms and penalty products in an
//! [`ExactSum`], so structures with mathematically equal scores (for example
//! the orientations of one undirected tree) get bit-identical totals.

use std::collections::HashMap;

use crate::model::{Dataset, DbnParameters, DbnStructure, Family, FamilyKind, FamilyShape};
use crate::{Error, Result};

/// Logarithm base of the MDL penalty term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PenaltyBase {
    #[default]
    Two,
    Natural,
}

impl PenaltyBase {
    pub fn log(self, x: f64) -> f64 {
        match self {
            PenaltyBase::Two => x.log2(),
            PenaltyBase::Natural => x.ln(),
        }
    }
}

/// Counts `M[w, x]` for one family, laid out `q × r` like a CPT.
#[derive(Debug, Clone, PartialEq)]
pub struct CountTable {
    shape: FamilyShape,
    counts: Vec<f64>,
}

impl CountTable {
    pub fn zeros(shape: FamilyShape) -> Self {
        let len = shape.num_configs() * shape.child_card;
        Self {
            shape,
            counts: vec![0.0; len],
        }
    }

    pub fn from_counts(shape: FamilyShape, counts: Vec<f64>) -> Result<Self> {
        if counts.len() != shape.num_configs() * shape.child_card {
            return Err(Error::invalid("count table has the wrong number of entries"));
        }
        if counts.iter().any(|c| !c.is_finite() || *c < 0.0) {
            return Err(Error::invalid("counts must be finite and non-negative"));
        }
        Ok(Self { shape, counts })
    }

    pub fn shape(&self) -> &FamilyShape {
        &self.shape
    }

    pub fn family(&self) -> &Family {
        &self.shape.family
    }

    pub fn counts(&self) -> &[f64] {
        &self.counts
    }

    pub(crate) fn counts_mut(&mut self) -> &mut [f64] {
        &mut self.counts
    }

    pub fn row(&self, config: usize) -> &[f64] {
        let r = self.shape.child_card;
        &self.counts[config * r..(config + 1) * r]
    }

    pub fn count(&self, config: usize, value: usize) -> f64 {
        self.counts[config * self.shape.child_card + value]
    }

    pub fn total(&self) -> f64 {
        self.counts.iter().sum()
    }

    /// Maximized log-likelihood `Σ M[w,x] ln(M[w,x] / M[w])`, with `0 ln 0 = 0`.
    pub fn max_log_likelihood(&self) -> f64 {
        self.smoothed_max_log_likelihood(0.0)
    }

    /// `max_θ Σ (M[w,x] + α) ln θ[w,x]`, attained at
    /// `θ = (M[w,x] + α) / (M[w] + α r)`.
    pub fn smoothed_max_log_likelihood(&self, alpha: f64) -> f64 {
        let mut acc = ExactSum::default();
        self.add_log_likelihood_terms(alpha, &mut acc);
        acc.value()
    }

    /// Adds `Σ c ln c - Σ_w m_w ln m_w` over smoothed cells `c` and row
    /// totals `m_w`.
    pub(crate) fn add_log_likelihood_terms(&self, alpha: f64, acc: &mut ExactSum) {
        let r = self.shape.child_card;
        for row in self.counts.chunks(r) {
            let total: f64 = row.iter().sum::<f64>() + alpha * r as f64;
            if total <= 0.0 {
                continue;
            }
            for &c in row {
                acc.add(xlogx(c + alpha));
            }
            acc.add(-xlogx(total));
        }
    }
}

fn xlogx(x: f64) -> f64 {
    if x > 0.0 {
        x * x.ln()
    } else {
        0.0
    }
}

/// Exact accumulator over non-overlapping partials (Shewchuk). The value is
/// the correctly rounded sum of everything added, whatever the order.
#[derive(Debug, Clone, Default)]
pub struct ExactSum {
    partials: Vec<f64>,
    nonfinite: Option<f64>,
}

impl ExactSum {
    pub fn add(&mut self, mut x: f64) {
        if !x.is_finite() {
            self.nonfinite = Some(self.nonfinite.unwrap_or(0.0) + x);
            return;
        }
        let mut i = 0;
        for k in 0..self.partials.len() {
            let mut y = self.partials[k];
            if x.abs() < y.abs() {
                std::mem::swap(&mut x, &mut y);
            }
            let hi = x + y;
            let lo = y - (hi - x);
            if lo != 0.0 {
                self.partials[i] = lo;
                i += 1;
            }
            x = hi;
        }
        self.partials.truncate(i);
        self.partials.push(x);
    }

    /// Adds everything accumulated in `other`.
    pub fn merge(&mut self, other: &ExactSum) {
        if let Some(v) = other.nonfinite {
            self.add(v);
        }
        for &x in &other.partials {
            self.add(x);
        }
    }

    /// Adds the exact product `a · b`.
    pub fn add_product(&mut self, a: f64, b: f64) {
        let p = a * b;
        self.add(p);
        self.add(a.mul_add(b, -p));
    }

    pub fn value(&self) -> f64 {
        if let Some(v) = self.nonfinite {
            return v;
        }
        let p = &self.partials;
        let Some(mut n) = p.len().checked_sub(1) else {
            return 0.0;
        };
        let mut hi = p[n];
        let mut lo = 0.0;
        while n > 0 {
            let x = hi;
            let y = p[n - 1];
            n -= 1;
            hi = x + y;
            lo = y - (hi - x);
            if lo != 0.0 {
                break;
            }
        }
        // Round half to even across the remaining partials.
        if n > 0 && ((lo < 0.0 && p[n - 1] < 0.0) || (lo > 0.0 && p[n - 1] > 0.0)) {
            let y = lo * 2.0;
            let x = hi + y;
            if y == x - hi {
                hi = x;
            }
        }
        hi
    }
}

impl Extend<f64> for ExactSum {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for x in iter {
            self.add(x);
        }
    }
}

/// Count tables for a set of families, with the number of instances that fed
/// each kind: subjects for prior families, pooled transitions `N · T` for
/// transition families.
#[derive(Debug, Clone, PartialEq)]
pub struct CountTables {
    tables: Vec<CountTable>,
    index: HashMap<Family, usize>,
    prior_instances: usize,
    transition_instances: usize,
}

impl CountTables {
    pub fn new(tables: Vec<CountTable>, prior_instances: usize, transition_instances: usize) -> Self {
        let index = tables
            .iter()
            .enumerate()
            .map(|(k, t)| (t.family().clone(), k))
            .collect();
        Self {
            tables,
            index,
            prior_instances,
            transition_instances,
        }
    }

    pub fn tables(&self) -> &[CountTable] {
        &self.tables
    }

    pub fn get(&self, family: &Family) -> Option<&CountTable> {
        self.index.get(family).map(|&k| &self.tables[k])
    }

    pub fn expect(&self, family: &Family) -> Result<&CountTable> {
        self.get(family)
            .ok_or_else(|| Error::invalid(format!("no counts collected for family {family:?}")))
    }

    pub fn instances(&self, kind: FamilyKind) -> usize {
        match kind {
            FamilyKind::Prior => self.prior_instances,
            FamilyKind::Transition => self.transition_instances,
        }
    }
}

/// Hard counts for `families` from a complete dataset. Transition families
/// pool every `t -> t+1` transition of every subject; prior families count
/// slice 0.
pub fn collect_family_counts(dataset: &Dataset, families: &[Family]) -> Result<CountTables> {
    let n = dataset.num_attributes();
    let cards = dataset.cardinalities();
    let mut tables: Vec<CountTable> = families
        .iter()
        .map(|f| CountTable::zeros(FamilyShape::new(f.clone(), &cards)))
        .collect();
    let indexers: Vec<_> = tables.iter().map(|t| t.shape.indexer(n)).collect();
    let mut window = vec![0u8; 2 * n];
    for (s, subject) in dataset.subjects().iter().enumerate() {
        let cells = subject.cells();
        if let Some(pos) = cells.iter().position(Option::is_none) {
            return Err(Error::invalid(format!(
                "subject {} has a missing cell at slice {}, attribute {}; counts need complete data",
                dataset.subjects()[s].id,
                pos / n,
                pos % n
            )));
        }
        for t in 0..dataset.num_transitions() {
            for (w, c) in window.iter_mut().zip(&cells[t * n..(t + 2) * n]) {
                *w = c.expect("checked complete");
            }
            for (table, idx) in tables.iter_mut().zip(&indexers) {
                let count = match table.family().kind {
                    FamilyKind::Prior => t == 0,
                    FamilyKind::Transition => true,
                };
                if count {
                    table.counts[idx.flat_index(&window)] += 1.0;
                }
            }
        }
    }
    Ok(CountTables::new(
        tables,
        dataset.num_subjects(),
        dataset.num_subjects() * dataset.num_transitions(),
    ))
}

/// Hard counts for every prior and transition family of `structure`.
pub fn collect_counts(dataset: &Dataset, structure: &DbnStructure) -> Result<CountTables> {
    collect_family_counts(dataset, &structure.families())
}

/// Log-likelihood with a flag for impossible observations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogLikelihood {
    pub value: f64,
    /// Entries with positive count but zero probability. Any such entry makes
    /// `value` negative infinity.
    pub zero_probability_hits: usize,
}

/// `Σ_families Σ_{w,x} M[w,x] ln θ[w,x]` with `0 ln 0 = 0`.
pub fn log_likelihood(counts: &CountTables, params: &DbnParameters) -> Result<LogLikelihood> {
    let mut value = 0.0;
    let mut zero_probability_hits = 0;
    for cpt in params.cpts() {
        let table = counts.expect(cpt.family())?;
        if table.shape != *cpt.shape() {
            return Err(Error::invalid("count table and CPT shapes differ"));
        }
        for (&c, &p) in table.counts.iter().zip(cpt.probs()) {
            if c > 0.0 {
                if p == 0.0 {
                    zero_probability_hits += 1;
                    value = f64::NEG_INFINITY;
                } else {
                    value += c * p.ln();
                }
            }
        }
    }
    Ok(LogLikelihood {
        value,
        zero_probability_hits,
    })
}

/// MDL penalty `log(N) / 2 · q (r - 1)`. `N = 0` contributes no penalty.
pub fn penalty(shape: &FamilyShape, num_instances: usize, base: PenaltyBase) -> f64 {
    if num_instances == 0 {
        return 0.0;
    }
    base.log(num_instances as f64) / 2.0 * shape.num_free_params() as f64
}

/// Adds one family's smoothed local score to `acc`.
pub(crate) fn add_local_score_terms(
    family_counts: &CountTable,
    num_instances: usize,
    alpha: f64,
    base: PenaltyBase,
    acc: &mut ExactSum,
) {
    family_counts.add_log_likelihood_terms(alpha, acc);
    if num_instances > 0 {
        acc.add_product(
            -base.log(num_instances as f64) / 2.0,
            family_counts.shape().num_free_params() as f64,
        );
    }
}

/// Per-family MDL term: maximized log-likelihood minus the penalty.
pub fn local_score(family_counts: &CountTable, num_instances: usize, base: PenaltyBase) -> f64 {
    smoothed_local_score(family_counts, num_instances, 0.0, base)
}

/// [`local_score`] with the log-likelihood maximized under add-`alpha`
/// smoothing, i.e. including the `α Σ ln θ` term of a symmetric Dirichlet
/// prior. Equal to [`local_score`] at `alpha = 0`.
pub fn smoothed_local_score(family_counts: &CountTable, num_instances: usize, alpha: f64, base: PenaltyBase) -> f64 {
    let mut acc = ExactSum::default();
    add_local_score_terms(family_counts, num_instances, alpha, base, &mut acc);
    acc.value()
}

/// MDL score of `structure`: the exact sum of its families' local scores.
pub fn mdl_score(counts: &CountTables, structure: &DbnStructure, base: PenaltyBase) -> Result<f64> {
    let mut acc = ExactSum::default();
    for f in structure.families() {
        add_local_score_terms(counts.expect(&f)?, counts.instances(f.kind), 0.0, base, &mut acc);
    }
    Ok(acc.value())
}

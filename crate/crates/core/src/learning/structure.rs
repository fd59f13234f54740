//! Optimal tree-augmented structure search.
//!
//! For every node the best inter-slice parent set is chosen twice: once with
//! no intra-slice parent (the root score) and once for each possible
//! intra-slice parent. The gains of the intra-slice edges over the root
//! scores then feed a maximum-weight branching, which yields the optimal
//! forest. The prior network is found the same way with no inter-slice
//! candidates.

use crate::model::{DbnStructure, Family, FamilyKind};
use crate::scoring::{add_local_score_terms, CountTable, CountTables, ExactSum, PenaltyBase};
use crate::{Error, Result};

use super::branching::max_weight_branching;

/// Source of (expected) counts for candidate families.
pub trait CountsProvider {
    fn family_counts(&self, family: &Family) -> Result<&CountTable>;
    fn instances(&self, kind: FamilyKind) -> usize;
}

impl CountsProvider for CountTables {
    fn family_counts(&self, family: &Family) -> Result<&CountTable> {
        self.expect(family)
    }

    fn instances(&self, kind: FamilyKind) -> usize {
        CountTables::instances(self, kind)
    }
}

/// The per-family score maximized by the search. `alpha = 0` is plain MDL.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalScore {
    pub alpha: f64,
    pub base: PenaltyBase,
}

impl LocalScore {
    pub fn mdl(base: PenaltyBase) -> Self {
        Self { alpha: 0.0, base }
    }

    pub fn eval(&self, provider: &impl CountsProvider, family: &Family) -> Result<f64> {
        self.total(provider, std::slice::from_ref(family))
    }

    /// Exact sum of the local scores of `families`.
    pub fn total<'a>(
        &self,
        provider: &impl CountsProvider,
        families: impl IntoIterator<Item = &'a Family>,
    ) -> Result<f64> {
        let mut acc = ExactSum::default();
        for f in families {
            self.accumulate(provider, f, &mut acc)?;
        }
        Ok(acc.value())
    }

    /// Adds the unrounded terms of `family`'s local score to `acc`.
    pub fn accumulate(&self, provider: &impl CountsProvider, family: &Family, acc: &mut ExactSum) -> Result<()> {
        let table = provider.family_counts(family)?;
        add_local_score_terms(table, provider.instances(family.kind), self.alpha, self.base, acc);
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LearnedStructure {
    pub structure: DbnStructure,
    /// Exact sum of the chosen families' local scores.
    pub score: f64,
}

/// Every family structure search may ask about: prior families with zero or
/// one slice-0 parent, and transition families with up to `p` inter-slice
/// parents and at most one intra-slice parent. Sorted in tie-breaking order.
pub fn candidate_families(n: usize, p: usize) -> Vec<Family> {
    let mut out = Vec::new();
    for i in 0..n {
        out.push(Family::prior(i, None));
        out.extend((0..n).filter(|&j| j != i).map(|j| Family::prior(i, Some(j))));
    }
    let subsets = inter_subsets(n, p);
    for i in 0..n {
        for s in &subsets {
            out.push(Family::transition(i, s, None));
            out.extend((0..n).filter(|&j| j != i).map(|j| Family::transition(i, s, Some(j))));
        }
    }
    out.sort();
    out
}

/// All subsets of `0..n` of size at most `p`, each sorted ascending.
pub(crate) fn inter_subsets(n: usize, p: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    for _ in 0..p.min(n) {
        let mut next = Vec::new();
        for s in &frontier {
            let start = s.last().map_or(0, |&l: &usize| l + 1);
            for v in start..n {
                let mut t = s.clone();
                t.push(v);
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Best-scoring family among `candidates`; the first (lowest) wins ties.
fn best_of(
    provider: &impl CountsProvider,
    score: LocalScore,
    candidates: impl Iterator<Item = Family>,
) -> Result<(f64, Family)> {
    let mut candidates: Vec<Family> = candidates.collect();
    candidates.sort();
    let mut best: Option<(f64, Family)> = None;
    for f in candidates {
        let s = score.eval(provider, &f)?;
        if best.as_ref().is_none_or(|(b, _)| s > *b) {
            best = Some((s, f));
        }
    }
    best.ok_or_else(|| Error::invalid("no candidate families"))
}

struct Forest {
    parent: Vec<Option<usize>>,
    families: Vec<Family>,
}

/// Solves one slice: `family(i, intra)` enumerates the candidates for node
/// `i` with the given intra-slice parent.
fn solve_forest<F, I>(n: usize, provider: &impl CountsProvider, score: LocalScore, family: F) -> Result<Forest>
where
    F: Fn(usize, Option<usize>) -> I,
    I: Iterator<Item = Family>,
{
    let mut root = Vec::with_capacity(n);
    for i in 0..n {
        root.push(best_of(provider, score, family(i, None))?);
    }
    let mut with_parent: Vec<Vec<Option<(f64, Family)>>> = vec![vec![None; n]; n];
    let mut gains = vec![vec![None; n]; n];
    for i in 0..n {
        for j in (0..n).filter(|&j| j != i) {
            let best = best_of(provider, score, family(i, Some(j)))?;
            gains[j][i] = Some(best.0 - root[i].0);
            with_parent[j][i] = Some(best);
        }
    }
    let parent = max_weight_branching(&gains);
    let families = (0..n)
        .map(|i| match parent[i] {
            Some(j) => with_parent[j][i].take().unwrap().1,
            None => root[i].1.clone(),
        })
        .collect();
    Ok(Forest { parent, families })
}

/// Finds the tree-augmented structure with the highest total local score,
/// with at most `p` inter-slice parents per node.
pub fn learn_structure_tdbn(
    provider: &impl CountsProvider,
    n: usize,
    p: usize,
    score: LocalScore,
) -> Result<LearnedStructure> {
    let prior = solve_forest(n, provider, score, |i, intra| std::iter::once(Family::prior(i, intra)))?;
    let subsets = inter_subsets(n, p);
    let transition = solve_forest(n, provider, score, |i, intra| {
        subsets
            .iter()
            .map(move |s| Family::transition(i, s, intra))
            .collect::<Vec<_>>()
            .into_iter()
    })?;
    let structure = DbnStructure::new(
        prior.parent,
        transition.parent,
        transition
            .families
            .iter()
            .map(|f| f.inter_parents().collect())
            .collect(),
    )?;
    let score = score.total(provider, prior.families.iter().chain(&transition.families))?;
    Ok(LearnedStructure { structure, score })
}

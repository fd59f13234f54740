//! Structure and parameter learning for tree-augmented DBNs.

mod branching;
mod em;
mod random;
mod sem;
mod structure;

pub use branching::max_weight_branching;
pub use em::{expectation_maximization, EmResult, EmStep};
pub use random::{random_arborescence, random_dbn, random_dbn_for, random_parameters};
pub use sem::{structural_em, structure_score, SemResult, SemStep};
pub use structure::{candidate_families, learn_structure_tdbn, CountsProvider, LearnedStructure, LocalScore};

use crate::inference::DEFAULT_ENUMERATION_CAP;
use crate::model::{Cpt, DbnParameters, DbnStructure, FamilyShape};
use crate::scoring::{CountTables, PenaltyBase};
use crate::{Error, Result};

/// Initial structure for Structural EM.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SemInit {
    /// A random tree-augmented network with random CPTs.
    #[default]
    Random,
    /// No edges, uniform CPTs.
    Empty,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LearnConfig {
    /// Inter-slice parents per transition node.
    pub max_inter_parents: usize,
    pub em_max_iters: usize,
    /// Stop EM once the relative objective gain drops below this.
    pub em_rel_tol: f64,
    pub sem_max_iters: usize,
    /// Add-α smoothing applied in every M-step.
    pub smoothing_alpha: f64,
    pub seed: u64,
    /// Joint completions allowed per window.
    pub enumeration_cap: u64,
    pub penalty_base: PenaltyBase,
    /// Run parameter EM before each structure step of Structural EM.
    pub param_em_in_sem: bool,
    pub sem_init: SemInit,
}

impl Default for LearnConfig {
    fn default() -> Self {
        Self {
            max_inter_parents: 1,
            em_max_iters: 100,
            em_rel_tol: 1e-4,
            sem_max_iters: 20,
            smoothing_alpha: 1.0,
            seed: 0,
            enumeration_cap: DEFAULT_ENUMERATION_CAP,
            penalty_base: PenaltyBase::Two,
            param_em_in_sem: true,
            sem_init: SemInit::Random,
        }
    }
}

impl LearnConfig {
    pub fn validate(&self) -> Result<()> {
        if self.em_max_iters == 0 || self.sem_max_iters == 0 {
            return Err(Error::invalid("iteration limits must be at least 1"));
        }
        if !(self.em_rel_tol.is_finite() && self.em_rel_tol > 0.0) {
            return Err(Error::invalid("em_rel_tol must be positive"));
        }
        if !(self.smoothing_alpha.is_finite() && self.smoothing_alpha >= 0.0) {
            return Err(Error::invalid("smoothing_alpha must be finite and non-negative"));
        }
        if self.enumeration_cap == 0 {
            return Err(Error::invalid("enumeration_cap must be at least 1"));
        }
        Ok(())
    }

    /// Local score used by Structural EM's structure step.
    pub fn local_score(&self) -> LocalScore {
        LocalScore {
            alpha: self.smoothing_alpha,
            base: self.penalty_base,
        }
    }
}

/// M-step: `θ[w,x] = (M[w,x] + α) / (M[w] + α r)` for every family of
/// `structure`. A row with no mass at `α = 0` becomes uniform.
pub fn mle_parameters(counts: &CountTables, structure: &DbnStructure, alpha: f64) -> Result<DbnParameters> {
    let estimate = |f| -> Result<Cpt> {
        let table = counts.expect(&f)?;
        Ok(estimate_cpt(table.shape().clone(), table.counts(), alpha))
    };
    let n = structure.num_vars();
    Ok(DbnParameters {
        prior: (0..n)
            .map(|i| estimate(structure.prior_family(i)))
            .collect::<Result<_>>()?,
        transition: (0..n)
            .map(|i| estimate(structure.transition_family(i)))
            .collect::<Result<_>>()?,
    })
}

pub(crate) fn estimate_cpt(shape: FamilyShape, counts: &[f64], alpha: f64) -> Cpt {
    let r = shape.child_card;
    let mut probs = Vec::with_capacity(counts.len());
    for row in counts.chunks(r) {
        let total = row.iter().sum::<f64>() + alpha * r as f64;
        if total > 0.0 {
            probs.extend(row.iter().map(|c| (c + alpha) / total));
        } else {
            probs.extend(std::iter::repeat_n(1.0 / r as f64, r));
        }
    }
    Cpt::new(shape, probs).expect("normalized rows")
}

use crate::inference::{compute_ess, compute_family_ess};
use crate::model::{Dataset, Dbn, DbnStructure};
use crate::scoring::{penalty, CountTables, PenaltyBase};
use crate::Result;

use super::em::relative_gain;
use super::structure::{candidate_families, learn_structure_tdbn};
use super::{expectation_maximization, mle_parameters, LearnConfig};

/// One row of the Structural EM trace. Row 0 is the initial network.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SemStep {
    pub iteration: usize,
    /// Windowed observed-data log-likelihood of the network after this step.
    pub log_likelihood: f64,
    /// Penalized score: `log_likelihood + α Σ ln θ - MDL penalty`. With
    /// `α = 0` this is the observed-data MDL score.
    pub score: f64,
    pub structure_changed: bool,
    /// M-steps taken by the parameter EM phase of this iteration.
    pub em_iterations: usize,
}

#[derive(Debug, Clone)]
pub struct SemResult {
    pub dbn: Dbn,
    pub trace: Vec<SemStep>,
    pub converged: bool,
    pub zero_evidence_windows: usize,
}

impl SemResult {
    pub fn iterations(&self) -> usize {
        self.trace.len() - 1
    }
}

/// Total MDL penalty of `structure` with the instance counts of `counts`.
pub(crate) fn structure_penalty(structure: &DbnStructure, counts: &CountTables, base: PenaltyBase) -> Result<f64> {
    structure.families().iter().try_fold(0.0, |acc, f| {
        Ok(acc + penalty(counts.expect(f)?.shape(), counts.instances(f.kind), base))
    })
}

/// Penalized observed-data score of `dbn` and its log-likelihood, as
/// recorded in the Structural EM trace.
pub fn structure_score(dbn: &Dbn, dataset: &Dataset, config: &LearnConfig) -> Result<(f64, f64)> {
    let ess = compute_ess(dbn, dataset, config.enumeration_cap)?;
    let pen = structure_penalty(dbn.structure(), &ess.counts, config.penalty_base)?;
    let prior_term = if config.smoothing_alpha == 0.0 {
        0.0
    } else {
        config.smoothing_alpha * dbn.params().sum_log_probs()
    };
    Ok((ess.log_likelihood, ess.log_likelihood + prior_term - pen))
}

/// Structural EM over tree-augmented DBNs.
///
/// Each iteration runs parameter EM under the current structure, computes
/// expected counts for every candidate family from the resulting posterior,
/// picks the best structure for those counts, and re-estimates its
/// parameters. It stops when the structure is unchanged and the score gain is
/// below `em_rel_tol` (relative), after `sem_max_iters` iterations, or after
/// one iteration on complete data.
pub fn structural_em(init: Dbn, dataset: &Dataset, config: &LearnConfig) -> Result<SemResult> {
    config.validate()?;
    let n = dataset.num_attributes();
    let attrs = dataset.attributes().to_vec();
    let candidates = candidate_families(n, config.max_inter_parents);
    let complete = dataset.is_complete();
    let alpha = config.smoothing_alpha;

    let (ll, score) = structure_score(&init, dataset, config)?;
    let mut trace = vec![SemStep {
        iteration: 0,
        log_likelihood: ll,
        score,
        structure_changed: false,
        em_iterations: 0,
    }];
    let mut current = init;
    let mut converged = false;
    let mut zero_evidence_windows = 0;
    for iteration in 1..=config.sem_max_iters {
        let (_, structure, params) = current.into_parts();
        let (params, em_iterations) = if config.param_em_in_sem {
            let em = expectation_maximization(&structure, params, dataset, config)?;
            let iters = em.iterations();
            (em.params, iters)
        } else {
            (params, 0)
        };
        let fitted = Dbn::new(attrs.clone(), structure.clone(), params)?;
        let ess = compute_family_ess(&fitted, dataset, &candidates, config.enumeration_cap)?;
        zero_evidence_windows = ess.zero_evidence_windows;
        let learned = learn_structure_tdbn(&ess.counts, n, config.max_inter_parents, config.local_score())?;
        let params = mle_parameters(&ess.counts, &learned.structure, alpha)?;
        let changed = learned.structure != structure;
        current = Dbn::new(attrs.clone(), learned.structure, params)?;
        let (ll, score) = structure_score(&current, dataset, config)?;
        let previous = trace.last().unwrap().score;
        trace.push(SemStep {
            iteration,
            log_likelihood: ll,
            score,
            structure_changed: changed,
            em_iterations,
        });
        if complete || (!changed && relative_gain(previous, score) < config.em_rel_tol) {
            converged = true;
            break;
        }
    }
    Ok(SemResult {
        dbn: current,
        trace,
        converged,
        zero_evidence_windows,
    })
}

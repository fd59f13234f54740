use crate::inference::compute_ess;
use crate::model::{Dataset, Dbn, DbnParameters, DbnStructure};
use crate::Result;

use super::{mle_parameters, LearnConfig};

/// One row of the EM trace, evaluated at the parameters after `iteration`
/// M-steps (row 0 is the initial parameters).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmStep {
    pub iteration: usize,
    /// Windowed observed-data log-likelihood.
    pub log_likelihood: f64,
    /// `log_likelihood + α Σ ln θ`, the quantity each smoothed M-step cannot
    /// decrease. Equal to `log_likelihood` when `α = 0`.
    pub objective: f64,
}

#[derive(Debug, Clone)]
pub struct EmResult {
    pub params: DbnParameters,
    pub trace: Vec<EmStep>,
    pub converged: bool,
    pub zero_evidence_windows: usize,
}

impl EmResult {
    /// Number of M-steps performed.
    pub fn iterations(&self) -> usize {
        self.trace.len() - 1
    }
}

/// Parameter EM for a fixed structure: alternate expected counts (E-step) and
/// smoothed maximum likelihood (M-step) until the relative gain of the
/// objective falls below `config.em_rel_tol` or `config.em_max_iters` is
/// reached. On a complete dataset the expected counts do not depend on the
/// parameters, so a single M-step reaches the fixed point.
pub fn expectation_maximization(
    structure: &DbnStructure,
    init_params: DbnParameters,
    dataset: &Dataset,
    config: &LearnConfig,
) -> Result<EmResult> {
    config.validate()?;
    let alpha = config.smoothing_alpha;
    let attrs = dataset.attributes().to_vec();
    let complete = dataset.is_complete();
    let step = |iteration, ll: f64, params: &DbnParameters| EmStep {
        iteration,
        log_likelihood: ll,
        objective: if alpha == 0.0 {
            ll
        } else {
            ll + alpha * params.sum_log_probs()
        },
    };

    let mut dbn = Dbn::new(attrs.clone(), structure.clone(), init_params)?;
    let mut ess = compute_ess(&dbn, dataset, config.enumeration_cap)?;
    let mut trace = vec![step(0, ess.log_likelihood, dbn.params())];
    let mut converged = false;
    for iteration in 1..=config.em_max_iters {
        let params = mle_parameters(&ess.counts, structure, alpha)?;
        dbn = Dbn::new(attrs.clone(), structure.clone(), params)?;
        ess = compute_ess(&dbn, dataset, config.enumeration_cap)?;
        let current = step(iteration, ess.log_likelihood, dbn.params());
        let previous = trace.last().unwrap().objective;
        trace.push(current);
        if complete || relative_gain(previous, current.objective) < config.em_rel_tol {
            converged = true;
            break;
        }
    }
    let (_, _, params) = dbn.into_parts();
    Ok(EmResult {
        params,
        trace,
        converged,
        zero_evidence_windows: ess.zero_evidence_windows,
    })
}

pub(crate) fn relative_gain(previous: f64, current: f64) -> f64 {
    if !previous.is_finite() || !current.is_finite() {
        return if current > previous { f64::INFINITY } else { 0.0 };
    }
    if previous == 0.0 {
        return (current - previous).abs();
    }
    (current - previous) / previous.abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{AttributeSpec, Subject};

    fn attrs(n: usize) -> Vec<AttributeSpec> {
        (0..n)
            .map(|i| AttributeSpec::numbered(format!("x{i}"), 2).unwrap())
            .collect()
    }

    #[test]
    fn complete_data_converges_in_one_step() {
        let rows: Vec<Vec<Option<u8>>> = vec![vec![0, 1, 1, 1, 0, 0], vec![1, 1, 0, 1, 0, 1]]
            .into_iter()
            .map(|r| r.into_iter().map(Some).collect())
            .collect();
        let d = Dataset::new(
            attrs(2),
            3,
            rows.into_iter()
                .enumerate()
                .map(|(k, c)| Subject::new(format!("s{k}"), c))
                .collect(),
        )
        .unwrap();
        let s = DbnStructure::self_loops(2);
        let config = LearnConfig::default();
        let res = expectation_maximization(&s, DbnParameters::uniform(&s, &[2, 2]), &d, &config).unwrap();
        assert_eq!(res.iterations(), 1);
        assert!(res.converged);
        let counts = crate::scoring::collect_counts(&d, &s).unwrap();
        assert_eq!(res.params, mle_parameters(&counts, &s, 1.0).unwrap());
    }

    #[test]
    fn fully_missing_variable_stays_uniform() {
        // x1 is never observed; x0 is.
        let subjects = (0..6)
            .map(|k| {
                let cells = (0..4).flat_map(|t| [Some(((k + t) % 2) as u8), None]).collect();
                Subject::new(format!("s{k}"), cells)
            })
            .collect();
        let d = Dataset::new(attrs(2), 4, subjects).unwrap();
        let s = DbnStructure::self_loops(2);
        let res =
            expectation_maximization(&s, DbnParameters::uniform(&s, &[2, 2]), &d, &LearnConfig::default()).unwrap();
        for cpt in [&res.params.prior[1], &res.params.transition[1]] {
            for p in cpt.probs() {
                assert!((p - 0.5).abs() < 1e-12, "{cpt:?}");
            }
        }
    }

    #[test]
    fn relative_gain_edge_cases() {
        assert_eq!(relative_gain(-10.0, -9.0), 0.1);
        assert_eq!(relative_gain(f64::NEG_INFINITY, -3.0), f64::INFINITY);
        assert_eq!(relative_gain(0.0, 0.0), 0.0);
    }
}

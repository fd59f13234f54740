//! Synthetic experiments: sampling from known networks, missingness
//! injection, imputer comparison over a missingness grid and the Wilcoxon
//! signed-rank comparison of the DBN imputer against each baseline.

mod missing;
mod report;
mod sampling;
mod wilcoxon;

pub use missing::{ceil_count, inject_missing, Injected, MissingnessSpec};
pub use report::{
    parse_report, parse_wilcoxon_table, write_report, write_wilcoxon_table, BenchRow, WilcoxonRow, REPORT_HEADER,
};
pub use sampling::sample_dataset;
pub use wilcoxon::{wilcoxon_exact, wilcoxon_normal, wilcoxon_signed_rank, PMethod, WilcoxonResult, EXACT_MAX_N};

use std::collections::BTreeMap;

use crate::imputation::{count_errors, impute, Method};
use crate::learning::{random_dbn, LearnConfig};
use crate::model::Dataset;
use crate::parallel::map_ordered;
use crate::rng::derive_seed;
use crate::{Error, Result};

/// Default missingness levels, as fractions.
pub const DEFAULT_LEVELS: [f64; 4] = [0.1, 0.2, 0.3, 0.4];

/// Where the complete data of a benchmark dataset comes from.
#[derive(Debug, Clone)]
pub enum DataSource {
    /// Sampled afresh for every seed from a random network.
    Synthetic {
        num_vars: usize,
        cardinality: usize,
        num_subjects: usize,
        num_slices: usize,
        max_inter_parents: usize,
    },
    /// A fixed complete dataset; only the masks vary with the seed.
    Given(Dataset),
}

#[derive(Debug, Clone)]
pub struct BenchDataset {
    pub name: String,
    pub source: DataSource,
}

impl BenchDataset {
    pub fn synthetic(num_vars: usize, cardinality: usize, num_subjects: usize, num_slices: usize) -> Self {
        Self {
            name: format!("synthetic_n{num_vars}_r{cardinality}_N{num_subjects}_T{num_slices}"),
            source: DataSource::Synthetic {
                num_vars,
                cardinality,
                num_subjects,
                num_slices,
                max_inter_parents: 1,
            },
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub datasets: Vec<BenchDataset>,
    pub pct_subjects: Vec<f64>,
    pub pct_cells: Vec<f64>,
    pub seeds: Vec<u64>,
    pub methods: Vec<Method>,
    /// Learner settings; its seed is replaced per grid point.
    pub learn: LearnConfig,
    /// Method the others are compared against.
    pub reference: Method,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            datasets: vec![BenchDataset::synthetic(5, 2, 100, 10)],
            pct_subjects: DEFAULT_LEVELS.to_vec(),
            pct_cells: DEFAULT_LEVELS.to_vec(),
            seeds: (1..=10).collect(),
            methods: vec![Method::Dbn, Method::Locf, Method::Mode],
            learn: LearnConfig::default(),
            reference: Method::Dbn,
        }
    }
}

impl BenchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.datasets.is_empty() || self.seeds.is_empty() || self.methods.is_empty() {
            return Err(Error::invalid("benchmark needs at least one dataset, seed and method"));
        }
        if self.pct_subjects.is_empty() || self.pct_cells.is_empty() {
            return Err(Error::invalid("benchmark needs at least one missingness level"));
        }
        for &p in self.pct_subjects.iter().chain(&self.pct_cells) {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::invalid(format!("missingness level {p} outside [0, 1]")));
            }
        }
        for d in &self.datasets {
            match &d.source {
                DataSource::Synthetic {
                    num_vars,
                    cardinality,
                    num_slices,
                    ..
                } => {
                    if *num_vars == 0 || *cardinality == 0 || *num_slices < 2 {
                        return Err(Error::invalid(format!(
                            "dataset {}: degenerate synthetic shape",
                            d.name
                        )));
                    }
                }
                DataSource::Given(data) => {
                    if !data.is_complete() {
                        return Err(Error::invalid(format!("dataset {} must be complete", d.name)));
                    }
                }
            }
        }
        self.learn.validate()
    }
}

#[derive(Debug, Clone)]
pub struct BenchReport {
    /// One row per (dataset, seed, pct_subjects, pct_cells, method) in grid
    /// order.
    pub rows: Vec<BenchRow>,
    /// Reference method against each other method, by subject level.
    pub wilcoxon: Vec<WilcoxonRow>,
    pub levels: Vec<f64>,
    /// Grid points where a method failed; their rows carry no error count.
    pub failures: Vec<String>,
}

impl BenchReport {
    /// Mean error count of `method` at one grid point across datasets and
    /// seeds, skipping failed runs.
    pub fn mean_errors(&self, method: Method, pct_subjects: f64, pct_cells: f64) -> Option<f64> {
        let errs: Vec<f64> = self
            .rows
            .iter()
            .filter(|r| r.method == method.as_str() && r.pct_subjects == pct_subjects && r.pct_cells == pct_cells)
            .filter_map(|r| r.errors.map(|e| e as f64))
            .collect();
        (!errs.is_empty()).then(|| errs.iter().sum::<f64>() / errs.len() as f64)
    }
}

struct GridPoint {
    dataset: usize,
    seed: u64,
    ps: usize,
    pc: usize,
}

/// Complete data for one dataset and seed.
fn complete_data(config: &BenchConfig, d: usize, seed: u64) -> Result<Dataset> {
    match &config.datasets[d].source {
        DataSource::Given(data) => Ok(data.clone()),
        DataSource::Synthetic {
            num_vars,
            cardinality,
            num_subjects,
            num_slices,
            max_inter_parents,
        } => {
            let truth = random_dbn(
                &vec![*cardinality; *num_vars],
                *max_inter_parents,
                derive_seed(seed, &[d as u64, 1]),
            )?;
            sample_dataset(&truth, *num_subjects, *num_slices, derive_seed(seed, &[d as u64, 2]))
        }
    }
}

/// Runs every method at every grid point. Grid points run in parallel but
/// each is seeded from its coordinates, so the report does not depend on
/// scheduling.
pub fn run_benchmark(config: &BenchConfig) -> Result<BenchReport> {
    config.validate()?;
    let mut complete = Vec::new();
    for d in 0..config.datasets.len() {
        for &seed in &config.seeds {
            complete.push(complete_data(config, d, seed)?);
        }
    }
    let mut points = Vec::new();
    for d in 0..config.datasets.len() {
        for &seed in &config.seeds {
            for ps in 0..config.pct_subjects.len() {
                for pc in 0..config.pct_cells.len() {
                    points.push(GridPoint {
                        dataset: d,
                        seed,
                        ps,
                        pc,
                    });
                }
            }
        }
    }
    let results = map_ordered(&points, |p| {
        let si = config.seeds.iter().position(|&s| s == p.seed).unwrap_or(0);
        run_point(config, &complete[p.dataset * config.seeds.len() + si], p)
    });
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (r, f) in results {
        rows.extend(r);
        failures.extend(f);
    }
    let levels = config.pct_subjects.clone();
    let others: Vec<&str> = config
        .methods
        .iter()
        .filter(|&&m| m != config.reference)
        .map(|m| m.as_str())
        .collect();
    let wilcoxon = wilcoxon_table(&rows, config.reference.as_str(), &others, &levels);
    Ok(BenchReport {
        rows,
        wilcoxon,
        levels,
        failures,
    })
}

fn run_point(config: &BenchConfig, data: &Dataset, p: &GridPoint) -> (Vec<BenchRow>, Vec<String>) {
    let pct_subjects = config.pct_subjects[p.ps];
    let pct_cells = config.pct_cells[p.pc];
    let tags = [p.dataset as u64, p.ps as u64, p.pc as u64];
    let name = &config.datasets[p.dataset].name;
    let spec = MissingnessSpec {
        pct_subjects,
        pct_cells,
        seed: derive_seed(p.seed, &[tags[0], tags[1], tags[2], 3]),
    };
    let learn = LearnConfig {
        seed: derive_seed(p.seed, &[tags[0], tags[1], tags[2], 4]),
        ..config.learn.clone()
    };
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    let injected = match inject_missing(data, &spec) {
        Ok(i) => i,
        Err(e) => {
            failures.push(format!("{name} seed {} ({pct_subjects}, {pct_cells}): {e}", p.seed));
            return (rows, failures);
        }
    };
    let masked = injected.mask.len();
    for &method in &config.methods {
        let errors =
            impute(&injected.dataset, method, &learn).and_then(|r| count_errors(data, &r.dataset, &injected.mask));
        let errors = match errors {
            Ok(e) => Some(e),
            Err(e) => {
                failures.push(format!(
                    "{name} seed {} ({pct_subjects}, {pct_cells}) {method}: {e}",
                    p.seed
                ));
                None
            }
        };
        rows.push(BenchRow {
            dataset: name.clone(),
            method: method.as_str().to_string(),
            pct_subjects,
            pct_cells,
            seed: p.seed,
            masked_cells: masked,
            errors,
        });
    }
    (rows, failures)
}

/// Wilcoxon p-values of `reference` against each of `others`, one per
/// subject level, pairing runs by (dataset, seed, cell level). A p-value is
/// `None` when no paired runs differ.
pub fn wilcoxon_table(rows: &[BenchRow], reference: &str, others: &[&str], levels: &[f64]) -> Vec<WilcoxonRow> {
    let runs = |method: &str, level: f64| {
        rows.iter()
            .filter(|r| r.method == method && r.pct_subjects == level)
            .filter_map(|r| {
                r.errors
                    .map(|e| ((r.dataset.as_str(), r.seed, r.pct_cells.to_bits()), e as f64))
            })
            .collect::<BTreeMap<_, _>>()
    };
    others
        .iter()
        .map(|&other| WilcoxonRow {
            method: other.to_string(),
            p_values: levels
                .iter()
                .map(|&level| {
                    let b = runs(other, level);
                    let pairs: Vec<(f64, f64)> = runs(reference, level)
                        .into_iter()
                        .filter_map(|(k, x)| b.get(&k).map(|&y| (x, y)))
                        .collect();
                    wilcoxon_signed_rank(&pairs).ok().map(|r| r.p_value)
                })
                .collect(),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_missingness_means_zero_errors() {
        let data = sample_dataset(&random_dbn(&[2, 2, 3], 1, 4).unwrap(), 8, 5, 2).unwrap();
        let config = BenchConfig {
            datasets: vec![BenchDataset {
                name: "fixed".into(),
                source: DataSource::Given(data),
            }],
            pct_subjects: vec![0.0],
            pct_cells: vec![0.0],
            seeds: vec![1, 2],
            methods: Method::ALL.to_vec(),
            ..Default::default()
        };
        let report = run_benchmark(&config).unwrap();
        assert_eq!(report.rows.len(), 8);
        assert!(report.rows.iter().all(|r| r.errors == Some(0) && r.masked_cells == 0));
        assert!(report.failures.is_empty());
        assert!(report.wilcoxon.iter().all(|w| w.p_values == vec![None]));
    }

    #[test]
    fn small_grid_is_reproducible() {
        let config = BenchConfig {
            datasets: vec![BenchDataset::synthetic(3, 2, 20, 5)],
            pct_subjects: vec![0.2, 0.4],
            pct_cells: vec![0.2],
            seeds: vec![1, 2, 3],
            learn: LearnConfig {
                sem_max_iters: 3,
                em_max_iters: 10,
                ..Default::default()
            },
            ..Default::default()
        };
        let a = run_benchmark(&config).unwrap();
        let b = run_benchmark(&config).unwrap();
        assert_eq!(a.rows, b.rows);
        assert_eq!(a.rows.len(), 3 * 2 * 3);
        for r in &a.rows {
            assert!(r.errors.unwrap() <= r.masked_cells);
            assert_eq!(r.masked_cells, ceil_count(r.pct_subjects, 20) * ceil_count(0.2, 15));
        }
        assert_eq!(a.wilcoxon.len(), 2);
    }
}

use super::dataset::{AttributeSpec, Value};
use super::family::{Family, FamilyShape};
use crate::{Error, Result};

/// Tolerance on CPT row sums.
pub const ROW_SUM_TOLERANCE: f64 = 1e-9;

/// Structure of a stationary first-order tree-augmented DBN.
///
/// The prior network over slice 0 and the intra-slice part of the transition
/// network each give every node at most one same-slice parent, and the parent
/// links must be acyclic. Inter-slice parents always point forward in time.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DbnStructure {
    prior_parent: Vec<Option<usize>>,
    intra_parent: Vec<Option<usize>>,
    inter_parents: Vec<Vec<usize>>,
}

impl DbnStructure {
    pub fn new(
        prior_parent: Vec<Option<usize>>,
        intra_parent: Vec<Option<usize>>,
        mut inter_parents: Vec<Vec<usize>>,
    ) -> Result<Self> {
        let n = prior_parent.len();
        if intra_parent.len() != n || inter_parents.len() != n {
            return Err(Error::invalid("structure component lengths disagree"));
        }
        for (label, parents) in [("prior", &prior_parent), ("intra-slice", &intra_parent)] {
            for (i, p) in parents.iter().enumerate() {
                if let Some(p) = *p {
                    if p >= n || p == i {
                        return Err(Error::invalid(format!("{label} parent {p} of node {i} is invalid")));
                    }
                }
            }
            if topological_order(parents).is_none() {
                return Err(Error::invalid(format!("{label} edges contain a cycle")));
            }
        }
        for (i, set) in inter_parents.iter_mut().enumerate() {
            set.sort_unstable();
            set.dedup();
            if set.iter().any(|&p| p >= n) {
                return Err(Error::invalid(format!("inter-slice parent of node {i} out of range")));
            }
        }
        Ok(Self {
            prior_parent,
            intra_parent,
            inter_parents,
        })
    }

    /// No edges at all.
    pub fn empty(n: usize) -> Self {
        Self {
            prior_parent: vec![None; n],
            intra_parent: vec![None; n],
            inter_parents: vec![Vec::new(); n],
        }
    }

    /// Only the temporal self-edges `X_i[t] -> X_i[t+1]`.
    pub fn self_loops(n: usize) -> Self {
        Self {
            prior_parent: vec![None; n],
            intra_parent: vec![None; n],
            inter_parents: (0..n).map(|i| vec![i]).collect(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.prior_parent.len()
    }

    pub fn prior_parent(&self, i: usize) -> Option<usize> {
        self.prior_parent[i]
    }

    pub fn intra_parent(&self, i: usize) -> Option<usize> {
        self.intra_parent[i]
    }

    pub fn inter_parents(&self, i: usize) -> &[usize] {
        &self.inter_parents[i]
    }

    pub fn prior_parents(&self) -> &[Option<usize>] {
        &self.prior_parent
    }

    pub fn intra_parents(&self) -> &[Option<usize>] {
        &self.intra_parent
    }

    /// Edges `(parent, child)` within slice 0.
    pub fn prior_edges(&self) -> Vec<(usize, usize)> {
        edges(&self.prior_parent)
    }

    /// Edges `(parent, child)` within slice `t + 1`.
    pub fn intra_edges(&self) -> Vec<(usize, usize)> {
        edges(&self.intra_parent)
    }

    /// Edges `(parent in slice t, child in slice t + 1)`.
    pub fn inter_edges(&self) -> Vec<(usize, usize)> {
        self.inter_parents
            .iter()
            .enumerate()
            .flat_map(|(c, ps)| ps.iter().map(move |&p| (p, c)))
            .collect()
    }

    pub fn max_inter_parents(&self) -> usize {
        self.inter_parents.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn prior_family(&self, i: usize) -> Family {
        Family::prior(i, self.prior_parent[i])
    }

    pub fn transition_family(&self, i: usize) -> Family {
        Family::transition(i, &self.inter_parents[i], self.intra_parent[i])
    }

    /// Prior families then transition families, each by variable.
    pub fn families(&self) -> Vec<Family> {
        let n = self.num_vars();
        (0..n)
            .map(|i| self.prior_family(i))
            .chain((0..n).map(|i| self.transition_family(i)))
            .collect()
    }

    pub fn prior_order(&self) -> Vec<usize> {
        topological_order(&self.prior_parent).expect("validated acyclic")
    }

    pub fn intra_order(&self) -> Vec<usize> {
        topological_order(&self.intra_parent).expect("validated acyclic")
    }

    /// Checks the tree-augmented constraints with at most `p` inter-slice
    /// parents per node. The single-parent and acyclicity constraints hold by
    /// construction; this re-verifies them along with the bound on `p`.
    pub fn satisfies_tdbn(&self, p: usize) -> bool {
        topological_order(&self.prior_parent).is_some()
            && topological_order(&self.intra_parent).is_some()
            && self.max_inter_parents() <= p
    }
}

fn edges(parents: &[Option<usize>]) -> Vec<(usize, usize)> {
    parents
        .iter()
        .enumerate()
        .filter_map(|(c, p)| p.map(|p| (p, c)))
        .collect()
}

/// Order in which every node follows its parent, or `None` on a cycle.
/// Among ready nodes the lowest index goes first.
pub(crate) fn topological_order(parents: &[Option<usize>]) -> Option<Vec<usize>> {
    let n = parents.len();
    let mut placed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    while order.len() < n {
        let next = (0..n).find(|&i| !placed[i] && parents[i].is_none_or(|p| placed[p]))?;
        placed[next] = true;
        order.push(next);
    }
    Some(order)
}

/// A conditional probability table: one row per parent configuration
/// (mixed-radix order), one column per child value.
#[derive(Debug, Clone, PartialEq)]
pub struct Cpt {
    shape: FamilyShape,
    probs: Vec<f64>,
}

impl Cpt {
    pub fn new(shape: FamilyShape, probs: Vec<f64>) -> Result<Self> {
        let r = shape.child_card;
        if probs.len() != shape.num_configs() * r {
            return Err(Error::invalid(format!(
                "CPT for variable {} has {} entries, expected {}",
                shape.family.child,
                probs.len(),
                shape.num_configs() * r
            )));
        }
        for (j, row) in probs.chunks(r).enumerate() {
            if row.iter().any(|p| !(0.0..=1.0).contains(p)) {
                return Err(Error::invalid(format!(
                    "CPT for variable {} row {j} has an entry outside [0, 1]",
                    shape.family.child
                )));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
                return Err(Error::invalid(format!(
                    "CPT for variable {} row {j} sums to {sum}",
                    shape.family.child
                )));
            }
        }
        Ok(Self { shape, probs })
    }

    pub fn uniform(shape: FamilyShape) -> Self {
        let r = shape.child_card;
        let probs = vec![1.0 / r as f64; shape.num_configs() * r];
        Self { shape, probs }
    }

    pub fn shape(&self) -> &FamilyShape {
        &self.shape
    }

    pub fn family(&self) -> &Family {
        &self.shape.family
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn row(&self, config: usize) -> &[f64] {
        let r = self.shape.child_card;
        &self.probs[config * r..(config + 1) * r]
    }

    pub fn prob(&self, config: usize, value: Value) -> f64 {
        self.probs[config * self.shape.child_card + value as usize]
    }
}

/// CPTs for the prior network and the transition network, indexed by child.
#[derive(Debug, Clone, PartialEq)]
pub struct DbnParameters {
    pub prior: Vec<Cpt>,
    pub transition: Vec<Cpt>,
}

impl DbnParameters {
    pub fn uniform(structure: &DbnStructure, cardinalities: &[usize]) -> Self {
        let n = structure.num_vars();
        Self {
            prior: (0..n)
                .map(|i| Cpt::uniform(FamilyShape::new(structure.prior_family(i), cardinalities)))
                .collect(),
            transition: (0..n)
                .map(|i| Cpt::uniform(FamilyShape::new(structure.transition_family(i), cardinalities)))
                .collect(),
        }
    }

    pub fn cpts(&self) -> impl Iterator<Item = &Cpt> {
        self.prior.iter().chain(&self.transition)
    }

    /// `Σ ln θ` over every CPT entry.
    pub fn sum_log_probs(&self) -> f64 {
        self.cpts().flat_map(|c| c.probs.iter()).map(|p| p.ln()).sum()
    }
}

/// A complete stationary first-order DBN.
#[derive(Debug, Clone, PartialEq)]
pub struct Dbn {
    attributes: Vec<AttributeSpec>,
    structure: DbnStructure,
    params: DbnParameters,
}

impl Dbn {
    pub fn new(attributes: Vec<AttributeSpec>, structure: DbnStructure, params: DbnParameters) -> Result<Self> {
        let n = attributes.len();
        if structure.num_vars() != n || params.prior.len() != n || params.transition.len() != n {
            return Err(Error::invalid("network size disagrees with its attributes"));
        }
        let cards: Vec<usize> = attributes.iter().map(AttributeSpec::cardinality).collect();
        for i in 0..n {
            let expected = [
                FamilyShape::new(structure.prior_family(i), &cards),
                FamilyShape::new(structure.transition_family(i), &cards),
            ];
            for (cpt, want) in [&params.prior[i], &params.transition[i]].into_iter().zip(expected) {
                if cpt.shape != want {
                    return Err(Error::invalid(format!(
                        "CPT {:?} does not match the structure's family {:?}",
                        cpt.shape.family, want.family
                    )));
                }
            }
        }
        Ok(Self {
            attributes,
            structure,
            params,
        })
    }

    pub fn attributes(&self) -> &[AttributeSpec] {
        &self.attributes
    }

    pub fn cardinalities(&self) -> Vec<usize> {
        self.attributes.iter().map(AttributeSpec::cardinality).collect()
    }

    pub fn num_vars(&self) -> usize {
        self.attributes.len()
    }

    pub fn structure(&self) -> &DbnStructure {
        &self.structure
    }

    pub fn params(&self) -> &DbnParameters {
        &self.params
    }

    pub fn into_parts(self) -> (Vec<AttributeSpec>, DbnStructure, DbnParameters) {
        (self.attributes, self.structure, self.params)
    }
}

/// `log P(x[0:T])`: the prior network's factors over slice 0 plus, for each
/// transition, the transition network's factors over slice `t + 1`.
///
/// `trajectory` is `(T + 1) × n` in row-major (slice, attribute) order and
/// must not contain missing cells.
pub fn joint_log_probability(dbn: &Dbn, trajectory: &[Option<Value>]) -> Result<f64> {
    let n = dbn.num_vars();
    if trajectory.is_empty() || !trajectory.len().is_multiple_of(n) {
        return Err(Error::invalid(format!(
            "trajectory of {} cells is not a whole number of {n}-attribute slices",
            trajectory.len()
        )));
    }
    let cards = dbn.cardinalities();
    let values = trajectory
        .iter()
        .enumerate()
        .map(|(pos, c)| match c {
            Some(v) if (*v as usize) < cards[pos % n] => Ok(*v),
            Some(v) => Err(Error::invalid(format!("value {v} out of range at cell {pos}"))),
            None => Err(Error::invalid(format!("missing cell at position {pos}"))),
        })
        .collect::<Result<Vec<Value>>>()?;

    let slices = values.len() / n;
    let mut total = 0.0;
    let prior: Vec<_> = dbn.params.prior.iter().map(|c| c.shape.indexer(n)).collect();
    for (cpt, idx) in dbn.params.prior.iter().zip(&prior) {
        total += cpt.probs[idx.flat_index(&values[..n])].ln();
    }
    let trans: Vec<_> = dbn.params.transition.iter().map(|c| c.shape.indexer(n)).collect();
    for t in 0..slices - 1 {
        let window = &values[t * n..(t + 2) * n];
        for (cpt, idx) in dbn.params.transition.iter().zip(&trans) {
            total += cpt.probs[idx.flat_index(window)].ln();
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binary_attrs(n: usize) -> Vec<AttributeSpec> {
        (0..n)
            .map(|i| AttributeSpec::numbered(format!("x{i}"), 2).unwrap())
            .collect()
    }

    #[test]
    fn structure_rejects_cycles_and_self_parents() {
        assert!(DbnStructure::new(vec![None, None], vec![Some(1), Some(0)], vec![vec![], vec![]]).is_err());
        assert!(DbnStructure::new(vec![Some(0)], vec![None], vec![vec![]]).is_err());
        assert!(DbnStructure::new(vec![None], vec![None], vec![vec![3]]).is_err());
        let s = DbnStructure::new(
            vec![None, Some(0), Some(1)],
            vec![Some(2), None, Some(1)],
            vec![vec![2, 0, 0], vec![], vec![1]],
        )
        .unwrap();
        assert_eq!(s.inter_parents(0), &[0, 2]);
        assert_eq!(s.intra_order(), vec![1, 2, 0]);
        assert!(s.satisfies_tdbn(2));
        assert!(!s.satisfies_tdbn(1));
        assert_eq!(s.inter_edges(), vec![(0, 0), (2, 0), (1, 2)]);
    }

    #[test]
    fn cpt_validation() {
        let shape = FamilyShape::new(Family::prior(0, None), &[2]);
        assert!(Cpt::new(shape.clone(), vec![0.5, 0.6]).is_err());
        assert!(Cpt::new(shape.clone(), vec![1.5, -0.5]).is_err());
        assert!(Cpt::new(shape.clone(), vec![0.5]).is_err());
        assert!(Cpt::new(shape, vec![0.25, 0.75]).is_ok());
    }

    #[test]
    fn dbn_rejects_mismatched_cpts() {
        let attrs = binary_attrs(2);
        let s = DbnStructure::self_loops(2);
        let mut params = DbnParameters::uniform(&DbnStructure::empty(2), &[2, 2]);
        assert!(Dbn::new(attrs.clone(), s.clone(), params.clone()).is_err());
        params = DbnParameters::uniform(&s, &[2, 2]);
        assert!(Dbn::new(attrs, s, params).is_ok());
    }

    #[test]
    fn uniform_binary_joint() {
        let s = DbnStructure::new(vec![None, Some(0)], vec![Some(1), None], vec![vec![0], vec![0, 1]]).unwrap();
        let dbn = Dbn::new(binary_attrs(2), s.clone(), DbnParameters::uniform(&s, &[2, 2])).unwrap();
        let lp = joint_log_probability(&dbn, &[Some(0), Some(1), Some(1), Some(1)]).unwrap();
        assert!((lp - (1.0f64 / 16.0).ln()).abs() < 1e-12);
    }

    #[test]
    fn deterministic_consistent_trajectory_has_probability_one() {
        // x0 copies itself forward, x1 copies x0 within the slice.
        let attrs = binary_attrs(2);
        let cards = [2, 2];
        let s = DbnStructure::new(vec![None, Some(0)], vec![None, Some(0)], vec![vec![0], vec![]]).unwrap();
        let copy = |f: Family| Cpt::new(FamilyShape::new(f, &cards), vec![1.0, 0.0, 0.0, 1.0]).unwrap();
        let params = DbnParameters {
            prior: vec![
                Cpt::new(FamilyShape::new(s.prior_family(0), &cards), vec![0.0, 1.0]).unwrap(),
                copy(s.prior_family(1)),
            ],
            transition: vec![copy(s.transition_family(0)), copy(s.transition_family(1))],
        };
        let dbn = Dbn::new(attrs, s, params).unwrap();
        let traj = [Some(1), Some(1), Some(1), Some(1), Some(1), Some(1)];
        assert_eq!(joint_log_probability(&dbn, &traj).unwrap(), 0.0);
        let bad = [Some(1), Some(0), Some(1), Some(1)];
        assert_eq!(joint_log_probability(&dbn, &bad).unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn joint_rejects_missing_and_shape_errors() {
        let s = DbnStructure::empty(2);
        let dbn = Dbn::new(binary_attrs(2), s.clone(), DbnParameters::uniform(&s, &[2, 2])).unwrap();
        assert!(joint_log_probability(&dbn, &[Some(0), None]).is_err());
        assert!(joint_log_probability(&dbn, &[Some(0), Some(1), Some(0)]).is_err());
    }
}

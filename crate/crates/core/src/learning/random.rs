//! Random networks: uniform arborescences and flat-Dirichlet CPTs.

use rand::seq::index::sample;
use rand::Rng;
use rand_distr::Exp1;

use crate::model::{AttributeSpec, Cpt, Dbn, DbnParameters, DbnStructure, FamilyShape};
use crate::rng::{stream_rng, Stream, StreamRng};
use crate::Result;

/// A spanning arborescence over `n` nodes drawn uniformly: a uniform labeled
/// tree (decoded from a random Prüfer sequence) oriented away from a uniform
/// root. Returns each node's parent.
pub fn random_arborescence(n: usize, rng: &mut impl Rng) -> Vec<Option<usize>> {
    if n == 0 {
        return Vec::new();
    }
    let mut adjacency = vec![Vec::new(); n];
    if n >= 2 {
        let prufer: Vec<usize> = (0..n - 2).map(|_| rng.random_range(0..n)).collect();
        let mut degree = vec![1usize; n];
        for &v in &prufer {
            degree[v] += 1;
        }
        for &v in &prufer {
            let leaf = (0..n).find(|&u| degree[u] == 1).unwrap();
            adjacency[leaf].push(v);
            adjacency[v].push(leaf);
            degree[leaf] -= 1;
            degree[v] -= 1;
        }
        let rest: Vec<usize> = (0..n).filter(|&u| degree[u] == 1).collect();
        adjacency[rest[0]].push(rest[1]);
        adjacency[rest[1]].push(rest[0]);
    }
    let root = rng.random_range(0..n);
    let mut parent = vec![None; n];
    let mut seen = vec![false; n];
    seen[root] = true;
    let mut stack = vec![root];
    while let Some(u) = stack.pop() {
        for &v in &adjacency[u] {
            if !seen[v] {
                seen[v] = true;
                parent[v] = Some(u);
                stack.push(v);
            }
        }
    }
    parent
}

fn dirichlet_row(r: usize, rng: &mut StreamRng) -> Vec<f64> {
    let draws: Vec<f64> = (0..r).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let sum: f64 = draws.iter().sum();
    draws.into_iter().map(|x| x / sum).collect()
}

/// Flat-Dirichlet CPT rows for every family of `structure`, drawn from the
/// CPT stream of `seed` in family order (prior, then transition).
pub fn random_parameters(structure: &DbnStructure, cardinalities: &[usize], seed: u64) -> DbnParameters {
    let mut rng = stream_rng(seed, Stream::Cpt);
    let mut draw = |family| {
        let shape = FamilyShape::new(family, cardinalities);
        let r = shape.child_card;
        let probs = (0..shape.num_configs())
            .flat_map(|_| dirichlet_row(r, &mut rng))
            .collect();
        Cpt::new(shape, probs).expect("normalized rows")
    };
    let n = structure.num_vars();
    let prior = (0..n).map(|i| draw(structure.prior_family(i))).collect();
    let transition = (0..n).map(|i| draw(structure.transition_family(i))).collect();
    DbnParameters { prior, transition }
}

/// A random tree-augmented DBN over `attributes`: uniform random prior tree
/// and intra-slice tree, `min(p, n)` distinct inter-slice parents per node,
/// and flat-Dirichlet CPT rows.
pub fn random_dbn_for(attributes: &[AttributeSpec], p: usize, seed: u64) -> Result<Dbn> {
    let n = attributes.len();
    let mut rng = stream_rng(seed, Stream::Structure);
    let prior = random_arborescence(n, &mut rng);
    let intra = random_arborescence(n, &mut rng);
    let inter = (0..n)
        .map(|_| {
            let mut set = sample(&mut rng, n, p.min(n)).into_vec();
            set.sort_unstable();
            set
        })
        .collect();
    let structure = DbnStructure::new(prior, intra, inter)?;
    let cards: Vec<usize> = attributes.iter().map(AttributeSpec::cardinality).collect();
    let params = random_parameters(&structure, &cards, seed);
    Dbn::new(attributes.to_vec(), structure, params)
}

/// [`random_dbn_for`] with attributes `X1..Xn` labelled `0..r-1`.
pub fn random_dbn(cardinalities: &[usize], p: usize, seed: u64) -> Result<Dbn> {
    let attrs = cardinalities
        .iter()
        .enumerate()
        .map(|(i, &r)| AttributeSpec::numbered(format!("X{}", i + 1), r))
        .collect::<Result<Vec<_>>>()?;
    random_dbn_for(&attrs, p, seed)
}

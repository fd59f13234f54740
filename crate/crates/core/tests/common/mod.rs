//! Brute-force oracles shared by the integration tests. Nothing here goes
//! through the library's window enumeration, family indexers or structure
//! search.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tdbn_impute::bench::sample_dataset;
use tdbn_impute::learning::{random_dbn, LocalScore};
use tdbn_impute::model::{Dataset, Dbn, Family, Lag, Subject, Value};
use tdbn_impute::scoring::{CountTables, ExactSum};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `P(child = x | parents)` read straight off the flat CPT, with the parent
/// configuration computed as a mixed-radix number (first parent most
/// significant). `value_of` maps a parent to its value.
fn factor(dbn: &Dbn, family: &Family, child: Value, value_of: impl Fn(usize, Lag) -> Value) -> f64 {
    let cards = dbn.cardinalities();
    let mut config = 0usize;
    for p in &family.parents {
        config = config * cards[p.var] + value_of(p.var, p.lag) as usize;
    }
    let cpt = match family.kind {
        tdbn_impute::model::FamilyKind::Prior => &dbn.params().prior[family.child],
        tdbn_impute::model::FamilyKind::Transition => &dbn.params().transition[family.child],
    };
    assert_eq!(&cpt.family(), &family);
    cpt.probs()[config * cards[family.child] + child as usize]
}

/// Unnormalized weight of a fully assigned window `[slice t, slice t+1]`:
/// the transition factors of slice `t + 1`, times the prior factors of slice
/// 0 when `t = 0`.
pub fn window_weight(dbn: &Dbn, t: usize, cells: &[Value]) -> f64 {
    let n = dbn.num_vars();
    let s = dbn.structure();
    let mut w = 1.0;
    if t == 0 {
        for i in 0..n {
            w *= factor(dbn, &s.prior_family(i), cells[i], |v, _| cells[v]);
        }
    }
    for i in 0..n {
        w *= factor(dbn, &s.transition_family(i), cells[n + i], |v, lag| match lag {
            Lag::Previous => cells[v],
            Lag::Current => cells[n + v],
        });
    }
    w
}

/// Every completion of `cells`, missing cells varying in increasing slot
/// order with the first one most significant.
pub fn completions(cells: &[Option<Value>], cards: &[usize]) -> Vec<Vec<Value>> {
    let n = cards.len();
    let mut out = vec![Vec::new()];
    for (slot, c) in cells.iter().enumerate() {
        let choices: Vec<Value> = match c {
            Some(v) => vec![*v],
            None => (0..cards[slot % n] as Value).collect(),
        };
        out = out
            .into_iter()
            .flat_map(|prefix| {
                choices.iter().map(move |&v| {
                    let mut p = prefix.clone();
                    p.push(v);
                    p
                })
            })
            .collect();
    }
    out
}

/// Normalized posterior over the completions of one window, and the log of
/// its evidence.
pub fn brute_posterior(dbn: &Dbn, t: usize, cells: &[Option<Value>]) -> (Vec<(Vec<Value>, f64)>, f64) {
    let all = completions(cells, &dbn.cardinalities());
    let weights: Vec<f64> = all.iter().map(|c| window_weight(dbn, t, c)).collect();
    let z: f64 = weights.iter().sum();
    let post = all.into_iter().zip(weights).map(|(c, w)| (c, w / z)).collect();
    (post, z.ln())
}

/// Cells of window `t` of one subject.
pub fn window_cells(d: &Dataset, subject: usize, t: usize) -> Vec<Option<Value>> {
    let n = d.num_attributes();
    (0..2 * n).map(|k| d.get(subject, t + k / n, k % n)).collect()
}

/// Flat `(config, value)` position of `family` in a completed window.
pub fn family_position(family: &Family, cards: &[usize], cells: &[Value]) -> usize {
    let n = cards.len();
    let prior = family.kind == tdbn_impute::model::FamilyKind::Prior;
    let mut config = 0usize;
    for p in &family.parents {
        let v = match (prior, p.lag) {
            (true, _) | (false, Lag::Previous) => cells[p.var],
            (false, Lag::Current) => cells[n + p.var],
        };
        config = config * cards[p.var] + v as usize;
    }
    let child = if prior {
        cells[family.child]
    } else {
        cells[n + family.child]
    };
    config * cards[family.child] + child as usize
}

/// Expected counts by enumerating every window of every subject; prior
/// families only see window 0. Also returns the summed log evidence.
pub fn brute_ess(dbn: &Dbn, d: &Dataset, families: &[Family]) -> (Vec<Vec<f64>>, f64) {
    let cards = d.cardinalities();
    let mut tables: Vec<Vec<f64>> = families
        .iter()
        .map(|f| {
            let q: usize = f.parents.iter().map(|p| cards[p.var]).product();
            vec![0.0; q * cards[f.child]]
        })
        .collect();
    let mut ll = 0.0;
    for s in 0..d.num_subjects() {
        for t in 0..d.num_slices() - 1 {
            let (post, log_z) = brute_posterior(dbn, t, &window_cells(d, s, t));
            ll += log_z;
            for (f, table) in families.iter().zip(tables.iter_mut()) {
                if f.kind == tdbn_impute::model::FamilyKind::Prior && t != 0 {
                    continue;
                }
                for (c, p) in &post {
                    table[family_position(f, &cards, c)] += p;
                }
            }
        }
    }
    (tables, ll)
}

/// Random network with every cardinality drawn from `card_range`.
pub fn random_model(rng: &mut impl Rng, n: usize, card_range: std::ops::RangeInclusive<usize>) -> Dbn {
    let cards: Vec<usize> = (0..n).map(|_| rng.random_range(card_range.clone())).collect();
    random_dbn(&cards, 1, rng.random()).unwrap()
}

/// Blanks cells of `d` independently with probability `rate`, keeping at
/// most `per_slice` missing cells in any slice.
pub fn blank_cells(d: &Dataset, rng: &mut impl Rng, rate: f64, per_slice: usize) -> Dataset {
    let n = d.num_attributes();
    let subjects = d
        .subjects()
        .iter()
        .map(|s| {
            let mut cells = s.cells().to_vec();
            for slice in cells.chunks_mut(n) {
                let mut blanked = 0;
                for c in slice.iter_mut() {
                    if blanked < per_slice && rng.random_bool(rate) {
                        *c = None;
                        blanked += 1;
                    }
                }
            }
            Subject::new(s.id.clone(), cells)
        })
        .collect();
    Dataset::new(d.attributes().to_vec(), d.num_slices(), subjects).unwrap()
}

/// A sampled complete dataset of random size within the bounds.
pub fn random_complete(
    rng: &mut impl Rng,
    dbn: &Dbn,
    max_subjects: usize,
    slices: std::ops::RangeInclusive<usize>,
) -> Dataset {
    let subjects = rng.random_range(1..=max_subjects);
    let t = rng.random_range(slices);
    sample_dataset(dbn, subjects, t, rng.random()).unwrap()
}

/// Rooted forests on `n` nodes as parent vectors.
pub fn all_forests(n: usize) -> Vec<Vec<Option<usize>>> {
    let mut out = Vec::new();
    let mut parents = vec![None; n];
    fn rec(i: usize, n: usize, parents: &mut Vec<Option<usize>>, out: &mut Vec<Vec<Option<usize>>>) {
        if i == n {
            if is_acyclic(parents) {
                out.push(parents.clone());
            }
            return;
        }
        for choice in std::iter::once(None).chain((0..n).filter(|&j| j != i).map(Some)) {
            parents[i] = choice;
            rec(i + 1, n, parents, out);
        }
    }
    rec(0, n, &mut parents, &mut out);
    out
}

fn is_acyclic(parents: &[Option<usize>]) -> bool {
    (0..parents.len()).all(|start| {
        let mut at = start;
        for _ in 0..=parents.len() {
            match parents[at] {
                None => return true,
                Some(p) => at = p,
            }
        }
        false
    })
}

/// Subsets of `0..n` with at most `p` elements.
pub fn small_subsets(n: usize, p: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n)
        .filter(|m| m.count_ones() as usize <= p)
        .map(|m| (0..n).filter(|&k| m >> k & 1 == 1).collect())
        .collect()
}

/// Best total score over every tree-augmented structure with at most `p`
/// inter-slice parents per node, by full enumeration of (prior forest,
/// intra-slice forest, inter-slice parent sets). Also returns the number of
/// structures visited.
pub fn exhaustive_best(counts: &CountTables, n: usize, p: usize, score: LocalScore) -> (f64, u64) {
    let forests = all_forests(n);
    let subsets = small_subsets(n, p);
    let acc_of = |families: &[Family]| {
        let mut acc = ExactSum::default();
        for f in families {
            score.accumulate(counts, f, &mut acc).unwrap();
        }
        acc
    };
    let priors: Vec<ExactSum> = forests
        .iter()
        .map(|parents| {
            let fams: Vec<Family> = (0..n).map(|i| Family::prior(i, parents[i])).collect();
            acc_of(&fams)
        })
        .collect();
    let mut transitions = Vec::new();
    for intra in &forests {
        let mut choice = vec![0usize; n];
        loop {
            let fams: Vec<Family> = (0..n)
                .map(|i| Family::transition(i, &subsets[choice[i]], intra[i]))
                .collect();
            transitions.push(acc_of(&fams));
            let mut k = 0;
            while k < n {
                choice[k] += 1;
                if choice[k] < subsets.len() {
                    break;
                }
                choice[k] = 0;
                k += 1;
            }
            if k == n {
                break;
            }
        }
    }
    let mut best = f64::NEG_INFINITY;
    let mut visited = 0u64;
    for prior in &priors {
        for trans in &transitions {
            let mut acc = prior.clone();
            acc.merge(trans);
            best = best.max(acc.value());
            visited += 1;
        }
    }
    (best, visited)
}

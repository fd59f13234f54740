use rand::Rng;

use crate::model::{Cpt, Dataset, Dbn, Subject, Value};
use crate::rng::{stream_rng, Stream};
use crate::Result;

/// Ancestral sampling: slice 0 from the prior network, every later slice from
/// the transition network, each in topological order. Subjects are named
/// `s1, s2, ...`.
pub fn sample_dataset(dbn: &Dbn, num_subjects: usize, num_slices: usize, seed: u64) -> Result<Dataset> {
    let n = dbn.num_vars();
    let structure = dbn.structure();
    let params = dbn.params();
    let prior_order = structure.prior_order();
    let intra_order = structure.intra_order();
    let prior_ix: Vec<_> = params.prior.iter().map(|c| c.shape().indexer(n)).collect();
    let trans_ix: Vec<_> = params.transition.iter().map(|c| c.shape().indexer(n)).collect();
    let mut rng = stream_rng(seed, Stream::Sampling);
    let mut window = vec![0 as Value; 2 * n];
    let mut subjects = Vec::with_capacity(num_subjects);
    for s in 0..num_subjects {
        let mut cells = Vec::with_capacity(num_slices * n);
        for t in 0..num_slices {
            if t == 0 {
                for &i in &prior_order {
                    window[i] = draw(&params.prior[i], &prior_ix[i], &mut window, &mut rng);
                }
            } else {
                for &i in &intra_order {
                    window[n + i] = draw(&params.transition[i], &trans_ix[i], &mut window, &mut rng);
                }
                window.copy_within(n.., 0);
            }
            cells.extend(window[..n].iter().map(|&v| Some(v)));
        }
        subjects.push(Subject::new(format!("s{}", s + 1), cells));
    }
    Dataset::new(dbn.attributes().to_vec(), num_slices, subjects)
}

fn draw(cpt: &Cpt, ix: &crate::model::FamilyIndexer, window: &mut [Value], rng: &mut impl Rng) -> Value {
    window[ix.child_slot] = 0;
    let base = ix.flat_index(window);
    let r = cpt.shape().child_card;
    let row = &cpt.probs()[base..base + r];
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (k, &p) in row.iter().enumerate() {
        acc += p;
        if u < acc {
            return k as Value;
        }
    }
    // Rounding left `u` above the cumulative sum: take the last value with
    // positive probability.
    row.iter().rposition(|&p| p > 0.0).unwrap_or(r - 1) as Value
}

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;

use super::{NliExample, NliLabel, Warning};
use crate::rng;

#[derive(Debug, Clone)]
pub struct Balanced {
    pub examples: Vec<NliExample>,
    pub shortfall: Option<Warning>,
}

/// Smallest per-document cap `k` with `sum(min(k, n_d)) >= target`.
pub(crate) fn per_document_cap(counts: &[usize], target: usize) -> usize {
    let max = counts.iter().copied().max().unwrap_or(0);
    (0..=max)
        .find(|&k| counts.iter().map(|&n| n.min(k)).sum::<usize>() >= target)
        .unwrap_or(max)
}

/// Reduces neutral examples to as many as there are entailments.
///
/// Every document contributes at most `k` neutrals, `k` being the smallest
/// cap that reaches the target; the surplus from the cap is trimmed across
/// the whole set. All choices use seeded shuffles. Non-neutral examples and
/// the relative order of kept examples are unchanged.
pub fn balance_neutrals(examples: &[NliExample], seed: u64) -> Balanced {
    let target = examples.iter().filter(|e| e.label == NliLabel::Entailment).count();
    let mut by_doc: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, e) in examples.iter().enumerate() {
        if e.label == NliLabel::Neutral {
            by_doc.entry(e.doc_id.as_str()).or_default().push(i);
        }
    }
    let available: usize = by_doc.values().map(Vec::len).sum();
    if available <= target {
        let shortfall = (available < target).then_some(Warning::NeutralShortfall { target, available });
        return Balanced {
            examples: examples.to_vec(),
            shortfall,
        };
    }

    let counts: Vec<usize> = by_doc.values().map(Vec::len).collect();
    let cap = per_document_cap(&counts, target);
    let mut rng = rng::seeded(seed);
    let mut selected = Vec::new();
    for indices in by_doc.values() {
        let mut indices = indices.clone();
        indices.shuffle(&mut rng);
        selected.extend(indices.into_iter().take(cap));
    }
    if selected.len() > target {
        selected.shuffle(&mut rng);
        selected.truncate(target);
    }
    let keep: BTreeSet<usize> = selected.into_iter().collect();
    Balanced {
        examples: examples
            .iter()
            .enumerate()
            .filter(|(i, e)| e.label != NliLabel::Neutral || keep.contains(i))
            .map(|(_, e)| e.clone())
            .collect(),
        shortfall: None,
    }
}

use std::collections::{BTreeSet, HashSet};

use rand::seq::SliceRandom;

use super::NliExample;
use crate::fraction::Fraction;
use crate::rng;

/// The documents kept for a training fraction: ids are sorted, shuffled with
/// `seed`, and the first `ceil(fraction * n)` are kept. Because the ranking
/// only depends on the seed, smaller fractions give subsets of larger ones.
///
/// # Panics
///
/// If `fraction` is not in (0, 1].
pub fn subsample_documents<'a>(
    doc_ids: impl IntoIterator<Item = &'a str>,
    fraction: Fraction,
    seed: u64,
) -> Vec<String> {
    assert!(
        fraction.is_proper_nonzero(),
        "fraction must be in (0, 1], got {fraction}"
    );
    let unique: BTreeSet<&str> = doc_ids.into_iter().collect();
    let mut ranked: Vec<&str> = unique.into_iter().collect();
    ranked.shuffle(&mut rng::seeded(seed));
    let keep = fraction.ceil_of(ranked.len());
    ranked.truncate(keep);
    ranked.into_iter().map(str::to_string).collect()
}

/// Keeps every example of the documents chosen by [`subsample_documents`].
pub fn subsample_training(examples: &[NliExample], fraction: Fraction, seed: u64) -> Vec<NliExample> {
    if fraction == Fraction::ONE {
        return examples.to_vec();
    }
    let keep: HashSet<String> = subsample_documents(examples.iter().map(|e| e.doc_id.as_str()), fraction, seed)
        .into_iter()
        .collect();
    examples.iter().filter(|e| keep.contains(&e.doc_id)).cloned().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("doc{i:03}")).collect()
    }

    #[test]
    fn five_percent_of_twenty_is_one_document() {
        let ids = ids(20);
        let kept = subsample_documents(ids.iter().map(String::as_str), "0.05".parse().unwrap(), 3);
        assert_eq!(kept.len(), 1);
    }

    #[test]
    fn whole_set() {
        let ids = ids(7);
        let mut kept = subsample_documents(ids.iter().map(String::as_str), Fraction::ONE, 3);
        kept.sort();
        assert_eq!(kept, ids);
    }

    #[test]
    #[should_panic]
    fn zero_fraction_panics() {
        subsample_documents(["a"], Fraction::ZERO, 0);
    }
}

use rand::seq::SliceRandom;

use super::{Corpus, Document};
use crate::fraction::{Fraction, FractionError};
use crate::rng;

/// Train/dev/test proportions and the shuffle seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitSpec {
    train: Fraction,
    dev: Fraction,
    test: Fraction,
    seed: u64,
}

impl SplitSpec {
    pub fn new(train: Fraction, dev: Fraction, test: Fraction, seed: u64) -> Result<Self, FractionError> {
        let sum = train
            .checked_add(&dev)
            .and_then(|s| s.checked_add(&test))
            .ok_or_else(|| FractionError {
                input: format!("{train} + {dev} + {test}"),
                reason: "overflow",
            })?;
        if sum != Fraction::ONE {
            return Err(FractionError {
                input: format!("{train} + {dev} + {test}"),
                reason: "split fractions must sum to exactly 1",
            });
        }
        Ok(SplitSpec { train, dev, test, seed })
    }

    /// The 70/10/20 split.
    pub fn standard(seed: u64) -> Self {
        SplitSpec::new(
            Fraction::new(7, 10).unwrap(),
            Fraction::new(1, 10).unwrap(),
            Fraction::new(2, 10).unwrap(),
            seed,
        )
        .unwrap()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Partition sizes for `n` documents: dev and test are floored, train
    /// takes the remainder.
    pub fn sizes(&self, n: usize) -> (usize, usize, usize) {
        let dev = self.dev.floor_of(n);
        let test = self.test.floor_of(n);
        debug_assert!(self.train.floor_of(n) + dev + test <= n);
        (n - dev - test, dev, test)
    }
}

/// Document-level partition. Documents are sorted by id, shuffled with the
/// seed and cut into train/dev/test; each part is returned in id order.
pub fn split_corpus(corpus: &[Document], spec: &SplitSpec) -> (Corpus, Corpus, Corpus) {
    let mut order: Vec<&Document> = corpus.iter().collect();
    order.sort_by(|a, b| a.id().cmp(b.id()));
    order.shuffle(&mut rng::seeded(spec.seed));
    let (n_train, n_dev, _) = spec.sizes(order.len());
    let mut parts = [Vec::new(), Vec::new(), Vec::new()];
    for (i, doc) in order.into_iter().enumerate() {
        let part = if i < n_train {
            0
        } else if i < n_train + n_dev {
            1
        } else {
            2
        };
        parts[part].push(doc.clone());
    }
    for p in &mut parts {
        p.sort_by(|a, b| a.id().cmp(b.id()));
    }
    let [train, dev, test] = parts;
    (train, dev, test)
}

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::Deserialize;

use super::{EntailmentScorer, EntailmentScores, ScorerError};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FixtureRecord {
    premise: String,
    hypothesis: String,
    entailment: f64,
    neutral: f64,
    contradiction: f64,
}

/// Exact-match lookup of recorded triples keyed by (premise, hypothesis).
#[derive(Debug, Clone, Default)]
pub struct FixtureScorer {
    entries: HashMap<(String, String), EntailmentScores>,
}

impl FixtureScorer {
    pub fn from_reader<R: BufRead>(reader: R, origin: &Path) -> Result<Self, ScorerError> {
        let mut entries = HashMap::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line.map_err(|source| ScorerError::Io {
                path: origin.to_path_buf(),
                source,
            })?;
            if line.trim().is_empty() {
                continue;
            }
            let schema = |message: String| ScorerError::Schema { line: i + 1, message };
            let rec: FixtureRecord = serde_json::from_str(&line).map_err(|e| schema(e.to_string()))?;
            let scores = EntailmentScores::new(rec.entailment, rec.neutral, rec.contradiction)
                .map_err(|e| schema(e.to_string()))?;
            match entries.insert((rec.premise, rec.hypothesis), scores) {
                Some(prev) if prev != scores => return Err(ScorerError::DuplicateKey { line: i + 1 }),
                _ => {}
            }
        }
        Ok(FixtureScorer { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn lookup(&self, premise: &str, hypothesis: &str) -> Result<EntailmentScores, ScorerError> {
        self.entries
            .get(&(premise.to_string(), hypothesis.to_string()))
            .copied()
            .ok_or_else(|| ScorerError::FixtureMiss {
                premise: premise.to_string(),
                hypothesis: hypothesis.to_string(),
            })
    }
}

pub fn load_fixture(path: impl AsRef<Path>) -> Result<FixtureScorer, ScorerError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| ScorerError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    FixtureScorer::from_reader(BufReader::new(file), path)
}

impl EntailmentScorer for FixtureScorer {
    fn score_batch(&self, premise: &str, hypotheses: &[String]) -> Result<Vec<EntailmentScores>, ScorerError> {
        if hypotheses.is_empty() {
            return Err(ScorerError::EmptyBatch);
        }
        hypotheses.iter().map(|h| self.lookup(premise, h)).collect()
    }
}

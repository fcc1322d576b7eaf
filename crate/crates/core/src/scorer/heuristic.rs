use std::collections::HashSet;

use super::{EntailmentScorer, EntailmentScores, ScorerError};

/// Offline stand-in for an NLI model.
///
/// With `o` the fraction of distinct hypothesis tokens (lowercased,
/// whitespace-split) that also occur in the premise, the triple is
/// `(0.1 + 0.8o, (0.9 - 0.8o) / 2, (0.9 - 0.8o) / 2)`. It exists so the
/// pipeline runs without a model; it says nothing about entailment.
#[derive(Debug, Clone, Copy, Default)]
pub struct HeuristicScorer;

impl HeuristicScorer {
    pub fn overlap(premise: &str, hypothesis: &str) -> f64 {
        let premise_tokens: HashSet<String> = premise.split_whitespace().map(str::to_lowercase).collect();
        let hyp_tokens: HashSet<String> = hypothesis.split_whitespace().map(str::to_lowercase).collect();
        if hyp_tokens.is_empty() {
            return 0.0;
        }
        let shared = hyp_tokens.iter().filter(|t| premise_tokens.contains(*t)).count();
        shared as f64 / hyp_tokens.len() as f64
    }

    pub fn score(premise: &str, hypothesis: &str) -> EntailmentScores {
        let o = Self::overlap(premise, hypothesis);
        let rest = (0.9 - 0.8 * o) / 2.0;
        EntailmentScores {
            entailment: 0.1 + 0.8 * o,
            neutral: rest,
            contradiction: rest,
        }
    }
}

impl EntailmentScorer for HeuristicScorer {
    fn score_batch(&self, premise: &str, hypotheses: &[String]) -> Result<Vec<EntailmentScores>, ScorerError> {
        if hypotheses.is_empty() {
            return Err(ScorerError::EmptyBatch);
        }
        Ok(hypotheses.iter().map(|h| Self::score(premise, h)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn full_overlap_endpoint() {
        let s = HeuristicScorer::score("Fever and COUGH today", "cough fever");
        assert!(close(s.entailment, 0.90) && close(s.neutral, 0.05) && close(s.contradiction, 0.05));
    }

    #[test]
    fn zero_overlap_endpoint() {
        let s = HeuristicScorer::score("fever", "asthma attack");
        assert!(close(s.entailment, 0.10) && close(s.neutral, 0.45) && close(s.contradiction, 0.45));
    }

    #[test]
    fn partial_overlap_and_sum() {
        // hypothesis types {a, b, c, d}; premise shares {a, b} -> o = 0.5
        let s = HeuristicScorer::score("a b x", "a b c d a");
        assert!(close(s.entailment, 0.5));
        assert!(close(s.sum(), 1.0));
    }

    #[test]
    fn batch_is_order_aligned() {
        let out = HeuristicScorer
            .score_batch("a b", &["a".to_string(), "z".to_string()])
            .unwrap();
        assert!(out[0].entailment > out[1].entailment);
        assert!(matches!(
            HeuristicScorer.score_batch("a", &[]),
            Err(ScorerError::EmptyBatch)
        ));
    }
}

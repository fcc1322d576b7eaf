//! Entailment scorers: anything that turns (premise, hypothesis) pairs into
//! entailment/neutral/contradiction probabilities.
//!
//! Three implementations ship with the crate:
//! - [`HeuristicScorer`], a deterministic token-overlap formula for offline runs;
//! - [`FixtureScorer`], exact lookups from a recorded JSONL file;
//! - [`RemoteScorer`], a client for the `POST /v1/score` HTTP protocol.

mod fixture;
mod heuristic;
mod remote;

use std::path::PathBuf;
use std::time::Duration;

use serde::{Deserialize, Serialize};

pub use fixture::{load_fixture, FixtureScorer};
pub use heuristic::HeuristicScorer;
pub use remote::{RemoteConfig, RemoteScorer};

/// Sum tolerance for a valid triple.
pub const SUM_TOLERANCE: f64 = 1e-6;
/// Remote triples off by at most this much are renormalized.
pub const RENORMALIZE_TOLERANCE: f64 = 1e-3;

#[derive(Debug, thiserror::Error)]
pub enum ScorerError {
    #[error("no fixture entry for premise {premise:?} / hypothesis {hypothesis:?}")]
    FixtureMiss { premise: String, hypothesis: String },
    #[error("duplicate fixture key on line {line} with a different triple")]
    DuplicateKey { line: usize },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Schema { line: usize, message: String },
    #[error("empty hypothesis batch")]
    EmptyBatch,
    #[error("transport error: {0}")]
    Transport(String),
    #[error("request timed out")]
    Timeout,
    #[error("scoring service has no model loaded (503)")]
    ModelNotLoaded,
    #[error("protocol error (status {status}): {message}")]
    Protocol { status: u16, message: String },
    #[error("invalid scores: {0}")]
    BadScores(String),
}

/// A probability triple summing to one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntailmentScores {
    pub entailment: f64,
    pub neutral: f64,
    pub contradiction: f64,
}

impl EntailmentScores {
    /// Accepts a triple whose components lie in [0, 1] and sum to one within
    /// [`SUM_TOLERANCE`].
    pub fn new(entailment: f64, neutral: f64, contradiction: f64) -> Result<Self, ScorerError> {
        let s = EntailmentScores {
            entailment,
            neutral,
            contradiction,
        };
        s.check_components()?;
        let dev = (s.sum() - 1.0).abs();
        if dev > SUM_TOLERANCE {
            return Err(ScorerError::BadScores(format!("triple {s:?} sums to {}", s.sum())));
        }
        Ok(s)
    }

    /// Like [`EntailmentScores::new`] but rescales triples that are off by at
    /// most [`RENORMALIZE_TOLERANCE`].
    pub fn renormalized(entailment: f64, neutral: f64, contradiction: f64) -> Result<Self, ScorerError> {
        let s = EntailmentScores {
            entailment,
            neutral,
            contradiction,
        };
        s.check_components()?;
        let sum = s.sum();
        let dev = (sum - 1.0).abs();
        if dev <= SUM_TOLERANCE {
            Ok(s)
        } else if dev <= RENORMALIZE_TOLERANCE {
            Ok(EntailmentScores {
                entailment: entailment / sum,
                neutral: neutral / sum,
                contradiction: contradiction / sum,
            })
        } else {
            Err(ScorerError::BadScores(format!("triple {s:?} sums to {sum}")))
        }
    }

    fn check_components(&self) -> Result<(), ScorerError> {
        for v in [self.entailment, self.neutral, self.contradiction] {
            if !v.is_finite() || !(0.0..=1.0).contains(&v) {
                return Err(ScorerError::BadScores(format!(
                    "component {v} outside [0, 1] in {self:?}"
                )));
            }
        }
        Ok(())
    }

    pub fn sum(&self) -> f64 {
        self.entailment + self.neutral + self.contradiction
    }
}

/// Scores hypotheses against one premise. Implementations are shared across
/// threads.
pub trait EntailmentScorer: Send + Sync {
    /// One triple per hypothesis, in order.
    fn score_batch(&self, premise: &str, hypotheses: &[String]) -> Result<Vec<EntailmentScores>, ScorerError>;
}

impl<T: EntailmentScorer + ?Sized> EntailmentScorer for Box<T> {
    fn score_batch(&self, premise: &str, hypotheses: &[String]) -> Result<Vec<EntailmentScores>, ScorerError> {
        (**self).score_batch(premise, hypotheses)
    }
}

impl<T: EntailmentScorer + ?Sized> EntailmentScorer for &T {
    fn score_batch(&self, premise: &str, hypotheses: &[String]) -> Result<Vec<EntailmentScores>, ScorerError> {
        (**self).score_batch(premise, hypotheses)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScorerConfig {
    Fixture(PathBuf),
    Heuristic,
    Remote(RemoteConfig),
}

impl ScorerConfig {
    pub fn remote(endpoint: impl Into<String>) -> Self {
        ScorerConfig::Remote(RemoteConfig {
            endpoint: endpoint.into(),
            timeout: Duration::from_secs(30),
            max_batch: 16,
            max_in_flight: 4,
        })
    }

    pub fn build(&self) -> Result<Box<dyn EntailmentScorer>, ScorerError> {
        Ok(match self {
            ScorerConfig::Fixture(path) => Box::new(load_fixture(path)?),
            ScorerConfig::Heuristic => Box::new(HeuristicScorer),
            ScorerConfig::Remote(cfg) => Box::new(RemoteScorer::new(cfg.clone())?),
        })
    }
}

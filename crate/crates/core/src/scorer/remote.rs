use std::sync::{Condvar, Mutex};
use std::thread;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::{EntailmentScorer, EntailmentScores, ScorerError};

#[derive(Debug, Clone, PartialEq)]
pub struct RemoteConfig {
    /// Base URL of the scoring service, e.g. `http://127.0.0.1:8000`.
    pub endpoint: String,
    pub timeout: Duration,
    /// Hypotheses per request.
    pub max_batch: usize,
    /// Concurrent requests across all callers.
    pub max_in_flight: usize,
}

#[derive(Serialize)]
struct ScoreRequest<'a> {
    premise: &'a str,
    hypotheses: &'a [String],
}

#[derive(Deserialize)]
struct WireScores {
    entailment: f64,
    neutral: f64,
    contradiction: f64,
}

#[derive(Deserialize)]
struct ScoreResponse {
    scores: Vec<WireScores>,
}

struct Permits {
    free: Mutex<usize>,
    released: Condvar,
}

struct Permit<'a>(&'a Permits);

impl Permits {
    fn acquire(&self) -> Permit<'_> {
        let mut free = self.free.lock().unwrap();
        while *free == 0 {
            free = self.released.wait(free).unwrap();
        }
        *free -= 1;
        Permit(self)
    }
}

impl Drop for Permit<'_> {
    fn drop(&mut self) {
        *self.0.free.lock().unwrap() += 1;
        self.0.released.notify_one();
    }
}

/// Client for the `POST /v1/score` protocol.
///
/// A call is split into requests of at most `max_batch` hypotheses which run
/// concurrently, never more than `max_in_flight` at a time for the whole
/// scorer. Returned triples are checked and lightly renormalized.
pub struct RemoteScorer {
    url: String,
    agent: ureq::Agent,
    max_batch: usize,
    permits: Permits,
}

impl RemoteScorer {
    pub fn new(config: RemoteConfig) -> Result<Self, ScorerError> {
        let invalid = |m: &str| ScorerError::Transport(format!("invalid remote scorer config: {m}"));
        if config.timeout.is_zero() {
            return Err(invalid("timeout must be positive"));
        }
        if config.max_batch == 0 {
            return Err(invalid("max_batch must be at least 1"));
        }
        if config.max_in_flight == 0 {
            return Err(invalid("max_in_flight must be at least 1"));
        }
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(config.timeout))
            .http_status_as_error(false)
            .build()
            .into();
        Ok(RemoteScorer {
            url: format!("{}/v1/score", config.endpoint.trim_end_matches('/')),
            agent,
            max_batch: config.max_batch,
            permits: Permits {
                free: Mutex::new(config.max_in_flight),
                released: Condvar::new(),
            },
        })
    }

    fn request(&self, premise: &str, hypotheses: &[String]) -> Result<Vec<EntailmentScores>, ScorerError> {
        let _permit = self.permits.acquire();
        let mut resp = self
            .agent
            .post(&self.url)
            .header("Content-Type", "application/json")
            .send_json(ScoreRequest { premise, hypotheses })
            .map_err(transport)?;
        let status = resp.status().as_u16();
        match status {
            200 => {}
            503 => return Err(ScorerError::ModelNotLoaded),
            _ => {
                let message = resp.body_mut().read_to_string().unwrap_or_default();
                return Err(ScorerError::Protocol { status, message });
            }
        }
        let body: ScoreResponse = resp.body_mut().read_json().map_err(|e| match e {
            ureq::Error::Timeout(_) => ScorerError::Timeout,
            other => ScorerError::Protocol {
                status,
                message: format!("malformed response body: {other}"),
            },
        })?;
        if body.scores.len() != hypotheses.len() {
            return Err(ScorerError::Protocol {
                status,
                message: format!("{} triples for {} hypotheses", body.scores.len(), hypotheses.len()),
            });
        }
        body.scores
            .into_iter()
            .map(|s| EntailmentScores::renormalized(s.entailment, s.neutral, s.contradiction))
            .collect()
    }
}

fn transport(e: ureq::Error) -> ScorerError {
    match e {
        ureq::Error::Timeout(_) => ScorerError::Timeout,
        other => ScorerError::Transport(other.to_string()),
    }
}

impl EntailmentScorer for RemoteScorer {
    fn score_batch(&self, premise: &str, hypotheses: &[String]) -> Result<Vec<EntailmentScores>, ScorerError> {
        if hypotheses.is_empty() {
            return Err(ScorerError::EmptyBatch);
        }
        let chunks: Vec<&[String]> = hypotheses.chunks(self.max_batch).collect();
        if chunks.len() == 1 {
            return self.request(premise, chunks[0]);
        }
        let results: Vec<Result<Vec<EntailmentScores>, ScorerError>> = thread::scope(|scope| {
            let handles: Vec<_> = chunks
                .iter()
                .map(|chunk| scope.spawn(move || self.request(premise, chunk)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("scoring thread panicked"))
                .collect()
        });
        let mut out = Vec::with_capacity(hypotheses.len());
        for r in results {
            out.extend(r?);
        }
        Ok(out)
    }
}

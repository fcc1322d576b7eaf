//! Remote scorer against a local mock server speaking the scoring protocol.

use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::thread;
use std::time::Duration;

use argmine::scorer::{EntailmentScorer, RemoteConfig, RemoteScorer, ScorerError};
use serde_json::{json, Value};

fn golden(name: &str) -> Value {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../protocol/golden")
        .join(name);
    serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap()
}

type Handler = dyn Fn(&Value) -> (u16, String) + Send + Sync;

struct Mock {
    server: Arc<tiny_http::Server>,
    url: String,
    requests: Arc<Mutex<Vec<(String, String, Value)>>>,
    in_flight: Arc<AtomicUsize>,
    peak: Arc<AtomicUsize>,
}

impl Mock {
    fn start(delay: Duration, handler: impl Fn(&Value) -> (u16, String) + Send + Sync + 'static) -> Mock {
        let server = Arc::new(tiny_http::Server::http("127.0.0.1:0").unwrap());
        let port = server.server_addr().to_ip().unwrap().port();
        let requests = Arc::new(Mutex::new(Vec::new()));
        let in_flight = Arc::new(AtomicUsize::new(0));
        let peak = Arc::new(AtomicUsize::new(0));
        let handler: Arc<Handler> = Arc::new(handler);
        {
            let (server, requests, in_flight, peak) =
                (server.clone(), requests.clone(), in_flight.clone(), peak.clone());
            thread::spawn(move || {
                for mut req in server.incoming_requests() {
                    let (requests, in_flight, peak, handler) =
                        (requests.clone(), in_flight.clone(), peak.clone(), handler.clone());
                    thread::spawn(move || {
                        let now = in_flight.fetch_add(1, Ordering::SeqCst) + 1;
                        peak.fetch_max(now, Ordering::SeqCst);
                        let mut body = String::new();
                        req.as_reader().read_to_string(&mut body).unwrap();
                        let value: Value = serde_json::from_str(&body).unwrap_or(Value::Null);
                        requests
                            .lock()
                            .unwrap()
                            .push((req.method().to_string(), req.url().to_string(), value.clone()));
                        thread::sleep(delay);
                        let (status, text) = handler(&value);
                        in_flight.fetch_sub(1, Ordering::SeqCst);
                        let header = tiny_http::Header::from_bytes("Content-Type", "application/json").unwrap();
                        let _ = req.respond(
                            tiny_http::Response::from_string(text)
                                .with_status_code(status)
                                .with_header(header),
                        );
                    });
                }
            });
        }
        Mock {
            server,
            url: format!("http://127.0.0.1:{port}"),
            requests,
            in_flight,
            peak,
        }
    }

    fn scorer(&self, max_batch: usize, max_in_flight: usize, timeout: Duration) -> RemoteScorer {
        RemoteScorer::new(RemoteConfig {
            endpoint: self.url.clone(),
            timeout,
            max_batch,
            max_in_flight,
        })
        .unwrap()
    }
}

impl Drop for Mock {
    fn drop(&mut self) {
        self.server.unblock();
    }
}

/// Echo handler: entailment of hypothesis `h<i>` is `i / 100`.
fn indexed(body: &Value) -> (u16, String) {
    let scores: Vec<Value> = body["hypotheses"]
        .as_array()
        .unwrap()
        .iter()
        .map(|h| {
            let i: f64 = h.as_str().unwrap()[1..].parse().unwrap();
            let e = i / 100.0;
            json!({"entailment": e, "neutral": (1.0 - e) / 2.0, "contradiction": (1.0 - e) / 2.0})
        })
        .collect();
    (200, json!({ "scores": scores }).to_string())
}

fn hyps(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("h{i}")).collect()
}

const SECOND: Duration = Duration::from_secs(5);

#[test]
fn golden_request_and_response_round_trip() {
    let response = golden("score_response.json");
    let body = response.to_string();
    let mock = Mock::start(Duration::ZERO, move |_| (200, body.clone()));
    let req = golden("score_request.json");
    let hypotheses: Vec<String> = req["hypotheses"]
        .as_array()
        .unwrap()
        .iter()
        .map(|h| h.as_str().unwrap().to_string())
        .collect();
    let scores = mock
        .scorer(16, 4, SECOND)
        .score_batch(req["premise"].as_str().unwrap(), &hypotheses)
        .unwrap();

    let seen = mock.requests.lock().unwrap().clone();
    assert_eq!(seen.len(), 1);
    assert_eq!(seen[0].0, "POST");
    assert_eq!(seen[0].1, "/v1/score");
    assert_eq!(seen[0].2, req);

    let expected = response["scores"].as_array().unwrap();
    assert_eq!(scores.len(), expected.len());
    for (s, e) in scores.iter().zip(expected) {
        assert_eq!(s.entailment, e["entailment"].as_f64().unwrap());
        assert_eq!(s.neutral, e["neutral"].as_f64().unwrap());
        assert_eq!(s.contradiction, e["contradiction"].as_f64().unwrap());
        assert!((s.sum() - 1.0).abs() <= 1e-6);
    }
}

#[test]
fn order_alignment_across_batch_sizes() {
    for (max_batch, n, requests) in [(1, 5, 5), (2, 5, 3), (16, 5, 1), (16, 40, 3)] {
        let mock = Mock::start(Duration::ZERO, indexed);
        let scores = mock.scorer(max_batch, 4, SECOND).score_batch("p", &hyps(n)).unwrap();
        let got: Vec<f64> = scores.iter().map(|s| s.entailment).collect();
        let want: Vec<f64> = (0..n).map(|i| i as f64 / 100.0).collect();
        assert_eq!(got, want, "max_batch {max_batch}");
        let seen = mock.requests.lock().unwrap();
        assert_eq!(seen.len(), requests, "max_batch {max_batch}");
        assert!(seen
            .iter()
            .all(|(_, _, b)| b["hypotheses"].as_array().unwrap().len() <= max_batch));
    }
}

#[test]
fn in_flight_requests_are_bounded() {
    let mock = Mock::start(Duration::from_millis(60), indexed);
    let scorer = mock.scorer(1, 2, SECOND);
    thread::scope(|s| {
        for _ in 0..3 {
            s.spawn(|| scorer.score_batch("p", &hyps(4)).unwrap());
        }
    });
    assert_eq!(mock.requests.lock().unwrap().len(), 12);
    let peak = mock.peak.load(Ordering::SeqCst);
    assert!((1..=2).contains(&peak), "peak {peak}");
    assert_eq!(mock.in_flight.load(Ordering::SeqCst), 0);
}

#[test]
fn service_unavailable_means_model_not_loaded() {
    let body = golden("model_not_loaded_response.json").to_string();
    let mock = Mock::start(Duration::ZERO, move |_| (503, body.clone()));
    let err = mock.scorer(16, 1, SECOND).score_batch("p", &hyps(2)).unwrap_err();
    assert!(matches!(err, ScorerError::ModelNotLoaded), "{err:?}");
}

#[test]
fn bad_request_is_a_protocol_error() {
    let body = golden("empty_hypotheses_response.json").to_string();
    let mock = Mock::start(Duration::ZERO, move |_| (400, body.clone()));
    match mock.scorer(16, 1, SECOND).score_batch("p", &hyps(1)).unwrap_err() {
        ScorerError::Protocol { status, message } => {
            assert_eq!(status, 400);
            assert!(message.contains("hypotheses must not be empty"));
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn empty_batch_is_refused_client_side() {
    let mock = Mock::start(Duration::ZERO, indexed);
    let err = mock.scorer(16, 1, SECOND).score_batch("p", &[]).unwrap_err();
    assert!(matches!(err, ScorerError::EmptyBatch));
    assert!(mock.requests.lock().unwrap().is_empty());
    // The golden request for this case carries an empty list.
    assert_eq!(golden("empty_hypotheses_request.json")["hypotheses"], json!([]));
}

#[test]
fn slow_server_times_out() {
    let mock = Mock::start(Duration::from_millis(800), indexed);
    let err = mock
        .scorer(16, 1, Duration::from_millis(100))
        .score_batch("p", &hyps(1))
        .unwrap_err();
    assert!(matches!(err, ScorerError::Timeout), "{err:?}");
}

#[test]
fn score_validation() {
    let cases = [
        (
            json!({"scores": [{"entailment": 0.9, "neutral": 0.3, "contradiction": 0.3}]}),
            false,
        ),
        (
            json!({"scores": [{"entailment": 0.5, "neutral": 0.25, "contradiction": 0.2502}]}),
            true,
        ),
        (
            json!({"scores": [{"entailment": 1.2, "neutral": -0.1, "contradiction": -0.1}]}),
            false,
        ),
    ];
    for (body, ok) in cases {
        let text = body.to_string();
        let mock = Mock::start(Duration::ZERO, move |_| (200, text.clone()));
        let r = mock.scorer(16, 1, SECOND).score_batch("p", &hyps(1));
        match (ok, r) {
            (true, Ok(s)) => assert!((s[0].sum() - 1.0).abs() <= 1e-12),
            (false, Err(ScorerError::BadScores(_))) => {}
            (_, other) => panic!("{body}: {other:?}"),
        }
    }
}

#[test]
fn wrong_triple_count_is_a_protocol_error() {
    let mock = Mock::start(Duration::ZERO, |_| (200, json!({"scores": []}).to_string()));
    let err = mock.scorer(16, 1, SECOND).score_batch("p", &hyps(2)).unwrap_err();
    assert!(matches!(err, ScorerError::Protocol { status: 200, .. }), "{err:?}");
}

#[test]
fn healthz_golden_shape() {
    let h = golden("healthz_ok.json");
    assert_eq!(h["status"], "ok");
    assert!(h["model"].is_string());
}

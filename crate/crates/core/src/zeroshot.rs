//! Zero-shot relation classification by verbalized entailment.
//!
//! For a pair (X, Y) every verb `v` of the verbalization set yields the
//! hypothesis "X v Y". All hypotheses are scored against the document
//! premise in one batch; the verb with the highest entailment probability
//! decides the relation, and the pair is labelled `no-relation` when that
//! probability does not reach the threshold.

use std::collections::BTreeSet;
use std::fmt::{self, Write as _};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::corpus::{BoilerplateFilter, Document, RelationKind};
use crate::eval::Prf;
use crate::graph::{build_graph, entity_major_claim_pairs, CandidatePair};
use crate::nli::{build_premise_text, render_hypothesis, VerbalizationSet};
use crate::scorer::{EntailmentScorer, ScorerError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RelationLabel {
    #[serde(rename = "support")]
    Support,
    #[serde(rename = "attack")]
    Attack,
    #[serde(rename = "no-relation")]
    NoRelation,
}

impl RelationLabel {
    pub const ALL: [RelationLabel; 3] = [RelationLabel::Support, RelationLabel::Attack, RelationLabel::NoRelation];

    pub fn as_str(&self) -> &'static str {
        match self {
            RelationLabel::Support => "support",
            RelationLabel::Attack => "attack",
            RelationLabel::NoRelation => "no-relation",
        }
    }
}

impl From<RelationKind> for RelationLabel {
    fn from(rel: RelationKind) -> Self {
        match rel {
            RelationKind::Support => RelationLabel::Support,
            RelationKind::Attack => RelationLabel::Attack,
        }
    }
}

impl FromStr for RelationLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "support" => Ok(RelationLabel::Support),
            "attack" => Ok(RelationLabel::Attack),
            "no-relation" => Ok(RelationLabel::NoRelation),
            other => Err(format!("unknown relation label `{other}`")),
        }
    }
}

impl fmt::Display for RelationLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Identity of an entity pair across a corpus.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PairKey {
    pub doc: String,
    pub x: usize,
    pub y: usize,
}

impl fmt::Display for PairKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}->{}", self.doc, self.x, self.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
#[error("threshold {0} outside [0, 1]")]
pub struct ThresholdError(pub f64);

/// Decision threshold on the best entailment probability. The default
/// comparison is `>=`; `strict` switches to `>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gate {
    threshold: f64,
    strict: bool,
}

impl Gate {
    pub fn new(threshold: f64) -> Result<Self, ThresholdError> {
        if !(0.0..=1.0).contains(&threshold) {
            return Err(ThresholdError(threshold));
        }
        Ok(Gate {
            threshold,
            strict: false,
        })
    }

    pub fn strict(mut self, strict: bool) -> Self {
        self.strict = strict;
        self
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn admits(&self, p: f64) -> bool {
        if self.strict {
            p > self.threshold
        } else {
            p >= self.threshold
        }
    }
}

/// Argmax outcome for a pair before the threshold is applied.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredPair {
    pub key: PairKey,
    pub relation: RelationKind,
    pub verb: String,
    pub max_entailment: f64,
}

impl ScoredPair {
    pub fn gate(&self, gate: Gate) -> RelationPrediction {
        let label = if gate.admits(self.max_entailment) {
            self.relation.into()
        } else {
            RelationLabel::NoRelation
        };
        RelationPrediction {
            doc: self.key.doc.clone(),
            x: self.key.x,
            y: self.key.y,
            label,
            verb: Some(self.verb.clone()),
            p: self.max_entailment,
        }
    }

    /// Recovers the ungated outcome from a stored prediction.
    pub fn from_prediction(pred: &RelationPrediction, verbs: &VerbalizationSet) -> Option<ScoredPair> {
        let verb = pred.verb.clone()?;
        Some(ScoredPair {
            key: pred.key(),
            relation: verbs.relation_of(&verb)?,
            verb,
            max_entailment: pred.p,
        })
    }
}

/// A gated prediction. `verb` is the argmax verbalization; it is kept for
/// `no-relation` predictions too so thresholds can be re-tuned offline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelationPrediction {
    pub doc: String,
    pub x: usize,
    pub y: usize,
    pub label: RelationLabel,
    pub verb: Option<String>,
    pub p: f64,
}

impl RelationPrediction {
    pub fn key(&self) -> PairKey {
        PairKey {
            doc: self.doc.clone(),
            x: self.x,
            y: self.y,
        }
    }
}

/// Scores every verbalization of (x, y) and returns the argmax. Ties go to
/// the earliest verb in attack-then-support order.
pub fn score_pair(
    premise: &str,
    x_text: &str,
    y_text: &str,
    verbs: &VerbalizationSet,
    scorer: &dyn EntailmentScorer,
) -> Result<(RelationKind, String, f64), ScorerError> {
    let ordered: Vec<(RelationKind, &str)> = verbs.ordered().collect();
    let hypotheses: Vec<String> = ordered
        .iter()
        .map(|(_, v)| render_hypothesis(x_text, v, y_text))
        .collect();
    let scores = scorer.score_batch(premise, &hypotheses)?;
    if scores.len() != hypotheses.len() {
        return Err(ScorerError::Protocol {
            status: 200,
            message: format!("{} scores for {} hypotheses", scores.len(), hypotheses.len()),
        });
    }
    let mut best = 0;
    for (i, s) in scores.iter().enumerate().skip(1) {
        if s.entailment > scores[best].entailment {
            best = i;
        }
    }
    let (rel, verb) = ordered[best];
    Ok((rel, verb.to_string(), scores[best].entailment))
}

#[allow(clippy::too_many_arguments)]
pub fn classify_pair(
    premise: &str,
    key: PairKey,
    x_text: &str,
    y_text: &str,
    verbs: &VerbalizationSet,
    scorer: &dyn EntailmentScorer,
    gate: Gate,
) -> Result<RelationPrediction, ScorerError> {
    let (relation, verb, max_entailment) = score_pair(premise, x_text, y_text, verbs, scorer)?;
    Ok(ScoredPair {
        key,
        relation,
        verb,
        max_entailment,
    }
    .gate(gate))
}

/// Every entity-to-Major-Claim pair of each document (sorted by document id)
/// with its gold label: the annotated relation, or `no-relation`.
pub fn gold_pairs(docs: &[Document], filter: &BoilerplateFilter) -> Vec<(PairKey, RelationLabel)> {
    let mut order: Vec<&Document> = docs.iter().collect();
    order.sort_by(|a, b| a.id().cmp(b.id()));
    let mut out = Vec::new();
    for doc in order {
        let graph = build_graph(doc, filter).graph;
        for p in entity_major_claim_pairs(&graph) {
            out.push((key_of(doc, p), gold_label(graph.edges(), p)));
        }
    }
    out
}

fn key_of(doc: &Document, p: CandidatePair) -> PairKey {
    PairKey {
        doc: doc.id().to_string(),
        x: p.x,
        y: p.y,
    }
}

/// Support wins when a pair is annotated both ways.
fn gold_label(edges: &[crate::corpus::RelationAnnotation], p: CandidatePair) -> RelationLabel {
    edges
        .iter()
        .filter(|e| e.src == p.x && e.dst == p.y)
        .map(|e| RelationLabel::from(e.rel))
        .min()
        .unwrap_or(RelationLabel::NoRelation)
}

#[derive(Debug, thiserror::Error)]
pub enum ClassifyError {
    #[error("scoring failed for every document ({count}); first failure in `{doc}`: {source}")]
    AllFailed {
        count: usize,
        doc: String,
        #[source]
        source: ScorerError,
    },
}

#[derive(Debug, Clone)]
pub struct ClassifyOptions {
    pub boilerplate: BoilerplateFilter,
    /// Documents scored concurrently.
    pub workers: usize,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            boilerplate: BoilerplateFilter::default(),
            workers: 1,
        }
    }
}

#[derive(Debug)]
pub struct ClassifiedCorpus {
    /// Ungated argmax outcomes in (document id, x, y) order.
    pub scored: Vec<ScoredPair>,
    pub failures: Vec<(String, ScorerError)>,
}

impl ClassifiedCorpus {
    pub fn predictions(&self, gate: Gate) -> Vec<RelationPrediction> {
        self.scored.iter().map(|s| s.gate(gate)).collect()
    }
}

fn score_document(
    doc: &Document,
    verbs: &VerbalizationSet,
    scorer: &dyn EntailmentScorer,
    filter: &BoilerplateFilter,
) -> Result<Vec<ScoredPair>, ScorerError> {
    let graph = build_graph(doc, filter).graph;
    let pairs = entity_major_claim_pairs(&graph);
    if pairs.is_empty() {
        return Ok(Vec::new());
    }
    let premise = build_premise_text(doc);
    let text = |o: usize| doc.span_text(&doc.spans()[o]);
    pairs
        .into_iter()
        .map(|p| {
            let (relation, verb, max_entailment) = score_pair(&premise, text(p.x), text(p.y), verbs, scorer)?;
            Ok(ScoredPair {
                key: key_of(doc, p),
                relation,
                verb,
                max_entailment,
            })
        })
        .collect()
}

/// Scores every entity-to-Major-Claim pair of the split. A document whose
/// scoring fails is reported in `failures`; the call fails only when every
/// document with pairs to score fails.
pub fn classify_corpus(
    docs: &[Document],
    verbs: &VerbalizationSet,
    scorer: &dyn EntailmentScorer,
    options: &ClassifyOptions,
) -> Result<ClassifiedCorpus, ClassifyError> {
    let mut order: Vec<&Document> = docs.iter().collect();
    order.sort_by(|a, b| a.id().cmp(b.id()));
    type Slot = Mutex<Option<Result<Vec<ScoredPair>, ScorerError>>>;
    let slots: Vec<Slot> = order.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    let work = || loop {
        let i = next.fetch_add(1, Ordering::Relaxed);
        if i >= order.len() {
            break;
        }
        let r = score_document(order[i], verbs, scorer, &options.boilerplate);
        *slots[i].lock().unwrap() = Some(r);
    };
    let workers = options.workers.clamp(1, order.len().max(1));
    if workers == 1 {
        work();
    } else {
        std::thread::scope(|s| {
            for _ in 0..workers {
                s.spawn(work);
            }
        });
    }

    let mut scored = Vec::new();
    let mut failures = Vec::new();
    for (doc, slot) in order.iter().zip(slots) {
        match slot.into_inner().unwrap().expect("every document is processed") {
            Ok(v) => scored.extend(v),
            Err(e) => {
                log::warn!("document `{}`: {e}", doc.id());
                failures.push((doc.id().to_string(), e));
            }
        }
    }
    if !failures.is_empty() && scored.is_empty() {
        let count = failures.len();
        let (doc, source) = failures.into_iter().next().unwrap();
        return Err(ClassifyError::AllFailed { count, doc, source });
    }
    Ok(ClassifiedCorpus { scored, failures })
}

/// One ungated outcome with its gold label.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TuneEntry {
    pub relation: RelationKind,
    pub max_entailment: f64,
    pub gold: RelationLabel,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdSearchResult {
    pub best_threshold: f64,
    pub best_mean_f1: f64,
    pub curve: Vec<(f64, f64)>,
}

impl ThresholdSearchResult {
    pub fn curve_csv(&self) -> String {
        let mut out = String::from("threshold,mean_f1\n");
        for (t, f) in &self.curve {
            let _ = writeln!(out, "{t},{f}");
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("threshold tuning needs at least one prediction")]
pub struct EmptyInputError;

/// Mean attack/support F1 from per-class counts `[attack, support]`.
fn mean_f1(counts: &[(usize, usize, usize); 2]) -> f64 {
    let a = Prf::from_counts(counts[0].0, counts[0].1, counts[0].2).f1;
    let s = Prf::from_counts(counts[1].0, counts[1].1, counts[1].2).f1;
    (a + s) / 2.0
}

/// Sweeps thresholds `{0} ∪ {observed probabilities}` under the `>=` gate
/// and returns the smallest threshold reaching the best mean attack/support
/// F1. Every optimum of the `>=` gate is attained at one of these points.
pub fn tune_threshold(entries: &[TuneEntry]) -> Result<ThresholdSearchResult, EmptyInputError> {
    if entries.is_empty() {
        return Err(EmptyInputError);
    }
    let slot = |r: RelationKind| match r {
        RelationKind::Attack => 0,
        RelationKind::Support => 1,
    };
    let gold_slot = |g: RelationLabel| match g {
        RelationLabel::Attack => Some(0),
        RelationLabel::Support => Some(1),
        RelationLabel::NoRelation => None,
    };

    // At threshold 0 every pair keeps its argmax relation.
    let mut counts = [(0usize, 0usize, 0usize); 2];
    for e in entries {
        let c = slot(e.relation);
        if gold_slot(e.gold) == Some(c) {
            counts[c].0 += 1;
        } else {
            counts[c].1 += 1;
            if let Some(g) = gold_slot(e.gold) {
                counts[g].2 += 1;
            }
        }
    }

    let mut by_p: Vec<&TuneEntry> = entries.iter().collect();
    by_p.sort_by(|a, b| a.max_entailment.total_cmp(&b.max_entailment));
    let mut thresholds: Vec<f64> = std::iter::once(0.0)
        .chain(by_p.iter().map(|e| e.max_entailment))
        .collect();
    thresholds.dedup_by(|a, b| a.total_cmp(b).is_eq());

    let mut curve = Vec::with_capacity(thresholds.len());
    let mut dropped = 0;
    for &t in &thresholds {
        // Pairs below t turn into no-relation.
        while dropped < by_p.len() && by_p[dropped].max_entailment < t {
            let e = by_p[dropped];
            let c = slot(e.relation);
            if gold_slot(e.gold) == Some(c) {
                counts[c].0 -= 1;
                counts[c].2 += 1;
            } else {
                counts[c].1 -= 1;
            }
            dropped += 1;
        }
        curve.push((t, mean_f1(&counts)));
    }
    let (best_threshold, best_mean_f1) =
        curve.iter().copied().fold(
            (f64::NAN, f64::NEG_INFINITY),
            |best, (t, f)| if f > best.1 { (t, f) } else { best },
        );
    Ok(ThresholdSearchResult {
        best_threshold,
        best_mean_f1,
        curve,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("{predictions} predictions but {golds} gold labels")]
pub struct LengthMismatchError {
    pub predictions: usize,
    pub golds: usize,
}

/// Counts of predictions by (chosen verbalization, gold label).
/// `no-relation` predictions are tallied in their own row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UsageMatrix {
    pub rows: Vec<String>,
    pub columns: Vec<RelationLabel>,
    pub counts: Vec<Vec<usize>>,
}

pub const NO_RELATION_ROW: &str = "no-relation";

impl UsageMatrix {
    pub fn get(&self, row: &str, gold: RelationLabel) -> usize {
        let r = self.rows.iter().position(|x| x == row);
        let c = self.columns.iter().position(|x| *x == gold);
        match (r, c) {
            (Some(r), Some(c)) => self.counts[r][c],
            _ => 0,
        }
    }

    pub fn total(&self) -> usize {
        self.counts.iter().flatten().sum()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("verb");
        for c in &self.columns {
            let _ = write!(out, ",{c}");
        }
        out.push('\n');
        for (r, row) in self.rows.iter().zip(&self.counts) {
            out.push_str(r);
            for v in row {
                let _ = write!(out, ",{v}");
            }
            out.push('\n');
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{:<14}", "verb \\ gold");
        for c in &self.columns {
            let _ = write!(out, "{:>13}", c.as_str());
        }
        out.push('\n');
        for (r, row) in self.rows.iter().zip(&self.counts) {
            let _ = write!(out, "{r:<14}");
            for v in row {
                let _ = write!(out, "{v:>13}");
            }
            out.push('\n');
        }
        out
    }
}

pub fn verbalization_usage(
    predictions: &[RelationPrediction],
    golds: &[RelationLabel],
    verbs: &VerbalizationSet,
) -> Result<UsageMatrix, LengthMismatchError> {
    if predictions.len() != golds.len() {
        return Err(LengthMismatchError {
            predictions: predictions.len(),
            golds: golds.len(),
        });
    }
    let mut rows: Vec<String> = verbs.ordered().map(|(_, v)| v.to_string()).collect();
    rows.push(NO_RELATION_ROW.to_string());
    let columns = RelationLabel::ALL.to_vec();
    let mut counts = vec![vec![0usize; columns.len()]; rows.len()];
    for (pred, gold) in predictions.iter().zip(golds) {
        let row_name = match (&pred.label, &pred.verb) {
            (RelationLabel::NoRelation, _) | (_, None) => NO_RELATION_ROW,
            (_, Some(v)) => v.as_str(),
        };
        let r = match rows.iter().position(|x| x == row_name) {
            Some(r) => r,
            None => {
                rows.insert(rows.len() - 1, row_name.to_string());
                counts.insert(counts.len() - 1, vec![0; columns.len()]);
                rows.len() - 2
            }
        };
        let c = columns.iter().position(|x| x == gold).unwrap();
        counts[r][c] += 1;
    }
    Ok(UsageMatrix { rows, columns, counts })
}

#[derive(Debug, thiserror::Error)]
pub enum PredictionIoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Schema { line: usize, message: String },
}

pub fn write_predictions_to<W: Write>(preds: &[RelationPrediction], mut out: W) -> std::io::Result<()> {
    for p in preds {
        serde_json::to_writer(&mut out, p)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

pub fn write_predictions(preds: &[RelationPrediction], path: impl AsRef<Path>) -> Result<(), PredictionIoError> {
    let path = path.as_ref();
    let io = |source| PredictionIoError::Io {
        path: path.to_path_buf(),
        source,
    };
    write_predictions_to(preds, BufWriter::new(File::create(path).map_err(io)?)).map_err(io)
}

pub fn read_predictions(path: impl AsRef<Path>) -> Result<Vec<RelationPrediction>, PredictionIoError> {
    let path = path.as_ref();
    let io = |source| PredictionIoError::Io {
        path: path.to_path_buf(),
        source,
    };
    let reader = BufReader::new(File::open(path).map_err(io)?);
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(io)?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| PredictionIoError::Schema {
            line: i + 1,
            message: e.to_string(),
        })?);
    }
    Ok(out)
}

/// Distinct document ids among predictions, sorted.
pub fn predicted_documents(preds: &[RelationPrediction]) -> BTreeSet<&str> {
    preds.iter().map(|p| p.doc.as_str()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::relation_report;
    use crate::scorer::{EntailmentScores, FixtureScorer};

    /// Scorer returning a fixed entailment per verb (the verb is the middle
    /// word of "x VERB y").
    struct ByVerb(Vec<(&'static str, f64)>);

    impl EntailmentScorer for ByVerb {
        fn score_batch(&self, _premise: &str, hyps: &[String]) -> Result<Vec<EntailmentScores>, ScorerError> {
            Ok(hyps
                .iter()
                .map(|h| {
                    let verb = h.split(' ').nth(1).unwrap();
                    let e = self.0.iter().find(|(v, _)| *v == verb).map(|(_, p)| *p).unwrap_or(0.0);
                    EntailmentScores {
                        entailment: e,
                        neutral: (1.0 - e) / 2.0,
                        contradiction: (1.0 - e) / 2.0,
                    }
                })
                .collect())
        }
    }

    fn key() -> PairKey {
        PairKey {
            doc: "d".into(),
            x: 0,
            y: 1,
        }
    }

    #[test]
    fn dominant_attack() {
        let s = ByVerb(vec![("attack", 0.7), ("support", 0.2)]);
        let p = classify_pair(
            "p",
            key(),
            "x",
            "y",
            &VerbalizationSet::initial(),
            &s,
            Gate::new(0.5).unwrap(),
        )
        .unwrap();
        assert_eq!(p.label, RelationLabel::Attack);
        assert_eq!(p.verb.as_deref(), Some("attack"));
        assert_eq!(p.p, 0.7);
    }

    #[test]
    fn below_threshold_is_no_relation() {
        let s = ByVerb(vec![("attack", 0.4), ("support", 0.4)]);
        let p = classify_pair(
            "p",
            key(),
            "x",
            "y",
            &VerbalizationSet::initial(),
            &s,
            Gate::new(0.5).unwrap(),
        )
        .unwrap();
        assert_eq!(p.label, RelationLabel::NoRelation);
        // Tie goes to the first verb in attack-then-support order.
        assert_eq!(p.verb.as_deref(), Some("attack"));
    }

    #[test]
    fn figure_pair_with_confirm_ranked_highest() {
        let x = "The cervical spine seems to be undamaged";
        let y = "We will sit him on the stretcher to be able to explore the cervical spine";
        let verbs = VerbalizationSet::extended();
        let mut fixture = String::new();
        for (_, v) in verbs.ordered() {
            let e = if v == "confirm" { 0.81 } else { 0.05 };
            let rest = (1.0 - e) / 2.0;
            fixture.push_str(
                &serde_json::json!({
                    "premise": "case", "hypothesis": render_hypothesis(x, v, y),
                    "entailment": e, "neutral": rest, "contradiction": rest
                })
                .to_string(),
            );
            fixture.push('\n');
        }
        let scorer = FixtureScorer::from_reader(fixture.as_bytes(), Path::new("mem")).unwrap();
        let p = classify_pair("case", key(), x, y, &verbs, &scorer, Gate::new(0.2).unwrap()).unwrap();
        assert_eq!(p.label, RelationLabel::Support);
        assert_eq!(p.verb.as_deref(), Some("confirm"));
    }

    #[test]
    fn gate_comparison() {
        let g = Gate::new(0.5).unwrap();
        assert!(g.admits(0.5));
        assert!(!g.strict(true).admits(0.5));
        assert!(Gate::new(0.0).unwrap().admits(0.0));
        assert!(Gate::new(1.5).is_err());
        assert!(Gate::new(-0.1).is_err());
    }

    fn entry(rel: RelationKind, p: f64, gold: RelationLabel) -> TuneEntry {
        TuneEntry {
            relation: rel,
            max_entailment: p,
            gold,
        }
    }

    /// Exhaustive oracle: gate at each candidate and score from scratch.
    fn brute(entries: &[TuneEntry], t: f64) -> f64 {
        relation_report(entries.iter().map(|e| {
            let pred = if e.max_entailment >= t {
                e.relation.into()
            } else {
                RelationLabel::NoRelation
            };
            (pred, e.gold)
        }))
        .mean_attack_support_f1()
    }

    #[test]
    fn all_correct_gives_zero_threshold() {
        let entries = [
            entry(RelationKind::Support, 0.3, RelationLabel::Support),
            entry(RelationKind::Attack, 0.6, RelationLabel::Attack),
        ];
        let r = tune_threshold(&entries).unwrap();
        assert_eq!(r.best_threshold, 0.0);
        assert_eq!(r.best_mean_f1, 1.0);
    }

    #[test]
    fn three_pair_example_matches_exhaustive_oracle() {
        let entries = [
            entry(RelationKind::Support, 0.9, RelationLabel::Support),
            entry(RelationKind::Attack, 0.6, RelationLabel::NoRelation),
            entry(RelationKind::Attack, 0.4, RelationLabel::Support),
        ];
        let r = tune_threshold(&entries).unwrap();
        let candidates = [0.0, 0.4, 0.6, 0.9];
        let oracle: Vec<f64> = candidates.iter().map(|&t| brute(&entries, t)).collect();
        // Hand check: support keeps P=1 R=1/2 and attack never scores, so
        // every candidate gives 1/3 and the smallest one wins.
        assert!(oracle.iter().all(|f| (f - 1.0 / 3.0).abs() < 1e-12));
        assert_eq!(r.curve.iter().map(|c| c.0).collect::<Vec<_>>(), candidates);
        assert_eq!(r.curve.iter().map(|c| c.1).collect::<Vec<_>>(), oracle);
        assert_eq!(r.best_threshold, 0.0);
        assert!((r.best_mean_f1 - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn empty_input() {
        assert_eq!(tune_threshold(&[]), Err(EmptyInputError));
    }

    #[test]
    fn usage_matrix() {
        let verbs = VerbalizationSet::extended();
        let pred = RelationPrediction {
            doc: "d".into(),
            x: 0,
            y: 1,
            label: RelationLabel::Support,
            verb: Some("confirm".into()),
            p: 0.9,
        };
        let m = verbalization_usage(std::slice::from_ref(&pred), &[RelationLabel::Support], &verbs).unwrap();
        assert_eq!(m.get("confirm", RelationLabel::Support), 1);
        assert_eq!(m.total(), 1);
        assert_eq!(m.rows.len(), 11);
        let gated = RelationPrediction {
            label: RelationLabel::NoRelation,
            ..pred
        };
        let m = verbalization_usage(&[gated], &[RelationLabel::Attack], &verbs).unwrap();
        assert_eq!(m.get(NO_RELATION_ROW, RelationLabel::Attack), 1);
        let empty = verbalization_usage(&[], &[], &verbs).unwrap();
        assert_eq!(empty.total(), 0);
        assert!(verbalization_usage(&[], &[RelationLabel::Attack], &verbs).is_err());
    }

    #[test]
    fn prediction_line_format() {
        let p = RelationPrediction {
            doc: "d".into(),
            x: 0,
            y: 3,
            label: RelationLabel::NoRelation,
            verb: Some("attack".into()),
            p: 0.25,
        };
        let mut buf = Vec::new();
        write_predictions_to(&[p], &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "{\"doc\":\"d\",\"x\":0,\"y\":3,\"label\":\"no-relation\",\"verb\":\"attack\",\"p\":0.25}\n"
        );
    }
}

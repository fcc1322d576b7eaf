//! Conversion of annotated documents into NLI premise/hypothesis examples.
//!
//! The premise is the exam text without its answer options. Each annotated
//! `entity -> Major Claim` relation yields an entailment (verbalized with its
//! own relation) and a contradiction (verbalized with the opposite one).
//! Neutral pairs come from the selected [`NeutralStrategy`] and are
//! verbalized both ways.

mod balance;
mod io;
mod subsample;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use balance::{balance_neutrals, Balanced};
pub use io::{read_dataset, read_dataset_from, write_dataset, write_dataset_to, DatasetError};
pub use subsample::{subsample_documents, subsample_training};

use crate::corpus::{BoilerplateFilter, Document, EntityKind, RelationKind, SectionKind};
use crate::fraction::Fraction;
use crate::graph::{build_graph, neutral_pairs, NeutralStrategy};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum VerbalizationError {
    #[error("the {0} verbalization list is empty")]
    Empty(RelationKind),
    #[error("verbalization `{0}` appears more than once")]
    Duplicate(String),
}

/// Verbs used to render each relation as a hypothesis.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerbalizationSet {
    attack: Vec<String>,
    support: Vec<String>,
}

impl VerbalizationSet {
    pub fn new<S: Into<String>>(
        attack: impl IntoIterator<Item = S>,
        support: impl IntoIterator<Item = S>,
    ) -> Result<Self, VerbalizationError> {
        let attack: Vec<String> = attack.into_iter().map(Into::into).collect();
        let support: Vec<String> = support.into_iter().map(Into::into).collect();
        if attack.is_empty() {
            return Err(VerbalizationError::Empty(RelationKind::Attack));
        }
        if support.is_empty() {
            return Err(VerbalizationError::Empty(RelationKind::Support));
        }
        let mut seen = std::collections::HashSet::new();
        for v in attack.iter().chain(&support) {
            if !seen.insert(v.as_str()) {
                return Err(VerbalizationError::Duplicate(v.clone()));
            }
        }
        Ok(VerbalizationSet { attack, support })
    }

    /// The relation names themselves: "attack" and "support".
    pub fn initial() -> Self {
        VerbalizationSet::new(["attack"], ["support"]).unwrap()
    }

    /// Five verbs per relation.
    pub fn extended() -> Self {
        VerbalizationSet::new(
            ["attack", "challenge", "contradict", "dispute", "refute"],
            ["support", "confirm", "corroborate", "endorse", "validate"],
        )
        .unwrap()
    }

    /// "attack" for attacks, "confirm" and "corroborate" for supports.
    pub fn selected() -> Self {
        VerbalizationSet::new(["attack"], ["confirm", "corroborate"]).unwrap()
    }

    pub fn attack(&self) -> &[String] {
        &self.attack
    }

    pub fn support(&self) -> &[String] {
        &self.support
    }

    pub fn verbs(&self, rel: RelationKind) -> &[String] {
        match rel {
            RelationKind::Attack => &self.attack,
            RelationKind::Support => &self.support,
        }
    }

    /// The canonical verb for a relation: the first of its list.
    pub fn first(&self, rel: RelationKind) -> &str {
        &self.verbs(rel)[0]
    }

    /// Attack verbs followed by support verbs, each with its relation.
    pub fn ordered(&self) -> impl Iterator<Item = (RelationKind, &str)> {
        self.attack
            .iter()
            .map(|v| (RelationKind::Attack, v.as_str()))
            .chain(self.support.iter().map(|v| (RelationKind::Support, v.as_str())))
    }

    pub fn relation_of(&self, verb: &str) -> Option<RelationKind> {
        self.ordered().find(|(_, v)| *v == verb).map(|(r, _)| r)
    }
}

impl FromStr for VerbalizationSet {
    type Err = String;

    /// Accepts a preset name (`initial`, `extended`, `selected`) or an
    /// explicit `attack=a,b;support=c,d` list.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "initial" => return Ok(VerbalizationSet::initial()),
            "extended" => return Ok(VerbalizationSet::extended()),
            "selected" => return Ok(VerbalizationSet::selected()),
            _ => {}
        }
        let mut attack = None;
        let mut support = None;
        for part in s.split(';') {
            let (key, list) = part
                .split_once('=')
                .ok_or_else(|| format!("expected `attack=...;support=...`, got `{s}`"))?;
            let verbs: Vec<String> = list
                .split(',')
                .map(|v| v.trim().to_string())
                .filter(|v| !v.is_empty())
                .collect();
            match key.trim() {
                "attack" => attack = Some(verbs),
                "support" => support = Some(verbs),
                other => return Err(format!("unknown relation `{other}`")),
            }
        }
        VerbalizationSet::new(
            attack.ok_or("missing attack verbs")?,
            support.ok_or("missing support verbs")?,
        )
        .map_err(|e| e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NliLabel {
    Entailment,
    Neutral,
    Contradiction,
}

impl NliLabel {
    pub const ALL: [NliLabel; 3] = [NliLabel::Entailment, NliLabel::Neutral, NliLabel::Contradiction];

    pub fn as_str(&self) -> &'static str {
        match self {
            NliLabel::Entailment => "entailment",
            NliLabel::Neutral => "neutral",
            NliLabel::Contradiction => "contradiction",
        }
    }
}

impl fmt::Display for NliLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NliExample {
    pub premise: String,
    pub hypothesis: String,
    pub label: NliLabel,
    #[serde(rename = "doc")]
    pub doc_id: String,
    pub x: usize,
    pub y: usize,
    /// Relation the hypothesis verbalizes.
    pub rel: RelationKind,
    pub verb: String,
    pub strategy: Option<NeutralStrategy>,
}

/// How a training dataset is generated.
#[derive(Debug, Clone)]
pub struct DatasetConfig {
    pub strategy: NeutralStrategy,
    pub seed: u64,
    pub verbs: VerbalizationSet,
    pub fraction: Fraction,
    pub balance_neutrals: bool,
    pub boilerplate: BoilerplateFilter,
}

impl DatasetConfig {
    pub fn new(strategy: NeutralStrategy) -> Self {
        DatasetConfig {
            strategy,
            seed: 42,
            verbs: VerbalizationSet::initial(),
            fraction: Fraction::ONE,
            balance_neutrals: false,
            boilerplate: BoilerplateFilter::default(),
        }
    }
}

/// Non-fatal conditions met while generating or balancing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Warning {
    NoMajorClaim { doc_id: String },
    EmptyPremise { doc_id: String },
    DroppedRelation { doc_id: String, src: usize, dst: usize },
    NeutralShortfall { target: usize, available: usize },
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::NoMajorClaim { doc_id } => write!(f, "document `{doc_id}` has no Major Claim; skipped"),
            Warning::EmptyPremise { doc_id } => write!(f, "document `{doc_id}` has an empty premise"),
            Warning::DroppedRelation { doc_id, src, dst } => {
                write!(
                    f,
                    "document `{doc_id}`: relation {src} -> {dst} dropped with a boilerplate endpoint"
                )
            }
            Warning::NeutralShortfall { target, available } => {
                write!(
                    f,
                    "only {available} neutral examples available for a target of {target}"
                )
            }
        }
    }
}

/// Case, question and explanation texts joined by newlines; answer options
/// and empty sections are left out.
pub fn build_premise_text(doc: &Document) -> String {
    doc.sections()
        .iter()
        .filter(|s| !matches!(s.kind, SectionKind::Option { .. }))
        .map(|s| s.text.as_str())
        .filter(|t| !t.is_empty())
        .collect::<Vec<_>>()
        .join("\n")
}

pub fn render_hypothesis(x_text: &str, verb: &str, y_text: &str) -> String {
    format!("{x_text} {verb} {y_text}")
}

/// Generated examples plus the warnings raised on the way.
#[derive(Debug, Clone, Default)]
pub struct Generated {
    pub examples: Vec<NliExample>,
    pub warnings: Vec<Warning>,
}

/// Builds entailment, contradiction and neutral examples for every document,
/// in document-id order. Only the first verb of each relation is used.
pub fn generate_examples(docs: &[Document], config: &DatasetConfig) -> Generated {
    let mut order: Vec<&Document> = docs.iter().collect();
    order.sort_by(|a, b| a.id().cmp(b.id()));
    let mut out = Generated::default();
    for doc in order {
        generate_document(doc, config, &mut out);
    }
    out
}

fn generate_document(doc: &Document, config: &DatasetConfig, out: &mut Generated) {
    let doc_id = doc.id().to_string();
    let build = build_graph(doc, &config.boilerplate);
    for r in &build.dropped_edges {
        out.warnings.push(Warning::DroppedRelation {
            doc_id: doc_id.clone(),
            src: r.src,
            dst: r.dst,
        });
    }
    let graph = build.graph;
    if !graph.nodes().iter().any(|n| n.kind == EntityKind::MajorClaim) {
        out.warnings.push(Warning::NoMajorClaim { doc_id });
        return;
    }
    let premise = build_premise_text(doc);
    if premise.is_empty() {
        out.warnings.push(Warning::EmptyPremise { doc_id: doc_id.clone() });
    }
    let text = |ordinal: usize| doc.span_text(&doc.spans()[ordinal]);
    let example = |x: usize, y: usize, rel: RelationKind, label: NliLabel, strategy: Option<NeutralStrategy>| {
        let verb = config.verbs.first(rel).to_string();
        NliExample {
            premise: premise.clone(),
            hypothesis: render_hypothesis(text(x), &verb, text(y)),
            label,
            doc_id: doc_id.clone(),
            x,
            y,
            rel,
            verb,
            strategy,
        }
    };

    let mut annotated: Vec<_> = graph
        .edges()
        .iter()
        .filter(|e| {
            graph.node(e.dst).map(|n| n.kind) == Some(EntityKind::MajorClaim)
                && graph.node(e.src).map(|n| n.kind) != Some(EntityKind::MajorClaim)
        })
        .copied()
        .collect();
    annotated.sort();
    for e in annotated {
        out.examples
            .push(example(e.src, e.dst, e.rel, NliLabel::Entailment, None));
        out.examples
            .push(example(e.src, e.dst, e.rel.opposite(), NliLabel::Contradiction, None));
    }
    for p in neutral_pairs(&graph, config.strategy) {
        for rel in [RelationKind::Support, RelationKind::Attack] {
            out.examples
                .push(example(p.x, p.y, rel, NliLabel::Neutral, Some(config.strategy)));
        }
    }
}

/// Full training-set recipe: generate, keep `config.fraction` of the
/// documents, then balance neutrals if requested.
pub fn build_training_dataset(docs: &[Document], config: &DatasetConfig) -> Generated {
    let Generated { examples, mut warnings } = generate_examples(docs, config);
    let mut examples = subsample_training(&examples, config.fraction, config.seed);
    if config.balance_neutrals {
        let balanced = balance_neutrals(&examples, config.seed);
        if let Some(w) = balanced.shortfall {
            warnings.push(w);
        }
        examples = balanced.examples;
    }
    Generated { examples, warnings }
}

/// Example counts per label.
pub fn label_counts(examples: &[NliExample]) -> [usize; 3] {
    let mut counts = [0; 3];
    for e in examples {
        counts[e.label as usize] += 1;
    }
    counts
}

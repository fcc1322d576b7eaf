use std::collections::HashMap;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Duration;

use anyhow::{anyhow, bail, Context, Result};
use argmine::corpus::{parse_corpus, BoilerplateFilter};
use argmine::nli::VerbalizationSet;
use argmine::scorer::ScorerConfig;
use argmine::zeroshot::{
    classify_corpus, gold_pairs, predicted_documents, read_predictions, tune_threshold, verbalization_usage,
    write_predictions, ClassifyOptions, Gate, PairKey, RelationLabel, RelationPrediction, ScoredPair, TuneEntry,
};
use clap::{Args, Subcommand};
use serde_json::json;

use crate::config::ConfigFile;
use crate::output::{emit, json_bytes, write_meta, Format};
use crate::UsageError;

#[derive(Subcommand)]
pub enum RelationsCommand {
    /// Zero-shot support/attack/no-relation labels for entity to Major Claim pairs
    Classify(ClassifyArgs),
    /// Pick the threshold maximizing mean attack/support F1 on stored predictions
    Tune(TuneArgs),
    /// Counts of argmax verbs against gold relation labels
    VerbMatrix(MatrixArgs),
}

#[derive(Args)]
pub struct ClassifyArgs {
    /// Corpus JSONL
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    /// Predictions JSONL; run metadata goes to <FILE>.meta.json
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
    /// heuristic, fixture:PATH or remote [default: heuristic]
    #[arg(long)]
    scorer: Option<ScorerChoice>,
    /// Remote scorer base URL [default: $ARGMINE_SCORER_URL]
    #[arg(long, value_name = "URL")]
    endpoint: Option<String>,
    /// Minimum entailment probability for a support/attack label [default: 0.5]
    #[arg(long)]
    threshold: Option<f64>,
    /// Require probability strictly above the threshold
    #[arg(long)]
    strict_gt: bool,
    /// Verb preset (initial, extended, selected) or `attack=a,b;support=c` [default: initial]
    #[arg(long)]
    verbs: Option<VerbalizationSet>,
    /// Documents scored concurrently [default: 4]
    #[arg(long)]
    workers: Option<usize>,
    /// Remote request timeout [default: 30]
    #[arg(long)]
    timeout_secs: Option<u64>,
    /// Hypotheses per remote request [default: 16]
    #[arg(long)]
    max_batch: Option<usize>,
    /// Concurrent remote requests [default: 4]
    #[arg(long)]
    max_in_flight: Option<usize>,
    /// Keep entities matching the boilerplate patterns
    #[arg(long)]
    no_boilerplate_filter: bool,
}

#[derive(Args)]
pub struct GoldArgs {
    /// Predictions JSONL written by `relations classify`
    #[arg(long, value_name = "FILE")]
    pub pred: PathBuf,
    /// Gold corpus JSONL
    #[arg(long, value_name = "FILE")]
    gold: PathBuf,
    /// Verbs used for classification [default: initial]
    #[arg(long)]
    verbs: Option<VerbalizationSet>,
    /// Use when classification ran with --no-boilerplate-filter
    #[arg(long)]
    no_boilerplate_filter: bool,
}

#[derive(Args)]
pub struct TuneArgs {
    #[command(flatten)]
    gold: GoldArgs,
    /// CSV file receiving the threshold/mean F1 curve
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
pub struct MatrixArgs {
    #[command(flatten)]
    gold: GoldArgs,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub enum ScorerChoice {
    Heuristic,
    Fixture(PathBuf),
    Remote,
}

impl FromStr for ScorerChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "heuristic" => Ok(ScorerChoice::Heuristic),
            "remote" => Ok(ScorerChoice::Remote),
            _ => match s.strip_prefix("fixture:") {
                Some(path) if !path.is_empty() => Ok(ScorerChoice::Fixture(PathBuf::from(path))),
                _ => Err(format!("expected heuristic, fixture:PATH or remote, got `{s}`")),
            },
        }
    }
}

fn filter(no_filter: bool) -> BoilerplateFilter {
    if no_filter {
        BoilerplateFilter::none()
    } else {
        BoilerplateFilter::default()
    }
}

fn positive(value: usize, name: &str) -> Result<usize, UsageError> {
    if value == 0 {
        return Err(UsageError(format!("{name} must be at least 1")));
    }
    Ok(value)
}

/// Gold labels aligned with `preds`, taken from the documents that appear in
/// the predictions. Both sides must cover the same pairs.
pub fn aligned_golds(preds: &[RelationPrediction], gold: &GoldArgs) -> Result<Vec<RelationLabel>> {
    let corpus = parse_corpus(&gold.gold)?;
    let docs = predicted_documents(preds);
    let in_scope: Vec<_> = corpus.into_iter().filter(|d| docs.contains(d.id())).collect();
    if in_scope.len() < docs.len() {
        bail!("predictions name documents missing from {}", gold.gold.display());
    }
    let mut by_key: HashMap<PairKey, RelationLabel> = gold_pairs(&in_scope, &filter(gold.no_boilerplate_filter))
        .into_iter()
        .collect();
    let golds = preds
        .iter()
        .map(|p| {
            by_key
                .remove(&p.key())
                .ok_or_else(|| anyhow!("predicted pair {} has no gold pair (duplicate or unknown)", p.key()))
        })
        .collect::<Result<Vec<_>>>()?;
    if let Some(missing) = by_key.keys().min() {
        bail!("{} gold pairs have no prediction, e.g. {missing}", by_key.len());
    }
    Ok(golds)
}

fn classify(a: ClassifyArgs, config: &ConfigFile) -> Result<()> {
    let threshold = config.resolve(a.threshold, "threshold", 0.5)?;
    let strict = config.switch(a.strict_gt, "strict_gt")?;
    let gate = Gate::new(threshold)
        .map_err(|e| UsageError(e.to_string()))?
        .strict(strict);
    let verbs = config.resolve(a.verbs, "verbs", VerbalizationSet::initial())?;
    let workers = positive(config.resolve(a.workers, "workers", 4)?, "workers")?;
    let choice = config.resolve(a.scorer, "scorer", ScorerChoice::Heuristic)?;
    let scorer_config = match &choice {
        ScorerChoice::Heuristic => ScorerConfig::Heuristic,
        ScorerChoice::Fixture(path) => ScorerConfig::Fixture(path.clone()),
        ScorerChoice::Remote => {
            let endpoint = config.endpoint(a.endpoint)?.ok_or_else(|| {
                UsageError(format!(
                    "remote scorer needs --endpoint, `endpoint` in the config file or {}",
                    crate::config::SCORER_URL_ENV
                ))
            })?;
            let ScorerConfig::Remote(mut remote) = ScorerConfig::remote(endpoint) else {
                unreachable!()
            };
            remote.timeout =
                Duration::from_secs(config.resolve(a.timeout_secs, "timeout_secs", remote.timeout.as_secs())?);
            remote.max_batch = positive(config.resolve(a.max_batch, "max_batch", remote.max_batch)?, "max_batch")?;
            remote.max_in_flight = positive(
                config.resolve(a.max_in_flight, "max_in_flight", remote.max_in_flight)?,
                "max_in_flight",
            )?;
            ScorerConfig::Remote(remote)
        }
    };
    let scorer = scorer_config.build()?;
    let corpus = parse_corpus(&a.input)?;
    let options = ClassifyOptions {
        boilerplate: filter(a.no_boilerplate_filter),
        workers,
    };
    let classified = classify_corpus(&corpus, &verbs, scorer.as_ref(), &options)?;
    for (doc, err) in &classified.failures {
        log::warn!("{doc}: scoring failed: {err}");
    }
    let preds = classified.predictions(gate);
    write_predictions(&preds, &a.out)?;
    let count = |l: RelationLabel| preds.iter().filter(|p| p.label == l).count();
    log::info!(
        "{}: {} pairs ({} support, {} attack)",
        a.out.display(),
        preds.len(),
        count(RelationLabel::Support),
        count(RelationLabel::Attack)
    );
    write_meta(
        &a.out,
        json!({
            "command": "relations classify",
            "input": a.input,
            "scorer": match &choice {
                ScorerChoice::Heuristic => "heuristic".to_string(),
                ScorerChoice::Fixture(p) => format!("fixture:{}", p.display()),
                ScorerChoice::Remote => "remote".to_string(),
            },
            "threshold": gate.threshold(),
            "strict_gt": strict,
            "verbs": {"attack": verbs.attack(), "support": verbs.support()},
            "pairs": preds.len(),
            "failed_documents": classified.failures.iter().map(|(d, _)| d.as_str()).collect::<Vec<_>>(),
        }),
    )
}

fn tune(a: TuneArgs, config: &ConfigFile) -> Result<()> {
    let verbs = config.resolve(a.gold.verbs.clone(), "verbs", VerbalizationSet::initial())?;
    let preds = read_predictions(&a.gold.pred)?;
    let golds = aligned_golds(&preds, &a.gold)?;
    let entries = preds
        .iter()
        .zip(&golds)
        .map(|(p, &gold)| {
            let scored = ScoredPair::from_prediction(p, &verbs)
                .with_context(|| format!("pair {}: verb {:?} is not in the verb set", p.key(), p.verb))?;
            Ok(TuneEntry {
                relation: scored.relation,
                max_entailment: scored.max_entailment,
                gold,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let result = tune_threshold(&entries)?;
    if let Some(out) = &a.out {
        emit(Some(out), result.curve_csv().as_bytes())?;
    }
    emit(
        None,
        &json_bytes(&json!({
            "best_threshold": result.best_threshold,
            "best_mean_f1": result.best_mean_f1,
            "candidates": result.curve.len(),
        }))?,
    )
}

fn verb_matrix(a: MatrixArgs, config: &ConfigFile) -> Result<()> {
    let verbs = config.resolve(a.gold.verbs.clone(), "verbs", VerbalizationSet::initial())?;
    let preds = read_predictions(&a.gold.pred)?;
    let golds = aligned_golds(&preds, &a.gold)?;
    let matrix = verbalization_usage(&preds, &golds, &verbs)?;
    let bytes = match a.format {
        Format::Text => matrix.to_text().into_bytes(),
        Format::Csv => matrix.to_csv().into_bytes(),
        Format::Json => json_bytes(&json!({
            "rows": matrix.rows,
            "columns": matrix.columns,
            "counts": matrix.counts,
        }))?,
    };
    emit(a.out.as_deref(), &bytes)
}

pub fn run(cmd: RelationsCommand, config: &ConfigFile) -> Result<()> {
    match cmd {
        RelationsCommand::Classify(a) => classify(a, config),
        RelationsCommand::Tune(a) => tune(a, config),
        RelationsCommand::VerbMatrix(a) => verb_matrix(a, config),
    }
}

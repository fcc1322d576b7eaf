use std::path::PathBuf;

use anyhow::Result;
use argmine::corpus::{parse_corpus, BoilerplateFilter};
use argmine::graph::NeutralStrategy;
use argmine::nli::{
    build_training_dataset, label_counts, read_dataset, subsample_training, write_dataset, DatasetConfig,
    VerbalizationSet,
};
use argmine::Fraction;
use clap::{Args, Subcommand};
use serde_json::json;

use crate::config::ConfigFile;
use crate::output::write_meta;

#[derive(Subcommand)]
pub enum NliCommand {
    /// Generate entailment/neutral/contradiction examples from a corpus
    Gen(GenArgs),
    /// Keep a seeded fraction of the documents of a dataset
    Subsample(SubsampleArgs),
}

#[derive(Args)]
pub struct GenArgs {
    /// Corpus JSONL
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    /// Dataset JSONL to write; run metadata goes to <FILE>.meta.json
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
    /// Neutral selection strategy: v1, v2, v3 or v4 [default: v1]
    #[arg(long)]
    strategy: Option<NeutralStrategy>,
    /// Seed for subsampling and balancing [default: 42]
    #[arg(long)]
    seed: Option<u64>,
    /// Trim neutrals to the number of entailments
    #[arg(long)]
    balance: bool,
    /// Share of documents to keep, e.g. 0.15 or 15% [default: 1]
    #[arg(long)]
    fraction: Option<Fraction>,
    /// Verb preset (initial, extended, selected) or `attack=a,b;support=c` [default: initial]
    #[arg(long)]
    verbs: Option<VerbalizationSet>,
    /// Keep entities matching the boilerplate patterns
    #[arg(long)]
    no_boilerplate_filter: bool,
}

#[derive(Args)]
pub struct SubsampleArgs {
    /// Dataset JSONL
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
    /// Share of documents to keep, e.g. 0.05 or 5%
    #[arg(long)]
    fraction: Fraction,
    /// [default: 42]
    #[arg(long)]
    seed: Option<u64>,
}

fn check_fraction(f: Fraction) -> Result<Fraction, crate::UsageError> {
    if f.is_zero() || f > Fraction::ONE {
        return Err(crate::UsageError(format!("fraction {f} must be in (0, 1]")));
    }
    Ok(f)
}

pub fn run(cmd: NliCommand, config: &ConfigFile) -> Result<()> {
    match cmd {
        NliCommand::Gen(a) => {
            let mut ds = DatasetConfig::new(config.resolve(a.strategy, "strategy", NeutralStrategy::V1)?);
            ds.seed = config.resolve(a.seed, "seed", 42)?;
            ds.balance_neutrals = config.switch(a.balance, "balance")?;
            ds.fraction = check_fraction(config.resolve(a.fraction, "fraction", Fraction::ONE)?)?;
            ds.verbs = config.resolve(a.verbs, "verbs", VerbalizationSet::initial())?;
            if a.no_boilerplate_filter {
                ds.boilerplate = BoilerplateFilter::none();
            }
            let corpus = parse_corpus(&a.input)?;
            let generated = build_training_dataset(&corpus, &ds);
            for w in &generated.warnings {
                log::warn!("{w}");
            }
            write_dataset(&generated.examples, &a.out)?;
            let [e, n, c] = label_counts(&generated.examples);
            log::info!("{}: {e} entailment, {n} neutral, {c} contradiction", a.out.display());
            write_meta(
                &a.out,
                json!({
                    "command": "nli gen",
                    "input": a.input,
                    "strategy": ds.strategy,
                    "seed": ds.seed,
                    "balance": ds.balance_neutrals,
                    "fraction": ds.fraction,
                    "verbs": {"attack": ds.verbs.attack(), "support": ds.verbs.support()},
                    "counts": {"entailment": e, "neutral": n, "contradiction": c},
                    "warnings": generated.warnings.iter().map(|w| w.to_string()).collect::<Vec<_>>(),
                }),
            )
        }
        NliCommand::Subsample(a) => {
            let seed = config.resolve(a.seed, "seed", 42)?;
            let fraction = check_fraction(a.fraction)?;
            let examples = read_dataset(&a.input)?;
            let kept = subsample_training(&examples, fraction, seed);
            write_dataset(&kept, &a.out)?;
            let docs = |xs: &[argmine::nli::NliExample]| {
                xs.iter()
                    .map(|x| x.doc_id.as_str())
                    .collect::<std::collections::BTreeSet<_>>()
                    .len()
            };
            log::info!("kept {} of {} documents", docs(&kept), docs(&examples));
            write_meta(
                &a.out,
                json!({
                    "command": "nli subsample",
                    "input": a.input,
                    "fraction": fraction,
                    "seed": seed,
                    "documents": docs(&kept),
                    "examples": kept.len(),
                }),
            )
        }
    }
}

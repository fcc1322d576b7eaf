use std::collections::BTreeSet;
use std::path::PathBuf;

use anyhow::{anyhow, Result};
use argmine::corpus::{
    corpus_stats, parse_corpus, section_filter, split_corpus, write_corpus, BoilerplateFilter, SplitSpec,
};
use argmine::graph::{build_graph, to_dot};
use argmine::{Fraction, SectionType};
use clap::{Args, Subcommand};
use serde_json::json;

use crate::config::ConfigFile;
use crate::output::{emit, json_bytes, write_meta, Format};

#[derive(Subcommand)]
pub enum CorpusCommand {
    /// Parse a corpus and check every document invariant
    Validate(InArg),
    /// Entity and relation counts, overall and per section
    Stats(StatsArgs),
    /// Seeded document-level train/dev/test split
    Split(SplitArgs),
    /// Keep only entities from the given section types
    FilterSections(FilterArgs),
    /// Graphviz rendering of one document's argument graph
    GraphDot(DotArgs),
}

#[derive(Args)]
pub struct InArg {
    /// Corpus JSONL
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
}

#[derive(Args)]
pub struct StatsArgs {
    #[command(flatten)]
    input: InArg,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Output file (standard output if omitted)
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
pub struct SplitArgs {
    #[command(flatten)]
    input: InArg,
    /// Directory receiving train.jsonl, dev.jsonl and test.jsonl
    #[arg(long, value_name = "DIR")]
    out_dir: PathBuf,
    /// Shuffle seed [default: 42]
    #[arg(long)]
    seed: Option<u64>,
    /// Train share, e.g. 0.7, 70% or 7/10
    #[arg(long, default_value = "0.7")]
    train: Fraction,
    #[arg(long, default_value = "0.1")]
    dev: Fraction,
    #[arg(long, default_value = "0.2")]
    test: Fraction,
}

#[derive(Args)]
pub struct FilterArgs {
    #[command(flatten)]
    input: InArg,
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
    /// Section types whose entities are kept
    #[arg(
        long,
        value_delimiter = ',',
        required = true,
        value_name = "case,question,option,explanation"
    )]
    keep: Vec<SectionType>,
}

#[derive(Args)]
pub struct DotArgs {
    #[command(flatten)]
    input: InArg,
    /// Document id
    #[arg(long)]
    doc: String,
    /// Keep entities matching the boilerplate patterns
    #[arg(long)]
    no_boilerplate_filter: bool,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

pub fn run(cmd: CorpusCommand, config: &ConfigFile) -> Result<()> {
    match cmd {
        CorpusCommand::Validate(a) => {
            let corpus = parse_corpus(&a.input)?;
            let entities: usize = corpus.iter().map(|d| d.spans().len()).sum();
            let relations: usize = corpus.iter().map(|d| d.relations().len()).sum();
            log::info!("{} documents, {entities} entities, {relations} relations", corpus.len());
            emit(None, format!("ok {} documents\n", corpus.len()).as_bytes())
        }
        CorpusCommand::Stats(a) => {
            let stats = corpus_stats(&parse_corpus(&a.input.input)?);
            let bytes = match a.format {
                Format::Json => json_bytes(&stats)?,
                Format::Text => stats.to_text().into_bytes(),
                Format::Csv => return Err(anyhow!(crate::UsageError("stats support json or text".into()))),
            };
            emit(a.out.as_deref(), &bytes)
        }
        CorpusCommand::Split(a) => {
            let seed = config.resolve(a.seed, "seed", 42)?;
            let spec = SplitSpec::new(a.train, a.dev, a.test, seed).map_err(|e| crate::UsageError(e.to_string()))?;
            let corpus = parse_corpus(&a.input.input)?;
            let (train, dev, test) = split_corpus(&corpus, &spec);
            std::fs::create_dir_all(&a.out_dir)?;
            for (name, part) in [("train", &train), ("dev", &dev), ("test", &test)] {
                let path = a.out_dir.join(format!("{name}.jsonl"));
                write_corpus(part, &path)?;
                log::info!("{}: {} documents", path.display(), part.len());
            }
            write_meta(
                &a.out_dir.join("split"),
                json!({
                    "command": "corpus split",
                    "input": a.input.input,
                    "seed": seed,
                    "fractions": {"train": a.train, "dev": a.dev, "test": a.test},
                    "documents": {"train": train.len(), "dev": dev.len(), "test": test.len()},
                }),
            )
        }
        CorpusCommand::FilterSections(a) => {
            let keep: BTreeSet<SectionType> = a.keep.into_iter().collect();
            let filtered = section_filter(&parse_corpus(&a.input.input)?, &keep);
            write_corpus(&filtered, &a.out)?;
            Ok(())
        }
        CorpusCommand::GraphDot(a) => {
            let corpus = parse_corpus(&a.input.input)?;
            let doc = corpus
                .iter()
                .find(|d| d.id() == a.doc)
                .ok_or_else(|| anyhow!("document `{}` not found", a.doc))?;
            let filter = if a.no_boilerplate_filter {
                BoilerplateFilter::none()
            } else {
                BoilerplateFilter::default()
            };
            let graph = build_graph(doc, &filter).graph;
            emit(a.out.as_deref(), to_dot(doc, &graph).as_bytes())
        }
    }
}

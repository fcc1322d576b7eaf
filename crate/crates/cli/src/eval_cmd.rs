use std::collections::HashMap;
use std::io::BufRead;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use argmine::corpus::parse_corpus;
use argmine::eval::{entity_span_f1, nli_label_f1, relation_prf, scarcity_curve, EvalReport, SpanEvalDoc};
use argmine::nli::{read_dataset, NliLabel};
use argmine::zeroshot::read_predictions;
use argmine::Fraction;
use clap::{Args, Subcommand};
use serde::Deserialize;

use crate::output::{emit, json_bytes, Format};
use crate::relations_cmd::{aligned_golds, GoldArgs};
use crate::UsageError;

#[derive(Subcommand)]
pub enum EvalCommand {
    /// Exact-match premise/claim span F1 between two corpora
    Entities(EntitiesArgs),
    /// Support/attack P/R/F1 of relation predictions against gold pairs
    Relations(RelationsArgs),
    /// Per-label F1 of NLI predictions against a gold dataset
    Nli(NliArgs),
    /// Mean attack/support F1 per training fraction, as CSV
    Curve(CurveArgs),
}

#[derive(Args)]
pub struct ReportOut {
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Output file (standard output if omitted)
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
pub struct EntitiesArgs {
    /// Gold corpus JSONL
    #[arg(long, value_name = "FILE")]
    gold: PathBuf,
    /// Predicted corpus JSONL; documents are matched by id
    #[arg(long, value_name = "FILE")]
    pred: PathBuf,
    #[command(flatten)]
    report: ReportOut,
}

#[derive(Args)]
pub struct RelationsArgs {
    #[command(flatten)]
    gold: GoldArgs,
    #[command(flatten)]
    report: ReportOut,
}

#[derive(Args)]
pub struct NliArgs {
    /// Gold dataset JSONL
    #[arg(long, value_name = "FILE")]
    gold: PathBuf,
    /// JSONL with a `label` field per line, aligned with the gold lines
    #[arg(long, value_name = "FILE")]
    pred: PathBuf,
    #[command(flatten)]
    report: ReportOut,
}

#[derive(Args)]
pub struct CurveArgs {
    /// FRACTION=REPORT.json, one per training fraction (repeatable)
    #[arg(long = "point", value_name = "FRACTION=FILE", required = true)]
    points: Vec<String>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Deserialize)]
struct LabelLine {
    label: NliLabel,
}

fn emit_report(report: &EvalReport, out: &ReportOut) -> Result<()> {
    let bytes = match out.format {
        Format::Json => json_bytes(report)?,
        Format::Text => report.to_text().into_bytes(),
        Format::Csv => return Err(anyhow!(UsageError("reports support json or text".into()))),
    };
    emit(out.out.as_deref(), &bytes)
}

fn read_labels(path: &PathBuf) -> Result<Vec<NliLabel>> {
    let file = std::fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let mut labels = Vec::new();
    for (i, line) in std::io::BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed: LabelLine = serde_json::from_str(&line)
            .with_context(|| format!("{}:{}: expected an object with a `label` field", path.display(), i + 1))?;
        labels.push(parsed.label);
    }
    Ok(labels)
}

pub fn run(cmd: EvalCommand) -> Result<()> {
    match cmd {
        EvalCommand::Entities(a) => {
            let gold = parse_corpus(&a.gold)?;
            let pred = parse_corpus(&a.pred)?;
            let by_id: HashMap<&str, _> = pred.iter().map(|d| (d.id(), d)).collect();
            if by_id.len() != gold.len() {
                bail!("{} gold documents but {} predicted", gold.len(), by_id.len());
            }
            let docs = gold
                .iter()
                .map(|g| {
                    let p = by_id
                        .get(g.id())
                        .ok_or_else(|| anyhow!("document `{}` missing from {}", g.id(), a.pred.display()))?;
                    Ok(SpanEvalDoc {
                        gold: g.tags(),
                        pred: p.tags(),
                        tokens: g.tokens(),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            emit_report(&entity_span_f1(&docs)?, &a.report)
        }
        EvalCommand::Relations(a) => {
            let preds = read_predictions(&a.gold.pred)?;
            let golds = aligned_golds(&preds, &a.gold)?;
            let keyed: Vec<_> = preds.iter().map(|p| (p.key(), p.label)).collect();
            let gold_keyed: Vec<_> = preds.iter().map(|p| p.key()).zip(golds).collect();
            emit_report(&relation_prf(&keyed, &gold_keyed)?, &a.report)
        }
        EvalCommand::Nli(a) => {
            let gold: Vec<NliLabel> = read_dataset(&a.gold)?.into_iter().map(|x| x.label).collect();
            let pred = read_labels(&a.pred)?;
            emit_report(&nli_label_f1(&pred, &gold)?, &a.report)
        }
        EvalCommand::Curve(a) => {
            let runs = a
                .points
                .iter()
                .map(|point| {
                    let (fraction, path) = point
                        .split_once('=')
                        .ok_or_else(|| UsageError(format!("--point expects FRACTION=FILE, got `{point}`")))?;
                    let fraction: Fraction = fraction
                        .parse()
                        .map_err(|e| UsageError(format!("--point {point}: {e}")))?;
                    let text = std::fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
                    let report: EvalReport =
                        serde_json::from_str(&text).with_context(|| format!("{path}: not an evaluation report"))?;
                    Ok((fraction, report))
                })
                .collect::<Result<Vec<_>>>()?;
            let curve = scarcity_curve(&runs);
            let bytes = match a.format {
                Format::Csv => curve.to_csv().into_bytes(),
                Format::Json => json_bytes(&curve)?,
                Format::Text => return Err(anyhow!(UsageError("curve supports csv or json".into()))),
            };
            emit(a.out.as_deref(), &bytes)
        }
    }
}

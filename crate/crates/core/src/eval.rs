//! Precision/recall/F1 for entity spans, relations and NLI labels.
//!
//! Zero denominators give 0. Entity matching is strict: a predicted span
//! counts only if a gold span has the same type and the same boundaries.
//! Major Claims are scored as claims.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::corpus::iob2::{chunks, section_break, Chunk, EntityTag};
use crate::corpus::{Tag, Token};
use crate::fraction::Fraction;
use crate::nli::NliLabel;
use crate::zeroshot::{PairKey, RelationLabel};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("length mismatch in item {index}: {left} vs {right}")]
    LengthMismatch { index: usize, left: usize, right: usize },
    #[error("prediction and gold pair sets differ ({0})")]
    PairMismatch(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

impl Prf {
    pub fn from_counts(tp: usize, fp: usize, fn_: usize) -> Prf {
        let precision = ratio(tp, tp + fp);
        let recall = ratio(tp, tp + fn_);
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        Prf {
            precision,
            recall,
            f1,
            tp,
            fp,
            fn_,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MacroMean {
    pub labels: Vec<String>,
    pub mean_f1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub per_label: IndexMap<String, Prf>,
    pub micro: Prf,
    pub macro_mean: Option<MacroMean>,
}

impl EvalReport {
    /// Builds the report from per-label (tp, fp, fn) counts, in order.
    fn from_counts(counts: &[(&str, usize, usize, usize)], macro_labels: Option<&[&str]>) -> EvalReport {
        let per_label: IndexMap<String, Prf> = counts
            .iter()
            .map(|&(l, tp, fp, fn_)| (l.to_string(), Prf::from_counts(tp, fp, fn_)))
            .collect();
        let (tp, fp, fn_) = counts
            .iter()
            .fold((0, 0, 0), |(a, b, c), &(_, tp, fp, fn_)| (a + tp, b + fp, c + fn_));
        let macro_mean = macro_labels.map(|labels| MacroMean {
            labels: labels.iter().map(|l| l.to_string()).collect(),
            mean_f1: labels.iter().map(|l| per_label[*l].f1).sum::<f64>() / labels.len() as f64,
        });
        EvalReport {
            per_label,
            micro: Prf::from_counts(tp, fp, fn_),
            macro_mean,
        }
    }

    pub fn f1(&self, label: &str) -> Option<f64> {
        self.per_label.get(label).map(|p| p.f1)
    }

    /// Mean of the attack and support F1 scores (0 for a missing label).
    pub fn mean_attack_support_f1(&self) -> f64 {
        (self.f1("attack").unwrap_or(0.0) + self.f1("support").unwrap_or(0.0)) / 2.0
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<16}{:>10}{:>10}{:>10}{:>8}{:>8}{:>8}",
            "label", "precision", "recall", "f1", "tp", "fp", "fn"
        );
        let row = |out: &mut String, name: &str, p: &Prf| {
            let _ = writeln!(
                out,
                "{:<16}{:>10.4}{:>10.4}{:>10.4}{:>8}{:>8}{:>8}",
                name, p.precision, p.recall, p.f1, p.tp, p.fp, p.fn_
            );
        };
        for (label, p) in &self.per_label {
            row(&mut out, label, p);
        }
        row(&mut out, "micro", &self.micro);
        if let Some(m) = &self.macro_mean {
            let _ = writeln!(
                out,
                "{:<16}{:>30.4}",
                format!("mean({})", m.labels.join("/")),
                m.mean_f1
            );
        }
        out
    }
}

/// Gold and predicted tags for one document. Tokens supply section
/// boundaries, which spans never cross.
#[derive(Debug, Clone, Copy)]
pub struct SpanEvalDoc<'a> {
    pub gold: &'a [Tag],
    pub pred: &'a [Tag],
    pub tokens: &'a [Token],
}

/// Strict span P/R/F1 for premises and claims, plus micro over both.
pub fn entity_span_f1(docs: &[SpanEvalDoc<'_>]) -> Result<EvalReport, EvalError> {
    let mut counts: BTreeMap<EntityTag, (usize, usize, usize)> = BTreeMap::new();
    for (index, doc) in docs.iter().enumerate() {
        for (left, right) in [(doc.gold.len(), doc.pred.len()), (doc.gold.len(), doc.tokens.len())] {
            if left != right {
                return Err(EvalError::LengthMismatch { index, left, right });
            }
        }
        let gold: HashSet<Chunk> = chunks(doc.gold, section_break(doc.tokens)).into_iter().collect();
        let pred: HashSet<Chunk> = chunks(doc.pred, section_break(doc.tokens)).into_iter().collect();
        for c in &pred {
            let e = counts.entry(c.tag).or_default();
            if gold.contains(c) {
                e.0 += 1;
            } else {
                e.1 += 1;
            }
        }
        for c in gold.difference(&pred) {
            counts.entry(c.tag).or_default().2 += 1;
        }
    }
    let get = |t| counts.get(&t).copied().unwrap_or_default();
    let (ptp, pfp, pfn) = get(EntityTag::Premise);
    let (ctp, cfp, cfn) = get(EntityTag::Claim);
    Ok(EvalReport::from_counts(
        &[("premise", ptp, pfp, pfn), ("claim", ctp, cfp, cfn)],
        None,
    ))
}

/// Per-class counts for (predicted, gold) relation label pairs. `NoRelation`
/// is the negative class.
pub fn relation_report<I>(pairs: I) -> EvalReport
where
    I: IntoIterator<Item = (RelationLabel, RelationLabel)>,
{
    // index 0 = attack, 1 = support
    let mut c = [(0usize, 0usize, 0usize); 2];
    let slot = |l: RelationLabel| match l {
        RelationLabel::Attack => Some(0),
        RelationLabel::Support => Some(1),
        RelationLabel::NoRelation => None,
    };
    for (pred, gold) in pairs {
        if pred == gold {
            if let Some(i) = slot(pred) {
                c[i].0 += 1;
            }
            continue;
        }
        if let Some(i) = slot(pred) {
            c[i].1 += 1;
        }
        if let Some(i) = slot(gold) {
            c[i].2 += 1;
        }
    }
    EvalReport::from_counts(
        &[("attack", c[0].0, c[0].1, c[0].2), ("support", c[1].0, c[1].1, c[1].2)],
        Some(&["attack", "support"]),
    )
}

/// Relation P/R/F1 with the mean of attack and support F1 as headline.
/// Predictions and golds are matched by pair identity.
pub fn relation_prf(
    predictions: &[(PairKey, RelationLabel)],
    golds: &[(PairKey, RelationLabel)],
) -> Result<EvalReport, EvalError> {
    let mut gold_map: HashMap<&PairKey, RelationLabel> = HashMap::with_capacity(golds.len());
    for (k, l) in golds {
        if gold_map.insert(k, *l).is_some() {
            return Err(EvalError::PairMismatch(format!("duplicate gold pair {k}")));
        }
    }
    let mut seen = HashSet::with_capacity(predictions.len());
    let mut aligned = Vec::with_capacity(predictions.len());
    for (k, pred) in predictions {
        if !seen.insert(k) {
            return Err(EvalError::PairMismatch(format!("duplicate predicted pair {k}")));
        }
        let gold = gold_map
            .get(k)
            .ok_or_else(|| EvalError::PairMismatch(format!("predicted pair {k} has no gold label")))?;
        aligned.push((*pred, *gold));
    }
    if seen.len() != gold_map.len() {
        let missing = gold_map.keys().find(|k| !seen.contains(*k)).expect("size differs");
        return Err(EvalError::PairMismatch(format!(
            "gold pair {missing} has no prediction"
        )));
    }
    Ok(relation_report(aligned))
}

/// Per-label P/R/F1 over entailment/neutral/contradiction. Entailment F1 is
/// the model-selection metric.
pub fn nli_label_f1(pred: &[NliLabel], gold: &[NliLabel]) -> Result<EvalReport, EvalError> {
    if pred.len() != gold.len() {
        return Err(EvalError::LengthMismatch {
            index: 0,
            left: pred.len(),
            right: gold.len(),
        });
    }
    let mut c = [(0usize, 0usize, 0usize); 3];
    for (p, g) in pred.iter().zip(gold) {
        if p == g {
            c[*p as usize].0 += 1;
        } else {
            c[*p as usize].1 += 1;
            c[*g as usize].2 += 1;
        }
    }
    let labels = NliLabel::ALL.map(|l| l.as_str());
    let counts: Vec<_> = (0..3).map(|i| (labels[i], c[i].0, c[i].1, c[i].2)).collect();
    Ok(EvalReport::from_counts(&counts, None))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub fraction: f64,
    pub mean_f1: f64,
}

/// Mean attack/support F1 per training fraction, sorted by fraction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScarcityCurve {
    pub points: Vec<CurvePoint>,
}

impl ScarcityCurve {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("fraction,mean_f1\n");
        for p in &self.points {
            let _ = writeln!(out, "{},{}", p.fraction, p.mean_f1);
        }
        out
    }
}

pub fn scarcity_curve(runs: &[(Fraction, EvalReport)]) -> ScarcityCurve {
    let mut sorted: Vec<&(Fraction, EvalReport)> = runs.iter().collect();
    sorted.sort_by_key(|(f, _)| *f);
    ScarcityCurve {
        points: sorted
            .into_iter()
            .map(|(f, r)| CurvePoint {
                fraction: f.to_f64(),
                mean_f1: r.mean_attack_support_f1(),
            })
            .collect(),
    }
}

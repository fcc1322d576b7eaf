#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use argmine::corpus::{parse_corpus, Section, Tag, Token};
use argmine::eval::relation_report;
use argmine::graph::{ArgumentGraph, CandidatePair, GraphNode, NeutralStrategy};
use argmine::zeroshot::{RelationLabel, TuneEntry};
use argmine::{Corpus, Document, EntityKind, RelationAnnotation, RelationKind, SectionKind};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

pub fn synthetic_corpus() -> Corpus {
    parse_corpus(fixture("synthetic_corpus.jsonl")).expect("bundled corpus parses")
}

pub fn manifest() -> serde_json::Value {
    let text = std::fs::read_to_string(fixture("synthetic_manifest.json")).unwrap();
    serde_json::from_str(&text).unwrap()
}

/// Builds a document from space-separated markup: `[P` / `[C` open an
/// entity, `]` closes it, every other word is a token. An option section is
/// written as `*text` when it is the correct one.
pub fn doc_from_markup(
    id: &str,
    case: &str,
    question: &str,
    options: &[&str],
    explanation: Option<&str>,
    relations: &[(usize, usize, RelationKind)],
) -> Document {
    let mut parts = vec![
        (SectionKind::Case, case.to_string()),
        (SectionKind::Question, question.to_string()),
    ];
    for (i, o) in options.iter().enumerate() {
        let correct = o.starts_with('*');
        parts.push((
            SectionKind::Option {
                option_id: i as u32 + 1,
                correct,
            },
            o.trim_start_matches('*').to_string(),
        ));
    }
    if let Some(e) = explanation {
        parts.push((SectionKind::Explanation, e.to_string()));
    }
    let mut sections = Vec::new();
    let mut tokens = Vec::new();
    let mut tags: Vec<String> = Vec::new();
    for (sec, (kind, markup)) in parts.into_iter().enumerate() {
        let mut text = String::new();
        let mut open: Option<(&str, bool)> = None;
        for word in markup.split_whitespace() {
            match word {
                "[P" => open = Some(("PREMISE", true)),
                "[C" => open = Some(("CLAIM", true)),
                "]" => open = None,
                w => {
                    if !text.is_empty() {
                        text.push(' ');
                    }
                    let cs = text.chars().count();
                    text.push_str(w);
                    tokens.push(Token {
                        text: w.to_string(),
                        section: sec,
                        char_start: cs,
                        char_end: cs + w.chars().count(),
                    });
                    tags.push(match open.as_mut() {
                        None => "O".to_string(),
                        Some((label, first)) => {
                            let prefix = if *first { "B" } else { "I" };
                            *first = false;
                            format!("{prefix}-{label}")
                        }
                    });
                }
            }
        }
        sections.push(Section { kind, text });
    }
    let relations = relations
        .iter()
        .map(|&(src, dst, rel)| RelationAnnotation { src, dst, rel })
        .collect();
    Document::new(id, sections, tokens, &tags, relations).expect("markup document is valid")
}

/// G5: P1..P3 = 0..2, C1 = 3, C2 = 4, MC1 = 5, MC2 = 6 with components
/// {P1, C2}, {P2, P3, C1, MC2}, {MC1}.
pub fn g5_graph() -> ArgumentGraph {
    use EntityKind::*;
    let kinds = [Premise, Premise, Premise, Claim, Claim, MajorClaim, MajorClaim];
    let nodes = kinds
        .iter()
        .enumerate()
        .map(|(ordinal, &kind)| GraphNode { ordinal, kind })
        .collect();
    let e = |src, dst, rel| RelationAnnotation { src, dst, rel };
    ArgumentGraph::new(
        nodes,
        vec![
            e(0, 4, RelationKind::Support),
            e(1, 3, RelationKind::Support),
            e(2, 3, RelationKind::Attack),
            e(3, 6, RelationKind::Support),
        ],
    )
    .unwrap()
}

/// Random graph with 2..=12 nodes, at least one Major Claim and at most 20
/// distinct directed edges.
pub fn random_graph(rng: &mut ChaCha8Rng) -> ArgumentGraph {
    let n = rng.gen_range(2..=12);
    let mut kinds: Vec<EntityKind> = (0..n)
        .map(|_| match rng.gen_range(0..3) {
            0 => EntityKind::Premise,
            1 => EntityKind::Claim,
            _ => EntityKind::MajorClaim,
        })
        .collect();
    let mc = rng.gen_range(0..n);
    kinds[mc] = EntityKind::MajorClaim;
    let mut all: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (0..n).map(move |b| (a, b)))
        .filter(|(a, b)| a != b)
        .collect();
    all.shuffle(rng);
    let m = rng.gen_range(0..=20.min(all.len()));
    let edges = all[..m]
        .iter()
        .map(|&(src, dst)| RelationAnnotation {
            src,
            dst,
            rel: if rng.gen_bool(0.5) {
                RelationKind::Support
            } else {
                RelationKind::Attack
            },
        })
        .collect();
    let nodes = kinds
        .into_iter()
        .enumerate()
        .map(|(ordinal, kind)| GraphNode { ordinal, kind })
        .collect();
    ArgumentGraph::new(nodes, edges).unwrap()
}

/// Neutral pairs straight from the strategy definitions, with reachability
/// computed by a transitive closure over the symmetric adjacency matrix.
pub fn brute_force_neutrals(graph: &ArgumentGraph, strategy: NeutralStrategy) -> BTreeSet<(usize, usize)> {
    let n = graph.nodes().iter().map(|n| n.ordinal).max().map_or(0, |m| m + 1);
    let mut reach = vec![vec![false; n]; n];
    for (i, row) in reach.iter_mut().enumerate() {
        row[i] = true;
    }
    for e in graph.edges() {
        reach[e.src][e.dst] = true;
        reach[e.dst][e.src] = true;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if reach[i][k] && reach[k][j] {
                    reach[i][j] = true;
                }
            }
        }
    }
    let mut out = BTreeSet::new();
    for x in graph.nodes() {
        for y in graph.nodes() {
            if x.kind == EntityKind::MajorClaim || y.kind != EntityKind::MajorClaim {
                continue;
            }
            let (x, y) = (x.ordinal, y.ordinal);
            if graph.edges().iter().any(|e| e.src == x && e.dst == y) {
                continue;
            }
            let degree = |v: usize| graph.edges().iter().filter(|e| e.src == v || e.dst == v).count();
            let keep = match strategy {
                NeutralStrategy::V1 => true,
                NeutralStrategy::V2 => !reach[x][y],
                NeutralStrategy::V3 => !graph.edges().iter().any(|e| e.src == x),
                NeutralStrategy::V4 => degree(x) == 0 || degree(y) == 0,
            };
            if keep {
                out.insert((x, y));
            }
        }
    }
    out
}

pub fn pair_set(pairs: &[CandidatePair]) -> BTreeSet<(usize, usize)> {
    pairs.iter().map(|p| (p.x, p.y)).collect()
}

/// Random tag sequence over 1..=max_tokens tokens split into 1..=4
/// sections. Any tag may follow any other.
pub fn random_tag_doc(rng: &mut ChaCha8Rng, max_tokens: usize) -> (Vec<Tag>, Vec<Tag>, Vec<Token>) {
    let n = rng.gen_range(1..=max_tokens);
    let mut section = 0;
    let tokens: Vec<Token> = (0..n)
        .map(|i| {
            if i > 0 && section < 3 && rng.gen_bool(0.1) {
                section += 1;
            }
            Token {
                text: format!("t{i}"),
                section,
                char_start: 0,
                char_end: 1,
            }
        })
        .collect();
    let mut tags = || -> Vec<Tag> {
        (0..n)
            .map(|_| {
                ["O", "O", "B-PREMISE", "I-PREMISE", "B-CLAIM", "I-CLAIM"][rng.gen_range(0..6)]
                    .parse()
                    .unwrap()
            })
            .collect()
    };
    let gold = tags();
    let pred = tags();
    (gold, pred, tokens)
}

/// Entities read directly off the tags: a run starts at every B, at an I
/// whose predecessor is O, of another type, or in another section, and
/// continues over I tags of the same type in the same section.
pub fn naive_spans(tags: &[Tag], tokens: &[Token]) -> Vec<(String, usize, usize)> {
    let parts: Vec<(char, String)> = tags
        .iter()
        .map(|t| {
            let s = t.to_string();
            match s.split_once('-') {
                Some((p, ty)) => (p.chars().next().unwrap(), ty.to_string()),
                None => ('O', String::new()),
            }
        })
        .collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < parts.len() {
        if parts[i].0 == 'O' {
            i += 1;
            continue;
        }
        let ty = parts[i].1.clone();
        let mut j = i;
        while j + 1 < parts.len()
            && parts[j + 1].0 == 'I'
            && parts[j + 1].1 == ty
            && tokens[j + 1].section == tokens[i].section
        {
            j += 1;
        }
        out.push((ty, i, j));
        i = j + 1;
    }
    out
}

/// Per-type (tp, fp, fn) by comparing every predicted span with every gold
/// span.
pub fn quadratic_match(gold: &[Tag], pred: &[Tag], tokens: &[Token]) -> BTreeMap<String, (usize, usize, usize)> {
    let g = naive_spans(gold, tokens);
    let p = naive_spans(pred, tokens);
    let mut counts: BTreeMap<String, (usize, usize, usize)> = BTreeMap::new();
    for ty in ["PREMISE", "CLAIM"] {
        counts.insert(ty.to_string(), (0, 0, 0));
    }
    for ps in &p {
        let hit = g.iter().any(|gs| gs == ps);
        let c = counts.get_mut(&ps.0).unwrap();
        if hit {
            c.0 += 1;
        } else {
            c.1 += 1;
        }
    }
    for gs in &g {
        if !p.iter().any(|ps| ps == gs) {
            counts.get_mut(&gs.0).unwrap().2 += 1;
        }
    }
    counts
}

/// Random tuning input of 1..=max_pairs entries. Probabilities mix
/// continuous draws with coarse values so ties occur.
pub fn random_tune_entries(rng: &mut ChaCha8Rng, max_pairs: usize) -> Vec<TuneEntry> {
    let n = rng.gen_range(1..=max_pairs);
    (0..n)
        .map(|_| {
            let p = if rng.gen_bool(0.3) {
                rng.gen_range(0..=10) as f64 / 10.0
            } else {
                rng.gen_range(0.0..1.0)
            };
            TuneEntry {
                relation: if rng.gen_bool(0.5) {
                    RelationKind::Support
                } else {
                    RelationKind::Attack
                },
                max_entailment: p,
                gold: [RelationLabel::Support, RelationLabel::Attack, RelationLabel::NoRelation][rng.gen_range(0..3)],
            }
        })
        .collect()
}

/// Mean attack/support F1 after gating every entry at `threshold` with `>=`.
pub fn gated_mean_f1(entries: &[TuneEntry], threshold: f64) -> f64 {
    relation_report(entries.iter().map(|e| {
        let pred = if e.max_entailment >= threshold {
            e.relation.into()
        } else {
            RelationLabel::NoRelation
        };
        (pred, e.gold)
    }))
    .mean_attack_support_f1()
}

/// Best mean F1 on the uniform grid {0, 0.001, ..., 1}.
pub fn grid_best(entries: &[TuneEntry]) -> f64 {
    (0..=1000)
        .map(|i| gated_mean_f1(entries, i as f64 / 1000.0))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Exhaustive sweep over {0} and every observed probability; smallest
/// threshold wins ties.
pub fn candidate_sweep(entries: &[TuneEntry]) -> (f64, f64) {
    let mut cands: Vec<f64> = std::iter::once(0.0)
        .chain(entries.iter().map(|e| e.max_entailment))
        .collect();
    cands.sort_by(f64::total_cmp);
    cands.dedup();
    let mut best = (f64::NAN, f64::NEG_INFINITY);
    for t in cands {
        let f = gated_mean_f1(entries, t);
        if f > best.1 {
            best = (t, f);
        }
    }
    best
}

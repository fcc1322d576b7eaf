//! Annotated exam corpus: documents, tokens, IOB2 tags and relations.
//!
//! Documents are read from JSONL, one record per line:
//!
//! ```text
//! {"id": "...", "sections": [{"kind": "case", "text": "..."}, ...],
//!  "tokens": [{"t": "...", "sec": 0, "cs": 0, "ce": 3}, ...],
//!  "tags": ["B-PREMISE", ...], "relations": [{"src": 0, "dst": 2, "rel": "support"}]}
//! ```
//!
//! Token offsets `cs`/`ce` count Unicode scalar values within the section
//! text. Relation endpoints are entity ordinals in decode order.

pub mod filter;
pub mod iob2;
pub mod split;
pub mod stats;

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

pub use filter::{filter_boilerplate, section_filter, BoilerplateFilter, DEFAULT_BOILERPLATE_PATTERNS};
pub use iob2::{decode_iob2, encode_iob2, EntityTag, Iob2Error, Tag};
pub use split::{split_corpus, SplitSpec};
pub use stats::{corpus_stats, StatsReport};

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: field `{field}`: {message}")]
    Schema {
        line: usize,
        field: String,
        message: String,
    },
    #[error("document `{doc_id}`: {reason}")]
    Invariant { doc_id: String, reason: String },
}

impl CorpusError {
    fn io(path: &Path, source: std::io::Error) -> Self {
        CorpusError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    fn invariant(doc_id: &str, reason: impl Into<String>) -> Self {
        CorpusError::Invariant {
            doc_id: doc_id.to_string(),
            reason: reason.into(),
        }
    }
}

/// Section kind without payload, used for filtering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SectionType {
    Case,
    Question,
    Option,
    Explanation,
}

impl SectionType {
    pub const ALL: [SectionType; 4] = [
        SectionType::Case,
        SectionType::Question,
        SectionType::Option,
        SectionType::Explanation,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            SectionType::Case => "case",
            SectionType::Question => "question",
            SectionType::Option => "option",
            SectionType::Explanation => "explanation",
        }
    }
}

impl fmt::Display for SectionType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for SectionType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "case" => Ok(SectionType::Case),
            "question" => Ok(SectionType::Question),
            "option" | "options" => Ok(SectionType::Option),
            "explanation" => Ok(SectionType::Explanation),
            other => Err(format!("unknown section kind `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SectionKind {
    Case,
    Question,
    Option { option_id: u32, correct: bool },
    Explanation,
}

impl SectionKind {
    pub fn section_type(&self) -> SectionType {
        match self {
            SectionKind::Case => SectionType::Case,
            SectionKind::Question => SectionType::Question,
            SectionKind::Option { .. } => SectionType::Option,
            SectionKind::Explanation => SectionType::Explanation,
        }
    }

    pub fn is_option(&self) -> bool {
        matches!(self, SectionKind::Option { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Section {
    pub kind: SectionKind,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub text: String,
    /// Index into the document's sections.
    pub section: usize,
    pub char_start: usize,
    pub char_end: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EntityKind {
    Premise,
    Claim,
    MajorClaim,
}

impl EntityKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            EntityKind::Premise => "premise",
            EntityKind::Claim => "claim",
            EntityKind::MajorClaim => "major_claim",
        }
    }
}

/// A decoded entity. `ordinal` is the position in decode order and is the
/// entity's identity within its document.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EntitySpan {
    pub ordinal: usize,
    pub kind: EntityKind,
    pub token_start: usize,
    pub token_end: usize,
    pub section: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RelationKind {
    Support,
    Attack,
}

impl RelationKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            RelationKind::Support => "support",
            RelationKind::Attack => "attack",
        }
    }

    pub fn opposite(&self) -> RelationKind {
        match self {
            RelationKind::Support => RelationKind::Attack,
            RelationKind::Attack => RelationKind::Support,
        }
    }
}

impl fmt::Display for RelationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for RelationKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "support" => Ok(RelationKind::Support),
            "attack" => Ok(RelationKind::Attack),
            other => Err(format!("unknown relation `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RelationAnnotation {
    pub src: usize,
    pub dst: usize,
    pub rel: RelationKind,
}

/// One exam item with validated annotations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    id: String,
    sections: Vec<Section>,
    tokens: Vec<Token>,
    tags: Vec<Tag>,
    relations: Vec<RelationAnnotation>,
    spans: Vec<EntitySpan>,
}

pub type Corpus = Vec<Document>;

impl Document {
    /// Validates every document invariant and decodes the entity spans.
    pub fn new<S: AsRef<str>>(
        id: impl Into<String>,
        sections: Vec<Section>,
        tokens: Vec<Token>,
        tags: &[S],
        relations: Vec<RelationAnnotation>,
    ) -> Result<Document, CorpusError> {
        let id = id.into();
        let correct = sections
            .iter()
            .filter(|s| matches!(s.kind, SectionKind::Option { correct: true, .. }))
            .count();
        if correct != 1 {
            return Err(CorpusError::invariant(
                &id,
                format!("expected exactly one correct option, found {correct}"),
            ));
        }
        let mut char_lens: Vec<Option<usize>> = vec![None; sections.len()];
        let mut prev: Option<&Token> = None;
        for (i, tok) in tokens.iter().enumerate() {
            let Some(section) = sections.get(tok.section) else {
                return Err(CorpusError::invariant(
                    &id,
                    format!("token {i} references missing section {}", tok.section),
                ));
            };
            if tok.char_start >= tok.char_end {
                return Err(CorpusError::invariant(
                    &id,
                    format!("token {i} has an empty or inverted range"),
                ));
            }
            let len = *char_lens[tok.section].get_or_insert_with(|| section.text.chars().count());
            if tok.char_end > len {
                return Err(CorpusError::invariant(
                    &id,
                    format!("token {i} ends past its section text"),
                ));
            }
            if let Some(p) = prev {
                if tok.section < p.section {
                    return Err(CorpusError::invariant(
                        &id,
                        format!("token {i} goes back to an earlier section"),
                    ));
                }
                if tok.section == p.section && tok.char_start < p.char_end {
                    return Err(CorpusError::invariant(
                        &id,
                        format!("token {i} overlaps or precedes token {}", i - 1),
                    ));
                }
            }
            prev = Some(tok);
        }
        let spans = decode_iob2(tags, &tokens, &sections).map_err(|e| CorpusError::invariant(&id, e.to_string()))?;
        let tags = iob2::parse_tags(tags).map_err(|e| CorpusError::invariant(&id, e.to_string()))?;
        let mut seen = HashSet::new();
        for r in &relations {
            if r.src >= spans.len() || r.dst >= spans.len() {
                return Err(CorpusError::invariant(
                    &id,
                    format!(
                        "relation {} -> {} references a missing entity ({} decoded)",
                        r.src,
                        r.dst,
                        spans.len()
                    ),
                ));
            }
            if r.src == r.dst {
                return Err(CorpusError::invariant(
                    &id,
                    format!("self relation on entity {}", r.src),
                ));
            }
            if !seen.insert(*r) {
                return Err(CorpusError::invariant(
                    &id,
                    format!("duplicate relation {} {} {}", r.src, r.rel, r.dst),
                ));
            }
        }
        Ok(Document {
            id,
            sections,
            tokens,
            tags,
            relations,
            spans,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn sections(&self) -> &[Section] {
        &self.sections
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn tags(&self) -> &[Tag] {
        &self.tags
    }

    pub fn relations(&self) -> &[RelationAnnotation] {
        &self.relations
    }

    /// Decoded entity spans, ordered by `token_start`.
    pub fn spans(&self) -> &[EntitySpan] {
        &self.spans
    }

    pub fn span(&self, ordinal: usize) -> Option<&EntitySpan> {
        self.spans.get(ordinal)
    }

    pub fn section_kind(&self, span: &EntitySpan) -> SectionKind {
        self.sections[span.section].kind
    }

    /// Surface text of a span, sliced from its section text.
    pub fn span_text(&self, span: &EntitySpan) -> &str {
        let first = &self.tokens[span.token_start];
        let last = &self.tokens[span.token_end];
        char_slice(&self.sections[first.section].text, first.char_start, last.char_end)
    }

    pub(crate) fn with_relations(&self, relations: Vec<RelationAnnotation>) -> Result<Document, CorpusError> {
        let tags: Vec<String> = self.tags.iter().map(Tag::to_string).collect();
        Document::new(
            self.id.clone(),
            self.sections.clone(),
            self.tokens.clone(),
            &tags,
            relations,
        )
    }
}

fn char_slice(text: &str, start: usize, end: usize) -> &str {
    let mut bounds = text.char_indices().map(|(b, _)| b).chain(std::iter::once(text.len()));
    let from = bounds.nth(start).unwrap_or(text.len());
    let to = if end > start {
        bounds.nth(end - start - 1).unwrap_or(text.len())
    } else {
        from
    };
    &text[from..to]
}

// Wire records. Field order here is the serialization order.

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSection {
    kind: SectionType,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    option_id: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    correct: Option<bool>,
    text: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawToken {
    t: String,
    sec: usize,
    cs: usize,
    ce: usize,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDocument {
    id: String,
    sections: Vec<RawSection>,
    tokens: Vec<RawToken>,
    tags: Vec<String>,
    #[serde(default)]
    relations: Vec<RelationAnnotation>,
}

impl RawDocument {
    fn into_document(self, line: usize) -> Result<Document, CorpusError> {
        let sections = self
            .sections
            .into_iter()
            .enumerate()
            .map(|(i, s)| {
                let kind = match s.kind {
                    SectionType::Case => SectionKind::Case,
                    SectionType::Question => SectionKind::Question,
                    SectionType::Explanation => SectionKind::Explanation,
                    SectionType::Option => SectionKind::Option {
                        option_id: s.option_id.ok_or_else(|| CorpusError::Schema {
                            line,
                            field: format!("sections[{i}].option_id"),
                            message: "option sections need an option_id".into(),
                        })?,
                        correct: s.correct.unwrap_or(false),
                    },
                };
                Ok(Section { kind, text: s.text })
            })
            .collect::<Result<Vec<_>, CorpusError>>()?;
        let tokens = self
            .tokens
            .into_iter()
            .map(|t| Token {
                text: t.t,
                section: t.sec,
                char_start: t.cs,
                char_end: t.ce,
            })
            .collect();
        Document::new(self.id, sections, tokens, &self.tags, self.relations)
    }

    fn from_document(doc: &Document) -> RawDocument {
        RawDocument {
            id: doc.id.clone(),
            sections: doc
                .sections
                .iter()
                .map(|s| match s.kind {
                    SectionKind::Option { option_id, correct } => RawSection {
                        kind: SectionType::Option,
                        option_id: Some(option_id),
                        correct: Some(correct),
                        text: s.text.clone(),
                    },
                    other => RawSection {
                        kind: other.section_type(),
                        option_id: None,
                        correct: None,
                        text: s.text.clone(),
                    },
                })
                .collect(),
            tokens: doc
                .tokens
                .iter()
                .map(|t| RawToken {
                    t: t.text.clone(),
                    sec: t.section,
                    cs: t.char_start,
                    ce: t.char_end,
                })
                .collect(),
            tags: doc.tags.iter().map(Tag::to_string).collect(),
            relations: doc.relations.clone(),
        }
    }
}

fn schema_error(line: usize, err: serde_path_to_error::Error<serde_json::Error>) -> CorpusError {
    let field = err.path().to_string();
    CorpusError::Schema {
        line,
        field: if field == "." { "<record>".into() } else { field },
        message: err.into_inner().to_string(),
    }
}

/// Parses one JSONL document record. `line` is 1-based and only used for
/// error reporting.
pub fn parse_document(record: &str, line: usize) -> Result<Document, CorpusError> {
    let de = &mut serde_json::Deserializer::from_str(record);
    let raw: RawDocument = serde_path_to_error::deserialize(de).map_err(|e| schema_error(line, e))?;
    raw.into_document(line)
}

pub fn read_corpus<R: BufRead>(reader: R, origin: &Path) -> Result<Corpus, CorpusError> {
    let mut docs = Vec::new();
    let mut ids = HashSet::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| CorpusError::io(origin, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let doc = parse_document(&line, i + 1)?;
        if !ids.insert(doc.id.clone()) {
            return Err(CorpusError::invariant(&doc.id, "duplicate document id"));
        }
        docs.push(doc);
    }
    Ok(docs)
}

pub fn parse_corpus(path: impl AsRef<Path>) -> Result<Corpus, CorpusError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| CorpusError::io(path, e))?;
    read_corpus(BufReader::new(file), path)
}

pub fn write_corpus_to<W: Write>(docs: &[Document], mut out: W) -> std::io::Result<()> {
    for doc in docs {
        serde_json::to_writer(&mut out, &RawDocument::from_document(doc))?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

pub fn write_corpus(docs: &[Document], path: impl AsRef<Path>) -> Result<(), CorpusError> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| CorpusError::io(path, e))?;
    write_corpus_to(docs, BufWriter::new(file)).map_err(|e| CorpusError::io(path, e))
}

/// Reads relation annotations in `doc_id<TAB>src<TAB>support|attack<TAB>dst` form.
pub fn read_relations_tsv<R: BufRead>(
    reader: R,
    origin: &Path,
) -> Result<BTreeMap<String, Vec<RelationAnnotation>>, CorpusError> {
    let mut out: BTreeMap<String, Vec<RelationAnnotation>> = BTreeMap::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| CorpusError::io(origin, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let bad = |field: &str, message: String| CorpusError::Schema {
            line: i + 1,
            field: field.to_string(),
            message,
        };
        if fields.len() != 4 {
            return Err(bad(
                "<record>",
                format!("expected 4 tab-separated fields, found {}", fields.len()),
            ));
        }
        let src = fields[1]
            .trim()
            .parse()
            .map_err(|_| bad("src", format!("`{}` is not an ordinal", fields[1])))?;
        let rel = fields[2].trim().parse().map_err(|m| bad("rel", m))?;
        let dst = fields[3]
            .trim()
            .parse()
            .map_err(|_| bad("dst", format!("`{}` is not an ordinal", fields[3])))?;
        out.entry(fields[0].to_string())
            .or_default()
            .push(RelationAnnotation { src, dst, rel });
    }
    Ok(out)
}

pub fn write_relations_tsv<W: Write>(docs: &[Document], mut out: W) -> std::io::Result<()> {
    for doc in docs {
        for r in &doc.relations {
            writeln!(out, "{}\t{}\t{}\t{}", doc.id, r.src, r.rel, r.dst)?;
        }
    }
    out.flush()
}

/// Replaces the relation layer of every document named in `relations`.
/// Documents absent from the map keep their relations; unknown ids are an
/// error.
pub fn apply_relations(
    corpus: &[Document],
    mut relations: BTreeMap<String, Vec<RelationAnnotation>>,
) -> Result<Corpus, CorpusError> {
    let out = corpus
        .iter()
        .map(|doc| match relations.remove(doc.id()) {
            Some(rels) => doc.with_relations(rels),
            None => Ok(doc.clone()),
        })
        .collect::<Result<Corpus, _>>()?;
    if let Some(unknown) = relations.keys().next() {
        return Err(CorpusError::invariant(
            unknown,
            "relations given for a document not in the corpus",
        ));
    }
    Ok(out)
}

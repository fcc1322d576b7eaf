//! IOB2 tag codec.
//!
//! Decoding splits the tag sequence into maximal `B-X (I-X)*` runs. An `I-X`
//! that does not continue a run of the same type (or that starts a new
//! section) opens a new run, exactly as if it were `B-X`.

use std::fmt;
use std::str::FromStr;

use super::{EntityKind, EntitySpan, Section, Token};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Iob2Error {
    #[error("unknown tag `{tag}` at position {position}")]
    UnknownTag { position: usize, tag: String },
    #[error("{tags} tags for {tokens} tokens")]
    LengthMismatch { tags: usize, tokens: usize },
    #[error("span {ordinal} ({start}..={end}) overlaps a preceding span")]
    Overlap { ordinal: usize, start: usize, end: usize },
    #[error("span {ordinal} ({start}..={end}) out of range for {n_tokens} tokens")]
    OutOfRange {
        ordinal: usize,
        start: usize,
        end: usize,
        n_tokens: usize,
    },
}

/// Entity type as it appears in the tag layer. Major Claims are tagged
/// `CLAIM`; their kind is derived from section placement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EntityTag {
    Premise,
    Claim,
}

impl EntityTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            EntityTag::Premise => "PREMISE",
            EntityTag::Claim => "CLAIM",
        }
    }
}

impl From<EntityKind> for EntityTag {
    fn from(kind: EntityKind) -> Self {
        match kind {
            EntityKind::Premise => EntityTag::Premise,
            EntityKind::Claim | EntityKind::MajorClaim => EntityTag::Claim,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Tag {
    Outside,
    Begin(EntityTag),
    Inside(EntityTag),
}

impl FromStr for Tag {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "O" => Tag::Outside,
            "B-PREMISE" => Tag::Begin(EntityTag::Premise),
            "I-PREMISE" => Tag::Inside(EntityTag::Premise),
            "B-CLAIM" => Tag::Begin(EntityTag::Claim),
            "I-CLAIM" => Tag::Inside(EntityTag::Claim),
            _ => return Err(()),
        })
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tag::Outside => f.write_str("O"),
            Tag::Begin(t) => write!(f, "B-{}", t.as_str()),
            Tag::Inside(t) => write!(f, "I-{}", t.as_str()),
        }
    }
}

/// A typed run of tokens, `start..=end`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Chunk {
    pub tag: EntityTag,
    pub start: usize,
    pub end: usize,
}

pub fn parse_tags<S: AsRef<str>>(tags: &[S]) -> Result<Vec<Tag>, Iob2Error> {
    tags.iter()
        .enumerate()
        .map(|(position, raw)| {
            raw.as_ref().parse().map_err(|_| Iob2Error::UnknownTag {
                position,
                tag: raw.as_ref().to_string(),
            })
        })
        .collect()
}

/// Splits `tags` into chunks. `breaks_before(i)` marks token `i` as the
/// first token of a new segment; no chunk crosses a segment break.
pub fn chunks(tags: &[Tag], breaks_before: impl Fn(usize) -> bool) -> Vec<Chunk> {
    let mut out = Vec::new();
    let mut open: Option<Chunk> = None;
    for (i, tag) in tags.iter().enumerate() {
        match *tag {
            Tag::Outside => out.extend(open.take()),
            Tag::Begin(t) => {
                out.extend(open.take());
                open = Some(Chunk {
                    tag: t,
                    start: i,
                    end: i,
                });
            }
            Tag::Inside(t) => match open.as_mut() {
                Some(c) if c.tag == t && !breaks_before(i) => c.end = i,
                _ => {
                    out.extend(open.take());
                    open = Some(Chunk {
                        tag: t,
                        start: i,
                        end: i,
                    });
                }
            },
        }
    }
    out.extend(open);
    out
}

/// True when token `i` belongs to a different section than token `i - 1`.
pub(crate) fn section_break(tokens: &[Token]) -> impl Fn(usize) -> bool + '_ {
    move |i| i > 0 && tokens[i].section != tokens[i - 1].section
}

/// Decodes a tag sequence into entity spans ordered by `token_start`.
///
/// `CLAIM` runs lying inside an answer option become [`EntityKind::MajorClaim`].
pub fn decode_iob2<S: AsRef<str>>(
    tags: &[S],
    tokens: &[Token],
    sections: &[Section],
) -> Result<Vec<EntitySpan>, Iob2Error> {
    if tags.len() != tokens.len() {
        return Err(Iob2Error::LengthMismatch {
            tags: tags.len(),
            tokens: tokens.len(),
        });
    }
    let parsed = parse_tags(tags)?;
    Ok(chunks(&parsed, section_break(tokens))
        .into_iter()
        .enumerate()
        .map(|(ordinal, chunk)| {
            let section = tokens[chunk.start].section;
            let in_option = sections.get(section).map(|s| s.kind.is_option()).unwrap_or(false);
            let kind = match chunk.tag {
                EntityTag::Premise => EntityKind::Premise,
                EntityTag::Claim if in_option => EntityKind::MajorClaim,
                EntityTag::Claim => EntityKind::Claim,
            };
            EntitySpan {
                ordinal,
                kind,
                token_start: chunk.start,
                token_end: chunk.end,
                section,
            }
        })
        .collect())
}

/// Encodes spans as IOB2 tags over `n_tokens` tokens.
pub fn encode_iob2(spans: &[EntitySpan], n_tokens: usize) -> Result<Vec<Tag>, Iob2Error> {
    let mut tags = vec![Tag::Outside; n_tokens];
    let mut sorted: Vec<&EntitySpan> = spans.iter().collect();
    sorted.sort_by_key(|s| (s.token_start, s.token_end));
    let mut next_free = 0usize;
    for span in sorted {
        if span.token_start > span.token_end || span.token_end >= n_tokens {
            return Err(Iob2Error::OutOfRange {
                ordinal: span.ordinal,
                start: span.token_start,
                end: span.token_end,
                n_tokens,
            });
        }
        if span.token_start < next_free {
            return Err(Iob2Error::Overlap {
                ordinal: span.ordinal,
                start: span.token_start,
                end: span.token_end,
            });
        }
        let tag = EntityTag::from(span.kind);
        tags[span.token_start] = Tag::Begin(tag);
        for t in &mut tags[span.token_start + 1..=span.token_end] {
            *t = Tag::Inside(tag);
        }
        next_free = span.token_end + 1;
    }
    Ok(tags)
}

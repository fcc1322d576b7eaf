//! Section filtering and boilerplate-entity removal.

use std::collections::{BTreeSet, HashMap};

use regex::{Regex, RegexBuilder};

use super::{Corpus, Document, EntitySpan, RelationAnnotation, SectionType, Tag};

/// Entity texts that carry no argumentative content, such as
/// "The correct answer is 1".
pub const DEFAULT_BOILERPLATE_PATTERNS: [&str; 2] =
    [r"^the correct answer is \d+\.?$", r"^answer \d+ is (in)?correct\.?$"];

#[derive(Debug, thiserror::Error)]
#[error("invalid boilerplate pattern `{pattern}`: {source}")]
pub struct PatternError {
    pub pattern: String,
    #[source]
    pub source: regex::Error,
}

/// Case-insensitive matcher over entity surface text.
#[derive(Debug, Clone)]
pub struct BoilerplateFilter {
    patterns: Vec<Regex>,
}

impl Default for BoilerplateFilter {
    fn default() -> Self {
        BoilerplateFilter::new(&DEFAULT_BOILERPLATE_PATTERNS).expect("default patterns compile")
    }
}

impl BoilerplateFilter {
    pub fn new<S: AsRef<str>>(patterns: &[S]) -> Result<Self, PatternError> {
        let patterns = patterns
            .iter()
            .map(|p| {
                RegexBuilder::new(p.as_ref())
                    .case_insensitive(true)
                    .build()
                    .map_err(|source| PatternError {
                        pattern: p.as_ref().to_string(),
                        source,
                    })
            })
            .collect::<Result<_, _>>()?;
        Ok(BoilerplateFilter { patterns })
    }

    /// A filter that keeps everything.
    pub fn none() -> Self {
        BoilerplateFilter { patterns: Vec::new() }
    }

    pub fn is_boilerplate(&self, text: &str) -> bool {
        let text = text.trim();
        self.patterns.iter().any(|p| p.is_match(text))
    }
}

/// Spans of `doc` whose surface text is not boilerplate. Ordinals are kept.
pub fn filter_boilerplate(doc: &Document, spans: &[EntitySpan], filter: &BoilerplateFilter) -> Vec<EntitySpan> {
    spans
        .iter()
        .filter(|s| !filter.is_boilerplate(doc.span_text(s)))
        .copied()
        .collect()
}

/// Keeps only tokens (and therefore tags, spans and relations) lying in the
/// given section types. Section texts are left untouched; token indices and
/// entity ordinals are re-based.
///
/// # Panics
///
/// If `keep` is empty.
pub fn section_filter(corpus: &[Document], keep: &BTreeSet<SectionType>) -> Corpus {
    assert!(!keep.is_empty(), "section_filter needs at least one section type");
    corpus.iter().map(|doc| filter_document(doc, keep)).collect()
}

fn filter_document(doc: &Document, keep: &BTreeSet<SectionType>) -> Document {
    let kept_section: Vec<bool> = doc
        .sections()
        .iter()
        .map(|s| keep.contains(&s.kind.section_type()))
        .collect();
    let mut tokens = Vec::new();
    let mut tags = Vec::new();
    for (tok, tag) in doc.tokens().iter().zip(doc.tags()) {
        if kept_section[tok.section] {
            tokens.push(tok.clone());
            tags.push(tag.to_string());
        }
    }
    // Spans never cross sections, so kept spans keep their relative order.
    let remap: HashMap<usize, usize> = doc
        .spans()
        .iter()
        .filter(|s| kept_section[s.section])
        .enumerate()
        .map(|(new, s)| (s.ordinal, new))
        .collect();
    let relations: Vec<RelationAnnotation> = doc
        .relations()
        .iter()
        .filter_map(|r| {
            Some(RelationAnnotation {
                src: *remap.get(&r.src)?,
                dst: *remap.get(&r.dst)?,
                rel: r.rel,
            })
        })
        .collect();
    debug_assert!(tags.iter().all(|t| t.parse::<Tag>().is_ok()));
    Document::new(doc.id(), doc.sections().to_vec(), tokens, &tags, relations)
        .expect("a section-filtered document satisfies the document invariants")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{parse_document, EntityKind};

    const DOC: &str = r#"{"id":"d1","sections":[{"kind":"case","text":"Fever and cough."},{"kind":"question","text":"What is it?"},{"kind":"option","option_id":1,"correct":true,"text":"Pneumonia"},{"kind":"option","option_id":2,"correct":false,"text":"Asthma"},{"kind":"explanation","text":"The correct answer is 1."}],"tokens":[{"t":"Fever","sec":0,"cs":0,"ce":5},{"t":"and","sec":0,"cs":6,"ce":9},{"t":"cough","sec":0,"cs":10,"ce":15},{"t":"What","sec":1,"cs":0,"ce":4},{"t":"Pneumonia","sec":2,"cs":0,"ce":9},{"t":"Asthma","sec":3,"cs":0,"ce":6},{"t":"The","sec":4,"cs":0,"ce":3},{"t":"correct","sec":4,"cs":4,"ce":11},{"t":"answer","sec":4,"cs":12,"ce":18},{"t":"is","sec":4,"cs":19,"ce":21},{"t":"1.","sec":4,"cs":22,"ce":24}],"tags":["B-PREMISE","I-PREMISE","I-PREMISE","O","B-CLAIM","B-CLAIM","B-CLAIM","I-CLAIM","I-CLAIM","I-CLAIM","I-CLAIM"],"relations":[{"src":0,"dst":1,"rel":"support"},{"src":0,"dst":2,"rel":"attack"},{"src":3,"dst":1,"rel":"support"}]}"#;

    #[test]
    fn default_patterns() {
        let f = BoilerplateFilter::default();
        assert!(f.is_boilerplate("The correct answer is 1"));
        assert!(f.is_boilerplate("the CORRECT answer is 4."));
        assert!(f.is_boilerplate("Answer 3 is incorrect."));
        assert!(!f.is_boilerplate("The patient presents dyspnea"));
        assert!(!f.is_boilerplate("We think the correct answer is 1 because of fever"));
    }

    #[test]
    fn removes_boilerplate_spans_keeping_ordinals() {
        let doc = parse_document(DOC, 1).unwrap();
        let kept = filter_boilerplate(&doc, doc.spans(), &BoilerplateFilter::default());
        assert_eq!(kept.iter().map(|s| s.ordinal).collect::<Vec<_>>(), [0, 1, 2]);
        let all = filter_boilerplate(&doc, doc.spans(), &BoilerplateFilter::none());
        assert_eq!(all, doc.spans());
        let empty: [&str; 0] = [];
        assert_eq!(
            filter_boilerplate(&doc, doc.spans(), &BoilerplateFilter::new(&empty).unwrap()),
            doc.spans()
        );
    }

    #[test]
    fn invalid_pattern() {
        assert!(BoilerplateFilter::new(&["(unclosed"]).is_err());
    }

    #[test]
    fn keep_everything_is_identity() {
        let doc = parse_document(DOC, 1).unwrap();
        let keep = SectionType::ALL.into_iter().collect();
        assert_eq!(section_filter(std::slice::from_ref(&doc), &keep), vec![doc]);
    }

    #[test]
    fn question_and_options_drop_case_premises() {
        let doc = parse_document(DOC, 1).unwrap();
        let keep = [SectionType::Question, SectionType::Option].into_iter().collect();
        let out = section_filter(&[doc], &keep);
        let d = &out[0];
        assert_eq!(d.tokens().len(), 3);
        assert_eq!(d.tags().len(), d.tokens().len());
        assert!(d.spans().iter().all(|s| s.kind != EntityKind::Premise));
        assert_eq!(d.spans().len(), 2);
        assert!(d.relations().is_empty());
        assert_eq!(d.sections().len(), 5);
    }

    #[test]
    fn explanation_only_rebases_relations() {
        let doc = parse_document(DOC, 1).unwrap();
        let keep = [SectionType::Explanation, SectionType::Option].into_iter().collect();
        let out = section_filter(&[doc], &keep);
        let d = &out[0];
        assert_eq!(d.spans().len(), 3);
        // old 3 -> new 2, old 1 -> new 0
        assert_eq!(d.relations().len(), 1);
        assert_eq!((d.relations()[0].src, d.relations()[0].dst), (2, 0));
        assert_eq!(d.span_text(&d.spans()[2]), "The correct answer is 1.");
    }
}

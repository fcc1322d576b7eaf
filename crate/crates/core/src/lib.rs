//! Argument mining over clinical exam texts.
//!
//! The crate covers the data side of a two-step pipeline: argumentative
//! entities are read as IOB2 spans and evaluated against gold spans; their
//! support/attack relations towards the exam answers ("Major Claims") are
//! turned into NLI premise/hypothesis examples and classified zero-shot by
//! scoring verbalized hypotheses with an entailment model.

pub mod corpus;
pub mod fraction;
mod rng;

pub use corpus::{
    Corpus, Document, EntityKind, EntitySpan, RelationAnnotation, RelationKind, SectionKind, SectionType,
};
pub use fraction::Fraction;
pub mod eval;
pub mod graph;
pub mod nli;
pub mod scorer;
pub mod zeroshot;

use std::fmt::Write as _;

use indexmap::IndexMap;
use serde::Serialize;

use super::{Document, EntityKind, RelationKind, SectionType};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct EntityCounts {
    pub premise: usize,
    pub claim: usize,
    pub major_claim: usize,
}

impl EntityCounts {
    fn add(&mut self, kind: EntityKind) {
        match kind {
            EntityKind::Premise => self.premise += 1,
            EntityKind::Claim => self.claim += 1,
            EntityKind::MajorClaim => self.major_claim += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.premise + self.claim + self.major_claim
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct RelationCounts {
    pub support: usize,
    pub attack: usize,
}

impl RelationCounts {
    fn add(&mut self, rel: RelationKind) {
        match rel {
            RelationKind::Support => self.support += 1,
            RelationKind::Attack => self.attack += 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StatsReport {
    pub documents: usize,
    pub tokens: usize,
    pub entities: EntityCounts,
    pub relations: RelationCounts,
    /// Relations whose target is a Major Claim.
    pub relations_to_major_claim: RelationCounts,
    pub per_section: IndexMap<SectionType, EntityCounts>,
}

pub fn corpus_stats(corpus: &[Document]) -> StatsReport {
    let mut report = StatsReport {
        documents: corpus.len(),
        tokens: 0,
        entities: EntityCounts::default(),
        relations: RelationCounts::default(),
        relations_to_major_claim: RelationCounts::default(),
        per_section: SectionType::ALL.iter().map(|s| (*s, EntityCounts::default())).collect(),
    };
    for doc in corpus {
        report.tokens += doc.tokens().len();
        for span in doc.spans() {
            report.entities.add(span.kind);
            report.per_section[&doc.section_kind(span).section_type()].add(span.kind);
        }
        for r in doc.relations() {
            report.relations.add(r.rel);
            if doc.spans()[r.dst].kind == EntityKind::MajorClaim {
                report.relations_to_major_claim.add(r.rel);
            }
        }
    }
    report
}

impl StatsReport {
    /// Aligned-column rendering for terminals.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{:<14}{:>10}", "documents", self.documents);
        let _ = writeln!(out, "{:<14}{:>10}", "tokens", self.tokens);
        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "{:<14}{:>10}{:>10}{:>12}{:>10}",
            "section", "premise", "claim", "major_claim", "total"
        );
        for (section, c) in &self.per_section {
            let _ = writeln!(
                out,
                "{:<14}{:>10}{:>10}{:>12}{:>10}",
                section.as_str(),
                c.premise,
                c.claim,
                c.major_claim,
                c.total()
            );
        }
        let e = &self.entities;
        let _ = writeln!(
            out,
            "{:<14}{:>10}{:>10}{:>12}{:>10}",
            "all",
            e.premise,
            e.claim,
            e.major_claim,
            e.total()
        );
        let _ = writeln!(out);
        let _ = writeln!(out, "{:<14}{:>10}{:>10}", "relations", "support", "attack");
        let _ = writeln!(
            out,
            "{:<14}{:>10}{:>10}",
            "all", self.relations.support, self.relations.attack
        );
        let _ = writeln!(
            out,
            "{:<14}{:>10}{:>10}",
            "to_major", self.relations_to_major_claim.support, self.relations_to_major_claim.attack
        );
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_corpus_is_all_zeros() {
        let r = corpus_stats(&[]);
        assert_eq!(r.documents, 0);
        assert_eq!(r.entities, EntityCounts::default());
        assert_eq!(r.relations, RelationCounts::default());
        assert!(r.per_section.values().all(|c| c.total() == 0));
        assert!(r.to_text().contains("documents"));
    }
}

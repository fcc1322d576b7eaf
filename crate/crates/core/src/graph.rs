//! Argument graphs and neutral-pair selection.
//!
//! Every hypothesis has the form "X support/attack Y" where Y is a Major
//! Claim, so candidate pairs are always (non-Major-Claim entity, Major
//! Claim). The four neutral strategies pick different subsets of the
//! unannotated candidates:
//!
//! | strategy | a candidate (x, y) is neutral when                         |
//! |----------|------------------------------------------------------------|
//! | V1       | always                                                     |
//! | V2       | x and y lie in different components of the undirected graph |
//! | V3       | x is the source of no relation                             |
//! | V4       | x or y has no relation at all                              |

use std::collections::{BTreeMap, HashSet};
use std::fmt::{self, Write as _};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::{filter_boilerplate, BoilerplateFilter, Document, EntityKind, RelationAnnotation};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("edge {src} -> {dst} references a node not in the graph")]
    DanglingEdge { src: usize, dst: usize },
    #[error("self loop on node {0}")]
    SelfLoop(usize),
    #[error("duplicate node {0}")]
    DuplicateNode(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GraphNode {
    pub ordinal: usize,
    pub kind: EntityKind,
}

/// Directed support/attack graph over the entities of one document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArgumentGraph {
    nodes: Vec<GraphNode>,
    edges: Vec<RelationAnnotation>,
    index: BTreeMap<usize, usize>,
}

impl ArgumentGraph {
    pub fn new(mut nodes: Vec<GraphNode>, edges: Vec<RelationAnnotation>) -> Result<Self, GraphError> {
        nodes.sort_by_key(|n| n.ordinal);
        let mut index = BTreeMap::new();
        for (i, n) in nodes.iter().enumerate() {
            if index.insert(n.ordinal, i).is_some() {
                return Err(GraphError::DuplicateNode(n.ordinal));
            }
        }
        for e in &edges {
            if !index.contains_key(&e.src) || !index.contains_key(&e.dst) {
                return Err(GraphError::DanglingEdge { src: e.src, dst: e.dst });
            }
            if e.src == e.dst {
                return Err(GraphError::SelfLoop(e.src));
            }
        }
        Ok(ArgumentGraph { nodes, edges, index })
    }

    /// Nodes sorted by ordinal.
    pub fn nodes(&self) -> &[GraphNode] {
        &self.nodes
    }

    pub fn edges(&self) -> &[RelationAnnotation] {
        &self.edges
    }

    pub fn node(&self, ordinal: usize) -> Option<&GraphNode> {
        self.index.get(&ordinal).map(|&i| &self.nodes[i])
    }

    fn major_claims(&self) -> impl Iterator<Item = &GraphNode> {
        self.nodes.iter().filter(|n| n.kind == EntityKind::MajorClaim)
    }

    fn sources(&self) -> impl Iterator<Item = &GraphNode> {
        self.nodes.iter().filter(|n| n.kind != EntityKind::MajorClaim)
    }

    /// Node ordinals touched by at least one edge.
    fn touched(&self) -> HashSet<usize> {
        self.edges.iter().flat_map(|e| [e.src, e.dst]).collect()
    }
}

/// Result of building a document graph: the graph plus relations dropped
/// because an endpoint was filtered out.
#[derive(Debug, Clone)]
pub struct GraphBuild {
    pub graph: ArgumentGraph,
    pub dropped_edges: Vec<RelationAnnotation>,
}

/// Builds the graph over the document's non-boilerplate entities.
pub fn build_graph(doc: &Document, filter: &BoilerplateFilter) -> GraphBuild {
    let kept = filter_boilerplate(doc, doc.spans(), filter);
    let nodes: Vec<GraphNode> = kept
        .iter()
        .map(|s| GraphNode {
            ordinal: s.ordinal,
            kind: s.kind,
        })
        .collect();
    let present: HashSet<usize> = nodes.iter().map(|n| n.ordinal).collect();
    let (edges, dropped_edges): (Vec<RelationAnnotation>, Vec<RelationAnnotation>) = doc
        .relations()
        .iter()
        .copied()
        .partition(|r| present.contains(&r.src) && present.contains(&r.dst));
    for r in &dropped_edges {
        log::warn!(
            "document `{}`: dropping relation {} {} {} with a filtered endpoint",
            doc.id(),
            r.src,
            r.rel,
            r.dst
        );
    }
    let graph = ArgumentGraph::new(nodes, edges).expect("document relations are validated at parse time");
    GraphBuild { graph, dropped_edges }
}

/// An (entity, Major Claim) pair, by entity ordinal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CandidatePair {
    pub x: usize,
    pub y: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NeutralStrategy {
    V1,
    V2,
    V3,
    V4,
}

impl NeutralStrategy {
    pub const ALL: [NeutralStrategy; 4] = [
        NeutralStrategy::V1,
        NeutralStrategy::V2,
        NeutralStrategy::V3,
        NeutralStrategy::V4,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            NeutralStrategy::V1 => "v1",
            NeutralStrategy::V2 => "v2",
            NeutralStrategy::V3 => "v3",
            NeutralStrategy::V4 => "v4",
        }
    }
}

impl fmt::Display for NeutralStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for NeutralStrategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "v1" => Ok(NeutralStrategy::V1),
            "v2" => Ok(NeutralStrategy::V2),
            "v3" => Ok(NeutralStrategy::V3),
            "v4" => Ok(NeutralStrategy::V4),
            other => Err(format!("unknown strategy `{other}` (expected v1..v4)")),
        }
    }
}

/// Every (non-Major-Claim, Major Claim) pair, annotated or not, ordered by
/// (x, y).
pub fn entity_major_claim_pairs(graph: &ArgumentGraph) -> Vec<CandidatePair> {
    let mcs: Vec<usize> = graph.major_claims().map(|n| n.ordinal).collect();
    graph
        .sources()
        .flat_map(|x| mcs.iter().map(move |&y| CandidatePair { x: x.ordinal, y }))
        .collect()
}

/// Entity-to-Major-Claim pairs with no annotated support or attack edge.
pub fn candidate_pairs(graph: &ArgumentGraph) -> Vec<CandidatePair> {
    let annotated: HashSet<(usize, usize)> = graph.edges.iter().map(|e| (e.src, e.dst)).collect();
    entity_major_claim_pairs(graph)
        .into_iter()
        .filter(|p| !annotated.contains(&(p.x, p.y)))
        .collect()
}

/// Undirected connected components. Each component is sorted by ordinal and
/// components are ordered by their smallest member.
pub fn connected_components(graph: &ArgumentGraph) -> Vec<Vec<usize>> {
    let labels = component_labels(graph);
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, node) in graph.nodes.iter().enumerate() {
        groups.entry(labels[i]).or_default().push(node.ordinal);
    }
    let mut comps: Vec<Vec<usize>> = groups.into_values().collect();
    comps.sort_by_key(|c| c[0]);
    comps
}

/// Component representative per node index (union-find).
fn component_labels(graph: &ArgumentGraph) -> Vec<usize> {
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    let mut parent: Vec<usize> = (0..graph.nodes.len()).collect();
    for e in &graph.edges {
        let a = find(&mut parent, graph.index[&e.src]);
        let b = find(&mut parent, graph.index[&e.dst]);
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }
    (0..parent.len()).map(|i| find(&mut parent, i)).collect()
}

pub fn neutral_pairs(graph: &ArgumentGraph, strategy: NeutralStrategy) -> Vec<CandidatePair> {
    let candidates = candidate_pairs(graph);
    match strategy {
        NeutralStrategy::V1 => candidates,
        NeutralStrategy::V2 => {
            let labels = component_labels(graph);
            let comp = |ordinal: usize| labels[graph.index[&ordinal]];
            candidates.into_iter().filter(|p| comp(p.x) != comp(p.y)).collect()
        }
        NeutralStrategy::V3 => {
            let sources: HashSet<usize> = graph.edges.iter().map(|e| e.src).collect();
            candidates.into_iter().filter(|p| !sources.contains(&p.x)).collect()
        }
        NeutralStrategy::V4 => {
            let touched = graph.touched();
            candidates
                .into_iter()
                .filter(|p| !touched.contains(&p.x) || !touched.contains(&p.y))
                .collect()
        }
    }
}

fn node_label(kind: EntityKind, ordinal: usize) -> String {
    let prefix = match kind {
        EntityKind::Premise => "P",
        EntityKind::Claim => "C",
        EntityKind::MajorClaim => "MC",
    };
    format!("{prefix}{ordinal}")
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"").replace('\n', "\\n")
}

/// Graphviz `digraph` with edges labelled support/attack.
pub fn to_dot(doc: &Document, graph: &ArgumentGraph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph \"{}\" {{", dot_escape(doc.id()));
    for n in graph.nodes() {
        let text = doc.span(n.ordinal).map(|s| doc.span_text(s)).unwrap_or("");
        let _ = writeln!(
            out,
            "  n{} [label=\"{}\", tooltip=\"{}\"];",
            n.ordinal,
            node_label(n.kind, n.ordinal),
            dot_escape(text)
        );
    }
    for e in graph.edges() {
        let _ = writeln!(out, "  n{} -> n{} [label=\"{}\"];", e.src, e.dst, e.rel);
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::RelationKind::{Attack, Support};

    // G5: P1=0 P2=1 P3=2 C1=3 C2=4 MC1=5 MC2=6
    fn g5() -> ArgumentGraph {
        let kinds = [
            EntityKind::Premise,
            EntityKind::Premise,
            EntityKind::Premise,
            EntityKind::Claim,
            EntityKind::Claim,
            EntityKind::MajorClaim,
            EntityKind::MajorClaim,
        ];
        let nodes = kinds
            .iter()
            .enumerate()
            .map(|(ordinal, &kind)| GraphNode { ordinal, kind })
            .collect();
        let e = |src, dst, rel| RelationAnnotation { src, dst, rel };
        ArgumentGraph::new(
            nodes,
            vec![e(0, 4, Support), e(1, 3, Support), e(2, 3, Attack), e(3, 6, Support)],
        )
        .unwrap()
    }

    fn pairs(v: &[(usize, usize)]) -> Vec<CandidatePair> {
        v.iter().map(|&(x, y)| CandidatePair { x, y }).collect()
    }

    #[test]
    fn g5_candidates() {
        let c = candidate_pairs(&g5());
        assert_eq!(c.len(), 9);
        assert!(!c.contains(&CandidatePair { x: 3, y: 6 }));
        assert_eq!(entity_major_claim_pairs(&g5()).len(), 10);
    }

    #[test]
    fn g5_components() {
        assert_eq!(connected_components(&g5()), vec![vec![0, 4], vec![1, 2, 3, 6], vec![5]]);
    }

    #[test]
    fn g5_strategies() {
        let g = g5();
        assert_eq!(neutral_pairs(&g, NeutralStrategy::V1).len(), 9);
        assert_eq!(
            neutral_pairs(&g, NeutralStrategy::V2),
            pairs(&[(0, 5), (0, 6), (1, 5), (2, 5), (3, 5), (4, 5), (4, 6)])
        );
        assert_eq!(neutral_pairs(&g, NeutralStrategy::V3), pairs(&[(4, 5), (4, 6)]));
        assert_eq!(
            neutral_pairs(&g, NeutralStrategy::V4),
            pairs(&[(0, 5), (1, 5), (2, 5), (3, 5), (4, 5)])
        );
    }

    #[test]
    fn no_major_claims_means_no_pairs() {
        let nodes = vec![
            GraphNode {
                ordinal: 0,
                kind: EntityKind::Premise,
            },
            GraphNode {
                ordinal: 1,
                kind: EntityKind::Claim,
            },
        ];
        let g = ArgumentGraph::new(nodes, vec![]).unwrap();
        assert!(candidate_pairs(&g).is_empty());
        for s in NeutralStrategy::ALL {
            assert!(neutral_pairs(&g, s).is_empty());
        }
    }

    #[test]
    fn fully_annotated_means_no_candidates() {
        let nodes = vec![
            GraphNode {
                ordinal: 0,
                kind: EntityKind::Premise,
            },
            GraphNode {
                ordinal: 1,
                kind: EntityKind::MajorClaim,
            },
        ];
        let g = ArgumentGraph::new(
            nodes,
            vec![RelationAnnotation {
                src: 0,
                dst: 1,
                rel: Attack,
            }],
        )
        .unwrap();
        assert!(candidate_pairs(&g).is_empty());
    }

    #[test]
    fn edgeless_and_chain_components() {
        let nodes: Vec<_> = (0..3)
            .map(|o| GraphNode {
                ordinal: o,
                kind: EntityKind::Claim,
            })
            .collect();
        let g = ArgumentGraph::new(nodes.clone(), vec![]).unwrap();
        assert_eq!(connected_components(&g), vec![vec![0], vec![1], vec![2]]);
        let chain = ArgumentGraph::new(
            nodes,
            vec![
                RelationAnnotation {
                    src: 2,
                    dst: 1,
                    rel: Support,
                },
                RelationAnnotation {
                    src: 0,
                    dst: 1,
                    rel: Attack,
                },
            ],
        )
        .unwrap();
        assert_eq!(connected_components(&chain), vec![vec![0, 1, 2]]);
    }

    #[test]
    fn rejects_bad_edges() {
        let nodes = vec![GraphNode {
            ordinal: 0,
            kind: EntityKind::Claim,
        }];
        assert_eq!(
            ArgumentGraph::new(
                nodes.clone(),
                vec![RelationAnnotation {
                    src: 0,
                    dst: 3,
                    rel: Support
                }]
            ),
            Err(GraphError::DanglingEdge { src: 0, dst: 3 })
        );
        assert_eq!(
            ArgumentGraph::new(
                nodes,
                vec![RelationAnnotation {
                    src: 0,
                    dst: 0,
                    rel: Support
                }]
            ),
            Err(GraphError::SelfLoop(0))
        );
    }

    #[test]
    fn strategy_names_round_trip() {
        for s in NeutralStrategy::ALL {
            assert_eq!(s.as_str().parse::<NeutralStrategy>().unwrap(), s);
        }
        assert!("v5".parse::<NeutralStrategy>().is_err());
    }
}

//! Content graphs (information flow between informons) and covering graphs.

use super::validate::{cyclic_part, Rule, Violation};
use super::{CausalTapestry, Informon, InformonId};
use std::collections::{BTreeMap, BTreeSet};

/// Directed graph with an edge `a → b` whenever `a` is in the content of `b`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ContentGraph {
    pub vertices: BTreeSet<InformonId>,
    pub edges: BTreeSet<(InformonId, InformonId)>,
}

impl ContentGraph {
    pub fn from_edges(vertices: impl IntoIterator<Item = InformonId>, edges: impl IntoIterator<Item = (InformonId, InformonId)>) -> Self {
        let mut g = ContentGraph { vertices: vertices.into_iter().collect(), edges: edges.into_iter().collect() };
        for &(a, b) in &g.edges {
            g.vertices.insert(a);
            g.vertices.insert(b);
        }
        g
    }

    pub fn out_edges(&self, v: InformonId) -> impl Iterator<Item = (InformonId, InformonId)> + '_ {
        self.edges.range((v, InformonId(0))..=(v, InformonId(u64::MAX))).copied()
    }

    pub fn in_edges(&self, v: InformonId) -> impl Iterator<Item = (InformonId, InformonId)> + '_ {
        self.edges.iter().copied().filter(move |e| e.1 == v)
    }

    /// True if `to` is reachable from `from` along edges.
    pub fn has_path(&self, from: InformonId, to: InformonId) -> bool {
        let mut stack = vec![from];
        let mut seen = BTreeSet::new();
        while let Some(v) = stack.pop() {
            if v == to {
                return true;
            }
            if seen.insert(v) {
                stack.extend(self.out_edges(v).map(|e| e.1));
            }
        }
        false
    }

    pub fn is_acyclic(&self) -> bool {
        let mut indegree: BTreeMap<InformonId, usize> = self.vertices.iter().map(|&v| (v, 0)).collect();
        for &(_, b) in &self.edges {
            *indegree.entry(b).or_default() += 1;
        }
        let mut ready: Vec<InformonId> = indegree.iter().filter(|(_, &d)| d == 0).map(|(&v, _)| v).collect();
        let mut removed = 0;
        while let Some(v) = ready.pop() {
            removed += 1;
            for (_, w) in self.out_edges(v) {
                let d = indegree.get_mut(&w).unwrap();
                *d -= 1;
                if *d == 0 {
                    ready.push(w);
                }
            }
        }
        removed == indegree.len()
    }
}

/// Content graph of a slice together with its priors: every informon and
/// every content member is a vertex.
pub fn content_graph(tapestry: &CausalTapestry) -> Result<ContentGraph, Violation> {
    let everyone: Vec<&Informon> = tapestry.priors.iter().chain(tapestry.informons.iter()).collect();
    let mut g = ContentGraph::default();
    for n in &everyone {
        g.vertices.insert(n.id);
        for &c in &n.content {
            g.vertices.insert(c);
            g.edges.insert((c, n.id));
        }
    }
    if g.is_acyclic() {
        return Ok(g);
    }
    let by_id: BTreeMap<InformonId, &Informon> = everyone.iter().map(|n| (n.id, *n)).collect();
    let cycle = cyclic_part(&g.vertices, |id| by_id.get(&id).copied()).unwrap_or_default();
    Err(Violation { rule: Rule::Axiom(2), ids: cycle, detail: "content graph contains a directed cycle".into() })
}

/// Vertex of a covering graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CoverNode {
    /// An incoming edge `a → v` paired with an outgoing edge `v → b`.
    Pair { incoming: (InformonId, InformonId), outgoing: (InformonId, InformonId) },
    /// A vertex of the original graph with no outgoing edge.
    Terminal(InformonId),
    /// The sink every terminal vertex points to.
    Sink,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CoveringGraph {
    /// Pair and terminal vertices; the sink appears only as an edge target.
    pub vertices: BTreeSet<CoverNode>,
    pub edges: BTreeSet<(CoverNode, CoverNode)>,
}

impl CoveringGraph {
    pub fn is_acyclic(&self) -> bool {
        let mut indegree: BTreeMap<CoverNode, usize> = self.vertices.iter().map(|&v| (v, 0)).collect();
        let mut succ: BTreeMap<CoverNode, Vec<CoverNode>> = BTreeMap::new();
        for &(a, b) in &self.edges {
            *indegree.entry(b).or_default() += 1;
            indegree.entry(a).or_default();
            succ.entry(a).or_default().push(b);
        }
        let mut ready: Vec<CoverNode> = indegree.iter().filter(|(_, &d)| d == 0).map(|(&v, _)| v).collect();
        let mut removed = 0;
        while let Some(v) = ready.pop() {
            removed += 1;
            for w in succ.get(&v).into_iter().flatten() {
                let d = indegree.get_mut(w).unwrap();
                *d -= 1;
                if *d == 0 {
                    ready.push(*w);
                }
            }
        }
        removed == indegree.len()
    }
}

/// For each vertex `v`, every (incoming, outgoing) edge pair at `v` becomes a
/// vertex; terminal vertices are kept. Pair `(a→v, v→b)` links to pair
/// `(c→v', v'→d)` exactly when `b = c`; each terminal links to the sink.
pub fn covering_graph(g: &ContentGraph) -> CoveringGraph {
    let mut cg = CoveringGraph::default();
    let mut pairs: Vec<((InformonId, InformonId), (InformonId, InformonId))> = Vec::new();
    for &v in &g.vertices {
        let outs: Vec<_> = g.out_edges(v).collect();
        if outs.is_empty() {
            cg.vertices.insert(CoverNode::Terminal(v));
            cg.edges.insert((CoverNode::Terminal(v), CoverNode::Sink));
            continue;
        }
        for inc in g.in_edges(v) {
            for &out in &outs {
                pairs.push((inc, out));
            }
        }
    }
    let mut by_in_source: BTreeMap<InformonId, Vec<usize>> = BTreeMap::new();
    for (i, (inc, _)) in pairs.iter().enumerate() {
        by_in_source.entry(inc.0).or_default().push(i);
    }
    for &(incoming, outgoing) in &pairs {
        cg.vertices.insert(CoverNode::Pair { incoming, outgoing });
    }
    for &(incoming, outgoing) in &pairs {
        let from = CoverNode::Pair { incoming, outgoing };
        for &j in by_in_source.get(&outgoing.1).into_iter().flatten() {
            let (inc2, out2) = pairs[j];
            cg.edges.insert((from, CoverNode::Pair { incoming: inc2, outgoing: out2 }));
        }
    }
    cg
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{LatticeConfig, LatticePoint};
    use crate::tapestry::Priors;
    use num_complex::Complex64;

    fn id(k: u64) -> InformonId {
        InformonId(k)
    }

    fn inf(k: u64, t: i64, content: &[u64]) -> Informon {
        Informon::new(id(k), LatticePoint::new(t, vec![k as i64]), Complex64::new(1.0, 0.0), None, content.iter().map(|&c| id(c)).collect())
    }

    #[test]
    fn single_informon_graph() {
        let t = CausalTapestry::new(LatticeConfig::default(), 0, vec![inf(1, 0, &[])], Priors::new());
        let g = content_graph(&t).unwrap();
        assert_eq!(g.vertices.len(), 1);
        assert!(g.edges.is_empty());
    }

    #[test]
    fn chain_edges_follow_content() {
        let priors = Priors::new().extended(vec![inf(1, 0, &[])]).extended(vec![inf(2, 1, &[1])]);
        let t = CausalTapestry::new(LatticeConfig::default(), 2, vec![inf(3, 2, &[2])], priors);
        let g = content_graph(&t).unwrap();
        assert_eq!(g.edges.iter().copied().collect::<Vec<_>>(), vec![(id(1), id(2)), (id(2), id(3))]);
    }

    #[test]
    fn union_inherits_content_order() {
        let priors = Priors::new().extended(vec![inf(1, 0, &[])]).extended(vec![inf(2, 1, &[1])]);
        let t = CausalTapestry::new(LatticeConfig::default(), 2, vec![inf(3, 2, &[1, 2])], priors);
        let g = content_graph(&t).unwrap();
        assert!(g.edges.contains(&(id(1), id(2))));
        assert!(g.edges.contains(&(id(2), id(3))));
        assert!(g.has_path(id(1), id(3)));
    }

    #[test]
    fn cycle_is_reported() {
        let priors = Priors::new().extended(vec![inf(1, 0, &[2]), inf(2, 0, &[1])]);
        let t = CausalTapestry::new(LatticeConfig::default(), 1, vec![inf(3, 1, &[1])], priors);
        let v = content_graph(&t).unwrap_err();
        assert_eq!(v.rule, Rule::Axiom(2));
        assert_eq!(v.ids, vec![id(1), id(2), id(3)]);
    }

    #[test]
    fn covering_graph_of_path() {
        let g = ContentGraph::from_edges([], [(id(1), id(2)), (id(2), id(3))]);
        let cg = covering_graph(&g);
        let pair = CoverNode::Pair { incoming: (id(1), id(2)), outgoing: (id(2), id(3)) };
        assert_eq!(cg.vertices, [pair, CoverNode::Terminal(id(3))].into_iter().collect());
        assert_eq!(cg.edges, [(CoverNode::Terminal(id(3)), CoverNode::Sink)].into_iter().collect());
    }

    #[test]
    fn covering_graph_small_cases() {
        assert_eq!(covering_graph(&ContentGraph::default()), CoveringGraph::default());
        let g = ContentGraph::from_edges([id(5)], []);
        let cg = covering_graph(&g);
        assert_eq!(cg.vertices, [CoverNode::Terminal(id(5))].into_iter().collect());
        assert_eq!(cg.edges, [(CoverNode::Terminal(id(5)), CoverNode::Sink)].into_iter().collect());
    }

    #[test]
    fn pairs_link_when_target_matches_source() {
        // 1→2→3→4→5: pair at 2 = (1→2, 2→3); pair at 4 = (3→4, 4→5); 3 is the link.
        let g = ContentGraph::from_edges([], (1..5).map(|k| (id(k), id(k + 1))));
        let cg = covering_graph(&g);
        let at2 = CoverNode::Pair { incoming: (id(1), id(2)), outgoing: (id(2), id(3)) };
        let at4 = CoverNode::Pair { incoming: (id(3), id(4)), outgoing: (id(4), id(5)) };
        assert!(cg.edges.contains(&(at2, at4)));
        assert!(cg.is_acyclic());
    }
}

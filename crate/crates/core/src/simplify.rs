//! Turning a mixed multigraph into a simple mixed graph.
//!
//! Whenever a vertex pair carries more than one link, each of those links is
//! split by a fresh midpoint vertex; the half at the link's first endpoint
//! keeps the weight and the other half weighs 0. Solutions on the
//! simple graph translate back link by link.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::graph::{DirectedMultigraph, MixedGraph, Vertex};

/// One link of a multigraph, possibly parallel to others.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MultiLink {
    pub u: Vertex,
    pub v: Vertex,
    pub w: u64,
    pub arc: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MixedMultigraph {
    pub n: usize,
    pub links: Vec<MultiLink>,
}

impl MixedMultigraph {
    pub fn new(n: usize) -> Self {
        MixedMultigraph { n, links: Vec::new() }
    }

    pub fn edge(mut self, u: Vertex, v: Vertex, w: u64) -> Self {
        self.links.push(MultiLink { u, v, w, arc: false });
        self
    }

    pub fn arc(mut self, u: Vertex, v: Vertex, w: u64) -> Self {
        self.links.push(MultiLink { u, v, w, arc: true });
        self
    }
}

/// Where an original link ended up in the simple graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LinkOrigin {
    /// Kept as is.
    Direct,
    /// Split through this midpoint; the first half starts at the link's `u`.
    Split { midpoint: Vertex },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Simplified {
    pub graph: MixedGraph,
    /// Indexed like the input links.
    pub origin: Vec<LinkOrigin>,
    /// Vertex count of the input; midpoints are numbered from here on.
    pub original_n: usize,
}

/// Per input link: traversals from `u` to `v` and from `v` to `u`.
pub type LinkCounts = Vec<(u64, u64)>;

pub fn simplify_instance(mg: &MixedMultigraph) -> Result<Simplified> {
    let mut group: BTreeMap<(Vertex, Vertex), usize> = BTreeMap::new();
    for l in &mg.links {
        for x in [l.u, l.v] {
            if x >= mg.n {
                return Err(Error::VertexOutOfRange { vertex: x, n: mg.n });
            }
        }
        if l.u == l.v {
            return Err(Error::SelfLoop(l.u));
        }
        *group.entry((l.u.min(l.v), l.u.max(l.v))).or_insert(0) += 1;
    }
    let mut next = mg.n;
    let mut origin = Vec::with_capacity(mg.links.len());
    let mut edges = Vec::new();
    let mut arcs = Vec::new();
    for l in &mg.links {
        let list = if l.arc { &mut arcs } else { &mut edges };
        if group[&(l.u.min(l.v), l.u.max(l.v))] == 1 {
            list.push((l.u, l.v, l.w));
            origin.push(LinkOrigin::Direct);
        } else {
            let m = next;
            next += 1;
            list.push((l.u, m, l.w));
            list.push((m, l.v, 0));
            origin.push(LinkOrigin::Split { midpoint: m });
        }
    }
    let graph = MixedGraph::new(next, edges, arcs)?;
    Ok(Simplified { graph, origin, original_n: mg.n })
}

impl Simplified {
    /// Reads per-link traversal counts off a solution on the simple graph.
    /// A split link counts the passes over its weighted half.
    pub fn link_counts(&self, mg: &MixedMultigraph, d: &DirectedMultigraph) -> LinkCounts {
        mg.links
            .iter()
            .zip(&self.origin)
            .map(|(l, o)| {
                let far = match *o {
                    LinkOrigin::Direct => l.v,
                    LinkOrigin::Split { midpoint } => midpoint,
                };
                (d.multiplicity(l.u, far), d.multiplicity(far, l.u))
            })
            .collect()
    }

    /// The solution on the original vertices, parallel links merged per pair.
    pub fn translate_back(&self, mg: &MixedMultigraph, d: &DirectedMultigraph) -> (DirectedMultigraph, u64) {
        let mut out = DirectedMultigraph::new(self.original_n);
        let mut weight = 0;
        for (l, (fwd, bwd)) in mg.links.iter().zip(self.link_counts(mg, d)) {
            out.add(l.u, l.v, fwd);
            out.add(l.v, l.u, bwd);
            weight += l.w * (fwd + bwd);
        }
        (out, weight)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::solve_mcpp_edges;
    use crate::graph::{imbalance, is_eulerian};
    use proptest::prelude::*;

    /// Direct search on the multigraph: edges by net value, arcs by count.
    fn multigraph_optimum(mg: &MixedMultigraph, bound: i64) -> Option<u64> {
        fn go(mg: &MixedMultigraph, i: usize, bound: i64, counts: &mut Vec<(u64, u64)>, best: &mut Option<u64>) {
            if i == mg.links.len() {
                let mut d = DirectedMultigraph::new(mg.n);
                let mut w = 0;
                for (l, &(f, b)) in mg.links.iter().zip(counts.iter()) {
                    d.add(l.u, l.v, f);
                    d.add(l.v, l.u, b);
                    w += l.w * (f + b);
                }
                if is_eulerian(&d) && best.is_none_or(|x| w < x) {
                    *best = Some(w);
                }
                return;
            }
            let l = mg.links[i];
            let options: Vec<(u64, u64)> = if l.arc {
                (1..=bound as u64).map(|c| (c, 0)).collect()
            } else {
                (-bound..=bound)
                    .map(|d| if d == 0 { (1, 1) } else if d > 0 { (d as u64, 0) } else { (0, (-d) as u64) })
                    .collect()
            };
            for o in options {
                counts.push(o);
                go(mg, i + 1, bound, counts, best);
                counts.pop();
            }
        }
        let mut best = None;
        go(mg, 0, bound, &mut Vec::new(), &mut best);
        best
    }

    #[test]
    fn parallel_edges_are_split() {
        let mg = MixedMultigraph::new(2).edge(0, 1, 3).edge(0, 1, 3);
        let s = simplify_instance(&mg).unwrap();
        assert_eq!(s.graph.n(), 4);
        let halves: Vec<_> = s.graph.edges().iter().map(|e| (e.u, e.v, e.w)).collect();
        assert_eq!(halves, vec![(0, 2, 3), (1, 2, 0), (0, 3, 3), (1, 3, 0)]);
        assert!(s.graph.arcs().is_empty());
    }

    #[test]
    fn simple_graph_is_unchanged() {
        let mg = MixedMultigraph::new(3).edge(0, 1, 1).edge(1, 2, 1).arc(2, 0, 1);
        let s = simplify_instance(&mg).unwrap();
        assert_eq!(s.graph, MixedGraph::new(3, [(0, 1, 1), (1, 2, 1)], [(2, 0, 1)]).unwrap());
        assert!(s.origin.iter().all(|&o| o == LinkOrigin::Direct));
    }

    #[test]
    fn edge_beside_arc() {
        let mg = MixedMultigraph::new(3).edge(0, 1, 1).arc(0, 1, 1).edge(1, 2, 1);
        let s = simplify_instance(&mg).unwrap();
        assert!(matches!(s.origin[1], LinkOrigin::Split { .. }));
        let sol = solve_mcpp_edges(&s.graph).unwrap();
        let (d, w) = s.translate_back(&mg, &sol.multigraph);
        assert_eq!(w, sol.weight);
        assert_eq!(Some(w), multigraph_optimum(&mg, 5));
        assert!(is_eulerian(&d));
    }

    #[test]
    fn two_opposite_arcs() {
        let mg = MixedMultigraph::new(2).arc(0, 1, 1).arc(1, 0, 1);
        let s = simplify_instance(&mg).unwrap();
        let sol = crate::classical::solve_dcpp(&s.graph).unwrap();
        assert_eq!(sol.weight, 2);
    }

    #[test]
    fn rejects_loops() {
        let mg = MixedMultigraph::new(2).edge(1, 1, 1);
        assert_eq!(simplify_instance(&mg).unwrap_err(), Error::SelfLoop(1));
    }

    fn multigraph_strategy() -> impl Strategy<Value = MixedMultigraph> {
        (2usize..=4).prop_flat_map(|n| {
            prop::collection::vec((0..n, 0..n, 0u64..4, prop::bool::weighted(0.4)), 1..=5).prop_map(move |links| {
                let mut mg = MixedMultigraph::new(n);
                let mut per_pair: BTreeMap<(usize, usize), usize> = BTreeMap::new();
                for (u, v, w, arc) in links {
                    let c = per_pair.entry((u.min(v), u.max(v))).or_insert(0);
                    if u != v && *c < 2 {
                        *c += 1;
                        mg.links.push(MultiLink { u, v, w, arc });
                    }
                }
                mg
            })
        })
    }

    fn strongly_connected(mg: &MixedMultigraph) -> bool {
        simplify_instance(mg).is_ok_and(|s| crate::graph::is_strongly_connected(&s.graph))
            && (0..mg.n).all(|v| mg.links.iter().any(|l| l.u == v || l.v == v))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(150))]

        #[test]
        fn simplification_preserves_optimum(mg in multigraph_strategy()) {
            prop_assume!(strongly_connected(&mg));
            let s = simplify_instance(&mg).unwrap();
            prop_assert!(s.graph.edges().len() + s.graph.arcs().len() <= 2 * mg.links.len());
            let sol = solve_mcpp_edges(&s.graph).unwrap();
            let (d, w) = s.translate_back(&mg, &sol.multigraph);
            prop_assert_eq!(w, sol.weight);
            prop_assert!(is_eulerian(&d));
            prop_assert!((0..mg.n).all(|v| imbalance(&d, v) == 0));
            prop_assert_eq!(Some(w), multigraph_optimum(&mg, 5));
        }
    }
}

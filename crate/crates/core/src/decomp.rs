//! Tree decompositions: torso graphs, treewidth, nice decompositions and the
//! decomposition around a small-cut core used by the balanced DP.

use std::collections::{BTreeMap, BTreeSet};

use crate::graph::{Demand, MixedGraph, Vertex};
use crate::troad::small_tcut_edges;

/// Largest graph whose treewidth is computed exactly.
pub const EXACT_TREEWIDTH_LIMIT: usize = 12;

/// Undirected simple graph on an arbitrary vertex subset.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SimpleGraph {
    adj: BTreeMap<Vertex, BTreeSet<Vertex>>,
}

impl SimpleGraph {
    pub fn new<I: IntoIterator<Item = Vertex>>(vertices: I) -> Self {
        SimpleGraph { adj: vertices.into_iter().map(|v| (v, BTreeSet::new())).collect() }
    }

    /// The edges of `g` (arcs ignored) on all of its vertices.
    pub fn from_edges_of(g: &MixedGraph) -> Self {
        let mut s = Self::new(0..g.n());
        for e in g.edges() {
            s.add_edge(e.u, e.v);
        }
        s
    }

    pub fn add_edge(&mut self, u: Vertex, v: Vertex) {
        if u != v {
            self.adj.entry(u).or_default().insert(v);
            self.adj.entry(v).or_default().insert(u);
        }
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.adj.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.adj.contains_key(&v)
    }

    pub fn neighbours(&self, v: Vertex) -> &BTreeSet<Vertex> {
        &self.adj[&v]
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.adj.get(&u).is_some_and(|n| n.contains(&v))
    }

    /// Each edge once, as `(u, v)` with `u < v`.
    pub fn edges(&self) -> Vec<(Vertex, Vertex)> {
        self.adj
            .iter()
            .flat_map(|(&u, n)| n.iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
            .collect()
    }

    /// Connected pieces of the graph induced by `keep`, each sorted, ordered by
    /// their smallest vertex.
    pub fn components_within(&self, keep: &BTreeSet<Vertex>) -> Vec<BTreeSet<Vertex>> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for &s in keep {
            if !seen.insert(s) {
                continue;
            }
            let mut comp = BTreeSet::from([s]);
            let mut stack = vec![s];
            while let Some(x) = stack.pop() {
                for &y in &self.adj[&x] {
                    if keep.contains(&y) && seen.insert(y) {
                        comp.insert(y);
                        stack.push(y);
                    }
                }
            }
            out.push(comp);
        }
        out
    }
}

/// Graph on `s` joining two vertices when `g` has an edge between them or a
/// path whose inner vertices all avoid `s`.
pub fn torso(g: &SimpleGraph, s: &BTreeSet<Vertex>) -> SimpleGraph {
    let mut t = SimpleGraph::new(s.iter().copied());
    for &a in s {
        let mut seen = BTreeSet::from([a]);
        let mut stack = vec![a];
        while let Some(x) = stack.pop() {
            for &y in g.neighbours(x) {
                if !seen.insert(y) {
                    continue;
                }
                if s.contains(&y) {
                    t.add_edge(a, y);
                } else {
                    stack.push(y);
                }
            }
        }
    }
    t
}

/// Neighbours of `v` outside `eliminated` after eliminating that set, i.e.
/// vertices reachable from `v` through `eliminated` only.
fn elimination_neighbours(g: &SimpleGraph, eliminated: &BTreeSet<Vertex>, v: Vertex) -> BTreeSet<Vertex> {
    let mut out = BTreeSet::new();
    let mut seen = BTreeSet::from([v]);
    let mut stack = vec![v];
    while let Some(x) = stack.pop() {
        for &y in g.neighbours(x) {
            if !seen.insert(y) {
                continue;
            }
            if eliminated.contains(&y) {
                stack.push(y);
            } else {
                out.insert(y);
            }
        }
    }
    out
}

/// Exact treewidth and an optimal elimination order (subset DP), for graphs
/// with at most [`EXACT_TREEWIDTH_LIMIT`] vertices.
pub fn exact_treewidth(g: &SimpleGraph) -> (usize, Vec<Vertex>) {
    let verts: Vec<Vertex> = g.vertices().collect();
    let n = verts.len();
    assert!(n <= EXACT_TREEWIDTH_LIMIT, "exact treewidth limited to {EXACT_TREEWIDTH_LIMIT} vertices");
    if n == 0 {
        return (0, Vec::new());
    }
    let to_set = |mask: usize| -> BTreeSet<Vertex> { (0..n).filter(|i| mask >> i & 1 == 1).map(|i| verts[i]).collect() };
    let mut best = vec![usize::MAX; 1 << n];
    let mut last = vec![usize::MAX; 1 << n];
    best[0] = 0;
    for mask in 1usize..(1 << n) {
        for (i, &vi) in verts.iter().enumerate() {
            if mask >> i & 1 == 0 {
                continue;
            }
            let rest = mask & !(1 << i);
            let q = elimination_neighbours(g, &to_set(rest), vi).len();
            let cand = best[rest].max(q);
            if cand < best[mask] {
                best[mask] = cand;
                last[mask] = i;
            }
        }
    }
    let mut order = Vec::with_capacity(n);
    let mut mask = (1 << n) - 1;
    while mask != 0 {
        let i = last[mask];
        order.push(verts[i]);
        mask &= !(1 << i);
    }
    order.reverse();
    (best[(1 << n) - 1], order)
}

/// Greedy minimum-fill elimination order; ties go to the smallest vertex.
pub fn min_fill_order(g: &SimpleGraph) -> Vec<Vertex> {
    let mut work = g.clone();
    let mut order = Vec::with_capacity(g.len());
    while !work.is_empty() {
        let v = work
            .vertices()
            .min_by_key(|&v| {
                let nb: Vec<Vertex> = work.neighbours(v).iter().copied().collect();
                let mut fill = 0usize;
                for (i, &a) in nb.iter().enumerate() {
                    fill += nb[i + 1..].iter().filter(|&&b| !work.has_edge(a, b)).count();
                }
                (fill, v)
            })
            .unwrap();
        eliminate(&mut work, v);
        order.push(v);
    }
    order
}

fn eliminate(work: &mut SimpleGraph, v: Vertex) -> BTreeSet<Vertex> {
    let nb = work.adj.remove(&v).unwrap_or_default();
    for &a in &nb {
        work.adj.get_mut(&a).unwrap().remove(&v);
    }
    for &a in &nb {
        for &b in &nb {
            if a < b {
                work.add_edge(a, b);
            }
        }
    }
    nb
}

/// A tree decomposition before it is made nice: bags plus tree parent links.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BagTree {
    pub bags: Vec<BTreeSet<Vertex>>,
    pub parent: Vec<Option<usize>>,
}

impl BagTree {
    pub fn width(&self) -> usize {
        self.bags.iter().map(|b| b.len()).max().unwrap_or(1).saturating_sub(1)
    }

    pub fn root(&self) -> Option<usize> {
        self.parent.iter().position(|p| p.is_none())
    }

    pub fn tree_edges(&self) -> Vec<(usize, usize)> {
        self.parent.iter().enumerate().filter_map(|(i, p)| p.map(|q| (q, i))).collect()
    }
}

/// Bags from an elimination order: each vertex with its neighbours at the time
/// it is eliminated. Separate pieces are chained into a single tree.
pub fn decomposition_from_order(g: &SimpleGraph, order: &[Vertex]) -> BagTree {
    let pos: BTreeMap<Vertex, usize> = order.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut work = g.clone();
    let mut bags = Vec::with_capacity(order.len());
    let mut parent = Vec::with_capacity(order.len());
    for &v in order {
        let nb = eliminate(&mut work, v);
        parent.push(nb.iter().map(|u| pos[u]).min());
        let mut bag = nb;
        bag.insert(v);
        bags.push(bag);
    }
    let roots: Vec<usize> = (0..parent.len()).filter(|&i| parent[i].is_none()).collect();
    for w in roots.windows(2) {
        parent[w[0]] = Some(w[1]);
    }
    BagTree { bags, parent }.compact()
}

impl BagTree {
    /// Merges every tree edge whose one bag contains the other.
    pub fn compact(mut self) -> BagTree {
        let mut alive = vec![true; self.bags.len()];
        loop {
            let found = (0..self.bags.len()).find_map(|c| {
                let p = self.parent[c]?;
                (alive[c] && (self.bags[c].is_subset(&self.bags[p]) || self.bags[p].is_subset(&self.bags[c])))
                    .then_some((c, p))
            });
            let Some((c, p)) = found else { break };
            let bag = std::mem::take(&mut self.bags[c]);
            self.bags[p].extend(bag);
            alive[c] = false;
            for q in self.parent.iter_mut() {
                if *q == Some(c) {
                    *q = Some(p);
                }
            }
            self.parent[c] = None;
        }
        let new_id: Vec<usize> = alive
            .iter()
            .scan(0, |next, &a| {
                let id = *next;
                *next += a as usize;
                Some(id)
            })
            .collect();
        let bags = (0..alive.len()).filter(|&i| alive[i]).map(|i| self.bags[i].clone()).collect();
        let parent = (0..alive.len()).filter(|&i| alive[i]).map(|i| self.parent[i].map(|p| new_id[p])).collect();
        BagTree { bags, parent }
    }
}

/// Exact for small graphs, min-fill otherwise.
pub fn compute_tree_decomposition(g: &SimpleGraph) -> BagTree {
    let order = if g.len() <= EXACT_TREEWIDTH_LIMIT {
        exact_treewidth(g).1
    } else {
        min_fill_order(g)
    };
    decomposition_from_order(g, &order)
}

/// Checks the three decomposition conditions for bags joined by `tree_edges`.
pub fn validate_bags(
    g: &SimpleGraph,
    bags: &[BTreeSet<Vertex>],
    tree_edges: &[(usize, usize)],
) -> Result<(), String> {
    let covered: BTreeSet<Vertex> = bags.iter().flatten().copied().collect();
    if let Some(v) = g.vertices().find(|v| !covered.contains(v)) {
        return Err(format!("vertex {v} is in no bag"));
    }
    if let Some(v) = covered.iter().find(|&&v| !g.contains(v)) {
        return Err(format!("bag holds unknown vertex {v}"));
    }
    for (u, v) in g.edges() {
        if !bags.iter().any(|b| b.contains(&u) && b.contains(&v)) {
            return Err(format!("edge {u}-{v} is in no bag"));
        }
    }
    if !bags.is_empty() && tree_edges.len() != bags.len() - 1 {
        return Err(format!("{} bags but {} tree edges", bags.len(), tree_edges.len()));
    }
    let mut adj = vec![Vec::new(); bags.len()];
    for &(x, y) in tree_edges {
        adj[x].push(y);
        adj[y].push(x);
    }
    for &v in &covered {
        let holding: Vec<usize> = (0..bags.len()).filter(|&i| bags[i].contains(&v)).collect();
        let mut seen = BTreeSet::from([holding[0]]);
        let mut stack = vec![holding[0]];
        while let Some(x) = stack.pop() {
            for &y in &adj[x] {
                if bags[y].contains(&v) && seen.insert(y) {
                    stack.push(y);
                }
            }
        }
        if seen.len() != holding.len() {
            return Err(format!("bags holding vertex {v} are not connected"));
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Leaf,
    Introduce(Vertex),
    Forget(Vertex),
    Join,
}

impl NodeKind {
    pub fn name(&self) -> &'static str {
        match self {
            NodeKind::Leaf => "leaf",
            NodeKind::Introduce(_) => "introduce",
            NodeKind::Forget(_) => "forget",
            NodeKind::Join => "join",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TdNode {
    pub bag: BTreeSet<Vertex>,
    pub kind: NodeKind,
    pub children: Vec<usize>,
    pub parent: Option<usize>,
}

/// Rooted decomposition whose nodes carry a kind.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeDecomposition {
    pub nodes: Vec<TdNode>,
    pub root: usize,
}

impl TreeDecomposition {
    pub fn width(&self) -> usize {
        self.nodes.iter().map(|n| n.bag.len()).max().unwrap_or(1).saturating_sub(1)
    }

    /// Children before parents.
    pub fn post_order(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.nodes.len());
        let mut stack = vec![(self.root, false)];
        while let Some((x, done)) = stack.pop() {
            if done {
                out.push(x);
            } else {
                stack.push((x, true));
                for &c in self.nodes[x].children.iter().rev() {
                    stack.push((c, false));
                }
            }
        }
        out
    }

    /// `bag ∩ core` for every node.
    pub fn core_bags(&self, core: &BTreeSet<Vertex>) -> Vec<BTreeSet<Vertex>> {
        self.nodes.iter().map(|n| n.bag.intersection(core).copied().collect()).collect()
    }

    /// Union of bags over each node's subtree.
    pub fn subtree_vertices(&self) -> Vec<BTreeSet<Vertex>> {
        let mut out = vec![BTreeSet::new(); self.nodes.len()];
        for x in self.post_order() {
            let mut acc = self.nodes[x].bag.clone();
            for &c in &self.nodes[x].children {
                acc.extend(out[c].iter().copied());
            }
            out[x] = acc;
        }
        out
    }

    fn push(&mut self, bag: BTreeSet<Vertex>, kind: NodeKind, children: Vec<usize>) -> usize {
        let id = self.nodes.len();
        for &c in &children {
            self.nodes[c].parent = Some(id);
        }
        self.nodes.push(TdNode { bag, kind, children, parent: None });
        id
    }
}

/// Turns a bag tree into a nice decomposition with the same width. Leaves
/// keep their full bags; a child's bag is turned into its parent's by
/// forgetting, then introducing, one vertex at a time; several children are
/// merged by binary joins.
pub fn make_nice(raw: &BagTree) -> TreeDecomposition {
    let mut td = TreeDecomposition { nodes: Vec::new(), root: 0 };
    let Some(root) = raw.root() else {
        td.root = td.push(BTreeSet::new(), NodeKind::Leaf, Vec::new());
        return td;
    };
    let mut children = vec![Vec::new(); raw.bags.len()];
    for (i, p) in raw.parent.iter().enumerate() {
        if let Some(p) = p {
            children[*p].push(i);
        }
    }
    // Iterative post-order over the raw tree.
    let mut top = vec![usize::MAX; raw.bags.len()];
    let mut stack = vec![(root, false)];
    while let Some((x, done)) = stack.pop() {
        if !done {
            stack.push((x, true));
            for &c in children[x].iter().rev() {
                stack.push((c, false));
            }
            continue;
        }
        let bag = &raw.bags[x];
        let mut tops: Vec<usize> =
            children[x].iter().map(|&c| transition(&mut td, top[c], bag)).collect();
        top[x] = match tops.len() {
            0 => td.push(bag.clone(), NodeKind::Leaf, Vec::new()),
            _ => {
                let mut acc = tops.remove(0);
                for other in tops {
                    acc = td.push(bag.clone(), NodeKind::Join, vec![acc, other]);
                }
                acc
            }
        };
    }
    td.root = top[root];
    td
}

/// Chain from `from` (a node id) up to a node whose bag equals `target`.
fn transition(td: &mut TreeDecomposition, from: usize, target: &BTreeSet<Vertex>) -> usize {
    let mut cur = from;
    let mut bag = td.nodes[from].bag.clone();
    let leaving: Vec<Vertex> = bag.difference(target).copied().collect();
    for v in leaving {
        bag.remove(&v);
        cur = td.push(bag.clone(), NodeKind::Forget(v), vec![cur]);
    }
    let entering: Vec<Vertex> = target.difference(&bag).copied().collect();
    for v in entering {
        bag.insert(v);
        cur = td.push(bag.clone(), NodeKind::Introduce(v), vec![cur]);
    }
    cur
}

/// Decomposition conditions plus node-kind rules applied to `bag ∩ core`.
pub fn validate_decomposition(g: &SimpleGraph, td: &TreeDecomposition, core: &BTreeSet<Vertex>) -> Result<(), String> {
    let bags: Vec<BTreeSet<Vertex>> = td.nodes.iter().map(|n| n.bag.clone()).collect();
    let edges: Vec<(usize, usize)> =
        td.nodes.iter().enumerate().filter_map(|(i, n)| n.parent.map(|p| (p, i))).collect();
    validate_bags(g, &bags, &edges)?;
    if td.nodes[td.root].parent.is_some() {
        return Err("root has a parent".into());
    }
    if td.post_order().len() != td.nodes.len() {
        return Err("not every node is reachable from the root".into());
    }
    let alpha = td.core_bags(core);
    for (i, node) in td.nodes.iter().enumerate() {
        for &c in &node.children {
            if td.nodes[c].parent != Some(i) {
                return Err(format!("node {c} does not point back to parent {i}"));
            }
        }
        let kids: Vec<&BTreeSet<Vertex>> = node.children.iter().map(|&c| &alpha[c]).collect();
        let ok = match node.kind {
            NodeKind::Leaf => kids.is_empty(),
            NodeKind::Introduce(v) => {
                kids.len() == 1 && !kids[0].contains(&v) && alpha[i].contains(&v) && {
                    let mut with = kids[0].clone();
                    with.insert(v);
                    with == alpha[i]
                }
            }
            NodeKind::Forget(v) => {
                kids.len() == 1 && kids[0].contains(&v) && !alpha[i].contains(&v) && {
                    let mut without = kids[0].clone();
                    without.remove(&v);
                    without == alpha[i]
                }
            }
            NodeKind::Join => kids.len() == 2 && *kids[0] == alpha[i] && *kids[1] == alpha[i],
        };
        if !ok {
            return Err(format!("node {i} breaks the {} rule", node.kind.name()));
        }
    }
    Ok(())
}

/// A decomposition around a core vertex set, ready for the balanced DP.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutDecomposition {
    /// Core vertices: every non-leaf bag lies inside it.
    pub core: BTreeSet<Vertex>,
    /// Edge indices of the small-cut union.
    pub cut_edges: BTreeSet<usize>,
    pub td: TreeDecomposition,
    /// Largest `|bag ∩ core|`.
    pub max_core_bag: usize,
}

/// Small-cut decomposition for demand `t`, or `None` when the cut union is
/// empty and the road-based shortcut applies.
pub fn build_cut_decomposition(g: &MixedGraph, t: &Demand) -> Option<CutDecomposition> {
    let cut_edges = small_tcut_edges(g, t);
    if cut_edges.is_empty() {
        return None;
    }
    let core: BTreeSet<Vertex> = cut_edges.iter().flat_map(|&i| [g.edges()[i].u, g.edges()[i].v]).collect();
    Some(decompose_around(g, core, cut_edges))
}

/// Nice decomposition of the torso on `core`, with every component of the
/// rest hung below a bag that holds its neighbourhood.
pub fn decompose_around(g: &MixedGraph, core: BTreeSet<Vertex>, cut_edges: BTreeSet<usize>) -> CutDecomposition {
    let sg = SimpleGraph::from_edges_of(g);
    let mut td = make_nice(&compute_tree_decomposition(&torso(&sg, &core)));
    let rest: BTreeSet<Vertex> = (0..g.n()).filter(|v| !core.contains(v)).collect();
    for comp in sg.components_within(&rest) {
        let nbhd: BTreeSet<Vertex> =
            comp.iter().flat_map(|&v| sg.neighbours(v).iter().copied()).filter(|v| core.contains(v)).collect();
        let x = (0..td.nodes.len())
            .filter(|&i| nbhd.is_subset(&td.nodes[i].bag))
            .min_by_key(|&i| (td.nodes[i].bag.len(), i))
            .expect("neighbourhood of a component is a torso clique");
        attach(&mut td, x, &comp);
    }
    let max_core_bag = td.core_bags(&core).iter().map(|b| b.len()).max().unwrap_or(0);
    CutDecomposition { core, cut_edges, td, max_core_bag }
}

fn attach(td: &mut TreeDecomposition, x: usize, comp: &BTreeSet<Vertex>) {
    if td.nodes[x].kind == NodeKind::Leaf {
        td.nodes[x].bag.extend(comp.iter().copied());
        return;
    }
    let mut leaf_bag = td.nodes[x].bag.clone();
    leaf_bag.extend(comp.iter().copied());
    let above = td.nodes[x].parent;
    let leaf = td.push(leaf_bag, NodeKind::Leaf, Vec::new());
    let join = td.push(td.nodes[x].bag.clone(), NodeKind::Join, vec![x, leaf]);
    match above {
        Some(p) => {
            td.nodes[join].parent = Some(p);
            for c in td.nodes[p].children.iter_mut() {
                if *c == x {
                    *c = join;
                }
            }
        }
        None => td.root = join,
    }
}

/// The structural properties the DP relies on: the cut endpoints are core,
/// non-leaf bags and bag overlaps stay inside the core, and the node kinds
/// hold on core bags.
pub fn check_cut_properties(g: &MixedGraph, cd: &CutDecomposition) -> Result<(), String> {
    let sg = SimpleGraph::from_edges_of(g);
    validate_decomposition(&sg, &cd.td, &cd.core)?;
    for &i in &cd.cut_edges {
        let e = g.edges()[i];
        if !cd.core.contains(&e.u) || !cd.core.contains(&e.v) {
            return Err(format!("cut edge {}-{} has an endpoint outside the core", e.u, e.v));
        }
    }
    for (i, node) in cd.td.nodes.iter().enumerate() {
        if node.kind != NodeKind::Leaf && !node.bag.is_subset(&cd.core) {
            return Err(format!("non-leaf node {i} has a bag outside the core"));
        }
    }
    for i in 0..cd.td.nodes.len() {
        for j in i + 1..cd.td.nodes.len() {
            let a = &cd.td.nodes[i].bag;
            let b = &cd.td.nodes[j].bag;
            if a.intersection(b).any(|v| !cd.core.contains(v)) {
                return Err(format!("bags {i} and {j} share a vertex outside the core"));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn graph(n: usize, edges: &[(Vertex, Vertex)]) -> SimpleGraph {
        let mut g = SimpleGraph::new(0..n);
        for &(u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    fn grid3() -> SimpleGraph {
        let mut edges = Vec::new();
        for r in 0..3 {
            for c in 0..3 {
                let v = r * 3 + c;
                if c < 2 {
                    edges.push((v, v + 1));
                }
                if r < 2 {
                    edges.push((v, v + 3));
                }
            }
        }
        graph(9, &edges)
    }

    #[test]
    fn torso_examples() {
        let path = graph(3, &[(0, 1), (1, 2)]);
        assert_eq!(torso(&path, &BTreeSet::from([0, 2])).edges(), vec![(0, 2)]);
        assert_eq!(torso(&path, &BTreeSet::from([0, 1, 2])), path);
        let star = graph(4, &[(0, 1), (0, 2), (0, 3)]);
        assert_eq!(torso(&star, &BTreeSet::from([1, 2, 3])).edges(), vec![(1, 2), (1, 3), (2, 3)]);
    }

    #[test]
    fn validation_examples() {
        let path = graph(3, &[(0, 1), (1, 2)]);
        let all = [BTreeSet::from([0, 1, 2])];
        assert!(validate_bags(&path, &all, &[]).is_ok());
        let good = [BTreeSet::from([0, 1]), BTreeSet::from([1, 2])];
        assert!(validate_bags(&path, &good, &[(0, 1)]).is_ok());
        let bad = [BTreeSet::from([0, 1]), BTreeSet::from([0, 2])];
        assert!(validate_bags(&path, &bad, &[(0, 1)]).is_err());
    }

    #[test]
    fn treewidth_examples() {
        let tree = graph(5, &[(0, 1), (0, 2), (2, 3), (2, 4)]);
        assert_eq!(exact_treewidth(&tree).0, 1);
        let k5 = graph(5, &[(0, 1), (0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]);
        assert_eq!(exact_treewidth(&k5).0, 4);
        let grid = grid3();
        let (w, order) = exact_treewidth(&grid);
        assert_eq!(w, 3);
        let td = decomposition_from_order(&grid, &order);
        assert_eq!(td.width(), 3);
        assert!(validate_bags(&grid, &td.bags, &td.tree_edges()).is_ok());
    }

    #[test]
    fn nice_examples() {
        let single = BagTree { bags: vec![BTreeSet::from([0, 1])], parent: vec![None] };
        let td = make_nice(&single);
        assert_eq!(td.nodes.len(), 1);
        assert_eq!(td.nodes[0].kind, NodeKind::Leaf);

        let path = graph(3, &[(0, 1), (1, 2)]);
        let two = BagTree { bags: vec![BTreeSet::from([0, 1]), BTreeSet::from([1, 2])], parent: vec![Some(1), None] };
        let td = make_nice(&two);
        let all: BTreeSet<Vertex> = (0..3).collect();
        assert!(validate_decomposition(&path, &td, &all).is_ok());
        assert_eq!(td.nodes.len(), 3);

        let grid = grid3();
        let raw = compute_tree_decomposition(&grid);
        let td = make_nice(&raw);
        assert_eq!(td.width(), raw.width());
        assert!(validate_decomposition(&grid, &td, &(0..9).collect()).is_ok());
    }

    #[test]
    fn cut_decomposition_examples() {
        let g = MixedGraph::undirected(2, [(0, 1, 1)]).unwrap();
        let cd = build_cut_decomposition(&g, &Demand::new(vec![2, -2])).unwrap();
        assert_eq!(cd.core, BTreeSet::from([0, 1]));
        assert_eq!(cd.td.nodes.len(), 1);
        assert_eq!(cd.td.nodes[0].bag, BTreeSet::from([0, 1]));

        let path = MixedGraph::undirected(3, [(0, 1, 1), (1, 2, 1)]).unwrap();
        assert!(build_cut_decomposition(&path, &Demand::new(vec![1, 0, -1])).is_none());

        // Triangles 0-1-2 and 3-4-5 bridged by 2-3.
        let bridge = MixedGraph::undirected(
            6,
            [(0, 1, 1), (1, 2, 1), (0, 2, 1), (2, 3, 1), (3, 4, 1), (4, 5, 1), (3, 5, 1)],
        )
        .unwrap();
        let cd = build_cut_decomposition(&bridge, &Demand::new(vec![2, 0, 0, 0, 0, -2])).unwrap();
        assert!(cd.cut_edges.contains(&bridge.edge_index(2, 3).unwrap()));
        check_cut_properties(&bridge, &cd).unwrap();
    }

    fn random_graph() -> impl Strategy<Value = SimpleGraph> {
        (1usize..=8).prop_flat_map(|n| {
            prop::collection::vec((0..n, 0..n), 0..=14).prop_map(move |edges| graph(n, &edges))
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(150))]

        #[test]
        fn torso_of_torso((g, a, b) in random_graph().prop_flat_map(|g| {
            let n = g.len();
            (Just(g), prop::collection::vec(any::<bool>(), n), prop::collection::vec(any::<bool>(), n))
        })) {
            let outer: BTreeSet<Vertex> = (0..g.len()).filter(|&v| a[v] || b[v]).collect();
            let inner: BTreeSet<Vertex> = (0..g.len()).filter(|&v| b[v]).collect();
            prop_assert_eq!(torso(&torso(&g, &outer), &inner), torso(&g, &inner));
        }

        #[test]
        fn nice_keeps_width_and_validity(g in random_graph()) {
            let raw = compute_tree_decomposition(&g);
            prop_assert!(validate_bags(&g, &raw.bags, &raw.tree_edges()).is_ok());
            let td = make_nice(&raw);
            prop_assert_eq!(td.width(), raw.width());
            let all: BTreeSet<Vertex> = g.vertices().collect();
            prop_assert!(validate_decomposition(&g, &td, &all).is_ok());
            prop_assert!(td.nodes.len() <= g.len() * (2 * raw.width() + 4));
        }

        #[test]
        fn min_fill_is_valid_and_not_below_exact(g in random_graph()) {
            let exact = exact_treewidth(&g).0;
            let heuristic = decomposition_from_order(&g, &min_fill_order(&g));
            prop_assert!(validate_bags(&g, &heuristic.bags, &heuristic.tree_edges()).is_ok());
            prop_assert!(heuristic.width() >= exact);
        }
    }
}

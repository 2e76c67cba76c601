//! Demand roads and the small cuts that obstruct them.
//!
//! A road for demand `t` in an undirected multigraph `H` is an orientation of
//! a sub-multigraph whose out-minus-in degree is `t(v)` everywhere. It exists
//! exactly when the augmented graph (a source joined to each supply vertex
//! `t(v)` times, each deficit vertex joined to a sink `-t(v)` times) has no
//! source/sink cut with fewer than `p` edges, `p` being the total supply.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::flow::{max_flow, FlowNetwork};
use crate::graph::{Demand, DirectedMultigraph, MixedGraph, UndirectedMultigraph, Vertex};

/// What a class of parallel copies in the augmented graph stands for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum GroupOrigin {
    /// Copies of a pair of `H`.
    Base,
    /// Source-side demand copies.
    Source,
    /// Sink-side demand copies.
    Sink,
}

/// Parallel copies between `x` and `y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CopyGroup {
    pub x: usize,
    pub y: usize,
    pub count: u64,
    pub origin: GroupOrigin,
}

/// `H` plus source `a = n` and sink `b = n + 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AugmentedGraph {
    pub n: usize,
    pub p: u64,
    pub groups: Vec<CopyGroup>,
}

impl AugmentedGraph {
    pub fn a(&self) -> usize {
        self.n
    }

    pub fn b(&self) -> usize {
        self.n + 1
    }

    /// Every single copy as `(x, y, group index)`; cut sets index into this list.
    pub fn copies(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for (i, g) in self.groups.iter().enumerate() {
            for _ in 0..g.count {
                out.push((g.x, g.y, i));
            }
        }
        out
    }

    pub fn degree(&self, v: usize) -> u64 {
        self.groups.iter().filter(|g| g.x == v || g.y == v).map(|g| g.count).sum()
    }

    /// Whether `a` reaches `b` once `removed[i]` copies of group `i` are gone.
    fn connects(&self, removed: &[u64]) -> bool {
        let mut adj = vec![Vec::new(); self.n + 2];
        for (g, &r) in self.groups.iter().zip(removed) {
            if g.count > r {
                adj[g.x].push(g.y);
                adj[g.y].push(g.x);
            }
        }
        reaches(&adj, self.a(), self.b())
    }
}

fn reaches(adj: &[Vec<usize>], from: usize, to: usize) -> bool {
    let mut seen = vec![false; adj.len()];
    seen[from] = true;
    let mut queue = VecDeque::from([from]);
    while let Some(x) = queue.pop_front() {
        if x == to {
            return true;
        }
        for &y in &adj[x] {
            if !seen[y] {
                seen[y] = true;
                queue.push_back(y);
            }
        }
    }
    false
}

pub fn build_hstar(h: &UndirectedMultigraph, t: &Demand) -> AugmentedGraph {
    let n = h.n();
    let mut groups: Vec<CopyGroup> =
        h.iter().map(|((x, y), count)| CopyGroup { x, y, count, origin: GroupOrigin::Base }).collect();
    for v in 0..n {
        let d = t.get(v);
        if d > 0 {
            groups.push(CopyGroup { x: n, y: v, count: d as u64, origin: GroupOrigin::Source });
        } else if d < 0 {
            groups.push(CopyGroup { x: v, y: n + 1, count: (-d) as u64, origin: GroupOrigin::Sink });
        }
    }
    AugmentedGraph { n, p: t.p(), groups }
}

/// Maximum source-to-sink flow through `h` for demand `t`, with each pair's
/// multiplicity shared by both directions; returns the value and the net
/// per-direction flow on `h`.
fn road_flow(h: &UndirectedMultigraph, t: &Demand) -> (u64, DirectedMultigraph) {
    let n = h.n();
    let (a, b) = (n, n + 1);
    let mut net = FlowNetwork::new(n + 2);
    let mut pairs = Vec::new();
    for ((x, y), c) in h.iter() {
        let fwd = net.add_capacity(x, y, c);
        let bwd = net.add_capacity(y, x, c);
        pairs.push((x, y, fwd, bwd));
    }
    for v in 0..n {
        let d = t.get(v);
        if d > 0 {
            net.add_capacity(a, v, d as u64);
        } else if d < 0 {
            net.add_capacity(v, b, (-d) as u64);
        }
    }
    let (value, flow) = max_flow(&net, a, b);
    let mut road = DirectedMultigraph::new(n);
    for (x, y, fwd, bwd) in pairs {
        let (f, r) = (flow[fwd], flow[bwd]);
        if f > r {
            road.add(x, y, f - r);
        } else if r > f {
            road.add(y, x, r - f);
        }
    }
    (value, road)
}

/// A road for `t` inside `h`, if one exists.
pub fn find_troad(h: &UndirectedMultigraph, t: &Demand) -> Option<DirectedMultigraph> {
    if t.sum() != 0 {
        return None;
    }
    if t.is_zero() {
        return Some(DirectedMultigraph::new(h.n()));
    }
    let (value, road) = road_flow(h, t);
    (value == t.p()).then_some(road)
}

/// Whether the demand can be routed at all (cheaper than building the road).
pub fn has_troad(h: &UndirectedMultigraph, t: &Demand) -> bool {
    t.sum() == 0 && (t.is_zero() || road_flow(h, t).0 == t.p())
}

/// Road invariants: meets `t` and never uses a pair more often than `h` has it.
pub fn is_troad(road: &DirectedMultigraph, h: &UndirectedMultigraph, t: &Demand) -> bool {
    road.imbalances().as_slice() == t.as_slice()
        && road.iter().all(|((u, v), _)| road.multiplicity(u, v) + road.multiplicity(v, u) <= h.multiplicity(u, v))
}

/// Removing the copies in `f` separates `a` from `b`, and no single copy of
/// `f` could be put back without reconnecting them.
pub fn is_minimal_ab_cut(hstar: &AugmentedGraph, f: &BTreeSet<usize>) -> bool {
    let copies = hstar.copies();
    let mut removed = vec![0u64; hstar.groups.len()];
    for &i in f {
        removed[copies[i].2] += 1;
    }
    if hstar.connects(&removed) {
        return false;
    }
    f.iter().all(|&i| {
        removed[copies[i].2] -= 1;
        let back = hstar.connects(&removed);
        removed[copies[i].2] += 1;
        back
    })
}

/// Minimal cuts of the augmented graph with fewer than `p` copies, each
/// reported as the set of `H` pairs it contains. Reference semantics: every
/// subset of copies is tried. Only usable on tiny inputs.
pub fn small_cuts_reference(h: &UndirectedMultigraph, t: &Demand) -> Vec<BTreeSet<(Vertex, Vertex)>> {
    let hstar = build_hstar(h, t);
    let copies = hstar.copies();
    let mut found = Vec::new();
    if hstar.p == 0 {
        return found;
    }
    let limit = (hstar.p - 1) as usize;
    let mut chosen = BTreeSet::new();
    fn go(
        hstar: &AugmentedGraph,
        copies: &[(usize, usize, usize)],
        start: usize,
        limit: usize,
        chosen: &mut BTreeSet<usize>,
        found: &mut Vec<BTreeSet<(Vertex, Vertex)>>,
    ) {
        if is_minimal_ab_cut(hstar, chosen) {
            found.push(
                chosen
                    .iter()
                    .map(|&i| copies[i])
                    .filter(|c| hstar.groups[c.2].origin == GroupOrigin::Base)
                    .map(|c| (c.0, c.1))
                    .collect(),
            );
        }
        if chosen.len() == limit {
            return;
        }
        for i in start..copies.len() {
            chosen.insert(i);
            go(hstar, copies, i + 1, limit, chosen, found);
            chosen.remove(&i);
        }
    }
    go(&hstar, &copies, 0, limit, &mut chosen, &mut found);
    found
}

/// Union of the `H` pairs over all small cuts, by the reference enumeration.
pub fn small_tcut_union_reference(h: &UndirectedMultigraph, t: &Demand) -> BTreeSet<(Vertex, Vertex)> {
    small_cuts_reference(h, t).into_iter().flatten().collect()
}

/// Largest vertex count for which cuts are enumerated by vertex bipartitions.
const BIPARTITION_LIMIT: usize = 20;

/// Union of the `H` pairs lying in some minimal source/sink cut of the
/// augmented graph with fewer than `p` copies.
///
/// A minimal cut is exactly the set of copies between a connected side `S`
/// holding the source and a connected remainder of the source's component
/// holding the sink, so small graphs are handled by enumerating `S`. Larger
/// graphs enumerate sets of parallel classes instead: a minimal cut takes
/// either all copies of a class or none.
pub fn small_tcut_union(h: &UndirectedMultigraph, t: &Demand) -> BTreeSet<(Vertex, Vertex)> {
    if t.p() == 0 || has_troad(h, t) {
        return BTreeSet::new();
    }
    let hstar = build_hstar(h, t);
    if hstar.n <= BIPARTITION_LIMIT {
        union_by_bipartitions(&hstar)
    } else {
        union_by_groups(&hstar)
    }
}

fn union_by_bipartitions(hstar: &AugmentedGraph) -> BTreeSet<(Vertex, Vertex)> {
    let total = hstar.n + 2;
    let (a, b) = (hstar.a(), hstar.b());
    let mut adj = vec![Vec::new(); total];
    for g in &hstar.groups {
        adj[g.x].push(g.y);
        adj[g.y].push(g.x);
    }
    // Vertices outside the source's component never matter.
    let mut comp = vec![false; total];
    comp[a] = true;
    let mut queue = VecDeque::from([a]);
    while let Some(x) = queue.pop_front() {
        for &y in &adj[x] {
            if !comp[y] {
                comp[y] = true;
                queue.push_back(y);
            }
        }
    }
    let mut union = BTreeSet::new();
    if !comp[b] {
        return union;
    }
    let inner: Vec<usize> = (0..hstar.n).filter(|&v| comp[v]).collect();
    let connected = |side: &[bool], root: usize| {
        let mut seen = vec![false; total];
        seen[root] = true;
        let mut stack = vec![root];
        while let Some(x) = stack.pop() {
            for &y in &adj[x] {
                if side[y] && !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        (0..total).all(|v| !side[v] || seen[v])
    };
    for mask in 0u64..(1u64 << inner.len()) {
        let mut side_s = vec![false; total];
        side_s[a] = true;
        for (i, &v) in inner.iter().enumerate() {
            side_s[v] = mask >> i & 1 == 1;
        }
        let side_b: Vec<bool> = (0..total).map(|v| comp[v] && !side_s[v]).collect();
        let size: u64 = hstar.groups.iter().filter(|g| side_s[g.x] != side_s[g.y]).map(|g| g.count).sum();
        if size >= hstar.p || !connected(&side_s, a) || !connected(&side_b, b) {
            continue;
        }
        for g in &hstar.groups {
            if g.origin == GroupOrigin::Base && side_s[g.x] != side_s[g.y] {
                union.insert((g.x, g.y));
            }
        }
    }
    union
}

fn union_by_groups(hstar: &AugmentedGraph) -> BTreeSet<(Vertex, Vertex)> {
    let mut union = BTreeSet::new();
    let mut removed = vec![0u64; hstar.groups.len()];
    let mut chosen = Vec::new();
    fn go(
        hstar: &AugmentedGraph,
        start: usize,
        size: u64,
        removed: &mut Vec<u64>,
        chosen: &mut Vec<usize>,
        union: &mut BTreeSet<(Vertex, Vertex)>,
    ) {
        if !chosen.is_empty() && !hstar.connects(removed) {
            let minimal = chosen.iter().all(|&i| {
                removed[i] = 0;
                let back = hstar.connects(removed);
                removed[i] = hstar.groups[i].count;
                back
            });
            if minimal {
                for &i in chosen.iter() {
                    let g = hstar.groups[i];
                    if g.origin == GroupOrigin::Base {
                        union.insert((g.x, g.y));
                    }
                }
            }
            // Supersets of a cut are never minimal.
            return;
        }
        for i in start..hstar.groups.len() {
            let c = hstar.groups[i].count;
            if size + c < hstar.p {
                removed[i] = c;
                chosen.push(i);
                go(hstar, i + 1, size + c, removed, chosen, union);
                chosen.pop();
                removed[i] = 0;
            }
        }
    }
    go(hstar, 0, 0, &mut removed, &mut chosen, &mut union);
    union
}

/// The small-cut union as edge indices of a simple undirected graph.
pub fn small_tcut_edges(g: &MixedGraph, t: &Demand) -> BTreeSet<usize> {
    small_tcut_union(&g.edge_multigraph(), t)
        .into_iter()
        .map(|(u, v)| g.edge_index(u, v).expect("cut pair is an edge"))
        .collect()
}

/// Uses every pair outside `f` at most once.
pub fn is_well_behaved(road: &DirectedMultigraph, f: &BTreeSet<(Vertex, Vertex)>) -> bool {
    let mut per_pair: BTreeMap<(Vertex, Vertex), u64> = BTreeMap::new();
    for ((u, v), c) in road.iter() {
        *per_pair.entry((u.min(v), u.max(v))).or_insert(0) += c;
    }
    per_pair.into_iter().all(|(pair, c)| c <= 1 || f.contains(&pair))
}

/// The augmented graph with every copy split by its own midpoint vertex.
#[derive(Clone, Debug)]
pub struct Subdivision {
    /// Vertex count: `n + 2` original ones, then one midpoint per copy.
    pub vertices: usize,
    pub edges: Vec<(usize, usize)>,
    /// For each midpoint (offset from `n + 2`): the copy it splits.
    pub midpoint_of: Vec<(usize, usize, GroupOrigin)>,
    pub a: usize,
    pub b: usize,
}

pub fn subdivide_for_cuts(hstar: &AugmentedGraph) -> Subdivision {
    let base = hstar.n + 2;
    let mut edges = Vec::new();
    let mut midpoint_of = Vec::new();
    for (x, y, gi) in hstar.copies() {
        let m = base + midpoint_of.len();
        edges.push((x, m));
        edges.push((m, y));
        midpoint_of.push((x, y, hstar.groups[gi].origin));
    }
    Subdivision { vertices: base + midpoint_of.len(), edges, midpoint_of, a: hstar.a(), b: hstar.b() }
}

impl Subdivision {
    fn separates(&self, removed: &BTreeSet<usize>) -> bool {
        let mut adj = vec![Vec::new(); self.vertices];
        for &(x, y) in &self.edges {
            if !removed.contains(&x) && !removed.contains(&y) {
                adj[x].push(y);
                adj[y].push(x);
            }
        }
        !reaches(&adj, self.a, self.b)
    }

    /// Minimal separators made of fewer than `limit` midpoints.
    pub fn small_separators(&self, limit: usize) -> Vec<BTreeSet<usize>> {
        let base = self.vertices - self.midpoint_of.len();
        let mids: Vec<usize> = (base..self.vertices).collect();
        let mut out = Vec::new();
        let mut chosen = BTreeSet::new();
        fn go(
            s: &Subdivision,
            mids: &[usize],
            start: usize,
            limit: usize,
            chosen: &mut BTreeSet<usize>,
            out: &mut Vec<BTreeSet<usize>>,
        ) {
            if chosen.len() < limit && s.separates(chosen) {
                let minimal = chosen.clone().into_iter().all(|m| {
                    chosen.remove(&m);
                    let still = s.separates(chosen);
                    chosen.insert(m);
                    !still
                });
                if minimal {
                    out.push(chosen.clone());
                }
                return;
            }
            if chosen.len() + 1 >= limit {
                return;
            }
            for i in start..mids.len() {
                chosen.insert(mids[i]);
                go(s, mids, i + 1, limit, chosen, out);
                chosen.remove(&mids[i]);
            }
        }
        go(self, &mids, 0, limit, &mut chosen, &mut out);
        out
    }
}

/// The small-cut union computed through midpoint separators instead of cuts.
pub fn small_tcut_union_by_separators(h: &UndirectedMultigraph, t: &Demand) -> BTreeSet<(Vertex, Vertex)> {
    let hstar = build_hstar(h, t);
    if hstar.p == 0 {
        return BTreeSet::new();
    }
    let sub = subdivide_for_cuts(&hstar);
    let base = sub.vertices - sub.midpoint_of.len();
    sub.small_separators(hstar.p as usize)
        .into_iter()
        .flatten()
        .map(|m| sub.midpoint_of[m - base])
        .filter(|&(_, _, o)| o == GroupOrigin::Base)
        .map(|(x, y, _)| (x, y))
        .collect()
}

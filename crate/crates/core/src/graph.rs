//! Graph representations shared by every solver, plus the predicates used to
//! check solutions.
//!
//! Vertices are dense `usize` ids `0..n`. Files use 1-based ids; the
//! conversion happens in [`crate::io`]. All multiplicity maps are ordered
//! maps so that iteration (and hence tie-breaking) is deterministic.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Add;

use crate::error::{Error, Result};
use crate::karc::kappa;

pub type Vertex = usize;

/// An edge `{u, v}` (stored with `u < v`) or an arc `u -> v`, with its weight.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Link {
    pub u: Vertex,
    pub v: Vertex,
    pub w: u64,
}

impl Link {
    pub fn new(u: Vertex, v: Vertex, w: u64) -> Self {
        Link { u, v, w }
    }

    pub fn other(&self, x: Vertex) -> Vertex {
        if x == self.u {
            self.v
        } else {
            self.u
        }
    }
}

/// Which link sits between a pair of vertices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LinkRef {
    Edge(usize),
    Arc(usize),
}

fn unordered(u: Vertex, v: Vertex) -> (Vertex, Vertex) {
    if u <= v {
        (u, v)
    } else {
        (v, u)
    }
}

/// A simple weighted mixed graph: at most one link (edge or arc) per vertex pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MixedGraph {
    n: usize,
    edges: Vec<Link>,
    arcs: Vec<Link>,
    pairs: BTreeMap<(Vertex, Vertex), LinkRef>,
}

impl MixedGraph {
    /// Builds a graph, rejecting loops, out-of-range vertices and parallel links.
    pub fn new<E, A>(n: usize, edges: E, arcs: A) -> Result<Self>
    where
        E: IntoIterator<Item = (Vertex, Vertex, u64)>,
        A: IntoIterator<Item = (Vertex, Vertex, u64)>,
    {
        let mut g = MixedGraph {
            n,
            edges: Vec::new(),
            arcs: Vec::new(),
            pairs: BTreeMap::new(),
        };
        for (u, v, w) in edges {
            g.check_pair(u, v)?;
            let (a, b) = unordered(u, v);
            g.pairs.insert((a, b), LinkRef::Edge(g.edges.len()));
            g.edges.push(Link::new(a, b, w));
        }
        for (u, v, w) in arcs {
            g.check_pair(u, v)?;
            g.pairs.insert(unordered(u, v), LinkRef::Arc(g.arcs.len()));
            g.arcs.push(Link::new(u, v, w));
        }
        g.check_weight_bound()?;
        Ok(g)
    }

    /// An undirected graph (no arcs).
    pub fn undirected<E>(n: usize, edges: E) -> Result<Self>
    where
        E: IntoIterator<Item = (Vertex, Vertex, u64)>,
    {
        Self::new(n, edges, std::iter::empty())
    }

    fn check_pair(&self, u: Vertex, v: Vertex) -> Result<()> {
        for x in [u, v] {
            if x >= self.n {
                return Err(Error::VertexOutOfRange { vertex: x, n: self.n });
            }
        }
        if u == v {
            return Err(Error::SelfLoop(u));
        }
        if self.pairs.contains_key(&unordered(u, v)) {
            return Err(Error::DuplicateLink(u, v));
        }
        Ok(())
    }

    // Every solution we produce has at most kappa(k) + max(kappa(k), 2) copies
    // of a single link, so this keeps every weight sum inside u64.
    fn check_weight_bound(&self) -> Result<()> {
        let kap = kappa(self.arcs.len() as u64);
        let factor = kap + kap.max(2);
        let total = self
            .edges
            .iter()
            .chain(&self.arcs)
            .try_fold(0u64, |acc, l| acc.checked_add(l.w))
            .ok_or(Error::WeightOverflow)?;
        total.checked_mul(factor).ok_or(Error::WeightOverflow)?;
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Link] {
        &self.edges
    }

    pub fn arcs(&self) -> &[Link] {
        &self.arcs
    }

    pub fn link_between(&self, u: Vertex, v: Vertex) -> Option<LinkRef> {
        self.pairs.get(&unordered(u, v)).copied()
    }

    pub fn edge_index(&self, u: Vertex, v: Vertex) -> Option<usize> {
        match self.link_between(u, v) {
            Some(LinkRef::Edge(i)) => Some(i),
            _ => None,
        }
    }

    /// Weight of traversing `u -> v`, if that direction is legal.
    pub fn traversal_weight(&self, u: Vertex, v: Vertex) -> Option<u64> {
        match self.link_between(u, v)? {
            LinkRef::Edge(i) => Some(self.edges[i].w),
            LinkRef::Arc(i) => {
                let a = self.arcs[i];
                (a.u == u && a.v == v).then_some(a.w)
            }
        }
    }

    pub fn total_link_weight(&self) -> u64 {
        self.edges.iter().chain(&self.arcs).map(|l| l.w).sum()
    }

    /// Undirected neighbour lists over edges and arcs alike, sorted.
    pub fn neighbours(&self) -> Vec<Vec<Vertex>> {
        let mut adj = vec![Vec::new(); self.n];
        for l in self.edges.iter().chain(&self.arcs) {
            adj[l.u].push(l.v);
            adj[l.v].push(l.u);
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        adj
    }

    /// Edge-only incidence lists: `(neighbour, edge index)`.
    pub fn edge_incidence(&self) -> Vec<Vec<(Vertex, usize)>> {
        let mut inc = vec![Vec::new(); self.n];
        for (i, e) in self.edges.iter().enumerate() {
            inc[e.u].push((e.v, i));
            inc[e.v].push((e.u, i));
        }
        for l in &mut inc {
            l.sort_unstable();
        }
        inc
    }

    pub fn edge_degree(&self, v: Vertex) -> usize {
        self.edges.iter().filter(|e| e.u == v || e.v == v).count()
    }

    /// True when every vertex is reachable from every other ignoring directions.
    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let adj = self.neighbours();
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(x) = stack.pop() {
            for &y in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Sum of `multiplicity * weight` over a directed multigraph on this graph.
    pub fn directed_weight(&self, d: &DirectedMultigraph) -> Result<u64> {
        let mut total = 0u64;
        for ((u, v), c) in d.iter() {
            let w = self.traversal_weight(u, v).ok_or(Error::UnknownLink(u, v))?;
            total = total
                .checked_add(w.checked_mul(c).ok_or(Error::WeightOverflow)?)
                .ok_or(Error::WeightOverflow)?;
        }
        Ok(total)
    }

    /// Sum of `multiplicity * weight` over an undirected multigraph on the edges.
    pub fn undirected_weight(&self, h: &UndirectedMultigraph) -> Result<u64> {
        let mut total = 0u64;
        for ((u, v), c) in h.iter() {
            let i = self.edge_index(u, v).ok_or(Error::UnknownLink(u, v))?;
            total = total
                .checked_add(self.edges[i].w.checked_mul(c).ok_or(Error::WeightOverflow)?)
                .ok_or(Error::WeightOverflow)?;
        }
        Ok(total)
    }

    /// The graph itself as an undirected multigraph with every edge once.
    pub fn edge_multigraph(&self) -> UndirectedMultigraph {
        let mut h = UndirectedMultigraph::new(self.n);
        for e in &self.edges {
            h.add(e.u, e.v, 1);
        }
        h
    }
}

/// Arc multiplicities `mu(u, v)`; absent pairs mean zero.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct DirectedMultigraph {
    n: usize,
    mu: BTreeMap<(Vertex, Vertex), u64>,
}

impl DirectedMultigraph {
    pub fn new(n: usize) -> Self {
        DirectedMultigraph { n, mu: BTreeMap::new() }
    }

    pub fn from_arcs<I: IntoIterator<Item = (Vertex, Vertex, u64)>>(n: usize, arcs: I) -> Self {
        let mut d = Self::new(n);
        for (u, v, c) in arcs {
            d.add(u, v, c);
        }
        d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn add(&mut self, u: Vertex, v: Vertex, count: u64) {
        if count > 0 {
            *self.mu.entry((u, v)).or_insert(0) += count;
        }
    }

    /// Removes up to `count` copies; returns how many were actually removed.
    pub fn remove(&mut self, u: Vertex, v: Vertex, count: u64) -> u64 {
        let Some(c) = self.mu.get_mut(&(u, v)) else {
            return 0;
        };
        let taken = count.min(*c);
        *c -= taken;
        if *c == 0 {
            self.mu.remove(&(u, v));
        }
        taken
    }

    pub fn multiplicity(&self, u: Vertex, v: Vertex) -> u64 {
        self.mu.get(&(u, v)).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = ((Vertex, Vertex), u64)> + '_ {
        self.mu.iter().map(|(&k, &c)| (k, c))
    }

    pub fn is_empty(&self) -> bool {
        self.mu.is_empty()
    }

    pub fn arc_count(&self) -> u64 {
        self.mu.values().sum()
    }

    /// Out-degree minus in-degree for every vertex.
    pub fn imbalances(&self) -> Vec<i64> {
        let mut imb = vec![0i64; self.n];
        for (&(u, v), &c) in &self.mu {
            imb[u] += c as i64;
            imb[v] -= c as i64;
        }
        imb
    }

    pub fn merge(&mut self, other: &DirectedMultigraph) {
        for ((u, v), c) in other.iter() {
            self.add(u, v, c);
        }
    }

    /// Forgets directions: `mu(u,v) + mu(v,u)` per unordered pair.
    pub fn undirected(&self) -> UndirectedMultigraph {
        let mut h = UndirectedMultigraph::new(self.n);
        for ((u, v), c) in self.iter() {
            h.add(u, v, c);
        }
        h
    }
}

/// Edge multiplicities per unordered pair; absent pairs mean zero.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct UndirectedMultigraph {
    n: usize,
    mu: BTreeMap<(Vertex, Vertex), u64>,
}

impl UndirectedMultigraph {
    pub fn new(n: usize) -> Self {
        UndirectedMultigraph { n, mu: BTreeMap::new() }
    }

    pub fn from_edges<I: IntoIterator<Item = (Vertex, Vertex, u64)>>(n: usize, edges: I) -> Self {
        let mut h = Self::new(n);
        for (u, v, c) in edges {
            h.add(u, v, c);
        }
        h
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn add(&mut self, u: Vertex, v: Vertex, count: u64) {
        if count > 0 {
            *self.mu.entry(unordered(u, v)).or_insert(0) += count;
        }
    }

    pub fn remove(&mut self, u: Vertex, v: Vertex, count: u64) -> u64 {
        let key = unordered(u, v);
        let Some(c) = self.mu.get_mut(&key) else {
            return 0;
        };
        let taken = count.min(*c);
        *c -= taken;
        if *c == 0 {
            self.mu.remove(&key);
        }
        taken
    }

    pub fn multiplicity(&self, u: Vertex, v: Vertex) -> u64 {
        self.mu.get(&unordered(u, v)).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = ((Vertex, Vertex), u64)> + '_ {
        self.mu.iter().map(|(&k, &c)| (k, c))
    }

    pub fn is_empty(&self) -> bool {
        self.mu.is_empty()
    }

    pub fn degrees(&self) -> Vec<u64> {
        let mut deg = vec![0u64; self.n];
        for (&(u, v), &c) in &self.mu {
            deg[u] += c;
            deg[v] += c;
        }
        deg
    }

    pub fn merge(&mut self, other: &UndirectedMultigraph) {
        for ((u, v), c) in other.iter() {
            self.add(u, v, c);
        }
    }
}

/// Degree parity target for a vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(x: i64) -> Parity {
        if x.rem_euclid(2) == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn is_odd(self) -> bool {
        self == Parity::Odd
    }
}

impl Add for Parity {
    type Output = Parity;

    fn add(self, rhs: Parity) -> Parity {
        if self == rhs {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Even => "EVEN",
            Parity::Odd => "ODD",
        })
    }
}

pub fn parity_add(a: Parity, b: Parity) -> Parity {
    a + b
}

/// Per-vertex demand `t(v)`: required out-degree minus in-degree.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Demand(Vec<i64>);

impl Demand {
    pub fn new(t: Vec<i64>) -> Self {
        Demand(t)
    }

    pub fn zero(n: usize) -> Self {
        Demand(vec![0; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, v: Vertex) -> i64 {
        self.0[v]
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }

    pub fn sum(&self) -> i64 {
        self.0.iter().sum()
    }

    /// Total positive demand.
    pub fn p(&self) -> u64 {
        self.0.iter().filter(|&&x| x > 0).map(|&x| x as u64).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    /// `h(v) = ODD` exactly when `t(v)` is odd.
    pub fn parities(&self) -> Vec<Parity> {
        self.0.iter().map(|&x| Parity::of(x)).collect()
    }
}

/// A closed walk `v1 .. vm` with `v1 == vm`; empty when there is nothing to walk.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ClosedWalk(pub Vec<Vertex>);

impl ClosedWalk {
    pub fn vertices(&self) -> &[Vertex] {
        &self.0
    }

    pub fn is_closed(&self) -> bool {
        self.0.is_empty() || self.0.first() == self.0.last()
    }

    /// How many times each ordered pair is traversed.
    pub fn traversal_counts(&self, n: usize) -> DirectedMultigraph {
        let mut d = DirectedMultigraph::new(n);
        for w in self.0.windows(2) {
            d.add(w[0], w[1], 1);
        }
        d
    }
}

/// Every ordered pair is joined by a path respecting arc directions.
pub fn is_strongly_connected(g: &MixedGraph) -> bool {
    if g.n() <= 1 {
        return true;
    }
    let mut fwd = vec![Vec::new(); g.n()];
    let mut bwd = vec![Vec::new(); g.n()];
    for e in g.edges() {
        fwd[e.u].push(e.v);
        fwd[e.v].push(e.u);
        bwd[e.u].push(e.v);
        bwd[e.v].push(e.u);
    }
    for a in g.arcs() {
        fwd[a.u].push(a.v);
        bwd[a.v].push(a.u);
    }
    let reach_all = |adj: &[Vec<Vertex>]| {
        let mut seen = vec![false; adj.len()];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(x) = stack.pop() {
            for &y in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        seen.into_iter().all(|s| s)
    };
    reach_all(&fwd) && reach_all(&bwd)
}

pub fn imbalance(d: &DirectedMultigraph, v: Vertex) -> i64 {
    d.iter()
        .map(|((a, b), c)| {
            let c = c as i64;
            match (a == v, b == v) {
                (true, false) => c,
                (false, true) => -c,
                _ => 0,
            }
        })
        .sum()
}

pub fn is_t_balanced(d: &DirectedMultigraph, t: &Demand) -> bool {
    d.imbalances().as_slice() == t.as_slice()
}

/// Balanced, and the vertices carrying arcs form one connected piece.
pub fn is_eulerian(d: &DirectedMultigraph) -> bool {
    if d.imbalances().iter().any(|&x| x != 0) {
        return false;
    }
    let mut parent: Vec<usize> = (0..d.n()).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        let mut y = x;
        while parent[y] != r {
            let next = parent[y];
            parent[y] = r;
            y = next;
        }
        r
    }
    let mut touched = vec![false; d.n()];
    for ((u, v), _) in d.iter() {
        touched[u] = true;
        touched[v] = true;
        let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
        if ru != rv {
            parent[ru] = rv;
        }
    }
    let mut root = None;
    for (v, &hit) in touched.iter().enumerate() {
        if hit {
            let r = find(&mut parent, v);
            match root {
                None => root = Some(r),
                Some(r0) if r0 != r => return false,
                _ => {}
            }
        }
    }
    true
}

/// Hierholzer's algorithm, always following the smallest unused out-neighbour.
pub fn eulerian_circuit(d: &DirectedMultigraph) -> Result<ClosedWalk> {
    if !is_eulerian(d) {
        return Err(Error::NotEulerian);
    }
    let mut out: Vec<Vec<Vertex>> = vec![Vec::new(); d.n()];
    for ((u, v), c) in d.iter() {
        out[u].extend(std::iter::repeat_n(v, c as usize));
    }
    let Some(start) = (0..d.n()).find(|&v| !out[v].is_empty()) else {
        return Ok(ClosedWalk::default());
    };
    let mut next = vec![0usize; d.n()];
    let mut stack = vec![start];
    let mut circuit = Vec::with_capacity(d.arc_count() as usize + 1);
    while let Some(&v) = stack.last() {
        if next[v] < out[v].len() {
            stack.push(out[v][next[v]]);
            next[v] += 1;
        } else {
            circuit.push(v);
            stack.pop();
        }
    }
    circuit.reverse();
    Ok(ClosedWalk(circuit))
}

/// Arcs kept in their direction at least once, edges covered at least once,
/// and nothing placed between unlinked vertices.
pub fn is_multi_orientation(d: &DirectedMultigraph, g: &MixedGraph) -> bool {
    if d.n() != g.n() {
        return false;
    }
    if d.iter().any(|((u, v), _)| g.traversal_weight(u, v).is_none()) {
        return false;
    }
    g.arcs().iter().all(|a| d.multiplicity(a.u, a.v) >= 1)
        && g
            .edges()
            .iter()
            .all(|e| d.multiplicity(e.u, e.v) + d.multiplicity(e.v, e.u) >= 1)
}

pub fn is_h_balanced(h: &UndirectedMultigraph, parity: &[Parity]) -> bool {
    h.degrees()
        .iter()
        .zip(parity)
        .all(|(&deg, &p)| Parity::of(deg as i64) == p)
}

/// Orients an even-degree multigraph by walking closed trails, so every
/// vertex ends up balanced. Trails start at the smallest vertex with unused
/// copies and always take the smallest unused neighbour.
pub fn orient_even(h: &UndirectedMultigraph) -> Result<DirectedMultigraph> {
    let n = h.n();
    if let Some(v) = h.degrees().iter().position(|d| d % 2 == 1) {
        return Err(Error::Parity(v));
    }
    // One entry per copy: (neighbour, copy id).
    let mut adj: Vec<Vec<(Vertex, usize)>> = vec![Vec::new(); n];
    let mut copies = 0usize;
    for ((u, v), c) in h.iter() {
        for _ in 0..c {
            adj[u].push((v, copies));
            adj[v].push((u, copies));
            copies += 1;
        }
    }
    for a in &mut adj {
        a.sort_unstable();
    }
    let mut used = vec![false; copies];
    let mut next = vec![0usize; n];
    let mut d = DirectedMultigraph::new(n);
    for start in 0..n {
        let mut stack = vec![start];
        let mut circuit = Vec::new();
        while let Some(&x) = stack.last() {
            while next[x] < adj[x].len() && used[adj[x][next[x]].1] {
                next[x] += 1;
            }
            if next[x] < adj[x].len() {
                let (y, id) = adj[x][next[x]];
                used[id] = true;
                stack.push(y);
            } else {
                circuit.push(x);
                stack.pop();
            }
        }
        circuit.reverse();
        for w in circuit.windows(2) {
            d.add(w[0], w[1], 1);
        }
    }
    Ok(d)
}

//! The balanced problem on undirected graphs.
//!
//! When the demands can be routed through the graph itself, the optimum is
//! the graph plus a minimum join fixing degree parities. Otherwise a dynamic
//! program runs over a nice tree decomposition whose non-leaf bags hold only
//! endpoints of small cuts. Each table entry is keyed by the multiplicities of
//! the edges inside the bag's core part, the part of the road on those edges,
//! the residual demand at each core vertex and the degree parity wanted there.

use std::collections::{BTreeMap, BTreeSet};

use crate::classical::CppSolution;
use crate::decomp::{build_cut_decomposition, decompose_around, CutDecomposition, NodeKind};
use crate::error::{Error, Result};
use crate::graph::{orient_even, Demand, DirectedMultigraph, MixedGraph, Parity, UndirectedMultigraph, Vertex};
use crate::join::{min_weight_xjoin, min_weight_xjoin_in, XJoin};
use crate::troad::{find_troad, has_troad, is_troad};

/// Orients `h` so that it meets `t`: the road keeps its directions and the
/// even remainder is walked along closed trails.
pub fn orient(h: &UndirectedMultigraph, road: &DirectedMultigraph, t: &Demand) -> Result<DirectedMultigraph> {
    if t.len() != h.n() {
        return Err(Error::DemandLength { got: t.len(), n: h.n() });
    }
    let deg = h.degrees();
    if let Some(v) = (0..h.n()).find(|&v| (deg[v] as i64 - t.get(v)).rem_euclid(2) == 1) {
        return Err(Error::Parity(v));
    }
    if !is_troad(road, h, t) {
        return Err(Error::Infeasible);
    }
    let mut rest = h.clone();
    for ((u, v), c) in road.iter() {
        rest.remove(u, v, c);
    }
    let mut d = orient_even(&rest)?;
    d.merge(road);
    Ok(d)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BcppOptions {
    /// Run the table DP even when the demands route through the graph; the
    /// whole vertex set then serves as the core.
    pub force_dp: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BcppPath {
    Fast,
    Dp,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BcppOutcome {
    pub solution: CppSolution,
    pub path: BcppPath,
    /// Largest `|bag ∩ core|` of the decomposition used, on the DP path.
    pub max_core_bag: Option<usize>,
}

pub fn solve_bcpp(g: &MixedGraph, t: &Demand) -> Result<CppSolution> {
    Ok(solve_bcpp_with(g, t, BcppOptions::default())?.solution)
}

pub fn solve_bcpp_with(g: &MixedGraph, t: &Demand, opts: BcppOptions) -> Result<BcppOutcome> {
    if !g.arcs().is_empty() {
        return Err(Error::WrongKind { expected: "undirected graph", got: "mixed graph" });
    }
    if t.len() != g.n() {
        return Err(Error::DemandLength { got: t.len(), n: g.n() });
    }
    if t.sum() != 0 {
        return Err(Error::DemandSum(t.sum()));
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let h = g.edge_multigraph();
    if !opts.force_dp && has_troad(&h, t) {
        let deg = h.degrees();
        let odd: Vec<Vertex> = (0..g.n()).filter(|&v| (deg[v] as i64 - t.get(v)).rem_euclid(2) == 1).collect();
        let join = min_weight_xjoin_in(g, &odd)?;
        let mut full = h;
        full.merge(&join.edges);
        let road = find_troad(&full, t).ok_or(Error::Infeasible)?;
        let solution = CppSolution::new(g, orient(&full, &road, t)?)?;
        return Ok(BcppOutcome { solution, path: BcppPath::Fast, max_core_bag: None });
    }
    let cd = build_cut_decomposition(g, t)
        .unwrap_or_else(|| decompose_around(g, (0..g.n()).collect(), BTreeSet::new()));
    let max_core_bag = cd.max_core_bag;
    let dp = PsiDp::new(g, t, cd)?;
    let tables = dp.fill();
    let (key, _) = dp.best_root(&tables).ok_or(Error::Infeasible)?;
    let full = dp.witness(&tables, dp.cd.td.root, &key);
    let road = find_troad(&full, t).ok_or(Error::Infeasible)?;
    let solution = CppSolution::new(g, orient(&full, &road, t)?)?;
    Ok(BcppOutcome { solution, path: BcppPath::Dp, max_core_bag: Some(max_core_bag) })
}

/// Canonical table key. Per bag edge: multiplicity, then net road count
/// (positive means from the smaller bag position to the larger). Per bag
/// vertex: residual demand, then wanted parity (0 even, 1 odd).
pub type Key = Box<[i16]>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BagEdge {
    /// Positions of the endpoints in [`BagLayout::vertices`], `a < b`.
    pub a: usize,
    pub b: usize,
    pub index: usize,
    pub w: u64,
    pub in_cut: bool,
}

/// Vertex and edge order of the keys at one node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BagLayout {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<BagEdge>,
}

impl BagLayout {
    pub fn new(g: &MixedGraph, alpha: &BTreeSet<Vertex>, cut: &BTreeSet<usize>) -> Self {
        let vertices: Vec<Vertex> = alpha.iter().copied().collect();
        let mut edges = Vec::new();
        for (a, &u) in vertices.iter().enumerate() {
            for (b, &v) in vertices.iter().enumerate().skip(a + 1) {
                if let Some(index) = g.edge_index(u, v) {
                    edges.push(BagEdge { a, b, index, w: g.edges()[index].w, in_cut: cut.contains(&index) });
                }
            }
        }
        BagLayout { vertices, edges }
    }

    pub fn key_len(&self) -> usize {
        2 * self.edges.len() + 2 * self.vertices.len()
    }

    pub fn position(&self, v: Vertex) -> Option<usize> {
        self.vertices.binary_search(&v).ok()
    }

    fn vbase(&self, j: usize) -> usize {
        2 * self.edges.len() + 2 * j
    }

    /// Residual demand of the `j`-th vertex.
    pub fn demand(&self, key: &[i16], j: usize) -> i64 {
        key[self.vbase(j)] as i64
    }

    pub fn parity(&self, key: &[i16], j: usize) -> Parity {
        Parity::of(key[self.vbase(j) + 1] as i64)
    }

    /// Imbalance of the road part at each bag vertex. Only reads the edge part.
    pub fn road_imbalance(&self, key: &[i16]) -> Vec<i64> {
        let mut imb = vec![0; self.vertices.len()];
        for (i, e) in self.edges.iter().enumerate() {
            let r = key[2 * i + 1] as i64;
            imb[e.a] += r;
            imb[e.b] -= r;
        }
        imb
    }

    pub fn degrees(&self, key: &[i16]) -> Vec<u64> {
        let mut deg = vec![0; self.vertices.len()];
        for (i, e) in self.edges.iter().enumerate() {
            deg[e.a] += key[2 * i] as u64;
            deg[e.b] += key[2 * i] as u64;
        }
        deg
    }

    pub fn weight(&self, key: &[i16]) -> u64 {
        self.edges.iter().enumerate().map(|(i, e)| key[2 * i] as u64 * e.w).sum()
    }

    /// The bag multigraph of a key, on the vertex set of `g`.
    pub fn multigraph(&self, n: usize, key: &[i16]) -> UndirectedMultigraph {
        let mut h = UndirectedMultigraph::new(n);
        for (i, e) in self.edges.iter().enumerate() {
            h.add(self.vertices[e.a], self.vertices[e.b], key[2 * i] as u64);
        }
        h
    }
}

/// Every key allowed by the type bounds at a node with this layout, in
/// canonical order: multiplicities in `[1, max(p,2)]`, net road counts up to
/// the multiplicity, demands in `[-p, p]`, both parities.
pub fn enumerate_bag_states(layout: &BagLayout, p: u64) -> Vec<Key> {
    let p = p as i16;
    let cap = p.max(2);
    let mut edge_states = Vec::new();
    for m in 1..=cap {
        for r in -m..=m {
            edge_states.push([m, r]);
        }
    }
    let vertex_states: Vec<[i16; 2]> = (-p..=p).flat_map(|t| [[t, 0], [t, 1]]).collect();
    let mut sizes = vec![edge_states.len(); layout.edges.len()];
    sizes.extend(std::iter::repeat_n(vertex_states.len(), layout.vertices.len()));
    let e = layout.edges.len();
    index_vectors(&sizes)
        .into_iter()
        .map(|idx| {
            idx.iter()
                .enumerate()
                .flat_map(|(i, &s)| if i < e { edge_states[s] } else { vertex_states[s] })
                .collect()
        })
        .collect()
}

/// Every index vector below `sizes`, last position fastest.
fn index_vectors(sizes: &[usize]) -> Vec<Vec<usize>> {
    let total: usize = sizes.iter().product();
    let mut out = Vec::with_capacity(total);
    if total == 0 {
        return out;
    }
    let mut cur = vec![0; sizes.len()];
    loop {
        out.push(cur.clone());
        let mut i = sizes.len();
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            cur[i] += 1;
            if cur[i] < sizes[i] {
                break;
            }
            cur[i] = 0;
        }
    }
}

/// How an entry was produced, for witness extraction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Back {
    Leaf,
    Child(Key),
    Pair(Key, Key),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Entry {
    pub weight: u64,
    pub back: Back,
}

pub type Table = BTreeMap<Key, Entry>;

/// Weights only, as produced by the single-key evaluators.
pub type WeightTable = BTreeMap<Key, u64>;

/// The edges a leaf adds below its core part.
#[derive(Clone, Debug)]
struct LeafPart {
    edges: Vec<(Vertex, Vertex, u64)>,
    multigraph: UndirectedMultigraph,
    weight: u64,
    degree: Vec<u64>,
    /// Bag vertices outside the core.
    outside: Vec<Vertex>,
}

/// Table DP over one cut decomposition.
#[derive(Clone, Debug)]
pub struct PsiDp<'a> {
    g: &'a MixedGraph,
    t: &'a Demand,
    p: i64,
    cap: i64,
    cut_filter: bool,
    pub cd: CutDecomposition,
    pub layouts: Vec<BagLayout>,
    leaves: Vec<Option<LeafPart>>,
}

impl<'a> PsiDp<'a> {
    pub fn new(g: &'a MixedGraph, t: &'a Demand, cd: CutDecomposition) -> Result<Self> {
        let p = t.p();
        if p > 1000 {
            return Err(Error::TooLarge(format!("total positive demand {p}")));
        }
        let p = p as i64;
        let layouts: Vec<BagLayout> = cd
            .td
            .nodes
            .iter()
            .map(|node| BagLayout::new(g, &node.bag.intersection(&cd.core).copied().collect(), &cd.cut_edges))
            .collect();
        let leaves = cd
            .td
            .nodes
            .iter()
            .zip(&layouts)
            .map(|(node, layout)| {
                (node.kind == NodeKind::Leaf).then(|| {
                    let in_core = |v: &Vertex| layout.position(*v).is_some();
                    let edges: Vec<(Vertex, Vertex, u64)> = g
                        .edges()
                        .iter()
                        .filter(|e| node.bag.contains(&e.u) && node.bag.contains(&e.v))
                        .filter(|e| !(in_core(&e.u) && in_core(&e.v)))
                        .map(|e| (e.u, e.v, e.w))
                        .collect();
                    let multigraph = UndirectedMultigraph::from_edges(g.n(), edges.iter().map(|&(u, v, _)| (u, v, 1)));
                    LeafPart {
                        weight: edges.iter().map(|e| e.2).sum(),
                        degree: multigraph.degrees(),
                        outside: node.bag.iter().copied().filter(|v| !in_core(v)).collect(),
                        edges,
                        multigraph,
                    }
                })
            })
            .collect();
        Ok(PsiDp { g, t, p, cap: p.max(2), cut_filter: true, cd, layouts, leaves })
    }

    /// Lets road counts above one appear on edges outside the cut union too.
    pub fn without_cut_filter(mut self) -> Self {
        self.cut_filter = false;
        self
    }

    fn wanted_parity(&self, v: Vertex) -> i16 {
        self.t.get(v).rem_euclid(2) as i16
    }

    fn in_range(&self, x: i64) -> bool {
        (-self.p..=self.p).contains(&x)
    }

    /// Edge states searched by the table fill. A copy count two above what
    /// the road and parity need can always be dropped without harm, and
    /// roads may be assumed to use edges outside the cut union at most once.
    fn edge_states(&self, e: &BagEdge) -> Vec<[i16; 2]> {
        let cap = self.cap as i16;
        let rmax = if e.in_cut || !self.cut_filter { cap } else { 1 };
        let mut out = Vec::new();
        for r in -rmax..=rmax {
            let base = r.abs().max(1);
            for m in [base, base + 1] {
                if m <= cap {
                    out.push([m, r]);
                }
            }
        }
        out
    }

    /// Whether a key lies in the part of the key space the fill searches.
    pub fn is_searched(&self, x: usize, key: &[i16]) -> bool {
        self.layouts[x].edges.iter().enumerate().all(|(i, e)| self.edge_states(e).contains(&[key[2 * i], key[2 * i + 1]]))
    }

    /// A key whose road part uses an edge outside the cut union more than
    /// once cannot be realised by a well-behaved road.
    fn admissible(&self, x: usize, key: &[i16]) -> bool {
        !self.cut_filter
            || self.layouts[x].edges.iter().enumerate().all(|(i, e)| e.in_cut || key[2 * i + 1].abs() <= 1)
    }

    /// Fills all tables bottom-up.
    pub fn fill(&self) -> Vec<Table> {
        let td = &self.cd.td;
        let mut tables: Vec<Table> = vec![Table::new(); td.nodes.len()];
        for x in td.post_order() {
            let node = &td.nodes[x];
            tables[x] = match node.kind {
                NodeKind::Leaf => self.fill_leaf(x),
                NodeKind::Introduce(v) => self.fill_introduce(x, node.children[0], v, &tables[node.children[0]]),
                NodeKind::Forget(v) => self.fill_forget(x, node.children[0], v, &tables[node.children[0]]),
                NodeKind::Join => self.fill_join(x, &tables[node.children[0]], &tables[node.children[1]]),
            };
        }
        tables
    }

    fn fill_leaf(&self, x: usize) -> Table {
        let layout = &self.layouts[x];
        let part = self.leaves[x].as_ref().expect("leaf part");
        let n = self.g.n();
        let touching: Vec<usize> = (0..layout.vertices.len()).filter(|&j| part.degree[layout.vertices[j]] > 0).collect();

        // Residual demands on the touching core vertices that the leaf edges
        // can route, using each edge at most once.
        let ranges: Vec<Vec<i64>> = touching
            .iter()
            .map(|&j| {
                let d = part.degree[layout.vertices[j]] as i64;
                (-d..=d).collect()
            })
            .collect();
        let mut routable = Vec::new();
        for idx in index_vectors(&ranges.iter().map(|r| r.len()).collect::<Vec<_>>()) {
            let mut demand = vec![0i64; n];
            for &v in &part.outside {
                demand[v] = self.t.get(v);
            }
            let tv: Vec<i64> = idx.iter().zip(&ranges).map(|(&i, r)| r[i]).collect();
            for (&j, &d) in touching.iter().zip(&tv) {
                demand[layout.vertices[j]] = d;
            }
            if has_troad(&part.multigraph, &Demand::new(demand)) {
                routable.push(tv);
            }
        }

        // Cheapest parity fix for every parity pattern on the touching vertices.
        let mut fixes = Vec::new();
        for q in index_vectors(&vec![2; touching.len()]) {
            let mut x_set: Vec<Vertex> =
                part.outside.iter().copied().filter(|&v| part.degree[v] as i64 % 2 != self.wanted_parity(v) as i64).collect();
            for (&j, &qj) in touching.iter().zip(&q) {
                let v = layout.vertices[j];
                if part.degree[v] as usize % 2 != qj {
                    x_set.push(v);
                }
            }
            if let Ok(join) = min_weight_xjoin(n, &part.edges, &x_set) {
                fixes.push((q, join.weight));
            }
        }

        let mut table = Table::new();
        let states: Vec<Vec<[i16; 2]>> = layout.edges.iter().map(|e| self.edge_states(e)).collect();
        let is_touching: Vec<bool> = (0..layout.vertices.len()).map(|j| touching.contains(&j)).collect();
        for idx in index_vectors(&states.iter().map(|s| s.len()).collect::<Vec<_>>()) {
            let mut key: Vec<i16> = idx.iter().zip(&states).flat_map(|(&i, s)| s[i]).collect();
            let imb = layout.road_imbalance(&key);
            let deg = layout.degrees(&key);
            let base_weight = layout.weight(&key) + part.weight;
            if (0..layout.vertices.len()).any(|j| !is_touching[j] && !self.in_range(imb[j])) {
                continue;
            }
            key.resize(layout.key_len(), 0);
            for j in 0..layout.vertices.len() {
                if !is_touching[j] {
                    let b = layout.vbase(j);
                    key[b] = imb[j] as i16;
                    key[b + 1] = (deg[j] % 2) as i16;
                }
            }
            for tv in &routable {
                if touching.iter().zip(tv).any(|(&j, &d)| !self.in_range(d + imb[j])) {
                    continue;
                }
                for (&j, &d) in touching.iter().zip(tv) {
                    key[layout.vbase(j)] = (d + imb[j]) as i16;
                }
                for (q, wj) in &fixes {
                    for (&j, &qj) in touching.iter().zip(q) {
                        key[layout.vbase(j) + 1] = ((qj as u64 + deg[j]) % 2) as i16;
                    }
                    insert_min(&mut table, key.clone().into_boxed_slice(), base_weight + wj, Back::Leaf);
                }
            }
        }
        table
    }

    fn fill_introduce(&self, x: usize, y: usize, v: Vertex, child: &Table) -> Table {
        let (lx, ly) = (&self.layouts[x], &self.layouts[y]);
        let pv = lx.position(v).expect("introduced vertex is in the bag");
        let vert_from_child: Vec<Option<usize>> = lx.vertices.iter().map(|&u| ly.position(u)).collect();
        let edge_from_child: Vec<Option<usize>> = lx
            .edges
            .iter()
            .map(|e| ly.edges.iter().position(|f| f.index == e.index))
            .collect();
        let new_edges: Vec<usize> = (0..lx.edges.len()).filter(|&i| edge_from_child[i].is_none()).collect();
        let states: Vec<Vec<[i16; 2]>> = new_edges.iter().map(|&i| self.edge_states(&lx.edges[i])).collect();

        struct Extension {
            states: Vec<[i16; 2]>,
            dt: Vec<i64>,
            dh: Vec<u64>,
            dw: u64,
        }
        let mut extensions = Vec::new();
        for idx in index_vectors(&states.iter().map(|s| s.len()).collect::<Vec<_>>()) {
            let chosen: Vec<[i16; 2]> = idx.iter().zip(&states).map(|(&i, s)| s[i]).collect();
            let mut dt = vec![0i64; lx.vertices.len()];
            let mut dh = vec![0u64; lx.vertices.len()];
            let mut dw = 0;
            for (&i, s) in new_edges.iter().zip(&chosen) {
                let e = lx.edges[i];
                dt[e.a] += s[1] as i64;
                dt[e.b] -= s[1] as i64;
                dh[e.a] += s[0] as u64;
                dh[e.b] += s[0] as u64;
                dw += s[0] as u64 * e.w;
            }
            if self.in_range(dt[pv]) {
                extensions.push(Extension { states: chosen, dt, dh, dw });
            }
        }

        let mut table = Table::new();
        for (ky, entry) in child {
            'ext: for ext in &extensions {
                let mut key = vec![0i16; lx.key_len()];
                let mut next_new = 0;
                for i in 0..lx.edges.len() {
                    let s = match edge_from_child[i] {
                        Some(c) => [ky[2 * c], ky[2 * c + 1]],
                        None => {
                            next_new += 1;
                            ext.states[next_new - 1]
                        }
                    };
                    key[2 * i] = s[0];
                    key[2 * i + 1] = s[1];
                }
                for (j, from_child) in vert_from_child.iter().enumerate() {
                    let (t0, h0) = match *from_child {
                        Some(c) => (ly.demand(ky, c), ly.parity(ky, c).is_odd() as u64),
                        None => (0, 0),
                    };
                    let tj = t0 + ext.dt[j];
                    if !self.in_range(tj) {
                        continue 'ext;
                    }
                    let b = lx.vbase(j);
                    key[b] = tj as i16;
                    key[b + 1] = ((h0 + ext.dh[j]) % 2) as i16;
                }
                insert_min(&mut table, key.into_boxed_slice(), entry.weight + ext.dw, Back::Child(ky.clone()));
            }
        }
        table
    }

    fn fill_forget(&self, x: usize, y: usize, v: Vertex, child: &Table) -> Table {
        let (lx, ly) = (&self.layouts[x], &self.layouts[y]);
        let pv = ly.position(v).expect("forgotten vertex is in the child bag");
        let keep_edges: Vec<usize> =
            lx.edges.iter().map(|e| ly.edges.iter().position(|f| f.index == e.index).expect("edge kept")).collect();
        let keep_vertices: Vec<usize> = lx.vertices.iter().map(|&u| ly.position(u).expect("vertex kept")).collect();
        let (tv, hv) = (self.t.get(v), self.wanted_parity(v));
        let mut table = Table::new();
        for (ky, entry) in child {
            let b = ly.vbase(pv);
            if ky[b] as i64 != tv || ky[b + 1] != hv {
                continue;
            }
            let mut key = Vec::with_capacity(lx.key_len());
            for &c in &keep_edges {
                key.extend_from_slice(&ky[2 * c..2 * c + 2]);
            }
            for &c in &keep_vertices {
                let b = ly.vbase(c);
                key.extend_from_slice(&ky[b..b + 2]);
            }
            insert_min(&mut table, key.into_boxed_slice(), entry.weight, Back::Child(ky.clone()));
        }
        table
    }

    fn fill_join(&self, x: usize, left: &Table, right: &Table) -> Table {
        let layout = &self.layouts[x];
        let split = 2 * layout.edges.len();
        let group = |t: &'_ Table| {
            let mut out: BTreeMap<Vec<i16>, Vec<(Key, u64)>> = BTreeMap::new();
            for (k, e) in t {
                out.entry(k[..split].to_vec()).or_default().push((k.clone(), e.weight));
            }
            out
        };
        let (gl, gr) = (group(left), group(right));
        let s = layout.vertices.len();
        let mut table = Table::new();
        for (prefix, ls) in &gl {
            let Some(rs) = gr.get(prefix) else { continue };
            let imb = layout.road_imbalance(prefix);
            let deg = layout.degrees(prefix);
            let wh = layout.weight(prefix);
            for (kl, wl) in ls {
                'pair: for (kr, wr) in rs {
                    let mut key = prefix.clone();
                    key.resize(layout.key_len(), 0);
                    for j in 0..s {
                        let tj = layout.demand(kl, j) + layout.demand(kr, j) - imb[j];
                        if !self.in_range(tj) {
                            continue 'pair;
                        }
                        let b = layout.vbase(j);
                        key[b] = tj as i16;
                        key[b + 1] = ((kl[b + 1] as u64 + kr[b + 1] as u64 + deg[j]) % 2) as i16;
                    }
                    insert_min(&mut table, key.into_boxed_slice(), wl + wr - wh, Back::Pair(kl.clone(), kr.clone()));
                }
            }
        }
        table
    }

    /// The key the root must take: actual demands and parities.
    fn root_matches(&self, key: &[i16]) -> bool {
        let x = self.cd.td.root;
        let layout = &self.layouts[x];
        layout.vertices.iter().enumerate().all(|(j, &v)| {
            let b = layout.vbase(j);
            key[b] as i64 == self.t.get(v) && key[b + 1] == self.wanted_parity(v)
        })
    }

    /// Cheapest root entry with the actual demands and parities; the first
    /// in key order on ties.
    pub fn best_root(&self, tables: &[Table]) -> Option<(Key, u64)> {
        let mut best: Option<(Key, u64)> = None;
        for (k, e) in &tables[self.cd.td.root] {
            if self.root_matches(k) && best.as_ref().is_none_or(|b| e.weight < b.1) {
                best = Some((k.clone(), e.weight));
            }
        }
        best
    }

    /// The multigraph behind a table entry, over the subtree of `x`.
    pub fn witness(&self, tables: &[Table], x: usize, key: &[i16]) -> UndirectedMultigraph {
        let mut mult: BTreeMap<usize, u64> = BTreeMap::new();
        let mut extra = UndirectedMultigraph::new(self.g.n());
        let mut stack: Vec<(usize, Key)> = vec![(x, key.into())];
        while let Some((y, k)) = stack.pop() {
            let layout = &self.layouts[y];
            for (i, e) in layout.edges.iter().enumerate() {
                let prev = mult.insert(e.index, k[2 * i] as u64);
                debug_assert!(prev.is_none_or(|m| m == k[2 * i] as u64));
            }
            let entry = &tables[y][&k];
            match &entry.back {
                Back::Leaf => {
                    let part = self.leaves[y].as_ref().expect("leaf part");
                    for &(u, v, _) in &part.edges {
                        mult.insert(self.g.edge_index(u, v).expect("edge"), 1);
                    }
                    let join = self.leaf_join(y, &k).expect("stored leaf entry has a parity fix");
                    extra.merge(&join.edges);
                }
                Back::Child(c) => stack.push((self.cd.td.nodes[y].children[0], c.clone())),
                Back::Pair(l, r) => {
                    let ch = &self.cd.td.nodes[y].children;
                    stack.push((ch[0], l.clone()));
                    stack.push((ch[1], r.clone()));
                }
            }
        }
        let mut h = UndirectedMultigraph::new(self.g.n());
        for (i, m) in mult {
            let e = self.g.edges()[i];
            h.add(e.u, e.v, m);
        }
        h.merge(&extra);
        h
    }

    /// Cheapest extra copies of leaf edges giving the parities a leaf key asks for.
    fn leaf_join(&self, x: usize, key: &[i16]) -> Option<XJoin> {
        let layout = &self.layouts[x];
        let part = self.leaves[x].as_ref().expect("leaf part");
        let deg = layout.degrees(key);
        let mut x_set: Vec<Vertex> =
            part.outside.iter().copied().filter(|&v| part.degree[v] as i64 % 2 != self.wanted_parity(v) as i64).collect();
        for (j, &v) in layout.vertices.iter().enumerate() {
            let want = (layout.parity(key, j).is_odd() as u64 + deg[j]) % 2;
            if part.degree[v] % 2 != want {
                x_set.push(v);
            }
        }
        min_weight_xjoin(self.g.n(), &part.edges, &x_set).ok()
    }

    /// Single-key evaluation at a leaf.
    pub fn psi_leaf(&self, x: usize, key: &[i16]) -> Option<u64> {
        if !self.admissible(x, key) {
            return None;
        }
        let layout = &self.layouts[x];
        let part = self.leaves[x].as_ref().expect("leaf part");
        let imb = layout.road_imbalance(key);
        let mut demand = vec![0i64; self.g.n()];
        for &v in &part.outside {
            demand[v] = self.t.get(v);
        }
        for (j, &v) in layout.vertices.iter().enumerate() {
            demand[v] = layout.demand(key, j) - imb[j];
        }
        if !has_troad(&part.multigraph, &Demand::new(demand)) {
            return None;
        }
        let join = self.leaf_join(x, key)?;
        Some(layout.weight(key) + part.weight + join.weight)
    }

    /// Single-key evaluation at an introduce node from the child's table.
    pub fn psi_introduce(&self, x: usize, key: &[i16], child: &WeightTable) -> Option<u64> {
        if !self.admissible(x, key) {
            return None;
        }
        let NodeKind::Introduce(v) = self.cd.td.nodes[x].kind else { panic!("not an introduce node") };
        let y = self.cd.td.nodes[x].children[0];
        let (lx, ly) = (&self.layouts[x], &self.layouts[y]);
        let pv = lx.position(v)?;
        let imb = lx.road_imbalance(key);
        let deg = lx.degrees(key);
        if lx.demand(key, pv) != imb[pv] || lx.parity(key, pv) != Parity::of(deg[pv] as i64) {
            return None;
        }
        let mut ky = Vec::with_capacity(ly.key_len());
        let mut dw = 0;
        for (i, e) in lx.edges.iter().enumerate() {
            if e.a == pv || e.b == pv {
                dw += key[2 * i] as u64 * e.w;
            } else {
                ky.extend_from_slice(&key[2 * i..2 * i + 2]);
            }
        }
        for (j, _) in lx.vertices.iter().enumerate().filter(|&(j, _)| j != pv) {
            let mut tj = lx.demand(key, j);
            let mut hj = lx.parity(key, j).is_odd() as i64;
            for (i, e) in lx.edges.iter().enumerate() {
                let r = key[2 * i + 1] as i64;
                if e.a == j && e.b == pv {
                    tj -= r;
                    hj += key[2 * i] as i64;
                } else if e.b == j && e.a == pv {
                    tj += r;
                    hj += key[2 * i] as i64;
                }
            }
            if !self.in_range(tj) {
                return None;
            }
            ky.push(tj as i16);
            ky.push((hj % 2) as i16);
        }
        child.get(ky.as_slice()).map(|w| w + dw)
    }

    /// Single-key evaluation at a forget node: best child key agreeing with
    /// `key` that gives the forgotten vertex its actual demand and parity.
    pub fn psi_forget(&self, x: usize, key: &[i16], child: &WeightTable) -> Option<u64> {
        let NodeKind::Forget(v) = self.cd.td.nodes[x].kind else { panic!("not a forget node") };
        let y = self.cd.td.nodes[x].children[0];
        let (lx, ly) = (&self.layouts[x], &self.layouts[y]);
        let pv = ly.position(v)?;
        let cap = self.cap as i16;
        let free: Vec<usize> = (0..ly.edges.len()).filter(|&i| ly.edges[i].a == pv || ly.edges[i].b == pv).collect();
        let mut best: Option<u64> = None;
        let states: Vec<[i16; 2]> = (1..=cap).flat_map(|m| (-m..=m).map(move |r| [m, r])).collect();
        for idx in index_vectors(&vec![states.len(); free.len()]) {
            let mut ky = vec![0i16; ly.key_len()];
            for (i, e) in ly.edges.iter().enumerate() {
                let s = match free.iter().position(|&f| f == i) {
                    Some(slot) => states[idx[slot]],
                    None => {
                        let ix = lx.edges.iter().position(|f| f.index == e.index).expect("edge kept");
                        [key[2 * ix], key[2 * ix + 1]]
                    }
                };
                ky[2 * i] = s[0];
                ky[2 * i + 1] = s[1];
            }
            for (j, &u) in ly.vertices.iter().enumerate() {
                let b = ly.vbase(j);
                if j == pv {
                    ky[b] = self.t.get(v) as i16;
                    ky[b + 1] = self.wanted_parity(v);
                } else {
                    let bx = lx.vbase(lx.position(u).expect("vertex kept"));
                    ky[b] = key[bx];
                    ky[b + 1] = key[bx + 1];
                }
            }
            if let Some(&w) = child.get(ky.as_slice()) {
                best = Some(best.map_or(w, |b| b.min(w)));
            }
        }
        best
    }

    /// Single-key evaluation at a join node: for every split of the demands
    /// and parities the other child's share is forced.
    pub fn psi_join(&self, x: usize, key: &[i16], left: &WeightTable, right: &WeightTable) -> Option<u64> {
        if !self.admissible(x, key) {
            return None;
        }
        let layout = &self.layouts[x];
        let s = layout.vertices.len();
        let imb = layout.road_imbalance(key);
        let deg = layout.degrees(key);
        let wh = layout.weight(key);
        let split = 2 * layout.edges.len();
        let p = self.p;
        let mut best: Option<u64> = None;
        let sizes: Vec<usize> = (0..s).map(|_| 2 * (2 * p as usize + 1)).collect();
        for idx in index_vectors(&sizes) {
            let mut kl = key[..split].to_vec();
            let mut kr = key[..split].to_vec();
            let mut ok = true;
            for (j, &i) in idx.iter().enumerate() {
                let tl = (i / 2) as i64 - p;
                let hl = (i % 2) as u64;
                let tr = layout.demand(key, j) - tl + imb[j];
                if !self.in_range(tr) {
                    ok = false;
                    break;
                }
                let hr = (layout.parity(key, j).is_odd() as u64 + hl + deg[j]) % 2;
                kl.extend([tl as i16, hl as i16]);
                kr.extend([tr as i16, hr as i16]);
            }
            if !ok {
                continue;
            }
            if let (Some(a), Some(b)) = (left.get(kl.as_slice()), right.get(kr.as_slice())) {
                let w = a + b - wh;
                best = Some(best.map_or(w, |c| c.min(w)));
            }
        }
        best
    }

    /// All tables by single-key evaluation over the full key space.
    pub fn fill_by_lookup(&self) -> Vec<WeightTable> {
        let td = &self.cd.td;
        let mut tables: Vec<WeightTable> = vec![WeightTable::new(); td.nodes.len()];
        for x in td.post_order() {
            let node = &td.nodes[x];
            let mut table = WeightTable::new();
            for key in enumerate_bag_states(&self.layouts[x], self.p as u64) {
                let value = match node.kind {
                    NodeKind::Leaf => self.psi_leaf(x, &key),
                    NodeKind::Introduce(_) => self.psi_introduce(x, &key, &tables[node.children[0]]),
                    NodeKind::Forget(_) => self.psi_forget(x, &key, &tables[node.children[0]]),
                    NodeKind::Join => self.psi_join(x, &key, &tables[node.children[0]], &tables[node.children[1]]),
                };
                if let Some(w) = value {
                    table.insert(key, w);
                }
            }
            tables[x] = table;
        }
        tables
    }

    /// Cheapest root value over a weights-only table set.
    pub fn best_root_weight(&self, tables: &[WeightTable]) -> Option<u64> {
        tables[self.cd.td.root].iter().filter(|(k, _)| self.root_matches(k)).map(|(_, &w)| w).min()
    }

    /// Checks the three defining conditions of a table entry directly on a
    /// witness: it agrees with the key on the bag edges, it carries a road
    /// extending the key's road part that meets the key's demands (cut-union
    /// edges aside, each edge used at most once), and its degree parities are
    /// the ones asked for.
    pub fn verify_entry(&self, x: usize, key: &[i16], witness: &UndirectedMultigraph) -> std::result::Result<(), String> {
        let layout = &self.layouts[x];
        let gamma = &self.cd.td.subtree_vertices()[x];
        let mut inside = BTreeSet::new();
        for (i, e) in self.g.edges().iter().enumerate() {
            if gamma.contains(&e.u) && gamma.contains(&e.v) {
                inside.insert(i);
                let m = witness.multiplicity(e.u, e.v);
                if m == 0 || m > self.cap as u64 {
                    return Err(format!("edge {}-{} has multiplicity {m}", e.u, e.v));
                }
            }
        }
        for ((u, v), _) in witness.iter() {
            if !self.g.edge_index(u, v).is_some_and(|i| inside.contains(&i)) {
                return Err(format!("pair {u}-{v} lies outside the subtree graph"));
            }
        }
        for (i, e) in layout.edges.iter().enumerate() {
            let (u, v) = (layout.vertices[e.a], layout.vertices[e.b]);
            if witness.multiplicity(u, v) != key[2 * i] as u64 {
                return Err(format!("bag edge {u}-{v} differs from the key"));
            }
        }
        let imb = layout.road_imbalance(key);
        let mut residual = vec![0i64; self.g.n()];
        let mut parity = vec![Parity::Even; self.g.n()];
        for &v in gamma {
            residual[v] = self.t.get(v);
            parity[v] = Parity::of(self.t.get(v));
        }
        for (j, &v) in layout.vertices.iter().enumerate() {
            residual[v] = layout.demand(key, j) - imb[j];
            parity[v] = layout.parity(key, j);
        }
        let mut rest = UndirectedMultigraph::new(self.g.n());
        for ((u, v), m) in witness.iter() {
            if layout.position(u).is_some() && layout.position(v).is_some() {
                continue;
            }
            let i = self.g.edge_index(u, v).expect("checked above");
            let usable = if self.cd.cut_edges.contains(&i) || !self.cut_filter { m } else { m.min(1) };
            rest.add(u, v, usable);
        }
        if !has_troad(&rest, &Demand::new(residual)) {
            return Err("no road extends the key's road part".into());
        }
        let deg = witness.degrees();
        for &v in gamma {
            if Parity::of(deg[v] as i64) != parity[v] {
                return Err(format!("vertex {v} has the wrong degree parity"));
            }
        }
        Ok(())
    }
}

fn insert_min(table: &mut Table, key: Key, weight: u64, back: Back) {
    match table.get_mut(&key) {
        Some(e) if e.weight <= weight => {}
        Some(e) => *e = Entry { weight, back },
        None => {
            table.insert(key, Entry { weight, back });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::{check_bcpp_solution, solve_ucpp};
    use crate::graph::{is_multi_orientation, is_t_balanced};
    use crate::oracle::oracle_bcpp;
    use proptest::prelude::*;

    fn key(v: &[i16]) -> Key {
        v.to_vec().into_boxed_slice()
    }

    #[test]
    fn orient_examples() {
        let h = UndirectedMultigraph::from_edges(2, [(0, 1, 2)]);
        let road = DirectedMultigraph::from_arcs(2, [(0, 1, 2)]);
        let t = Demand::new(vec![2, -2]);
        assert_eq!(orient(&h, &road, &t).unwrap(), road);

        let tri = UndirectedMultigraph::from_edges(3, [(0, 1, 1), (1, 2, 1), (0, 2, 1)]);
        let d = orient(&tri, &DirectedMultigraph::new(3), &Demand::zero(3)).unwrap();
        assert_eq!(d.arc_count(), 3);
        assert!(d.imbalances().iter().all(|&x| x == 0));

        // A doubled path gives even degrees, so an odd demand at the ends
        // breaks the parity precondition; a third copy of one edge fixes it.
        let road = DirectedMultigraph::from_arcs(3, [(0, 1, 1), (1, 2, 1)]);
        let t = Demand::new(vec![1, 0, -1]);
        let doubled = UndirectedMultigraph::from_edges(3, [(0, 1, 2), (1, 2, 2)]);
        assert_eq!(orient(&doubled, &road, &t).unwrap_err(), Error::Parity(0));
        let path = UndirectedMultigraph::from_edges(3, [(0, 1, 1), (1, 2, 3)]);
        let d = orient(&path, &road, &t).unwrap();
        assert!(is_t_balanced(&d, &t));
        assert_eq!(d.undirected(), path);
    }

    #[test]
    fn orient_rejects_parity() {
        let h = UndirectedMultigraph::from_edges(2, [(0, 1, 1)]);
        let t = Demand::zero(2);
        assert_eq!(orient(&h, &DirectedMultigraph::new(2), &t).unwrap_err(), Error::Parity(0));
    }

    #[test]
    fn state_counts() {
        let g = MixedGraph::undirected(2, [(0, 1, 1)]).unwrap();
        let none = BagLayout::new(&g, &BTreeSet::new(), &BTreeSet::new());
        assert_eq!(enumerate_bag_states(&none, 1), vec![key(&[])]);

        let pair = BagLayout::new(&g, &BTreeSet::from([0, 1]), &BTreeSet::new());
        let states = enumerate_bag_states(&pair, 1);
        // Multiplicity m allows 2m + 1 net road counts; p = 1 allows three
        // demands and two parities per vertex.
        let per_edge: usize = (1..=2).map(|m| 2 * m + 1).sum();
        assert_eq!(states.len(), per_edge * 6 * 6);
        assert!(states.len() <= 3 * 5 * 9 * 4);
        assert!(states.iter().all(|k| k[0] == 1 || k[0] == 2));
        assert!(states.windows(2).all(|w| w[0] < w[1]));

        let apart = MixedGraph::undirected(3, [(0, 2, 1), (1, 2, 1)]).unwrap();
        let no_edge = BagLayout::new(&apart, &BTreeSet::from([0, 1]), &BTreeSet::new());
        assert_eq!(enumerate_bag_states(&no_edge, 1).len(), 36);
    }

    fn edge_instance() -> (MixedGraph, Demand) {
        (MixedGraph::undirected(2, [(0, 1, 1)]).unwrap(), Demand::new(vec![2, -2]))
    }

    #[test]
    fn leaf_inside_core() {
        let (g, t) = edge_instance();
        let cd = build_cut_decomposition(&g, &t).unwrap();
        assert_eq!(cd.td.nodes.len(), 1);
        let dp = PsiDp::new(&g, &t, cd).unwrap();
        assert_eq!(dp.psi_leaf(0, &key(&[2, 2, 2, 0, -2, 0])), Some(2));
        assert_eq!(dp.psi_leaf(0, &key(&[1, 1, 1, 1, -1, 1])), Some(1));
        assert_eq!(dp.psi_leaf(0, &key(&[1, 1, 2, 1, -2, 1])), None);
        let tables = dp.fill();
        assert_eq!(dp.best_root(&tables).map(|b| b.1), Some(2));
    }

    #[test]
    fn leaf_with_even_part_below() {
        // Core {0, 1}; the triangle 1-2-3 hangs below vertex 1.
        let g = MixedGraph::undirected(4, [(0, 1, 1), (1, 2, 1), (2, 3, 1), (1, 3, 1)]).unwrap();
        let t = Demand::new(vec![2, -2, 0, 0]);
        let cd = build_cut_decomposition(&g, &t).unwrap();
        assert_eq!(cd.core, BTreeSet::from([0, 1]));
        let dp = PsiDp::new(&g, &t, cd).unwrap();
        let leaf = (0..dp.cd.td.nodes.len()).find(|&x| dp.cd.td.nodes[x].bag.contains(&3)).unwrap();
        assert_eq!(dp.layouts[leaf].vertices, vec![0, 1]);
        // Residual demand zero below, parities already even: nothing to add.
        assert_eq!(dp.psi_leaf(leaf, &key(&[2, 2, 2, 0, -2, 0])), Some(2 + 3));
        // Asking vertex 1 for an odd degree cannot be met inside the triangle.
        assert_eq!(dp.psi_leaf(leaf, &key(&[2, 2, 2, 0, -2, 1])), None);
        assert_eq!(solve_bcpp(&g, &t).unwrap().weight, oracle_bcpp(&g, &t).unwrap().weight);
    }

    #[test]
    fn leaf_with_path_below() {
        let g = MixedGraph::undirected(4, [(0, 1, 1), (1, 2, 1), (2, 3, 1)]).unwrap();
        let t = Demand::new(vec![2, -2, 0, 0]);
        let dp = PsiDp::new(&g, &t, build_cut_decomposition(&g, &t).unwrap()).unwrap();
        let leaf = (0..dp.cd.td.nodes.len()).find(|&x| dp.cd.td.nodes[x].bag.contains(&3)).unwrap();
        // The pendant path has to be doubled.
        assert_eq!(dp.psi_leaf(leaf, &key(&[2, 2, 2, 0, -2, 0])), Some(6));
        assert_eq!(solve_bcpp(&g, &t).unwrap().weight, 6);
        assert_eq!(oracle_bcpp(&g, &t).unwrap().weight, 6);
    }

    #[test]
    fn introduce_and_forget_rules() {
        let g = MixedGraph::undirected(3, [(0, 1, 1), (1, 2, 1)]).unwrap();
        let t = Demand::new(vec![2, 0, -2]);
        let cd = decompose_around(&g, (0..3).collect(), BTreeSet::from([0, 1]));
        let dp = PsiDp::new(&g, &t, cd).unwrap();
        let lookup = dp.fill_by_lookup();
        for (x, node) in dp.cd.td.nodes.iter().enumerate() {
            if let NodeKind::Introduce(v) = node.kind {
                let layout = &dp.layouts[x];
                let pv = layout.position(v).unwrap();
                for k in enumerate_bag_states(layout, t.p()) {
                    let imb = layout.road_imbalance(&k);
                    if layout.demand(&k, pv) != imb[pv] {
                        assert_eq!(dp.psi_introduce(x, &k, &lookup[node.children[0]]), None);
                    }
                }
            }
        }
        assert_eq!(dp.best_root_weight(&lookup), Some(oracle_bcpp(&g, &t).unwrap().weight));
    }

    #[test]
    fn solve_examples() {
        let path = MixedGraph::undirected(3, [(0, 1, 1), (1, 2, 1)]).unwrap();
        let t = Demand::new(vec![1, 0, -1]);
        let out = solve_bcpp_with(&path, &t, BcppOptions::default()).unwrap();
        assert_eq!(out.path, BcppPath::Fast);
        assert_eq!(out.solution.weight, 2);

        let (g, t) = edge_instance();
        let out = solve_bcpp_with(&g, &t, BcppOptions::default()).unwrap();
        assert_eq!(out.path, BcppPath::Dp);
        assert_eq!(out.solution.weight, 2);
        assert!(check_bcpp_solution(&g, &t, &out.solution).is_ok());

        let tri = MixedGraph::undirected(4, [(0, 1, 2), (1, 2, 1), (0, 2, 3), (2, 3, 1)]).unwrap();
        let zero = Demand::zero(4);
        assert_eq!(solve_bcpp(&tri, &zero).unwrap().weight, solve_ucpp(&tri).unwrap().weight);
        let forced = solve_bcpp_with(&tri, &zero, BcppOptions { force_dp: true }).unwrap();
        assert_eq!(forced.path, BcppPath::Dp);
        assert_eq!(forced.solution.weight, solve_ucpp(&tri).unwrap().weight);
    }

    #[test]
    fn solve_errors() {
        let g = MixedGraph::undirected(3, [(0, 1, 1)]).unwrap();
        assert_eq!(solve_bcpp(&g, &Demand::zero(3)).unwrap_err(), Error::Disconnected);
        let (g, _) = edge_instance();
        assert_eq!(solve_bcpp(&g, &Demand::new(vec![1, 0])).unwrap_err(), Error::DemandSum(1));
        let mixed = MixedGraph::new(2, [], [(0, 1, 1)]).unwrap();
        assert!(matches!(solve_bcpp(&mixed, &Demand::zero(2)), Err(Error::WrongKind { .. })));
    }

    #[test]
    fn two_pendant_components_on_a_cut_pair() {
        // Two identical triangles hang off the cut pair 0-1.
        let g = MixedGraph::undirected(
            4,
            [(0, 1, 1), (0, 2, 1), (1, 2, 1), (0, 3, 1), (1, 3, 1)],
        )
        .unwrap();
        let t = Demand::new(vec![4, -4, 0, 0]);
        let out = solve_bcpp_with(&g, &t, BcppOptions::default()).unwrap();
        assert_eq!(out.path, BcppPath::Dp);
        assert_eq!(out.solution.weight, oracle_bcpp(&g, &t).unwrap().weight);
    }

    pub(crate) fn bcpp_instance() -> impl Strategy<Value = (MixedGraph, Demand)> {
        (2usize..=6).prop_flat_map(|n| {
            let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
            (
                prop::sample::subsequence(pairs.clone(), (n - 1).min(pairs.len())..=pairs.len().min(8)),
                prop::collection::vec(0u64..=3, 8),
                prop::collection::vec(-2i64..=2, n),
            )
                .prop_filter_map("connected, zero-sum", move |(chosen, ws, raw)| {
                    let g = MixedGraph::undirected(n, chosen.iter().zip(&ws).map(|(&(u, v), &w)| (u, v, w))).ok()?;
                    if !g.is_connected() {
                        return None;
                    }
                    let mut t = raw;
                    let s: i64 = t.iter().sum();
                    t[n - 1] -= s;
                    let t = Demand::new(t);
                    (t.p() <= 3).then_some((g, t))
                })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(120))]

        #[test]
        fn matches_oracle((g, t) in bcpp_instance()) {
            let sol = solve_bcpp(&g, &t).unwrap();
            prop_assert!(check_bcpp_solution(&g, &t, &sol).is_ok());
            prop_assert!(is_multi_orientation(&sol.multigraph, &g));
            prop_assert_eq!(sol.weight, oracle_bcpp(&g, &t).unwrap().weight);
        }

        #[test]
        fn forced_dp_agrees((g, t) in bcpp_instance()) {
            let fast = solve_bcpp(&g, &t).unwrap();
            let forced = solve_bcpp_with(&g, &t, BcppOptions { force_dp: true }).unwrap();
            prop_assert_eq!(forced.path, BcppPath::Dp);
            prop_assert_eq!(fast.weight, forced.solution.weight);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn lookup_tables_agree_with_fill((g, t) in bcpp_instance()) {
            prop_assume!(t.p() <= 2 && g.edges().len() <= 6);
            let Some(cd) = build_cut_decomposition(&g, &t) else { return Ok(()) };
            prop_assume!(cd.td.nodes.iter().all(|n| n.bag.len() <= 3));
            let dp = PsiDp::new(&g, &t, cd).unwrap();
            let pushed = dp.fill();
            let pulled = dp.fill_by_lookup();
            for x in 0..pushed.len() {
                for (k, e) in &pushed[x] {
                    prop_assert_eq!(pulled[x].get(k), Some(&e.weight), "node {} key {:?}", x, k);
                }
                for (k, &w) in &pulled[x] {
                    if dp.is_searched(x, k) {
                        prop_assert_eq!(pushed[x].get(k).map(|e| e.weight), Some(w), "node {} key {:?}", x, k);
                    }
                }
            }
            let best = dp.best_root(&pushed).map(|b| b.1);
            prop_assert_eq!(best, dp.best_root_weight(&pulled));
            prop_assert_eq!(best, Some(oracle_bcpp(&g, &t).unwrap().weight));
        }

        #[test]
        fn every_entry_meets_its_conditions((g, t) in bcpp_instance()) {
            prop_assume!(g.edges().len() <= 7);
            let Some(cd) = build_cut_decomposition(&g, &t) else { return Ok(()) };
            let dp = PsiDp::new(&g, &t, cd).unwrap();
            let tables = dp.fill();
            for (x, table) in tables.iter().enumerate() {
                for (k, e) in table {
                    let h = dp.witness(&tables, x, k);
                    prop_assert_eq!(g.undirected_weight(&h).unwrap(), e.weight);
                    let check = dp.verify_entry(x, k, &h);
                    prop_assert!(check.is_ok(), "node {} key {:?}: {:?}", x, k, check);
                }
            }
        }

        #[test]
        fn leaf_edges_avoid_the_cut_union((g, t) in bcpp_instance()) {
            let Some(cd) = build_cut_decomposition(&g, &t) else { return Ok(()) };
            for node in &cd.td.nodes {
                if node.kind != NodeKind::Leaf {
                    continue;
                }
                for (i, e) in g.edges().iter().enumerate() {
                    let in_leaf = node.bag.contains(&e.u) && node.bag.contains(&e.v);
                    let in_core = cd.core.contains(&e.u) && cd.core.contains(&e.v);
                    if in_leaf && !in_core {
                        prop_assert!(!cd.cut_edges.contains(&i));
                    }
                }
            }
        }

        #[test]
        fn cut_filter_does_not_change_the_optimum((g, t) in bcpp_instance()) {
            prop_assume!(g.edges().len() <= 6 && t.p() <= 2);
            let Some(cd) = build_cut_decomposition(&g, &t) else { return Ok(()) };
            let filtered = PsiDp::new(&g, &t, cd.clone()).unwrap();
            let open = PsiDp::new(&g, &t, cd).unwrap().without_cut_filter();
            let a = filtered.best_root(&filtered.fill()).map(|b| b.1);
            let b = open.best_root(&open.fill()).map(|b| b.1);
            prop_assert_eq!(a, b);
        }
    }
}

//! Minimum-weight X-joins: edge sets whose degree parity is odd exactly at X.
//!
//! Vertices of X are paired by a minimum-weight perfect matching on
//! shortest-path distances; the chosen paths are merged by symmetric
//! difference, so every edge appears at most once in the result.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::graph::{MixedGraph, UndirectedMultigraph, Vertex};
use crate::matching::min_weight_perfect_matching;

/// Distances and first hops for every ordered pair.
#[derive(Clone, Debug)]
pub struct ShortestPaths {
    dist: Vec<Vec<Option<u64>>>,
    next: Vec<Vec<usize>>,
}

impl ShortestPaths {
    /// `None` when `v` is unreachable from `u`.
    pub fn dist(&self, u: Vertex, v: Vertex) -> Option<u64> {
        self.dist[u][v]
    }

    /// Vertex sequence of a minimum-weight `u`-`v` path.
    pub fn path(&self, u: Vertex, v: Vertex) -> Option<Vec<Vertex>> {
        self.dist[u][v]?;
        let mut path = vec![u];
        let mut x = u;
        while x != v {
            x = self.next[x][v];
            path.push(x);
        }
        Some(path)
    }
}

/// Floyd-Warshall over an undirected edge list. Parallel pairs keep the cheapest.
pub fn all_pairs_shortest_paths(n: usize, edges: &[(Vertex, Vertex, u64)]) -> ShortestPaths {
    let mut dist = vec![vec![None; n]; n];
    let mut next = vec![vec![usize::MAX; n]; n];
    for v in 0..n {
        dist[v][v] = Some(0);
        next[v][v] = v;
    }
    for &(u, v, w) in edges {
        if u == v {
            continue;
        }
        if dist[u][v].is_none_or(|d| w < d) {
            dist[u][v] = Some(w);
            dist[v][u] = Some(w);
            next[u][v] = v;
            next[v][u] = u;
        }
    }
    for k in 0..n {
        for i in 0..n {
            let Some(dik) = dist[i][k] else { continue };
            for j in 0..n {
                let Some(dkj) = dist[k][j] else { continue };
                if dist[i][j].is_none_or(|d| dik + dkj < d) {
                    dist[i][j] = Some(dik + dkj);
                    next[i][j] = next[i][k];
                }
            }
        }
    }
    ShortestPaths { dist, next }
}

/// An X-join and its weight.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct XJoin {
    pub edges: UndirectedMultigraph,
    pub weight: u64,
}

/// Minimum-weight X-join over an undirected simple edge list on `0..n`.
///
/// Each connected piece of the graph must hold an even number of X-vertices;
/// otherwise [`Error::Disconnected`] (or [`Error::OddJoinSet`] when |X| itself
/// is odd).
pub fn min_weight_xjoin(n: usize, edges: &[(Vertex, Vertex, u64)], x: &[Vertex]) -> Result<XJoin> {
    let mut targets: Vec<Vertex> = x.to_vec();
    targets.sort_unstable();
    targets.dedup();
    if targets.len() % 2 == 1 {
        return Err(Error::OddJoinSet(targets.len()));
    }
    let mut join = UndirectedMultigraph::new(n);
    if targets.is_empty() {
        return Ok(XJoin { edges: join, weight: 0 });
    }
    let sp = all_pairs_shortest_paths(n, edges);
    let weight_of: BTreeMap<(Vertex, Vertex), u64> =
        edges.iter().map(|&(u, v, w)| ((u.min(v), u.max(v)), w)).collect();

    // Split X by connected piece so each matching stays small.
    let mut groups: Vec<Vec<Vertex>> = Vec::new();
    for &v in &targets {
        match groups.iter_mut().find(|g| sp.dist(g[0], v).is_some()) {
            Some(g) => g.push(v),
            None => groups.push(vec![v]),
        }
    }
    let mut used: BTreeMap<(Vertex, Vertex), bool> = BTreeMap::new();
    for group in &groups {
        if group.len() % 2 == 1 {
            return Err(Error::Disconnected);
        }
        let (pairs, _) = min_weight_perfect_matching(group.len(), |i, j| sp.dist(group[i], group[j]))?
            .ok_or(Error::Disconnected)?;
        for (i, j) in pairs {
            let path = sp.path(group[i], group[j]).expect("matched pair is connected");
            for step in path.windows(2) {
                let key = (step[0].min(step[1]), step[0].max(step[1]));
                let flag = used.entry(key).or_insert(false);
                *flag = !*flag;
            }
        }
    }
    let mut weight = 0;
    for ((u, v), on) in used {
        if on {
            join.add(u, v, 1);
            weight += weight_of[&(u, v)];
        }
    }
    Ok(XJoin { edges: join, weight })
}

/// X-join on the edges of a mixed graph (arcs ignored).
pub fn min_weight_xjoin_in(g: &MixedGraph, x: &[Vertex]) -> Result<XJoin> {
    let edges: Vec<_> = g.edges().iter().map(|e| (e.u, e.v, e.w)).collect();
    min_weight_xjoin(g.n(), &edges, x)
}

/// Vertices of odd degree in a multigraph.
pub fn odd_vertices(h: &UndirectedMultigraph) -> Vec<Vertex> {
    h.degrees()
        .iter()
        .enumerate()
        .filter(|&(_, &d)| d % 2 == 1)
        .map(|(v, _)| v)
        .collect()
}

//! Exhaustive reference solvers for tiny instances.
//!
//! Every edge is described by its net flow `d = mu(u->v) - mu(v->u)`; for a
//! fixed net value the cheapest realisation uses `|d|` copies (or one copy each
//! way when `d = 0`), which never costs more weight or more arcs than any other
//! realisation. Arcs take a traversal count directly. Links are assigned in an
//! order that closes vertices early, so the last link at a vertex is forced,
//! and branch-and-bound on `(weight, arc count)` cuts the rest.

use crate::classical::CppSolution;
use crate::error::{Error, Result};
use crate::graph::{is_strongly_connected, Demand, DirectedMultigraph, MixedGraph};
use crate::karc::kappa;

/// Largest vertex count either oracle accepts.
pub const MAX_VERTICES: usize = 7;
/// Largest link count either oracle accepts.
pub const MAX_LINKS: usize = 9;
/// Largest total positive demand the balanced oracle accepts.
pub const MAX_DEMAND: u64 = 4;

/// Per-link traversal caps searched by the oracles.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleLimits {
    /// Maximum traversals of a single arc.
    pub arc_max: u64,
    /// Maximum total traversals (both directions) of a single edge.
    pub edge_max: u64,
}

impl OracleLimits {
    /// Arcs in `[1, 2k]`, edges in `[1, max(kappa(k), 2)]`.
    pub fn mcpp(k: usize) -> Self {
        let k = k as u64;
        OracleLimits { arc_max: (2 * k).max(1), edge_max: kappa(k).max(2) }
    }

    /// Edges in `[1, max(p, 2)]`.
    pub fn bcpp(p: u64) -> Self {
        OracleLimits { arc_max: 1, edge_max: p.max(2) }
    }
}

/// Exact MCPP optimum by exhaustive search with the default limits.
pub fn oracle_mcpp(g: &MixedGraph) -> Result<CppSolution> {
    oracle_mcpp_with(g, OracleLimits::mcpp(g.arcs().len()))
}

/// Exact MCPP optimum within `limits`. Among optimal multigraphs the one
/// with the fewest arc copies is returned.
pub fn oracle_mcpp_with(g: &MixedGraph, limits: OracleLimits) -> Result<CppSolution> {
    let links = g.edges().len() + g.arcs().len();
    if g.n() > MAX_VERTICES || links > MAX_LINKS {
        return Err(Error::TooLarge(format!(
            "mixed oracle handles at most {MAX_VERTICES} vertices and {MAX_LINKS} links, got {} and {links}",
            g.n()
        )));
    }
    if !is_strongly_connected(g) {
        return Err(Error::NotStronglyConnected);
    }
    search(g, &vec![0; g.n()], limits).ok_or(Error::Infeasible)
}

/// Exact BCPP optimum (edges only) by exhaustive search with the default limits.
pub fn oracle_bcpp(g: &MixedGraph, t: &Demand) -> Result<CppSolution> {
    oracle_bcpp_with(g, t, OracleLimits::bcpp(t.p()))
}

pub fn oracle_bcpp_with(g: &MixedGraph, t: &Demand, limits: OracleLimits) -> Result<CppSolution> {
    if !g.arcs().is_empty() {
        return Err(Error::WrongKind { expected: "undirected graph", got: "mixed graph" });
    }
    if t.sum() != 0 {
        return Err(Error::DemandSum(t.sum()));
    }
    if g.n() > MAX_VERTICES || g.edges().len() > MAX_LINKS || t.p() > MAX_DEMAND {
        return Err(Error::TooLarge(format!(
            "balanced oracle handles n <= {MAX_VERTICES}, |E| <= {MAX_LINKS}, p <= {MAX_DEMAND}; got {}, {}, {}",
            g.n(),
            g.edges().len(),
            t.p()
        )));
    }
    search(g, t.as_slice(), limits).ok_or(Error::Infeasible)
}

#[derive(Clone, Copy, Debug)]
struct Var {
    u: usize,
    v: usize,
    w: u64,
    arc: bool,
}

impl Var {
    fn copies(&self, value: i64) -> u64 {
        if !self.arc && value == 0 {
            2
        } else {
            value.unsigned_abs()
        }
    }
}

struct Search<'a> {
    vars: Vec<Var>,
    target: &'a [i64],
    limits: OracleLimits,
    // Range of total contribution still available to each vertex from vars[i..].
    rem_lo: Vec<Vec<i64>>,
    rem_hi: Vec<Vec<i64>>,
    min_weight: Vec<u64>,
    // Fewest arc copies and edge copies still to come.
    min_copies: Vec<(u64, u64)>,
    balance: Vec<i64>,
    values: Vec<i64>,
    best: Option<(u64, (u64, u64), Vec<i64>)>,
}

fn search(g: &MixedGraph, target: &[i64], limits: OracleLimits) -> Option<CppSolution> {
    let mut all: Vec<Var> = g.edges().iter().map(|e| Var { u: e.u, v: e.v, w: e.w, arc: false }).collect();
    all.extend(g.arcs().iter().map(|a| Var { u: a.u, v: a.v, w: a.w, arc: true }));
    let n = g.n();
    let mut deg = vec![0usize; n];
    for x in &all {
        deg[x.u] += 1;
        deg[x.v] += 1;
    }
    if (0..n).any(|v| deg[v] == 0 && target[v] != 0) {
        return None;
    }

    // Close the vertex with the fewest open links, preferring ones already touched.
    let mut order = Vec::with_capacity(all.len());
    let mut taken = vec![false; all.len()];
    let mut open = deg.clone();
    let mut touched = vec![false; n];
    while order.len() < all.len() {
        let v = (0..n)
            .filter(|&v| open[v] > 0)
            .min_by_key(|&v| (!touched[v], open[v], v))
            .expect("open links remain");
        for (i, x) in all.iter().enumerate() {
            if !taken[i] && (x.u == v || x.v == v) {
                taken[i] = true;
                order.push(*x);
                open[x.u] -= 1;
                open[x.v] -= 1;
                touched[x.u] = true;
                touched[x.v] = true;
            }
        }
    }

    let m = order.len();
    let mut rem_lo = vec![vec![0i64; n]; m + 1];
    let mut rem_hi = vec![vec![0i64; n]; m + 1];
    let mut min_weight = vec![0u64; m + 1];
    let mut min_copies = vec![(0u64, 0u64); m + 1];
    for i in (0..m).rev() {
        let x = order[i];
        let (lo, hi) = if x.arc {
            (1, limits.arc_max as i64)
        } else {
            (-(limits.edge_max as i64), limits.edge_max as i64)
        };
        rem_lo[i] = rem_lo[i + 1].clone();
        rem_hi[i] = rem_hi[i + 1].clone();
        rem_lo[i][x.u] += lo;
        rem_hi[i][x.u] += hi;
        rem_lo[i][x.v] -= hi;
        rem_hi[i][x.v] -= lo;
        min_weight[i] = min_weight[i + 1] + x.w;
        let (ca, ce) = min_copies[i + 1];
        min_copies[i] = if x.arc { (ca + 1, ce) } else { (ca, ce + 1) };
    }
    let mut s = Search {
        vars: order,
        target,
        limits,
        rem_lo,
        rem_hi,
        min_weight,
        min_copies,
        balance: vec![0; n],
        values: Vec::with_capacity(m),
        best: None,
    };
    s.dfs(0, 0, (0, 0));
    let (weight, _, values) = s.best?;
    let mut d = DirectedMultigraph::new(n);
    for (x, &val) in s.vars.iter().zip(&values) {
        if x.arc || val > 0 {
            d.add(x.u, x.v, val as u64);
        } else if val < 0 {
            d.add(x.v, x.u, (-val) as u64);
        } else {
            d.add(x.u, x.v, 1);
            d.add(x.v, x.u, 1);
        }
    }
    Some(CppSolution { weight, multigraph: d, walk: None })
}

impl Search<'_> {
    /// `copies` is (arc copies, edge copies) so far; ties on weight go to
    /// fewer arc copies, then fewer edge copies.
    fn dfs(&mut self, i: usize, weight: u64, copies: (u64, u64)) {
        if let Some((bw, bc, _)) = &self.best {
            let (ra, re) = self.min_copies[i];
            if (weight + self.min_weight[i], (copies.0 + ra, copies.1 + re)) >= (*bw, *bc) {
                return;
            }
        }
        if i == self.vars.len() {
            self.best = Some((weight, copies, self.values.clone()));
            return;
        }
        let x = self.vars[i];
        let (mut lo, mut hi) = if x.arc {
            (1, self.limits.arc_max as i64)
        } else {
            (-(self.limits.edge_max as i64), self.limits.edge_max as i64)
        };
        // Value d adds d to u and subtracts d from v; what remains must stay reachable.
        let need_u = self.target[x.u] - self.balance[x.u];
        lo = lo.max(need_u - self.rem_hi[i + 1][x.u]);
        hi = hi.min(need_u - self.rem_lo[i + 1][x.u]);
        let need_v = self.target[x.v] - self.balance[x.v];
        lo = lo.max(self.rem_lo[i + 1][x.v] - need_v);
        hi = hi.min(self.rem_hi[i + 1][x.v] - need_v);
        if lo > hi {
            return;
        }
        // Cheapest magnitudes first so good bounds appear early.
        let mut candidates: Vec<i64> = (lo..=hi).collect();
        candidates.sort_by_key(|&d| (x.copies(d), d < 0));
        for d in candidates {
            let c = x.copies(d);
            self.balance[x.u] += d;
            self.balance[x.v] -= d;
            self.values.push(d);
            let next = if x.arc { (copies.0 + c, copies.1) } else { (copies.0, copies.1 + c) };
            self.dfs(i + 1, weight + c * x.w, next);
            self.values.pop();
            self.balance[x.u] -= d;
            self.balance[x.v] += d;
        }
    }
}

//! Seeded random instances.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{is_strongly_connected, Demand, MixedGraph, Vertex};

/// A random connected simple graph on `n` vertices with `links` vertex pairs:
/// a random spanning tree plus random extra pairs.
fn random_pairs(rng: &mut ChaCha8Rng, n: usize, links: usize) -> Result<Vec<(Vertex, Vertex)>> {
    let max = n * n.saturating_sub(1) / 2;
    if n == 0 || links < n - 1 || links > max {
        return Err(Error::InvalidParameter(format!(
            "{links} links cannot form a connected simple graph on {n} vertices"
        )));
    }
    let mut perm: Vec<Vertex> = (0..n).collect();
    perm.shuffle(rng);
    let mut pairs: Vec<(Vertex, Vertex)> = (1..n)
        .map(|i| {
            let j = rng.random_range(0..i);
            (perm[i].min(perm[j]), perm[i].max(perm[j]))
        })
        .collect();
    let mut rest: Vec<(Vertex, Vertex)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .filter(|p| !pairs.contains(p))
        .collect();
    rest.shuffle(rng);
    pairs.extend(rest.into_iter().take(links - (n - 1)));
    Ok(pairs)
}

/// Attempts at placing the arcs before falling back to turning arcs into edges.
const ARC_ATTEMPTS: usize = 64;

/// A strongly connected mixed graph with `edges` edges and up to `arcs` arcs,
/// weights uniform in `[0, max_weight]`. Arc positions and directions are
/// redrawn until the graph is strongly connected; if that keeps failing,
/// arcs between different strong components are turned into edges one at a
/// time, which always ends because the underlying graph is connected.
pub fn gen_mcpp(n: usize, edges: usize, arcs: usize, max_weight: u64, seed: u64) -> Result<MixedGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs = random_pairs(&mut rng, n, edges + arcs)?;
    let weights: Vec<u64> = pairs.iter().map(|_| rng.random_range(0..=max_weight)).collect();
    let build = |is_arc: &[Option<bool>]| {
        let mut es = Vec::new();
        let mut az = Vec::new();
        for ((&(u, v), &w), a) in pairs.iter().zip(&weights).zip(is_arc) {
            match a {
                None => es.push((u, v, w)),
                Some(true) => az.push((u, v, w)),
                Some(false) => az.push((v, u, w)),
            }
        }
        MixedGraph::new(n, es, az).expect("distinct pairs")
    };
    let mut is_arc = vec![None; pairs.len()];
    for _ in 0..ARC_ATTEMPTS {
        let mut idx: Vec<usize> = (0..pairs.len()).collect();
        idx.shuffle(&mut rng);
        is_arc = vec![None; pairs.len()];
        for &i in idx.iter().take(arcs) {
            is_arc[i] = Some(rng.random_bool(0.5));
        }
        let g = build(&is_arc);
        if is_strongly_connected(&g) {
            return Ok(g);
        }
    }
    loop {
        let g = build(&is_arc);
        if is_strongly_connected(&g) {
            return Ok(g);
        }
        let comp = strong_components(&g);
        let i = (0..pairs.len())
            .find(|&i| is_arc[i].is_some() && comp[pairs[i].0] != comp[pairs[i].1])
            .expect("a graph with connected underlying graph that is not strongly connected has a crossing arc");
        is_arc[i] = None;
    }
}

/// Strong component id per vertex.
fn strong_components(g: &MixedGraph) -> Vec<usize> {
    let n = g.n();
    let mut out = vec![Vec::new(); n];
    for e in g.edges() {
        out[e.u].push(e.v);
        out[e.v].push(e.u);
    }
    for a in g.arcs() {
        out[a.u].push(a.v);
    }
    let reach = |s: Vertex| {
        let mut seen = vec![false; n];
        let mut stack = vec![s];
        seen[s] = true;
        while let Some(x) = stack.pop() {
            for &y in &out[x] {
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        seen
    };
    let reach_from: Vec<Vec<bool>> = (0..n).map(reach).collect();
    (0..n).map(|v| (0..n).find(|&u| reach_from[u][v] && reach_from[v][u]).expect("v reaches itself")).collect()
}

/// A connected undirected graph with demands: `p` unit demands, each from a
/// random vertex to a different random vertex (some may cancel).
pub fn gen_bcpp(n: usize, edges: usize, p: u64, max_weight: u64, seed: u64) -> Result<(MixedGraph, Demand)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs = random_pairs(&mut rng, n, edges)?;
    let g = MixedGraph::undirected(n, pairs.iter().map(|&(u, v)| (u, v, rng.random_range(0..=max_weight))))?;
    let mut t = vec![0i64; n];
    if p > 0 && n < 2 {
        return Err(Error::InvalidParameter("demands need at least two vertices".into()));
    }
    for _ in 0..p {
        let s = rng.random_range(0..n);
        let d = (s + rng.random_range(1..n)) % n;
        t[s] += 1;
        t[d] -= 1;
    }
    Ok((g, Demand::new(t)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic() {
        assert_eq!(gen_mcpp(6, 5, 3, 4, 42).unwrap(), gen_mcpp(6, 5, 3, 4, 42).unwrap());
        assert_eq!(gen_bcpp(6, 8, 3, 4, 42).unwrap(), gen_bcpp(6, 8, 3, 4, 42).unwrap());
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(matches!(gen_mcpp(4, 1, 1, 3, 0), Err(Error::InvalidParameter(_))));
        assert!(matches!(gen_bcpp(3, 4, 1, 3, 0), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn a_tree_of_arcs_is_repaired() {
        // Three links and three arcs: no placement is strongly connected, so
        // arcs get turned into edges.
        let g = gen_mcpp(4, 0, 3, 2, 7).unwrap();
        assert!(is_strongly_connected(&g));
        assert_eq!(g.edges().len() + g.arcs().len(), 3);
        assert!(g.arcs().is_empty());
    }

    #[test]
    fn outputs_are_valid() {
        for seed in 0..200 {
            let g = gen_mcpp(6, 5, 3, 3, seed).unwrap();
            assert!(is_strongly_connected(&g));
            assert_eq!(g.edges().len() + g.arcs().len(), 8);
            assert!(g.arcs().len() <= 3);
            assert!(g.edges().iter().chain(g.arcs()).all(|l| l.w <= 3));
            let (h, t) = gen_bcpp(7, 9, 4, 4, seed).unwrap();
            assert!(h.is_connected());
            assert_eq!(h.edges().len(), 9);
            assert_eq!(t.sum(), 0);
            assert!(t.p() <= 4);
        }
    }
}

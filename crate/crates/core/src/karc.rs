//! Mixed graphs with few arcs: guess how often each arc is traversed, turn
//! the guess into vertex demands on the undirected part, solve that balanced
//! problem and put the arcs back.

use std::collections::BTreeMap;

use crate::classical::{solve_ucpp, CppSolution};
use crate::dp::solve_bcpp;
use crate::error::{Error, Result};
use crate::graph::{is_strongly_connected, Demand, DirectedMultigraph, MixedGraph, Vertex};

/// Upper bound on the total arc traversals of an optimal solution that uses
/// as few arc traversals as possible, for `k` arcs.
pub fn kappa(k: u64) -> u64 {
    k * k / 2 + 2 * k
}

/// Binomial coefficient, saturating on overflow.
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

/// All traversal guesses for `k` arcs: every entry at least 1, total at most
/// `kap`, in lexicographic order. There are `binomial(kap, k)` of them; none
/// when `kap < k`.
pub fn enumerate_phi(k: usize, kap: u64) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    if kap < k as u64 {
        return out;
    }
    let mut cur = Vec::with_capacity(k);
    fn go(k: usize, left: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        let reserve = (k - cur.len() - 1) as u64;
        for x in 1..=left - reserve {
            cur.push(x);
            go(k, left - x, cur, out);
            cur.pop();
        }
    }
    go(k, kap, &mut cur, &mut out);
    out
}

/// The balanced instance for one guess: the undirected part of `g` and the
/// demand each vertex must meet so that adding the guessed arc copies
/// balances it (arc copies in minus arc copies out).
pub fn reduce_to_bcpp(g: &MixedGraph, phi: &[u64]) -> Result<(MixedGraph, Demand)> {
    let edges = MixedGraph::undirected(g.n(), g.edges().iter().map(|e| (e.u, e.v, e.w)))?;
    let mut t = vec![0i64; g.n()];
    for (a, &c) in g.arcs().iter().zip(phi) {
        t[a.v] += c as i64;
        t[a.u] -= c as i64;
    }
    Ok((edges, Demand::new(t)))
}

/// Adds the guessed copies of each arc to a solution of the balanced instance.
pub fn combine_solution(g: &MixedGraph, d_phi: &DirectedMultigraph, phi: &[u64]) -> DirectedMultigraph {
    let mut d = d_phi.clone();
    for (a, &c) in g.arcs().iter().zip(phi) {
        d.add(a.u, a.v, c);
    }
    d
}

/// Weight of the guessed arc copies.
pub fn guess_weight(g: &MixedGraph, phi: &[u64]) -> u64 {
    g.arcs().iter().zip(phi).map(|(a, &c)| a.w * c).sum()
}

/// Cheapest multi-orientation of the edges meeting `t`, solved per connected
/// piece of the undirected part. `None` when some piece has a nonzero demand
/// total, or an edgeless vertex has a nonzero demand.
pub fn solve_edge_part(edges: &MixedGraph, t: &Demand) -> Result<Option<(u64, DirectedMultigraph)>> {
    let n = edges.n();
    let mut comp = vec![usize::MAX; n];
    let adj = edges.neighbours();
    let mut pieces: Vec<Vec<Vertex>> = Vec::new();
    for s in 0..n {
        if comp[s] != usize::MAX {
            continue;
        }
        comp[s] = pieces.len();
        let mut piece = vec![s];
        let mut i = 0;
        while i < piece.len() {
            for &y in &adj[piece[i]] {
                if comp[y] == usize::MAX {
                    comp[y] = pieces.len();
                    piece.push(y);
                }
            }
            i += 1;
        }
        piece.sort_unstable();
        pieces.push(piece);
    }
    let mut total = 0;
    let mut d = DirectedMultigraph::new(n);
    for piece in &pieces {
        if piece.iter().map(|&v| t.get(v)).sum::<i64>() != 0 {
            return Ok(None);
        }
        if piece.len() == 1 {
            continue;
        }
        let local: BTreeMap<Vertex, usize> = piece.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let sub = MixedGraph::undirected(
            piece.len(),
            edges.edges().iter().filter(|e| comp[e.u] == comp[piece[0]]).map(|e| (local[&e.u], local[&e.v], e.w)),
        )?;
        let sub_t = Demand::new(piece.iter().map(|&v| t.get(v)).collect());
        let sol = solve_bcpp(&sub, &sub_t)?;
        total += sol.weight;
        for ((u, v), c) in sol.multigraph.iter() {
            d.add(piece[u], piece[v], c);
        }
    }
    Ok(Some((total, d)))
}

/// Exact MCPP: the best over all traversal guesses of the guessed arc weight
/// plus the balanced optimum on the edges. Guesses whose arc weight alone
/// reaches the best total so far are skipped, and guesses giving the same
/// demands share one balanced solve.
pub fn solve_karc(g: &MixedGraph) -> Result<CppSolution> {
    if !is_strongly_connected(g) {
        return Err(Error::NotStronglyConnected);
    }
    let k = g.arcs().len();
    if k == 0 {
        return solve_ucpp(g);
    }
    let mut best: Option<(u64, DirectedMultigraph)> = None;
    let mut solved: BTreeMap<Vec<i64>, Option<(u64, DirectedMultigraph)>> = BTreeMap::new();
    for phi in enumerate_phi(k, kappa(k as u64)) {
        let arc_weight = guess_weight(g, &phi);
        if best.as_ref().is_some_and(|b| arc_weight >= b.0) {
            continue;
        }
        let (edges, t) = reduce_to_bcpp(g, &phi)?;
        let part = match solved.get(t.as_slice()) {
            Some(p) => p.clone(),
            None => {
                let p = solve_edge_part(&edges, &t)?;
                solved.insert(t.as_slice().to_vec(), p.clone());
                p
            }
        };
        let Some((w, d_phi)) = part else { continue };
        if best.as_ref().is_none_or(|b| arc_weight + w < b.0) {
            best = Some((arc_weight + w, combine_solution(g, &d_phi, &phi)));
        }
    }
    let (_, d) = best.ok_or(Error::Infeasible)?;
    CppSolution::new(g, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::{check_mcpp_solution, solve_mcpp_edges};
    use crate::graph::{is_eulerian, is_multi_orientation};
    use crate::oracle::oracle_mcpp;
    use proptest::prelude::*;

    fn triangle() -> MixedGraph {
        MixedGraph::new(3, [(0, 1, 1), (1, 2, 1)], [(2, 0, 1)]).unwrap()
    }

    #[test]
    fn kappa_values() {
        assert_eq!(kappa(0), 0);
        assert_eq!(kappa(1), 2);
        assert_eq!(kappa(2), 6);
        assert_eq!(kappa(3), 10);
    }

    #[test]
    fn guess_counts() {
        assert_eq!(enumerate_phi(1, 2), vec![vec![1], vec![2]]);
        assert_eq!(enumerate_phi(2, 6).len(), 15);
        assert_eq!(enumerate_phi(2, 2), vec![vec![1, 1]]);
        assert!(enumerate_phi(3, 2).is_empty());
        for k in 0..=4usize {
            let kap = kappa(k as u64);
            let all = enumerate_phi(k, kap);
            assert_eq!(all.len() as u64, binomial(kap, k as u64));
            assert!(all.windows(2).all(|w| w[0] < w[1]));
            assert!(all.iter().all(|p| p.iter().all(|&x| x >= 1) && p.iter().sum::<u64>() <= kap));
        }
    }

    #[test]
    fn reduction_examples() {
        let g = triangle();
        let (e, t) = reduce_to_bcpp(&g, &[1]).unwrap();
        assert!(e.arcs().is_empty());
        assert_eq!(t.as_slice(), &[1, 0, -1]);
        assert_eq!(reduce_to_bcpp(&g, &[2]).unwrap().1.as_slice(), &[2, 0, -2]);
        let two_way = MixedGraph::new(3, [(0, 2, 1), (1, 2, 1)], [(0, 1, 1)]).unwrap();
        let back = MixedGraph::new(2, [], [(0, 1, 1)]).unwrap();
        assert!(reduce_to_bcpp(&back, &[3]).unwrap().1.sum() == 0);
        assert_eq!(reduce_to_bcpp(&two_way, &[1]).unwrap().1.as_slice(), &[-1, 1, 0]);
    }

    #[test]
    fn combination_examples() {
        let g = triangle();
        let d_phi = DirectedMultigraph::from_arcs(3, [(0, 1, 1), (1, 2, 1)]);
        let d = combine_solution(&g, &d_phi, &[1]);
        assert!(is_eulerian(&d));
        assert!(is_multi_orientation(&d, &g));

        let cycle = MixedGraph::new(3, [], [(0, 1, 1), (1, 2, 1), (2, 0, 1)]).unwrap();
        let d = combine_solution(&cycle, &DirectedMultigraph::new(3), &[1, 1, 1]);
        assert_eq!(d, DirectedMultigraph::from_arcs(3, [(0, 1, 1), (1, 2, 1), (2, 0, 1)]));
    }

    #[test]
    fn solve_examples() {
        let sol = solve_karc(&triangle()).unwrap();
        assert_eq!(sol.weight, 3);
        assert!(check_mcpp_solution(&triangle(), &sol).is_ok());

        let und = MixedGraph::undirected(3, [(0, 1, 2), (1, 2, 3)]).unwrap();
        assert_eq!(solve_karc(&und).unwrap(), solve_ucpp(&und).unwrap());

        let one_way = MixedGraph::new(2, [], [(0, 1, 1)]).unwrap();
        assert_eq!(solve_karc(&one_way).unwrap_err(), Error::NotStronglyConnected);
    }

    #[test]
    fn disconnected_edge_part() {
        // Arcs 0->2 and 2->0 are not both allowed, so route back through 1.
        let g = MixedGraph::new(4, [(0, 1, 1), (2, 3, 1)], [(1, 2, 2), (3, 0, 2)]).unwrap();
        let sol = solve_karc(&g).unwrap();
        assert_eq!(sol.weight, oracle_mcpp(&g).unwrap().weight);
        assert!(check_mcpp_solution(&g, &sol).is_ok());
    }

    pub(crate) fn mcpp_instance() -> impl Strategy<Value = MixedGraph> {
        (2usize..=5).prop_flat_map(|n| {
            let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
            let m = pairs.len();
            (
                prop::sample::subsequence(pairs, (n - 1).min(m)..=m.min(8)),
                prop::collection::vec((0u64..=3, 0u8..3), 8),
            )
                .prop_filter_map("strongly connected, few arcs", move |(chosen, attrs)| {
                    let mut edges = Vec::new();
                    let mut arcs = Vec::new();
                    for (&(u, v), &(w, kind)) in chosen.iter().zip(&attrs) {
                        match kind {
                            0 if arcs.len() < 3 => arcs.push((u, v, w)),
                            1 if arcs.len() < 3 => arcs.push((v, u, w)),
                            _ => edges.push((u, v, w)),
                        }
                    }
                    let g = MixedGraph::new(n, edges, arcs).ok()?;
                    is_strongly_connected(&g).then_some(g)
                })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(80))]

        #[test]
        fn matches_oracle(g in mcpp_instance()) {
            let sol = solve_karc(&g).unwrap();
            prop_assert!(check_mcpp_solution(&g, &sol).is_ok());
            prop_assert_eq!(sol.weight, oracle_mcpp(&g).unwrap().weight);
            prop_assert_eq!(sol.weight, solve_mcpp_edges(&g).unwrap().weight);
        }

        #[test]
        fn every_guess_bounds_the_optimum(g in mcpp_instance()) {
            prop_assume!(!g.arcs().is_empty());
            let opt = oracle_mcpp(&g).unwrap().weight;
            let k = g.arcs().len();
            let mut hit = false;
            for phi in enumerate_phi(k, kappa(k as u64)) {
                let (edges, t) = reduce_to_bcpp(&g, &phi).unwrap();
                if let Some((w, d)) = solve_edge_part(&edges, &t).unwrap() {
                    let total = w + guess_weight(&g, &phi);
                    prop_assert!(total >= opt);
                    hit |= total == opt;
                    let full = combine_solution(&g, &d, &phi);
                    prop_assert!(is_multi_orientation(&full, &g));
                    prop_assert!(full.imbalances().iter().all(|&x| x == 0));
                }
            }
            prop_assert!(hit);
        }
    }
}

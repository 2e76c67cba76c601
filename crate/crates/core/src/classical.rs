//! Polynomial solvers for the pure undirected and directed cases, and the
//! algorithm that is exponential only in the number of edges.

use crate::error::{Error, Result};
use crate::flow::{min_cost_circulation, FlowNetwork};
use crate::graph::{
    eulerian_circuit, is_eulerian, is_multi_orientation, is_strongly_connected, is_t_balanced, orient_even,
    ClosedWalk, Demand, DirectedMultigraph, MixedGraph,
};
use crate::join::{min_weight_xjoin_in, odd_vertices};

/// A solution: traversal counts per direction, their total weight and,
/// when requested, a closed walk realising them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CppSolution {
    pub weight: u64,
    pub multigraph: DirectedMultigraph,
    pub walk: Option<ClosedWalk>,
}

impl CppSolution {
    pub fn new(g: &MixedGraph, multigraph: DirectedMultigraph) -> Result<Self> {
        let weight = g.directed_weight(&multigraph)?;
        Ok(CppSolution { weight, multigraph, walk: None })
    }

    /// Attaches an Euler circuit of the multigraph.
    pub fn with_walk(mut self) -> Result<Self> {
        self.walk = Some(eulerian_circuit(&self.multigraph)?);
        Ok(self)
    }
}

/// Checks a mixed-graph solution: covers every link legally, is Eulerian,
/// the stated weight is right and any walk replays to the multigraph.
pub fn check_mcpp_solution(g: &MixedGraph, sol: &CppSolution) -> std::result::Result<(), String> {
    if !is_multi_orientation(&sol.multigraph, g) {
        return Err("multigraph is not a multi-orientation of the graph".into());
    }
    if !is_eulerian(&sol.multigraph) {
        return Err("multigraph is not Eulerian".into());
    }
    check_weight_and_walk(g, sol)
}

/// Checks a balanced solution: covers every edge and meets every demand.
pub fn check_bcpp_solution(g: &MixedGraph, t: &Demand, sol: &CppSolution) -> std::result::Result<(), String> {
    if !is_multi_orientation(&sol.multigraph, g) {
        return Err("multigraph is not a multi-orientation of the graph".into());
    }
    if !is_t_balanced(&sol.multigraph, t) {
        return Err("multigraph does not meet the demands".into());
    }
    check_weight_and_walk(g, sol)
}

fn check_weight_and_walk(g: &MixedGraph, sol: &CppSolution) -> std::result::Result<(), String> {
    let actual = g.directed_weight(&sol.multigraph).map_err(|e| e.to_string())?;
    if actual != sol.weight {
        return Err(format!("stated weight {} but multigraph weighs {actual}", sol.weight));
    }
    if let Some(walk) = &sol.walk {
        if !walk.is_closed() {
            return Err("walk is not closed".into());
        }
        if walk.traversal_counts(g.n()) != sol.multigraph {
            return Err("walk does not replay to the multigraph".into());
        }
    }
    Ok(())
}

/// Undirected case: double a minimum-weight join of the odd vertices, then
/// orient along closed trails.
pub fn solve_ucpp(g: &MixedGraph) -> Result<CppSolution> {
    if !g.arcs().is_empty() {
        return Err(Error::WrongKind { expected: "undirected graph", got: "mixed graph" });
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let mut h = g.edge_multigraph();
    let join = min_weight_xjoin_in(g, &odd_vertices(&h))?;
    h.merge(&join.edges);
    CppSolution::new(g, orient_even(&h)?)
}

/// Directed case via a minimum-cost circulation: one mandatory copy of each
/// arc plus an optional unbounded copy at the same cost.
pub fn solve_dcpp(g: &MixedGraph) -> Result<CppSolution> {
    if !g.edges().is_empty() {
        return Err(Error::WrongKind { expected: "directed graph", got: "mixed graph" });
    }
    if !is_strongly_connected(g) {
        return Err(Error::NotStronglyConnected);
    }
    let mut net = FlowNetwork::new(g.n());
    for a in g.arcs() {
        net.add_arc(a.u, a.v, 1, Some(1), a.w);
        net.add_arc(a.u, a.v, 0, None, a.w);
    }
    let flow = min_cost_circulation(&net).ok_or(Error::Infeasible)?;
    let mut d = DirectedMultigraph::new(g.n());
    for (arc, &f) in net.arcs().iter().zip(&flow) {
        d.add(arc.from, arc.to, f);
    }
    CppSolution::new(g, d)
}

/// Tries every choice of which direction of each edge must be used at least
/// once and keeps the cheapest circulation. Exponential in the edge count.
pub fn solve_mcpp_edges(g: &MixedGraph) -> Result<CppSolution> {
    if !is_strongly_connected(g) {
        return Err(Error::NotStronglyConnected);
    }
    let k = g.edges().len();
    if k >= usize::BITS as usize - 1 {
        return Err(Error::TooLarge(format!("{k} edges")));
    }
    let mut best: Option<(u64, Vec<u64>, FlowNetwork)> = None;
    for mask in 0u64..(1u64 << k) {
        let mut net = FlowNetwork::new(g.n());
        for a in g.arcs() {
            net.add_arc(a.u, a.v, 1, None, a.w);
        }
        for (i, e) in g.edges().iter().enumerate() {
            let forward = mask >> i & 1 == 1;
            net.add_arc(e.u, e.v, forward as u64, None, e.w);
            net.add_arc(e.v, e.u, (!forward) as u64, None, e.w);
        }
        let Some(flow) = min_cost_circulation(&net) else { continue };
        let cost = net.cost_of(&flow);
        if best.as_ref().is_none_or(|b| cost < b.0) {
            best = Some((cost, flow, net));
        }
    }
    let (_, flow, net) = best.ok_or(Error::Infeasible)?;
    let mut d = DirectedMultigraph::new(g.n());
    for (arc, &f) in net.arcs().iter().zip(&flow) {
        d.add(arc.from, arc.to, f);
    }
    CppSolution::new(g, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::oracle_mcpp;

    #[test]
    fn ucpp_examples() {
        let tri = MixedGraph::undirected(3, [(0, 1, 1), (1, 2, 1), (0, 2, 1)]).unwrap();
        assert_eq!(solve_ucpp(&tri).unwrap().weight, 3);
        let edge = MixedGraph::undirected(2, [(0, 1, 5)]).unwrap();
        assert_eq!(solve_ucpp(&edge).unwrap().weight, 10);
        let path = MixedGraph::undirected(3, [(0, 1, 2), (1, 2, 3)]).unwrap();
        let sol = solve_ucpp(&path).unwrap();
        assert_eq!(sol.weight, oracle_mcpp(&path).unwrap().weight);
        assert_eq!(sol.weight, 10);
        assert!(check_mcpp_solution(&path, &sol.with_walk().unwrap()).is_ok());
    }

    #[test]
    fn ucpp_rejects_disconnected() {
        let g = MixedGraph::undirected(4, [(0, 1, 1), (2, 3, 1)]).unwrap();
        assert_eq!(solve_ucpp(&g).unwrap_err(), Error::Disconnected);
    }

    #[test]
    fn dcpp_examples() {
        let tri = MixedGraph::new(3, [], [(0, 1, 1), (1, 2, 2), (2, 0, 3)]).unwrap();
        assert_eq!(solve_dcpp(&tri).unwrap().weight, 6);
        // The shortcut 2->0 forces a second pass over the expensive 0->1.
        let detour = MixedGraph::new(4, [], [(0, 1, 5), (1, 2, 1), (2, 3, 1), (3, 0, 1), (2, 0, 1)]).unwrap();
        let sol = solve_dcpp(&detour).unwrap();
        assert_eq!(sol.weight, oracle_mcpp(&detour).unwrap().weight);
        assert_eq!(sol.weight, 15);
        assert!(check_mcpp_solution(&detour, &sol).is_ok());
        let one_way = MixedGraph::new(2, [], [(0, 1, 1)]).unwrap();
        assert_eq!(solve_dcpp(&one_way).unwrap_err(), Error::NotStronglyConnected);
    }

    #[test]
    fn edge_algorithm_examples() {
        let tri = MixedGraph::new(3, [], [(0, 1, 1), (1, 2, 2), (2, 0, 3)]).unwrap();
        assert_eq!(solve_mcpp_edges(&tri).unwrap(), solve_dcpp(&tri).unwrap());
        let mixed = MixedGraph::new(3, [(0, 1, 1), (1, 2, 1)], [(2, 0, 1)]).unwrap();
        let sol = solve_mcpp_edges(&mixed).unwrap();
        assert_eq!(sol.weight, 3);
        assert!(check_mcpp_solution(&mixed, &sol).is_ok());
    }

    #[test]
    fn checker_catches_tampering() {
        let tri = MixedGraph::new(3, [], [(0, 1, 1), (1, 2, 2), (2, 0, 3)]).unwrap();
        let mut sol = solve_dcpp(&tri).unwrap();
        sol.weight += 1;
        assert!(check_mcpp_solution(&tri, &sol).is_err());
    }
}

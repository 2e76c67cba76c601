//! Maximum flow (Dinic) and minimum-cost circulation with lower bounds
//! (excess transform plus successive shortest paths).

use std::collections::VecDeque;

/// One arc of a [`FlowNetwork`]. `upper == None` means unbounded.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FlowArc {
    pub from: usize,
    pub to: usize,
    pub lower: u64,
    pub upper: Option<u64>,
    pub cost: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FlowNetwork {
    nodes: usize,
    arcs: Vec<FlowArc>,
}

/// Flow per arc, indexed like [`FlowNetwork::arcs`].
pub type FlowAssignment = Vec<u64>;

impl FlowNetwork {
    pub fn new(nodes: usize) -> Self {
        FlowNetwork { nodes, arcs: Vec::new() }
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn arcs(&self) -> &[FlowArc] {
        &self.arcs
    }

    /// Adds an arc and returns its index.
    pub fn add_arc(&mut self, from: usize, to: usize, lower: u64, upper: Option<u64>, cost: u64) -> usize {
        assert!(from < self.nodes && to < self.nodes, "arc endpoint out of range");
        if let Some(u) = upper {
            assert!(lower <= u, "lower bound exceeds capacity");
        }
        self.arcs.push(FlowArc { from, to, lower, upper, cost });
        self.arcs.len() - 1
    }

    /// Plain capacity arc: lower 0, cost 0.
    pub fn add_capacity(&mut self, from: usize, to: usize, cap: u64) -> usize {
        self.add_arc(from, to, 0, Some(cap), 0)
    }

    pub fn cost_of(&self, flow: &[u64]) -> u64 {
        self.arcs.iter().zip(flow).map(|(a, &f)| a.cost * f).sum()
    }

    /// Conservation everywhere and every arc within its bounds.
    pub fn is_circulation(&self, flow: &[u64]) -> bool {
        if flow.len() != self.arcs.len() {
            return false;
        }
        let mut net = vec![0i128; self.nodes];
        for (a, &f) in self.arcs.iter().zip(flow) {
            if f < a.lower || a.upper.is_some_and(|u| f > u) {
                return false;
            }
            net[a.from] += f as i128;
            net[a.to] -= f as i128;
        }
        net.iter().all(|&x| x == 0)
    }
}

/// Residual graph shared by both algorithms. Arc `2i` is forward, `2i + 1` its reverse.
struct Residual {
    head: Vec<usize>,
    cap: Vec<u64>,
    cost: Vec<i64>,
    adj: Vec<Vec<usize>>,
}

impl Residual {
    fn new(nodes: usize) -> Self {
        Residual { head: Vec::new(), cap: Vec::new(), cost: Vec::new(), adj: vec![Vec::new(); nodes] }
    }

    fn add(&mut self, from: usize, to: usize, cap: u64, cost: i64) -> usize {
        let id = self.head.len();
        self.head.push(to);
        self.cap.push(cap);
        self.cost.push(cost);
        self.adj[from].push(id);
        self.head.push(from);
        self.cap.push(0);
        self.cost.push(-cost);
        self.adj[to].push(id + 1);
        id
    }

    fn flow_on(&self, id: usize) -> u64 {
        self.cap[id ^ 1]
    }

    fn dinic(&mut self, s: usize, t: usize) -> u64 {
        let n = self.adj.len();
        let mut total = 0u64;
        loop {
            let mut level = vec![usize::MAX; n];
            level[s] = 0;
            let mut queue = VecDeque::from([s]);
            while let Some(x) = queue.pop_front() {
                for &id in &self.adj[x] {
                    let y = self.head[id];
                    if self.cap[id] > 0 && level[y] == usize::MAX {
                        level[y] = level[x] + 1;
                        queue.push_back(y);
                    }
                }
            }
            if level[t] == usize::MAX {
                return total;
            }
            let mut iter = vec![0usize; n];
            loop {
                let pushed = self.blocking(s, t, u64::MAX, &level, &mut iter);
                if pushed == 0 {
                    break;
                }
                total += pushed;
            }
        }
    }

    // Iterative DFS would be longer; recursion depth is bounded by the level graph.
    fn blocking(&mut self, x: usize, t: usize, limit: u64, level: &[usize], iter: &mut [usize]) -> u64 {
        if x == t {
            return limit;
        }
        while iter[x] < self.adj[x].len() {
            let id = self.adj[x][iter[x]];
            let y = self.head[id];
            if self.cap[id] > 0 && level[y] == level[x] + 1 {
                let got = self.blocking(y, t, limit.min(self.cap[id]), level, iter);
                if got > 0 {
                    self.cap[id] -= got;
                    self.cap[id ^ 1] += got;
                    return got;
                }
            }
            iter[x] += 1;
        }
        0
    }

    /// Pushes up to `want` units from `s` to `t` along cheapest paths.
    /// Returns the amount actually sent.
    fn successive_shortest_paths(&mut self, s: usize, t: usize, want: u64) -> u64 {
        let n = self.adj.len();
        let mut sent = 0u64;
        while sent < want {
            // Bellman-Ford with a queue; residual costs can be negative.
            let mut dist = vec![i64::MAX; n];
            let mut via = vec![usize::MAX; n];
            let mut in_queue = vec![false; n];
            dist[s] = 0;
            let mut queue = VecDeque::from([s]);
            in_queue[s] = true;
            while let Some(x) = queue.pop_front() {
                in_queue[x] = false;
                for &id in &self.adj[x] {
                    if self.cap[id] == 0 {
                        continue;
                    }
                    let y = self.head[id];
                    let nd = dist[x] + self.cost[id];
                    if nd < dist[y] {
                        dist[y] = nd;
                        via[y] = id;
                        if !in_queue[y] {
                            in_queue[y] = true;
                            queue.push_back(y);
                        }
                    }
                }
            }
            if dist[t] == i64::MAX {
                break;
            }
            let mut amount = want - sent;
            let mut y = t;
            while y != s {
                let id = via[y];
                amount = amount.min(self.cap[id]);
                y = self.head[id ^ 1];
            }
            let mut y = t;
            while y != s {
                let id = via[y];
                self.cap[id] -= amount;
                self.cap[id ^ 1] += amount;
                y = self.head[id ^ 1];
            }
            sent += amount;
        }
        sent
    }
}

/// Maximum `s`-`t` flow. Lower bounds are ignored; unbounded arcs are capped
/// at the sum of all finite capacities, which no flow can exceed anyway
/// unless an all-unbounded path exists (then the value is reported as that cap).
pub fn max_flow(net: &FlowNetwork, s: usize, t: usize) -> (u64, FlowAssignment) {
    let finite: u64 = net.arcs.iter().filter_map(|a| a.upper).fold(0u64, |acc, c| acc.saturating_add(c));
    let cap_inf = finite.max(1);
    let mut res = Residual::new(net.nodes);
    let ids: Vec<usize> =
        net.arcs.iter().map(|a| res.add(a.from, a.to, a.upper.unwrap_or(cap_inf), 0)).collect();
    let value = if s == t { 0 } else { res.dinic(s, t) };
    (value, ids.iter().map(|&id| res.flow_on(id)).collect())
}

/// Minimum-cost feasible circulation, or `None` when none exists.
///
/// All costs are nonnegative, so some optimum decomposes into simple cycles
/// each needed by a lower bound; that keeps every arc at or below the sum of
/// lower bounds, which is used as the cap for unbounded arcs.
pub fn min_cost_circulation(net: &FlowNetwork) -> Option<FlowAssignment> {
    let sum_lower: u64 = net.arcs.iter().map(|a| a.lower).sum();
    let n = net.nodes;
    let (src, snk) = (n, n + 1);
    let mut res = Residual::new(n + 2);
    let mut excess = vec![0i128; n];
    let mut ids = Vec::with_capacity(net.arcs.len());
    for a in &net.arcs {
        let upper = a.upper.unwrap_or(sum_lower.max(a.lower));
        ids.push(res.add(a.from, a.to, upper - a.lower, a.cost as i64));
        excess[a.to] += a.lower as i128;
        excess[a.from] -= a.lower as i128;
    }
    let mut need = 0u64;
    for (v, &e) in excess.iter().enumerate() {
        if e > 0 {
            res.add(src, v, e as u64, 0);
            need += e as u64;
        } else if e < 0 {
            res.add(v, snk, (-e) as u64, 0);
        }
    }
    if res.successive_shortest_paths(src, snk, need) < need {
        return None;
    }
    Some(net.arcs.iter().zip(&ids).map(|(a, &id)| a.lower + res.flow_on(id)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn unit_path() {
        let mut net = FlowNetwork::new(3);
        net.add_capacity(0, 1, 1);
        net.add_capacity(1, 2, 1);
        assert_eq!(max_flow(&net, 0, 2).0, 1);
    }

    #[test]
    fn two_disjoint_paths() {
        let mut net = FlowNetwork::new(4);
        for (x, y) in [(0, 1), (1, 3), (0, 2), (2, 3)] {
            net.add_capacity(x, y, 1);
        }
        let (value, flow) = max_flow(&net, 0, 3);
        assert_eq!(value, 2);
        assert_eq!(flow, vec![1, 1, 1, 1]);
    }

    #[test]
    fn hstar_of_single_edge() {
        // a=2, b=3, u=0, v=1; two a-u copies, one edge u-v both ways, two v-b copies.
        let mut net = FlowNetwork::new(4);
        net.add_capacity(2, 0, 2);
        net.add_capacity(0, 1, 1);
        net.add_capacity(1, 0, 1);
        net.add_capacity(1, 3, 2);
        assert_eq!(max_flow(&net, 2, 3).0, 1);
    }

    #[test]
    fn two_cycle_circulation() {
        let mut net = FlowNetwork::new(2);
        net.add_arc(0, 1, 1, None, 1);
        net.add_arc(1, 0, 1, None, 2);
        let flow = min_cost_circulation(&net).unwrap();
        assert_eq!(flow, vec![1, 1]);
        assert_eq!(net.cost_of(&flow), 3);
    }

    #[test]
    fn infeasible_circulation() {
        let mut net = FlowNetwork::new(2);
        net.add_arc(0, 1, 1, None, 1);
        assert_eq!(min_cost_circulation(&net), None);
    }

    #[test]
    fn triangle_circulation() {
        let mut net = FlowNetwork::new(3);
        net.add_arc(0, 1, 1, None, 1);
        net.add_arc(1, 2, 0, None, 1);
        net.add_arc(2, 0, 0, None, 1);
        let flow = min_cost_circulation(&net).unwrap();
        assert_eq!(net.cost_of(&flow), 3);
        assert_eq!(flow, vec![1, 1, 1]);
    }

    fn brute_min_cut(net: &FlowNetwork, s: usize, t: usize) -> u64 {
        let n = net.nodes();
        let mut best = u64::MAX;
        for mask in 0u32..(1 << n) {
            if mask >> s & 1 == 0 || mask >> t & 1 == 1 {
                continue;
            }
            let cut = net
                .arcs()
                .iter()
                .filter(|a| mask >> a.from & 1 == 1 && mask >> a.to & 1 == 0)
                .map(|a| a.upper.unwrap())
                .sum();
            best = best.min(cut);
        }
        best
    }

    fn brute_circulation(net: &FlowNetwork, limit: u64) -> Option<u64> {
        fn go(net: &FlowNetwork, i: usize, flow: &mut Vec<u64>, limit: u64, best: &mut Option<u64>) {
            if i == net.arcs().len() {
                if net.is_circulation(flow) {
                    let c = net.cost_of(flow);
                    if best.is_none_or(|b| c < b) {
                        *best = Some(c);
                    }
                }
                return;
            }
            let a = net.arcs()[i];
            let hi = a.upper.unwrap_or(limit).min(limit);
            for f in a.lower..=hi {
                flow.push(f);
                go(net, i + 1, flow, limit, best);
                flow.pop();
            }
        }
        let mut best = None;
        go(net, 0, &mut Vec::new(), limit, &mut best);
        best
    }

    fn arc_strategy(nodes: usize, max_arcs: usize) -> impl Strategy<Value = Vec<(usize, usize, u64)>> {
        prop::collection::vec((0..nodes, 0..nodes, 0u64..4), 1..=max_arcs)
            .prop_map(|v| v.into_iter().filter(|(x, y, _)| x != y).collect())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn max_flow_equals_min_cut(arcs in arc_strategy(5, 10)) {
            let mut net = FlowNetwork::new(5);
            for &(x, y, c) in &arcs {
                net.add_capacity(x, y, c);
            }
            let (value, flow) = max_flow(&net, 0, 4);
            prop_assert_eq!(value, brute_min_cut(&net, 0, 4));
            let mut bal = [0i64; 5];
            for (a, &f) in net.arcs().iter().zip(&flow) {
                prop_assert!(f <= a.upper.unwrap());
                bal[a.from] += f as i64;
                bal[a.to] -= f as i64;
            }
            prop_assert_eq!(bal[0], value as i64);
            prop_assert!(bal[1..4].iter().all(|&x| x == 0));
        }

        #[test]
        fn circulation_matches_brute_force(
            arcs in prop::collection::vec((0usize..4, 0usize..4, 0u64..3, prop::option::of(0u64..4), 0u64..5), 1..=6)
        ) {
            let mut net = FlowNetwork::new(4);
            let mut lower_sum = 0;
            for &(x, y, lo, up, cost) in &arcs {
                if x == y || lower_sum + lo > 6 {
                    continue;
                }
                lower_sum += lo;
                net.add_arc(x, y, lo, up.map(|u| u + lo), cost);
            }
            let got = min_cost_circulation(&net);
            let want = brute_circulation(&net, 6);
            prop_assert_eq!(got.as_ref().map(|f| net.cost_of(f)), want);
            if let Some(f) = got {
                prop_assert!(net.is_circulation(&f));
            }
        }
    }
}

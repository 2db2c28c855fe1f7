//! Exact RPC1 solver: unit-capacity min-cost flow on the network
//! `s -> drivers -> passengers -> t`, solved by successive shortest paths
//! with node potentials and stopped by the profit target.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::model::{validate_matching, DriverId, EdgeId, Hypergraph, Matching, Money, PassengerId};
use crate::solve::SolveError;

const SOURCE: usize = 0;
const SINK: usize = 1;
/// Relaxation rounds needed on a network whose s-t paths all have 3 arcs.
pub const BELLMAN_FORD_ROUNDS: usize = 3;

/// A node of the flow network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Node {
    Source,
    Sink,
    Driver(DriverId),
    Passenger(PassengerId),
}

/// Unit-capacity flow network of a bipartite hypergraph.
///
/// Original arc `k` is stored at index `2k`, its residual reverse at `2k + 1`.
/// Driver-to-passenger arcs cost the negated edge weight; all others cost 0.
#[derive(Debug, Clone)]
pub struct FlowNetwork {
    drivers: Vec<DriverId>,
    passengers: Vec<PassengerId>,
    tail: Vec<u32>,
    head: Vec<u32>,
    cost: Vec<i64>,
    edge: Vec<Option<EdgeId>>,
    first_out: Vec<u32>,
    out: Vec<u32>,
}

impl FlowNetwork {
    pub fn build(h: &Hypergraph) -> Result<Self, SolveError> {
        if let Some(e) = h.edges().iter().find(|e| e.passengers.len() != 1) {
            return Err(SolveError::NotBipartite {
                edge: e.id,
                size: e.passengers.len(),
            });
        }
        let drivers = h.drivers().to_vec();
        let passengers = h.passengers().to_vec();
        let driver_node = |d: DriverId| 2 + drivers.binary_search(&d).expect("driver of an edge");
        let passenger_node =
            |p: PassengerId| 2 + drivers.len() + passengers.binary_search(&p).expect("passenger of an edge");

        let mut arcs: Vec<(usize, usize, i64, Option<EdgeId>)> = Vec::new();
        for &d in &drivers {
            arcs.push((SOURCE, driver_node(d), 0, None));
        }
        for e in h.edges() {
            arcs.push((
                driver_node(e.driver),
                passenger_node(e.passengers[0]),
                -e.weight.cents(),
                Some(e.id),
            ));
        }
        for &p in &passengers {
            arcs.push((passenger_node(p), SINK, 0, None));
        }

        let nodes = 2 + drivers.len() + passengers.len();
        let mut tail = Vec::with_capacity(2 * arcs.len());
        let mut head = Vec::with_capacity(2 * arcs.len());
        let mut cost = Vec::with_capacity(2 * arcs.len());
        let mut edge = Vec::with_capacity(arcs.len());
        for &(u, v, c, e) in &arcs {
            tail.extend([u as u32, v as u32]);
            head.extend([v as u32, u as u32]);
            cost.extend([c, -c]);
            edge.push(e);
        }
        let mut degree = vec![0u32; nodes + 1];
        for &u in &tail {
            degree[u as usize + 1] += 1;
        }
        for i in 0..nodes {
            degree[i + 1] += degree[i];
        }
        let first_out = degree;
        let mut fill = first_out.clone();
        let mut out = vec![0u32; tail.len()];
        for (a, &u) in tail.iter().enumerate() {
            out[fill[u as usize] as usize] = a as u32;
            fill[u as usize] += 1;
        }
        Ok(FlowNetwork {
            drivers,
            passengers,
            tail,
            head,
            cost,
            edge,
            first_out,
            out,
        })
    }

    pub fn node_count(&self) -> usize {
        2 + self.drivers.len() + self.passengers.len()
    }

    /// Number of original (non-residual) arcs.
    pub fn arc_count(&self) -> usize {
        self.edge.len()
    }

    /// Upper bound on the flow value.
    pub fn n_min(&self) -> usize {
        self.drivers.len().min(self.passengers.len())
    }

    pub fn node_index(&self, node: Node) -> Option<usize> {
        match node {
            Node::Source => Some(SOURCE),
            Node::Sink => Some(SINK),
            Node::Driver(d) => self.drivers.binary_search(&d).ok().map(|i| 2 + i),
            Node::Passenger(p) => self
                .passengers
                .binary_search(&p)
                .ok()
                .map(|i| 2 + self.drivers.len() + i),
        }
    }

    /// Original arcs as `(tail, head, cost, capacity)` node indices.
    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize, i64, u32)> + '_ {
        (0..self.arc_count()).map(|k| {
            let a = 2 * k;
            (self.tail[a] as usize, self.head[a] as usize, self.cost[a], 1)
        })
    }

    /// Cost of the original arc from `u` to `v`, if any.
    pub fn arc_cost(&self, u: Node, v: Node) -> Option<i64> {
        let (u, v) = (self.node_index(u)?, self.node_index(v)?);
        self.arcs().find(|&(a, b, _, _)| a == u && b == v).map(|(_, _, c, _)| c)
    }

    fn out_arcs(&self, u: usize) -> &[u32] {
        &self.out[self.first_out[u] as usize..self.first_out[u + 1] as usize]
    }
}

/// Johnson potentials from Bellman-Ford truncated to three rounds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reweighting {
    /// `dist(s, u)`, or `None` for nodes unreachable from the source.
    pub h: Vec<Option<i64>>,
    pub rounds: usize,
}

impl Reweighting {
    /// `w(u,v) + h(u) - h(v)` for original arc `k`, if both ends are reachable.
    pub fn reweighted(&self, net: &FlowNetwork, k: usize) -> Option<i64> {
        let a = 2 * k;
        let hu = self.h[net.tail[a] as usize]?;
        let hv = self.h[net.head[a] as usize]?;
        Some(net.cost[a] + hu - hv)
    }
}

pub fn johnson_reweight(net: &FlowNetwork) -> Reweighting {
    let mut h: Vec<Option<i64>> = vec![None; net.node_count()];
    h[SOURCE] = Some(0);
    for _ in 0..BELLMAN_FORD_ROUNDS {
        for k in 0..net.arc_count() {
            let a = 2 * k;
            let (u, v) = (net.tail[a] as usize, net.head[a] as usize);
            if let Some(hu) = h[u] {
                let d = hu + net.cost[a];
                if h[v].is_none_or(|hv| d < hv) {
                    h[v] = Some(d);
                }
            }
        }
    }
    Reweighting {
        h,
        rounds: BELLMAN_FORD_ROUNDS,
    }
}

/// A shortest augmenting path found by [`Sspa::next_path`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AugmentingPath {
    arcs: Vec<u32>,
    cost: i64,
}

impl AugmentingPath {
    /// Change of the original flow cost if one unit is pushed along the path.
    pub fn cost_delta(&self) -> i64 {
        self.cost
    }

    pub fn len(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }
}

/// Successive-shortest-path state: residual capacities, reweighted arc costs
/// and node potentials. Reduced costs of residual arcs stay nonnegative.
#[derive(Debug, Clone)]
pub struct Sspa<'n> {
    net: &'n FlowNetwork,
    reweighting: Reweighting,
    /// Reweighted cost per arc (negated on reverse arcs).
    hat: Vec<i64>,
    residual: Vec<bool>,
    pi: Vec<i64>,
    flow: usize,
    cost: i64,
}

impl<'n> Sspa<'n> {
    pub fn new(net: &'n FlowNetwork) -> Self {
        let reweighting = johnson_reweight(net);
        let mut hat = vec![0; net.tail.len()];
        for k in 0..net.arc_count() {
            let w = reweighting.reweighted(net, k).unwrap_or(0);
            debug_assert!(w >= 0, "reweighted arc cost {w} < 0");
            hat[2 * k] = w;
            hat[2 * k + 1] = -w;
        }
        let residual = (0..net.tail.len()).map(|a| a % 2 == 0).collect();
        Sspa {
            net,
            reweighting,
            hat,
            residual,
            pi: vec![0; net.node_count()],
            flow: 0,
            cost: 0,
        }
    }

    pub fn reweighting(&self) -> &Reweighting {
        &self.reweighting
    }

    /// Current flow value `y`.
    pub fn flow_value(&self) -> usize {
        self.flow
    }

    /// Original cost `c(f_y)` of the current flow, in cents.
    pub fn cost(&self) -> i64 {
        self.cost
    }

    fn usable(&self, u: usize) -> bool {
        self.reweighting.h[u].is_some()
    }

    fn reduced(&self, a: usize) -> i64 {
        self.hat[a] - self.pi[self.net.tail[a] as usize] + self.pi[self.net.head[a] as usize]
    }

    /// Smallest reduced cost over residual arcs between reachable nodes.
    pub fn min_reduced_cost(&self) -> Option<i64> {
        (0..self.hat.len())
            .filter(|&a| self.residual[a])
            .filter(|&a| self.usable(self.net.tail[a] as usize) && self.usable(self.net.head[a] as usize))
            .map(|a| self.reduced(a))
            .min()
    }

    /// Dijkstra from `s` on reduced costs, stopping once `t` is settled, then
    /// the potential update: settled nodes move by their distance, the rest
    /// by the distance of `t`. Returns `None` when `t` is unreachable.
    pub fn next_path(&mut self) -> Option<AugmentingPath> {
        let n = self.net.node_count();
        let mut dist = vec![i64::MAX; n];
        let mut settled = vec![false; n];
        let mut pred = vec![u32::MAX; n];
        let mut heap = BinaryHeap::new();
        dist[SOURCE] = 0;
        heap.push(Reverse((0i64, SOURCE as u32)));
        while let Some(Reverse((d, u))) = heap.pop() {
            let u = u as usize;
            if settled[u] {
                continue;
            }
            settled[u] = true;
            if u == SINK {
                break;
            }
            for &a in self.net.out_arcs(u) {
                let a = a as usize;
                if !self.residual[a] {
                    continue;
                }
                let v = self.net.head[a] as usize;
                if settled[v] || !self.usable(v) {
                    continue;
                }
                let nd = d + self.reduced(a);
                if nd < dist[v] {
                    dist[v] = nd;
                    pred[v] = a as u32;
                    heap.push(Reverse((nd, v as u32)));
                }
            }
        }
        if !settled[SINK] {
            return None;
        }
        let dt = dist[SINK];
        for u in 0..n {
            self.pi[u] -= if settled[u] { dist[u] } else { dt };
        }
        let mut arcs = Vec::new();
        let mut v = SINK;
        while v != SOURCE {
            let a = pred[v];
            arcs.push(a);
            v = self.net.tail[a as usize] as usize;
        }
        arcs.reverse();
        let cost = arcs.iter().map(|&a| self.net.cost[a as usize]).sum();
        Some(AugmentingPath { arcs, cost })
    }

    /// Pushes one unit along `path`, which must come from the latest
    /// [`Sspa::next_path`] call.
    pub fn augment(&mut self, path: &AugmentingPath) {
        for &a in &path.arcs {
            let a = a as usize;
            debug_assert!(self.residual[a]);
            self.residual[a] = false;
            self.residual[a ^ 1] = true;
        }
        self.flow += 1;
        self.cost += path.cost;
        debug_assert!(self.min_reduced_cost().is_none_or(|r| r >= 0));
    }

    /// Finds and applies the next shortest augmenting path; returns the new
    /// flow cost.
    pub fn step(&mut self) -> Option<i64> {
        let path = self.next_path()?;
        self.augment(&path);
        Some(self.cost)
    }

    /// Hypergraph edges carrying flow, ascending.
    pub fn flow_edges(&self) -> Vec<EdgeId> {
        let mut edges: Vec<EdgeId> = (0..self.net.arc_count())
            .filter(|&k| !self.residual[2 * k])
            .filter_map(|k| self.net.edge[k])
            .collect();
        edges.sort_unstable();
        edges
    }
}

/// Diagnostics of an exact run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactTrace {
    /// `c(f_0), c(f_1), ...` for every flow reached.
    pub costs: Vec<Money>,
    /// Cost of the flow the stopping rule refused to take, if any.
    pub rejected: Option<Money>,
    /// Minimum residual reduced cost after each augmentation.
    pub min_reduced_costs: Vec<i64>,
    pub bellman_ford_rounds: usize,
}

/// Largest matching with weight at least `target`, of maximum weight among
/// matchings of its size. `Money::NEG_INFINITY` means no target.
pub fn solve_rpc1_exact(h: &Hypergraph, target: Money) -> Result<Matching, SolveError> {
    solve_rpc1_exact_traced(h, target).0
}

pub fn solve_rpc1_exact_traced(h: &Hypergraph, target: Money) -> (Result<Matching, SolveError>, ExactTrace) {
    let net = match FlowNetwork::build(h) {
        Ok(net) => net,
        Err(e) => {
            let trace = ExactTrace {
                costs: Vec::new(),
                rejected: None,
                min_reduced_costs: Vec::new(),
                bellman_ford_rounds: 0,
            };
            return (Err(e), trace);
        }
    };
    let mut sspa = Sspa::new(&net);
    let mut trace = ExactTrace {
        costs: vec![Money::ZERO],
        rejected: None,
        min_reduced_costs: Vec::new(),
        bellman_ford_rounds: sspa.reweighting().rounds,
    };
    // Profit is the negated flow cost; `target` may be the -inf sentinel.
    let meets = |cost: i64| Money::from_cents(-cost) >= target;
    let mut best = meets(0).then(Vec::new);
    while let Some(path) = sspa.next_path() {
        let next = sspa.cost() + path.cost_delta();
        if next > sspa.cost() && !meets(next) {
            trace.rejected = Some(Money::from_cents(next));
            break;
        }
        sspa.augment(&path);
        trace.costs.push(Money::from_cents(next));
        trace.min_reduced_costs.push(sspa.min_reduced_cost().unwrap_or(0));
        if meets(next) {
            best = Some(sspa.flow_edges());
        }
    }
    let result = match best {
        Some(edges) => Ok(validate_matching(h, &edges).expect("flow edges form a matching")),
        None => Err(SolveError::Infeasible { target }),
    };
    (result, trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{DriverId as D, PassengerId as P};

    fn three_edge() -> Hypergraph {
        Hypergraph::from_edges([
            (D(1), vec![P(1)], Money::from_cents(5)),
            (D(1), vec![P(2)], Money::from_cents(3)),
            (D(2), vec![P(1)], Money::from_cents(4)),
        ])
        .unwrap()
    }

    #[test]
    fn builds_three_layer_network() {
        let net = FlowNetwork::build(&three_edge()).unwrap();
        assert_eq!(net.node_count(), 6);
        assert_eq!(net.arc_count(), 7);
        assert_eq!(net.n_min(), 2);
        assert_eq!(net.arc_cost(Node::Driver(D(1)), Node::Passenger(P(1))), Some(-5));
        assert!(net.arcs().all(|(_, _, _, cap)| cap == 1));
    }

    #[test]
    fn empty_network() {
        let net = FlowNetwork::build(&Hypergraph::default()).unwrap();
        assert_eq!((net.node_count(), net.arc_count(), net.n_min()), (2, 0, 0));
        let mut sspa = Sspa::new(&net);
        assert_eq!(sspa.next_path(), None);
    }

    #[test]
    fn rejects_multi_passenger_edges() {
        let h = Hypergraph::from_edges([(D(0), vec![P(0), P(1)], Money::ZERO)]).unwrap();
        assert!(matches!(
            FlowNetwork::build(&h),
            Err(SolveError::NotBipartite { size: 2, .. })
        ));
    }

    #[test]
    fn johnson_potentials_by_hand() {
        let net = FlowNetwork::build(&three_edge()).unwrap();
        let rw = johnson_reweight(&net);
        let h = |n| rw.h[net.node_index(n).unwrap()].unwrap();
        assert_eq!(rw.rounds, 3);
        assert_eq!(h(Node::Source), 0);
        assert_eq!(h(Node::Driver(D(1))), 0);
        assert_eq!(h(Node::Driver(D(2))), 0);
        assert_eq!(h(Node::Passenger(P(1))), -5);
        assert_eq!(h(Node::Passenger(P(2))), -3);
        assert_eq!(h(Node::Sink), -5);
        let hat = |u, v| {
            let (u, v) = (net.node_index(u).unwrap(), net.node_index(v).unwrap());
            let k = net.arcs().position(|(a, b, _, _)| a == u && b == v).unwrap();
            rw.reweighted(&net, k).unwrap()
        };
        assert_eq!(hat(Node::Driver(D(1)), Node::Passenger(P(1))), 0);
        assert_eq!(hat(Node::Driver(D(2)), Node::Passenger(P(1))), 1);
        assert_eq!(hat(Node::Driver(D(1)), Node::Passenger(P(2))), 0);
        assert_eq!(hat(Node::Passenger(P(1)), Node::Sink), 0);
        assert_eq!(hat(Node::Passenger(P(2)), Node::Sink), 2);
    }

    #[test]
    fn sspa_costs_by_hand() {
        let net = FlowNetwork::build(&three_edge()).unwrap();
        let mut sspa = Sspa::new(&net);
        assert_eq!(sspa.step(), Some(-5));
        assert_eq!(sspa.flow_edges(), vec![EdgeId(0)]);
        assert_eq!(sspa.step(), Some(-7));
        assert_eq!(sspa.flow_edges(), vec![EdgeId(1), EdgeId(2)]);
        assert_eq!(sspa.step(), None);
    }

    #[test]
    fn exact_examples() {
        let h = three_edge();
        let m = solve_rpc1_exact(&h, Money::from_cents(7)).unwrap();
        assert_eq!(
            (m.edges(), m.weight()),
            (&[EdgeId(1), EdgeId(2)][..], Money::from_cents(7))
        );
        assert_eq!(
            solve_rpc1_exact(&h, Money::from_cents(8)),
            Err(SolveError::Infeasible {
                target: Money::from_cents(8)
            })
        );
        let m = solve_rpc1_exact(&h, Money::NEG_INFINITY).unwrap();
        assert_eq!(m.len(), 2);
    }

    #[test]
    fn zero_weight_edge_is_taken() {
        let h = Hypergraph::from_edges([(D(0), vec![P(0)], Money::ZERO)]).unwrap();
        let m = solve_rpc1_exact(&h, Money::ZERO).unwrap();
        assert_eq!(m.len(), 1);
    }

    #[test]
    fn stops_once_cost_rises_past_target() {
        let h = Hypergraph::from_edges([
            (D(0), vec![P(0)], Money::from_cents(10)),
            (D(1), vec![P(1)], Money::from_cents(-4)),
            (D(2), vec![P(2)], Money::from_cents(-4)),
        ])
        .unwrap();
        let (m, trace) = solve_rpc1_exact_traced(&h, Money::from_cents(5));
        assert_eq!(m.unwrap().len(), 2);
        assert_eq!(
            trace.costs,
            vec![Money::ZERO, Money::from_cents(-10), Money::from_cents(-6)]
        );
        assert_eq!(trace.rejected, Some(Money::from_cents(-2)));
        assert!(trace.min_reduced_costs.iter().all(|&r| r >= 0));
    }
}

use std::collections::{HashMap, HashSet};

use super::{Driver, DriverId, EdgeId, FeasibleMatch, ModelError, Money, PassengerId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Vertex {
    Driver(DriverId),
    Passenger(PassengerId),
}

/// A hyperedge `{driver} ∪ passengers` weighted by the match profit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HyperEdge {
    pub id: EdgeId,
    pub driver: DriverId,
    /// Sorted, distinct, non-empty.
    pub passengers: Vec<PassengerId>,
    pub weight: Money,
}

impl HyperEdge {
    #[inline]
    pub fn served(&self) -> usize {
        self.passengers.len()
    }

    /// True when the two edges share the driver or any passenger.
    pub fn intersects(&self, other: &HyperEdge) -> bool {
        if self.driver == other.driver {
            return true;
        }
        // both lists are sorted
        let (mut i, mut j) = (0, 0);
        while i < self.passengers.len() && j < other.passengers.len() {
            match self.passengers[i].cmp(&other.passengers[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => return true,
            }
        }
        false
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        std::iter::once(Vertex::Driver(self.driver)).chain(self.passengers.iter().map(|&p| Vertex::Passenger(p)))
    }
}

/// Weighted hypergraph of feasible matches.
///
/// Edges are kept sorted by id. Only vertices covered by at least one edge
/// exist, so the graph never has isolated vertices.
#[derive(Debug, Clone, Default)]
pub struct Hypergraph {
    edges: Vec<HyperEdge>,
    drivers: Vec<DriverId>,
    passengers: Vec<PassengerId>,
    incidence: HashMap<Vertex, Vec<EdgeId>>,
}

impl Hypergraph {
    /// Builds a hypergraph from `(driver, passengers, weight)` triples without
    /// a capacity check. Duplicates (same driver and passenger set) keep the
    /// first occurrence; ids are assigned in input order after deduplication.
    pub fn from_edges<I, P>(edges: I) -> Result<Self, ModelError>
    where
        I: IntoIterator<Item = (DriverId, P, Money)>,
        P: IntoIterator<Item = PassengerId>,
    {
        let mut seen: HashSet<(DriverId, Vec<PassengerId>)> = HashSet::new();
        let mut out = Vec::new();
        for (driver, passengers, weight) in edges {
            let passengers = normalize_passengers(driver, passengers)?;
            if seen.insert((driver, passengers.clone())) {
                out.push(HyperEdge {
                    id: EdgeId(out.len() as u32),
                    driver,
                    passengers,
                    weight,
                });
            }
        }
        Ok(Self::from_sorted_edges(out))
    }

    fn from_sorted_edges(edges: Vec<HyperEdge>) -> Self {
        debug_assert!(edges.windows(2).all(|w| w[0].id < w[1].id));
        let incidence = incidence_of(&edges);
        let mut drivers = Vec::new();
        let mut passengers = Vec::new();
        for v in incidence.keys() {
            match *v {
                Vertex::Driver(d) => drivers.push(d),
                Vertex::Passenger(p) => passengers.push(p),
            }
        }
        drivers.sort_unstable();
        passengers.sort_unstable();
        Hypergraph {
            edges,
            drivers,
            passengers,
            incidence,
        }
    }

    pub fn edges(&self) -> &[HyperEdge] {
        &self.edges
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_vertices(&self) -> usize {
        self.drivers.len() + self.passengers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn drivers(&self) -> &[DriverId] {
        &self.drivers
    }

    pub fn passengers(&self) -> &[PassengerId] {
        &self.passengers
    }

    pub fn edge(&self, id: EdgeId) -> Option<&HyperEdge> {
        self.edges
            .binary_search_by_key(&id, |e| e.id)
            .ok()
            .map(|i| &self.edges[i])
    }

    /// Edge ids incident to `v`, ascending. Empty for unknown vertices.
    pub fn incident(&self, v: Vertex) -> &[EdgeId] {
        self.incidence.get(&v).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Largest passenger set of any edge (0 when empty).
    pub fn max_edge_size(&self) -> usize {
        self.edges.iter().map(HyperEdge::served).max().unwrap_or(0)
    }

    /// True when every edge carries exactly one passenger.
    pub fn is_bipartite(&self) -> bool {
        self.edges.iter().all(|e| e.served() == 1)
    }

    /// Sub-hypergraph keeping the edges accepted by `keep`, ids preserved.
    pub fn filter(&self, mut keep: impl FnMut(&HyperEdge) -> bool) -> Hypergraph {
        Self::from_sorted_edges(self.edges.iter().filter(|e| keep(e)).cloned().collect())
    }

    /// Splits into `(H+, H-)`: non-negative edges and negative edges.
    pub fn split_by_sign(&self) -> (Hypergraph, Hypergraph) {
        (self.positive_part(), self.filter(|e| e.weight.is_negative()))
    }

    pub fn positive_part(&self) -> Hypergraph {
        self.filter(|e| !e.weight.is_negative())
    }

    /// Recomputes the incidence index from the edge list and compares it with
    /// the stored one.
    pub fn index_is_consistent(&self) -> bool {
        incidence_of(&self.edges) == self.incidence
    }
}

fn incidence_of(edges: &[HyperEdge]) -> HashMap<Vertex, Vec<EdgeId>> {
    let mut incidence: HashMap<Vertex, Vec<EdgeId>> = HashMap::new();
    for e in edges {
        for v in e.vertices() {
            incidence.entry(v).or_default().push(e.id);
        }
    }
    incidence
}

fn normalize_passengers<P>(driver: DriverId, passengers: P) -> Result<Vec<PassengerId>, ModelError>
where
    P: IntoIterator<Item = PassengerId>,
{
    let mut ps: Vec<PassengerId> = passengers.into_iter().collect();
    if ps.is_empty() {
        return Err(ModelError::EmptyPassengerSet { driver });
    }
    ps.sort_unstable();
    if let Some(w) = ps.windows(2).find(|w| w[0] == w[1]) {
        return Err(ModelError::DuplicatePassenger {
            driver,
            passenger: w[0],
        });
    }
    Ok(ps)
}

/// Builds the match hypergraph: one edge per distinct `(driver, passengers)`
/// pair weighted by the match profit. Matches whose group exceeds the driver
/// capacity, or whose driver is unknown, are rejected.
pub fn build_hypergraph(matches: &[FeasibleMatch], drivers: &[Driver]) -> Result<Hypergraph, ModelError> {
    let capacity: HashMap<DriverId, u32> = drivers.iter().map(|d| (d.id, d.capacity)).collect();
    for m in matches {
        let cap = *capacity.get(&m.driver).ok_or(ModelError::UnknownDriver(m.driver))?;
        if m.passengers.len() > cap as usize {
            return Err(ModelError::CapacityExceeded {
                driver: m.driver,
                size: m.passengers.len(),
                capacity: cap,
            });
        }
    }
    Hypergraph::from_edges(
        matches
            .iter()
            .map(|m| (m.driver, m.passengers.iter().copied(), m.profit)),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(i: u32) -> DriverId {
        DriverId(i)
    }
    fn r(i: u32) -> PassengerId {
        PassengerId(i)
    }
    fn m(c: i64) -> Money {
        Money::from_cents(c)
    }

    #[test]
    fn empty_input_gives_empty_graph() {
        let h = Hypergraph::from_edges(Vec::<(DriverId, Vec<PassengerId>, Money)>::new()).unwrap();
        assert_eq!(h.num_vertices(), 0);
        assert_eq!(h.num_edges(), 0);
    }

    #[test]
    fn duplicates_collapse() {
        let h = Hypergraph::from_edges([(d(1), vec![r(1)], m(5)), (d(1), vec![r(1)], m(5))]).unwrap();
        assert_eq!(h.num_edges(), 1);
        assert_eq!(h.drivers(), &[d(1)]);
        assert_eq!(h.passengers(), &[r(1)]);
    }

    #[test]
    fn passenger_order_does_not_defeat_dedup() {
        let h = Hypergraph::from_edges([(d(1), vec![r(2), r(1)], m(5)), (d(1), vec![r(1), r(2)], m(9))]).unwrap();
        assert_eq!(h.num_edges(), 1);
        assert_eq!(h.edges()[0].weight, m(5));
        assert_eq!(h.edges()[0].passengers, vec![r(1), r(2)]);
    }

    #[test]
    fn incidence_of_shared_passenger() {
        let h = Hypergraph::from_edges([(d(1), vec![r(1)], m(5)), (d(2), vec![r(1), r(2)], m(7))]).unwrap();
        assert_eq!(h.num_edges(), 2);
        assert_eq!(h.num_vertices(), 4);
        assert_eq!(h.incident(Vertex::Passenger(r(1))), &[EdgeId(0), EdgeId(1)]);
        assert_eq!(h.incident(Vertex::Passenger(r(2))), &[EdgeId(1)]);
        assert!(h.index_is_consistent());
    }

    #[test]
    fn split_by_sign_partitions_and_keeps_ids() {
        let h = Hypergraph::from_edges([
            (d(1), vec![r(1)], m(5)),
            (d(2), vec![r(2)], m(-2)),
            (d(3), vec![r(3)], m(0)),
        ])
        .unwrap();
        let (plus, minus) = h.split_by_sign();
        let ids = |g: &Hypergraph| g.edges().iter().map(|e| e.id).collect::<Vec<_>>();
        assert_eq!(ids(&plus), vec![EdgeId(0), EdgeId(2)]);
        assert_eq!(ids(&minus), vec![EdgeId(1)]);
        assert_eq!(minus.drivers(), &[d(2)]);
        assert!(plus.index_is_consistent() && minus.index_is_consistent());
    }

    #[test]
    fn split_of_all_positive_and_empty() {
        let h = Hypergraph::from_edges([(d(1), vec![r(1)], m(5))]).unwrap();
        let (plus, minus) = h.split_by_sign();
        assert_eq!(plus.num_edges(), 1);
        assert!(minus.is_empty() && minus.num_vertices() == 0);
        let (p, n) = Hypergraph::default().split_by_sign();
        assert!(p.is_empty() && n.is_empty());
    }

    #[test]
    fn rejects_bad_passenger_sets() {
        assert!(matches!(
            Hypergraph::from_edges([(d(1), Vec::new(), m(1))]),
            Err(ModelError::EmptyPassengerSet { .. })
        ));
        assert!(matches!(
            Hypergraph::from_edges([(d(1), vec![r(2), r(2)], m(1))]),
            Err(ModelError::DuplicatePassenger { .. })
        ));
    }

    #[test]
    fn intersects_by_driver_or_passenger() {
        let a = HyperEdge {
            id: EdgeId(0),
            driver: d(1),
            passengers: vec![r(1), r(4)],
            weight: m(0),
        };
        let b = HyperEdge {
            id: EdgeId(1),
            driver: d(2),
            passengers: vec![r(2), r(4)],
            weight: m(0),
        };
        let c = HyperEdge {
            id: EdgeId(2),
            driver: d(1),
            passengers: vec![r(3)],
            weight: m(0),
        };
        let e = HyperEdge {
            id: EdgeId(3),
            driver: d(3),
            passengers: vec![r(2), r(3)],
            weight: m(0),
        };
        assert!(a.intersects(&b));
        assert!(a.intersects(&c));
        assert!(!a.intersects(&e));
    }
}

use std::collections::HashMap;

use thiserror::Error;

use super::{DriverId, EdgeId, Hypergraph, Money, PassengerId, Vertex};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatchingViolation {
    #[error("edge {0} is not in the hypergraph")]
    UnknownEdge(EdgeId),
    #[error("edge {0} listed twice")]
    RepeatedEdge(EdgeId),
    #[error("edges {first} and {second} share driver {driver}")]
    SharedDriver {
        first: EdgeId,
        second: EdgeId,
        driver: DriverId,
    },
    #[error("edges {first} and {second} share passenger {passenger}")]
    SharedPassenger {
        first: EdgeId,
        second: EdgeId,
        passenger: PassengerId,
    },
    #[error("cached totals (weight {weight}, served {served}) do not match the edges")]
    StaleTotals { weight: Money, served: usize },
}

/// A set of pairwise vertex-disjoint hyperedges with cached totals.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Matching {
    edges: Vec<EdgeId>,
    weight: Money,
    served: usize,
}

impl Matching {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Edge ids, ascending.
    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
    }

    pub fn weight(&self) -> Money {
        self.weight
    }

    /// Number of passengers covered.
    pub fn served(&self) -> usize {
        self.served
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn contains(&self, id: EdgeId) -> bool {
        self.edges.binary_search(&id).is_ok()
    }

    /// Number of edges in the matching with negative weight.
    pub fn negative_edges(&self, h: &Hypergraph) -> usize {
        self.edges
            .iter()
            .filter_map(|&id| h.edge(id))
            .filter(|e| e.weight.is_negative())
            .count()
    }

    /// Re-checks disjointness against `h` and that the cached totals agree
    /// with a fresh sum.
    pub fn verify(&self, h: &Hypergraph) -> Result<(), MatchingViolation> {
        let fresh = validate_matching(h, &self.edges)?;
        if fresh.weight != self.weight || fresh.served != self.served {
            return Err(MatchingViolation::StaleTotals {
                weight: self.weight,
                served: self.served,
            });
        }
        Ok(())
    }
}

/// Checks that `edges` is a matching of `h`, reporting the first pair of
/// intersecting edges in list order, and returns it with recomputed totals.
pub fn validate_matching(h: &Hypergraph, edges: &[EdgeId]) -> Result<Matching, MatchingViolation> {
    let mut owner: HashMap<Vertex, EdgeId> = HashMap::new();
    let mut weight = Money::ZERO;
    let mut served = 0;
    for &id in edges {
        let e = h.edge(id).ok_or(MatchingViolation::UnknownEdge(id))?;
        for v in e.vertices() {
            if let Some(&first) = owner.get(&v) {
                return Err(match v {
                    _ if first == id => MatchingViolation::RepeatedEdge(id),
                    Vertex::Driver(driver) => MatchingViolation::SharedDriver {
                        first,
                        second: id,
                        driver,
                    },
                    Vertex::Passenger(passenger) => MatchingViolation::SharedPassenger {
                        first,
                        second: id,
                        passenger,
                    },
                });
            }
            owner.insert(v, id);
        }
        weight += e.weight;
        served += e.served();
    }
    let mut edges = edges.to_vec();
    edges.sort_unstable();
    Ok(Matching { edges, weight, served })
}

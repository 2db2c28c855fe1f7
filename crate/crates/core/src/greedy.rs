//! Greedy for RPC1: a maximum-weight matching, then negative edges in
//! decreasing weight while the profit target still holds.

use std::collections::HashSet;

use crate::flow::{FlowNetwork, Sspa};
use crate::model::{validate_matching, HyperEdge, Hypergraph, Matching, Money, Vertex};
use crate::solve::SolveError;

/// Maximum-weight matching of a bipartite hypergraph. Only nonnegative edges
/// can help, so the flow runs on the nonnegative part and stops at the first
/// augmenting path that would not lower the cost.
pub fn max_weight_matching(h: &Hypergraph) -> Result<Matching, SolveError> {
    FlowNetwork::build(h)?;
    let plus = h.positive_part();
    let net = FlowNetwork::build(&plus)?;
    let mut sspa = Sspa::new(&net);
    while let Some(path) = sspa.next_path() {
        if path.cost_delta() >= 0 {
            break;
        }
        sspa.augment(&path);
    }
    Ok(validate_matching(h, &sspa.flow_edges()).expect("flow edges form a matching"))
}

/// Negative edges in the order Greedy considers them.
fn by_weight_desc(edges: impl Iterator<Item = HyperEdge>) -> Vec<HyperEdge> {
    let mut edges: Vec<HyperEdge> = edges.collect();
    edges.sort_by_key(|e| (std::cmp::Reverse(e.weight), e.id));
    edges
}

pub fn greedy_rpc1(h: &Hypergraph, target: Money) -> Result<Matching, SolveError> {
    let seed = max_weight_matching(h)?;
    if seed.weight() < target {
        return Err(SolveError::Infeasible { target });
    }
    let mut used: HashSet<Vertex> = seed
        .edges()
        .iter()
        .flat_map(|&id| h.edge(id).expect("seed edge").vertices())
        .collect();
    let mut edges = seed.edges().to_vec();
    let mut weight = seed.weight();
    let negative = by_weight_desc(h.edges().iter().filter(|e| e.weight < Money::ZERO).cloned());
    for e in negative {
        if e.vertices().any(|v| used.contains(&v)) {
            continue;
        }
        if weight + e.weight < target {
            break;
        }
        weight += e.weight;
        used.extend(e.vertices());
        edges.push(e.id);
    }
    let m = validate_matching(h, &edges).expect("greedy keeps edges disjoint");
    debug_assert!(m.weight() >= target);
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{DriverId as D, EdgeId, PassengerId as P};

    fn graph(edges: &[(u32, u32, i64)]) -> Hypergraph {
        Hypergraph::from_edges(edges.iter().map(|&(d, p, w)| (D(d), vec![P(p)], Money::from_cents(w)))).unwrap()
    }

    #[test]
    fn max_weight_examples() {
        let m = max_weight_matching(&graph(&[(1, 1, 5)])).unwrap();
        assert_eq!(m.weight(), Money::from_cents(5));
        let m = max_weight_matching(&graph(&[(1, 1, 5), (1, 2, 3), (2, 1, 4)])).unwrap();
        assert_eq!(
            (m.edges(), m.weight()),
            (&[EdgeId(1), EdgeId(2)][..], Money::from_cents(7))
        );
        let m = max_weight_matching(&graph(&[(1, 1, -5), (2, 2, -1)])).unwrap();
        assert!(m.is_empty());
    }

    #[test]
    fn greedy_examples() {
        let h = graph(&[(1, 1, 5), (2, 2, 4), (3, 3, -2)]);
        let m = greedy_rpc1(&h, Money::from_cents(7)).unwrap();
        assert_eq!((m.len(), m.weight(), m.served()), (3, Money::from_cents(7), 3));
        let m = greedy_rpc1(&h, Money::from_cents(8)).unwrap();
        assert_eq!((m.len(), m.weight(), m.served()), (2, Money::from_cents(9), 2));
        assert!(matches!(
            greedy_rpc1(&h, Money::from_cents(10)),
            Err(SolveError::Infeasible { .. })
        ));
    }

    #[test]
    fn no_negative_edges_returns_seed() {
        let h = graph(&[(1, 1, 5), (1, 2, 3), (2, 1, 4)]);
        assert_eq!(greedy_rpc1(&h, Money::ZERO).unwrap(), max_weight_matching(&h).unwrap());
    }

    #[test]
    fn equal_negative_weights_prefer_lower_id() {
        let h = graph(&[(1, 1, 5), (2, 2, -2), (2, 3, -2)]);
        let m = greedy_rpc1(&h, Money::from_cents(3)).unwrap();
        assert_eq!(m.edges(), &[EdgeId(0), EdgeId(1)]);
    }
}

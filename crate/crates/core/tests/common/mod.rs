#![allow(dead_code)]

use proptest::prelude::*;
use rpc_core::{DriverId, Hypergraph, Money, PassengerId};

/// Bipartite hypergraphs with up to 6 drivers and 6 passengers, weights in
/// [-50, 100] cents.
pub fn bipartite() -> impl Strategy<Value = Hypergraph> {
    (1u32..=6, 1u32..=6)
        .prop_flat_map(|(nd, np)| prop::collection::vec((0..nd, 0..np, -50i64..=100), 0..=14))
        .prop_map(|edges| {
            Hypergraph::from_edges(
                edges
                    .into_iter()
                    .map(|(d, p, w)| (DriverId(d), vec![PassengerId(p)], Money::from_cents(w))),
            )
            .unwrap()
        })
}

/// Hypergraphs with up to 5 drivers, 8 passengers and groups of at most
/// `lambda` passengers; weights in `[lo, 100]` cents.
pub fn hypergraph(lambda: usize, lo: i64) -> impl Strategy<Value = Hypergraph> {
    (1u32..=5, 1u32..=8)
        .prop_flat_map(move |(nd, np)| {
            let group = prop::collection::btree_set(0..np, 1..=lambda.min(np as usize));
            prop::collection::vec((0..nd, group, lo..=100i64), 0..=14)
        })
        .prop_map(|edges| {
            Hypergraph::from_edges(edges.into_iter().map(|(d, ps, w)| {
                (
                    DriverId(d),
                    ps.into_iter().map(PassengerId).collect::<Vec<_>>(),
                    Money::from_cents(w),
                )
            }))
            .unwrap()
        })
}

/// Every matching of `h` as (edge ids, served, weight), by subset enumeration.
pub fn all_matchings(h: &Hypergraph) -> Vec<(Vec<rpc_core::EdgeId>, usize, Money)> {
    let edges = h.edges();
    assert!(edges.len() <= 16);
    let mut out = Vec::new();
    'subsets: for mask in 0u32..(1 << edges.len()) {
        let chosen: Vec<_> = (0..edges.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| &edges[i])
            .collect();
        for (i, a) in chosen.iter().enumerate() {
            for b in &chosen[i + 1..] {
                if a.intersects(b) {
                    continue 'subsets;
                }
            }
        }
        out.push((
            chosen.iter().map(|e| e.id).collect(),
            chosen.iter().map(|e| e.served()).sum(),
            chosen.iter().map(|e| e.weight).sum(),
        ));
    }
    out
}

//! LS2 for RPC+: greedy hyperedge packing followed by one pass of local
//! improvements that replace a single-passenger edge by up to two edges.

use std::cmp::Ordering;
use std::collections::HashMap;

use crate::model::{validate_matching, EdgeId, HyperEdge, Hypergraph, Matching, Money, Vertex};
use crate::solve::SolveError;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Ls2Options {
    /// With capacity bound 2, also accept replacements serving 3 passengers.
    /// Off by default.
    pub aggressive: bool,
}

/// Replacement of the single-passenger edge `base` by `replacement`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Improvement {
    pub base: EdgeId,
    /// One or two edge ids, ascending.
    pub replacement: Vec<EdgeId>,
    /// Passengers served by the replacement that the matching did not serve.
    pub gain: usize,
    /// Passengers served by the replacement.
    pub size: usize,
    pub weight: Money,
}

impl Improvement {
    // Larger gain, then larger weight, then smaller ids.
    fn better_than(&self, other: &Improvement) -> bool {
        (self.gain, self.weight)
            .cmp(&(other.gain, other.weight))
            .then_with(|| other.replacement.cmp(&self.replacement))
            == Ordering::Greater
    }
}

/// Adds edges by decreasing weight (ties by id) while they stay disjoint.
pub fn simple_greedy(hplus: &Hypergraph) -> Result<Matching, SolveError> {
    if let Some(e) = hplus.edges().iter().find(|e| e.weight < Money::ZERO) {
        return Err(SolveError::NegativeEdge {
            edge: e.id,
            weight: e.weight,
        });
    }
    let mut order: Vec<&HyperEdge> = hplus.edges().iter().collect();
    order.sort_by_key(|e| (std::cmp::Reverse(e.weight), e.id));
    let mut owner = Owners::default();
    let mut edges = Vec::new();
    for e in order {
        if owner.free_except(e, None) {
            owner.claim(e);
            edges.push(e.id);
        }
    }
    Ok(validate_matching(hplus, &edges).expect("greedy keeps edges disjoint"))
}

/// `w(M' \ A) + floor(2 w(A) / (lambda + 1))`, where `A` holds the
/// single-passenger edges of `m`.
pub fn profit_target_bound(h: &Hypergraph, m: &Matching, lambda: usize) -> Money {
    let (mut rest, mut singles) = (0i64, 0i64);
    for &id in m.edges() {
        let e = h.edge(id).expect("matching edge");
        if e.served() == 1 {
            singles += e.weight.cents();
        } else {
            rest += e.weight.cents();
        }
    }
    Money::from_cents(rest + (2 * singles).div_euclid(lambda as i64 + 1))
}

#[derive(Debug, Default)]
struct Owners(HashMap<Vertex, EdgeId>);

impl Owners {
    fn of(h: &Hypergraph, m: &Matching) -> Self {
        let mut owners = Owners::default();
        for &id in m.edges() {
            owners.claim(h.edge(id).expect("matching edge"));
        }
        owners
    }

    fn claim(&mut self, e: &HyperEdge) {
        for v in e.vertices() {
            self.0.insert(v, e.id);
        }
    }

    fn release(&mut self, e: &HyperEdge) {
        for v in e.vertices() {
            self.0.remove(&v);
        }
    }

    /// Every vertex of `e` is free or belongs to `except`.
    fn free_except(&self, e: &HyperEdge, except: Option<EdgeId>) -> bool {
        e.vertices().all(|v| self.0.get(&v).is_none_or(|&o| Some(o) == except))
    }
}

fn accepts(size: usize, lambda: usize, opts: Ls2Options) -> bool {
    match lambda {
        2 if opts.aggressive => size >= 3,
        2 => size == 4,
        _ => size > 1,
    }
}

fn search(
    hplus: &Hypergraph,
    owners: &Owners,
    weight: Money,
    base: &HyperEdge,
    target: Money,
    lambda: usize,
    opts: Ls2Options,
) -> Option<Improvement> {
    let mut neighbours: Vec<&HyperEdge> = base
        .vertices()
        .flat_map(|v| hplus.incident(v).iter().copied())
        .filter(|&id| id != base.id)
        .map(|id| hplus.edge(id).expect("incident edge"))
        .filter(|f| owners.free_except(f, Some(base.id)))
        .collect();
    neighbours.sort_by_key(|f| f.id);
    neighbours.dedup_by_key(|f| f.id);

    let rider = base.passengers[0];
    let mut best: Option<Improvement> = None;
    let mut consider = |edges: &[&HyperEdge]| {
        let size: usize = edges.iter().map(|f| f.served()).sum();
        let w: Money = edges.iter().map(|f| f.weight).sum();
        if !accepts(size, lambda, opts) || weight + w - base.weight < target {
            return;
        }
        let covers_rider = edges.iter().any(|f| f.passengers.contains(&rider));
        let candidate = Improvement {
            base: base.id,
            replacement: edges.iter().map(|f| f.id).collect(),
            gain: size - usize::from(covers_rider),
            size,
            weight: w,
        };
        if best.as_ref().is_none_or(|b| candidate.better_than(b)) {
            best = Some(candidate);
        }
    };
    for (i, f) in neighbours.iter().enumerate() {
        consider(&[f]);
        for g in &neighbours[i + 1..] {
            if !f.intersects(g) {
                consider(&[f, g]);
            }
        }
    }
    best
}

/// Best improvement for the single-passenger edge `e` of `m` over the
/// nonnegative part of `h`, or `None`.
pub fn find_improvement(
    h: &Hypergraph,
    m: &Matching,
    e: EdgeId,
    target: Money,
    lambda: usize,
    opts: Ls2Options,
) -> Option<Improvement> {
    let base = h.edge(e)?;
    if !m.contains(e) || base.served() != 1 {
        return None;
    }
    let hplus = h.positive_part();
    search(&hplus, &Owners::of(h, m), m.weight(), base, target, lambda, opts)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ls2Outcome {
    /// Step-1 greedy packing.
    pub seed: Matching,
    pub matching: Matching,
    pub improvements: Vec<Improvement>,
}

/// Runs LS2 with capacity bound `lambda` (the largest passenger group).
/// Infeasible if the greedy packing already misses `target`.
pub fn ls2(h: &Hypergraph, target: Money, lambda: usize, opts: Ls2Options) -> Result<Ls2Outcome, SolveError> {
    if lambda < 2 {
        return Err(SolveError::InvalidLambda(lambda));
    }
    let hplus = h.positive_part();
    let seed = simple_greedy(&hplus)?;
    if seed.weight() < target {
        return Err(SolveError::Infeasible { target });
    }
    let mut singles: Vec<&HyperEdge> = seed
        .edges()
        .iter()
        .map(|&id| hplus.edge(id).expect("seed edge"))
        .filter(|e| e.served() == 1)
        .collect();
    singles.sort_by_key(|e| (e.weight, e.id));

    let mut owners = Owners::of(&hplus, &seed);
    let mut edges: Vec<EdgeId> = seed.edges().to_vec();
    let mut weight = seed.weight();
    let mut improvements = Vec::new();
    for base in singles {
        let Some(imp) = search(&hplus, &owners, weight, base, target, lambda, opts) else {
            continue;
        };
        owners.release(base);
        edges.retain(|&id| id != base.id);
        for &id in &imp.replacement {
            owners.claim(hplus.edge(id).expect("replacement edge"));
            edges.push(id);
        }
        weight = weight + imp.weight - base.weight;
        improvements.push(imp);
    }
    let matching = validate_matching(&hplus, &edges).expect("improvements keep edges disjoint");
    debug_assert!(matching.weight() >= target);
    Ok(Ls2Outcome {
        seed,
        matching,
        improvements,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{DriverId as D, PassengerId as P};

    fn graph(edges: &[(u32, &[u32], i64)]) -> Hypergraph {
        Hypergraph::from_edges(
            edges
                .iter()
                .map(|&(d, ps, w)| (D(d), ps.iter().map(|&p| P(p)).collect::<Vec<_>>(), Money::from_cents(w))),
        )
        .unwrap()
    }

    fn example() -> Hypergraph {
        // e1, eA, eC
        graph(&[(1, &[1], 10), (2, &[1, 2], 4), (1, &[3, 4], 3)])
    }

    #[test]
    fn simple_greedy_examples() {
        assert!(simple_greedy(&Hypergraph::default()).unwrap().is_empty());
        let h = graph(&[(1, &[1], 10), (2, &[1, 2], 4), (3, &[3, 4], 4)]);
        let m = simple_greedy(&h).unwrap();
        assert_eq!(
            (m.edges(), m.weight(), m.served()),
            (&[EdgeId(0), EdgeId(2)][..], Money::from_cents(14), 3)
        );
        let h = graph(&[(1, &[1], 4), (2, &[2], 4)]);
        assert_eq!(simple_greedy(&h).unwrap().len(), 2);
        assert!(simple_greedy(&graph(&[(1, &[1], -1)])).is_err());
    }

    #[test]
    fn bound_examples() {
        let h = graph(&[(1, &[1, 2], 100), (2, &[3], 30), (3, &[4], 10)]);
        let all = validate_matching(&h, &[EdgeId(0), EdgeId(1)]).unwrap();
        assert_eq!(profit_target_bound(&h, &all, 3), Money::from_cents(115));
        let single = validate_matching(&h, &[EdgeId(2)]).unwrap();
        assert_eq!(profit_target_bound(&h, &single, 2), Money::from_cents(6));
        let pair = validate_matching(&h, &[EdgeId(0)]).unwrap();
        assert_eq!(profit_target_bound(&h, &pair, 2), Money::from_cents(100));
    }

    #[test]
    fn improvement_examples() {
        let h = example();
        let m = validate_matching(&h, &[EdgeId(0)]).unwrap();
        let opts = Ls2Options::default();
        let imp = find_improvement(&h, &m, EdgeId(0), Money::from_cents(7), 2, opts).unwrap();
        assert_eq!(imp.replacement, vec![EdgeId(1), EdgeId(2)]);
        assert_eq!(imp.size, 4);
        assert_eq!(find_improvement(&h, &m, EdgeId(0), Money::from_cents(8), 2, opts), None);

        let lonely = graph(&[(1, &[1], 10)]);
        let m = validate_matching(&lonely, &[EdgeId(0)]).unwrap();
        assert_eq!(find_improvement(&lonely, &m, EdgeId(0), Money::ZERO, 3, opts), None);
    }

    #[test]
    fn ls2_example() {
        let out = ls2(&example(), Money::from_cents(6), 2, Ls2Options::default()).unwrap();
        assert_eq!(out.seed.edges(), &[EdgeId(0)]);
        assert_eq!(out.matching.edges(), &[EdgeId(1), EdgeId(2)]);
        assert_eq!(
            (out.matching.served(), out.matching.weight()),
            (4, Money::from_cents(7))
        );
    }

    #[test]
    fn target_at_seed_weight_blocks_losing_swaps() {
        let out = ls2(&example(), Money::from_cents(10), 2, Ls2Options::default()).unwrap();
        assert_eq!(out.matching, out.seed);
    }

    #[test]
    fn three_passenger_swaps_need_aggressive_mode() {
        // Replacing e0 by e1 + e2 serves 3 passengers instead of 1.
        let h = graph(&[(1, &[1], 10), (2, &[1, 2], 4), (1, &[3], 3)]);
        let plain = ls2(&h, Money::ZERO, 2, Ls2Options::default()).unwrap();
        assert_eq!(plain.matching.served(), 1);
        let eager = ls2(&h, Money::ZERO, 2, Ls2Options { aggressive: true }).unwrap();
        assert_eq!(eager.matching.served(), 3);
        let general = ls2(&h, Money::ZERO, 3, Ls2Options::default()).unwrap();
        assert_eq!(general.matching.served(), 3);
    }

    #[test]
    fn rejects_tiny_lambda_and_high_targets() {
        assert_eq!(
            ls2(&example(), Money::ZERO, 1, Ls2Options::default()),
            Err(SolveError::InvalidLambda(1))
        );
        assert!(matches!(
            ls2(&example(), Money::from_cents(11), 2, Ls2Options::default()),
            Err(SolveError::Infeasible { .. })
        ));
    }
}

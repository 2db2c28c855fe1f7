//! Exhaustive solvers for small hypergraphs, used as ground truth.

use crate::model::{validate_matching, EdgeId, HyperEdge, Hypergraph, Matching, Money, PassengerId, Vertex};
use crate::solve::SolveError;

/// Search nodes explored before giving up.
pub const STATE_BUDGET: u64 = 1 << 24;

#[derive(Clone, Copy)]
enum Objective {
    /// Most passengers among matchings meeting the target, then most weight.
    Served(Money),
    Weight,
}

struct Enumerator<'h> {
    by_driver: Vec<Vec<&'h HyperEdge>>,
    taken: Vec<bool>,
    passengers: &'h [PassengerId],
    chosen: Vec<EdgeId>,
    served: usize,
    weight: Money,
    states: u64,
    objective: Objective,
    best: Option<(usize, Money, Vec<EdgeId>)>,
}

impl Enumerator<'_> {
    fn key(&self) -> Option<(usize, Money)> {
        match self.objective {
            Objective::Served(target) => (self.weight >= target).then_some((self.served, self.weight)),
            Objective::Weight => Some((0, self.weight)),
        }
    }

    fn record(&mut self) {
        let Some((served, weight)) = self.key() else {
            return;
        };
        let mut ids = self.chosen.clone();
        ids.sort_unstable();
        let better = match &self.best {
            None => true,
            Some((s, w, b)) => (served, weight).cmp(&(*s, *w)).then_with(|| b.cmp(&ids)).is_gt(),
        };
        if better {
            self.best = Some((served, weight, ids));
        }
    }

    fn slot(&self, p: PassengerId) -> usize {
        self.passengers.binary_search(&p).expect("known passenger")
    }

    fn go(&mut self, driver: usize) -> Result<(), SolveError> {
        self.states += 1;
        if self.states > STATE_BUDGET {
            return Err(SolveError::BudgetExceeded(STATE_BUDGET));
        }
        if driver == self.by_driver.len() {
            self.record();
            return Ok(());
        }
        self.go(driver + 1)?;
        for i in 0..self.by_driver[driver].len() {
            let e = self.by_driver[driver][i];
            if e.passengers.iter().any(|&p| self.taken[self.slot(p)]) {
                continue;
            }
            for &p in &e.passengers {
                let s = self.slot(p);
                self.taken[s] = true;
            }
            self.chosen.push(e.id);
            self.served += e.served();
            self.weight += e.weight;
            let r = self.go(driver + 1);
            self.weight -= e.weight;
            self.served -= e.served();
            self.chosen.pop();
            for &p in &e.passengers {
                let s = self.slot(p);
                self.taken[s] = false;
            }
            r?;
        }
        Ok(())
    }
}

fn best(h: &Hypergraph, objective: Objective) -> Result<Option<Matching>, SolveError> {
    let by_driver = h
        .drivers()
        .iter()
        .map(|&d| {
            h.incident(Vertex::Driver(d))
                .iter()
                .map(|&id| h.edge(id).expect("incident edge"))
                .collect()
        })
        .collect();
    let mut search = Enumerator {
        by_driver,
        taken: vec![false; h.passengers().len()],
        passengers: h.passengers(),
        chosen: Vec::new(),
        served: 0,
        weight: Money::ZERO,
        states: 0,
        objective,
        best: None,
    };
    search.go(0)?;
    Ok(search
        .best
        .map(|(_, _, ids)| validate_matching(h, &ids).expect("enumerated sets are matchings")))
}

/// Most edges with weight at least `target`; ties by weight, then smallest
/// id set. Edges must serve one passenger each.
pub fn brute_rpc1(h: &Hypergraph, target: Money) -> Result<Matching, SolveError> {
    if let Some(e) = h.edges().iter().find(|e| e.served() != 1) {
        return Err(SolveError::NotBipartite {
            edge: e.id,
            size: e.served(),
        });
    }
    best(h, Objective::Served(target))?.ok_or(SolveError::Infeasible { target })
}

/// Most passengers over nonnegative edges with weight at least `target`;
/// ties by weight, then smallest id set.
pub fn brute_rpcplus(h: &Hypergraph, target: Money) -> Result<Matching, SolveError> {
    let plus = h.positive_part();
    best(&plus, Objective::Served(target))?.ok_or(SolveError::Infeasible { target })
}

/// Maximum-weight matching over all edges; ties by smallest id set.
pub fn brute_rp(h: &Hypergraph) -> Result<Matching, SolveError> {
    Ok(best(h, Objective::Weight)?.expect("the empty matching always qualifies"))
}

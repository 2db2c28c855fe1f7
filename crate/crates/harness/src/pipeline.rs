//! Solving one batch: targets from a seed matching, then each algorithm.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rpc_core::flow::solve_rpc1_exact;
use rpc_core::greedy::{greedy_rpc1, max_weight_matching};
use rpc_core::ls2::{ls2, profit_target_bound, simple_greedy, Ls2Options};
use rpc_core::oracle::{brute_rp, brute_rpc1, brute_rpcplus};
use rpc_core::{build_hypergraph, Hypergraph, Matching, ModelError, Money, SolveError};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::Variant;
use crate::instance::Batch;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("algorithm {algorithm} does not solve {variant}")]
    Unsupported { algorithm: Algorithm, variant: Variant },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("seed matching: {0}")]
    Seed(SolveError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Exactnf2,
    Greedy,
    Simplegreedy,
    Ls2,
    Oracle,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::Exactnf2,
        Algorithm::Greedy,
        Algorithm::Simplegreedy,
        Algorithm::Ls2,
        Algorithm::Oracle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Exactnf2 => "exactnf2",
            Algorithm::Greedy => "greedy",
            Algorithm::Simplegreedy => "simplegreedy",
            Algorithm::Ls2 => "ls2",
            Algorithm::Oracle => "oracle",
        }
    }

    pub fn supports(self, variant: Variant) -> bool {
        use Algorithm::*;
        match variant {
            Variant::Rpc1 => matches!(self, Exactnf2 | Greedy | Oracle),
            Variant::Rpcplus => matches!(self, Simplegreedy | Ls2 | Oracle),
            Variant::Rp => matches!(self, Exactnf2 | Oracle),
        }
    }

    /// Algorithms a benchmark runs for `variant` when none are named.
    pub fn defaults(variant: Variant) -> Vec<Algorithm> {
        match variant {
            Variant::Rpc1 => vec![Algorithm::Exactnf2, Algorithm::Greedy],
            Variant::Rpcplus => vec![Algorithm::Simplegreedy, Algorithm::Ls2],
            Variant::Rp => vec![Algorithm::Exactnf2],
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown algorithm {s:?}"))
    }
}

/// How the profit target of an interval is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TargetSpec {
    /// This fraction of the seed matching weight.
    Factor(f64),
    Cents(i64),
    /// The k-th standard target (1, 2 or 3) of the variant.
    Level(u8),
}

impl TargetSpec {
    pub const LEVELS: [TargetSpec; 3] = [TargetSpec::Level(1), TargetSpec::Level(2), TargetSpec::Level(3)];

    pub fn label(&self) -> String {
        match self {
            TargetSpec::Factor(f) => format!("{f}w"),
            TargetSpec::Cents(c) => format!("{c}c"),
            TargetSpec::Level(k) => format!("c{k}"),
        }
    }
}

impl FromStr for TargetSpec {
    type Err = String;

    /// `c1`..`c3`, `0.8w` (factor) or `1500c` (cents).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let err = || format!("bad target {s:?} (expected c1..c3, <factor>w or <cents>c)");
        if let Some(k) = s.strip_prefix('c') {
            return match k.parse() {
                Ok(k @ 1..=3) => Ok(TargetSpec::Level(k)),
                _ => Err(err()),
            };
        }
        if let Some(f) = s.strip_suffix('w') {
            return f.parse().map(TargetSpec::Factor).map_err(|_| err());
        }
        if let Some(c) = s.strip_suffix('c') {
            return c.parse().map(TargetSpec::Cents).map_err(|_| err());
        }
        Err(err())
    }
}

/// The seed matching of a batch and the standard targets derived from it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Targets {
    /// Weight of the seed matching.
    pub seed: Money,
    pub levels: [Money; 3],
}

/// Capacity bound used by the multi-seat bound: the largest group any
/// driver can take, at least 2.
pub fn lambda_of(batch: &Batch) -> usize {
    batch
        .drivers
        .iter()
        .map(|d| d.capacity as usize)
        .max()
        .unwrap_or(0)
        .max(2)
}

pub fn targets(h: &Hypergraph, variant: Variant, lambda: usize) -> Result<Targets, SolveError> {
    let scale = |w: Money, f: f64| Money::from_cents_f64(w.cents() as f64 * f);
    match variant {
        Variant::Rpc1 | Variant::Rp => {
            let w = max_weight_matching(h)?.weight();
            Ok(Targets {
                seed: w,
                levels: [w, scale(w, 0.8), scale(w, 0.6)],
            })
        }
        Variant::Rpcplus => {
            let plus = h.positive_part();
            let seed = simple_greedy(&plus)?;
            let w = seed.weight();
            let lb = profit_target_bound(&plus, &seed, lambda).min(scale(w, 0.6));
            let mid = Money::from_cents((w - lb).cents() / 2) + lb;
            Ok(Targets {
                seed: w,
                levels: [w, mid, lb],
            })
        }
    }
}

impl Targets {
    pub fn resolve(&self, spec: TargetSpec) -> Money {
        match spec {
            TargetSpec::Factor(f) => Money::from_cents_f64(self.seed.cents() as f64 * f),
            TargetSpec::Cents(c) => Money::from_cents(c),
            TargetSpec::Level(k) => self.levels[(k.clamp(1, 3) - 1) as usize],
        }
    }
}

/// One solver run on one interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalReport {
    pub interval: u32,
    pub variant: Variant,
    pub algorithm: Algorithm,
    pub target_label: String,
    pub target_cents: i64,
    pub feasible: bool,
    /// Solver error other than infeasibility.
    pub error: Option<String>,
    pub served: usize,
    pub matches: usize,
    pub profit_cents: i64,
    pub negative_matches: usize,
    pub runtime_ms: u64,
    pub drivers: usize,
    pub occupancy: f64,
}

/// `(served + drivers) / drivers`; zero when there are no drivers.
pub fn occupancy(served: usize, drivers: usize) -> f64 {
    if drivers == 0 {
        0.0
    } else {
        (served + drivers) as f64 / drivers as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    /// Record wall-clock solve time; off gives runtime 0 for reproducible
    /// output.
    pub timing: bool,
    pub ls2: Ls2Options,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            timing: true,
            ls2: Ls2Options::default(),
        }
    }
}

/// Runs `algorithm` on `h`. RP ignores the target.
pub fn solve(
    h: &Hypergraph,
    variant: Variant,
    algorithm: Algorithm,
    target: Money,
    lambda: usize,
    opts: &RunOptions,
) -> Result<Matching, SolveError> {
    use Algorithm::*;
    match (variant, algorithm) {
        (Variant::Rpc1, Exactnf2) => solve_rpc1_exact(h, target),
        (Variant::Rpc1, Greedy) => greedy_rpc1(h, target),
        (Variant::Rpc1, Oracle) => brute_rpc1(h, target),
        (Variant::Rpcplus, Simplegreedy) => {
            let m = simple_greedy(&h.positive_part())?;
            if m.weight() < target {
                return Err(SolveError::Infeasible { target });
            }
            Ok(m)
        }
        (Variant::Rpcplus, Ls2) => ls2(h, target, lambda, opts.ls2).map(|o| o.matching),
        (Variant::Rpcplus, Oracle) => brute_rpcplus(h, target),
        (Variant::Rp, Exactnf2) => max_weight_matching(h),
        (Variant::Rp, Oracle) => brute_rp(h),
        _ => unreachable!("checked by run_batch"),
    }
}

/// Solves `batch` with every algorithm for every target, in that nesting
/// order (targets outer). Infeasibility is recorded in the report.
pub fn run_batch(
    batch: &Batch,
    variant: Variant,
    algorithms: &[Algorithm],
    target_specs: &[TargetSpec],
    opts: &RunOptions,
) -> Result<Vec<IntervalReport>, RunError> {
    if let Some(&algorithm) = algorithms.iter().find(|a| !a.supports(variant)) {
        return Err(RunError::Unsupported { algorithm, variant });
    }
    let h = build_hypergraph(&batch.matches, &batch.drivers)?;
    let lambda = lambda_of(batch);
    let targets = targets(&h, variant, lambda).map_err(RunError::Seed)?;
    let specs: Vec<(String, Money)> = if variant == Variant::Rp {
        vec![("none".to_string(), Money::ZERO)]
    } else {
        target_specs.iter().map(|s| (s.label(), targets.resolve(*s))).collect()
    };

    let mut out = Vec::new();
    for (label, target) in specs {
        for &algorithm in algorithms {
            let start = Instant::now();
            let result = solve(&h, variant, algorithm, target, lambda, opts);
            let runtime_ms = if opts.timing {
                start.elapsed().as_millis() as u64
            } else {
                0
            };
            let (m, feasible, error) = match result {
                Ok(m) => (m, true, None),
                Err(SolveError::Infeasible { .. }) => (Matching::empty(), false, None),
                Err(e) => (Matching::empty(), false, Some(e.to_string())),
            };
            out.push(IntervalReport {
                interval: batch.interval.0,
                variant,
                algorithm,
                target_label: label.clone(),
                target_cents: target.cents(),
                feasible,
                error,
                served: m.served(),
                matches: m.len(),
                profit_cents: m.weight().cents(),
                negative_matches: m.negative_edges(&h),
                runtime_ms,
                drivers: batch.drivers.len(),
                occupancy: occupancy(m.served(), batch.drivers.len()),
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rpc_core::{Driver, DriverId, FeasibleMatch, Interval, LocationId, VehicleType, Visit};

    fn driver(id: u32, capacity: u32) -> Driver {
        Driver {
            id: DriverId(id),
            origin: LocationId(0),
            destination: LocationId(1),
            capacity,
            earliest_departure: 0,
            latest_arrival: 100,
            detour_limit: 10,
            max_duration: 100,
            vehicle_type: VehicleType::SmallSedan,
        }
    }

    fn matched(d: u32, ps: &[u32], profit: i64) -> FeasibleMatch {
        let mut visits = vec![Visit::Start];
        visits.extend(ps.iter().map(|&p| Visit::Pickup(rpc_core::PassengerId(p))));
        visits.extend(ps.iter().map(|&p| Visit::Dropoff(rpc_core::PassengerId(p))));
        visits.push(Visit::End);
        FeasibleMatch {
            driver: DriverId(d),
            passengers: ps.iter().map(|&p| rpc_core::PassengerId(p)).collect(),
            path: vec![LocationId(0); visits.len()],
            legs: vec![
                rpc_core::Leg {
                    distance: 1,
                    duration: 1
                };
                visits.len() - 1
            ],
            visits,
            take_rates: Vec::new(),
            revenue: Money::from_cents(profit),
            cost: Money::ZERO,
            profit: Money::from_cents(profit),
        }
    }

    fn batch() -> Batch {
        Batch {
            interval: Interval(3),
            drivers: (0..10).map(|i| driver(i, 1)).collect(),
            passengers: Vec::new(),
            matches: vec![
                matched(0, &[0], 50),
                matched(1, &[0], 40),
                matched(1, &[1], 30),
                matched(2, &[2], -20),
                matched(3, &[3], -5),
            ],
        }
    }

    fn opts() -> RunOptions {
        RunOptions {
            timing: false,
            ..RunOptions::default()
        }
    }

    #[test]
    fn occupancy_formula() {
        assert_eq!(occupancy(9, 10), 1.9);
        assert_eq!(occupancy(0, 0), 0.0);
    }

    #[test]
    fn full_target_returns_the_max_weight() {
        let b = batch();
        let rows = run_batch(
            &b,
            Variant::Rpc1,
            &[Algorithm::Exactnf2],
            &[TargetSpec::Factor(1.0)],
            &opts(),
        )
        .unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!((rows[0].profit_cents, rows[0].target_cents), (80, 80));
        assert!(rows[0].feasible);
    }

    #[test]
    fn exact_and_oracle_agree_on_a_small_batch() {
        let b = batch();
        let algos = [Algorithm::Exactnf2, Algorithm::Greedy, Algorithm::Oracle];
        let rows = run_batch(&b, Variant::Rpc1, &algos, &TargetSpec::LEVELS, &opts()).unwrap();
        assert_eq!(rows.len(), 9);
        for chunk in rows.chunks(3) {
            assert_eq!(chunk[0].served, chunk[2].served);
            assert_eq!(chunk[0].profit_cents, chunk[2].profit_cents);
            for r in chunk {
                assert!(!r.feasible || r.profit_cents >= r.target_cents);
            }
        }
        // 0.6 * 80 = 48 admits both negative edges: 80 - 5 - 20 = 55
        assert_eq!((rows[6].served, rows[6].negative_matches), (4, 2));
    }

    #[test]
    fn infeasible_targets_report_nothing() {
        let rows = run_batch(
            &batch(),
            Variant::Rpc1,
            &[Algorithm::Greedy],
            &[TargetSpec::Cents(81)],
            &opts(),
        )
        .unwrap();
        assert!(!rows[0].feasible);
        assert_eq!((rows[0].served, rows[0].matches, rows[0].profit_cents), (0, 0, 0));
        assert_eq!(rows[0].occupancy, 1.0);
    }

    #[test]
    fn unsupported_pairs_are_rejected() {
        assert!(matches!(
            run_batch(
                &batch(),
                Variant::Rpc1,
                &[Algorithm::Ls2],
                &[TargetSpec::Level(1)],
                &opts()
            ),
            Err(RunError::Unsupported { .. })
        ));
    }

    #[test]
    fn multi_seat_targets_are_ordered() {
        let mut b = batch();
        b.drivers = (0..4).map(|i| driver(i, 2)).collect();
        b.matches.push(matched(2, &[2, 3], 25));
        let h = build_hypergraph(&b.matches, &b.drivers).unwrap();
        let t = targets(&h, Variant::Rpcplus, 2).unwrap();
        assert!(t.levels[0] >= t.levels[1] && t.levels[1] >= t.levels[2]);
        let rows = run_batch(
            &b,
            Variant::Rpcplus,
            &[Algorithm::Ls2, Algorithm::Oracle],
            &TargetSpec::LEVELS,
            &opts(),
        )
        .unwrap();
        for r in &rows {
            assert!(r.feasible && r.profit_cents >= r.target_cents);
            assert_eq!(r.negative_matches, 0);
        }
    }

    #[test]
    fn target_specs_parse() {
        assert_eq!("c2".parse::<TargetSpec>().unwrap(), TargetSpec::Level(2));
        assert_eq!("0.8w".parse::<TargetSpec>().unwrap(), TargetSpec::Factor(0.8));
        assert_eq!("-300c".parse::<TargetSpec>().unwrap(), TargetSpec::Cents(-300));
        assert!("c4".parse::<TargetSpec>().is_err());
        assert!("12".parse::<TargetSpec>().is_err());
    }
}

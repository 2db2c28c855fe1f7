//! Feasible-match enumeration: candidate pruning, shortest feasible paths and
//! capped base/extension phases.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Driver, FeasibleMatch, Leg, LocationId, Money, Passenger, Visit};
use crate::network::TravelModel;

/// Limits applied while enumerating matches.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenCaps {
    pub max_base_per_driver: usize,
    pub max_total_per_driver: usize,
    pub max_base_per_passenger: usize,
    /// Factor applied to the straight-line estimate of a driver's route.
    pub tau: f64,
}

impl GenCaps {
    pub fn capacity_one() -> Self {
        GenCaps {
            max_base_per_driver: 100,
            max_total_per_driver: 500,
            max_base_per_passenger: 20,
            tau: 0.6,
        }
    }

    pub fn multi_capacity() -> Self {
        GenCaps {
            tau: 0.8,
            ..Self::capacity_one()
        }
    }

    pub fn is_valid(&self) -> bool {
        self.max_base_per_driver >= 1
            && self.max_total_per_driver >= 1
            && self.max_base_per_passenger >= 1
            && self.tau > 0.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RouteError {
    #[error("{size} passengers exceed capacity {capacity}")]
    OverCapacity { size: usize, capacity: u32 },
    #[error("no visiting order satisfies every constraint")]
    Infeasible,
}

/// A driver route through a group of passengers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Route {
    pub visits: Vec<Visit>,
    pub path: Vec<LocationId>,
    pub legs: Vec<Leg>,
}

impl Route {
    pub fn distance(&self) -> i64 {
        self.legs.iter().map(|l| l.distance).sum()
    }
}

/// Cheap filter: can the driver's range cover the straight-line estimate of
/// the detour through the passenger?
pub fn candidate_pair(driver: &Driver, passenger: &Passenger, travel: &TravelModel, tau: f64) -> bool {
    let speed = travel.network.speed(travel.interval, driver.origin, driver.destination);
    let range = driver.max_duration as f64 * speed;
    let sl = |a, b| travel.straight_line(a, b);
    let estimate = sl(driver.origin, passenger.origin)
        + sl(passenger.origin, passenger.destination)
        + sl(passenger.destination, driver.destination);
    range >= tau * estimate
}

/// Latest time the driver may arrive, or `None` if its own trip is impossible.
fn driver_deadline(driver: &Driver, travel: &TravelModel) -> Option<i64> {
    let (_, direct) = travel.leg(driver.origin, driver.destination)?;
    let budget = driver.max_duration.min(direct + driver.detour_limit);
    Some(driver.latest_arrival.min(driver.earliest_departure + budget))
}

struct Search<'a> {
    travel: &'a TravelModel<'a>,
    driver: &'a Driver,
    riders: &'a [&'a Passenger],
    deadline: i64,
    picked_at: Vec<Option<i64>>,
    dropped: Vec<bool>,
    tokens: Vec<usize>,
    best: Option<(i64, Vec<usize>)>,
}

impl Search<'_> {
    fn stop(&self, token: usize) -> LocationId {
        stop_of(self.riders[token / 2], token)
    }

    /// Some constraint is already broken at time `t` and cannot recover.
    fn violated(&self, t: i64) -> bool {
        t > self.deadline
            || self.riders.iter().enumerate().any(|(j, p)| {
                !self.dropped[j]
                    && (t > p.latest_arrival || self.picked_at[j].is_some_and(|at| t - at > p.max_duration))
            })
    }

    // Children are tried in increasing token order, so the first optimum found
    // is the lexicographically smallest one; later ties are pruned.
    fn dfs(&mut self, here: LocationId, t: i64, dist: i64) {
        let beaten = |best: &Option<(i64, Vec<usize>)>, d: i64| best.as_ref().is_some_and(|b| d >= b.0);
        if self.tokens.len() == 2 * self.riders.len() {
            if let Some((d, dt)) = self.travel.leg(here, self.driver.destination) {
                if !beaten(&self.best, dist + d) && t + dt <= self.deadline {
                    self.best = Some((dist + d, self.tokens.clone()));
                }
            }
            return;
        }
        for j in 0..self.riders.len() {
            if self.dropped[j] {
                continue;
            }
            let token = if self.picked_at[j].is_none() { 2 * j } else { 2 * j + 1 };
            let next = self.stop(token);
            let Some((d, dt)) = self.travel.leg(here, next) else {
                continue;
            };
            if beaten(&self.best, dist + d) {
                continue;
            }
            let mut arrive = t + dt;
            if token % 2 == 0 {
                arrive = arrive.max(self.riders[j].earliest_departure);
            }
            if self.violated(arrive) {
                continue;
            }
            self.tokens.push(token);
            if token % 2 == 0 {
                self.picked_at[j] = Some(arrive);
            } else {
                self.dropped[j] = true;
            }
            self.dfs(next, arrive, dist + d);
            if token % 2 == 0 {
                self.picked_at[j] = None;
            } else {
                self.dropped[j] = false;
            }
            self.tokens.pop();
        }
    }
}

/// Shortest route serving `riders` that meets every time window, ride-time
/// limit and the driver's detour and duration budgets. Ties go to the
/// lexicographically smallest visiting order, where rider `j` (by position)
/// has pickup token `2j` and drop-off token `2j + 1`.
pub fn shortest_feasible_path(
    driver: &Driver,
    riders: &[&Passenger],
    travel: &TravelModel,
) -> Result<Route, RouteError> {
    if riders.len() > driver.capacity as usize {
        return Err(RouteError::OverCapacity {
            size: riders.len(),
            capacity: driver.capacity,
        });
    }
    let deadline = driver_deadline(driver, travel).ok_or(RouteError::Infeasible)?;
    let mut search = Search {
        travel,
        driver,
        riders,
        deadline,
        picked_at: vec![None; riders.len()],
        dropped: vec![false; riders.len()],
        tokens: Vec::with_capacity(2 * riders.len()),
        best: None,
    };
    search.dfs(driver.origin, driver.earliest_departure, 0);
    let (_, tokens) = search.best.ok_or(RouteError::Infeasible)?;

    let mut visits = vec![Visit::Start];
    let mut path = vec![driver.origin];
    for &token in &tokens {
        let p = riders[token / 2];
        visits.push(if token % 2 == 0 {
            Visit::Pickup(p.id)
        } else {
            Visit::Dropoff(p.id)
        });
        path.push(stop_of(p, token));
    }
    visits.push(Visit::End);
    path.push(driver.destination);
    let legs = path
        .windows(2)
        .map(|w| {
            let (distance, duration) = travel.leg(w[0], w[1]).expect("route legs were reachable");
            Leg { distance, duration }
        })
        .collect();
    Ok(Route { visits, path, legs })
}

fn stop_of(p: &Passenger, token: usize) -> LocationId {
    if token.is_multiple_of(2) {
        p.origin
    } else {
        p.destination
    }
}

fn unpriced(driver: &Driver, riders: &[&Passenger], route: Route) -> FeasibleMatch {
    FeasibleMatch {
        driver: driver.id,
        passengers: riders.iter().map(|p| p.id).collect(),
        path: route.path,
        visits: route.visits,
        legs: route.legs,
        take_rates: Vec::new(),
        revenue: Money::ZERO,
        cost: Money::ZERO,
        profit: Money::ZERO,
    }
}

/// All feasible matches of a batch, unpriced.
///
/// Phase 1 finds each driver's base matches (one passenger) among candidate
/// pairs. Caps are then applied in a fixed order: drivers by id, each keeping
/// its lowest-id passengers that still have base slots left. Phase 2 grows
/// every feasible group by one of the driver's kept base passengers at a time.
///
/// Output is ordered by driver id; each driver's matches come by group size,
/// then in discovery order. The result does not depend on thread scheduling.
pub fn enumerate_matches(
    drivers: &[Driver],
    passengers: &[Passenger],
    travel: &TravelModel,
    caps: &GenCaps,
) -> Vec<FeasibleMatch> {
    let mut drivers: Vec<&Driver> = drivers.iter().collect();
    drivers.sort_by_key(|d| d.id);
    let mut passengers: Vec<&Passenger> = passengers.iter().collect();
    passengers.sort_by_key(|p| p.id);

    let feasible_bases: Vec<Vec<usize>> = drivers
        .par_iter()
        .map(|d| {
            passengers
                .iter()
                .enumerate()
                .filter(|(_, p)| candidate_pair(d, p, travel, caps.tau))
                .filter(|(_, p)| shortest_feasible_path(d, &[p], travel).is_ok())
                .map(|(j, _)| j)
                .collect()
        })
        .collect();

    let mut slots = vec![caps.max_base_per_passenger; passengers.len()];
    let accepted: Vec<Vec<usize>> = feasible_bases
        .into_iter()
        .map(|bases| {
            let mut kept = Vec::new();
            for j in bases {
                if kept.len() == caps.max_base_per_driver.min(caps.max_total_per_driver) {
                    break;
                }
                if slots[j] > 0 {
                    slots[j] -= 1;
                    kept.push(j);
                }
            }
            kept
        })
        .collect();

    drivers
        .par_iter()
        .zip(accepted)
        .map(|(d, bases)| extend_driver(d, &passengers, &bases, travel, caps))
        .collect::<Vec<_>>()
        .concat()
}

fn extend_driver(
    driver: &Driver,
    passengers: &[&Passenger],
    bases: &[usize],
    travel: &TravelModel,
    caps: &GenCaps,
) -> Vec<FeasibleMatch> {
    let route = |group: &[usize]| {
        let riders: Vec<&Passenger> = group.iter().map(|&j| passengers[j]).collect();
        shortest_feasible_path(driver, &riders, travel).map(|r| unpriced(driver, &riders, r))
    };
    let mut out: Vec<FeasibleMatch> = bases
        .iter()
        .map(|&j| route(&[j]).expect("base matches were feasible"))
        .collect();
    let mut level: Vec<Vec<usize>> = bases.iter().map(|&j| vec![j]).collect();
    let mut attempted: HashSet<Vec<usize>> = HashSet::new();
    while !level.is_empty() && level[0].len() < driver.capacity as usize {
        let mut next = Vec::new();
        for group in &level {
            for &j in bases {
                if out.len() >= caps.max_total_per_driver {
                    return out;
                }
                if group.contains(&j) {
                    continue;
                }
                let mut bigger = group.clone();
                bigger.push(j);
                bigger.sort_unstable();
                if !attempted.insert(bigger.clone()) {
                    continue;
                }
                if let Ok(m) = route(&bigger) {
                    out.push(m);
                    next.push(bigger);
                }
            }
        }
        level = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{DriverId, PassengerId, VehicleType};
    use crate::network::{NetworkVertex, RoadNetwork, ShortestPaths, SpeedTable};
    use crate::time::Interval;

    /// Points on a line, consecutive ones joined both ways; speed 1 m/s.
    fn line(xs: &[f64]) -> RoadNetwork {
        let vertices = xs
            .iter()
            .enumerate()
            .map(|(i, &x)| NetworkVertex {
                id: LocationId(i as u32),
                x,
                y: 0.0,
                region: 0,
            })
            .collect();
        let mut edges = Vec::new();
        for i in 1..xs.len() {
            let length = (xs[i] - xs[i - 1]).abs().ceil() as i64;
            let (a, b) = (LocationId(i as u32 - 1), LocationId(i as u32));
            edges.push(crate::network::NetworkEdge { from: a, to: b, length });
            edges.push(crate::network::NetworkEdge { from: b, to: a, length });
        }
        RoadNetwork {
            vertices,
            edges,
            speeds: SpeedTable::uniform(1, 1.0, 1.0),
        }
    }

    fn driver(origin: u32, destination: u32, capacity: u32, max_duration: i64, detour: i64) -> Driver {
        Driver {
            id: DriverId(0),
            origin: LocationId(origin),
            destination: LocationId(destination),
            capacity,
            earliest_departure: 0,
            latest_arrival: 100_000,
            detour_limit: detour,
            max_duration,
            vehicle_type: VehicleType::SmallSedan,
        }
    }

    fn passenger(id: u32, origin: u32, destination: u32) -> Passenger {
        Passenger {
            id: PassengerId(id),
            origin: LocationId(origin),
            destination: LocationId(destination),
            earliest_departure: 0,
            latest_arrival: 100_000,
            max_duration: 100_000,
            surge_factor: 1.0,
            tip_expectation: Money::ZERO,
        }
    }

    #[test]
    fn candidate_pair_geometry() {
        let net = line(&[0.0, 1000.0, 2000.0, 3000.0]);
        let sp = ShortestPaths::compute(&net);
        let travel = TravelModel::new(&net, &sp, Interval(0));
        let p = passenger(0, 1, 2);
        assert!(candidate_pair(&driver(0, 3, 1, 3000, 0), &p, &travel, 1.0));
        assert!(!candidate_pair(&driver(0, 3, 1, 2999, 0), &p, &travel, 1.0));
        assert!(candidate_pair(&driver(0, 3, 1, 1, 0), &p, &travel, 0.0));
    }

    #[test]
    fn single_rider_route_is_forced() {
        let net = line(&[0.0, 1000.0, 2000.0, 3000.0]);
        let sp = ShortestPaths::compute(&net);
        let travel = TravelModel::new(&net, &sp, Interval(0));
        let p = passenger(7, 1, 2);
        let r = shortest_feasible_path(&driver(0, 3, 1, 5000, 0), &[&p], &travel).unwrap();
        assert_eq!(r.path, vec![LocationId(0), LocationId(1), LocationId(2), LocationId(3)]);
        assert_eq!(
            r.visits,
            vec![
                Visit::Start,
                Visit::Pickup(PassengerId(7)),
                Visit::Dropoff(PassengerId(7)),
                Visit::End
            ]
        );
        assert_eq!(r.distance(), 3000);
    }

    #[test]
    fn zero_detour_rejects_off_path_rider() {
        let net = line(&[0.0, 1000.0, 2000.0, 3000.0]);
        let sp = ShortestPaths::compute(&net);
        let travel = TravelModel::new(&net, &sp, Interval(0));
        // Driver goes 1 -> 2; the rider wants 0 -> 1, behind the driver.
        let p = passenger(0, 0, 1);
        assert_eq!(
            shortest_feasible_path(&driver(1, 2, 1, 10_000, 0), &[&p], &travel),
            Err(RouteError::Infeasible)
        );
        assert!(shortest_feasible_path(&driver(1, 2, 1, 10_000, 2000), &[&p], &travel).is_ok());
    }

    #[test]
    fn capacity_is_enforced() {
        let net = line(&[0.0, 10.0]);
        let sp = ShortestPaths::compute(&net);
        let travel = TravelModel::new(&net, &sp, Interval(0));
        let (a, b) = (passenger(0, 0, 1), passenger(1, 0, 1));
        assert_eq!(
            shortest_feasible_path(&driver(0, 1, 1, 100, 0), &[&a, &b], &travel),
            Err(RouteError::OverCapacity { size: 2, capacity: 1 })
        );
    }

    #[test]
    fn waiting_counts_against_budgets() {
        let net = line(&[0.0, 1000.0]);
        let sp = ShortestPaths::compute(&net);
        let travel = TravelModel::new(&net, &sp, Interval(0));
        let mut p = passenger(0, 0, 1);
        p.earliest_departure = 500;
        // Direct trip takes 1000 s; waiting 500 s needs a 500 s detour budget.
        assert!(shortest_feasible_path(&driver(0, 1, 1, 5000, 499), &[&p], &travel).is_err());
        assert!(shortest_feasible_path(&driver(0, 1, 1, 5000, 500), &[&p], &travel).is_ok());
        assert!(shortest_feasible_path(&driver(0, 1, 1, 1499, 500), &[&p], &travel).is_err());
    }

    #[test]
    fn empty_batch_yields_nothing() {
        let net = line(&[0.0, 10.0]);
        let sp = ShortestPaths::compute(&net);
        let travel = TravelModel::new(&net, &sp, Interval(0));
        let ps = [passenger(0, 0, 1)];
        assert!(enumerate_matches(&[], &ps, &travel, &GenCaps::capacity_one()).is_empty());
    }

    #[test]
    fn two_compatible_riders_give_three_matches() {
        let net = line(&[0.0, 1000.0, 2000.0, 3000.0]);
        let sp = ShortestPaths::compute(&net);
        let travel = TravelModel::new(&net, &sp, Interval(0));
        let ps = [passenger(0, 1, 2), passenger(1, 1, 2)];
        let ms = enumerate_matches(
            &[driver(0, 3, 2, 10_000, 100)],
            &ps,
            &travel,
            &GenCaps::multi_capacity(),
        );
        let groups: Vec<Vec<u32>> = ms.iter().map(|m| m.passengers.iter().map(|p| p.0).collect()).collect();
        assert_eq!(groups, vec![vec![0], vec![1], vec![0, 1]]);
    }

    #[test]
    fn passenger_cap_is_first_come_by_driver_id() {
        let net = line(&[0.0, 1000.0, 2000.0, 3000.0]);
        let sp = ShortestPaths::compute(&net);
        let travel = TravelModel::new(&net, &sp, Interval(0));
        let drivers: Vec<Driver> = (0..3)
            .rev()
            .map(|i| Driver {
                id: DriverId(i),
                ..driver(0, 3, 1, 10_000, 100)
            })
            .collect();
        let caps = GenCaps {
            max_base_per_passenger: 2,
            ..GenCaps::capacity_one()
        };
        let ms = enumerate_matches(&drivers, &[passenger(0, 1, 2)], &travel, &caps);
        let ids: Vec<u32> = ms.iter().map(|m| m.driver.0).collect();
        assert_eq!(ids, vec![0, 1]);
    }
}

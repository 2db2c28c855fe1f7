//! Independent re-check of generated matches.
//!
//! Shares no code with match generation: distances come from Floyd-Warshall
//! and visiting orders from brute-force permutation. Cubic in the network
//! size, so meant for small networks.

use crate::model::{Driver, FeasibleMatch, LocationId, Passenger, Visit};
use crate::network::RoadNetwork;
use crate::time::Interval;

pub struct Auditor<'a> {
    network: &'a RoadNetwork,
    interval: Interval,
    n: usize,
    dist: Vec<Option<i64>>,
}

impl<'a> Auditor<'a> {
    pub fn new(network: &'a RoadNetwork, interval: Interval) -> Self {
        let n = network.vertices.len();
        let mut dist = vec![None; n * n];
        for i in 0..n {
            dist[i * n + i] = Some(0);
        }
        for e in &network.edges {
            let slot = &mut dist[e.from.index() * n + e.to.index()];
            *slot = Some(slot.map_or(e.length, |d: i64| d.min(e.length)));
        }
        for k in 0..n {
            for i in 0..n {
                let Some(ik) = dist[i * n + k] else { continue };
                for j in 0..n {
                    if let Some(kj) = dist[k * n + j] {
                        let through = ik + kj;
                        if dist[i * n + j].is_none_or(|d| through < d) {
                            dist[i * n + j] = Some(through);
                        }
                    }
                }
            }
        }
        Auditor {
            network,
            interval,
            n,
            dist,
        }
    }

    pub fn distance(&self, a: LocationId, b: LocationId) -> Option<i64> {
        self.dist[a.index() * self.n + b.index()]
    }

    fn seconds(&self, a: LocationId, b: LocationId, meters: i64) -> i64 {
        let ra = self.network.vertices[a.index()].region;
        let rb = self.network.vertices[b.index()].region;
        let speed = self.network.speeds.speed(self.interval, ra, rb);
        (meters as f64 / speed).ceil() as i64
    }

    /// Drives `order` (event `2j` picks up rider `j`, `2j + 1` drops it off)
    /// and returns the route distance if every constraint holds.
    pub fn simulate(&self, driver: &Driver, riders: &[&Passenger], order: &[usize]) -> Result<i64, String> {
        let stop = |e: usize| {
            let p = riders[e / 2];
            if e.is_multiple_of(2) {
                p.origin
            } else {
                p.destination
            }
        };
        let mut at = driver.origin;
        let mut clock = driver.earliest_departure;
        let mut total = 0;
        let mut boarded = vec![None; riders.len()];
        let mut hop = |from: LocationId, to: LocationId, clock: &mut i64| -> Result<(), String> {
            let d = self.distance(from, to).ok_or(format!("{to} unreachable from {from}"))?;
            total += d;
            *clock += self.seconds(from, to, d);
            Ok(())
        };
        for &e in order {
            let j = e / 2;
            let p = riders[j];
            hop(at, stop(e), &mut clock)?;
            at = stop(e);
            if e % 2 == 0 {
                clock = clock.max(p.earliest_departure);
                boarded[j] = Some(clock);
            } else {
                let start = boarded[j].ok_or(format!("{} dropped before pickup", p.id))?;
                if clock > p.latest_arrival {
                    return Err(format!("{} arrives at {clock}, after {}", p.id, p.latest_arrival));
                }
                if clock - start > p.max_duration {
                    return Err(format!("{} rides {} s, over {}", p.id, clock - start, p.max_duration));
                }
            }
        }
        hop(at, driver.destination, &mut clock)?;
        let elapsed = clock - driver.earliest_departure;
        let direct = self
            .distance(driver.origin, driver.destination)
            .map(|d| self.seconds(driver.origin, driver.destination, d))
            .ok_or("driver destination unreachable")?;
        if clock > driver.latest_arrival {
            return Err(format!("driver arrives at {clock}, after {}", driver.latest_arrival));
        }
        if elapsed > driver.max_duration {
            return Err(format!("driver busy {elapsed} s, over {}", driver.max_duration));
        }
        if elapsed > direct + driver.detour_limit {
            return Err(format!(
                "driver detour {} s, over {}",
                elapsed - direct,
                driver.detour_limit
            ));
        }
        Ok(total)
    }

    /// Shortest distance over every feasible visiting order.
    pub fn best_distance(&self, driver: &Driver, riders: &[&Passenger]) -> Option<i64> {
        valid_orders(riders.len())
            .iter()
            .filter_map(|o| self.simulate(driver, riders, o).ok())
            .min()
    }

    /// Full re-check of `m`: shape, stop locations, leg lengths and times,
    /// every time constraint, capacity and route optimality.
    pub fn check(&self, m: &FeasibleMatch, driver: &Driver, riders: &[&Passenger]) -> Result<(), String> {
        m.check_shape().map_err(|e| e.to_string())?;
        if m.driver != driver.id {
            return Err(format!("match names {} but driver is {}", m.driver, driver.id));
        }
        let ids: Vec<_> = riders.iter().map(|p| p.id).collect();
        if ids != m.passengers {
            return Err("rider list differs from match".into());
        }
        if riders.len() > driver.capacity as usize {
            return Err("capacity exceeded".into());
        }
        let mut order = Vec::new();
        for (k, v) in m.visits.iter().enumerate() {
            let (loc, event) = match *v {
                Visit::Start => (driver.origin, None),
                Visit::End => (driver.destination, None),
                Visit::Pickup(p) | Visit::Dropoff(p) => {
                    let j = ids
                        .iter()
                        .position(|&q| q == p)
                        .ok_or(format!("stranger {p} on route"))?;
                    let e = 2 * j + usize::from(matches!(v, Visit::Dropoff(_)));
                    (
                        if e % 2 == 0 {
                            riders[j].origin
                        } else {
                            riders[j].destination
                        },
                        Some(e),
                    )
                }
            };
            if m.path[k] != loc {
                return Err(format!("stop {k} at {} but should be {loc}", m.path[k]));
            }
            order.extend(event);
        }
        for (k, leg) in m.legs.iter().enumerate() {
            let (a, b) = (m.path[k], m.path[k + 1]);
            let d = self.distance(a, b).ok_or(format!("leg {k} unreachable"))?;
            if leg.distance != d || leg.duration != self.seconds(a, b, d) {
                return Err(format!("leg {k} is {leg:?}, expected {d} m"));
            }
        }
        let total = self.simulate(driver, riders, &order)?;
        let best = self.best_distance(driver, riders).ok_or("no feasible order")?;
        if total != best {
            return Err(format!("route is {total} m but {best} m is possible"));
        }
        Ok(())
    }
}

/// Every order of the `2k` events in which each pickup precedes its drop-off.
pub fn valid_orders(k: usize) -> Vec<Vec<usize>> {
    fn permute(rest: &mut Vec<usize>, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest.is_empty() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..rest.len() {
            let e = rest.remove(i);
            prefix.push(e);
            permute(rest, prefix, out);
            prefix.pop();
            rest.insert(i, e);
        }
    }
    let mut all = Vec::new();
    permute(&mut (0..2 * k).collect(), &mut Vec::new(), &mut all);
    all.retain(|o| {
        (0..k).all(|j| {
            let pick = o.iter().position(|&e| e == 2 * j);
            let drop = o.iter().position(|&e| e == 2 * j + 1);
            pick < drop
        })
    });
    all
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_counts() {
        assert_eq!(valid_orders(1), vec![vec![0, 1]]);
        assert_eq!(valid_orders(2).len(), 6);
        assert_eq!(valid_orders(3).len(), 90);
    }
}

use std::collections::{HashMap, HashSet};

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rpc_core::audit::{valid_orders, Auditor};
use rpc_core::matchgen::{enumerate_matches, shortest_feasible_path, GenCaps};
use rpc_core::network::{RoadNetwork, ShortestPaths, SpeedTable, TravelModel};
use rpc_core::{Driver, DriverId, Interval, LocationId, Passenger, PassengerId, VehicleType};

/// A small grid with lengthened edges and random regional speeds.
fn network(rng: &mut ChaCha8Rng) -> RoadNetwork {
    let side = rng.gen_range(3..=6);
    let regions = 4;
    let speeds = SpeedTable {
        regions,
        off_peak: (0..regions * regions).map(|_| rng.gen_range(3.0..10.0)).collect(),
        peak: (0..regions * regions).map(|_| rng.gen_range(2.0..8.0)).collect(),
    };
    let mut net = RoadNetwork::grid(side, 400.0, 2, speeds);
    for e in &mut net.edges {
        e.length += rng.gen_range(0..200);
    }
    net.validate().unwrap();
    net
}

fn spot(rng: &mut ChaCha8Rng, net: &RoadNetwork) -> LocationId {
    LocationId(rng.gen_range(0..net.len() as u32))
}

fn drivers(rng: &mut ChaCha8Rng, net: &RoadNetwork, n: u32, capacity: u32) -> Vec<Driver> {
    (0..n)
        .map(|i| {
            let ed = rng.gen_range(0..900);
            let max_duration = rng.gen_range(600..3000);
            Driver {
                id: DriverId(i),
                origin: spot(rng, net),
                destination: spot(rng, net),
                capacity,
                earliest_departure: ed,
                latest_arrival: ed + rng.gen_range(600..4000),
                detour_limit: rng.gen_range(0..1500),
                max_duration,
                vehicle_type: VehicleType::SmallSedan,
            }
        })
        .collect()
}

fn passengers(rng: &mut ChaCha8Rng, net: &RoadNetwork, n: u32) -> Vec<Passenger> {
    (0..n)
        .map(|i| {
            let ed = rng.gen_range(0..900);
            Passenger {
                id: PassengerId(i),
                origin: spot(rng, net),
                destination: spot(rng, net),
                earliest_departure: ed,
                latest_arrival: ed + rng.gen_range(300..3000),
                max_duration: rng.gen_range(300..2500),
                surge_factor: 1.0,
                tip_expectation: rpc_core::Money::ZERO,
            }
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn two_rider_route_is_best_of_six_orders(seed: u64, peak: bool) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let net = network(&mut rng);
        let sp = ShortestPaths::compute(&net);
        let interval = Interval(if peak { 4 } else { 0 });
        let travel = TravelModel::new(&net, &sp, interval);
        let audit = Auditor::new(&net, interval);
        let d = &drivers(&mut rng, &net, 1, 2)[0];
        let ps = passengers(&mut rng, &net, 2);
        let riders: Vec<&Passenger> = ps.iter().collect();
        prop_assert_eq!(valid_orders(2).len(), 6);
        let oracle = audit.best_distance(d, &riders);
        match shortest_feasible_path(d, &riders, &travel) {
            Ok(route) => prop_assert_eq!(Some(route.distance()), oracle),
            Err(_) => prop_assert_eq!(oracle, None),
        }
    }

    #[test]
    fn generated_matches_pass_audit_and_caps(seed: u64, capacity in 1u32..=3, peak: bool) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let net = network(&mut rng);
        let sp = ShortestPaths::compute(&net);
        let interval = Interval(if peak { 40 } else { 30 });
        let travel = TravelModel::new(&net, &sp, interval);
        let audit = Auditor::new(&net, interval);
        let ds = drivers(&mut rng, &net, 4, capacity);
        let ps = passengers(&mut rng, &net, 7);
        let caps = GenCaps { max_base_per_driver: 4, max_total_per_driver: 9, max_base_per_passenger: 2, tau: 0.8 };
        let matches = enumerate_matches(&ds, &ps, &travel, &caps);

        let mut bases: HashSet<(DriverId, PassengerId)> = HashSet::new();
        let mut per_driver: HashMap<DriverId, (usize, usize)> = HashMap::new();
        let mut per_passenger: HashMap<PassengerId, usize> = HashMap::new();
        for m in &matches {
            let d = ds.iter().find(|d| d.id == m.driver).unwrap();
            let riders: Vec<&Passenger> = m.passengers.iter().map(|p| &ps[p.index()]).collect();
            if let Err(e) = audit.check(m, d, &riders) {
                prop_assert!(false, "audit failed: {e}");
            }
            let counts = per_driver.entry(m.driver).or_default();
            counts.1 += 1;
            if m.passengers.len() == 1 {
                counts.0 += 1;
                bases.insert((m.driver, m.passengers[0]));
                *per_passenger.entry(m.passengers[0]).or_default() += 1;
            } else {
                for p in &m.passengers {
                    prop_assert!(bases.contains(&(m.driver, *p)), "group without base match");
                }
            }
        }
        for (base, total) in per_driver.values() {
            prop_assert!(*base <= caps.max_base_per_driver && *total <= caps.max_total_per_driver);
        }
        prop_assert!(per_passenger.values().all(|&n| n <= caps.max_base_per_passenger));
        let again = enumerate_matches(&ds, &ps, &travel, &caps);
        prop_assert_eq!(again, matches);
    }

    #[test]
    fn uncapped_generation_finds_every_feasible_pair(seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let net = network(&mut rng);
        let sp = ShortestPaths::compute(&net);
        let travel = TravelModel::new(&net, &sp, Interval(10));
        let audit = Auditor::new(&net, Interval(10));
        let ds = drivers(&mut rng, &net, 3, 2);
        let ps = passengers(&mut rng, &net, 4);
        let caps = GenCaps { max_base_per_driver: 100, max_total_per_driver: 500, max_base_per_passenger: 20, tau: 1e-9 };
        let found: HashSet<(DriverId, Vec<PassengerId>)> = enumerate_matches(&ds, &ps, &travel, &caps)
            .into_iter()
            .map(|m| (m.driver, m.passengers))
            .collect();
        for d in &ds {
            for (i, a) in ps.iter().enumerate() {
                let solo = audit.best_distance(d, &[a]).is_some();
                prop_assert_eq!(found.contains(&(d.id, vec![a.id])), solo);
                for b in &ps[i + 1..] {
                    let both_bases = solo && audit.best_distance(d, &[b]).is_some();
                    let pair = both_bases && audit.best_distance(d, &[a, b]).is_some();
                    prop_assert_eq!(found.contains(&(d.id, vec![a.id, b.id])), pair);
                }
            }
        }
    }
}

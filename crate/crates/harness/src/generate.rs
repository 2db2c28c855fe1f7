//! Synthetic city and per-interval trip generation.
//!
//! Every random draw comes from a ChaCha stream keyed by the config seed and
//! a purpose tag, so an interval can be regenerated alone and intervals can
//! be produced in any order or in parallel.

use rand::distributions::WeightedIndex;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rpc_core::network::{travel_seconds, RoadNetwork, ShortestPaths};
use rpc_core::pricing::METERS_PER_MILE;
use rpc_core::time::INTERVAL_SECONDS;
use rpc_core::{Driver, DriverId, Interval, LocationId, Money, Passenger, PassengerId, VehicleType};
use thiserror::Error;

use crate::config::GenConfig;

/// Give up on drawing a trip of admissible length after this many tries.
const MAX_TRIP_DRAWS: usize = 10_000;

#[derive(Debug, Error)]
pub enum GenError {
    #[error(transparent)]
    Config(#[from] crate::config::ConfigError),
    #[error("no trip within the length bounds after {MAX_TRIP_DRAWS} draws")]
    NoAdmissibleTrip,
    #[error("interval {0} is outside the simulated day")]
    BadInterval(u32),
}

/// Purpose tags for random streams.
#[derive(Debug, Clone, Copy)]
pub enum Stream {
    City,
    Demand(Interval),
    Pricing(Interval),
}

impl Stream {
    fn id(self) -> u64 {
        match self {
            Stream::City => 0,
            Stream::Demand(i) => (1 << 40) | u64::from(i.0),
            Stream::Pricing(i) => (2 << 40) | u64::from(i.0),
        }
    }
}

pub fn rng_for(seed: u64, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream.id());
    rng
}

/// The road network with its distance table and region popularity weights.
pub struct City {
    pub network: RoadNetwork,
    pub paths: ShortestPaths,
    region_vertices: Vec<Vec<LocationId>>,
    origin_weights: WeightedIndex<f64>,
    destination_weights: WeightedIndex<f64>,
}

impl City {
    pub fn build(config: &GenConfig) -> Result<City, GenError> {
        config.validate()?;
        let c = &config.city;
        let network = RoadNetwork::grid(c.grid_side, c.spacing, c.region_blocks, c.speed_table());
        let paths = ShortestPaths::compute(&network);
        let mut region_vertices = vec![Vec::new(); c.regions() as usize];
        for v in &network.vertices {
            region_vertices[v.region as usize].push(v.id);
        }
        let mut rng = rng_for(config.seed, Stream::City);
        let mut popularity = || {
            let w: Vec<f64> = (0..c.regions()).map(|_| rng.gen_range(0.5..1.5)).collect();
            WeightedIndex::new(w).expect("positive weights")
        };
        let origin_weights = popularity();
        let destination_weights = popularity();
        Ok(City {
            network,
            paths,
            region_vertices,
            origin_weights,
            destination_weights,
        })
    }

    fn regions(&self) -> usize {
        self.region_vertices.len()
    }

    fn vertex_in<R: Rng>(&self, region: usize, rng: &mut R) -> LocationId {
        *self.region_vertices[region].choose(rng).expect("regions are non-empty")
    }

    fn distance(&self, a: LocationId, b: LocationId) -> i64 {
        self.paths.distance(a, b).expect("grid networks are strongly connected")
    }

    fn sp_time(&self, interval: Interval, a: LocationId, b: LocationId) -> i64 {
        travel_seconds(self.distance(a, b), self.network.speed(interval, a, b))
    }

    /// Passengers requested in `interval` under `config`'s hourly profile.
    pub fn passenger_count(config: &GenConfig, interval: Interval) -> usize {
        let profile = &config.demand.hourly_profile;
        let top = profile.iter().cloned().fold(0.0, f64::max);
        if top <= 0.0 {
            return 0;
        }
        let w = profile[(interval.hour() - 6) as usize];
        (f64::from(config.demand.peak_passengers) * w / top).round() as usize
    }

    /// Drivers and passengers of one interval.
    pub fn generate(&self, config: &GenConfig, interval: Interval) -> Result<(Vec<Driver>, Vec<Passenger>), GenError> {
        if interval.0 >= rpc_core::time::INTERVALS_PER_DAY {
            return Err(GenError::BadInterval(interval.0));
        }
        let mut rng = rng_for(config.seed, Stream::Demand(interval));
        let n = Self::passenger_count(config, interval);
        let mut passengers = Vec::with_capacity(n);
        // od[x][y]: passengers from region x to region y
        let mut od = vec![vec![0usize; self.regions()]; self.regions()];
        for j in 0..n {
            let (x, y, o, d) = self.draw_trip(config, &mut rng, |r| {
                (r.sample(&self.origin_weights), r.sample(&self.destination_weights))
            })?;
            od[x][y] += 1;
            passengers.push(self.passenger(config, interval, PassengerId(j as u32), o, d, &mut rng));
        }

        let mut drivers = Vec::new();
        for (x, row) in od.iter().enumerate() {
            let demand: usize = row.iter().sum();
            if demand == 0 {
                continue;
            }
            let count = driver_count(config, interval, demand, &mut rng);
            let dest = WeightedIndex::new(row).expect("region has demand");
            for _ in 0..count {
                let (_, _, o, d) = self.draw_trip(config, &mut rng, |r| (x, r.sample(&dest)))?;
                let id = DriverId(drivers.len() as u32);
                drivers.push(self.driver(config, interval, id, o, d, &mut rng));
            }
        }
        Ok((drivers, passengers))
    }

    /// Draws regions with `regions` and a vertex in each until the trip
    /// length lies within the configured bounds.
    fn draw_trip<R: Rng>(
        &self,
        config: &GenConfig,
        rng: &mut R,
        mut regions: impl FnMut(&mut R) -> (usize, usize),
    ) -> Result<(usize, usize, LocationId, LocationId), GenError> {
        let lo = config.demand.min_trip_miles * METERS_PER_MILE;
        let hi = config.demand.max_trip_miles * METERS_PER_MILE;
        for _ in 0..MAX_TRIP_DRAWS {
            let (x, y) = regions(rng);
            let (o, d) = (self.vertex_in(x, rng), self.vertex_in(y, rng));
            let dist = self.distance(o, d) as f64;
            if o != d && lo <= dist && dist <= hi {
                return Ok((x, y, o, d));
            }
        }
        Err(GenError::NoAdmissibleTrip)
    }

    fn passenger<R: Rng>(
        &self,
        config: &GenConfig,
        interval: Interval,
        id: PassengerId,
        origin: LocationId,
        destination: LocationId,
        rng: &mut R,
    ) -> Passenger {
        let t = &config.trips;
        let f = &config.fares;
        let sp = self.sp_time(interval, origin, destination);
        let alpha = rng.gen_range(0..INTERVAL_SECONDS);
        let arrival = uniform(rng, t.passenger_arrival_factor);
        let duration = uniform(rng, t.passenger_duration_factor);
        let surge = if interval.is_peak() {
            uniform(rng, f.surge_peak)
        } else {
            f.surge_off_peak
        };
        let miles = (self.distance(origin, destination) as f64 / METERS_PER_MILE).round();
        let tip = f.tip_probability * (f.tip_cents_per_mile * miles).min(f.tip_cap_cents);
        Passenger {
            id,
            origin,
            destination,
            earliest_departure: alpha,
            latest_arrival: alpha + (arrival * sp as f64).ceil() as i64,
            max_duration: (duration * sp as f64).ceil() as i64,
            surge_factor: surge,
            tip_expectation: Money::from_cents_f64(tip),
        }
    }

    fn driver<R: Rng>(
        &self,
        config: &GenConfig,
        interval: Interval,
        id: DriverId,
        origin: LocationId,
        destination: LocationId,
        rng: &mut R,
    ) -> Driver {
        let t = &config.trips;
        let sp = self.sp_time(interval, origin, destination);
        let alpha = rng.gen_range(0..INTERVAL_SECONDS);
        let detour = ((uniform(rng, t.driver_detour_factor) * sp as f64).ceil() as i64).max(t.driver_detour_floor);
        let arrival = uniform(rng, t.driver_arrival_factor);
        let (vehicle_type, capacity) = vehicle(config, interval, rng);
        Driver {
            id,
            origin,
            destination,
            capacity,
            earliest_departure: alpha,
            latest_arrival: alpha + (arrival * (sp + detour) as f64).ceil() as i64,
            detour_limit: detour,
            max_duration: sp + detour,
            vehicle_type,
        }
    }
}

fn uniform<R: Rng>(rng: &mut R, [lo, hi]: [f64; 2]) -> f64 {
    if lo == hi {
        lo
    } else {
        rng.gen_range(lo..hi)
    }
}

/// Drivers leaving a region that has `demand` departing passengers.
pub fn driver_count<R: Rng>(config: &GenConfig, interval: Interval, demand: usize, rng: &mut R) -> usize {
    if config.variant.single_seat() {
        (uniform(rng, config.trips.rpc1_ratio) * demand as f64).round().max(1.0) as usize
    } else if interval.is_peak() {
        demand.div_ceil(4)
    } else {
        rng.gen_range(demand.div_ceil(3)..=demand.div_ceil(2))
    }
}

fn vehicle<R: Rng>(config: &GenConfig, interval: Interval, rng: &mut R) -> (VehicleType, u32) {
    let t = &config.trips;
    let sedan = if rng.gen_bool(0.5) {
        VehicleType::SmallSedan
    } else {
        VehicleType::MediumSedan
    };
    if config.variant.single_seat() {
        return (sedan, 1);
    }
    let suv_share = if interval.is_peak() {
        t.suv_share_peak
    } else {
        t.suv_share_off_peak
    };
    if rng.gen_bool(suv_share) {
        (
            VehicleType::MediumSuv,
            rng.gen_range(t.suv_capacity[0]..=t.suv_capacity[1]),
        )
    } else {
        (sedan, rng.gen_range(t.sedan_capacity[0]..=t.sedan_capacity[1]))
    }
}

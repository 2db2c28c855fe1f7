//! Interval instances: trips, matches and their JSON form.

use std::collections::HashMap;
use std::path::Path;

use anyhow::Context;
use rand::Rng;
use rpc_core::matchgen::{enumerate_matches, GenCaps};
use rpc_core::network::{RoadNetwork, ShortestPaths, TravelModel};
use rpc_core::pricing::{price_match, PricingError, PricingModel};
use rpc_core::{Driver, FeasibleMatch, Interval, Passenger, PassengerId};
use serde::{Deserialize, Serialize};

use crate::config::GenConfig;
use crate::generate::{rng_for, City, GenError, Stream};

/// Trips of one interval and, once generated, their priced matches.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Batch {
    pub interval: Interval,
    pub drivers: Vec<Driver>,
    pub passengers: Vec<Passenger>,
    #[serde(default)]
    pub matches: Vec<FeasibleMatch>,
}

/// A self-contained interval: the batch together with its road network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub interval: Interval,
    pub network: RoadNetwork,
    pub drivers: Vec<Driver>,
    pub passengers: Vec<Passenger>,
    #[serde(default)]
    pub matches: Vec<FeasibleMatch>,
}

impl Instance {
    pub fn new(network: RoadNetwork, batch: Batch) -> Self {
        Instance {
            interval: batch.interval,
            network,
            drivers: batch.drivers,
            passengers: batch.passengers,
            matches: batch.matches,
        }
    }

    pub fn into_parts(self) -> (RoadNetwork, Batch) {
        let batch = Batch {
            interval: self.interval,
            drivers: self.drivers,
            passengers: self.passengers,
            matches: self.matches,
        };
        (self.network, batch)
    }

    pub fn read(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing instance {}", path.display()))
    }

    pub fn write(&self, path: &Path) -> anyhow::Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
    }
}

/// Trips of `interval` on the city of `config`, without matches.
pub fn generate_instance(config: &GenConfig, interval: Interval) -> Result<Instance, GenError> {
    let city = City::build(config)?;
    let (drivers, passengers) = city.generate(config, interval)?;
    let batch = Batch {
        interval,
        drivers,
        passengers,
        matches: Vec::new(),
    };
    Ok(Instance::new(city.network, batch))
}

/// Prices `matches` in order, drawing take-rates from `rng`.
pub fn price_matches<R: Rng>(
    matches: &mut [FeasibleMatch],
    drivers: &[Driver],
    passengers: &[Passenger],
    pricing: &PricingModel,
    interval: Interval,
    rng: &mut R,
) -> Result<(), PricingError> {
    let drivers: HashMap<_, _> = drivers.iter().map(|d| (d.id, d)).collect();
    let riders: HashMap<PassengerId, &Passenger> = passengers.iter().map(|p| (p.id, p)).collect();
    for m in matches {
        let driver = drivers.get(&m.driver).expect("matches come from the batch drivers");
        price_match(m, driver, |p| riders.get(&p).copied(), pricing, interval, rng)?;
    }
    Ok(())
}

/// Enumerates and prices the matches of `batch`, replacing any it holds.
/// Take-rates come from the interval's pricing stream.
pub fn attach_matches(
    batch: &mut Batch,
    network: &RoadNetwork,
    paths: &ShortestPaths,
    caps: &GenCaps,
    pricing: &PricingModel,
    seed: u64,
) -> Result<(), PricingError> {
    let travel = TravelModel::new(network, paths, batch.interval);
    let mut matches = enumerate_matches(&batch.drivers, &batch.passengers, &travel, caps);
    let mut rng = rng_for(seed, Stream::Pricing(batch.interval));
    price_matches(
        &mut matches,
        &batch.drivers,
        &batch.passengers,
        pricing,
        batch.interval,
        &mut rng,
    )?;
    batch.matches = matches;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Variant;

    fn config() -> GenConfig {
        let mut c = GenConfig {
            variant: Variant::Rpcplus,
            ..GenConfig::default()
        };
        c.city.grid_side = 15;
        c.demand.peak_passengers = 40;
        c
    }

    #[test]
    fn instance_json_round_trips() {
        let c = config();
        let inst = generate_instance(&c, Interval(9)).unwrap();
        let (network, mut batch) = inst.clone().into_parts();
        let paths = ShortestPaths::compute(&network);
        attach_matches(&mut batch, &network, &paths, &c.caps(), &c.pricing, c.seed).unwrap();
        assert!(!batch.matches.is_empty());
        let inst = Instance::new(network, batch);
        let text = serde_json::to_string(&inst).unwrap();
        let back: Instance = serde_json::from_str(&text).unwrap();
        assert_eq!(back, inst);
        assert_eq!(serde_json::to_string(&back).unwrap(), text);
    }

    #[test]
    fn priced_matches_are_consistent() {
        let c = config();
        let (network, mut batch) = generate_instance(&c, Interval(20)).unwrap().into_parts();
        let paths = ShortestPaths::compute(&network);
        attach_matches(&mut batch, &network, &paths, &c.caps(), &c.pricing, c.seed).unwrap();
        for m in &batch.matches {
            m.check_shape().unwrap();
            assert_eq!(m.take_rates.len(), m.passengers.len());
        }
    }
}

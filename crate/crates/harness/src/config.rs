//! Run configuration: synthetic city, demand, trip parameters and pricing.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rpc_core::matchgen::GenCaps;
use rpc_core::network::SpeedTable;
use rpc_core::pricing::PricingModel;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("reading config: {0}")]
    Io(#[from] std::io::Error),
    #[error("parsing config: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

/// Problem variant: what is maximised and which matches are allowed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// One passenger per driver, any profit sign.
    Rpc1,
    /// Groups of passengers, nonnegative-profit matches only.
    Rpcplus,
    /// Maximum total profit, no target.
    Rp,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Rpc1 => "rpc1",
            Variant::Rpcplus => "rpcplus",
            Variant::Rp => "rp",
        }
    }

    /// Whether instances are generated with single-seat vehicles.
    pub fn single_seat(self) -> bool {
        matches!(self, Variant::Rpc1 | Variant::Rp)
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "rpc1" => Ok(Variant::Rpc1),
            "rpcplus" | "rpc+" => Ok(Variant::Rpcplus),
            "rp" => Ok(Variant::Rp),
            _ => Err(format!("unknown variant {s:?} (expected rpc1, rpcplus or rp)")),
        }
    }
}

/// Square grid city divided into `region_blocks^2` square regions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CityConfig {
    pub grid_side: u32,
    /// Meters between neighbouring intersections.
    pub spacing: f64,
    pub region_blocks: u32,
    /// Meters per second; a single value or a full region table.
    pub speed_off_peak: f64,
    pub speed_peak: f64,
    pub speeds: Option<SpeedTable>,
}

impl Default for CityConfig {
    fn default() -> Self {
        CityConfig {
            grid_side: 40,
            spacing: 250.0,
            region_blocks: 5,
            speed_off_peak: 7.0,
            speed_peak: 5.0,
            speeds: None,
        }
    }
}

impl CityConfig {
    pub fn regions(&self) -> u32 {
        self.region_blocks * self.region_blocks
    }

    pub fn speed_table(&self) -> SpeedTable {
        self.speeds
            .clone()
            .unwrap_or_else(|| SpeedTable::uniform(self.regions(), self.speed_off_peak, self.speed_peak))
    }
}

/// Passengers per interval follow an hourly profile scaled so that the
/// busiest hour has `peak_passengers`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DemandConfig {
    pub peak_passengers: u32,
    /// Relative demand for each hour from 6:00 to 23:00.
    pub hourly_profile: Vec<f64>,
    /// Trips shorter or longer than this are redrawn.
    pub min_trip_miles: f64,
    pub max_trip_miles: f64,
}

impl Default for DemandConfig {
    fn default() -> Self {
        DemandConfig {
            peak_passengers: 1000,
            hourly_profile: vec![
                0.35, 0.85, 1.0, 0.8, 0.55, 0.5, 0.55, 0.6, 0.6, 0.65, 0.8, 0.95, 1.0, 0.85, 0.6, 0.45, 0.35, 0.25,
            ],
            min_trip_miles: 1.5,
            max_trip_miles: 35.0,
        }
    }
}

/// Ranges of the random multipliers that set trip time limits. Each range
/// is `[low, high]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TripParams {
    pub driver_detour_factor: [f64; 2],
    /// Lower bound on the detour limit, seconds.
    pub driver_detour_floor: i64,
    pub driver_arrival_factor: [f64; 2],
    pub passenger_arrival_factor: [f64; 2],
    pub passenger_duration_factor: [f64; 2],
    /// Driver-to-passenger count ratio for single-seat runs.
    pub rpc1_ratio: [f64; 2],
    /// Share of SUVs in multi-seat runs, off-peak and peak.
    pub suv_share_off_peak: f64,
    pub suv_share_peak: f64,
    pub sedan_capacity: [u32; 2],
    pub suv_capacity: [u32; 2],
}

impl Default for TripParams {
    fn default() -> Self {
        TripParams {
            driver_detour_factor: [1.2, 1.4],
            driver_detour_floor: 45 * 60,
            driver_arrival_factor: [1.0, 1.25],
            passenger_arrival_factor: [2.0, 3.0],
            passenger_duration_factor: [1.5, 2.0],
            rpc1_ratio: [0.9, 1.1],
            suv_share_off_peak: 0.10,
            suv_share_peak: 0.05,
            sedan_capacity: [1, 3],
            suv_capacity: [1, 5],
        }
    }
}

/// Placeholder surge and tip tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FareParams {
    pub surge_off_peak: f64,
    pub surge_peak: [f64; 2],
    /// Chance a rider tips; the expected tip is this times the tip amount.
    pub tip_probability: f64,
    pub tip_cents_per_mile: f64,
    pub tip_cap_cents: f64,
}

impl Default for FareParams {
    fn default() -> Self {
        FareParams {
            surge_off_peak: 1.0,
            surge_peak: [1.0, 1.5],
            tip_probability: 0.3,
            tip_cents_per_mile: 50.0,
            tip_cap_cents: 500.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GenConfig {
    pub seed: u64,
    pub variant: Variant,
    pub city: CityConfig,
    pub demand: DemandConfig,
    pub trips: TripParams,
    pub fares: FareParams,
    pub pricing: PricingModel,
    /// Match-generation limits; defaults depend on the variant.
    pub caps: Option<GenCaps>,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            seed: 1,
            variant: Variant::Rpc1,
            city: CityConfig::default(),
            demand: DemandConfig::default(),
            trips: TripParams::default(),
            fares: FareParams::default(),
            pricing: PricingModel::default(),
            caps: None,
        }
    }
}

impl GenConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let config: GenConfig = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        config.validate()?;
        Ok(config)
    }

    pub fn caps(&self) -> GenCaps {
        self.caps.unwrap_or(if self.variant.single_seat() {
            GenCaps::capacity_one()
        } else {
            GenCaps::multi_capacity()
        })
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |msg: &str| Err(ConfigError::Invalid(msg.to_string()));
        let range = |r: [f64; 2]| r[0] <= r[1] && r[0] > 0.0;
        let c = &self.city;
        if c.grid_side < 2 || c.region_blocks == 0 || c.region_blocks > c.grid_side || c.spacing <= 0.0 {
            return bad("grid needs side >= 2, spacing > 0 and 1..=side region blocks");
        }
        if let Some(t) = &c.speeds {
            if t.regions != c.regions() {
                return bad("speed table size does not match the region count");
            }
        }
        if c.speeds.is_none() && (c.speed_off_peak <= 0.0 || c.speed_peak <= 0.0) {
            return bad("speeds must be positive");
        }
        let d = &self.demand;
        if d.hourly_profile.len() != 18 || d.hourly_profile.iter().any(|w| *w < 0.0) {
            return bad("hourly profile needs 18 nonnegative weights (6:00 to 23:00)");
        }
        if !(0.0 <= d.min_trip_miles && d.min_trip_miles < d.max_trip_miles) {
            return bad("trip length bounds out of order");
        }
        let t = &self.trips;
        let ranges = [
            t.driver_detour_factor,
            t.driver_arrival_factor,
            t.passenger_arrival_factor,
            t.passenger_duration_factor,
            t.rpc1_ratio,
        ];
        if !ranges.into_iter().all(range) {
            return bad("factor ranges need 0 < low <= high");
        }
        if t.passenger_arrival_factor[0] < 1.0 {
            return bad("passenger arrival factor below 1 cannot admit the direct trip");
        }
        let caps_ok = |r: [u32; 2]| 1 <= r[0] && r[0] <= r[1];
        if !caps_ok(t.sedan_capacity) || !caps_ok(t.suv_capacity) {
            return bad("capacity ranges need 1 <= low <= high");
        }
        if ![t.suv_share_off_peak, t.suv_share_peak]
            .iter()
            .all(|p| (0.0..=1.0).contains(p))
        {
            return bad("SUV shares must be probabilities");
        }
        let f = &self.fares;
        if f.surge_off_peak < 0.0 || !(0.0 <= f.surge_peak[0] && f.surge_peak[0] <= f.surge_peak[1]) {
            return bad("surge factors out of range");
        }
        if !(0.0..=1.0).contains(&f.tip_probability) || f.tip_cents_per_mile < 0.0 || f.tip_cap_cents < 0.0 {
            return bad("tip parameters out of range");
        }
        if !self.pricing.is_valid() {
            return bad("pricing components must be nonnegative");
        }
        if !self.caps().is_valid() {
            return bad("caps must be at least 1 and tau positive");
        }
        Ok(())
    }
}

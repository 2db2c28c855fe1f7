//! Driver revenue, travel cost and profit of a feasible match.
//!
//! All money arithmetic runs in `f64` cents and is rounded exactly once per
//! revenue and once per cost, half away from zero.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Driver, FeasibleMatch, Money, Passenger, PassengerId, VehicleType, Visit};
use crate::time::Interval;

pub const METERS_PER_MILE: f64 = 1609.344;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PricingError {
    #[error("match serves no passenger")]
    EmptyMatch,
    #[error("passenger {0} has no pickup/dropoff pair on the route")]
    MissingSubpath(PassengerId),
    #[error("passenger {0} is not in the batch")]
    UnknownPassenger(PassengerId),
    #[error("route has {visits} visits but {legs} legs")]
    LegCount { visits: usize, legs: usize },
    #[error("expected {expected} rider terms, got {got}")]
    RiderCount { expected: usize, got: usize },
    #[error("unknown cost setting {0:?}")]
    UnknownSetting(String),
}

/// Per-ride fare components, in cents.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeeSchedule {
    pub base_fare: f64,
    pub per_minute: f64,
    pub per_mile: f64,
}

impl Default for FeeSchedule {
    fn default() -> Self {
        FeeSchedule {
            base_fare: 180.0,
            per_minute: 27.0,
            per_mile: 80.0,
        }
    }
}

/// Booking fee for a ride of `miles`; kept entirely by the platform.
pub fn booking_fee(miles: f64) -> Money {
    let dollars = (1.0 + 0.25 * (miles - 2.0)).clamp(1.0, 10.0);
    Money::from_dollars_f64(dollars)
}

/// Shared-ride discount for a rider who meets `co_riders` other passengers.
pub fn discount_rate(co_riders: u32) -> f64 {
    (1.0 - 0.2 * co_riders as f64).max(0.2)
}

/// Closed interval the platform take-rate is drawn from.
pub fn take_rate_bounds(discount: f64) -> (f64, f64) {
    ((0.2 * discount).max(0.05), (0.25 * discount).max(0.1))
}

pub fn take_rate<R: Rng + ?Sized>(discount: f64, rng: &mut R) -> f64 {
    let (lo, hi) = take_rate_bounds(discount);
    rng.gen_range(lo..=hi)
}

/// Leg length in the units the fare is quoted in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LegUnits {
    pub miles: f64,
    pub minutes: f64,
}

impl LegUnits {
    pub fn from_meters_seconds(meters: i64, seconds: i64) -> Self {
        LegUnits {
            miles: meters as f64 / METERS_PER_MILE,
            minutes: seconds as f64 / 60.0,
        }
    }
}

/// Fare inputs of one rider, supplied by the instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiderTerms {
    pub take_rate: f64,
    pub surge: f64,
    pub tip: Money,
}

/// Occupancy of a route and the sharing seen by each rider, derived from the
/// visit order.
#[derive(Debug, Clone, PartialEq)]
pub struct RideContext {
    /// Passengers on board along each leg.
    pub occupancy: Vec<u32>,
    /// Per rider, in match order: leg range `[pickup, dropoff)`.
    pub spans: Vec<(usize, usize)>,
    /// Per rider: distinct other passengers on board anywhere on its subpath.
    pub co_riders: Vec<u32>,
}

impl RideContext {
    pub fn from_visits(visits: &[Visit], passengers: &[PassengerId]) -> Result<Self, PricingError> {
        if passengers.is_empty() {
            return Err(PricingError::EmptyMatch);
        }
        let spans = passengers
            .iter()
            .map(|&p| {
                let pick = visits.iter().position(|v| *v == Visit::Pickup(p));
                let drop = visits.iter().position(|v| *v == Visit::Dropoff(p));
                match (pick, drop) {
                    (Some(a), Some(b)) if a < b => Ok((a, b)),
                    _ => Err(PricingError::MissingSubpath(p)),
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        let legs = visits.len().saturating_sub(1);
        let occupancy = (0..legs)
            .map(|leg| spans.iter().filter(|&&(a, b)| a <= leg && leg < b).count() as u32)
            .collect();
        let co_riders = spans
            .iter()
            .enumerate()
            .map(|(j, &(a, b))| {
                spans
                    .iter()
                    .enumerate()
                    .filter(|&(k, &(c, d))| k != j && c < b && a < d)
                    .count() as u32
            })
            .collect();
        Ok(RideContext {
            occupancy,
            spans,
            co_riders,
        })
    }

    pub fn for_match(m: &FeasibleMatch) -> Result<Self, PricingError> {
        if m.legs.len() + 1 != m.visits.len() {
            return Err(PricingError::LegCount {
                visits: m.visits.len(),
                legs: m.legs.len(),
            });
        }
        Self::from_visits(&m.visits, &m.passengers)
    }

    pub fn discounts(&self) -> Vec<f64> {
        self.co_riders.iter().map(|&dp| discount_rate(dp)).collect()
    }

    /// One take-rate per rider, drawn in rider order.
    pub fn sample_take_rates<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        self.discounts().into_iter().map(|w| take_rate(w, rng)).collect()
    }
}

/// Driver revenue over a route given per-leg units and per-rider terms.
pub fn route_revenue(
    legs: &[LegUnits],
    ctx: &RideContext,
    riders: &[RiderTerms],
    fees: &FeeSchedule,
) -> Result<Money, PricingError> {
    if riders.len() != ctx.spans.len() {
        return Err(PricingError::RiderCount {
            expected: ctx.spans.len(),
            got: riders.len(),
        });
    }
    if legs.len() != ctx.occupancy.len() {
        return Err(PricingError::LegCount {
            visits: ctx.occupancy.len() + 1,
            legs: legs.len(),
        });
    }
    let mut cents = 0.0;
    for (j, terms) in riders.iter().enumerate() {
        let (a, b) = ctx.spans[j];
        let shared: f64 = (a..b)
            .map(|leg| {
                let l = legs[leg];
                (fees.per_minute * l.minutes + fees.per_mile * l.miles) / ctx.occupancy[leg] as f64
            })
            .sum();
        let fare = fees.base_fare + shared;
        let discount = discount_rate(ctx.co_riders[j]);
        cents += (1.0 - terms.take_rate) * discount * terms.surge * fare + terms.tip.cents() as f64;
    }
    Ok(Money::from_cents_f64(cents))
}

/// Per-mile rates by vehicle type, in dollars.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VehicleRates {
    pub small_sedan: f64,
    pub medium_sedan: f64,
    pub medium_suv: f64,
}

impl VehicleRates {
    pub const ZERO: VehicleRates = VehicleRates {
        small_sedan: 0.0,
        medium_sedan: 0.0,
        medium_suv: 0.0,
    };

    pub fn get(&self, vehicle: VehicleType) -> f64 {
        match vehicle {
            VehicleType::SmallSedan => self.small_sedan,
            VehicleType::MediumSedan => self.medium_sedan,
            VehicleType::MediumSuv => self.medium_suv,
        }
    }
}

const VEHICLE_COST: VehicleRates = VehicleRates {
    small_sedan: 0.1251,
    medium_sedan: 0.1437,
    medium_suv: 0.1889,
};

// No separate SUV operating figure exists; SUVs use the medium-sedan rate.
const OPERATING_COST: VehicleRates = VehicleRates {
    small_sedan: 0.0887 + 0.1851,
    medium_sedan: 0.1064 + 0.2505,
    medium_suv: 0.1064 + 0.2505,
};

/// Driver travel-cost model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostSetting {
    pub name: String,
    pub vehicle_cost: VehicleRates,
    /// Fractional increase of the vehicle cost outside / inside peak hours.
    pub uplift_off_peak: f64,
    pub uplift_peak: f64,
    pub operating_cost: VehicleRates,
    /// Fraction of the base vehicle cost added as overhead.
    pub overhead: f64,
}

impl CostSetting {
    pub const PRESETS: [&'static str; 7] = ["base", "S1", "S2", "S3", "S4", "S5", "S6"];

    pub fn base() -> Self {
        CostSetting {
            name: "base".into(),
            vehicle_cost: VEHICLE_COST,
            uplift_off_peak: 0.0,
            uplift_peak: 0.0,
            operating_cost: VehicleRates::ZERO,
            overhead: 0.0,
        }
    }

    /// Scenario `k` in 1..=6: uplift of 20k% off-peak and 20(k+1)% at peak,
    /// plus operating cost.
    pub fn scenario(k: u32) -> Option<Self> {
        (1..=6).contains(&k).then(|| CostSetting {
            name: format!("S{k}"),
            vehicle_cost: VEHICLE_COST,
            uplift_off_peak: (20 * k) as f64 / 100.0,
            uplift_peak: (20 * (k + 1)) as f64 / 100.0,
            operating_cost: OPERATING_COST,
            overhead: 0.0,
        })
    }

    pub fn with_overhead(mut self, overhead: f64) -> Self {
        self.overhead = overhead;
        self
    }

    pub fn uplift(&self, interval: Interval) -> f64 {
        if interval.is_peak() {
            self.uplift_peak
        } else {
            self.uplift_off_peak
        }
    }

    /// Cost of driving `miles` in `vehicle` during `interval`.
    pub fn cost(&self, miles: f64, vehicle: VehicleType, interval: Interval) -> Money {
        let base = miles * self.vehicle_cost.get(vehicle);
        let dollars =
            base * (1.0 + self.uplift(interval)) + miles * self.operating_cost.get(vehicle) + base * self.overhead;
        Money::from_dollars_f64(dollars)
    }

    fn is_valid(&self) -> bool {
        let rates = |r: &VehicleRates| [r.small_sedan, r.medium_sedan, r.medium_suv];
        rates(&self.vehicle_cost)
            .into_iter()
            .chain(rates(&self.operating_cost))
            .chain([self.uplift_off_peak, self.uplift_peak, self.overhead])
            .all(|x| x.is_finite() && x >= 0.0)
    }
}

impl Default for CostSetting {
    fn default() -> Self {
        CostSetting::base()
    }
}

impl fmt::Display for CostSetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

impl FromStr for CostSetting {
    type Err = PricingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("base") {
            return Ok(CostSetting::base());
        }
        s.strip_prefix(['S', 's'])
            .and_then(|k| k.parse().ok())
            .and_then(CostSetting::scenario)
            .ok_or_else(|| PricingError::UnknownSetting(s.to_string()))
    }
}

/// Fare schedule and cost model of a run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PricingModel {
    pub fees: FeeSchedule,
    pub cost: CostSetting,
}

impl PricingModel {
    pub fn is_valid(&self) -> bool {
        let f = &self.fees;
        self.cost.is_valid() && [f.base_fare, f.per_minute, f.per_mile].iter().all(|x| *x >= 0.0)
    }
}

pub fn match_revenue(m: &FeasibleMatch, riders: &[RiderTerms], fees: &FeeSchedule) -> Result<Money, PricingError> {
    let ctx = RideContext::for_match(m)?;
    let legs: Vec<LegUnits> = m
        .legs
        .iter()
        .map(|l| LegUnits::from_meters_seconds(l.distance, l.duration))
        .collect();
    route_revenue(&legs, &ctx, riders, fees)
}

pub fn match_cost(m: &FeasibleMatch, setting: &CostSetting, vehicle: VehicleType, interval: Interval) -> Money {
    setting.cost(m.distance() as f64 / METERS_PER_MILE, vehicle, interval)
}

/// Rider terms of `m` from its stored take-rates and the passengers' surge
/// and tip.
pub fn rider_terms<'p>(
    m: &FeasibleMatch,
    lookup: impl Fn(PassengerId) -> Option<&'p Passenger>,
) -> Result<Vec<RiderTerms>, PricingError> {
    if m.take_rates.len() != m.passengers.len() {
        return Err(PricingError::RiderCount {
            expected: m.passengers.len(),
            got: m.take_rates.len(),
        });
    }
    m.passengers
        .iter()
        .zip(&m.take_rates)
        .map(|(&p, &take_rate)| {
            let p = lookup(p).ok_or(PricingError::UnknownPassenger(p))?;
            Ok(RiderTerms {
                take_rate,
                surge: p.surge_factor,
                tip: p.tip_expectation,
            })
        })
        .collect()
}

/// Revenue and cost of `m` from its stored take-rates.
pub fn evaluate_match<'p>(
    m: &FeasibleMatch,
    driver: &Driver,
    lookup: impl Fn(PassengerId) -> Option<&'p Passenger>,
    model: &PricingModel,
    interval: Interval,
) -> Result<(Money, Money), PricingError> {
    let riders = rider_terms(m, lookup)?;
    let revenue = match_revenue(m, &riders, &model.fees)?;
    let cost = match_cost(m, &model.cost, driver.vehicle_type, interval);
    Ok((revenue, cost))
}

pub fn match_profit<'p>(
    m: &FeasibleMatch,
    driver: &Driver,
    lookup: impl Fn(PassengerId) -> Option<&'p Passenger>,
    model: &PricingModel,
    interval: Interval,
) -> Result<Money, PricingError> {
    let (revenue, cost) = evaluate_match(m, driver, lookup, model, interval)?;
    Ok(revenue - cost)
}

/// Draws take-rates for `m` and stores its revenue, cost and profit.
pub fn price_match<'p, R: Rng + ?Sized>(
    m: &mut FeasibleMatch,
    driver: &Driver,
    lookup: impl Fn(PassengerId) -> Option<&'p Passenger>,
    model: &PricingModel,
    interval: Interval,
    rng: &mut R,
) -> Result<(), PricingError> {
    m.take_rates = RideContext::for_match(m)?.sample_take_rates(rng);
    let (revenue, cost) = evaluate_match(m, driver, lookup, model, interval)?;
    m.revenue = revenue;
    m.cost = cost;
    m.profit = revenue - cost;
    Ok(())
}

/// Booking fee charged to `passenger` on the miles of its subpath.
pub fn passenger_booking_fee(m: &FeasibleMatch, passenger: PassengerId) -> Option<Money> {
    let (a, b) = m.subpath(passenger)?;
    let meters: i64 = m.legs[a..b].iter().map(|l| l.distance).sum();
    Some(booking_fee(meters as f64 / METERS_PER_MILE))
}

use serde::{Deserialize, Serialize};

use super::{DriverId, LocationId, ModelError, Money, PassengerId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VehicleType {
    SmallSedan,
    MediumSedan,
    #[serde(rename = "MediumSUV")]
    MediumSuv,
}

/// A driver offer. Times are integer seconds from the start of the batch
/// interval; the detour limit and maximum duration are durations in seconds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Driver {
    pub id: DriverId,
    pub origin: LocationId,
    pub destination: LocationId,
    pub capacity: u32,
    pub earliest_departure: i64,
    pub latest_arrival: i64,
    pub detour_limit: i64,
    pub max_duration: i64,
    pub vehicle_type: VehicleType,
}

impl Driver {
    pub fn validate(&self) -> Result<(), ModelError> {
        let bad = |reason: &str| {
            Err(ModelError::InvalidDriver {
                driver: self.id,
                reason: reason.to_string(),
            })
        };
        if self.capacity < 1 {
            return bad("capacity must be at least 1");
        }
        if self.earliest_departure >= self.latest_arrival {
            return bad("earliest departure must precede latest arrival");
        }
        if self.detour_limit < 0 {
            return bad("negative detour limit");
        }
        if self.max_duration <= 0 {
            return bad("max duration must be positive");
        }
        Ok(())
    }
}

/// A passenger request. `surge_factor` multiplies the fare; `tip_expectation`
/// is the expected tip handed to the driver.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Passenger {
    pub id: PassengerId,
    pub origin: LocationId,
    pub destination: LocationId,
    pub earliest_departure: i64,
    pub latest_arrival: i64,
    pub max_duration: i64,
    pub surge_factor: f64,
    pub tip_expectation: Money,
}

impl Passenger {
    pub fn validate(&self) -> Result<(), ModelError> {
        let bad = |reason: &str| {
            Err(ModelError::InvalidPassenger {
                passenger: self.id,
                reason: reason.to_string(),
            })
        };
        if self.earliest_departure >= self.latest_arrival {
            return bad("earliest departure must precede latest arrival");
        }
        if self.max_duration <= 0 {
            return bad("max duration must be positive");
        }
        if self.surge_factor.is_nan() || self.surge_factor < 0.0 {
            return bad("surge factor must be non-negative");
        }
        if self.tip_expectation.is_negative() {
            return bad("negative tip expectation");
        }
        Ok(())
    }
}

/// What happens at a stop of a driver's route.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Visit {
    Start,
    Pickup(PassengerId),
    Dropoff(PassengerId),
    End,
}

/// One hop of a route between consecutive stops: shortest-path distance in
/// meters and travel time in seconds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Leg {
    pub distance: i64,
    pub duration: i64,
}

/// A driver together with a group of passengers it can serve, the shortest
/// feasible route doing so, and the resulting money breakdown.
///
/// `path[k]` is the location of `visits[k]`; `legs[k]` connects stop `k` to
/// stop `k + 1`. `take_rates` is aligned with `passengers` and holds the
/// platform share sampled when the match was priced (empty before pricing).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibleMatch {
    pub driver: DriverId,
    pub passengers: Vec<PassengerId>,
    pub path: Vec<LocationId>,
    pub visits: Vec<Visit>,
    pub legs: Vec<Leg>,
    #[serde(default)]
    pub take_rates: Vec<f64>,
    pub revenue: Money,
    pub cost: Money,
    pub profit: Money,
}

impl FeasibleMatch {
    /// Total route distance in meters.
    pub fn distance(&self) -> i64 {
        self.legs.iter().map(|l| l.distance).sum()
    }

    pub fn duration(&self) -> i64 {
        self.legs.iter().map(|l| l.duration).sum()
    }

    /// Index of the pickup and dropoff stop of `passenger` within the route.
    pub fn subpath(&self, passenger: PassengerId) -> Option<(usize, usize)> {
        let pick = self.visits.iter().position(|v| *v == Visit::Pickup(passenger))?;
        let drop = self.visits.iter().position(|v| *v == Visit::Dropoff(passenger))?;
        Some((pick, drop))
    }

    /// Structural checks that do not need the network: start/end markers,
    /// every passenger picked up exactly once before being dropped off,
    /// matching lengths, and `profit == revenue - cost`.
    pub fn check_shape(&self) -> Result<(), ModelError> {
        let bad = |reason: String| {
            Err(ModelError::InvalidRoute {
                driver: self.driver,
                reason,
            })
        };
        if self.passengers.is_empty() {
            return Err(ModelError::EmptyPassengerSet { driver: self.driver });
        }
        if self.path.len() != self.visits.len() {
            return bad(format!(
                "{} locations but {} visits",
                self.path.len(),
                self.visits.len()
            ));
        }
        if self.visits.len() != 2 * self.passengers.len() + 2 {
            return bad(format!(
                "{} visits for {} passengers",
                self.visits.len(),
                self.passengers.len()
            ));
        }
        if self.legs.len() + 1 != self.visits.len() {
            return bad(format!("{} legs for {} stops", self.legs.len(), self.visits.len()));
        }
        if self.visits.first() != Some(&Visit::Start) || self.visits.last() != Some(&Visit::End) {
            return bad("route must begin at Start and finish at End".into());
        }
        for &p in &self.passengers {
            match self.subpath(p) {
                Some((a, b)) if a < b => {}
                _ => return bad(format!("passenger {p} not picked up before drop-off")),
            }
        }
        if !self.take_rates.is_empty() && self.take_rates.len() != self.passengers.len() {
            return bad("take rates not aligned with passengers".into());
        }
        if self.profit != self.revenue - self.cost {
            return bad(format!(
                "profit {} differs from revenue {} minus cost {}",
                self.profit, self.revenue, self.cost
            ));
        }
        Ok(())
    }
}

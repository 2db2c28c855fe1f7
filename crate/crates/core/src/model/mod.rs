//! Domain types shared by every solver: money, trips, feasible matches, the
//! match hypergraph and matchings over it.

mod hypergraph;
mod ids;
mod matching;
mod money;
mod trip;

use thiserror::Error;

pub use hypergraph::{build_hypergraph, HyperEdge, Hypergraph, Vertex};
pub use ids::{DriverId, EdgeId, LocationId, PassengerId};
pub use matching::{validate_matching, Matching, MatchingViolation};
pub use money::Money;
pub use trip::{Driver, FeasibleMatch, Leg, Passenger, VehicleType, Visit};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("match for driver {driver} has no passengers")]
    EmptyPassengerSet { driver: DriverId },
    #[error("match for driver {driver} lists passenger {passenger} twice")]
    DuplicatePassenger { driver: DriverId, passenger: PassengerId },
    #[error("match for driver {driver} has {size} passengers but capacity {capacity}")]
    CapacityExceeded {
        driver: DriverId,
        size: usize,
        capacity: u32,
    },
    #[error("unknown driver {0}")]
    UnknownDriver(DriverId),
    #[error("unknown passenger {0}")]
    UnknownPassenger(PassengerId),
    #[error("invalid driver {driver}: {reason}")]
    InvalidDriver { driver: DriverId, reason: String },
    #[error("invalid passenger {passenger}: {reason}")]
    InvalidPassenger { passenger: PassengerId, reason: String },
    #[error("invalid route for driver {driver}: {reason}")]
    InvalidRoute { driver: DriverId, reason: String },
}

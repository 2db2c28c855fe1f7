//! Ridesharing with a profit constraint: match generation, pricing, and exact
//! and approximate solvers over the driver/passenger hypergraph.

pub mod audit;
pub mod flow;
pub mod greedy;
pub mod ls2;
pub mod matchgen;
pub mod model;
pub mod network;
pub mod oracle;
pub mod pricing;
pub mod solve;
pub mod time;

pub use model::*;
pub use solve::SolveError;
pub use time::Interval;

//! Errors shared by the matching solvers.

use thiserror::Error;

use crate::model::{EdgeId, Money};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("no matching reaches profit target {target}")]
    Infeasible { target: Money },
    #[error("edge {edge} serves {size} passengers; this solver needs single-passenger edges")]
    NotBipartite { edge: EdgeId, size: usize },
    #[error("edge {edge} has negative weight {weight}")]
    NegativeEdge { edge: EdgeId, weight: Money },
    #[error("capacity bound must be at least 2, got {0}")]
    InvalidLambda(usize),
    #[error("exhaustive search exceeded {0} states")]
    BudgetExceeded(u64),
}

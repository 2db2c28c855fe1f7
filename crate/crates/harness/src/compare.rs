//! Profit-only optimum against the profit-constrained optimum on small
//! batches, solved exactly by enumeration.

use rpc_core::flow::solve_rpc1_exact;
use rpc_core::oracle::{brute_rp, brute_rpcplus};
use rpc_core::{build_hypergraph, Money};
use serde::{Deserialize, Serialize};

use crate::config::Variant;
use crate::instance::Batch;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RpComparison {
    pub interval: u32,
    pub variant: Variant,
    /// Weight and passengers of the maximum-profit matching.
    pub rp_weight: i64,
    pub rp_served: usize,
    pub target_cents: i64,
    /// Most passengers servable with profit at least the target.
    pub rpc_weight: i64,
    pub rpc_served: usize,
}

/// Compares the maximum-profit matching with the constrained optimum at
/// `factor` times its weight. `variant` picks the constrained problem.
pub fn compare_rp(batch: &Batch, variant: Variant, factor: f64) -> anyhow::Result<RpComparison> {
    let h = build_hypergraph(&batch.matches, &batch.drivers)?;
    let rp = brute_rp(&h)?;
    let target = Money::from_cents_f64(rp.weight().cents() as f64 * factor);
    let rpc = match variant {
        Variant::Rpcplus => brute_rpcplus(&h, target)?,
        Variant::Rpc1 | Variant::Rp => solve_rpc1_exact(&h, target)?,
    };
    Ok(RpComparison {
        interval: batch.interval.0,
        variant,
        rp_weight: rp.weight().cents(),
        rp_served: rp.served(),
        target_cents: target.cents(),
        rpc_weight: rpc.weight().cents(),
        rpc_served: rpc.served(),
    })
}

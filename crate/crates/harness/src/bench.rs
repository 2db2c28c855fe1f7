//! Full-day pipeline: generate, enumerate, price and solve every interval.

use rayon::prelude::*;
use rpc_core::Interval;

use crate::config::{GenConfig, Variant};
use crate::generate::City;
use crate::instance::{attach_matches, Batch};
use crate::pipeline::{run_batch, Algorithm, IntervalReport, RunOptions, TargetSpec};

#[derive(Debug, Clone)]
pub struct BenchPlan {
    /// Each variant with the algorithms to run on it.
    pub runs: Vec<(Variant, Vec<Algorithm>)>,
    pub targets: Vec<TargetSpec>,
    pub intervals: Vec<Interval>,
    pub options: RunOptions,
}

impl BenchPlan {
    /// Single-seat and multi-seat days with their default algorithms, the
    /// three standard targets, all intervals.
    pub fn standard() -> Self {
        BenchPlan {
            runs: [Variant::Rpc1, Variant::Rpcplus]
                .into_iter()
                .map(|v| (v, Algorithm::defaults(v)))
                .collect(),
            targets: TargetSpec::LEVELS.to_vec(),
            intervals: Interval::all().collect(),
            options: RunOptions::default(),
        }
    }
}

/// Generates and prices the batch of one interval.
pub fn prepare(city: &City, config: &GenConfig, interval: Interval) -> anyhow::Result<Batch> {
    let (drivers, passengers) = city.generate(config, interval)?;
    let mut batch = Batch {
        interval,
        drivers,
        passengers,
        matches: Vec::new(),
    };
    attach_matches(
        &mut batch,
        &city.network,
        &city.paths,
        &config.caps(),
        &config.pricing,
        config.seed,
    )?;
    Ok(batch)
}

/// Runs the plan. Intervals are processed in parallel; rows come out by
/// variant, then interval, then target, then algorithm.
pub fn run_bench(config: &GenConfig, plan: &BenchPlan) -> anyhow::Result<Vec<IntervalReport>> {
    let city = City::build(config)?;
    let mut out = Vec::new();
    for (variant, algorithms) in &plan.runs {
        let config = GenConfig {
            variant: *variant,
            ..config.clone()
        };
        let per_interval: Vec<anyhow::Result<Vec<IntervalReport>>> = plan
            .intervals
            .par_iter()
            .map(|&interval| {
                let batch = prepare(&city, &config, interval)?;
                Ok(run_batch(&batch, *variant, algorithms, &plan.targets, &plan.options)?)
            })
            .collect();
        for rows in per_interval {
            out.extend(rows?);
        }
    }
    Ok(out)
}

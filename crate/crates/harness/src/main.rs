use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use rpc_core::ls2::Ls2Options;
use rpc_core::network::ShortestPaths;
use rpc_core::pricing::CostSetting;
use rpc_core::Interval;
use rpc_harness::compare::compare_rp;
use rpc_harness::instance::attach_matches;
use rpc_harness::report::{summarize, write_csv};
use rpc_harness::{
    emit_report, generate_instance, run_batch, run_bench, Algorithm, BenchPlan, GenConfig, Instance, RunOptions,
    TargetSpec, Variant,
};

/// Ridesharing with a profit target: synthetic instances, solvers and
/// benchmarks. Every option can also be set through an `RPC_*` variable.
#[derive(Parser)]
#[command(name = "rpc", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// JSON config file; missing fields take their defaults.
    #[arg(long, global = true, env = "RPC_CONFIG")]
    config: Option<PathBuf>,
    #[arg(long, global = true, env = "RPC_SEED")]
    seed: Option<u64>,
    /// rpc1, rpcplus or rp.
    #[arg(long, global = true, env = "RPC_VARIANT")]
    variant: Option<Variant>,
    /// base or S1..S6.
    #[arg(long, global = true, env = "RPC_COST_SETTING")]
    cost_setting: Option<CostSetting>,
    /// Extra overhead as a fraction of the base vehicle cost.
    #[arg(long, global = true, env = "RPC_OVERHEAD")]
    overhead: Option<f64>,
    /// Pruning factor for candidate pairs.
    #[arg(long, global = true, env = "RPC_TAU")]
    tau: Option<f64>,
    /// Passengers in the busiest interval.
    #[arg(long, global = true, env = "RPC_PEAK_PASSENGERS")]
    peak_passengers: Option<u32>,
}

#[derive(Subcommand)]
enum Command {
    /// Write the trips of one interval as instance JSON.
    Generate {
        #[arg(long, env = "RPC_INTERVAL", default_value_t = 0)]
        interval: u32,
        #[arg(long, env = "RPC_OUT")]
        out: PathBuf,
    },
    /// Enumerate and price the feasible matches of an instance.
    Matches {
        #[arg(long, env = "RPC_INSTANCE")]
        instance: PathBuf,
        #[arg(long, env = "RPC_OUT")]
        out: PathBuf,
    },
    /// Solve one instance and print or write CSV rows.
    Solve {
        #[arg(long, env = "RPC_INSTANCE")]
        instance: PathBuf,
        /// exactnf2, greedy, simplegreedy, ls2 or oracle; repeatable.
        #[arg(long = "algo", env = "RPC_ALGO", value_delimiter = ',', required = true)]
        algorithms: Vec<Algorithm>,
        #[command(flatten)]
        target: TargetArgs,
        #[command(flatten)]
        run: RunArgs,
        /// CSV output; stdout when absent.
        #[arg(long, env = "RPC_OUT")]
        out: Option<PathBuf>,
    },
    /// Generate, price and solve every interval of a synthetic day.
    Bench {
        /// CSV output; a summary JSON is written beside it.
        #[arg(long, env = "RPC_OUT")]
        out: PathBuf,
        /// Algorithms for the chosen variant; defaults per variant.
        #[arg(long = "algo", env = "RPC_ALGO", value_delimiter = ',')]
        algorithms: Vec<Algorithm>,
        /// Targets such as c1, 0.8w or 1500c; defaults to c1,c2,c3.
        #[arg(long, env = "RPC_TARGETS", value_delimiter = ',')]
        targets: Vec<TargetSpec>,
        /// Interval range `first-last` within 0-71.
        #[arg(long, env = "RPC_INTERVALS", default_value = "0-71")]
        intervals: String,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Check algorithms against exhaustive search on a small instance.
    Oracle {
        #[arg(long, env = "RPC_INSTANCE")]
        instance: PathBuf,
        #[command(flatten)]
        target: TargetArgs,
    },
}

#[derive(Args)]
#[group(multiple = false)]
struct TargetArgs {
    /// Fraction of the seed matching weight.
    #[arg(long, env = "RPC_TARGET_FACTOR")]
    target_factor: Option<f64>,
    #[arg(long, env = "RPC_TARGET_CENTS", allow_negative_numbers = true)]
    target_cents: Option<i64>,
    /// c1, c2 or c3.
    #[arg(long, env = "RPC_TARGET")]
    target: Option<TargetSpec>,
}

impl TargetArgs {
    fn spec(&self) -> TargetSpec {
        match (self.target_factor, self.target_cents, self.target) {
            (Some(f), _, _) => TargetSpec::Factor(f),
            (_, Some(c), _) => TargetSpec::Cents(c),
            (_, _, Some(t)) => t,
            _ => TargetSpec::Factor(1.0),
        }
    }
}

#[derive(Args)]
struct RunArgs {
    /// Report runtime as 0 so that output is reproducible byte for byte.
    #[arg(long, env = "RPC_NO_TIMING")]
    no_timing: bool,
    /// With groups of at most two, also accept three-passenger replacements.
    #[arg(long, env = "RPC_AGGRESSIVE")]
    aggressive: bool,
}

impl RunArgs {
    fn options(&self) -> RunOptions {
        RunOptions {
            timing: !self.no_timing,
            ls2: Ls2Options {
                aggressive: self.aggressive,
            },
        }
    }
}

impl Global {
    fn config(&self) -> anyhow::Result<GenConfig> {
        let mut c = match &self.config {
            Some(path) => GenConfig::load(path)?,
            None => GenConfig::default(),
        };
        if let Some(seed) = self.seed {
            c.seed = seed;
        }
        if let Some(v) = self.variant {
            c.variant = v;
        }
        if let Some(s) = &self.cost_setting {
            c.pricing.cost = s.clone();
        }
        if let Some(o) = self.overhead {
            c.pricing.cost = c.pricing.cost.clone().with_overhead(o);
        }
        if let Some(n) = self.peak_passengers {
            c.demand.peak_passengers = n;
        }
        if let Some(tau) = self.tau {
            c.caps = Some(rpc_core::matchgen::GenCaps { tau, ..c.caps() });
        }
        c.validate()?;
        Ok(c)
    }
}

fn parse_intervals(s: &str) -> anyhow::Result<Vec<Interval>> {
    let (a, b) = s.split_once('-').unwrap_or((s, s));
    let (a, b): (u32, u32) = (a.trim().parse()?, b.trim().parse()?);
    if a > b || b >= rpc_core::time::INTERVALS_PER_DAY {
        bail!("interval range {s:?} must lie within 0-71");
    }
    Ok((a..=b).map(Interval).collect())
}

/// Loads an instance and fills in its matches when it has none.
fn load_with_matches(path: &Path, config: &GenConfig) -> anyhow::Result<rpc_harness::Batch> {
    let (network, mut batch) = Instance::read(path)?.into_parts();
    if batch.matches.is_empty() {
        let paths = ShortestPaths::compute(&network);
        attach_matches(
            &mut batch,
            &network,
            &paths,
            &config.caps(),
            &config.pricing,
            config.seed,
        )?;
    }
    Ok(batch)
}

fn main() -> anyhow::Result<()> {
    let cli = Cli::parse();
    let config = cli.global.config()?;
    match cli.command {
        Command::Generate { interval, out } => {
            let inst = generate_instance(&config, Interval(interval))?;
            inst.write(&out)?;
            eprintln!(
                "interval {interval}: {} drivers, {} passengers -> {}",
                inst.drivers.len(),
                inst.passengers.len(),
                out.display()
            );
        }
        Command::Matches { instance, out } => {
            let (network, mut batch) = Instance::read(&instance)?.into_parts();
            let paths = ShortestPaths::compute(&network);
            attach_matches(
                &mut batch,
                &network,
                &paths,
                &config.caps(),
                &config.pricing,
                config.seed,
            )?;
            let n = batch.matches.len();
            Instance::new(network, batch).write(&out)?;
            eprintln!("{n} priced matches -> {}", out.display());
        }
        Command::Solve {
            instance,
            algorithms,
            target,
            run,
            out,
        } => {
            let batch = load_with_matches(&instance, &config)?;
            let rows = run_batch(&batch, config.variant, &algorithms, &[target.spec()], &run.options())?;
            for r in rows.iter().filter_map(|r| r.error.as_ref().map(|e| (r.algorithm, e))) {
                eprintln!("{}: {}", r.0, r.1);
            }
            match out {
                Some(path) => {
                    emit_report(&rows, &path)?;
                }
                None => write_csv(&rows, std::io::stdout().lock())?,
            }
        }
        Command::Bench {
            out,
            algorithms,
            targets,
            intervals,
            run,
        } => {
            let mut plan = BenchPlan::standard();
            if let Some(v) = cli.global.variant {
                let algos = if algorithms.is_empty() {
                    Algorithm::defaults(v)
                } else {
                    algorithms
                };
                plan.runs = vec![(v, algos)];
            } else if !algorithms.is_empty() {
                for (v, algos) in &mut plan.runs {
                    *algos = algorithms.iter().copied().filter(|a| a.supports(*v)).collect();
                }
                plan.runs.retain(|(_, a)| !a.is_empty());
            }
            if !targets.is_empty() {
                plan.targets = targets;
            }
            plan.intervals = parse_intervals(&intervals)?;
            plan.options = run.options();
            let start = Instant::now();
            let rows = run_bench(&config, &plan)?;
            let json = emit_report(&rows, &out)?;
            let mut err = std::io::stderr().lock();
            for s in summarize(&rows) {
                writeln!(
                    err,
                    "{:<8} {:<13} {:<6} served {:>7}  profit {:>12}  feasible {}/{}",
                    s.variant, s.algorithm, s.target, s.served, s.profit_cents, s.feasible_intervals, s.intervals
                )?;
            }
            writeln!(
                err,
                "{} rows in {:.1}s -> {}, {}",
                rows.len(),
                start.elapsed().as_secs_f64(),
                out.display(),
                json.display()
            )?;
        }
        Command::Oracle { instance, target } => {
            let batch = load_with_matches(&instance, &config)?;
            let variant = config.variant;
            let algos: Vec<Algorithm> = Algorithm::ALL.into_iter().filter(|a| a.supports(variant)).collect();
            let opts = RunOptions {
                timing: false,
                ..RunOptions::default()
            };
            let rows = run_batch(&batch, variant, &algos, &[target.spec()], &opts)?;
            let comparison = match target.spec() {
                TargetSpec::Factor(f) if variant != Variant::Rp => Some(compare_rp(&batch, variant, f)?),
                _ => None,
            };
            let report = serde_json::json!({ "results": rows, "rp_comparison": comparison });
            println!("{}", serde_json::to_string_pretty(&report).context("encoding report")?);
        }
    }
    Ok(())
}

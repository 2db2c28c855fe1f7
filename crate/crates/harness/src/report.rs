//! CSV rows per interval and a JSON summary per algorithm and target.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::{Deserialize, Serialize};

use crate::config::Variant;
use crate::pipeline::{Algorithm, IntervalReport};

pub const CSV_HEADER: [&str; 9] = [
    "interval",
    "algorithm",
    "target_cents",
    "served",
    "matches",
    "profit_cents",
    "negative_matches",
    "runtime_ms",
    "occupancy",
];

/// Totals over the intervals of one (variant, algorithm, target) group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub variant: Variant,
    pub algorithm: Algorithm,
    pub target: String,
    pub intervals: usize,
    pub feasible_intervals: usize,
    pub served: usize,
    pub matches: usize,
    pub profit_cents: i64,
    pub target_cents: i64,
    pub negative_matches: usize,
    pub runtime_ms: u64,
    pub drivers: usize,
    /// Occupancy over all intervals: `(served + drivers) / drivers`.
    pub occupancy: f64,
}

/// Groups in first-appearance order.
pub fn summarize(reports: &[IntervalReport]) -> Vec<SummaryRow> {
    let mut rows: Vec<SummaryRow> = Vec::new();
    for r in reports {
        let pos = rows
            .iter()
            .position(|s| s.variant == r.variant && s.algorithm == r.algorithm && s.target == r.target_label);
        let s = match pos {
            Some(i) => &mut rows[i],
            None => {
                rows.push(SummaryRow {
                    variant: r.variant,
                    algorithm: r.algorithm,
                    target: r.target_label.clone(),
                    intervals: 0,
                    feasible_intervals: 0,
                    served: 0,
                    matches: 0,
                    profit_cents: 0,
                    target_cents: 0,
                    negative_matches: 0,
                    runtime_ms: 0,
                    drivers: 0,
                    occupancy: 0.0,
                });
                rows.last_mut().expect("just pushed")
            }
        };
        s.intervals += 1;
        s.feasible_intervals += usize::from(r.feasible);
        s.served += r.served;
        s.matches += r.matches;
        s.profit_cents += r.profit_cents;
        s.target_cents += r.target_cents;
        s.negative_matches += r.negative_matches;
        s.runtime_ms += r.runtime_ms;
        s.drivers += r.drivers;
    }
    for s in &mut rows {
        s.occupancy = crate::pipeline::occupancy(s.served, s.drivers);
    }
    rows
}

pub fn write_csv<W: Write>(reports: &[IntervalReport], out: W) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in reports {
        w.write_record([
            r.interval.to_string(),
            r.algorithm.to_string(),
            r.target_cents.to_string(),
            r.served.to_string(),
            r.matches.to_string(),
            r.profit_cents.to_string(),
            r.negative_matches.to_string(),
            r.runtime_ms.to_string(),
            r.occupancy.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Path of the summary written next to `csv_path`.
pub fn summary_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("summary.json")
}

/// Writes the CSV to `csv_path` and the summary JSON beside it.
pub fn emit_report(reports: &[IntervalReport], csv_path: &Path) -> anyhow::Result<PathBuf> {
    let file = std::fs::File::create(csv_path).with_context(|| format!("creating {}", csv_path.display()))?;
    write_csv(reports, std::io::BufWriter::new(file))?;
    let json = summary_path(csv_path);
    let text = serde_json::to_string_pretty(&summarize(reports))?;
    std::fs::write(&json, text + "\n").with_context(|| format!("writing {}", json.display()))?;
    Ok(json)
}

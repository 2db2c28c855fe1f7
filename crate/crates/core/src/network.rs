//! Road network, region speed tables and shortest-path distances.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::LocationId;
use crate::time::Interval;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NetworkError {
    #[error("vertex at position {position} has id {id}; ids must equal positions")]
    VertexIdMismatch { position: usize, id: LocationId },
    #[error("edge {from} -> {to} references an unknown vertex")]
    UnknownVertex { from: LocationId, to: LocationId },
    #[error("edge {from} -> {to} has non-positive length {length}")]
    NonPositiveLength {
        from: LocationId,
        to: LocationId,
        length: i64,
    },
    #[error("edge {from} -> {to} is shorter ({length} m) than the straight line between its ends")]
    ShorterThanStraightLine {
        from: LocationId,
        to: LocationId,
        length: i64,
    },
    #[error("vertex {0} lies in region {1}, outside the speed table")]
    UnknownRegion(LocationId, u32),
    #[error("speed table: {0}")]
    BadSpeedTable(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkVertex {
    pub id: LocationId,
    /// Planar coordinates in meters.
    pub x: f64,
    pub y: f64,
    pub region: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkEdge {
    pub from: LocationId,
    pub to: LocationId,
    /// Meters.
    pub length: i64,
}

/// Average driving speed (m/s) between regions, one row-major
/// `regions x regions` table for off-peak and one for peak intervals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeedTable {
    pub regions: u32,
    pub off_peak: Vec<f64>,
    pub peak: Vec<f64>,
}

impl SpeedTable {
    pub fn uniform(regions: u32, off_peak: f64, peak: f64) -> Self {
        let n = (regions * regions) as usize;
        SpeedTable {
            regions,
            off_peak: vec![off_peak; n],
            peak: vec![peak; n],
        }
    }

    pub fn speed(&self, interval: Interval, from_region: u32, to_region: u32) -> f64 {
        let table = if interval.is_peak() { &self.peak } else { &self.off_peak };
        table[(from_region * self.regions + to_region) as usize]
    }

    fn validate(&self) -> Result<(), NetworkError> {
        let n = (self.regions * self.regions) as usize;
        if self.regions == 0 || self.off_peak.len() != n || self.peak.len() != n {
            return Err(NetworkError::BadSpeedTable(format!(
                "expected {n} entries per table for {} regions",
                self.regions
            )));
        }
        if self
            .off_peak
            .iter()
            .chain(&self.peak)
            .any(|s| !(s.is_finite() && *s > 0.0))
        {
            return Err(NetworkError::BadSpeedTable("speeds must be positive".into()));
        }
        Ok(())
    }
}

/// Seconds to cover `distance` meters at `speed` m/s, rounded up.
pub fn travel_seconds(distance: i64, speed: f64) -> i64 {
    (distance as f64 / speed).ceil() as i64
}

/// Directed road network. Vertex ids equal their position in `vertices`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoadNetwork {
    pub vertices: Vec<NetworkVertex>,
    pub edges: Vec<NetworkEdge>,
    pub speeds: SpeedTable,
}

impl RoadNetwork {
    /// A `side x side` grid with `spacing` meters between neighbours, edges in
    /// both directions between 4-neighbours, and `blocks x blocks` square
    /// regions.
    pub fn grid(side: u32, spacing: f64, blocks: u32, speeds: SpeedTable) -> Self {
        assert!(side >= 1 && blocks >= 1 && blocks <= side);
        let mut vertices = Vec::with_capacity((side * side) as usize);
        for row in 0..side {
            for col in 0..side {
                let region = (row * blocks / side) * blocks + col * blocks / side;
                vertices.push(NetworkVertex {
                    id: LocationId(row * side + col),
                    x: col as f64 * spacing,
                    y: row as f64 * spacing,
                    region,
                });
            }
        }
        let length = spacing.ceil() as i64;
        let mut edges = Vec::new();
        for row in 0..side {
            for col in 0..side {
                let here = LocationId(row * side + col);
                if col + 1 < side {
                    let right = LocationId(here.0 + 1);
                    edges.push(NetworkEdge {
                        from: here,
                        to: right,
                        length,
                    });
                    edges.push(NetworkEdge {
                        from: right,
                        to: here,
                        length,
                    });
                }
                if row + 1 < side {
                    let below = LocationId(here.0 + side);
                    edges.push(NetworkEdge {
                        from: here,
                        to: below,
                        length,
                    });
                    edges.push(NetworkEdge {
                        from: below,
                        to: here,
                        length,
                    });
                }
            }
        }
        RoadNetwork {
            vertices,
            edges,
            speeds,
        }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn region(&self, v: LocationId) -> u32 {
        self.vertices[v.index()].region
    }

    pub fn straight_line(&self, a: LocationId, b: LocationId) -> f64 {
        let (p, q) = (&self.vertices[a.index()], &self.vertices[b.index()]);
        (p.x - q.x).hypot(p.y - q.y)
    }

    /// Speed for a trip from `a` to `b` during `interval`.
    pub fn speed(&self, interval: Interval, a: LocationId, b: LocationId) -> f64 {
        self.speeds.speed(interval, self.region(a), self.region(b))
    }

    /// Checks ids, edge lengths and regions. Every edge must be at least as
    /// long as the straight line between its ends, which makes straight-line
    /// distance a lower bound on shortest-path distance.
    pub fn validate(&self) -> Result<(), NetworkError> {
        self.speeds.validate()?;
        for (position, v) in self.vertices.iter().enumerate() {
            if v.id.index() != position {
                return Err(NetworkError::VertexIdMismatch { position, id: v.id });
            }
            if v.region >= self.speeds.regions {
                return Err(NetworkError::UnknownRegion(v.id, v.region));
            }
        }
        for e in &self.edges {
            if e.from.index() >= self.len() || e.to.index() >= self.len() {
                return Err(NetworkError::UnknownVertex { from: e.from, to: e.to });
            }
            if e.length <= 0 {
                return Err(NetworkError::NonPositiveLength {
                    from: e.from,
                    to: e.to,
                    length: e.length,
                });
            }
            if (e.length as f64) < self.straight_line(e.from, e.to) - 1e-9 {
                return Err(NetworkError::ShorterThanStraightLine {
                    from: e.from,
                    to: e.to,
                    length: e.length,
                });
            }
        }
        Ok(())
    }

    fn adjacency(&self) -> Vec<Vec<(u32, i64)>> {
        let mut adj = vec![Vec::new(); self.len()];
        for e in &self.edges {
            adj[e.from.index()].push((e.to.0, e.length));
        }
        adj
    }
}

/// All-pairs shortest-path distances in meters.
#[derive(Debug, Clone)]
pub struct ShortestPaths {
    n: usize,
    dist: Vec<i64>,
}

impl ShortestPaths {
    pub const UNREACHABLE: i64 = i64::MAX;

    /// One Dijkstra per source, run in parallel.
    pub fn compute(network: &RoadNetwork) -> Self {
        let n = network.len();
        let adj = network.adjacency();
        let rows: Vec<Vec<i64>> = (0..n).into_par_iter().map(|s| dijkstra(&adj, s)).collect();
        ShortestPaths { n, dist: rows.concat() }
    }

    pub fn distance(&self, a: LocationId, b: LocationId) -> Option<i64> {
        let d = self.dist[a.index() * self.n + b.index()];
        (d != Self::UNREACHABLE).then_some(d)
    }
}

fn dijkstra(adj: &[Vec<(u32, i64)>], source: usize) -> Vec<i64> {
    let mut dist = vec![ShortestPaths::UNREACHABLE; adj.len()];
    let mut heap = BinaryHeap::new();
    dist[source] = 0;
    heap.push(Reverse((0i64, source as u32)));
    while let Some(Reverse((d, u))) = heap.pop() {
        if d > dist[u as usize] {
            continue;
        }
        for &(v, len) in &adj[u as usize] {
            let nd = d + len;
            if nd < dist[v as usize] {
                dist[v as usize] = nd;
                heap.push(Reverse((nd, v)));
            }
        }
    }
    dist
}

/// Distances and travel times on a network during one interval.
#[derive(Debug, Clone, Copy)]
pub struct TravelModel<'a> {
    pub network: &'a RoadNetwork,
    pub paths: &'a ShortestPaths,
    pub interval: Interval,
}

impl<'a> TravelModel<'a> {
    pub fn new(network: &'a RoadNetwork, paths: &'a ShortestPaths, interval: Interval) -> Self {
        TravelModel {
            network,
            paths,
            interval,
        }
    }

    pub fn distance(&self, a: LocationId, b: LocationId) -> Option<i64> {
        self.paths.distance(a, b)
    }

    /// Shortest-path distance from `a` to `b` and the time to drive it at
    /// the interval speed between their regions.
    pub fn leg(&self, a: LocationId, b: LocationId) -> Option<(i64, i64)> {
        let d = self.distance(a, b)?;
        Some((d, travel_seconds(d, self.network.speed(self.interval, a, b))))
    }

    pub fn straight_line(&self, a: LocationId, b: LocationId) -> f64 {
        self.network.straight_line(a, b)
    }
}

//! Batch intervals of the simulated day.

use serde::{Deserialize, Serialize};

/// Length of one batch interval in seconds.
pub const INTERVAL_SECONDS: i64 = 900;
/// Intervals per simulated day (6:00 to 23:59).
pub const INTERVALS_PER_DAY: u32 = 72;
const FIRST_HOUR: u32 = 6;

/// A 15-minute batch interval, numbered from 0 at 6:00.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Interval(pub u32);

impl Interval {
    pub fn all() -> impl Iterator<Item = Interval> {
        (0..INTERVALS_PER_DAY).map(Interval)
    }

    /// Hour of day (6..=23).
    pub fn hour(self) -> u32 {
        FIRST_HOUR + self.0 / 4
    }

    /// Peak hours are 7:00-9:59 and 16:00-19:59.
    pub fn is_peak(self) -> bool {
        matches!(self.hour(), 7..=9 | 16..=19)
    }
}

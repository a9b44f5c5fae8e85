use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, Duration, Utc};

use super::feature::TimedFeature;
use crate::error::{Error, Result};

/// How timestamps are grouped into snapshots.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PartitionPolicy {
    /// Single-linkage clustering: consecutive distinct timestamps at most
    /// this far apart share a snapshot. `None` uses half the median gap.
    Gap(Option<Duration>),
    /// Fixed-width windows anchored at the earliest timestamp.
    Window(Duration),
}

impl Default for PartitionPolicy {
    fn default() -> Self {
        PartitionPolicy::Gap(None)
    }
}

fn parse_duration(s: &str) -> Result<Duration> {
    let std = humantime::parse_duration(s).map_err(|e| Error::Config(format!("duration `{s}`: {e}")))?;
    Duration::from_std(std).map_err(|e| Error::Config(format!("duration `{s}`: {e}")))
}

/// `gap`, `gap:<dur>` or `window:<dur>`, durations in humantime syntax.
impl FromStr for PartitionPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().split_once(':') {
            None if s.trim() == "gap" => Ok(PartitionPolicy::Gap(None)),
            Some(("gap", d)) => Ok(PartitionPolicy::Gap(Some(parse_duration(d)?))),
            Some(("window", d)) => {
                let w = parse_duration(d)?;
                if w <= Duration::zero() {
                    return Err(Error::Config("window width must be positive".into()));
                }
                Ok(PartitionPolicy::Window(w))
            }
            _ => Err(Error::Config(format!("partition policy `{s}`: expected gap[:<dur>] or window:<dur>"))),
        }
    }
}

impl fmt::Display for PartitionPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dur = |d: &Duration| humantime::format_duration(d.to_std().unwrap_or_default()).to_string();
        match self {
            PartitionPolicy::Gap(None) => f.write_str("gap"),
            PartitionPolicy::Gap(Some(d)) => write!(f, "gap:{}", dur(d)),
            PartitionPolicy::Window(d) => write!(f, "window:{}", dur(d)),
        }
    }
}

/// All features falling into one time interval.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    /// 1-based and contiguous.
    pub time_index: usize,
    /// Earliest member timestamp.
    pub instant: DateTime<Utc>,
    pub start: DateTime<Utc>,
    pub end: DateTime<Utc>,
    /// Members in input order.
    pub features: Vec<TimedFeature>,
}

pub type Timeline = Vec<Snapshot>;

/// Half the median gap between consecutive distinct timestamps.
pub fn default_gap(sorted_distinct: &[DateTime<Utc>]) -> Duration {
    let mut gaps: Vec<Duration> = sorted_distinct.windows(2).map(|w| w[1] - w[0]).collect();
    if gaps.is_empty() {
        return Duration::zero();
    }
    gaps.sort();
    let mid = gaps.len() / 2;
    let median = if gaps.len() % 2 == 1 { gaps[mid] } else { (gaps[mid - 1] + gaps[mid]) / 2 };
    median / 2
}

/// Assigns each feature to exactly one snapshot.
pub fn partition(features: &[TimedFeature], policy: PartitionPolicy) -> Result<Timeline> {
    if features.is_empty() {
        return Err(Error::NoFeatures);
    }
    let mut stamps: Vec<DateTime<Utc>> = features.iter().map(|f| f.timestamp).collect();
    stamps.sort();
    stamps.dedup();

    // bucket key per distinct timestamp
    let keys: Vec<i64> = match policy {
        PartitionPolicy::Gap(threshold) => {
            let gap = threshold.unwrap_or_else(|| default_gap(&stamps));
            let mut k = 0;
            let mut out = Vec::with_capacity(stamps.len());
            for (i, t) in stamps.iter().enumerate() {
                if i > 0 && *t - stamps[i - 1] > gap {
                    k += 1;
                }
                out.push(k);
            }
            out
        }
        PartitionPolicy::Window(width) => {
            let w = width.num_nanoseconds().unwrap_or(i64::MAX).max(1) as i128;
            stamps
                .iter()
                .map(|t| {
                    let off = (*t - stamps[0]).num_nanoseconds().map(i128::from).unwrap_or(i128::MAX);
                    (off / w) as i64
                })
                .collect()
        }
    };

    let mut timeline: Timeline = Vec::new();
    let mut key_of_snapshot = Vec::new();
    for (t, k) in stamps.iter().zip(&keys) {
        if key_of_snapshot.last() != Some(k) {
            key_of_snapshot.push(*k);
            timeline.push(Snapshot {
                time_index: timeline.len() + 1,
                instant: *t,
                start: *t,
                end: *t,
                features: Vec::new(),
            });
        }
        timeline.last_mut().expect("pushed").end = *t;
    }
    for f in features {
        let pos = stamps.binary_search(&f.timestamp).expect("stamp present");
        let snap = key_of_snapshot.binary_search(&keys[pos]).expect("key present");
        timeline[snap].features.push(f.clone());
    }
    Ok(timeline)
}

//! Transport-overhead statistics and delay calibration.
//!
//! A probe match pairs the server with a null agent so every measured
//! round trip is pure transport overhead. Per-round statistics are reduced
//! to a stable mean after discarding warm-up rounds, and two stable means
//! (fast and slow client stacks) yield the delay to inject into the fast
//! side.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::csvio::{self, CsvError};
use crate::server::FrameSample;

pub const DEFAULT_GRANULARITY_US: u64 = 50;
pub const DEFAULT_WARMUP_ROUNDS: u32 = 6;
/// Post-warm-up spread (max - min of round means) above this fraction of
/// the stable mean triggers the stability advisory.
pub const STABILITY_SPREAD_LIMIT: f64 = 0.20;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProbeError {
    #[error("round {0} has no samples")]
    EmptyRound(u32),
    #[error("no rounds left after discarding the first {0} warm-up rounds")]
    NothingRetained(u32),
    #[error("granularity must be >= 1 us")]
    ZeroGranularity,
    #[error(
        "swapped inputs: the \"fast\" mean ({fast_us:.3} us) is larger than the \"slow\" mean ({slow_us:.3} us)"
    )]
    SwappedInputs { fast_us: f64, slow_us: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundLatency {
    pub round_id: u32,
    pub n: usize,
    pub mean_overhead_us: f64,
    pub p50_us: u64,
    pub p99_us: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationResult {
    pub mean_fast_us: f64,
    pub mean_slow_us: f64,
    pub gap_us: f64,
    pub granularity_us: u64,
    /// Delay to inject on the fast side.
    pub delay_us: u64,
}

/// Nearest-rank percentile of an ascending slice; `pct` in (0, 100].
pub fn nearest_rank(sorted: &[u64], pct: f64) -> Option<u64> {
    if sorted.is_empty() {
        return None;
    }
    let rank = ((pct / 100.0) * sorted.len() as f64).ceil() as usize;
    Some(sorted[rank.clamp(1, sorted.len()) - 1])
}

/// Statistics of one round's overheads. The round id is taken from the
/// first sample.
pub fn round_stats(samples: &[FrameSample]) -> Result<RoundLatency, ProbeError> {
    let Some(first) = samples.first() else {
        return Err(ProbeError::EmptyRound(0));
    };
    let mut overheads: Vec<u64> = samples.iter().map(|s| s.overhead_us).collect();
    overheads.sort_unstable();
    let n = overheads.len();
    let mean = overheads.iter().map(|&v| v as f64).sum::<f64>() / n as f64;
    Ok(RoundLatency {
        round_id: first.round_id,
        n,
        mean_overhead_us: mean,
        p50_us: nearest_rank(&overheads, 50.0).unwrap_or_default(),
        p99_us: nearest_rank(&overheads, 99.0).unwrap_or_default(),
    })
}

/// Groups samples by round id (ascending) and computes each round's stats.
pub fn per_round_stats(samples: &[FrameSample]) -> Vec<RoundLatency> {
    let mut by_round: std::collections::BTreeMap<u32, Vec<FrameSample>> = Default::default();
    for s in samples {
        by_round.entry(s.round_id).or_default().push(*s);
    }
    by_round
        .values()
        .filter_map(|v| round_stats(v).ok())
        .collect()
}

fn retained(rounds: &[RoundLatency], warmup_rounds: u32) -> impl Iterator<Item = &RoundLatency> {
    rounds.iter().filter(move |r| r.round_id > warmup_rounds)
}

/// Mean of the per-round mean overheads for rounds after the warm-up.
pub fn stable_mean(rounds: &[RoundLatency], warmup_rounds: u32) -> Result<f64, ProbeError> {
    let means: Vec<f64> = retained(rounds, warmup_rounds)
        .map(|r| r.mean_overhead_us)
        .collect();
    if means.is_empty() {
        return Err(ProbeError::NothingRetained(warmup_rounds));
    }
    Ok(means.iter().sum::<f64>() / means.len() as f64)
}

/// Returns a message when the retained round means still spread by more
/// than [`STABILITY_SPREAD_LIMIT`] of their mean. Advisory only.
pub fn stability_warning(rounds: &[RoundLatency], warmup_rounds: u32) -> Option<String> {
    let mean = stable_mean(rounds, warmup_rounds).ok()?;
    let (lo, hi) = retained(rounds, warmup_rounds)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
            (lo.min(r.mean_overhead_us), hi.max(r.mean_overhead_us))
        });
    let spread = hi - lo;
    (mean > 0.0 && spread > STABILITY_SPREAD_LIMIT * mean).then(|| {
        format!(
            "round means after warm-up span {lo:.1}..{hi:.1} us ({:.0}% of the {mean:.1} us mean); latency may not have stabilized",
            100.0 * spread / mean
        )
    })
}

/// Rounds the slow-minus-fast gap up to the next multiple of
/// `granularity_us`.
pub fn calibrate_delay(
    mean_fast_us: f64,
    mean_slow_us: f64,
    granularity_us: u64,
) -> Result<CalibrationResult, ProbeError> {
    if granularity_us == 0 {
        return Err(ProbeError::ZeroGranularity);
    }
    let gap_us = mean_slow_us - mean_fast_us;
    if gap_us < 0.0 {
        return Err(ProbeError::SwappedInputs {
            fast_us: mean_fast_us,
            slow_us: mean_slow_us,
        });
    }
    let steps = (gap_us / granularity_us as f64).ceil() as u64;
    Ok(CalibrationResult {
        mean_fast_us,
        mean_slow_us,
        gap_us,
        granularity_us,
        delay_us: steps * granularity_us,
    })
}

pub fn write_round_latency_csv(path: &Path, rounds: &[RoundLatency]) -> Result<(), CsvError> {
    csvio::write_records(path, rounds)
}

pub fn read_round_latency_csv(path: &Path) -> Result<Vec<RoundLatency>, CsvError> {
    csvio::read_records(path)
}

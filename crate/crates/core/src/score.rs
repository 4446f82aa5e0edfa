//! Round scoring.
//!
//! A round is scored from the evaluated agent's point of view using four
//! normalized terms, each in `[0, 1]`:
//!
//! * `hp1`: remaining own HP over the HP total,
//! * `hp2`: one minus the opponent's remaining HP over the HP total,
//! * `w`: win flag, 1 only when own HP is strictly greater (ties lose),
//! * `t`: time term, `1 - elapsed/total` on a win and `elapsed/total` on a loss,
//!
//! and the final score is their plain average.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default maximum HP for each side.
pub const DEFAULT_HP_TOTAL: u32 = 400;
/// Default round length in frames (60 s at 60 FPS).
pub const DEFAULT_TIME_TOTAL: u32 = 3600;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScoreError {
    #[error("hp_total must be > 0")]
    ZeroHpTotal,
    #[error("time_total must be > 0")]
    ZeroTimeTotal,
    #[error("round {round_id}: hp_self = {value} exceeds hp_total = {bound}")]
    HpSelfOutOfRange {
        round_id: u32,
        value: u32,
        bound: u32,
    },
    #[error("round {round_id}: hp_opp = {value} exceeds hp_total = {bound}")]
    HpOppOutOfRange {
        round_id: u32,
        value: u32,
        bound: u32,
    },
    #[error("round {round_id}: elapsed_frames = {value} exceeds time_total = {bound}")]
    ElapsedOutOfRange {
        round_id: u32,
        value: u32,
        bound: u32,
    },
    #[error("no rounds left after discarding the first {warmup_rounds} warm-up rounds")]
    EmptySample { warmup_rounds: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScoreParams {
    pub hp_total: u32,
    pub time_total: u32,
}

impl Default for ScoreParams {
    fn default() -> Self {
        Self {
            hp_total: DEFAULT_HP_TOTAL,
            time_total: DEFAULT_TIME_TOTAL,
        }
    }
}

impl ScoreParams {
    pub fn new(hp_total: u32, time_total: u32) -> Result<Self, ScoreError> {
        let params = Self {
            hp_total,
            time_total,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<(), ScoreError> {
        if self.hp_total == 0 {
            return Err(ScoreError::ZeroHpTotal);
        }
        if self.time_total == 0 {
            return Err(ScoreError::ZeroTimeTotal);
        }
        Ok(())
    }
}

/// Terminal state of one round, as seen by the evaluated agent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundResult {
    pub round_id: u32,
    pub hp_self: u32,
    pub hp_opp: u32,
    pub elapsed_frames: u32,
    pub frames_sent: u32,
    pub frames_processed: u32,
    pub frames_skipped: u32,
    /// Mean server-measured transport overhead; `None` in virtual-clock runs.
    pub mean_overhead_us: Option<f64>,
}

impl RoundResult {
    /// Frames delivered to the agent whose reply never arrived before the
    /// round closed.
    pub fn frames_in_flight(&self) -> u32 {
        self.frames_sent
            .saturating_sub(self.frames_processed + self.frames_skipped)
    }

    /// True when the round ended by knock-out.
    pub fn is_ko(&self) -> bool {
        self.hp_self == 0 || self.hp_opp == 0
    }

    /// Checks the value bounds that scoring depends on.
    pub fn check_bounds(&self, params: &ScoreParams) -> Result<(), ScoreError> {
        params.validate()?;
        if self.hp_self > params.hp_total {
            return Err(ScoreError::HpSelfOutOfRange {
                round_id: self.round_id,
                value: self.hp_self,
                bound: params.hp_total,
            });
        }
        if self.hp_opp > params.hp_total {
            return Err(ScoreError::HpOppOutOfRange {
                round_id: self.round_id,
                value: self.hp_opp,
                bound: params.hp_total,
            });
        }
        if self.elapsed_frames > params.time_total {
            return Err(ScoreError::ElapsedOutOfRange {
                round_id: self.round_id,
                value: self.elapsed_frames,
                bound: params.time_total,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreBreakdown {
    pub hp1: f64,
    pub hp2: f64,
    pub w: u8,
    pub t: f64,
    pub score: f64,
}

/// Scores one round. Only the value bounds are enforced; a round that ended
/// early without a knock-out (e.g. an empty round) is still scored.
pub fn score_round(
    result: &RoundResult,
    params: &ScoreParams,
) -> Result<ScoreBreakdown, ScoreError> {
    result.check_bounds(params)?;

    let hp_total = f64::from(params.hp_total);
    let time_total = f64::from(params.time_total);
    let hp1 = f64::from(result.hp_self) / hp_total;
    let hp2 = 1.0 - f64::from(result.hp_opp) / hp_total;
    let w: u8 = u8::from(result.hp_self > result.hp_opp);
    let elapsed = f64::from(result.elapsed_frames) / time_total;
    let t = if w == 1 { 1.0 - elapsed } else { elapsed };
    let score = (hp1 + hp2 + f64::from(w) + t) / 4.0;

    Ok(ScoreBreakdown {
        hp1,
        hp2,
        w,
        t,
        score,
    })
}

/// Summary of scores over the rounds kept after warm-up.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreSummary {
    pub mean: f64,
    /// Population standard deviation.
    pub stddev: f64,
    pub n: usize,
}

/// Mean and population standard deviation of the round scores, ignoring
/// rounds with `round_id <= warmup_rounds`.
pub fn aggregate_scores(
    results: &[RoundResult],
    params: &ScoreParams,
    warmup_rounds: u32,
) -> Result<ScoreSummary, ScoreError> {
    let scores = results
        .iter()
        .filter(|r| r.round_id > warmup_rounds)
        .map(|r| score_round(r, params).map(|b| b.score))
        .collect::<Result<Vec<_>, _>>()?;
    summarize(&scores).ok_or(ScoreError::EmptySample { warmup_rounds })
}

/// Mean and population standard deviation; `None` for an empty slice.
pub fn summarize(values: &[f64]) -> Option<ScoreSummary> {
    if values.is_empty() {
        return None;
    }
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
    Some(ScoreSummary {
        mean,
        stddev: var.sqrt(),
        n,
    })
}

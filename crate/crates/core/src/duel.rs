//! Deterministic HP-cadence combat model.
//!
//! The evaluated agent lands a hit on every `agent_hit_period`-th frame it
//! actually processes; the scripted opponent lands a hit every
//! `opp_hit_period` wall frames regardless. Skipped frames therefore slow
//! the agent down while the opponent keeps its pace. All state is integer.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::score::RoundResult;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DuelError {
    #[error("round is already over by knock-out at frame {0}")]
    AlreadyKo(u32),
    #[error("round is already at its frame limit ({0})")]
    FrameLimit(u32),
    #[error("{0} must be > 0")]
    NonPositive(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DuelParams {
    pub hp_total: u32,
    /// Processed frames per agent hit.
    pub agent_hit_period: u32,
    pub agent_hit_damage: u32,
    /// Wall frames per opponent hit.
    pub opp_hit_period: u32,
    pub opp_hit_damage: u32,
    pub max_frames: u32,
}

impl Default for DuelParams {
    // A skip-free agent deals its 40th hit on frame 480 and wins; at half
    // rate its 40th hit would come on frame 960, after the opponent's 45th
    // hit (frame 900) has already taken 405 >= 400.
    fn default() -> Self {
        Self {
            hp_total: 400,
            agent_hit_period: 12,
            agent_hit_damage: 10,
            opp_hit_period: 20,
            opp_hit_damage: 9,
            max_frames: 3600,
        }
    }
}

impl DuelParams {
    pub fn validate(&self) -> Result<(), DuelError> {
        let checks = [
            (self.hp_total, "hp_total"),
            (self.agent_hit_period, "agent_hit_period"),
            (self.agent_hit_damage, "agent_hit_damage"),
            (self.opp_hit_period, "opp_hit_period"),
            (self.opp_hit_damage, "opp_hit_damage"),
        ];
        for (v, name) in checks {
            if v == 0 {
                return Err(DuelError::NonPositive(name));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DuelState {
    pub hp_self: u32,
    pub hp_opp: u32,
    /// Last applied wall frame (1-indexed; 0 before the first frame).
    pub wall_frame: u32,
    pub processed_count: u32,
    pub ko: bool,
}

impl DuelState {
    pub fn new(params: &DuelParams) -> Self {
        Self {
            hp_self: params.hp_total,
            hp_opp: params.hp_total,
            wall_frame: 0,
            processed_count: 0,
            ko: false,
        }
    }
}

/// Advances the duel by one wall frame.
///
/// Both sides' damage for the frame is applied before the knock-out check,
/// so a double knock-out is possible (and scores as a loss for the agent).
pub fn apply_frame(
    state: &DuelState,
    processed: bool,
    params: &DuelParams,
) -> Result<DuelState, DuelError> {
    if state.ko {
        return Err(DuelError::AlreadyKo(state.wall_frame));
    }
    if state.wall_frame >= params.max_frames {
        return Err(DuelError::FrameLimit(params.max_frames));
    }

    let mut next = *state;
    next.wall_frame += 1;
    let mut dmg_to_opp = 0;
    if processed {
        next.processed_count += 1;
        if next.processed_count % params.agent_hit_period == 0 {
            dmg_to_opp = params.agent_hit_damage;
        }
    }
    let dmg_to_self = if next.wall_frame % params.opp_hit_period == 0 {
        params.opp_hit_damage
    } else {
        0
    };
    next.hp_opp = next.hp_opp.saturating_sub(dmg_to_opp);
    next.hp_self = next.hp_self.saturating_sub(dmg_to_self);
    next.ko = next.hp_self == 0 || next.hp_opp == 0;
    Ok(next)
}

/// Simulates one round in virtual time for a client that is busy for
/// `total_frame_time_us` on every frame it takes.
///
/// Frame `f` is emitted at `(f - 1) * frame_period_us`. If the client is free
/// at that instant (free exactly at the emission time counts) it takes the
/// frame; otherwise the frame's data arrives while it is busy and is skipped.
pub fn run_duel_virtual(
    total_frame_time_us: u64,
    frame_period_us: u64,
    params: &DuelParams,
) -> Result<RoundResult, DuelError> {
    if total_frame_time_us == 0 {
        return Err(DuelError::NonPositive("total_frame_time_us"));
    }
    if frame_period_us == 0 {
        return Err(DuelError::NonPositive("frame_period_us"));
    }
    params.validate()?;

    let mut state = DuelState::new(params);
    let mut busy_until = 0u64;
    let mut skipped = 0u32;
    while !state.ko && state.wall_frame < params.max_frames {
        let emitted_at = u64::from(state.wall_frame) * frame_period_us;
        let take = busy_until <= emitted_at;
        if take {
            busy_until = emitted_at + total_frame_time_us;
        } else {
            skipped += 1;
        }
        state = apply_frame(&state, take, params)?;
    }

    Ok(RoundResult {
        round_id: 1,
        hp_self: state.hp_self,
        hp_opp: state.hp_opp,
        elapsed_frames: state.wall_frame,
        frames_sent: state.wall_frame,
        frames_processed: state.processed_count,
        frames_skipped: skipped,
        mean_overhead_us: None,
    })
}

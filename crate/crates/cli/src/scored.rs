//! Results rows with their score breakdown appended.

use frameguard::csvio::CsvRecord;
use frameguard::score::{score_round, RoundResult, ScoreError, ScoreParams};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredRow {
    pub round_id: u32,
    pub hp_self: u32,
    pub hp_opp: u32,
    pub elapsed_frames: u32,
    pub frames_sent: u32,
    pub frames_processed: u32,
    pub frames_skipped: u32,
    pub mean_overhead_us: Option<f64>,
    pub hp1: f64,
    pub hp2: f64,
    pub w: u8,
    pub t: f64,
    pub score: f64,
}

impl CsvRecord for ScoredRow {
    const HEADER: &'static [&'static str] = &[
        "round_id",
        "hp_self",
        "hp_opp",
        "elapsed_frames",
        "frames_sent",
        "frames_processed",
        "frames_skipped",
        "mean_overhead_us",
        "hp1",
        "hp2",
        "w",
        "t",
        "score",
    ];
}

impl ScoredRow {
    pub fn new(r: &RoundResult, params: &ScoreParams) -> Result<Self, ScoreError> {
        let b = score_round(r, params)?;
        Ok(Self {
            round_id: r.round_id,
            hp_self: r.hp_self,
            hp_opp: r.hp_opp,
            elapsed_frames: r.elapsed_frames,
            frames_sent: r.frames_sent,
            frames_processed: r.frames_processed,
            frames_skipped: r.frames_skipped,
            mean_overhead_us: r.mean_overhead_us,
            hp1: b.hp1,
            hp2: b.hp2,
            w: b.w,
            t: b.t,
            score: b.score,
        })
    }
}

/// One point of the per-round plot data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotRow {
    pub variant: String,
    pub round_id: u32,
    pub score: f64,
}

impl CsvRecord for PlotRow {
    const HEADER: &'static [&'static str] = &["variant", "round_id", "score"];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub variant: String,
    pub mean: f64,
    /// Population standard deviation.
    pub stddev: f64,
    pub n: usize,
}

impl CsvRecord for SummaryRow {
    const HEADER: &'static [&'static str] = &["variant", "mean", "stddev", "n"];
}

#[cfg(test)]
mod tests {
    use super::*;
    use frameguard::csvio::{from_reader, to_writer};

    #[test]
    fn scored_row_appends_breakdown_and_round_trips() {
        let r = RoundResult {
            round_id: 7,
            hp_self: 184,
            hp_opp: 0,
            elapsed_frames: 480,
            frames_sent: 480,
            frames_processed: 480,
            frames_skipped: 0,
            mean_overhead_us: Some(120.5),
        };
        let row = ScoredRow::new(&r, &ScoreParams::default()).unwrap();
        assert_eq!(row.w, 1);
        assert!((row.score - 0.831_666_666_666_666_7).abs() < 1e-12);
        let mut buf = Vec::new();
        to_writer(&mut buf, std::slice::from_ref(&row)).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with(
            "round_id,hp_self,hp_opp,elapsed_frames,frames_sent,frames_processed,frames_skipped,mean_overhead_us,hp1,hp2,w,t,score\n7,184,0,480,480,480,0,120.5,0.46,1.0,1,"
        ), "{text}");
        assert_eq!(
            from_reader::<ScoredRow, _>(text.as_bytes()).unwrap(),
            vec![row]
        );
    }
}

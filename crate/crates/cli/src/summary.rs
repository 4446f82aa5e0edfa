//! The probe summary: a small `key = value` file that `calibrate` reads back.

use std::fmt::Write as _;
use std::path::Path;

use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeSummary {
    pub label: String,
    pub stable_mean_us: f64,
    pub rounds: u32,
    pub warmup_rounds: u32,
    pub retained_rounds: usize,
    pub samples: usize,
}

impl ProbeSummary {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        // `{:?}` prints the shortest text that parses back to the same f64
        let _ = writeln!(s, "label = {}", self.label);
        let _ = writeln!(s, "stable_mean_us = {:?}", self.stable_mean_us);
        let _ = writeln!(s, "rounds = {}", self.rounds);
        let _ = writeln!(s, "warmup_rounds = {}", self.warmup_rounds);
        let _ = writeln!(s, "retained_rounds = {}", self.retained_rounds);
        let _ = writeln!(s, "samples = {}", self.samples);
        s
    }

    pub fn parse(path: &Path, text: &str) -> Result<Self, CliError> {
        let mut summary = ProbeSummary {
            label: String::new(),
            stable_mean_us: f64::NAN,
            rounds: 0,
            warmup_rounds: 0,
            retained_rounds: 0,
            samples: 0,
        };
        for (i, raw) in text.lines().enumerate() {
            let line = i as u64 + 1;
            let err = |message: String| CliError::Parse {
                path: path.to_owned(),
                line,
                message,
            };
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| err(format!("expected `key = value`, found `{content}`")))?;
            let bad = |_| err(format!("bad value `{value}` for `{key}`"));
            match key {
                "label" => summary.label = value.to_owned(),
                "stable_mean_us" => {
                    summary.stable_mean_us = value
                        .parse()
                        .map_err(|_| err(format!("bad value `{value}` for `{key}`")))?
                }
                "rounds" => summary.rounds = value.parse().map_err(bad)?,
                "warmup_rounds" => summary.warmup_rounds = value.parse().map_err(bad)?,
                "retained_rounds" => summary.retained_rounds = value.parse().map_err(bad)?,
                "samples" => summary.samples = value.parse().map_err(bad)?,
                // unknown keys are tolerated so that summaries can grow
                _ => {}
            }
        }
        if !summary.stable_mean_us.is_finite() {
            return Err(CliError::Parse {
                path: path.to_owned(),
                line: 0,
                message: "no finite `stable_mean_us` entry".into(),
            });
        }
        Ok(summary)
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(path, &text)
    }
}

/// A mean given on the command line: either a number of microseconds or the
/// path of a probe summary.
pub fn resolve_mean(arg: &str) -> Result<f64, CliError> {
    match arg.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        Ok(_) => Err(CliError::Usage(format!("`{arg}` is not a finite number"))),
        Err(_) => ProbeSummary::read(Path::new(arg)).map(|s| s.stable_mean_us),
    }
}

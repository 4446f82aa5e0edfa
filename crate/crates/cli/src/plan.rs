//! Experiment plans: the match config plus the variants to run.
//!
//! A plan file is flat `key = value` text. `#` starts a comment, blank lines
//! are ignored, and `variant` may repeat:
//!
//! ```text
//! clock_mode = virtual
//! rounds = 96
//! variant = fast-15.85, 15850, 500, 0
//! variant = slow-15.85, 15850, 850, 0
//! ```

use std::collections::HashSet;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Duration;

use frameguard::agents::VariantSpec;
use frameguard::server::MatchConfig;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct PlanError {
    /// 1-based; 0 for problems with the plan as a whole.
    pub line: u64,
    pub message: String,
}

impl PlanError {
    fn whole(message: impl Into<String>) -> Self {
        Self {
            line: 0,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentPlan {
    pub config: MatchConfig,
    pub variants: Vec<VariantSpec>,
    pub out_dir: PathBuf,
}

impl Default for ExperimentPlan {
    fn default() -> Self {
        Self {
            config: MatchConfig::default(),
            variants: Vec::new(),
            out_dir: PathBuf::from("results"),
        }
    }
}

impl ExperimentPlan {
    /// At least one variant, distinct labels usable as file names, and a
    /// valid match config.
    pub fn validate(&self) -> Result<(), PlanError> {
        if self.variants.is_empty() {
            return Err(PlanError::whole("plan has no variants"));
        }
        let mut seen = HashSet::new();
        for v in &self.variants {
            check_label(&v.label).map_err(PlanError::whole)?;
            if !seen.insert(v.label.as_str()) {
                return Err(PlanError::whole(format!(
                    "duplicate variant label `{}`",
                    v.label
                )));
            }
        }
        self.config
            .validate()
            .map_err(|e| PlanError::whole(e.to_string()))
    }

    /// Reads `key = value` lines over the current values.
    pub fn apply_text(&mut self, text: &str) -> Result<(), PlanError> {
        let mut seen: HashSet<String> = HashSet::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i as u64 + 1;
            let err = |message: String| PlanError { line, message };
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| err(format!("expected `key = value`, found `{content}`")))?;
            if key != "variant" && !seen.insert(key.to_owned()) {
                return Err(err(format!("`{key}` is set twice")));
            }
            self.set(key, value).map_err(err)?;
        }
        Ok(())
    }

    fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let c = &mut self.config;
        match key {
            "frame_period_us" => c.frame_period_us = number(key, value)?,
            "frames_per_round" => c.frames_per_round = number(key, value)?,
            "rounds" => c.rounds = number(key, value)?,
            "rounds_per_game" => c.rounds_per_game = number(key, value)?,
            "warmup_rounds" => c.warmup_rounds = number(key, value)?,
            "clock_mode" => c.clock_mode = value.parse()?,
            "port" => c.listen_port = number(key, value)?,
            "reply_timeout_ms" => c.reply_timeout = Duration::from_millis(number(key, value)?),
            "hp_total" => c.duel.hp_total = number(key, value)?,
            "agent_hit_period" => c.duel.agent_hit_period = number(key, value)?,
            "agent_hit_damage" => c.duel.agent_hit_damage = number(key, value)?,
            "opp_hit_period" => c.duel.opp_hit_period = number(key, value)?,
            "opp_hit_damage" => c.duel.opp_hit_damage = number(key, value)?,
            "out_dir" => self.out_dir = PathBuf::from(value),
            "variant" => self.variants.push(parse_variant(value)?),
            other => return Err(format!("unknown key `{other}`")),
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<Self, crate::CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| crate::CliError::io(path, e))?;
        let mut plan = Self::default();
        plan.apply_text(&text).map_err(|e| crate::CliError::Parse {
            path: path.to_owned(),
            line: e.line,
            message: e.message,
        })?;
        Ok(plan)
    }
}

fn number<T: FromStr>(key: &str, value: &str) -> Result<T, String> {
    value
        .parse()
        .map_err(|_| format!("`{key}` expects a non-negative integer, found `{value}`"))
}

/// Labels become file names, so they stay within a conservative charset.
pub fn check_label(label: &str) -> Result<(), String> {
    let ok = !label.is_empty()
        && label.len() <= 64
        && !label.starts_with('.')
        && label
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.' | '+'));
    if ok {
        Ok(())
    } else {
        Err(format!(
            "variant label `{label}` must be 1-64 characters of [A-Za-z0-9._+-] and not start with `.`"
        ))
    }
}

/// Parses `label,processing_us,extra_transport_us,injected_delay_us`.
pub fn parse_variant(s: &str) -> Result<VariantSpec, String> {
    let fields: Vec<&str> = s.split(',').map(str::trim).collect();
    let [label, processing, extra, delay] = fields[..] else {
        return Err(format!(
            "variant `{s}` must be `label,processing_us,extra_transport_us,injected_delay_us`"
        ));
    };
    check_label(label)?;
    Ok(VariantSpec::new(
        label,
        number("processing_us", processing)?,
        number("extra_transport_us", extra)?,
        number("injected_delay_us", delay)?,
    ))
}

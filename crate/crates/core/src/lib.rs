//! Fairness-calibrated evaluation harness for out-of-process real-time game
//! agents.
//!
//! The crate measures per-frame transport overhead between a frame-locked
//! match server and its agent clients, computes the delay that equalizes two
//! client stacks, simulates matches in which late replies cost frames, and
//! scores rounds on remaining HP, elapsed time and the win flag.
//!
//! * [`score`]: round scoring and aggregation.
//! * [`protocol`]: the length-prefixed binary wire format.
//! * [`duel`]: the deterministic HP-cadence combat model.
//! * [`server`]: the frame-locked match server (virtual and real-time clocks).
//! * [`probe`]: per-round overhead statistics and delay calibration.
//! * [`agents`]: built-in Sandbox and FixedLoad clients and the spin timer.

pub mod agents;
pub mod csvio;
pub mod duel;
pub mod probe;
pub mod protocol;
pub mod score;
pub mod server;

pub use agents::{AgentMode, NativeAgent, VariantSpec, VirtualAgent};
pub use duel::{run_duel_virtual, DuelParams};
pub use probe::{calibrate_delay, CalibrationResult, RoundLatency};
pub use protocol::Message;
pub use score::{aggregate_scores, score_round, RoundResult, ScoreBreakdown, ScoreParams};
pub use server::{ClockMode, FrameSample, MatchConfig, MatchOutcome};

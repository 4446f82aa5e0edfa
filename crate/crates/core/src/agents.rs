//! Built-in agent clients.
//!
//! * **Sandbox** replies to every frame immediately with a zero processing
//!   report, so the server sees pure transport overhead.
//! * **FixedLoad** occupies itself for a configured time per frame, emulating
//!   an agent with a known processing budget.
//!
//! Either mode can add `extra_transport_us`, time spent before replying that
//! is left out of the processing report and so looks like transport cost to
//! the server. FixedLoad additionally takes an injected delay, applied after
//! the emulated compute and included in the report.

use std::fmt;
use std::io::{BufWriter, Write};
use std::net::{TcpStream, ToSocketAddrs};
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::protocol::io::{read_message, write_message, WireError};
use crate::protocol::{Action, Frame, FrameDecoder, Hello, Message, Role, PROTOCOL_VERSION};

/// Coarse-sleep cut-off before the spin phase of [`spin_until`].
pub const DEFAULT_SPIN_GUARD: Duration = Duration::from_millis(2);

#[derive(Debug, Error)]
pub enum AgentError {
    #[error(transparent)]
    Wire(#[from] WireError),
    #[error("server rejected the handshake")]
    Rejected,
    #[error("unexpected {0} before handshake completed")]
    UnexpectedMessage(&'static str),
    #[error("unknown agent mode `{0}` (expected sandbox or fixedload)")]
    UnknownMode(String),
}

impl From<std::io::Error> for AgentError {
    fn from(e: std::io::Error) -> Self {
        AgentError::Wire(WireError::Io(e))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct VariantSpec {
    pub processing_us: u64,
    pub extra_transport_us: u64,
    pub injected_delay_us: u64,
    pub label: String,
}

impl VariantSpec {
    pub fn new(
        label: impl Into<String>,
        processing_us: u64,
        extra_transport_us: u64,
        injected_delay_us: u64,
    ) -> Self {
        Self {
            processing_us,
            extra_transport_us,
            injected_delay_us,
            label: label.into(),
        }
    }

    /// Processing plus injected delay; what the agent reports per frame.
    pub fn reported_us(&self) -> u64 {
        self.processing_us + self.injected_delay_us
    }

    /// Full time the client is occupied per frame.
    pub fn total_us(&self) -> u64 {
        self.reported_us() + self.extra_transport_us
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AgentMode {
    Sandbox,
    FixedLoad,
}

impl FromStr for AgentMode {
    type Err = AgentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sandbox" => Ok(AgentMode::Sandbox),
            "fixedload" => Ok(AgentMode::FixedLoad),
            other => Err(AgentError::UnknownMode(other.to_owned())),
        }
    }
}

impl fmt::Display for AgentMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AgentMode::Sandbox => "sandbox",
            AgentMode::FixedLoad => "fixedload",
        })
    }
}

/// Blocks until `deadline`: sleeps while more than `guard` remains, then
/// polls the monotonic clock. Returns the instant it observed on exit.
pub fn spin_until_with_guard(deadline: Instant, guard: Duration) -> Instant {
    let mut now = Instant::now();
    if deadline > now + guard {
        std::thread::sleep(deadline - now - guard);
        now = Instant::now();
    }
    while now < deadline {
        // yield rather than a pure spin so that a single-core host can still
        // run the peer process while we poll
        std::thread::yield_now();
        now = Instant::now();
    }
    now
}

pub fn spin_until(deadline: Instant) -> Instant {
    spin_until_with_guard(deadline, DEFAULT_SPIN_GUARD)
}

/// The null agent's reply.
pub fn sandbox_step(frame: &Frame) -> Action {
    Action {
        frame_id: frame.frame_id,
        action_code: 0,
        reported_processing_us: 0,
    }
}

/// Action code a FixedLoad agent answers with once its work is done.
pub const FIXEDLOAD_ACTION_CODE: u8 = 1;

fn fixedload_action(frame: &Frame, spec: &VariantSpec) -> Action {
    Action {
        frame_id: frame.frame_id,
        action_code: FIXEDLOAD_ACTION_CODE,
        reported_processing_us: saturate_u32(spec.reported_us()),
    }
}

fn saturate_u32(v: u64) -> u32 {
    u32::try_from(v).unwrap_or(u32::MAX)
}

/// Emulates compute, then the injected delay, then the extra transport time,
/// all measured from `received_at`.
pub fn fixedload_step_from(
    frame: &Frame,
    spec: &VariantSpec,
    received_at: Instant,
    guard: Duration,
) -> Action {
    let us = Duration::from_micros;
    let computed = received_at + us(spec.processing_us);
    spin_until_with_guard(computed, guard);
    let delayed = computed + us(spec.injected_delay_us);
    spin_until_with_guard(delayed, guard);
    spin_until_with_guard(delayed + us(spec.extra_transport_us), guard);
    fixedload_action(frame, spec)
}

pub fn fixedload_step(frame: &Frame, spec: &VariantSpec) -> Action {
    fixedload_step_from(frame, spec, Instant::now(), DEFAULT_SPIN_GUARD)
}

/// Reply from an agent driven by a virtual clock.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VirtualReply {
    pub action: Action,
    /// Logical time the agent stays busy with the frame.
    pub busy_us: u64,
}

/// An in-process agent for virtual-clock matches.
pub trait VirtualAgent {
    fn name(&self) -> &str;
    fn on_frame(&mut self, frame: &Frame) -> VirtualReply;
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NativeAgent {
    pub mode: AgentMode,
    pub spec: VariantSpec,
    pub spin_guard: Duration,
}

impl NativeAgent {
    pub fn sandbox(extra_transport_us: u64) -> Self {
        Self {
            mode: AgentMode::Sandbox,
            spec: VariantSpec::new("sandbox", 0, extra_transport_us, 0),
            spin_guard: DEFAULT_SPIN_GUARD,
        }
    }

    pub fn fixedload(spec: VariantSpec) -> Self {
        Self {
            mode: AgentMode::FixedLoad,
            spec,
            spin_guard: DEFAULT_SPIN_GUARD,
        }
    }

    pub fn role(&self) -> Role {
        match self.mode {
            AgentMode::Sandbox => Role::Sandbox,
            AgentMode::FixedLoad => Role::Player,
        }
    }

    /// Busy time per frame in virtual mode.
    pub fn virtual_cost_us(&self) -> u64 {
        match self.mode {
            AgentMode::Sandbox => self.spec.extra_transport_us,
            AgentMode::FixedLoad => self.spec.total_us(),
        }
    }

    /// Handles a frame in real time, blocking for the configured durations.
    pub fn handle_frame(&self, frame: &Frame, received_at: Instant) -> Action {
        match self.mode {
            AgentMode::Sandbox => {
                if self.spec.extra_transport_us > 0 {
                    spin_until_with_guard(
                        received_at + Duration::from_micros(self.spec.extra_transport_us),
                        self.spin_guard,
                    );
                }
                sandbox_step(frame)
            }
            AgentMode::FixedLoad => {
                fixedload_step_from(frame, &self.spec, received_at, self.spin_guard)
            }
        }
    }
}

impl VirtualAgent for NativeAgent {
    fn name(&self) -> &str {
        &self.spec.label
    }

    fn on_frame(&mut self, frame: &Frame) -> VirtualReply {
        let action = match self.mode {
            AgentMode::Sandbox => sandbox_step(frame),
            AgentMode::FixedLoad => fixedload_action(frame, &self.spec),
        };
        VirtualReply {
            action,
            busy_us: self.virtual_cost_us(),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ClientReport {
    pub frames_handled: u64,
    pub rounds_started: u32,
    pub rounds_ended: u32,
    pub match_rounds: Option<u32>,
}

/// Runs the client side of a match over an established stream: handshake,
/// then one ACTION per FRAME until MATCH_END.
pub fn run_client(stream: TcpStream, agent: &NativeAgent) -> Result<ClientReport, AgentError> {
    stream.set_nodelay(true)?;
    let mut reader = stream.try_clone()?;
    let mut writer = BufWriter::new(stream);
    let mut decoder = FrameDecoder::new();

    let name = truncate_utf8(&agent.spec.label, 64).to_owned();
    write_message(
        &mut writer,
        &Message::Hello(Hello {
            name,
            role: agent.role(),
            version: PROTOCOL_VERSION,
        }),
    )?;
    writer.flush()?;

    match read_message(&mut reader, &mut decoder)? {
        Message::HelloAck(ack) if ack.accepted => {}
        Message::HelloAck(_) => return Err(AgentError::Rejected),
        _ => return Err(AgentError::UnexpectedMessage("message")),
    }

    let mut report = ClientReport::default();
    loop {
        let msg = match read_message(&mut reader, &mut decoder) {
            Ok(m) => m,
            Err(WireError::Closed) => return Ok(report),
            Err(e) => return Err(e.into()),
        };
        let received_at = Instant::now();
        match msg {
            Message::Frame(frame) => {
                let action = agent.handle_frame(&frame, received_at);
                write_message(&mut writer, &Message::Action(action))?;
                writer.flush()?;
                report.frames_handled += 1;
            }
            Message::RoundStart(_) => report.rounds_started += 1,
            Message::RoundEnd(_) => report.rounds_ended += 1,
            Message::MatchEnd { rounds } => {
                report.match_rounds = Some(rounds);
                return Ok(report);
            }
            Message::Hello(_) | Message::HelloAck(_) | Message::Action(_) => {
                log::warn!("ignoring unexpected {:#04x} from server", msg.type_byte());
            }
        }
    }
}

fn truncate_utf8(s: &str, max: usize) -> &str {
    if s.len() <= max {
        return s;
    }
    let mut end = max;
    while !s.is_char_boundary(end) {
        end -= 1;
    }
    &s[..end]
}

/// Connects to a match server and runs the client loop.
pub fn connect_and_run(
    addr: impl ToSocketAddrs,
    agent: &NativeAgent,
) -> Result<ClientReport, AgentError> {
    let stream = TcpStream::connect(addr)?;
    run_client(stream, agent)
}

//! Frame-locked match server.
//!
//! Each round emits up to `frames_per_round` frames on a fixed cadence. A
//! frame is delivered to the agent only if the agent is idle when the frame
//! falls due; a frame that falls due while the agent is still working on an
//! earlier one is skipped. The duel advances one wall frame at a time, in
//! order, once the fate of each frame (processed or skipped) is known.
//!
//! The same round engine is driven either by a logical clock against an
//! in-process [`VirtualAgent`], or by the monotonic clock against a remote
//! agent over TCP.

use std::collections::VecDeque;
use std::fmt;
use std::io::Write;
use std::net::{SocketAddr, TcpListener, TcpStream};
use std::path::Path;
use std::str::FromStr;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError, TryRecvError};
use std::sync::Arc;
use std::thread::JoinHandle;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::agents::VirtualAgent;
use crate::csvio::{self, CsvError};
use crate::duel::{apply_frame, DuelParams, DuelState};
use crate::protocol::io::{read_message, WireError};
use crate::protocol::{
    encode, Action, Frame, FrameDecoder, Hello, HelloAck, Message, RoundEnd, RoundStart,
    DEFAULT_PORT, PROTOCOL_VERSION,
};
use crate::score::RoundResult;

pub const DEFAULT_FRAME_PERIOD_US: u64 = 16667;
pub const DEFAULT_FRAMES_PER_ROUND: u32 = 3600;
pub const DEFAULT_ROUNDS: u32 = 96;
pub const DEFAULT_ROUNDS_PER_GAME: u32 = 3;
pub const DEFAULT_WARMUP_ROUNDS: u32 = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClockMode {
    Virtual,
    Realtime,
}

impl FromStr for ClockMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "virtual" => Ok(ClockMode::Virtual),
            "realtime" => Ok(ClockMode::Realtime),
            other => Err(format!(
                "unknown clock mode `{other}` (expected virtual or realtime)"
            )),
        }
    }
}

impl fmt::Display for ClockMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClockMode::Virtual => "virtual",
            ClockMode::Realtime => "realtime",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchConfig {
    pub frame_period_us: u64,
    pub frames_per_round: u32,
    pub rounds: u32,
    /// Bookkeeping only.
    pub rounds_per_game: u32,
    pub warmup_rounds: u32,
    pub clock_mode: ClockMode,
    /// `max_frames` is overridden by `frames_per_round` during a match.
    pub duel: DuelParams,
    pub listen_port: u16,
    /// How long to wait for the HELLO and for a reply still in flight when
    /// a round closes.
    pub reply_timeout: Duration,
}

impl Default for MatchConfig {
    fn default() -> Self {
        Self {
            frame_period_us: DEFAULT_FRAME_PERIOD_US,
            frames_per_round: DEFAULT_FRAMES_PER_ROUND,
            rounds: DEFAULT_ROUNDS,
            rounds_per_game: DEFAULT_ROUNDS_PER_GAME,
            warmup_rounds: DEFAULT_WARMUP_ROUNDS,
            clock_mode: ClockMode::Virtual,
            duel: DuelParams::default(),
            listen_port: DEFAULT_PORT,
            reply_timeout: Duration::from_secs(5),
        }
    }
}

impl MatchConfig {
    pub fn validate(&self) -> Result<(), ServerError> {
        let bad = |m: String| Err(ServerError::Config(m));
        if self.frame_period_us == 0 {
            return bad("frame_period_us must be > 0".into());
        }
        if self.frame_period_us > u64::from(u32::MAX) {
            return bad("frame_period_us must fit in 32 bits".into());
        }
        if self.rounds == 0 {
            return bad("rounds must be >= 1".into());
        }
        if self.warmup_rounds >= self.rounds {
            return bad(format!(
                "warmup_rounds ({}) must be < rounds ({})",
                self.warmup_rounds, self.rounds
            ));
        }
        self.duel
            .validate()
            .map_err(|e| ServerError::Config(e.to_string()))
    }

    /// Duel parameters with the round length applied.
    pub fn round_duel(&self) -> DuelParams {
        DuelParams {
            max_frames: self.frames_per_round,
            ..self.duel
        }
    }

    pub fn games(&self) -> f64 {
        f64::from(self.rounds) / f64::from(self.rounds_per_game.max(1))
    }
}

/// One server-timed round trip.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameSample {
    pub round_id: u32,
    pub frame_id: u32,
    pub rtt_us: u64,
    pub reported_processing_us: u64,
    /// `rtt_us - reported_processing_us`, floored at 0.
    pub overhead_us: u64,
}

impl FrameSample {
    pub fn new(round_id: u32, frame_id: u32, rtt_us: u64, reported_processing_us: u64) -> Self {
        Self {
            round_id,
            frame_id,
            rtt_us,
            reported_processing_us,
            overhead_us: rtt_us.saturating_sub(reported_processing_us),
        }
    }

    /// The client reported more processing time than the whole round trip.
    pub fn is_overreported(&self) -> bool {
        self.reported_processing_us > self.rtt_us
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dispatch<T> {
    pub delivered: T,
    pub skipped: Vec<T>,
}

/// Takes the newest pending frame for an idle client; older ones are
/// returned as skipped. `None` when nothing is pending.
pub fn frame_dispatch<T>(pending: &mut VecDeque<T>) -> Option<Dispatch<T>> {
    let delivered = pending.pop_back()?;
    let skipped = pending.drain(..).collect();
    Some(Dispatch { delivered, skipped })
}

#[derive(Debug, Clone, PartialEq)]
pub enum AbortCause {
    Disconnected(String),
    UnknownFrame(u32),
    UnexpectedMessage(u8),
}

impl fmt::Display for AbortCause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AbortCause::Disconnected(why) => write!(f, "client disconnected: {why}"),
            AbortCause::UnknownFrame(id) => write!(f, "ACTION for unknown frame_id {id}"),
            AbortCause::UnexpectedMessage(t) => {
                write!(f, "unexpected message type 0x{t:02X} from client")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct MatchOutcome {
    pub rounds: Vec<RoundResult>,
    pub samples: Vec<FrameSample>,
}

#[derive(Debug, Error)]
pub enum ServerError {
    #[error("invalid match config: {0}")]
    Config(String),
    #[error("cannot listen on port {port}: {source}")]
    Bind { port: u16, source: std::io::Error },
    #[error("handshake failed: {0}")]
    Handshake(String),
    #[error("client speaks protocol version {client}, server speaks {server}")]
    VersionMismatch { client: u8, server: u8 },
    #[error("match aborted after {} complete round(s): {cause}", partial.rounds.len())]
    Aborted {
        cause: AbortCause,
        partial: Box<MatchOutcome>,
    },
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] CsvError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Fate {
    Awaiting,
    Processed,
    Skipped,
}

#[derive(Debug, Clone, Copy)]
struct InFlight {
    frame_id: u32,
    sent_at_us: u64,
}

/// Per-round bookkeeping shared by both clock modes. Times are microseconds
/// on whatever clock the driver uses.
#[derive(Debug)]
struct RoundEngine {
    round_id: u32,
    duel: DuelParams,
    state: DuelState,
    /// Fate of frame `i + 1`.
    fates: Vec<Fate>,
    applied: usize,
    in_flight: Option<InFlight>,
    pending: VecDeque<u32>,
    samples: Vec<FrameSample>,
}

impl RoundEngine {
    fn new(round_id: u32, duel: DuelParams) -> Self {
        Self {
            round_id,
            state: DuelState::new(&duel),
            duel,
            fates: Vec::with_capacity(duel.max_frames as usize),
            applied: 0,
            in_flight: None,
            pending: VecDeque::new(),
            samples: Vec::new(),
        }
    }

    fn emitted(&self) -> u32 {
        self.fates.len() as u32
    }

    fn all_emitted(&self) -> bool {
        self.emitted() >= self.duel.max_frames
    }

    fn is_done(&self) -> bool {
        self.state.ko || (self.all_emitted() && self.applied == self.fates.len())
    }

    /// Marks the next frame as due.
    fn emit(&mut self) -> u32 {
        self.fates.push(Fate::Awaiting);
        let id = self.emitted();
        self.pending.push_back(id);
        id
    }

    /// Resolves the due frames: all skipped if the client is busy, else the
    /// newest is delivered. Returns the frame to send.
    fn dispatch(&mut self, now_us: u64) -> Option<Frame> {
        if self.in_flight.is_some() {
            for id in self.pending.drain(..) {
                self.fates[id as usize - 1] = Fate::Skipped;
            }
            self.resolve();
            return None;
        }
        let Dispatch { delivered, skipped } = frame_dispatch(&mut self.pending)?;
        for id in skipped {
            self.fates[id as usize - 1] = Fate::Skipped;
        }
        self.resolve();
        self.in_flight = Some(InFlight {
            frame_id: delivered,
            sent_at_us: now_us,
        });
        Some(Frame {
            round_id: self.round_id,
            frame_id: delivered,
            hp_self: self.state.hp_self,
            hp_opp: self.state.hp_opp,
            send_ts_us: now_us,
        })
    }

    fn on_action(&mut self, action: &Action, now_us: u64) -> Result<(), AbortCause> {
        match self.in_flight {
            Some(f) if f.frame_id == action.frame_id => {
                self.in_flight = None;
                self.samples.push(FrameSample::new(
                    self.round_id,
                    f.frame_id,
                    now_us.saturating_sub(f.sent_at_us),
                    u64::from(action.reported_processing_us),
                ));
                self.fates[f.frame_id as usize - 1] = Fate::Processed;
                self.resolve();
                Ok(())
            }
            _ => Err(AbortCause::UnknownFrame(action.frame_id)),
        }
    }

    fn resolve(&mut self) {
        while !self.state.ko && self.applied < self.fates.len() {
            let processed = match self.fates[self.applied] {
                Fate::Awaiting => break,
                Fate::Processed => true,
                Fate::Skipped => false,
            };
            self.state = apply_frame(&self.state, processed, &self.duel)
                .expect("engine never passes KO or the frame limit");
            self.applied += 1;
        }
    }

    /// Closes the round. Frames still awaiting a reply count as neither
    /// processed nor skipped; the duel treats them as unprocessed.
    fn finish(&mut self, realtime: bool) -> RoundResult {
        while !self.state.ko && self.applied < self.fates.len() {
            self.state = apply_frame(&self.state, false, &self.duel)
                .expect("engine never passes KO or the frame limit");
            self.applied += 1;
        }
        let counted = &self.fates[..self.applied];
        let count = |fate| counted.iter().filter(|&&f| f == fate).count() as u32;
        let mean_overhead_us = (realtime && !self.samples.is_empty()).then(|| {
            self.samples
                .iter()
                .map(|s| s.overhead_us as f64)
                .sum::<f64>()
                / self.samples.len() as f64
        });
        RoundResult {
            round_id: self.round_id,
            hp_self: self.state.hp_self,
            hp_opp: self.state.hp_opp,
            elapsed_frames: self.state.wall_frame,
            frames_sent: self.applied as u32,
            frames_processed: count(Fate::Processed),
            frames_skipped: count(Fate::Skipped),
            mean_overhead_us,
        }
    }
}

/// Runs a match on a logical clock against an in-process agent. Frame `k`
/// falls due at `(k - 1) * frame_period_us`; a reply completes `busy_us`
/// after delivery, and a completion at the same instant as a tick is handled
/// first.
pub fn run_match_virtual(
    config: &MatchConfig,
    agent: &mut dyn VirtualAgent,
) -> Result<MatchOutcome, ServerError> {
    config.validate()?;
    let duel = config.round_duel();
    let mut outcome = MatchOutcome::default();

    for round_id in 1..=config.rounds {
        let mut engine = RoundEngine::new(round_id, duel);
        let mut completion: Option<(u64, Action)> = None;
        while !engine.is_done() {
            let next_tick = (!engine.all_emitted())
                .then(|| u64::from(engine.emitted()) * config.frame_period_us);
            let completes_first = match (completion, next_tick) {
                (Some((at, _)), Some(t)) => at <= t,
                (Some(_), None) => true,
                (None, _) => false,
            };
            match (completion.take_if(|_| completes_first), next_tick) {
                (Some((at, action)), _) => {
                    engine
                        .on_action(&action, at)
                        .expect("virtual agent always answers the frame in flight");
                }
                (None, Some(t)) => {
                    engine.emit();
                    if let Some(frame) = engine.dispatch(t) {
                        let reply = agent.on_frame(&frame);
                        completion = Some((t + reply.busy_us, reply.action));
                    }
                }
                (None, None) => unreachable!("round cannot stall without a frame in flight"),
            }
        }
        outcome.rounds.push(engine.finish(false));
    }
    Ok(outcome)
}

/// Binds the match listener on the loopback interface.
pub fn bind(port: u16) -> Result<TcpListener, ServerError> {
    TcpListener::bind(("127.0.0.1", port)).map_err(|source| ServerError::Bind { port, source })
}

/// An agent that completed the handshake.
#[derive(Debug)]
pub struct AgentConnection {
    stream: TcpStream,
    decoder: FrameDecoder,
    pub hello: Hello,
    pub peer: SocketAddr,
}

/// Waits up to `timeout` for one agent to connect, then runs the handshake.
pub fn accept_agent(
    listener: &TcpListener,
    config: &MatchConfig,
    timeout: Duration,
) -> Result<AgentConnection, ServerError> {
    listener.set_nonblocking(true)?;
    let deadline = Instant::now() + timeout;
    let (stream, peer) = loop {
        match listener.accept() {
            Ok(pair) => break pair,
            Err(e) if e.kind() == std::io::ErrorKind::WouldBlock => {
                if Instant::now() >= deadline {
                    return Err(ServerError::Handshake(format!(
                        "no agent connected within {timeout:?}"
                    )));
                }
                std::thread::sleep(Duration::from_millis(5));
            }
            Err(e) => return Err(e.into()),
        }
    };
    listener.set_nonblocking(false)?;
    stream.set_nonblocking(false)?;
    handshake(stream, peer, config)
}

/// Server side of HELLO / HELLO_ACK.
pub fn handshake(
    mut stream: TcpStream,
    peer: SocketAddr,
    config: &MatchConfig,
) -> Result<AgentConnection, ServerError> {
    stream.set_nodelay(true)?;
    stream.set_read_timeout(Some(config.reply_timeout))?;
    let mut decoder = FrameDecoder::new();
    let hello = match read_message(&mut stream, &mut decoder) {
        Ok(Message::Hello(h)) => h,
        Ok(other) => {
            return Err(ServerError::Handshake(format!(
                "expected HELLO, got message type 0x{:02X}",
                other.type_byte()
            )))
        }
        Err(e) => return Err(ServerError::Handshake(e.to_string())),
    };
    let accepted = hello.version == PROTOCOL_VERSION;
    let ack = Message::HelloAck(HelloAck {
        accepted,
        frame_period_us: config.frame_period_us as u32,
    });
    stream.write_all(&encode(&ack).expect("ack is always encodable"))?;
    if !accepted {
        return Err(ServerError::VersionMismatch {
            client: hello.version,
            server: PROTOCOL_VERSION,
        });
    }
    stream.set_read_timeout(None)?;
    Ok(AgentConnection {
        stream,
        decoder,
        hello,
        peer,
    })
}

enum Event {
    Action(Action, Instant),
    Unexpected(u8),
    Closed(String),
}

struct Reader {
    rx: Receiver<Event>,
    stop: Arc<AtomicBool>,
    handle: Option<JoinHandle<()>>,
}

impl Reader {
    fn spawn(mut stream: TcpStream, mut decoder: FrameDecoder) -> std::io::Result<Self> {
        let (tx, rx) = mpsc::channel();
        let stop = Arc::new(AtomicBool::new(false));
        let stop_flag = Arc::clone(&stop);
        stream.set_read_timeout(Some(Duration::from_millis(200)))?;
        let handle = std::thread::Builder::new()
            .name("frameguard-reader".into())
            .spawn(move || loop {
                match read_message(&mut stream, &mut decoder) {
                    Ok(Message::Action(a)) => {
                        let at = Instant::now();
                        if tx.send(Event::Action(a, at)).is_err() {
                            return;
                        }
                    }
                    Ok(other) => {
                        let _ = tx.send(Event::Unexpected(other.type_byte()));
                    }
                    Err(WireError::Io(e))
                        if matches!(
                            e.kind(),
                            std::io::ErrorKind::WouldBlock | std::io::ErrorKind::TimedOut
                        ) =>
                    {
                        if stop_flag.load(Ordering::Relaxed) {
                            return;
                        }
                    }
                    Err(e) => {
                        let _ = tx.send(Event::Closed(e.to_string()));
                        return;
                    }
                }
            })?;
        Ok(Self {
            rx,
            stop,
            handle: Some(handle),
        })
    }

    /// Next event, or `None` once `deadline` passes. Sleeps on the channel
    /// until `guard` before the deadline, then polls.
    fn next_before(&self, deadline: Instant, guard: Duration) -> Option<Event> {
        loop {
            match self.rx.try_recv() {
                Ok(ev) => return Some(ev),
                Err(TryRecvError::Disconnected) => {
                    return Some(Event::Closed("reader stopped".into()))
                }
                Err(TryRecvError::Empty) => {}
            }
            let now = Instant::now();
            if now >= deadline {
                return None;
            }
            if deadline - now > guard {
                match self.rx.recv_timeout(deadline - now - guard) {
                    Ok(ev) => return Some(ev),
                    Err(RecvTimeoutError::Timeout) => {}
                    Err(RecvTimeoutError::Disconnected) => {
                        return Some(Event::Closed("reader stopped".into()))
                    }
                }
            } else {
                std::thread::yield_now();
            }
        }
    }
}

impl Drop for Reader {
    fn drop(&mut self) {
        self.stop.store(true, Ordering::Relaxed);
        if let Some(h) = self.handle.take() {
            let _ = h.join();
        }
    }
}

/// Guard window before a tick in which the tick owner polls instead of
/// sleeping.
const TICK_GUARD: Duration = Duration::from_millis(2);
/// Gap between ROUND_START and the first tick.
const ROUND_LEAD: Duration = Duration::from_millis(1);

/// Runs a match against a remote agent on the monotonic clock.
pub fn run_match_realtime(
    config: &MatchConfig,
    conn: AgentConnection,
) -> Result<MatchOutcome, ServerError> {
    config.validate()?;
    let AgentConnection {
        stream, decoder, ..
    } = conn;
    let mut writer = stream.try_clone()?;
    let reader = Reader::spawn(stream, decoder)?;
    let epoch = Instant::now();
    let us_since = |t: Instant| t.saturating_duration_since(epoch).as_micros() as u64;
    let period = Duration::from_micros(config.frame_period_us);
    let duel = config.round_duel();
    let mut outcome = MatchOutcome::default();
    // a reply still outstanding from a closed round; dropped if it shows up
    let mut stale: Option<u32> = None;

    let abort = |cause: AbortCause, outcome: MatchOutcome| ServerError::Aborted {
        cause,
        partial: Box::new(outcome),
    };
    let send = |w: &mut TcpStream, msg: &Message| -> Result<(), std::io::Error> {
        w.write_all(&encode(msg).expect("server messages are always encodable"))
    };

    for round_id in 1..=config.rounds {
        let mut engine = RoundEngine::new(round_id, duel);
        if let Err(e) = send(
            &mut writer,
            &Message::RoundStart(RoundStart {
                round_id,
                frames: config.frames_per_round,
                hp_total: duel.hp_total,
            }),
        ) {
            return Err(abort(AbortCause::Disconnected(e.to_string()), outcome));
        }
        let start = Instant::now() + ROUND_LEAD;
        let mut drain_deadline: Option<Instant> = None;

        loop {
            if engine.is_done() && engine.in_flight.is_none() {
                break;
            }
            let next_tick = (!engine.all_emitted() && !engine.state.ko)
                .then(|| start + period * engine.emitted());
            let deadline = match (next_tick, drain_deadline) {
                (Some(t), _) => t,
                (None, Some(d)) => d,
                (None, None) => *drain_deadline.insert(Instant::now() + config.reply_timeout),
            };

            match reader.next_before(deadline, TICK_GUARD) {
                Some(Event::Action(action, at)) => {
                    if stale == Some(action.frame_id) {
                        stale = None;
                        continue;
                    }
                    if let Err(cause) = engine.on_action(&action, us_since(at)) {
                        outcome.samples.append(&mut engine.samples);
                        return Err(abort(cause, outcome));
                    }
                }
                Some(Event::Unexpected(t)) => {
                    outcome.samples.append(&mut engine.samples);
                    return Err(abort(AbortCause::UnexpectedMessage(t), outcome));
                }
                Some(Event::Closed(why)) => {
                    outcome.samples.append(&mut engine.samples);
                    return Err(abort(AbortCause::Disconnected(why), outcome));
                }
                None if next_tick.is_some() => {
                    let now = Instant::now();
                    while !engine.all_emitted() && start + period * engine.emitted() <= now {
                        engine.emit();
                    }
                    let sent_at = Instant::now();
                    if let Some(frame) = engine.dispatch(us_since(sent_at)) {
                        if let Err(e) = send(&mut writer, &Message::Frame(frame)) {
                            outcome.samples.append(&mut engine.samples);
                            return Err(abort(AbortCause::Disconnected(e.to_string()), outcome));
                        }
                    }
                }
                None => {
                    // reply timeout at round end
                    stale = engine.in_flight.map(|f| f.frame_id);
                    log::warn!(
                        "round {round_id}: no reply for frame {:?} before timeout",
                        stale
                    );
                    break;
                }
            }
        }

        let result = engine.finish(true);
        outcome.samples.append(&mut engine.samples);
        let end = Message::RoundEnd(RoundEnd {
            round_id,
            hp_self: result.hp_self,
            hp_opp: result.hp_opp,
            elapsed_frames: result.elapsed_frames,
            frames_processed: result.frames_processed,
            frames_skipped: result.frames_skipped,
        });
        outcome.rounds.push(result);
        if let Err(e) = send(&mut writer, &end) {
            return Err(abort(AbortCause::Disconnected(e.to_string()), outcome));
        }
    }

    let _ = send(
        &mut writer,
        &Message::MatchEnd {
            rounds: config.rounds,
        },
    );
    let _ = writer.shutdown(std::net::Shutdown::Write);
    drop(reader);
    Ok(outcome)
}

/// The peer of a match.
pub enum AgentLink<'a> {
    Virtual(&'a mut dyn VirtualAgent),
    Remote(AgentConnection),
}

/// Runs a match in the configured clock mode.
pub fn run_match(config: &MatchConfig, client: AgentLink<'_>) -> Result<MatchOutcome, ServerError> {
    match (config.clock_mode, client) {
        (ClockMode::Virtual, AgentLink::Virtual(agent)) => run_match_virtual(config, agent),
        (ClockMode::Realtime, AgentLink::Remote(conn)) => run_match_realtime(config, conn),
        (ClockMode::Virtual, AgentLink::Remote(_)) => Err(ServerError::Config(
            "virtual clock mode needs an in-process agent".into(),
        )),
        (ClockMode::Realtime, AgentLink::Virtual(_)) => Err(ServerError::Config(
            "realtime clock mode needs a connected agent".into(),
        )),
    }
}

pub fn write_results_csv(path: &Path, rounds: &[RoundResult]) -> Result<(), CsvError> {
    csvio::write_records(path, rounds)
}

pub fn read_results_csv(path: &Path) -> Result<Vec<RoundResult>, CsvError> {
    csvio::read_records(path)
}

pub fn write_samples_csv(path: &Path, samples: &[FrameSample]) -> Result<(), CsvError> {
    csvio::write_records(path, samples)
}

pub fn read_samples_csv(path: &Path) -> Result<Vec<FrameSample>, CsvError> {
    csvio::read_records(path)
}
